"""Three-valued answers for tail-sensitive predicates."""

import enum


class Decision(enum.Enum):
    YES = "yes"
    NO = "no"
    UNDECIDABLE = "undecidable-from-window"

    def __bool__(self):
        raise TypeError("Decision is three-valued; compare explicitly")
