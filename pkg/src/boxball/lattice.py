"""Particle configurations and their lattice path encodings.

A configuration is a finite window of symbols in {0, ..., kappa} plus a
boundary mode.  FiniteSupport asserts the window is all there is (empty
outside); Windowed means the outside is unknown, and downstream operations
must either stay window-local or report undecidability.

The path encoding stores, for each index n in a span containing both the
window and the anchor 0, the cumulative color tallies (a_0(n), ..., a_kappa(n))
with a_i(0) = 0.  Tallies at negative n are negative counts of the sites
walked left of the origin.  All arithmetic here is exact integer arithmetic.
"""

import enum
from dataclasses import dataclass, field

import numpy as np

from .errors import MalformedPathError, UndecidableError
from .simplex import SimplexBasis

# text format alphabet: symbol value 0..61
_ALPHABET = "0123456789abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ"
_SYMBOL_VALUE = {ch: v for v, ch in enumerate(_ALPHABET)}
MAX_TEXT_KAPPA = len(_ALPHABET) - 1


class Boundary(enum.Enum):
    FINITE_SUPPORT = "finite"
    WINDOWED = "windowed"


@dataclass(frozen=True)
class Configuration:
    """A window of particle symbols.

    cells[k] is the symbol at site offset + k.
    """

    kappa: int
    offset: int
    cells: tuple
    boundary: Boundary = Boundary.FINITE_SUPPORT

    def __post_init__(self):
        if self.kappa < 1:
            raise ValueError("kappa must be >= 1")
        bad = [c for c in self.cells if not (0 <= c <= self.kappa)]
        if bad:
            raise ValueError(f"cells contain symbols outside 0..{self.kappa}: {bad[:5]}")

    @property
    def n_min(self) -> int:
        return self.offset

    @property
    def n_max(self) -> int:
        return self.offset + len(self.cells) - 1

    def cell(self, n: int) -> int:
        """Symbol at site n; FiniteSupport extends with 0 outside the window."""
        if self.n_min <= n <= self.n_max:
            return self.cells[n - self.offset]
        if self.boundary is Boundary.FINITE_SUPPORT:
            return 0
        raise UndecidableError(f"site {n} outside windowed configuration")

    def cells_range(self, lo: int, hi: int) -> tuple:
        """Symbols at sites lo..hi inclusive."""
        return tuple(self.cell(n) for n in range(lo, hi + 1))

    def color_counts(self) -> np.ndarray:
        """Number of window cells holding each symbol 0..kappa."""
        return np.bincount(np.asarray(self.cells, dtype=int), minlength=self.kappa + 1)


def make_config(kappa, cells, offset=1, boundary=Boundary.FINITE_SUPPORT) -> Configuration:
    """Convenience constructor; default window starts at site 1."""
    return Configuration(kappa=kappa, offset=offset, cells=tuple(int(c) for c in cells),
                         boundary=boundary)


@dataclass(frozen=True, eq=False)
class PathEncoding:
    """Cumulative tallies of a configuration, anchored at a(0) = 0.

    counts has shape (span_hi - span_lo + 1, kappa + 1); row r holds
    (a_0, ..., a_kappa) at index n = span_lo + r.  The span always contains
    0 and the configuration window; FiniteSupport gap sites are empty.
    window_lo/window_hi remember the original configuration window so
    decode() round-trips exactly.
    """

    kappa: int
    window_lo: int
    window_hi: int
    boundary: Boundary
    counts: np.ndarray = field(repr=False)
    span_lo: int = 0

    def __post_init__(self):
        if self.counts.ndim != 2 or self.counts.shape[1] != self.kappa + 1:
            raise MalformedPathError("counts must have kappa+1 columns")
        if not (self.span_lo <= 0 <= self.span_hi):
            raise MalformedPathError("span must contain the anchor 0")
        if self.counts[-self.span_lo].any():
            raise MalformedPathError("counts must vanish at the anchor n = 0")

    @property
    def span_hi(self) -> int:
        return self.span_lo + self.counts.shape[0] - 1

    def __eq__(self, other):
        if not isinstance(other, PathEncoding):
            return NotImplemented
        return (self.kappa == other.kappa and self.window_lo == other.window_lo
                and self.window_hi == other.window_hi and self.boundary == other.boundary
                and self.span_lo == other.span_lo
                and np.array_equal(self.counts, other.counts))

    def row(self, n: int) -> int:
        return n - self.span_lo

    def counts_at(self, n: int) -> np.ndarray:
        """Tally vector a(n); analytic e_0 extension outside the span when FiniteSupport."""
        if self.span_lo <= n <= self.span_hi:
            return self.counts[self.row(n)].copy()
        if self.boundary is not Boundary.FINITE_SUPPORT:
            raise UndecidableError(f"index {n} outside windowed encoding span")
        if n > self.span_hi:
            out = self.counts[-1].copy()
            out[0] += n - self.span_hi
        else:
            out = self.counts[0].copy()
            out[0] -= self.span_lo - n
        return out

    def heights(self, i: int) -> np.ndarray:
        """A_i over the whole span: a_0(n) - a_i(n) as an int array."""
        _check_color(self.kappa, i)
        return self.counts[:, 0] - self.counts[:, i]

    def steps(self) -> np.ndarray:
        """Per-step tally increments over the span; shape (span length - 1, kappa+1)."""
        return np.diff(self.counts, axis=0)


def _check_color(kappa: int, i: int):
    if not 1 <= i <= kappa:
        raise ValueError(f"color must be in 1..{kappa}, got {i}")


def encode(config: Configuration) -> PathEncoding:
    """Path encoding of a configuration.

    Windowed configurations must have their window adjacent to the anchor
    (n_min <= 1 and n_max >= 0); otherwise the tallies relative to a(0) = 0
    would depend on unseen sites.
    """
    n_min, n_max = config.n_min, config.n_max
    if len(config.cells) == 0:
        n_max = n_min - 1
    if config.boundary is Boundary.WINDOWED and (n_min > 1 or n_max < 0):
        raise UndecidableError(
            "windowed configuration does not reach the anchor 0; tallies undecidable")
    span_lo = min(n_min - 1, 0)
    span_hi = max(n_max, 0)
    length = span_hi - span_lo
    symbols = np.zeros(length, dtype=np.int64)
    if config.cells:
        # step at row r covers site span_lo + 1 + r
        first = n_min - (span_lo + 1)
        symbols[first:first + len(config.cells)] = config.cells
    incr = np.zeros((length + 1, config.kappa + 1), dtype=np.int64)
    incr[np.arange(1, length + 1), symbols] = 1
    counts = np.cumsum(incr, axis=0)
    counts -= counts[-span_lo]  # re-anchor at n = 0
    counts.setflags(write=False)
    return PathEncoding(kappa=config.kappa, window_lo=n_min, window_hi=n_max,
                        boundary=config.boundary, counts=counts, span_lo=span_lo)


def decode(path: PathEncoding) -> Configuration:
    """Recover the configuration; inverse of encode.

    Raises MalformedPathError when some step increment is not a unit tally
    vector.
    """
    d = path.steps()
    if not ((d >= 0).all() and (d.sum(axis=1) == 1).all() and (d.max(axis=1) == 1).all()):
        raise MalformedPathError("each step must increment exactly one tally by 1")
    symbols = np.argmax(d, axis=1)  # symbol at site span_lo + 1 + r
    lo, hi = path.window_lo, path.window_hi
    if hi < lo:
        cells = ()
    else:
        first = lo - (path.span_lo + 1)
        cells = tuple(int(s) for s in symbols[first:first + (hi - lo + 1)])
    return Configuration(kappa=path.kappa, offset=lo, cells=cells, boundary=path.boundary)


def canonical_config(config: Configuration) -> Configuration:
    """Trim leading/trailing empty cells of a FiniteSupport configuration.

    Two FiniteSupport configurations describe the same two-sided particle
    system iff their canonical forms are equal.  Windowed configurations are
    returned unchanged (their empty edge cells are data, not padding).
    """
    if config.boundary is not Boundary.FINITE_SUPPORT:
        return config
    cells = config.cells
    first = next((k for k, c in enumerate(cells) if c != 0), None)
    if first is None:
        return Configuration(kappa=config.kappa, offset=1, cells=(),
                             boundary=Boundary.FINITE_SUPPORT)
    last = max(k for k, c in enumerate(cells) if c != 0)
    return Configuration(kappa=config.kappa, offset=config.offset + first,
                         cells=cells[first:last + 1], boundary=Boundary.FINITE_SUPPORT)


def height(path: PathEncoding, i: int, n: int) -> int:
    """A_i S_n = a_0(n) - a_i(n), exact."""
    _check_color(path.kappa, i)
    a = path.counts_at(n)
    return int(a[0] - a[i])


def height_via_projection(path: PathEncoding, basis: SimplexBasis, i: int, n: int) -> float:
    """A_i S_n recovered from the simplex projection of S_n.

    Agrees with height() to float precision; this is the consistency check
    between integer tallies and the geometric picture.
    """
    _check_color(path.kappa, i)
    if basis.kappa != path.kappa:
        raise ValueError("basis and path disagree on kappa")
    s = path.counts_at(n).astype(float) @ basis.vectors
    d = basis.step_difference(i)
    return -2.0 * float(s @ d) / float(d @ d)


def s_points(path: PathEncoding, basis: SimplexBasis) -> np.ndarray:
    """All S_n over the span as float points in R^kappa."""
    return path.counts.astype(float) @ basis.vectors


def permute_zero_i(config: Configuration, i: int) -> Configuration:
    """Swap symbols 0 and i at every window cell (an involution).

    Window-local: boundary mode is carried over unchanged, so for
    FiniteSupport inputs the swap is only meaningful as the intermediate
    step of a dynamics operator, not as a standalone two-sided object.
    """
    _check_color(config.kappa, i)
    table = np.arange(config.kappa + 1)
    table[0], table[i] = i, 0
    cells = tuple(int(table[c]) for c in config.cells)
    return Configuration(kappa=config.kappa, offset=config.offset, cells=cells,
                         boundary=config.boundary)


def permute_counts(path: PathEncoding, i: int) -> PathEncoding:
    """Encoding-level tau_(0,i): swap the a_0 and a_i tally columns."""
    _check_color(path.kappa, i)
    counts = path.counts.copy()
    counts[:, [0, i]] = counts[:, [i, 0]]
    counts.setflags(write=False)
    return PathEncoding(kappa=path.kappa, window_lo=path.window_lo,
                        window_hi=path.window_hi, boundary=path.boundary,
                        counts=counts, span_lo=path.span_lo)


def encoding_to_csv(path: PathEncoding) -> str:
    """CSV dump: n, a_0..a_kappa, A_1..A_kappa."""
    header = (["n"] + [f"a_{j}" for j in range(path.kappa + 1)]
              + [f"A_{i}" for i in range(1, path.kappa + 1)])
    lines = [",".join(header)]
    for r in range(path.counts.shape[0]):
        n = path.span_lo + r
        a = path.counts[r]
        heights_n = [a[0] - a[i] for i in range(1, path.kappa + 1)]
        lines.append(",".join(str(int(x)) for x in [n, *a, *heights_n]))
    return "\n".join(lines) + "\n"


def config_to_text(config: Configuration) -> str:
    """One-line text form: kappa=K offset=N cells=... boundary=finite|windowed."""
    if config.kappa > MAX_TEXT_KAPPA:
        raise ValueError(f"text format supports kappa <= {MAX_TEXT_KAPPA}")
    cells = "".join(_ALPHABET[c] for c in config.cells)
    return (f"kappa={config.kappa} offset={config.offset} cells={cells} "
            f"boundary={config.boundary.value}")


def parse_config_text(text: str) -> Configuration:
    """Parse the one-line text form; boundary defaults to finite."""
    fields = {}
    for tok in text.split():
        if "=" not in tok:
            raise ValueError(f"malformed token {tok!r} in configuration text")
        key, _, val = tok.partition("=")
        fields[key] = val
    try:
        kappa = int(fields["kappa"])
        offset = int(fields["offset"])
        raw = fields["cells"]
    except KeyError as exc:
        raise ValueError(f"configuration text missing field {exc}") from exc
    boundary = Boundary(fields.get("boundary", "finite"))
    try:
        cells = tuple(_SYMBOL_VALUE[ch] for ch in raw)
    except KeyError as exc:
        raise ValueError(f"unknown cell symbol {exc}") from exc
    return Configuration(kappa=kappa, offset=offset, cells=cells, boundary=boundary)
