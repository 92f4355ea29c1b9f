"""Carrier process and the direct single-pass dynamics oracle.

The color-i carrier sweeps the window left to right, picking up a color-i
ball at every site holding one and dropping one at every empty site while
loaded.  This module deliberately stays at the level of cells and explicit
loops: it is the reference implementation the Pitman-transform route in
`dynamics` is checked against, so it must not share machinery with it.
"""

from dataclasses import dataclass

import numpy as np

from .errors import UndecidableError
from .lattice import Boundary, Configuration, PathEncoding

_sentinel = object()


@dataclass(frozen=True, eq=False)
class CarrierTrace:
    """Loads W_n of the color-i carrier at each window site."""

    color: int
    offset: int
    loads: np.ndarray

    @property
    def n_min(self) -> int:
        return self.offset

    @property
    def n_max(self) -> int:
        return self.offset + self.loads.size - 1

    def __eq__(self, other):
        if not isinstance(other, CarrierTrace):
            return NotImplemented
        return (self.color == other.color and self.offset == other.offset
                and np.array_equal(self.loads, other.loads))

    def load(self, n: int) -> int:
        if not self.n_min <= n <= self.n_max:
            raise IndexError(f"site {n} outside carrier trace")
        return int(self.loads[n - self.offset])


def _initial_load(config: Configuration, initial_load):
    if initial_load is not _sentinel:
        if initial_load is None or initial_load < 0:
            raise ValueError("initial_load must be a nonnegative integer")
        return int(initial_load)
    if config.boundary is Boundary.FINITE_SUPPORT:
        return 0  # empty left tail forces an empty carrier at the window edge
    raise UndecidableError(
        "carrier load at the left edge of a windowed configuration is unknown; "
        "pass initial_load explicitly to assert an assumption")


def run_carrier(config: Configuration, i: int, initial_load=_sentinel) -> CarrierTrace:
    """Recurrence form of the carrier: one explicit pass over the window."""
    if not 1 <= i <= config.kappa:
        raise ValueError(f"color must be in 1..{config.kappa}")
    w = _initial_load(config, initial_load)
    loads = np.empty(len(config.cells), dtype=np.int64)
    for k, sym in enumerate(config.cells):
        if sym == i:
            w += 1
        elif sym == 0 and w > 0:
            w -= 1
        loads[k] = w
    loads.setflags(write=False)
    return CarrierTrace(color=i, offset=config.offset, loads=loads)


def carrier_from_heights(path: PathEncoding, i: int) -> CarrierTrace:
    """Carrier recovered from the path: W_n = sup_{m<=n} A_i S_m - A_i S_n.

    Exact match with run_carrier is the lemma this pair of functions tests.
    Only defined where the left-tail supremum is known, i.e. FiniteSupport.
    """
    if path.boundary is not Boundary.FINITE_SUPPORT:
        raise UndecidableError("two-sided carrier needs the left-tail supremum; "
                               "windowed encodings are undecidable")
    heights = path.heights(i)
    # left of the span A_i falls off linearly, so the running sup starts at
    # the first stored value
    runmax = np.maximum.accumulate(heights)
    w_all = runmax - heights
    lo, hi = path.window_lo, path.window_hi
    if hi < lo:
        loads = np.empty(0, dtype=np.int64)
    else:
        first = lo - path.span_lo
        loads = w_all[first:first + (hi - lo + 1)]
    loads = np.ascontiguousarray(loads)
    loads.setflags(write=False)
    return CarrierTrace(color=i, offset=lo, loads=loads)


def apply_Ti_direct(config: Configuration, i: int, initial_load=_sentinel) -> Configuration:
    """Move the color-i balls by simulating the carrier sweep.

    FiniteSupport: the window grows on the right by the terminal load so
    every carried ball lands.  Windowed: requires an explicit initial_load
    assumption; balls carried past the right edge are lost along with the
    rest of the unknown tail, and the window is unchanged.
    """
    if not 1 <= i <= config.kappa:
        raise ValueError(f"color must be in 1..{config.kappa}")
    w = _initial_load(config, initial_load)
    out = []
    for sym in config.cells:
        if sym == i:
            out.append(0)
            w += 1
        elif sym == 0 and w > 0:
            out.append(i)
            w -= 1
        else:
            out.append(sym)
    if config.boundary is Boundary.FINITE_SUPPORT:
        out.extend([i] * w)
    return Configuration(kappa=config.kappa, offset=config.offset, cells=tuple(out),
                         boundary=config.boundary)
