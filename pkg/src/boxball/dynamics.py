"""Box-ball operators realized through Pitman transforms on path encodings.

apply_Ti reflects the color-i height in its running maximum (renormalized at
the origin) and rebuilds the tallies; apply_Ti_inverse mirrors it with the
future maximum.  The carrier sweep in `carrier` computes the same operator a
completely different way, and the exact agreement of the two routes is this
module's central regression test.

All operators here take path encodings.  FiniteSupport inputs are handled
exactly: output windows grow to hold every ball that moves past an edge.
Windowed inputs require an explicit empty-tail assumption (forward: left
tail, inverse: right tail) because the transforms are tail-sensitive;
`tail_independent_mask` reports which output cells provably do not depend on
that assumption.
"""

import numpy as np

from . import pitman as pt
from .carrier import run_carrier
from .errors import DomainError, MalformedPathError
from .lattice import (Boundary, Configuration, PathEncoding, decode, encode,
                      _check_color)


def _rebuild_counts(path: PathEncoding, i: int, new_heights: np.ndarray,
                    span_lo: int, span_hi: int) -> np.ndarray:
    """Counts with color-i height replaced; other tallies untouched.

    new_heights covers [span_lo, span_hi], a range that may extend the
    stored span on either side (extension sites are empty, so non-i tallies
    continue flat and a_0 absorbs the slope).
    """
    old_lo, old_hi = path.span_lo, path.span_hi
    rows = span_hi - span_lo + 1
    counts = np.empty((rows, path.kappa + 1), dtype=np.int64)
    counts[old_lo - span_lo:old_hi - span_lo + 1] = path.counts
    if span_lo < old_lo:
        t = np.arange(old_lo - span_lo, 0, -1)
        counts[:old_lo - span_lo] = path.counts[0]
        counts[:old_lo - span_lo, 0] -= t
    if span_hi > old_hi:
        t = np.arange(1, span_hi - old_hi + 1)
        counts[old_hi - span_lo + 1:] = path.counts[-1]
        counts[old_hi - span_lo + 1:, 0] += t
    total_0i = counts[:, 0] + counts[:, i]
    if ((total_0i ^ new_heights) & 1).any():
        raise MalformedPathError("height parity does not match tallies")
    counts[:, 0] = (total_0i + new_heights) >> 1
    counts[:, i] = (total_0i - new_heights) >> 1
    counts.setflags(write=False)
    return counts


def _heights_as_ints(values: np.ndarray) -> np.ndarray:
    out = np.rint(values).astype(np.int64)
    if np.abs(values - out).max() > 0:
        raise MalformedPathError("transformed heights are not integers")
    return out


def apply_Ti(path: PathEncoding, i: int, assume_empty_left_tail: bool = False) -> PathEncoding:
    """Move the color-i balls, Pitman-transform route.

    The new height is the two-sided reflection
    2 sup_{m<=n} A_i S_m - A_i S_n - 2 sup_{m<=0} A_i S_m, obtained by
    feeding -A_i through the scalar two-sided transform.  Tallies of other
    colors are unchanged.  FiniteSupport windows grow on the right by the
    terminal carrier load; windowed inputs keep their window and need
    assume_empty_left_tail=True.
    """
    _check_color(path.kappa, i)
    finite = path.boundary is Boundary.FINITE_SUPPORT
    if not finite and not assume_empty_left_tail:
        raise DomainError("sup over the left tail of a windowed encoding is unknown; "
                          "pass assume_empty_left_tail=True to assert it is empty")
    heights = path.heights(i)
    # -A_i falls at unit rate into an empty left tail; a flat fictitious
    # right slope keeps the windowed case from extending (in-window values
    # never look right anyway)
    right = -1.0 if finite else 0.0
    pi = pt.ScalarPath(offset=path.span_lo, values=(-heights).astype(float),
                       boundary=pt.FiniteTail(-1.0, right))
    refl = pt.pitman_two_sided(pi)
    new_heights = _heights_as_ints(refl.values)
    counts = _rebuild_counts(path, i, new_heights, refl.n_lo, refl.n_hi)
    if finite and path.window_hi >= path.window_lo:
        runmax = np.maximum.accumulate(heights)
        r = path.window_hi - path.span_lo
        new_hi = path.window_hi + int(runmax[r] - heights[r])
    else:
        new_hi = path.window_hi
    return PathEncoding(kappa=path.kappa, window_lo=path.window_lo, window_hi=new_hi,
                        boundary=path.boundary, counts=counts, span_lo=refl.n_lo)


def apply_Ti_inverse(path: PathEncoding, i: int,
                     assume_empty_right_tail: bool = False) -> PathEncoding:
    """Move the color-i balls backwards: the future-infimum reflection.

    New height is -(A_i S_n - 2 inf_{m>=n} A_i S_m + 2 inf_{m>=0} A_i S_m).
    FiniteSupport windows grow on the left far enough to hold every ball
    that crosses the original edge.
    """
    _check_color(path.kappa, i)
    finite = path.boundary is Boundary.FINITE_SUPPORT
    if not finite and not assume_empty_right_tail:
        raise DomainError("inf over the right tail of a windowed encoding is unknown; "
                          "pass assume_empty_right_tail=True to assert it is empty")
    heights = path.heights(i)
    left = 1.0 if finite else 0.0
    pi = pt.ScalarPath(offset=path.span_lo, values=heights.astype(float),
                       boundary=pt.FiniteTail(left, 1.0))
    refl = pt.pitman_inverse(pi)
    new_heights = _heights_as_ints(-refl.values)
    counts = _rebuild_counts(path, i, new_heights, refl.n_lo, refl.n_hi)
    new_lo = path.window_lo
    if finite:
        # everything left of the window is empty, so balls crossing the edge
        # land contiguously; take the leftmost output i-cell anyway
        ball_sites = np.nonzero(np.diff(counts[:, i]) == 1)[0] + refl.n_lo + 1
        crossed = ball_sites[ball_sites < path.window_lo]
        if crossed.size:
            new_lo = int(crossed.min())
    return PathEncoding(kappa=path.kappa, window_lo=new_lo, window_hi=path.window_hi,
                        boundary=path.boundary, counts=counts, span_lo=refl.n_lo)


def apply_word(path: PathEncoding, word, assume_empty_left_tail: bool = False,
               assume_empty_right_tail: bool = False) -> PathEncoding:
    """Apply a word of signed colors left to right: +i is T_i, -i its inverse.

    The canonical full update for kappa colors is word (+1, ..., +kappa).
    The first failing step is reported with its position.
    """
    out = path
    for pos, signed in enumerate(word):
        if signed == 0 or abs(signed) > path.kappa:
            raise ValueError(f"word step {pos}: invalid signed color {signed}")
        try:
            if signed > 0:
                out = apply_Ti(out, signed, assume_empty_left_tail=assume_empty_left_tail)
            else:
                out = apply_Ti_inverse(
                    out, -signed, assume_empty_right_tail=assume_empty_right_tail)
        except DomainError as exc:
            raise DomainError(f"word step {pos} ({signed:+d}): {exc}") from exc
    return out


def parse_word(text: str):
    """Parse a word such as '+1+2-1' into a tuple of signed colors."""
    out = []
    num = ""
    for ch in text.replace(" ", ""):
        if ch in "+-":
            if num:
                out.append(int(num))
            num = ch
        elif ch.isdigit():
            num += ch
        else:
            raise ValueError(f"bad character {ch!r} in word {text!r}")
    if num in ("", "+", "-"):
        raise ValueError(f"malformed word {text!r}")
    out.append(int(num))
    return tuple(out)


def evolve_config(config: Configuration, word, steps: int = 1, **assumptions):
    """Repeatedly apply a word to a configuration; yields each intermediate."""
    path = encode(config)
    for _ in range(steps):
        path = apply_word(path, word, **assumptions)
        yield decode(path)


def supremum_left_of_origin(path: PathEncoding, i: int) -> int:
    """M_0^(i) = sup_{n<=0} A_i S_n, exact for FiniteSupport."""
    if path.boundary is not Boundary.FINITE_SUPPORT:
        raise DomainError("M_0 needs left-tail information")
    heights = path.heights(i)
    return int(heights[:-path.span_lo + 1].max())


def cross_height_check(path: PathEncoding, i: int, j: int) -> int:
    """Max deviation of A_j T_i S from its two closed forms (0 when both hold).

    Form 1: A_j S_n + W_n^(i) - M_0^(i), with the two-sided carrier
    W_n^(i) = sup_{m<=n} A_i S_m - A_i S_n.
    Form 2: A_j S_n + (A_i T_i S_n - A_i S_n) / 2.
    """
    _check_color(path.kappa, j)
    if i == j:
        raise ValueError("cross-height identities need distinct colors")
    out = apply_Ti(path, i)
    lo, hi = out.span_lo, out.span_hi
    a_j_t = out.heights(j)
    a_i_t = out.heights(i)
    # input heights materialized over the (possibly grown) output span
    a_j = _materialized_heights(path, j, lo, hi)
    a_i = _materialized_heights(path, i, lo, hi)
    runmax = np.maximum.accumulate(a_i)
    w = runmax - a_i
    m0 = runmax[-lo]
    dev1 = np.abs(a_j_t - (a_j + w - m0)).max()
    dev2 = np.abs(2 * a_j_t - (2 * a_j + (a_i_t - a_i))).max()
    return int(max(dev1, dev2))


def _materialized_heights(path: PathEncoding, i: int, lo: int, hi: int) -> np.ndarray:
    heights = path.heights(i)
    out = np.empty(hi - lo + 1, dtype=np.int64)
    s_lo, s_hi = path.span_lo, path.span_hi
    out[s_lo - lo:s_hi - lo + 1] = heights
    if lo < s_lo:
        out[:s_lo - lo] = heights[0] - np.arange(s_lo - lo, 0, -1)
    if hi > s_hi:
        out[s_hi - lo + 1:] = heights[-1] + np.arange(1, hi - s_hi + 1)
    return out


def tail_independent_mask(config: Configuration, i: int) -> np.ndarray:
    """Which T_i output cells are provably independent of the unseen left tail.

    A drop decision at an empty site flips if enough color-i balls hide just
    left of the window, so the only provably stable cells are non-empty
    sites and empty sites where even the empty-start carrier is loaded.
    FiniteSupport configurations have no unseen tail: everything is stable.
    """
    if config.boundary is Boundary.FINITE_SUPPORT or not config.cells:
        return np.ones(len(config.cells), dtype=bool)
    trace = run_carrier(config, i, initial_load=0)
    cells = np.asarray(config.cells)
    prev = np.concatenate([[0], trace.loads[:-1]])
    return (cells != 0) | (prev > 0)


def one_color_projection(config: Configuration, i: int) -> Configuration:
    """The {0, i}-subsequence of a configuration as a 1-color system.

    Sites holding other colors are skipped; color i maps to 1.  Order is
    preserved; the anchor is immaterial for cell-level comparisons.
    """
    _check_color(config.kappa, i)
    sub = tuple(1 if c == i else 0 for c in config.cells if c in (0, i))
    return Configuration(kappa=1, offset=1, cells=sub, boundary=config.boundary)


def frozen_color_sites(config: Configuration, i: int):
    """(site, symbol) pairs for cells whose color is outside {0, i}."""
    return tuple((config.offset + k, c) for k, c in enumerate(config.cells)
                 if c not in (0, i))
