"""Finite-window classifiers for reversibility and invariance sets.

True membership in the reversibility/invariance sets depends on tail
behavior, so for windowed data these classifiers return three-valued
answers, and the asymptotic conditions are reported as finite-window
proxies with their horizon and tolerance parameters embedded in the report.
FiniteSupport paths are fully decidable: their height tails are linear.

Also ships the three counterexample configuration families used to separate
the invariant set from its naive candidates.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .decision import Decision
from .lattice import Boundary, Configuration, PathEncoding, _check_color


@dataclass(frozen=True)
class ClassReport:
    """Reversibility diagnostics for one color."""

    color: int
    m0: float                 # sup_{n<=0} A_i S_n (observed window value if inexact)
    i0: float                 # inf_{n>=0} A_i S_n
    m_inf: float              # sup over Z
    i_minus_inf: float        # inf over Z
    exact: bool               # True when tails are known (FiniteSupport)
    forward_then_back: Decision   # membership in the T_i^-1 T_i = id set
    back_then_forward: Decision   # membership in the T_i T_i^-1 = id set
    reversible: Decision
    ratio_indices: np.ndarray = field(repr=False)
    ratio_values: np.ndarray = field(repr=False)


def reversibility_report(path: PathEncoding, i: int) -> ClassReport:
    """Window extrema of A_i plus reversibility flags.

    FiniteSupport always decides: the left height tail falls and the right
    one rises, which forces both infinitely-often re-attainment conditions
    and finite one-sided extrema.  Windowed paths report observed extrema
    and undecidable flags.
    """
    _check_color(path.kappa, i)
    heights = path.heights(i)
    anchor = -path.span_lo
    finite = path.boundary is Boundary.FINITE_SUPPORT
    m0_window = float(heights[:anchor + 1].max())
    i0_window = float(heights[anchor:].min())
    idx, ratios = subcriticality_ratio(path, i)
    if finite:
        flags = (Decision.YES, Decision.YES, Decision.YES)
        return ClassReport(color=i, m0=m0_window, i0=i0_window,
                           m_inf=math.inf, i_minus_inf=-math.inf, exact=True,
                           forward_then_back=flags[0], back_then_forward=flags[1],
                           reversible=flags[2], ratio_indices=idx, ratio_values=ratios)
    return ClassReport(color=i, m0=m0_window, i0=i0_window,
                       m_inf=float(heights.max()), i_minus_inf=float(heights.min()),
                       exact=False, forward_then_back=Decision.UNDECIDABLE,
                       back_then_forward=Decision.UNDECIDABLE,
                       reversible=Decision.UNDECIDABLE,
                       ratio_indices=idx, ratio_values=ratios)


def subcriticality_ratio(path: PathEncoding, i: int, horizon=None):
    """The diagnostic trace A_i S_n / sup_{m<=n} A_i S_m.

    Returns (indices, ratios); entries where the running sup is 0 are NaN
    (skip-and-mark).  The running sup starts at the window edge, which is
    exact for FiniteSupport and a proxy for windowed data.  horizon is an
    optional (lo, hi) index range to restrict the emitted trace.
    """
    _check_color(path.kappa, i)
    heights = path.heights(i)
    runmax = np.maximum.accumulate(heights)
    indices = np.arange(path.span_lo, path.span_hi + 1)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratios = np.where(runmax != 0, heights / np.where(runmax == 0, 1, runmax), np.nan)
    if horizon is not None:
        lo, hi = horizon
        keep = (indices >= lo) & (indices <= hi)
        return indices[keep], ratios[keep]
    return indices, ratios


@dataclass(frozen=True)
class GoodSetReport:
    """Finite-window proxy for membership in the all-words-reversible set.

    positive/negative direction flags per color check that the height
    tracks its running sup within ratio_tol over the outer quarter of the
    window; pairwise_bound_ok checks |A_j / A_i| stays under pair_bound
    there.  All parameters are embedded for reproducibility.
    """

    kappa: int
    ratio_tol: float
    pair_bound: float
    horizon: tuple
    positive: dict
    negative: dict
    pairwise_max: dict
    pairwise_bound_ok: bool

    @property
    def all_good(self) -> bool:
        return (all(self.positive.values()) and all(self.negative.values())
                and self.pairwise_bound_ok)


def good_set_check(path: PathEncoding, horizon=None, ratio_tol: float = 0.1,
                   pair_bound: float = 10.0) -> GoodSetReport:
    """Check the comparable-growth conditions over the window edges.

    Uses A_i itself as the growth estimate F_i.  The positive-direction
    proxy tests the ratio to the running sup over the final quarter of the
    horizon, the negative one mirrors it over the first quarter, and the
    pairwise proxy bounds |A_j/A_i| on both quarters.
    """
    lo, hi = horizon if horizon is not None else (path.span_lo, path.span_hi)
    indices = np.arange(path.span_lo, path.span_hi + 1)
    keep = (indices >= lo) & (indices <= hi)
    quarter = max(1, int(np.count_nonzero(keep) // 4))
    positive, negative = {}, {}
    tails = {}
    for i in range(1, path.kappa + 1):
        heights = path.heights(i)[keep].astype(float)
        runmax = np.maximum.accumulate(heights)
        futmin = np.minimum.accumulate(heights[::-1])[::-1]
        pos = heights[-quarter:]
        posmax = runmax[-quarter:]
        usable = posmax > 0
        # entries where the running sup is still nonpositive carry no ratio
        # information and are skipped; an all-skipped quarter passes vacuously
        ok_pos = bool((np.abs(pos[usable] / posmax[usable] - 1.0) <= ratio_tol).all()) \
            if usable.any() else True
        # mirrored proxy toward -infinity: the height must track its
        # future min (both go to -infinity together on good paths)
        neg = heights[:quarter]
        negmin = futmin[:quarter]
        usable = negmin < 0
        ok_neg = bool((np.abs(neg[usable] / negmin[usable] - 1.0) <= ratio_tol).all()) \
            if usable.any() else True
        positive[i] = ok_pos
        negative[i] = ok_neg
        tails[i] = (neg, pos)
    pairwise = {}
    ok_pairs = True
    for i in range(1, path.kappa + 1):
        for j in range(1, path.kappa + 1):
            if i == j:
                continue
            # same vacuous-pass convention as the per-color flags: quarters
            # where the denominator height is still 0 carry no evidence
            worst = 0.0
            for side in (0, 1):
                num, den = tails[j][side], tails[i][side]
                nz = np.abs(den) > 0
                if nz.any():
                    worst = max(worst, float(np.abs(num[nz] / den[nz]).max()))
            pairwise[(i, j)] = worst
            ok_pairs = ok_pairs and worst <= pair_bound
    return GoodSetReport(kappa=path.kappa, ratio_tol=ratio_tol, pair_bound=pair_bound,
                         horizon=(int(lo), int(hi)), positive=positive, negative=negative,
                         pairwise_max=pairwise, pairwise_bound_ok=ok_pairs)


def _block_a(m: int) -> list:
    """Epoch m of family (a): 0, (2m-1) twos, (2m-1) alternating 01 pairs,
    0, then 2m alternating 01 pairs."""
    return [0] + [2] * (2 * m - 1) + [0, 1] * (2 * m - 1) + [0] + [0, 1] * (2 * m)


def example_config(name: str, epochs: int) -> Configuration:
    """The three two-color counterexample families.

    (a) FiniteSupport: epoch blocks whose color-2 carrier grows without
        bound, site 0 empty, blocks filling sites 1 onward.
    (b) Windowed: repeating 012 with one central 021 defect.
    (c) Windowed: pure repeating 012.
    """
    if epochs < 1:
        raise ValueError("epochs must be >= 1")
    if name == "a":
        cells = [0]
        for m in range(1, epochs + 1):
            cells.extend(_block_a(m))
        return Configuration(kappa=2, offset=0, cells=tuple(cells),
                             boundary=Boundary.FINITE_SUPPORT)
    if name == "b":
        cells = [0, 1, 2] * epochs + [0, 2, 1] + [0, 1, 2] * epochs
        return Configuration(kappa=2, offset=1 - 3 * epochs, cells=tuple(cells),
                             boundary=Boundary.WINDOWED)
    if name == "c":
        cells = [0, 1, 2] * (2 * epochs + 1)
        return Configuration(kappa=2, offset=1 - 3 * epochs, cells=tuple(cells),
                             boundary=Boundary.WINDOWED)
    raise ValueError(f"unknown example family {name!r}; expected a, b or c")


def example_a_epoch_ends(epochs: int) -> np.ndarray:
    """Site index of the last cell of each epoch block of family (a)."""
    m = np.arange(1, epochs + 1)
    return 5 * m * m + 4 * m
