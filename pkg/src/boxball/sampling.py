"""Random initial configurations and distributional-invariance statistics.

Single-color dynamics preserve the law of an i.i.d. configuration whenever
every ball color is strictly rarer than empty sites.  This module samples
such configurations reproducibly, applies the dynamics on a window with
boundary margins, and runs chi-square tests of the pattern frequencies of
the evolved configuration against the i.i.d. product law.

RNG policy: one pinned algorithm (Philox, counter-based) built from 64-bit
seeds through SeedSequence; per-trial streams are spawned, never reused.
Every report embeds the seed and the algorithm name.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy import stats as _stats

from .dynamics import apply_Ti
from .errors import DomainError
from .lattice import Boundary, Configuration, encode, decode

RNG_ALGORITHM = "philox"


def rng_from_seed(seed) -> np.random.Generator:
    """The package-wide generator factory; the single place the RNG is chosen."""
    if not isinstance(seed, np.random.SeedSequence):
        seed = np.random.SeedSequence(int(seed))
    return np.random.Generator(np.random.Philox(seed))


def spawn_seeds(seed: int, n: int):
    """Independent child seeds for parallel/sequential trials."""
    return np.random.SeedSequence(int(seed)).spawn(n)


@dataclass(frozen=True)
class ColorLaw:
    """Symbol distribution (p_0, ..., p_kappa) of one site."""

    kappa: int
    probs: tuple

    def __post_init__(self):
        probs = tuple(float(p) for p in self.probs)
        object.__setattr__(self, "probs", probs)
        if len(probs) != self.kappa + 1:
            raise ValueError("need kappa+1 probabilities")
        if min(probs) < 0:
            raise ValueError("probabilities must be nonnegative")
        if abs(sum(probs) - 1.0) > 1e-12:
            raise ValueError("probabilities must sum to 1")

    @property
    def admissible(self) -> bool:
        """True when every ball color is strictly rarer than empty sites."""
        return all(p < self.probs[0] for p in self.probs[1:])

    def require_admissible(self):
        if not self.admissible:
            raise DomainError(f"inadmissible law {self.probs}: "
                              "need p_i < p_0 for every color i")


def sample_iid(law: ColorLaw, window, seed) -> Configuration:
    """I.i.d. windowed configuration on sites window = (n_min, n_max)."""
    n_min, n_max = int(window[0]), int(window[1])
    if n_max < n_min:
        raise ValueError("empty sampling window")
    rng = rng_from_seed(seed)
    cells = rng.choice(law.kappa + 1, size=n_max - n_min + 1, p=np.asarray(law.probs))
    return Configuration(kappa=law.kappa, offset=n_min,
                         cells=tuple(int(c) for c in cells), boundary=Boundary.WINDOWED)


def near_critical_law(kappa: int, c, n: int) -> ColorLaw:
    """The law p_i = 1/(kappa+1) + c_i / sqrt(n kappa).

    c must sum to zero with c_0 strictly dominating, and n must be large
    enough that every probability lands in (0, 1).
    """
    c = np.asarray(c, dtype=float)
    if c.shape != (kappa + 1,):
        raise ValueError("need kappa+1 drift coefficients")
    if abs(c.sum()) > 1e-12:
        raise ValueError("drift coefficients must sum to 0")
    if not (c[0] > c[1:]).all():
        raise DomainError("need c_0 > c_i for every color i")
    probs = 1.0 / (kappa + 1) + c / np.sqrt(n * kappa)
    if not ((probs > 0).all() and (probs < 1).all()):
        raise ValueError(f"n={n} too small: probabilities {probs} leave (0, 1)")
    return ColorLaw(kappa=kappa, probs=tuple(probs))


def sample_near_critical(kappa: int, c, n: int, window, seed) -> Configuration:
    return sample_iid(near_critical_law(kappa, c, n), window, seed)


@dataclass(frozen=True)
class DensityReport:
    law: ColorLaw
    site_count: int
    ratios: dict      # color -> (ratio at right edge, ratio at left edge)
    z_scores: dict    # color -> (z right, z left)


def density_check(config: Configuration, law: ColorLaw) -> DensityReport:
    """Ratios A_i S_n / ((p_0 - p_i) n) at the window edges, with z-scores.

    Diagnostic only, no pass/fail: the z-score normalizes the height
    fluctuation by its i.i.d. standard deviation.
    """
    law.require_admissible()
    if len(config.cells) < 1000:
        raise ValueError("density diagnostics need at least 1000 sites")
    path = encode(config)
    ratios, zs = {}, {}
    for i in range(1, config.kappa + 1):
        drift = law.probs[0] - law.probs[i]
        var_step = law.probs[0] + law.probs[i] - drift ** 2
        heights = path.heights(i)
        out_r, out_z = [], []
        for n in (path.span_hi, path.span_lo):
            if n == 0:
                out_r.append(np.nan)
                out_z.append(np.nan)
                continue
            a = float(heights[n - path.span_lo])
            out_r.append(a / (drift * n))
            sd = np.sqrt(abs(n) * var_step)
            out_z.append((a - drift * n) / sd if sd > 0 else np.nan)
        ratios[i] = tuple(out_r)
        zs[i] = tuple(out_z)
    return DensityReport(law=law, site_count=len(config.cells), ratios=ratios, z_scores=zs)


def pattern_counts(cells, kappa: int, w: int) -> np.ndarray:
    """Frequencies of the (kappa+1)^w patterns over non-overlapping w-blocks.

    Non-overlapping blocks keep the counts multinomial, which the chi-square
    test needs; overlapping windows would correlate the table entries.
    """
    cells = np.asarray(cells, dtype=np.int64)
    nblocks = cells.size // w
    blocks = cells[:nblocks * w].reshape(nblocks, w)
    powers = (kappa + 1) ** np.arange(w - 1, -1, -1)
    codes = blocks @ powers
    return np.bincount(codes, minlength=(kappa + 1) ** w)


def product_law_pattern_probs(law: ColorLaw, w: int) -> np.ndarray:
    """I.i.d. product probabilities for each w-pattern, in code order."""
    p = np.asarray(law.probs)
    out = np.array([1.0])
    for _ in range(w):
        out = np.kron(out, p)
    return out


def chi_square_gof(counts: np.ndarray, probs: np.ndarray, min_expected: float = 5.0):
    """Raw (Yates-free) chi-square of counts against given cell probabilities.

    Cells with expected count below min_expected are pooled into one bucket.
    Returns (statistic, dof, p_value).
    """
    total = counts.sum()
    expected = probs * total
    small = expected < min_expected
    obs = counts[~small].astype(float)
    exp = expected[~small]
    if small.any():
        obs = np.append(obs, counts[small].sum())
        exp = np.append(exp, expected[small].sum())
    keep = exp > 0
    obs, exp = obs[keep], exp[keep]
    stat = float(((obs - exp) ** 2 / exp).sum())
    dof = obs.size - 1
    p = float(_stats.chi2.sf(stat, dof)) if dof >= 1 else 1.0
    return stat, dof, p


@dataclass(frozen=True)
class TrialResult:
    trial: int
    statistic: float
    dof: int
    p_value: float
    passed: bool
    boundary_contaminated: bool
    counts: tuple = ()


@dataclass(frozen=True)
class InvarianceReport:
    law: ColorLaw
    null_law: ColorLaw
    color: int
    sites: int
    word_length: int
    seed: int
    rng: str
    p_threshold: float
    required_passes: int
    trials: tuple = field(repr=False)
    n_pass: int = 0
    n_excluded: int = 0
    passed: bool = False


def _carrier_zero_in_margins(path, i: int, margin: int) -> bool:
    """Did the (assumed-empty-start) carrier empty out in both edge margins?

    The carrier renews wherever its load hits zero; a renewal inside each
    margin is the per-sample evidence that edge effects cannot reach the
    analysis window.
    """
    heights = path.heights(i)
    w = np.maximum.accumulate(heights) - heights
    left = w[1:margin + 1]
    right = w[-margin:]
    return bool((left == 0).any() and (right == 0).any())


def invariance_test(law: ColorLaw, i: int, sites: int, word_length: int,
                    trials: int, seed: int, p_threshold: float = 0.001,
                    required_passes=None, null_law=None,
                    workers: int = 1) -> InvarianceReport:
    """Chi-square test that the evolved configuration keeps the product law.

    Each trial samples i.i.d. cells on [-N, N], applies the color-i operator
    treating the window edge as carrier-empty, and tests the pattern
    frequencies of the interior [-N/2, N/2] against null_law (defaults to
    the sampling law; pass a different law for negative controls).  Trials
    whose carrier never renews inside a margin are excluded and counted.

    Trials run on their own spawned seed streams, so results do not depend
    on workers.
    """
    law.require_admissible()
    if word_length < 1 or word_length > 4:
        raise ValueError("pattern length must be 1..4")
    if null_law is None:
        null_law = law
    if required_passes is None:
        required_passes = max(1, int(np.ceil(0.9 * trials)))
    half = sites // 2
    probs = product_law_pattern_probs(null_law, word_length)

    def one_trial(arg):
        t, child = arg
        config = sample_iid(law, (-sites, sites), child)
        path = encode(config)
        contaminated = not _carrier_zero_in_margins(path, i, sites - half)
        out = decode(apply_Ti(path, i, assume_empty_left_tail=True))
        interior = out.cells_range(-half, half)
        counts = pattern_counts(interior, law.kappa, word_length)
        stat, dof, p = chi_square_gof(counts, probs)
        return TrialResult(trial=t, statistic=stat, dof=dof, p_value=p,
                           passed=p > p_threshold, boundary_contaminated=contaminated,
                           counts=tuple(int(c) for c in counts))

    jobs = list(enumerate(spawn_seeds(seed, trials)))
    if workers > 1:
        from concurrent.futures import ThreadPoolExecutor
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(one_trial, jobs))
    else:
        results = [one_trial(j) for j in jobs]
    n_excluded = sum(1 for r in results if r.boundary_contaminated)
    n_pass = sum(1 for r in results if r.passed and not r.boundary_contaminated)
    usable = trials - n_excluded
    passed = usable > 0 and n_pass >= min(required_passes, usable)
    return InvarianceReport(law=law, null_law=null_law, color=i, sites=sites,
                            word_length=word_length, seed=seed, rng=RNG_ALGORITHM,
                            p_threshold=p_threshold, required_passes=required_passes,
                            trials=tuple(results), n_pass=n_pass,
                            n_excluded=n_excluded, passed=passed)
