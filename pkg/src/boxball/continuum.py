"""The generalized dynamics on continuous paths in R^kappa.

Paths are piecewise-linear on a uniform grid over [-L, L] that contains 0
exactly (nodes are integer multiples of the step h, so the anchor never
drifts).  Because the paths are piecewise linear, every supremum or infimum
over a continuous range is attained at a grid node, and the continuum
operators reduce to exact node arithmetic.

Ships the drifted two-sided Brownian sampler, the rescaled near-critical
random walk, the truncated operator used to control the unbounded running
sup, and the two-sample machinery for the distributional-invariance check.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import stats as _stats

from .errors import DomainError
from .sampling import rng_from_seed, spawn_seeds, near_critical_law, RNG_ALGORITHM
from .simplex import SimplexBasis, build_simplex_basis


@dataclass(frozen=True, eq=False)
class SampledPath:
    """Piecewise-linear path on the uniform grid {k h : k_lo <= k <= k_hi}."""

    kappa: int
    h: float
    k_lo: int
    values: np.ndarray  # (nodes, kappa)

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", v)
        if v.ndim != 2 or v.shape[1] != self.kappa:
            raise ValueError("values must be (nodes, kappa)")
        if self.h <= 0:
            raise ValueError("grid step must be positive")
        if not (self.k_lo <= 0 <= self.k_hi):
            raise ValueError("grid must contain 0")
        if np.abs(v[-self.k_lo]).max() > 1e-12:
            raise ValueError("path must vanish at x = 0")

    @property
    def k_hi(self) -> int:
        return self.k_lo + self.values.shape[0] - 1

    @property
    def x_lo(self) -> float:
        return self.k_lo * self.h

    @property
    def x_hi(self) -> float:
        return self.k_hi * self.h

    @property
    def grid(self) -> np.ndarray:
        return np.arange(self.k_lo, self.k_hi + 1) * self.h

    def node_of(self, x: float) -> float:
        """Fractional node coordinate of x (for interpolation)."""
        k = x / self.h
        if not (self.k_lo - 1e-9 <= k <= self.k_hi + 1e-9):
            raise DomainError(f"x={x} outside the sampled span")
        return min(max(k, self.k_lo), self.k_hi)

    def value_at(self, x: float) -> np.ndarray:
        k = self.node_of(x)
        base = int(math.floor(k))
        frac = k - base
        lo = self.values[base - self.k_lo]
        if frac == 0.0 or base == self.k_hi:
            return lo.copy()
        hi = self.values[base + 1 - self.k_lo]
        return lo + frac * (hi - lo)


def path_on_span(kappa: int, L: float, h: float) -> tuple:
    """(k_half, h) for a grid over [-L, L]; L must be a node."""
    k = round(L / h)
    if abs(k * h - L) > 1e-9 or k < 1:
        raise ValueError(f"span {L} is not a multiple of the grid step {h}")
    return k, h


def a_heights_nodes(path: SampledPath, basis: SimplexBasis, i: int) -> np.ndarray:
    """A_i at every node: -2 (e_i - e_0) . S / |e_i - e_0|^2."""
    d = basis.step_difference(i)
    return -2.0 * (path.values @ d) / float(d @ d)


def a_height_continuum(path: SampledPath, basis: SimplexBasis, i: int, x: float) -> float:
    """A_i at an arbitrary x in the span (linear interpolation between nodes)."""
    d = basis.step_difference(i)
    s = path.value_at(x)
    return -2.0 * float(s @ d) / float(d @ d)


def tau_continuum(path: SampledPath, basis: SimplexBasis, i: int) -> SampledPath:
    """Sign flip of the (e_i - e_0) projection: S + A_i S (e_i - e_0)."""
    heights = a_heights_nodes(path, basis, i)
    d = basis.step_difference(i)
    return SampledPath(kappa=path.kappa, h=path.h, k_lo=path.k_lo,
                       values=path.values + heights[:, None] * d)


def pitman_continuum(path: SampledPath, alpha, direction: str = "forward") -> SampledPath:
    """Two-sided transform (or its inverse) along alpha, node-exact.

    Running infima are over grid nodes from the window edge; relating the
    window-truncated answer to the genuine two-sided one is the caller's
    concern (see apply_Ti_truncated).
    """
    alpha = np.asarray(alpha, dtype=float)
    norm2 = float(alpha @ alpha)
    if norm2 <= 0:
        raise ValueError("alpha must be nonzero")
    coeff = path.values @ alpha / norm2
    anchor = -path.k_lo
    if direction == "forward":
        run = np.minimum.accumulate(coeff)
        delta = -2.0 * run + 2.0 * run[anchor]
    elif direction == "inverse":
        fut = np.minimum.accumulate(coeff[::-1])[::-1]
        delta = -2.0 * fut + 2.0 * fut[anchor]
    else:
        raise ValueError("direction must be 'forward' or 'inverse'")
    return SampledPath(kappa=path.kappa, h=path.h, k_lo=path.k_lo,
                       values=path.values + delta[:, None] * alpha)


def apply_Ti_continuum(path: SampledPath, basis: SimplexBasis, i: int) -> SampledPath:
    """T_i S_x = S_x + (A_i S_x - sup_{y<=x} A_i S_y + sup_{y<=0} A_i S_y)(e_i - e_0)."""
    heights = a_heights_nodes(path, basis, i)
    runmax = np.maximum.accumulate(heights)
    gap = heights - runmax + runmax[-path.k_lo]
    d = basis.step_difference(i)
    return SampledPath(kappa=path.kappa, h=path.h, k_lo=path.k_lo,
                       values=path.values + gap[:, None] * d)


def apply_Ti_truncated(path: SampledPath, basis: SimplexBasis, i: int,
                       Lprime: float) -> SampledPath:
    """The truncated operator: running sup restarted at -L'.

    M_x is A_i S_{-L'} left of -L', the running sup over [-L', x] inside
    [-L', L'], and the full sup over [-L', L'] to the right.  Coincides with
    apply_Ti_continuum whenever sup_{y<=-L'} A_i S_y <= A_i S_{-L}.
    """
    kp = round(Lprime / path.h)
    if abs(kp * path.h - Lprime) > 1e-9:
        raise ValueError("L' must lie on the grid")
    if kp > min(-path.k_lo, path.k_hi):
        raise ValueError("L' exceeds the sampled span")
    heights = a_heights_nodes(path, basis, i)
    lo_row, hi_row = -kp - path.k_lo, kp - path.k_lo
    m = np.empty_like(heights)
    m[:lo_row + 1] = heights[lo_row]
    m[lo_row:hi_row + 1] = np.maximum.accumulate(heights[lo_row:hi_row + 1])
    m[hi_row:] = m[hi_row]
    gap = heights - m + m[-path.k_lo]
    d = basis.step_difference(i)
    return SampledPath(kappa=path.kappa, h=path.h, k_lo=path.k_lo,
                       values=path.values + gap[:, None] * d)


def truncation_agreement(path: SampledPath, basis: SimplexBasis, i: int,
                         Lprime: float, analysis_L: float) -> bool:
    """Window evidence for T^{L'} = T_i on [-analysis_L, analysis_L].

    True when the observed sup of A_i over [x_lo, -L'] stays at or below
    A_i(-analysis_L); samples failing this are contaminated by truncation.
    """
    heights = a_heights_nodes(path, basis, i)
    kp = round(Lprime / path.h)
    ka = round(analysis_L / path.h)
    tail_max = heights[:(-kp - path.k_lo) + 1].max()
    return bool(tail_max <= heights[-ka - path.k_lo])


def scale_path(path: SampledPath, a: float, b: float) -> SampledPath:
    """The scaled path x -> a S(b x), sampled on the matching grid h/b."""
    if a <= 0 or b <= 0:
        raise ValueError("scale factors must be positive")
    return SampledPath(kappa=path.kappa, h=path.h / b, k_lo=path.k_lo,
                       values=a * path.values)


def scaling_equivariance_check(path: SampledPath, basis: SimplexBasis, i: int,
                               a: float, b: float) -> float:
    """Max node deviation of T_i(a S_{b.}) from a (T_i S)_{b.} (0 expected)."""
    left = apply_Ti_continuum(scale_path(path, a, b), basis, i)
    right = scale_path(apply_Ti_continuum(path, basis, i), a, b)
    return float(np.abs(left.values - right.values).max())


@dataclass(frozen=True)
class DriftSpec:
    """Drift D = sum_j c_j e_j with zero-sum coefficients."""

    kappa: int
    c: tuple

    def __post_init__(self):
        c = tuple(float(x) for x in self.c)
        object.__setattr__(self, "c", c)
        if len(c) != self.kappa + 1:
            raise ValueError("need kappa+1 drift coefficients")
        if abs(sum(c)) > 1e-12:
            raise ValueError("drift coefficients must sum to 0")

    @property
    def admissible(self) -> bool:
        return all(self.c[0] > ci for ci in self.c[1:])

    def drift_vector(self, basis: SimplexBasis = None) -> np.ndarray:
        basis = basis if basis is not None else build_simplex_basis(self.kappa)
        return np.asarray(self.c) @ basis.vectors

    def scaled(self, factor: float) -> "DriftSpec":
        return DriftSpec(kappa=self.kappa, c=tuple(factor * x for x in self.c))


def drift_admissible(spec: DriftSpec) -> bool:
    """c_0 > c_i for every color, cross-checked against (e_i - e_0) . D < 0.

    The two forms are equivalent through
    (e_i - e_0) . D = (c_i - c_0) |e_i - e_0|^2 / 2; the geometric form is
    evaluated numerically and any disagreement raises.
    """
    basis = build_simplex_basis(spec.kappa)
    d_vec = spec.drift_vector(basis)
    coeff_form = spec.admissible
    geom = []
    for i in range(1, spec.kappa + 1):
        diff = basis.step_difference(i)
        geom.append(float(diff @ d_vec) < -1e-12 * max(1.0, np.abs(spec.c).max()))
    geom_form = all(geom)
    if coeff_form != geom_form:
        raise AssertionError("coefficient and geometric admissibility disagree; "
                             "numerical breakdown in the basis")
    return coeff_form


def sample_brownian_with_drift(spec: DriftSpec, L: float, h: float, seed) -> SampledPath:
    """Two-sided standard Brownian motion with drift D, sampled on [-L, L].

    Right of 0: S_x = B^1_x + x D; left of 0: S_{-x} = -(B^2_x + x D) with
    B^1, B^2 independent.  Per-node Gaussian increments have variance h per
    component.
    """
    if not drift_admissible(spec):
        raise DomainError(f"inadmissible drift coefficients {spec.c}")
    k, h = path_on_span(spec.kappa, L, h)
    basis = build_simplex_basis(spec.kappa)
    d_vec = spec.drift_vector(basis)
    rng = rng_from_seed(seed)
    right = rng.normal(0.0, math.sqrt(h), size=(k, spec.kappa)).cumsum(axis=0)
    right += np.arange(1, k + 1)[:, None] * h * d_vec
    left = rng.normal(0.0, math.sqrt(h), size=(k, spec.kappa)).cumsum(axis=0)
    left += np.arange(1, k + 1)[:, None] * h * d_vec
    values = np.concatenate([-left[::-1], np.zeros((1, spec.kappa)), right])
    return SampledPath(kappa=spec.kappa, h=h, k_lo=-k, values=values)


def donsker_rescale(kappa: int, c, n: int, L: float, seed) -> SampledPath:
    """The rescaled near-critical walk sqrt(kappa/n) Y_{n x} on [-L, L].

    Steps follow the law 1/(kappa+1) + c_i/sqrt(n kappa); the grid step is
    1/n so walk increments sit exactly on nodes.
    """
    law = near_critical_law(kappa, c, n)
    basis = build_simplex_basis(kappa)
    k = int(round(L * n))
    if k < 1:
        raise ValueError("span too small for this n")
    rng = rng_from_seed(seed)
    scale = math.sqrt(kappa) / math.sqrt(n)
    probs = np.asarray(law.probs)
    right = rng.choice(kappa + 1, size=k, p=probs)
    left = rng.choice(kappa + 1, size=k, p=probs)
    right_vals = basis.vectors[right].cumsum(axis=0) * scale
    left_vals = basis.vectors[left].cumsum(axis=0) * scale
    values = np.concatenate([-left_vals[::-1], np.zeros((1, kappa)), right_vals])
    return SampledPath(kappa=kappa, h=1.0 / n, k_lo=-k, values=values)


def donsker_unit_marginals(kappa: int, c, n: int, samples: int, seed) -> np.ndarray:
    """X^{(n)} at x = 1 for many independent walks, via multinomial counts.

    Returns (samples, kappa); each row is sqrt(kappa/n) times the sum of n
    near-critical steps.
    """
    law = near_critical_law(kappa, c, n)
    basis = build_simplex_basis(kappa)
    rng = rng_from_seed(seed)
    counts = rng.multinomial(n, np.asarray(law.probs), size=samples)
    return math.sqrt(kappa) / math.sqrt(n) * (counts @ basis.vectors)


def path_to_csv(path: SampledPath) -> str:
    """CSV dump (x, S1..Skappa) for plotting."""
    header = "x," + ",".join(f"S{j + 1}" for j in range(path.kappa))
    lines = [header]
    grid = path.grid
    for k in range(path.values.shape[0]):
        row = ",".join(repr(float(v)) for v in path.values[k])
        lines.append(f"{float(grid[k])!r},{row}")
    return "\n".join(lines) + "\n"


def ks_distance_to_normal(sample: np.ndarray, mean: float, std: float) -> float:
    """One-sample Kolmogorov-Smirnov distance to Normal(mean, std^2)."""
    x = np.sort(np.asarray(sample, dtype=float))
    cdf = _stats.norm.cdf(x, loc=mean, scale=std)
    n = x.size
    upper = np.abs(np.arange(1, n + 1) / n - cdf).max()
    lower = np.abs(cdf - np.arange(0, n) / n).max()
    return float(max(upper, lower))


def ks_two_sample(a: np.ndarray, b: np.ndarray) -> float:
    return float(_stats.ks_2samp(a, b).statistic)


@dataclass(frozen=True)
class BMInvarianceReport:
    spec: DriftSpec
    reference: DriftSpec
    L: float
    h: float
    Lprime: float
    seeds: int
    seed: int
    rng: str
    threshold: float
    x_points: tuple
    distances: dict = field(repr=False)  # (color, functional label) -> KS distance
    excluded: dict = field(default_factory=dict)  # color -> contaminated T-samples
    passed: bool = False

    @property
    def max_distance(self) -> float:
        return max(self.distances.values())


def _unit_increment_functionals(path: SampledPath, basis: SimplexBasis,
                                color: int, x_points) -> dict:
    steps_per_unit = round(1.0 / path.h)
    anchor = -path.k_lo
    out = {}
    for x in x_points:
        lo = anchor + x * steps_per_unit
        hi = lo + steps_per_unit
        inc = path.values[hi] - path.values[lo]
        for j in range(path.kappa):
            out[f"S{j + 1}[{x},{x + 1}]"] = float(inc[j])
        d = basis.step_difference(color)
        out[f"A{color}[{x},{x + 1}]"] = float(-2.0 * (inc @ d) / (d @ d))
    return out


def bm_invariance_test(spec: DriftSpec, L: float, h: float, Lprime: float,
                       seeds: int, seed: int = 20240, threshold: float = 0.035,
                       x_points=(0, 1, 2), reference: DriftSpec = None,
                       colors=None, workers: int = 1) -> BMInvarianceReport:
    """Two-sample KS comparison of S and the truncated T_i S.

    Draws two independent pools of drifted Brownian paths per color: plain
    paths feed the reference functionals (optionally under a different
    reference drift, for negative controls), transformed paths feed the
    test functionals.  T-pool samples violating the truncation-agreement
    condition on [-L/4, L/4] are excluded and counted.  Each path has its
    own spawned seed, so results do not depend on workers.
    """
    if not drift_admissible(spec):
        raise DomainError(f"inadmissible drift coefficients {spec.c}")
    reference = reference if reference is not None else spec
    basis = build_simplex_basis(spec.kappa)
    colors = tuple(colors) if colors is not None else tuple(range(1, spec.kappa + 1))
    analysis_L = L / 4.0
    if max(x_points) + 1 > analysis_L:
        raise ValueError("x_points must fit inside the analysis window [-L/4, L/4]")
    children = spawn_seeds(seed, 2 * len(colors) * seeds)
    distances, excluded = {}, {}

    def run_jobs(fn, jobs):
        if workers > 1:
            from concurrent.futures import ThreadPoolExecutor
            with ThreadPoolExecutor(max_workers=workers) as pool:
                return list(pool.map(fn, jobs))
        return [fn(j) for j in jobs]

    for idx, color in enumerate(colors):
        base = 2 * idx * seeds

        def ref_job(child):
            path = sample_brownian_with_drift(reference, L, h, child)
            return _unit_increment_functionals(path, basis, color, x_points)

        def t_job(child):
            path = sample_brownian_with_drift(spec, L, h, child)
            if not truncation_agreement(path, basis, color, Lprime, analysis_L):
                return None
            out = apply_Ti_truncated(path, basis, color, Lprime)
            return _unit_increment_functionals(out, basis, color, x_points)

        ref_rows = run_jobs(ref_job, children[base:base + seeds])
        t_rows = run_jobs(t_job, children[base + seeds:base + 2 * seeds])
        excluded[color] = sum(1 for r in t_rows if r is None)
        t_rows = [r for r in t_rows if r is not None]
        for label in ref_rows[0]:
            a = np.array([r[label] for r in ref_rows])
            b = np.array([r[label] for r in t_rows])
            distances[(color, label)] = ks_two_sample(a, b)
    passed = all(dist < threshold for dist in distances.values())
    return BMInvarianceReport(spec=spec, reference=reference, L=L, h=h, Lprime=Lprime,
                              seeds=seeds, seed=seed, rng=RNG_ALGORITHM,
                              threshold=threshold, x_points=tuple(x_points),
                              distances=distances, excluded=excluded, passed=passed)
