"""Discrete Pitman transforms on scalar and vector paths.

The two-sided transform reflects a path in its running infimum, renormalized
so the origin stays fixed; its inverse uses the future infimum.  Tails
outside the stored window are described exactly by per-step slopes
(FiniteTail), which makes every infimum over an infinite range computable in
closed form.  Windowed paths carry no tail information, so tail-sensitive
questions about them come back as Decision.UNDECIDABLE instead of being
silently truncated.

Transforms extend the stored window where the reflection is still
non-linear, so the returned path plus its tail slopes describe the image
exactly on all of Z.
"""

import enum
import math
from dataclasses import dataclass

import numpy as np

from .decision import Decision
from .errors import DomainError

_TOL = 1e-12


@dataclass(frozen=True)
class FiniteTail:
    """Exact linear continuation outside the window.

    For n left of the window, value(n) = value(n_lo) + left_slope * (n - n_lo);
    symmetrically on the right.  Slopes are per unit index step.
    """

    left_slope: float
    right_slope: float


class Windowed:
    """Marker: nothing is known outside the stored window."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "Windowed()"


WINDOWED = Windowed()


class DomainSet(enum.Enum):
    """Domains of the two-sided transform, its inverse, and their composites."""

    R_P1 = "R_P1"
    R_P1INV = "R_P1inv"
    R_P1INV_P1 = "R_P1inv.P1"
    R_P1_P1INV = "R_P1.P1inv"


@dataclass(frozen=True, eq=False)
class ScalarPath:
    """A real path on a window of Z with value(0) = 0."""

    offset: int
    values: np.ndarray
    boundary: object  # FiniteTail or WINDOWED

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", v)
        if v.ndim != 1 or v.size == 0:
            raise ValueError("values must be a nonempty 1-d array")
        if not (self.n_lo <= 0 <= self.n_hi):
            raise ValueError("window must contain 0")
        if abs(v[-self.offset]) > _TOL:
            raise ValueError("path must vanish at 0")

    @property
    def n_lo(self) -> int:
        return self.offset

    @property
    def n_hi(self) -> int:
        return self.offset + self.values.size - 1

    def __eq__(self, other):
        if not isinstance(other, ScalarPath):
            return NotImplemented
        return (self.offset == other.offset and self.boundary == other.boundary
                and np.array_equal(self.values, other.values))

    def value(self, n: int) -> float:
        if self.n_lo <= n <= self.n_hi:
            return float(self.values[n - self.offset])
        if not isinstance(self.boundary, FiniteTail):
            raise DomainError(f"index {n} outside windowed path")
        if n < self.n_lo:
            return float(self.values[0] + self.boundary.left_slope * (n - self.n_lo))
        return float(self.values[-1] + self.boundary.right_slope * (n - self.n_hi))

    def materialize(self, lo: int, hi: int) -> np.ndarray:
        """Values on [lo, hi] with the tail continuation filled in."""
        if lo > self.n_lo or hi < self.n_hi:
            raise ValueError("materialize can only grow the window")
        if (lo < self.n_lo or hi > self.n_hi) and not isinstance(self.boundary, FiniteTail):
            raise DomainError("cannot materialize a windowed path beyond its window")
        out = np.empty(hi - lo + 1)
        out[self.n_lo - lo:self.n_hi - lo + 1] = self.values
        if lo < self.n_lo:
            t = np.arange(self.n_lo - lo, 0, -1)
            out[:self.n_lo - lo] = self.values[0] - self.boundary.left_slope * t
        if hi > self.n_hi:
            t = np.arange(1, hi - self.n_hi + 1)
            out[self.n_hi - lo + 1:] = self.values[-1] + self.boundary.right_slope * t
        return out


def scalar_path(values, offset=0, left_slope=0.0, right_slope=0.0) -> ScalarPath:
    return ScalarPath(offset=int(offset), values=np.asarray(values, dtype=float),
                      boundary=FiniteTail(float(left_slope), float(right_slope)))


@dataclass(frozen=True, eq=False)
class VectorPath:
    """A path in R^k on a window of Z with value(0) = 0."""

    offset: int
    values: np.ndarray  # (window length, k)
    boundary: object  # VectorFiniteTail or WINDOWED

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", v)
        if v.ndim != 2 or v.shape[0] == 0:
            raise ValueError("values must be a nonempty (n, k) array")
        if not (self.n_lo <= 0 <= self.n_hi):
            raise ValueError("window must contain 0")
        if np.abs(v[-self.offset]).max() > _TOL:
            raise ValueError("path must vanish at 0")

    @property
    def n_lo(self) -> int:
        return self.offset

    @property
    def n_hi(self) -> int:
        return self.offset + self.values.shape[0] - 1

    @property
    def dim(self) -> int:
        return self.values.shape[1]

    def materialize(self, lo: int, hi: int) -> np.ndarray:
        if lo > self.n_lo or hi < self.n_hi:
            raise ValueError("materialize can only grow the window")
        if (lo < self.n_lo or hi > self.n_hi) and not isinstance(self.boundary, VectorFiniteTail):
            raise DomainError("cannot materialize a windowed path beyond its window")
        out = np.empty((hi - lo + 1, self.dim))
        out[self.n_lo - lo:self.n_hi - lo + 1] = self.values
        if lo < self.n_lo:
            t = np.arange(self.n_lo - lo, 0, -1)[:, None]
            out[:self.n_lo - lo] = self.values[0] - t * self.boundary.left_step
        if hi > self.n_hi:
            t = np.arange(1, hi - self.n_hi + 1)[:, None]
            out[self.n_hi - lo + 1:] = self.values[-1] + t * self.boundary.right_step
        return out


@dataclass(frozen=True)
class VectorFiniteTail:
    """Exact linear vector continuation: one fixed step on each side."""

    left_step: tuple
    right_step: tuple


def _tail_or_raise(pi) -> FiniteTail:
    if not isinstance(pi.boundary, FiniteTail):
        raise DomainError("tail-sensitive transform needs FiniteTail slopes; "
                          "windowed paths are undecidable")
    return pi.boundary


def pitman_one_sided(pi: ScalarPath) -> ScalarPath:
    """Reflection in the running minimum on Z_+: out(n) = pi(n) - 2 min_{0<=m<=n} pi(m).

    No tail condition: the value at n only looks at [0, n], so windowed
    inputs are fine and yield a windowed output.
    """
    if pi.offset != 0:
        raise DomainError("one-sided transform requires the window to start at 0")
    if not isinstance(pi.boundary, FiniteTail):
        out = pi.values - 2.0 * np.minimum.accumulate(pi.values)
        return ScalarPath(offset=0, values=out, boundary=WINDOWED)
    tail = pi.boundary
    values, hi = _extend_right_for_running_min(pi)
    runmin = np.minimum.accumulate(values)
    out = values - 2.0 * runmin
    s_r = tail.right_slope
    return ScalarPath(offset=0, values=out,
                      boundary=FiniteTail(tail.left_slope, abs(s_r) if s_r < 0 else s_r))


def pitman_two_sided(pi: ScalarPath) -> ScalarPath:
    """out(n) = pi(n) - 2 inf_{m<=n} pi(m) + 2 inf_{m<=0} pi(m).

    Defined when inf_{m<=0} pi(m) > -infinity, i.e. the left tail does not
    run down; the output fixes the origin and lands in the domain of the
    inverse transform.
    """
    tail = _tail_or_raise(pi)
    if tail.left_slope > _TOL:
        raise DomainError("inf over the left tail is -infinity (left slope > 0)")
    values, hi = _extend_right_for_running_min(pi)
    lo = pi.n_lo
    runmin = np.minimum.accumulate(values)
    inf_left0 = runmin[-lo]
    out = values - 2.0 * runmin + 2.0 * inf_left0
    s_l, s_r = tail.left_slope, tail.right_slope
    return ScalarPath(offset=lo, values=out,
                      boundary=FiniteTail(-s_l, abs(s_r) if s_r < 0 else s_r))


def pitman_inverse(pi: ScalarPath) -> ScalarPath:
    """out(n) = pi(n) - 2 inf_{m>=n} pi(m) + 2 inf_{m>=0} pi(m).

    Defined when inf_{m>=0} pi(m) > -infinity (the right tail does not run
    down); inverse of the two-sided transform on the appropriate set.
    """
    tail = _tail_or_raise(pi)
    if tail.right_slope < -_TOL:
        raise DomainError("inf over the right tail is -infinity (right slope < 0)")
    values, lo = _extend_left_for_future_min(pi)
    futmin = np.minimum.accumulate(values[::-1])[::-1]
    inf_right0 = futmin[-lo]
    out = values - 2.0 * futmin + 2.0 * inf_right0
    s_l, s_r = tail.left_slope, tail.right_slope
    return ScalarPath(offset=lo, values=out,
                      boundary=FiniteTail(-s_l if s_l > 0 else s_l, -s_r))


def _extend_right_for_running_min(pi: ScalarPath):
    """Window grown so the running min is eventually attained at the path itself.

    With a falling right tail the reflection stays non-linear until the path
    drops below everything seen so far; past that point it is exactly
    -pi(n) + const.  Returns (values, new n_hi).
    """
    tail = pi.boundary
    hi = pi.n_hi
    if tail.right_slope < -_TOL:
        gap = pi.values[-1] - pi.values.min()
        hi += int(math.ceil(gap / -tail.right_slope))
    return pi.materialize(pi.n_lo, hi), hi


def _extend_left_for_future_min(pi: ScalarPath):
    """Mirror of _extend_right_for_running_min for the future minimum."""
    tail = pi.boundary
    lo = pi.n_lo
    if tail.left_slope > _TOL:
        gap = pi.values[0] - pi.values.min()
        lo -= int(math.ceil(gap / tail.left_slope))
    return pi.materialize(lo, pi.n_hi), lo


def _steps_ok(deltas, unit: float) -> bool:
    mags = np.abs(deltas)
    return bool((np.minimum(mags, np.abs(mags - unit)) <= 1e-9).all())


def in_domain(pi: ScalarPath, which: DomainSet, step_unit: float = 1.0) -> Decision:
    """Decide membership in one of the transform domains.

    FiniteTail paths are fully decidable: the infinitely-often conditions
    reduce to the tail slope (a falling tail re-attains its running inf
    forever; a flat tail does iff it already sits at the running inf at the
    window edge; a rising one stops).  Windowed paths are undecidable unless
    the window itself refutes the step condition.
    """
    windowed = not isinstance(pi.boundary, FiniteTail)
    if which in (DomainSet.R_P1INV_P1, DomainSet.R_P1_P1INV):
        deltas = np.diff(pi.values)
        if not _steps_ok(deltas, step_unit):
            return Decision.NO
    if windowed:
        return Decision.UNDECIDABLE
    s_l, s_r = pi.boundary.left_slope, pi.boundary.right_slope

    if which is DomainSet.R_P1:
        return Decision.YES if s_l <= _TOL else Decision.NO
    if which is DomainSet.R_P1INV:
        return Decision.YES if s_r >= -_TOL else Decision.NO

    tail_mags = [abs(s_l), abs(s_r)]
    if not _steps_ok(np.array(tail_mags), step_unit):
        return Decision.NO

    if which is DomainSet.R_P1INV_P1:
        if s_l > _TOL:
            return Decision.NO
        if s_r < -_TOL:
            return Decision.YES  # falling tail attains the running inf i.o.
        if s_r <= _TOL:  # flat tail: recurs iff it already sits on the inf
            return Decision.YES if pi.values[-1] <= pi.values.min() + _TOL \
                else Decision.NO
        return Decision.NO  # rising tail: equality happens finitely often

    if which is DomainSet.R_P1_P1INV:
        if s_r < -_TOL:
            return Decision.NO
        if s_l > _TOL:
            return Decision.YES
        if s_l >= -_TOL:
            futmin = pi.values.min()
            return Decision.YES if pi.values[0] <= futmin + _TOL else Decision.NO
        return Decision.NO

    raise ValueError(f"unknown domain set {which!r}")


def _scalar_transform(direction: str):
    table = {
        "forward": pitman_two_sided,
        "inverse": pitman_inverse,
        "one_sided": pitman_one_sided,
    }
    try:
        return table[direction]
    except KeyError:
        raise ValueError(f"direction must be one of {sorted(table)}, got {direction!r}")


def project_alpha(pi: VectorPath, alpha) -> ScalarPath:
    """The scalar coefficient path alpha . pi(n) / |alpha|^2."""
    alpha = np.asarray(alpha, dtype=float)
    norm2 = float(alpha @ alpha)
    if norm2 <= 0.0:
        raise ValueError("alpha must be nonzero")
    coeff = pi.values @ alpha / norm2
    coeff[-pi.offset] = 0.0  # exact anchor despite roundoff
    if isinstance(pi.boundary, VectorFiniteTail):
        bnd = FiniteTail(float(np.asarray(pi.boundary.left_step) @ alpha) / norm2,
                         float(np.asarray(pi.boundary.right_step) @ alpha) / norm2)
    else:
        bnd = WINDOWED
    return ScalarPath(offset=pi.offset, values=coeff, boundary=bnd)


def pitman_alpha(pi: VectorPath, alpha, direction: str = "forward") -> VectorPath:
    """Pitman transform of a vector path along alpha.

    Decomposes the path into its alpha-projection and the orthogonal rest;
    only the scalar projection is transformed, the orthogonal part passes
    through untouched.  Scalar domain errors propagate.
    """
    alpha = np.asarray(alpha, dtype=float)
    proj = project_alpha(pi, alpha)
    out_scalar = _scalar_transform(direction)(proj)
    lo, hi = out_scalar.n_lo, out_scalar.n_hi
    base = pi.materialize(lo, hi)
    coeff_in = proj.materialize(lo, hi)
    out = base + (out_scalar.values - coeff_in)[:, None] * alpha
    if isinstance(pi.boundary, VectorFiniteTail):
        ls = np.asarray(pi.boundary.left_step, dtype=float)
        rs = np.asarray(pi.boundary.right_step, dtype=float)
        in_tail = proj.boundary
        out_tail = out_scalar.boundary
        bnd = VectorFiniteTail(
            left_step=tuple(ls + (out_tail.left_slope - in_tail.left_slope) * alpha),
            right_step=tuple(rs + (out_tail.right_slope - in_tail.right_slope) * alpha))
    else:
        bnd = WINDOWED
    return VectorPath(offset=lo, values=out, boundary=bnd)
