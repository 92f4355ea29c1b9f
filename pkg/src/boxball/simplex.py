"""Regular-simplex basis vectors used to encode particle colors.

The kappa+1 vectors e_0, ..., e_kappa live in R^kappa, have unit length,
pairwise dot product -1/kappa, and sum to zero.  Every lattice path in this
package takes its steps from this set; color arithmetic elsewhere stays in
integer counts, so these floats only enter continuum computations and
consistency checks.
"""

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class SimplexBasis:
    """Vertices of a regular simplex centered at the origin.

    vectors has shape (kappa+1, kappa); row i is e_i.
    """

    kappa: int
    vectors: np.ndarray

    def __post_init__(self):
        if self.kappa < 1:
            raise ValueError("kappa must be a positive integer")
        if self.vectors.shape != (self.kappa + 1, self.kappa):
            raise ValueError("vectors must have shape (kappa+1, kappa)")

    def vector(self, i: int) -> np.ndarray:
        return self.vectors[i]

    def step_difference(self, i: int) -> np.ndarray:
        """e_i - e_0, the reflection axis for color i."""
        return self.vectors[i] - self.vectors[0]


def build_simplex_basis(kappa: int) -> SimplexBasis:
    """Construct the canonical simplex basis for a given number of colors.

    Embeds the kappa+1 scaled centered indicator vectors
    sqrt((kappa+1)/kappa) * (delta_i - 1/(kappa+1)) in R^{kappa+1}, then maps
    them to R^kappa through a fixed orthonormal basis of the zero-sum
    hyperplane (Gram-Schmidt on centered coordinate seeds).  Deterministic:
    the same kappa always yields bit-identical vectors, and e_0 comes out as
    (1, 0, ..., 0).
    """
    if not isinstance(kappa, (int, np.integer)) or kappa < 1:
        raise ValueError(f"kappa must be a positive integer, got {kappa!r}")
    kappa = int(kappa)
    m = kappa + 1
    scale = np.sqrt(m / kappa)
    # rows: embedded vertices v_i in the zero-sum hyperplane of R^{m}
    verts = scale * (np.eye(m) - 1.0 / m)
    # orthonormal basis of the hyperplane from seeds delta_r - 1/m, r < kappa
    seeds = (np.eye(m) - 1.0 / m)[:kappa]
    basis_rows = []
    for s in seeds:
        w = s.copy()
        for q in basis_rows:
            w -= (w @ q) * q
        w /= np.linalg.norm(w)
        basis_rows.append(w)
    q_mat = np.array(basis_rows)  # (kappa, m)
    vectors = verts @ q_mat.T  # (m, kappa)
    vectors.setflags(write=False)
    return SimplexBasis(kappa=kappa, vectors=vectors)


def gram_report(basis: SimplexBasis) -> float:
    """Max absolute deviation of the Gram matrix from (1 diag, -1/kappa off)."""
    g = basis.vectors @ basis.vectors.T
    target = np.full_like(g, -1.0 / basis.kappa)
    np.fill_diagonal(target, 1.0)
    return float(np.abs(g - target).max())


def decompose(v, basis: SimplexBasis) -> np.ndarray:
    """Zero-sum coefficients (a_0, ..., a_kappa) with sum_i a_i e_i = v.

    The coefficient tuple is unique once the zero-sum constraint is imposed;
    solved as the square linear system [E^T; ones] a = [v; 0].
    """
    v = np.asarray(v, dtype=float).reshape(basis.kappa)
    mat = np.vstack([basis.vectors.T, np.ones(basis.kappa + 1)])
    rhs = np.concatenate([v, [0.0]])
    return np.linalg.solve(mat, rhs)


def recombine(coeffs, basis: SimplexBasis) -> np.ndarray:
    """Evaluate sum_i a_i e_i."""
    coeffs = np.asarray(coeffs, dtype=float)
    return coeffs @ basis.vectors
