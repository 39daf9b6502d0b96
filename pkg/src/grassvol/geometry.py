"""Deterministic geometry of matrices and subspaces.

Everything here is exact linear algebra: parallelotope volumes (kept in the
natural-log domain so products of many singular values cannot underflow),
principal angles between subspaces, the product of principal sines, and the
structural column checks used by the verification experiments.
"""

from __future__ import annotations

from dataclasses import dataclass
import math

import numpy as np
from scipy.spatial.distance import pdist

from .errors import DimensionMismatch, NotDisjoint, RankDeficient, ZeroColumn

# Column norms of a basis flagged unit-norm must match 1 this tightly.
UNIT_NORM_TOL = 1e-12

# Above this cosine the arccos path loses digits; switch to the sine-based
# singular values for those angles.
_SMALL_ANGLE_COS = 0.99


def as_matrix(a, name: str = "matrix") -> np.ndarray:
    """Validate and return `a` as a 2-D float64 array with finite entries."""
    m = np.asarray(a, dtype=float)
    if m.ndim != 2:
        raise DimensionMismatch(f"{name} must be 2-D, got ndim={m.ndim}")
    if m.size and not np.all(np.isfinite(m)):
        raise DimensionMismatch(f"{name} contains non-finite entries")
    return m


def rank_tolerance(shape: tuple[int, int], sigma_max: float) -> float:
    """Relative cutoff below which a singular value counts as zero."""
    return max(shape) * np.finfo(float).eps * sigma_max


def _full_rank_svals(m: np.ndarray, name: str = "matrix") -> np.ndarray:
    """Singular values of `m`, raising RankDeficient below the rank cutoff."""
    svals = np.linalg.svd(m, compute_uv=False)
    if svals[-1] <= rank_tolerance(m.shape, svals[0]):
        raise RankDeficient(
            f"{name} is numerically rank deficient "
            f"(smallest singular value {svals[-1]:.3e})"
        )
    return svals


@dataclass(frozen=True)
class LogVolume:
    """d-dimensional parallelotope volume stored as a natural log."""

    log_value: float
    dim: int

    @property
    def value(self) -> float:
        return math.exp(self.log_value)


@dataclass(frozen=True)
class Subspace:
    """A point on the Grassmannian: span of a full-column-rank N x k basis.

    The basis array is copied, frozen (read-only), and rank-checked at
    construction; `unit_norm=True` additionally asserts every column has
    Euclidean norm 1 within UNIT_NORM_TOL.
    """

    basis: np.ndarray
    unit_norm: bool = False

    def __post_init__(self):
        b = as_matrix(self.basis, "basis").copy()
        n, k = b.shape
        if not 0 < k < n:
            raise DimensionMismatch(
                f"subspace basis must be N x k with 0 < k < N, got {n} x {k}"
            )
        _full_rank_svals(b, "basis")
        if self.unit_norm:
            norms = np.linalg.norm(b, axis=0)
            if np.max(np.abs(norms - 1.0)) > UNIT_NORM_TOL:
                raise DimensionMismatch(
                    "basis flagged unit-norm has a column of norm "
                    f"{norms[np.argmax(np.abs(norms - 1.0))]!r}"
                )
        b.flags.writeable = False
        object.__setattr__(self, "basis", b)

    @property
    def ambient(self) -> int:
        return self.basis.shape[0]

    @property
    def dim(self) -> int:
        return self.basis.shape[1]


@dataclass(frozen=True)
class PrincipalAngleSet:
    """Principal angles between two equal-dimension subspaces, radians.

    Sorted descending; every angle lies in [0, pi/2].
    """

    angles: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.angles, dtype=float).copy()
        a.flags.writeable = False
        object.__setattr__(self, "angles", a)

    def __len__(self) -> int:
        return len(self.angles)

    def __iter__(self):
        return iter(self.angles)


def log_volume(S) -> LogVolume:
    """Log of the parallelotope volume spanned by the columns of S.

    The volume is the product of the singular values, equivalently
    sqrt(det(S^T S)); the empty matrix has volume 1 (log 0). Raises
    RankDeficient when the smallest singular value falls below the rank
    cutoff, DimensionMismatch when there are more columns than rows.
    """
    S = as_matrix(S, "S")
    rows, cols = S.shape
    if cols > rows:
        raise DimensionMismatch(f"S has more columns ({cols}) than rows ({rows})")
    if cols == 0:
        return LogVolume(0.0, 0)
    svals = _full_rank_svals(S, "S")
    return LogVolume(float(np.sum(np.log(svals))), cols)


def juxtapose(X, Y) -> np.ndarray:
    """Column-wise concatenation [X, Y] (X's columns first)."""
    X = as_matrix(X, "X")
    Y = as_matrix(Y, "Y")
    if X.shape[0] != Y.shape[0]:
        raise DimensionMismatch(
            f"row counts differ: {X.shape[0]} vs {Y.shape[0]}"
        )
    return np.hstack([X, Y])


def column_normalize(S) -> np.ndarray:
    """Rescale every column of S to unit Euclidean norm."""
    S = as_matrix(S, "S")
    norms = np.linalg.norm(S, axis=0)
    if np.any(norms == 0.0):
        raise ZeroColumn(f"column {int(np.argmin(norms))} has zero norm")
    return S / norms


def min_pairwise_column_distance(S) -> float:
    """Smallest Euclidean distance between two distinct columns of S."""
    S = as_matrix(S, "S")
    if S.shape[1] < 2:
        raise DimensionMismatch("need at least 2 columns")
    return float(pdist(S.T).min())


def residual_norm(S, j: int) -> float:
    """Distance from column j of S to the span of the remaining columns.

    Equals the norm of the projection of s_j onto the orthogonal complement
    of span(S without column j); multiplying it by the remaining columns'
    volume recovers the full volume. S must have full column rank.
    """
    S = as_matrix(S, "S")
    cols = S.shape[1]
    if not 0 <= j < cols:
        raise DimensionMismatch(f"column index {j} out of range for {cols} columns")
    _full_rank_svals(S, "S")
    sj = S[:, j]
    rest = np.delete(S, j, axis=1)
    if rest.shape[1] == 0:
        return float(np.linalg.norm(sj))
    q, _ = np.linalg.qr(rest)
    return float(np.linalg.norm(sj - q @ (q.T @ sj)))


def _orthonormal(basis: np.ndarray) -> np.ndarray:
    q, _ = np.linalg.qr(basis)
    return q


def principal_angles(X: Subspace, Y: Subspace) -> PrincipalAngleSet:
    """Principal angles between span(X) and span(Y), sorted descending.

    Cosines come from the singular values of Qx^T Qy on orthonormalized
    bases; angles whose cosine exceeds the small-angle threshold are
    recomputed from the sine-based singular values of (I - Qx Qx^T) Qy,
    which stay accurate when the arccos path does not.
    """
    if X.ambient != Y.ambient:
        raise DimensionMismatch(
            f"ambient dimensions differ: {X.ambient} vs {Y.ambient}"
        )
    if X.dim != Y.dim:
        raise DimensionMismatch(f"subspace dimensions differ: {X.dim} vs {Y.dim}")
    qx = _orthonormal(X.basis)
    qy = _orthonormal(Y.basis)
    inner = qx.T @ qy
    cosines = np.clip(np.linalg.svd(inner, compute_uv=False), 0.0, 1.0)
    theta = np.arccos(cosines)  # ascending angles (cosines come descending)
    small = cosines > _SMALL_ANGLE_COS
    if np.any(small):
        sines = np.linalg.svd(qy - qx @ inner, compute_uv=False)
        # descending sines pair with descending angles; flip to match theta
        sines = np.clip(sines[::-1], 0.0, 1.0)
        theta[small] = np.arcsin(sines[small])
    theta = np.clip(theta, 0.0, math.pi / 2)
    return PrincipalAngleSet(theta[::-1])


def log_product_principal_sines(X: Subspace, Y: Subspace) -> float:
    """Sum of log sines of the principal angles between disjoint X and Y.

    Disjointness is certified by full numerical rank of the juxtaposed basis
    [X, Y]; on success the value satisfies the volume identity
    log vol([X, Y]) = log vol(X) + log vol(Y) + sum_i log sin(theta_i).
    """
    joint = juxtapose(X.basis, Y.basis)
    if joint.shape[1] > joint.shape[0]:
        raise NotDisjoint(
            f"juxtaposition has {joint.shape[1]} columns in ambient "
            f"dimension {joint.shape[0]}"
        )
    try:
        _full_rank_svals(joint, "[X, Y]")
    except RankDeficient as exc:
        raise NotDisjoint(str(exc)) from exc
    theta = principal_angles(X, Y).angles
    return float(np.sum(np.log(np.sin(theta))))
