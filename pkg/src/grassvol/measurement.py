"""Seeded random generation.

All samplers are pure functions of a SeedSpec, so any experiment can be
re-run bit-for-bit and trials can execute concurrently without shared RNG
state. Gaussian measurement matrices carry entry variance 1/M, the scaling
under which compression preserves expected squared norms.
"""

from __future__ import annotations

from dataclasses import dataclass
import math

import numpy as np

from .errors import BadAngles, BadShape
from .geometry import Subspace, as_matrix

_U64 = 2**64


@dataclass(frozen=True)
class SeedSpec:
    """Master seed plus a stream index; the pair fully determines a stream.

    Distinct stream indices give statistically independent generators, and
    the derivation is a pure hash of (master_seed, stream_index), so trials
    seeded this way reproduce identically at any level of parallelism.
    """

    master_seed: int
    stream_index: int = 0

    def __post_init__(self):
        for name in ("master_seed", "stream_index"):
            v = getattr(self, name)
            if not 0 <= v < _U64:
                raise BadShape(f"{name} must be an unsigned 64-bit integer, got {v}")

    def generator(self) -> np.random.Generator:
        seq = np.random.SeedSequence((self.master_seed, self.stream_index))
        return np.random.Generator(np.random.PCG64(seq))

    def stream(self, index: int) -> "SeedSpec":
        return SeedSpec(self.master_seed, index)


@dataclass(frozen=True)
class MeasurementMatrix:
    """M x N compression map with i.i.d. N(0, 1/M) entries and its seed."""

    matrix: np.ndarray
    seed: SeedSpec

    def __post_init__(self):
        m = as_matrix(self.matrix, "measurement matrix").copy()
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)

    @property
    def m(self) -> int:
        return self.matrix.shape[0]

    @property
    def n(self) -> int:
        return self.matrix.shape[1]


@dataclass(frozen=True)
class AnglePrescription:
    """Target principal angles, each strictly inside (0, pi/2].

    Zero angles are rejected: a zero principal angle means the pair of
    subspaces shares a direction, which the pair generator must not produce.
    """

    angles: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.angles, dtype=float).copy()
        if a.ndim != 1 or a.size == 0:
            raise BadAngles("prescription must be a nonempty 1-D sequence")
        if not np.all(np.isfinite(a)):
            raise BadAngles("prescription contains non-finite angles")
        if np.any(a <= 0.0) or np.any(a > math.pi / 2):
            raise BadAngles("every prescribed angle must lie in (0, pi/2]")
        a.flags.writeable = False
        object.__setattr__(self, "angles", a)

    def __len__(self) -> int:
        return len(self.angles)


def sample_measurement(m: int, n: int, seed: SeedSpec) -> MeasurementMatrix:
    """Draw an M x N matrix with i.i.d. N(0, 1/m) entries, M < N."""
    if m <= 0 or m >= n:
        raise BadShape(f"need 0 < m < n, got m={m}, n={n}")
    mat = seed.generator().standard_normal((m, n)) / math.sqrt(m)
    return MeasurementMatrix(mat, seed)


def compress(phi, S) -> np.ndarray:
    """Apply a measurement map to the columns of S (returns phi @ S).

    Accepts either a MeasurementMatrix or a plain array (handy in tests
    where the variance convention is irrelevant).
    """
    mat = phi.matrix if isinstance(phi, MeasurementMatrix) else as_matrix(phi, "phi")
    S = as_matrix(S, "S")
    if mat.shape[1] != S.shape[0]:
        raise BadShape(
            f"measurement expects {mat.shape[1]} ambient dimensions, "
            f"S has {S.shape[0]} rows"
        )
    return mat @ S


def random_subspace(n: int, k: int, unit_norm: bool, seed: SeedSpec) -> Subspace:
    """Random k-dimensional subspace of R^n from i.i.d. normal basis entries.

    With `unit_norm` the basis columns are rescaled to norm 1. The basis is
    full rank with probability 1; the Subspace constructor re-checks.
    """
    if not 0 < k < n:
        raise BadShape(f"need 0 < k < n, got k={k}, n={n}")
    b = seed.generator().standard_normal((n, k))
    if unit_norm:
        b = b / np.linalg.norm(b, axis=0)
    return Subspace(b, unit_norm=unit_norm)


def haar_frame(n: int, width: int, rng: np.random.Generator) -> np.ndarray:
    """n x width orthonormal frame, Haar-distributed over such frames.

    The sign fix on the QR factor removes the factorization's sign
    convention so the distribution is exactly uniform.
    """
    g = rng.standard_normal((n, width))
    q, r = np.linalg.qr(g)
    return q * np.sign(np.diag(r))


def subspace_pair_with_angles(
    n: int, k: int, prescription: AnglePrescription, seed: SeedSpec
) -> tuple[Subspace, Subspace]:
    """Two k-dimensional subspaces of R^n with the given principal angles.

    In a 2k-dimensional coordinate frame the first subspace takes basis
    vectors e_1..e_k and the second cos(t_i) e_i + sin(t_i) e_{k+i}; a shared
    random orthonormal frame then carries both into R^n, which rotates the
    pair uniformly without touching the angles. Recovering the angles via
    the SVD path reproduces the sorted prescription.
    """
    if len(prescription) != k:
        raise BadShape(
            f"prescription has {len(prescription)} angles, expected k={k}"
        )
    if n < 2 * k:
        raise BadShape(f"need n >= 2k to embed the pair, got n={n}, k={k}")
    theta = prescription.angles
    frame = haar_frame(n, 2 * k, seed.generator())
    x0 = np.zeros((2 * k, k))
    y0 = np.zeros((2 * k, k))
    idx = np.arange(k)
    x0[idx, idx] = 1.0
    y0[idx, idx] = np.cos(theta)
    y0[k + idx, idx] = np.sin(theta)
    return (
        Subspace(frame @ x0, unit_norm=True),
        Subspace(frame @ y0, unit_norm=True),
    )


def bartlett_logdet_sample(m: int, d: int, seed: SeedSpec) -> float:
    """One draw of sum_p [log(chi2_{m-p+1}) - log m], p = 1..d.

    This is the exact law of the log Gram determinant of an m x d matrix
    with i.i.d. N(0, 1/m) entries, so it serves as the independent oracle
    for the direct compressed-volume pipeline. Chi-square variates come
    from gamma draws with shape (m - p + 1)/2 and scale 2.
    """
    if m <= 0 or d < 0 or d >= m:
        raise BadShape(f"need 0 <= d < m, got m={m}, d={d}")
    if d == 0:
        return 0.0
    dof = m - np.arange(d)  # m, m-1, ..., m-d+1
    chis = 2.0 * seed.generator().standard_gamma(dof / 2.0)
    return float(np.sum(np.log(chis)) - d * math.log(m))
