"""Closed-form quantities: digamma, concentration centers, tail bounds,
measurement-count bounds, covering cardinalities, and perturbation envelopes.

The concentration centers are the exact expectations of the log volume
ratios under Gaussian compression; they depend only on the number of
measurements and the parallelotope dimension. The measurement bounds take
the constants (C, C', delta_s) as explicit parameters: they are
existence-only, nothing constructive is known about their values, so any
concrete numbers fed in here are demonstration values, not certified ones.
"""

from __future__ import annotations

from dataclasses import dataclass
import math

import numpy as np

from .errors import BadShape, DomainError

# Recurrence pushes the digamma argument at least this high before the
# asymptotic series takes over; with the six-term tail the truncation error
# at 10 is ~8e-16, well inside the 1e-12 contract.
_DIGAMMA_ASYMPTOTIC_MIN = 10.0

# B_{2n}/(2n) for n = 1..6: the asymptotic series coefficients.
_DIGAMMA_TAIL = (
    1.0 / 12.0,
    -1.0 / 120.0,
    1.0 / 252.0,
    -1.0 / 240.0,
    1.0 / 132.0,
    -691.0 / 32760.0,
)


def digamma(x: float) -> float:
    """Digamma function for x > 0, accurate to ~1e-12 absolute.

    Upward recurrence psi(x+1) = psi(x) + 1/x lifts the argument above the
    asymptotic threshold, then log(x) - 1/(2x) minus the Bernoulli tail
    finishes the job.
    """
    x = float(x)
    if not x > 0.0:  # also rejects NaN
        raise DomainError(f"digamma requires x > 0, got {x!r}")
    acc = 0.0
    while x < _DIGAMMA_ASYMPTOTIC_MIN:
        acc -= 1.0 / x
        x += 1.0
    inv2 = 1.0 / (x * x)
    tail = 0.0
    for c in reversed(_DIGAMMA_TAIL):
        tail = (tail + c) * inv2
    return acc + math.log(x) - 0.5 / x - tail


def volume_ratio_center(m: int, d: int) -> float:
    """Expected log(vol_d(compressed)/vol_d(original)) at m measurements.

    Equals (1/2) sum_{p=1}^{d} (psi((m-p+1)/2) + log 2 - log m); always
    negative for d >= 1, approaching 0 as m grows with d fixed.
    """
    if m <= 0 or d < 0 or d >= m:
        raise BadShape(f"need 0 <= d < m, got m={m}, d={d}")
    log_m = math.log(m)
    acc = 0.0
    for p in range(1, d + 1):
        acc += digamma((m - p + 1) / 2.0) + math.log(2.0) - log_m
    return 0.5 * acc


def volume_ratio_center_asymptotic(m: int, d: int) -> float:
    """Large-m expansion of volume_ratio_center, accurate to O(d/m^2).

    Replaces each digamma with log(x) - 1/(2x):
    (1/2) sum_p (log(m-p+1) - log m - 1/(m-p+1)).
    """
    if m <= 0 or d < 0 or d >= m:
        raise BadShape(f"need 0 <= d < m, got m={m}, d={d}")
    log_m = math.log(m)
    acc = 0.0
    for p in range(1, d + 1):
        acc += math.log(m - p + 1) - log_m - 1.0 / (m - p + 1)
    return 0.5 * acc


def sine_product_center(m: int, k: int) -> float:
    """Concentration center of the log ratio of principal-sine products.

    (1/2) sum_{p=1}^{k} (psi((m-p-k+1)/2) - psi((m-p+1)/2)); requires
    2k <= m so every digamma argument stays positive. Algebraically equal
    to volume_ratio_center(m, 2k) - 2 * volume_ratio_center(m, k).
    """
    if m <= 0 or k < 0 or 2 * k > m:
        raise BadShape(f"need 0 <= 2k <= m, got m={m}, k={k}")
    acc = 0.0
    for p in range(1, k + 1):
        acc += digamma((m - p - k + 1) / 2.0) - digamma((m - p + 1) / 2.0)
    return 0.5 * acc


def lemma1_tail(eps: float, m: int, d: int, C: float) -> float:
    """Upper bound on the probability the log volume ratio strays past eps.

    2 * exp(-eps^2 / (4 sum_p [1/(m-p+1) + C/(m-p+1)^2])) for p = 1..d.
    Decreasing in eps, increasing in d, never above 2.
    """
    if eps <= 0.0:
        raise DomainError(f"eps must be positive, got {eps}")
    if C < 0.0:
        raise DomainError(f"C must be nonnegative, got {C}")
    if m <= 0 or d < 1 or d >= m:
        raise BadShape(f"need 0 < d < m, got m={m}, d={d}")
    s = 0.0
    for p in range(1, d + 1):
        r = m - p + 1
        s += 1.0 / r + C / (r * r)
    return 2.0 * math.exp(-eps * eps / (4.0 * s))


@dataclass(frozen=True)
class BoundParams:
    """Parameter bundle for the volume-embedding measurement bound.

    L subspaces of dimension k, parallelotope dimension d <= k, accuracy
    eps, confidence exponent t, volume floor C_s in (0, 1), and the
    demonstration constants C, C' > 0.
    """

    L: int
    k: int
    d: int
    eps: float
    t: float
    C_s: float
    C: float = 1.0
    C_prime: float = 1.0

    def __post_init__(self):
        if self.L < 1:
            raise DomainError(f"L must be a positive integer, got {self.L}")
        if self.k < 1:
            raise DomainError(f"k must be a positive integer, got {self.k}")
        if not 1 <= self.d <= self.k:
            raise DomainError(f"need 1 <= d <= k, got d={self.d}, k={self.k}")
        if not self.eps > 0.0:
            raise DomainError(f"eps must be positive, got {self.eps}")
        if not self.t > 0.0:
            raise DomainError(f"t must be positive, got {self.t}")
        if not 0.0 < self.C_s < 1.0:
            raise DomainError(f"C_s must lie in (0, 1), got {self.C_s}")
        if not self.C > 0.0 or not self.C_prime > 0.0:
            raise DomainError("C and C' must be positive")


def measurement_bound_theorem1(p: BoundParams) -> float:
    """Sufficient number of measurements for the d-dimensional volume
    embedding of L subspaces:

    4 (1+C')^2 (1+C) d / eps^2 * [log(2L) + d (3k/2 - 1) log(e d)
        + d k log(ceil(3 (1+C') / eps)) + t] + d - 1
    """
    cell = math.ceil(3.0 * (1.0 + p.C_prime) / p.eps)
    bracket = (
        math.log(2.0 * p.L)
        + p.d * (1.5 * p.k - 1.0) * math.log(math.e * p.d)
        + p.d * p.k * math.log(cell)
        + p.t
    )
    coef = 4.0 * (1.0 + p.C_prime) ** 2 * (1.0 + p.C) * p.d / p.eps**2
    return coef * bracket + (p.d - 1)


def measurement_bound_corollary1(
    L_bar: int, k: int, eps: float, t: float, C: float, C_prime: float
) -> float:
    """Sufficient measurement count covering all dimensions 1..2k at once
    over L_bar = L(L-1)/2 pairwise direct sums:

    8 (1+C')^2 (1+C) k / eps^2 * [log(2 L_bar) + 2k (3k - 1) log(2 e k)
        + 4 k^2 log(ceil(3 (1+C') / eps)) + log(2k) + t] + 2k - 1
    """
    if L_bar < 1 or k < 1:
        raise DomainError("L_bar and k must be positive integers")
    if eps <= 0.0 or t <= 0.0 or C <= 0.0 or C_prime <= 0.0:
        raise DomainError("eps, t, C, C' must all be positive")
    cell = math.ceil(3.0 * (1.0 + C_prime) / eps)
    bracket = (
        math.log(2.0 * L_bar)
        + 2.0 * k * (3.0 * k - 1.0) * math.log(2.0 * math.e * k)
        + 4.0 * k * k * math.log(cell)
        + math.log(2.0 * k)
        + t
    )
    return 8.0 * (1.0 + C_prime) ** 2 * (1.0 + C) * k / eps**2 * bracket + (2 * k - 1)


def measurement_bound_davies(
    L: int, k: int, delta: float, t: float, c: float, pairwise: bool = False
) -> float:
    """Classical length-preservation bound for unions of subspaces:

    (2 / (c delta)) * (log(2L) + k log(12/delta) + t).

    With `pairwise` the union runs over L(L-1)/2 subspace pairs, so L is
    replaced by that count.
    """
    if not 0.0 < delta < 1.0:
        raise DomainError(f"delta must lie in (0, 1), got {delta}")
    if L < 1 or k < 1:
        raise DomainError("L and k must be positive integers")
    if c <= 0.0:
        raise DomainError(f"c must be positive, got {c}")
    if t < 0.0:
        raise DomainError(f"t must be nonnegative, got {t}")
    count = L * (L - 1) // 2 if pairwise else L
    if count < 1:
        raise DomainError(f"pairwise count is zero for L={L}")
    return 2.0 / (c * delta) * (
        math.log(2.0 * count) + k * math.log(12.0 / delta) + t
    )


def log_covering_cardinality(delta0: float, k: int, d: int) -> float:
    """Log of C(floor((3/delta0)^k), d): how many d-column cover matrices a
    radius-delta0 net of the unit sphere of a k-dimensional subspace admits.

    Computed through log-gamma; the raw binomial overflows fixed-width
    integers for realistic (delta0, k).
    """
    if not 0.0 < delta0 <= 3.0:
        raise DomainError(f"delta0 must lie in (0, 3], got {delta0}")
    if k < 1 or d < 1:
        raise DomainError("k and d must be positive integers")
    try:
        base = (3.0 / delta0) ** k
    except OverflowError:
        base = math.inf
    if math.isinf(base):
        # Net size dwarfs any d we could enumerate: C(n, d) ~ n^d / d!.
        return d * k * math.log(3.0 / delta0) - math.lgamma(d + 1)
    n = math.floor(base)
    if d > n:
        raise DomainError(
            f"binomial C({n}, {d}) is zero; its log is undefined"
        )
    return math.lgamma(n + 1) - math.lgamma(d + 1) - math.lgamma(n - d + 1)


@dataclass(frozen=True)
class PerturbationEnvelope:
    """Multiplicative envelope relating a matrix's volume to that of a
    column-wise perturbation of it.

    C1 lower-bounds the smallest singular value of any unit-norm-column
    matrix with volume above the floor; C2 = C1 - sqrt(d) * delta_s2
    lower-bounds it after perturbing columns by up to delta_s2. delta0 is
    the actual perturbation radius in force (delta0 <= delta_s2), and C_phi
    bounds the operator norm of the compression map on the subspace.
    """

    C1: float
    C2: float
    delta0: float
    d: int
    C_phi: float

    @property
    def c_prime(self) -> float:
        """Combined log-ratio slope max(C_phi/C1 + 1/C2, C_phi/C2 + 1/C1)."""
        return max(
            self.C_phi / self.C1 + 1.0 / self.C2,
            self.C_phi / self.C2 + 1.0 / self.C1,
        )

    def volume_band(self) -> tuple[float, float]:
        """Factors (lo, hi) with lo * vol(Q) <= vol(S) <= hi * vol(Q) for any
        perturbation Q of S with column shifts at most delta0."""
        scale = self.d**1.5 * self.delta0
        return math.exp(-scale / self.C1), math.exp(scale / self.C2)

    def compressed_volume_band(self) -> tuple[float, float]:
        """Same factors after compression, with the column shifts amplified
        by the map's subspace operator norm C_phi."""
        scale = self.d**1.5 * self.C_phi * self.delta0
        return math.exp(-scale / self.C1), math.exp(scale / self.C2)


def perturbation_envelope(
    C_s: float, d: int, delta_s2: float, C_phi: float, delta0: float
) -> PerturbationEnvelope:
    """Build the perturbation envelope constants from the volume floor.

    C1 = C_s * (d/(d-1))^(-1/(2(d-1))) and C2 = C1 - sqrt(d) * delta_s2;
    delta_s2 must be small enough that C2 stays positive, and delta0 must
    not exceed delta_s2.
    """
    if not 0.0 < C_s < 1.0:
        raise DomainError(f"C_s must lie in (0, 1), got {C_s}")
    if d < 2:
        raise DomainError(f"the envelope needs d >= 2, got d={d}")
    if C_phi <= 0.0:
        raise DomainError(f"C_phi must be positive, got {C_phi}")
    C1 = C_s * (d / (d - 1.0)) ** (-1.0 / (2.0 * (d - 1.0)))
    if not 0.0 < delta_s2 < C1 / math.sqrt(d):
        raise DomainError(
            f"delta_s2 must lie in (0, {C1 / math.sqrt(d):.6g}) so the "
            f"perturbed singular-value floor stays positive, got {delta_s2}"
        )
    if not 0.0 <= delta0 <= delta_s2:
        raise DomainError(
            f"delta0 must lie in [0, delta_s2={delta_s2}], got {delta0}"
        )
    C2 = C1 - math.sqrt(d) * delta_s2
    return PerturbationEnvelope(C1=C1, C2=C2, delta0=delta0, d=d, C_phi=C_phi)


def check_volume_embedding(log_ratios, A: float, eps: float) -> bool:
    """True iff every supplied log volume ratio lies within eps of A.

    An empty sequence passes vacuously.
    """
    if eps <= 0.0:
        raise DomainError(f"eps must be positive, got {eps}")
    arr = np.asarray(list(log_ratios), dtype=float)
    if arr.size == 0:
        return True
    return bool(np.all(np.abs(arr - A) <= eps))


def order_estimate(d: int, k: int, size: int, mode: str = "theorem1") -> float:
    """Growth term of the measurement bound, constants dropped.

    mode="theorem1": d log(size) + d^2 k log(e d), with size the number of
    subspaces. mode="sparse": d k log(size/k) + d^2 k log(e d), with size
    the ambient dimension (the subspace count is then the binomial
    C(size, k)). A plotting/documentation aid, not a bound.
    """
    if d < 1 or k < 1 or size < 1:
        raise DomainError("d, k, size must be positive integers")
    growth = d * d * k * math.log(math.e * d)
    if mode == "theorem1":
        return d * math.log(size) + growth
    if mode == "sparse":
        if size <= k:
            raise DomainError(f"sparse mode needs size > k, got {size} <= {k}")
        return d * k * math.log(size / k) + growth
    raise DomainError(f"unknown mode {mode!r}; expected 'theorem1' or 'sparse'")
