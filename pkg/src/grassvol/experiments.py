"""Seeded Monte-Carlo experiments verifying the closed-form predictions.

Each runner derives every random draw from (master_seed, stream_index), with
stream indices a fixed arithmetic function of the trial layout, so reruns of
the same config produce identical records at any thread count. Trials run
independently; aggregation keeps trial order.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
import math

import numpy as np
from scipy import stats as scipy_stats

from .errors import BadShape, EmptyRecords
from .geometry import (
    Subspace,
    column_normalize,
    log_volume,
    log_product_principal_sines,
    min_pairwise_column_distance,
)
from .measurement import (
    AnglePrescription,
    SeedSpec,
    bartlett_logdet_sample,
    compress,
    haar_frame,
    sample_measurement,
    subspace_pair_with_angles,
)
from .theory import (
    digamma,
    perturbation_envelope,
    sine_product_center,
    volume_ratio_center,
)

# Empirical means must land within this many standard errors of the analytic
# center for an experiment to pass.
MEAN_SIGMAS = 4.0

# Two-sample KS significance for the oracle-equivalence experiment.
KS_ALPHA = 0.01

# Relative variance mismatch allowed between the two pipelines.
VAR_REL_TOL = 0.10

_REJECTION_LIMIT = 100_000


@dataclass(frozen=True)
class ExperimentConfig:
    """Shape, trial count, and seed of one experiment run."""

    name: str
    n: int
    m_values: tuple[int, ...]
    k: int
    d: int
    trials: int
    master_seed: int
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "m_values", tuple(int(m) for m in self.m_values))
        object.__setattr__(self, "extra", dict(self.extra))
        if self.trials <= 0:
            raise BadShape(f"trials must be positive, got {self.trials}")

    def as_dict(self) -> dict:
        return {
            "name": self.name,
            "n": self.n,
            "m_values": list(self.m_values),
            "k": self.k,
            "d": self.d,
            "trials": self.trials,
            "master_seed": self.master_seed,
            "extra": dict(self.extra),
        }


@dataclass(frozen=True)
class TrialRecord:
    """One Monte-Carlo observation against its analytic center."""

    trial_index: int
    m: int
    observed: float
    center: float
    deviation: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "deviation", self.observed - self.center)


@dataclass(frozen=True)
class SummaryStats:
    """Moments and quantiles of a record batch.

    std_error is None for a single record (the sample deviation is
    undefined); quantiles use linear interpolation on the sorted values.
    """

    count: int
    mean: float
    std_error: float | None
    quantiles: tuple[float, float, float]
    max_abs_deviation: float


def summarize(records) -> SummaryStats:
    records = list(records)
    if not records:
        raise EmptyRecords("cannot summarize zero records")
    obs = np.array([r.observed for r in records])
    dev = np.array([r.deviation for r in records])
    se = float(obs.std(ddof=1) / math.sqrt(len(obs))) if len(obs) > 1 else None
    q01, q50, q99 = np.quantile(obs, [0.01, 0.5, 0.99])
    return SummaryStats(
        count=len(obs),
        mean=float(obs.mean()),
        std_error=se,
        quantiles=(float(q01), float(q50), float(q99)),
        max_abs_deviation=float(np.abs(dev).max()),
    )


@dataclass
class ExperimentResult:
    """CSV-ready rows plus the per-configuration summary and verdict."""

    experiment: str
    config: dict
    csv_header: tuple[str, ...]
    csv_rows: list[tuple]
    per_m_summary: list[dict]
    passed: bool
    records: list = field(default_factory=list, repr=False)

    def summary_json(self) -> dict:
        return {
            "experiment": self.experiment,
            "config": self.config,
            "per_m_summary": self.per_m_summary,
            "pass": self.passed,
        }


def _map_trials(fn, trials: int, threads: int) -> list:
    if threads <= 1:
        return [fn(t) for t in range(trials)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, range(trials)))


def _center_summary(m: int, stats: SummaryStats, center: float) -> dict:
    ok = None
    if stats.std_error is not None:
        ok = bool(abs(stats.mean - center) <= MEAN_SIGMAS * stats.std_error)
    return {
        "m": m,
        "count": stats.count,
        "mean": stats.mean,
        "std_error": stats.std_error,
        "center": center,
        "q01": stats.quantiles[0],
        "q50": stats.quantiles[1],
        "q99": stats.quantiles[2],
        "max_abs_deviation": stats.max_abs_deviation,
        "pass": ok,
    }


def run_fig1_surface(m_grid, d_grid) -> ExperimentResult:
    """Tabulate the volume-ratio concentration center over an (m, d) grid.

    Deterministic. The pass verdict checks the qualitative claims: every
    center is negative, centers do not decrease as m grows at fixed d, and
    do not increase as d grows at fixed m.
    """
    m_grid = [int(m) for m in m_grid]
    d_grid = [int(d) for d in d_grid]
    for m in m_grid:
        for d in d_grid:
            if d >= m or d < 1 or m < 2:
                raise BadShape(f"invalid grid point m={m}, d={d}")
    rows = []
    table = {}
    for m in m_grid:
        # Incremental sum over p reproduces volume_ratio_center bit-for-bit.
        acc = 0.0
        centers = {}
        log_m = math.log(m)
        for p in range(1, max(d_grid) + 1):
            acc += digamma((m - p + 1) / 2.0) + math.log(2.0) - log_m
            centers[p] = 0.5 * acc
        for d in d_grid:
            table[(m, d)] = centers[d]
            rows.append((m, d, centers[d]))
    negative = all(v < 0.0 for v in table.values())
    m_sorted = sorted(set(m_grid))
    d_sorted = sorted(set(d_grid))
    mono_m = all(
        table[(m_sorted[i], d)] <= table[(m_sorted[i + 1], d)]
        for d in d_sorted
        for i in range(len(m_sorted) - 1)
    )
    mono_d = all(
        table[(m, d_sorted[j])] >= table[(m, d_sorted[j + 1])]
        for m in m_sorted
        for j in range(len(d_sorted) - 1)
    )
    return ExperimentResult(
        experiment="fig1",
        config={"m_grid": m_grid, "d_grid": d_grid},
        csv_header=("m", "d", "center"),
        csv_rows=rows,
        per_m_summary=[
            {
                "points": len(rows),
                "all_negative": negative,
                "nondecreasing_in_m": mono_m,
                "nonincreasing_in_d": mono_d,
            }
        ],
        passed=bool(negative and mono_m and mono_d),
    )


def run_lemma1_concentration(cfg: ExperimentConfig, threads: int = 1) -> ExperimentResult:
    """Log volume ratios of a fixed parallelotope under fresh compressions.

    One arbitrary full-rank n x d matrix is drawn from stream 0 and held
    fixed; each trial draws an independent measurement matrix (stream
    1 + m_index * trials + trial) and records
    log(vol_d(compressed)/vol_d(original)). The per-m empirical mean must
    sit within MEAN_SIGMAS standard errors of the analytic center.
    """
    d, n = cfg.d, cfg.n
    if not 0 < d < n:
        raise BadShape(f"need 0 < d < n, got d={d}, n={n}")
    for m in cfg.m_values:
        if m <= d:
            raise BadShape(f"every m must exceed d={d}, got m={m}")
    if not cfg.m_values:
        raise BadShape("lemma1 needs at least one m value")
    base = SeedSpec(cfg.master_seed, 0)
    S = base.generator().standard_normal((n, d))
    log_vol_s = log_volume(S).log_value
    all_records: list[TrialRecord] = []
    rows: list[tuple] = []
    summaries: list[dict] = []
    for m_idx, m in enumerate(cfg.m_values):
        center = volume_ratio_center(m, d)

        def one(trial: int, m=m, m_idx=m_idx, center=center) -> TrialRecord:
            phi = sample_measurement(m, n, base.stream(1 + m_idx * cfg.trials + trial))
            observed = log_volume(compress(phi, S)).log_value - log_vol_s
            return TrialRecord(trial, m, observed, center)

        records = _map_trials(one, cfg.trials, threads)
        all_records.extend(records)
        rows.extend(
            (r.m, r.trial_index, r.observed, r.center, r.deviation)
            for r in records
        )
        summaries.append(_center_summary(m, summarize(records), center))
    passed = all(s["pass"] is not False for s in summaries)
    return ExperimentResult(
        experiment="lemma1",
        config=cfg.as_dict(),
        csv_header=("m", "trial", "log_ratio", "center", "deviation"),
        csv_rows=rows,
        per_m_summary=summaries,
        passed=passed,
        records=all_records,
    )


def run_bartlett_equivalence(cfg: ExperimentConfig, threads: int = 1) -> ExperimentResult:
    """Two-sample test: direct compressed-volume pipeline vs the chi-square
    oracle sampler.

    Pipeline (a) doubles the log volume ratio of a fixed S under fresh
    compressions (streams 1..trials); pipeline (b) draws the sum of log
    chi-square variates directly (streams trials+1..2*trials). The two laws
    are identical in theory, so the KS test must not reject at KS_ALPHA,
    the means must agree within MEAN_SIGMAS combined standard errors, and
    the variances within VAR_REL_TOL relative.
    """
    if len(cfg.m_values) != 1:
        raise BadShape("bartlett equivalence runs at a single m")
    m = cfg.m_values[0]
    d, n = cfg.d, cfg.n
    if not 0 < d < min(m, n):
        raise BadShape(f"need 0 < d < min(m, n), got d={d}, m={m}, n={n}")
    base = SeedSpec(cfg.master_seed, 0)
    S = base.generator().standard_normal((n, d))
    log_vol_s = log_volume(S).log_value

    def direct(trial: int) -> float:
        phi = sample_measurement(m, n, base.stream(1 + trial))
        return 2.0 * (log_volume(compress(phi, S)).log_value - log_vol_s)

    def oracle(trial: int) -> float:
        return bartlett_logdet_sample(m, d, base.stream(1 + cfg.trials + trial))

    direct_samples = np.array(_map_trials(direct, cfg.trials, threads))
    oracle_samples = np.array(_map_trials(oracle, cfg.trials, threads))
    ks = scipy_stats.ks_2samp(direct_samples, oracle_samples)
    mean_a, mean_b = float(direct_samples.mean()), float(oracle_samples.mean())
    var_a = float(direct_samples.var(ddof=1))
    var_b = float(oracle_samples.var(ddof=1))
    se_gap = math.sqrt(var_a / cfg.trials + var_b / cfg.trials)
    var_rel = abs(var_a - var_b) / var_b
    center = 2.0 * volume_ratio_center(m, d)
    passed = bool(
        ks.pvalue > KS_ALPHA
        and abs(mean_a - mean_b) <= MEAN_SIGMAS * se_gap
        and var_rel <= VAR_REL_TOL
    )
    rows = [("direct", t, v) for t, v in enumerate(direct_samples)]
    rows += [("bartlett", t, v) for t, v in enumerate(oracle_samples)]
    summary = {
        "m": m,
        "count": cfg.trials,
        "ks_statistic": float(ks.statistic),
        "ks_pvalue": float(ks.pvalue),
        "mean_direct": mean_a,
        "mean_bartlett": mean_b,
        "mean_gap_limit": MEAN_SIGMAS * se_gap,
        "var_direct": var_a,
        "var_bartlett": var_b,
        "var_rel_gap": var_rel,
        "center": center,
        "pass": passed,
    }
    return ExperimentResult(
        experiment="bartlett",
        config=cfg.as_dict(),
        csv_header=("pipeline", "trial", "sample"),
        csv_rows=rows,
        per_m_summary=[summary],
        passed=passed,
    )


def _draw_prescription(
    k: int, rng: np.random.Generator, theta_min: float, log_sine_floor: float
) -> AnglePrescription:
    """Angles i.i.d. uniform on (theta_min, pi/2], rejecting prescriptions
    whose log sine product falls below the floor."""
    for _ in range(_REJECTION_LIMIT):
        theta = rng.uniform(theta_min, math.pi / 2, size=k)
        if float(np.sum(np.log(np.sin(theta)))) >= log_sine_floor:
            return AnglePrescription(theta)
    raise RuntimeError(
        f"could not draw angles with log sine product >= {log_sine_floor} "
        f"after {_REJECTION_LIMIT} tries; raise theta_min or the floor"
    )


def run_theorem2_scatter(cfg: ExperimentConfig, threads: int = 1) -> ExperimentResult:
    """Log sine-product ratios for random-angle subspace pairs under
    compression.

    Each trial draws an angle prescription obeying the log-sine floor,
    builds a pair with exactly those principal angles, compresses both
    subspaces with one measurement matrix per angle set (shared across that
    set's pairs), and records the compressed-minus-original log sine
    product. The per-m mean must match the analytic center to within
    MEAN_SIGMAS standard errors.

    extra keys: log_sine_floor (default -5), theta_min (default 0.05),
    pairs_per_set (default 1), global_phi (default False: a fresh
    measurement matrix per angle set; True shares one per m).

    Stream layout per m block of (trials + 1) slots with stride
    2 + pairs_per_set: component 0 draws the prescription, component 1 the
    measurement matrix, components 2+j the pair constructions; the extra
    trailing slot holds the shared matrix in global mode.
    """
    k, n = cfg.k, cfg.n
    if not 0 < 2 * k <= n:
        raise BadShape(f"need n >= 2k, got n={n}, k={k}")
    if not cfg.m_values:
        raise BadShape("theorem2 needs at least one m value")
    floor = float(cfg.extra.get("log_sine_floor", -5.0))
    theta_min = float(cfg.extra.get("theta_min", 0.05))
    pairs_per_set = int(cfg.extra.get("pairs_per_set", 1))
    global_phi = bool(cfg.extra.get("global_phi", False))
    if pairs_per_set < 1:
        raise BadShape("pairs_per_set must be >= 1")
    if not 0.0 <= theta_min < math.pi / 2:
        raise BadShape(f"theta_min must lie in [0, pi/2), got {theta_min}")
    for m in cfg.m_values:
        if m < 2 * k + 1:
            raise BadShape(f"every m must exceed 2k={2 * k}, got m={m}")
    stride = 2 + pairs_per_set
    base = SeedSpec(cfg.master_seed, 0)
    all_records: list[TrialRecord] = []
    rows: list[tuple] = []
    summaries: list[dict] = []
    for m_idx, m in enumerate(cfg.m_values):
        center = sine_product_center(m, k)
        block = 1 + m_idx * (cfg.trials + 1) * stride
        shared_phi = (
            sample_measurement(m, n, base.stream(block + cfg.trials * stride + 1))
            if global_phi
            else None
        )

        def one(trial: int, m=m, block=block, center=center,
                shared_phi=shared_phi) -> list[TrialRecord]:
            slot = block + trial * stride
            rng = base.stream(slot).generator()
            prescription = _draw_prescription(k, rng, theta_min, floor)
            if shared_phi is not None:
                phi = shared_phi
            else:
                phi = sample_measurement(m, n, base.stream(slot + 1))
            out = []
            for j in range(pairs_per_set):
                X, Y = subspace_pair_with_angles(
                    n, k, prescription, base.stream(slot + 2 + j)
                )
                original = log_product_principal_sines(X, Y)
                cx = Subspace(compress(phi, X.basis))
                cy = Subspace(compress(phi, Y.basis))
                compressed = log_product_principal_sines(cx, cy)
                rec = TrialRecord(
                    trial * pairs_per_set + j, m, compressed - original, center
                )
                out.append((rec, original, compressed))
            return out

        batches = _map_trials(one, cfg.trials, threads)
        records = []
        for batch in batches:
            for rec, original, compressed in batch:
                records.append(rec)
                rows.append((m, k, rec.trial_index, original, compressed, center))
        all_records.extend(records)
        summaries.append(_center_summary(m, summarize(records), center))
    passed = all(s["pass"] is not False for s in summaries)
    return ExperimentResult(
        experiment="theorem2",
        config=cfg.as_dict(),
        csv_header=(
            "m", "k", "trial", "log_sines_original", "log_sines_compressed",
            "center",
        ),
        csv_rows=rows,
        per_m_summary=summaries,
        passed=passed,
        records=all_records,
    )


def run_perturbation_check(cfg: ExperimentConfig, threads: int = 1) -> ExperimentResult:
    """Deterministic perturbation inequalities on random unit-norm matrices.

    Each trial rejection-samples a unit-norm-column n x d matrix S inside a
    random k-dimensional subspace until its volume exceeds the floor C_s,
    perturbs each column by at most delta0 within the same subspace, and
    verifies three facts: the singular values move by at most
    sqrt(d) * delta0, the volume of S stays inside the multiplicative
    envelope around the perturbed volume, and the minimum pairwise column
    distance exceeds 1 - sqrt(1 - C_s^2). Each trial uses stream 1 + trial.

    extra keys: C_s (default 0.3), delta0 (default 1e-3), delta_s2
    (default half its admissible ceiling), C_phi (default 1.0, unused by
    the checks but recorded in the envelope).
    """
    d, k, n = cfg.d, cfg.k, cfg.n
    if not 1 < d <= k < n:
        raise BadShape(f"need 1 < d <= k < n, got d={d}, k={k}, n={n}")
    c_s = float(cfg.extra.get("C_s", 0.3))
    delta0 = float(cfg.extra.get("delta0", 1e-3))
    c_phi = float(cfg.extra.get("C_phi", 1.0))
    c1 = c_s * (d / (d - 1.0)) ** (-1.0 / (2.0 * (d - 1.0)))
    delta_s2 = float(cfg.extra.get("delta_s2", 0.5 * c1 / math.sqrt(d)))
    env = perturbation_envelope(c_s, d, delta_s2, c_phi, delta0)
    lo, hi = env.volume_band()
    sv_bound = math.sqrt(d) * delta0
    dist_floor = 1.0 - math.sqrt(1.0 - c_s * c_s)
    base = SeedSpec(cfg.master_seed, 0)

    def one(trial: int) -> tuple:
        rng = base.stream(1 + trial).generator()
        frame = haar_frame(n, k, rng)
        for _ in range(_REJECTION_LIMIT):
            S = column_normalize(frame @ rng.standard_normal((k, d)))
            lv = log_volume(S)
            if lv.value > c_s:
                break
        else:
            raise RuntimeError(
                f"no volume above C_s={c_s} in {_REJECTION_LIMIT} draws"
            )
        directions = rng.standard_normal((k, d))
        directions /= np.linalg.norm(directions, axis=0)
        radii = rng.uniform(0.0, delta0, size=d)
        perturbed = S + frame @ (directions * radii)
        sigma = np.linalg.svd(S, compute_uv=False)
        tau = np.linalg.svd(perturbed, compute_uv=False)
        max_gap = float(np.max(np.abs(sigma - tau)))
        vol_s = lv.value
        vol_q = log_volume(perturbed).value
        vol_lo, vol_hi = lo * vol_q, hi * vol_q
        min_dist = min_pairwise_column_distance(S)
        ok = (
            max_gap <= sv_bound
            and vol_lo <= vol_s <= vol_hi
            and min_dist > dist_floor
        )
        return (trial, max_gap, sv_bound, vol_lo, vol_s, vol_hi, min_dist,
                dist_floor, ok)

    rows = _map_trials(one, cfg.trials, threads)
    violations = [r for r in rows if not r[-1]]
    passed = not violations
    summary = {
        "trials": cfg.trials,
        "violations": len(violations),
        "violating_trials": [r[0] for r in violations],
        "C1": env.C1,
        "C2": env.C2,
        "delta0": delta0,
        "sv_bound": sv_bound,
        "distance_floor": dist_floor,
        "pass": passed,
    }
    return ExperimentResult(
        experiment="perturbation",
        config=cfg.as_dict(),
        csv_header=(
            "trial", "max_sv_gap", "bound", "vol_lo", "vol", "vol_hi",
            "min_col_dist", "floor", "pass",
        ),
        csv_rows=rows,
        per_m_summary=[summary],
        passed=passed,
    )
