"""Volume-preserving random compression of linear subspaces.

A library and CLI for the geometry of subspace parallelotopes (volumes,
principal angles, sine products), the digamma-based concentration centers
and measurement bounds that govern their behavior under Gaussian random
compression, and seeded Monte-Carlo experiments verifying the two against
each other.
"""

from .errors import (
    BadAngles,
    BadShape,
    DimensionMismatch,
    DomainError,
    EmptyRecords,
    GrassvolError,
    MatrixFormatError,
    NotDisjoint,
    RankDeficient,
    ZeroColumn,
)
from .geometry import (
    LogVolume,
    PrincipalAngleSet,
    Subspace,
    column_normalize,
    juxtapose,
    log_product_principal_sines,
    log_volume,
    min_pairwise_column_distance,
    principal_angles,
    residual_norm,
)
from .measurement import (
    AnglePrescription,
    MeasurementMatrix,
    SeedSpec,
    bartlett_logdet_sample,
    compress,
    haar_frame,
    random_subspace,
    sample_measurement,
    subspace_pair_with_angles,
)
from .theory import (
    BoundParams,
    PerturbationEnvelope,
    check_volume_embedding,
    digamma,
    lemma1_tail,
    log_covering_cardinality,
    measurement_bound_corollary1,
    measurement_bound_davies,
    measurement_bound_theorem1,
    order_estimate,
    perturbation_envelope,
    sine_product_center,
    volume_ratio_center,
    volume_ratio_center_asymptotic,
)
from .experiments import (
    ExperimentConfig,
    ExperimentResult,
    SummaryStats,
    TrialRecord,
    run_bartlett_equivalence,
    run_fig1_surface,
    run_lemma1_concentration,
    run_perturbation_check,
    run_theorem2_scatter,
    summarize,
)

__version__ = "0.1.0"
