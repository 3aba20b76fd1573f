"""Sampling-rate lower bounds for approximate sparsity-pattern recovery."""

__version__ = "0.1.0"

from .bounds import (
    BoundCurve,
    BoundId,
    ImplicitSolveReport,
    alpha_curve,
    best_lower,
    c1_test,
    evaluate_bound,
    p2_noiseless_iid,
    p3_general,
    p4_iid,
    p5_gaussian,
    p6_entropy,
    p7_shape,
    p8_shape,
    s_cor_thm2,
    s_noiseless_simple,
    source_at_snr,
    t1_noiseless,
    t2_genie,
    t3_noiseless_iid,
    t4_genie_iid,
)
from .distributions import (
    AccuracyError,
    DistributionSpec,
    Gaussian,
    Moments,
    PointMass,
    SlicedGaussian,
    TruncationResult,
    Uniform,
    decay_rate,
    moments,
    q_function,
    q_inverse,
    sample_values,
    scale_to_power,
    truncate,
    truncate_oracle,
)
from .montecarlo import (
    BudgetError,
    MCConfig,
    MCEstimate,
    covering_bracket,
    det_power,
    mp_logdet,
    n_tilde,
    power_ratio_scan,
    rank_deficiency,
)
from .ratefun import (
    SourceParams,
    binary_entropy,
    delta,
    info_G,
    info_V,
    rate_R,
    rate_R_hamming,
    source_functionals,
    xi,
)
from .simulate import (
    MultipleMinimalSupportsError,
    SimConfig,
    SimOutcome,
    SimSummary,
    draw_source,
    exhaustive_ml,
    rate_sharing_recover,
    run_experiment,
    sample,
    success_rate,
    support_distortion,
)
