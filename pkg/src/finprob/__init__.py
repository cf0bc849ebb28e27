"""Finite probability spaces, Markov kernels up to almost-sure equality,
conditional expectation as idempotent projection, and verified martingale
convergence, with exact-rational and float arithmetic modes."""

from .errors import (
    ConfigError,
    ConfigParseError,
    DimMismatchError,
    FinprobError,
    InvalidFiltrationError,
    NegativeWeightError,
    NotAChainError,
    NotAMartingaleError,
    NotComparableError,
    NotIdempotentError,
    NotLipschitzError,
    NotMeasurePreservingError,
    NotMonotoneError,
    NotOrthonormalError,
    SizeMismatchError,
    SpaceMismatchError,
    SumNotOneError,
    TooLargeError,
)
from .numerics import EXACT, FLOAT_DEFAULT, NumericMode, float_mode, nth_root, rational_mode
from .spaces import (
    ProbSpace,
    RandomVar,
    VecRandomVar,
    as_equal_rv,
    as_equal_vec_rv,
    constant_rv,
    expectation,
    indicator,
    ln_norm,
    make_space,
    point_space,
    uniform_space,
)
from .partitions import (
    Partition,
    all_partitions,
    as_measurable_wrt,
    bell_number,
    complete_partition,
    join_partitions,
    measurable_wrt,
    meet_partitions,
)
from .kernels import (
    Coupling,
    Kernel,
    as_equal_kernels,
    bayes_inverse,
    canonicalize,
    coarsening_kernel,
    compose,
    coupling_from_kernel,
    deterministic_from_function,
    identity_kernel,
    is_as_deterministic,
    is_measure_preserving,
    kernel_from_coupling,
    kernel_from_measure,
)
from .idempotents import (
    GaloisReport,
    IdempotentKernel,
    Splitting,
    cond_exp_kernel,
    order_witnesses,
    galois_roundtrips,
    idem_leq,
    inf_idempotents,
    invariant_partition,
    invariant_partition_bruteforce,
    is_idempotent,
    split,
    sup_idempotents,
)
from .operators import (
    adjointness_defect,
    apply_pullback,
    bochner_norm,
    cond_expectation,
    inner_product,
    lipschitz_check,
    pullback_matrix,
    value_norm,
    vector_cond_expectation,
    vector_pullback,
)
from .metrics import (
    ConvergenceReport,
    check_convergence,
    composition_continuity_probe,
    homeomorphism_check,
    limit_is_idempotent,
    one_sided_distance,
    operator_pointwise_distances,
    report_from_distances,
    two_sided_distance,
)
from .martingales import (
    DECREASING,
    INCREASING,
    Filtration,
    Martingale,
    NoncauchyDiagnostics,
    bochner_levy_report,
    dyadic_filtration,
    dyadic_partition,
    dyadic_space,
    filtration_limit,
    is_martingale,
    levi_property_check,
    levy_report,
    martingale_from_terminal,
    nonintegrable_example,
    preserves_optima_check,
)
from .euclidean import (
    PointwiseConvergenceReport,
    Projector,
    Subspace,
    TruncationReport,
    banach_counterexample,
    chain_inf,
    chain_sup,
    closest_point_defect,
    colimit_seminorm,
    levi_down_demo,
    levi_up_demo,
    orthogonal_projector,
    projector_image,
    projector_leq,
    truncation_maps,
)

__version__ = "0.1.0"
