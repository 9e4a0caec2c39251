"""Transient lattice random walks: local times and their limit laws.

The package simulates finite-support random walks on Z^d, computes
local-time functionals (range, power sums, visit-multiplicity counts),
estimates the escape probability by three independent methods, evaluates
the closed-form limit predictions, and cross-checks everything against an
exhaustive small-horizon oracle.
"""

from .errors import (
    BadGamma,
    BadParam,
    BudgetExceeded,
    ConfigError,
    DegenerateDimension,
    DuplicateAtom,
    FloatLawRejected,
    HorizonTooShort,
    NonPositiveValue,
    NotALaw,
    NotAProbability,
    ResourceLimit,
    SuspectedRecurrence,
    TooFewPoints,
    UnknownFamily,
    WalklabError,
)
from .gamma import (
    GammaEstimate,
    PmfField,
    ReturnLaw,
    TailDiagnostic,
    green_at_origin,
    mc_escape,
    pmf_evolve,
    return_sequence,
    return_tail,
    taboo_gamma_estimate,
    taboo_survival,
)
from .harness import (
    ChiSquareResult,
    ExperimentReport,
    FitResult,
    GeometricLaw,
    auto_gamma,
    fit_exponent,
    geometric_chi_square,
    run_geometric,
    run_slln,
    tv_distance,
    variance_envelope,
    variance_scan,
)
from .oracle import ExactSummary, enumerate_paths, exact_return_law, exact_zn_law
from .path import (
    CheckpointSeries,
    LocalTimeField,
    QHistogram,
    l_alpha,
    q_histogram,
    sample_visited_local_time,
    simulate,
    simulate_series,
)
from .rng import generator, mix64, replica_generator
from .steps import (
    StepLaw,
    bernoulli,
    builtin,
    deterministic,
    drifted_srw,
    law_from_json,
    law_to_json,
    make_law,
    mean_and_second_moment,
    sample_step,
    srw,
    validate,
)
from .theory import (
    Prediction,
    expected_qj_formula,
    geometric_pmf,
    green_cross_sum,
    moment_limit,
    qj_generating,
    qj_limit,
    sup_pmf,
    sup_pmf_sequence,
)

__version__ = "0.1.0"
