"""Adaptive projection density estimation for arc-censored circular data.

An angle of interest on the circle is only observed when it falls inside
a random arc; otherwise just the arc itself is reported.  This package
estimates the angle's density from such samples by least-squares
projection on trigonometric sieves, with a penalized, fully data-driven
choice of the sieve order, and ships the simulation scenarios and risk
harness used to benchmark it.
"""

from .circle import (
    TWO_PI,
    CensoredObservation,
    CircularArc,
    arc_length,
    complement,
    contains,
    normalize,
    normalize_array,
)
from .estimator import (
    CensoredSample,
    DensityEstimate,
    FourierCoefficients,
    GramMatrix,
    IllConditionedModelError,
    MomentVector,
    build_gram,
    build_moments,
    contrast_value,
    empirical_sigma,
    evaluate_density,
    solve_coefficients,
    truncate_estimate,
)
from .evaluation import (
    FitImpossibleError,
    MiseReport,
    MiseRow,
    OracleRow,
    OracleScan,
    VonMisesFit,
    bessel_ratio,
    concentration_from_resultant,
    fit_von_mises,
    fixed_m_oracle_scan,
    integrate_periodic,
    integrated_squared_error,
    population_gram,
    quadrature_grid,
    run_mise,
)
from .selection import (
    EstimationImpossibleError,
    KappaCalibration,
    ModelGrid,
    ModelRecord,
    SelectionTrace,
    adaptive_estimate,
    calibrate_kappa,
    inverse_op_norm,
    penalty,
    scan_models,
    select_model,
)
from .simulate import (
    Mixture,
    ScenarioSpec,
    UniformArc,
    VonMises,
    generate_sample,
    make_rng,
    mean_censoring_stats,
    offset_window_scenario,
    benchmark_scenario,
    sample,
    von_mises_density,
)

__version__ = "0.1.0"

__all__ = [
    "TWO_PI",
    "CensoredObservation",
    "CircularArc",
    "arc_length",
    "complement",
    "contains",
    "normalize",
    "normalize_array",
    "CensoredSample",
    "DensityEstimate",
    "FourierCoefficients",
    "GramMatrix",
    "IllConditionedModelError",
    "MomentVector",
    "build_gram",
    "build_moments",
    "contrast_value",
    "empirical_sigma",
    "evaluate_density",
    "solve_coefficients",
    "truncate_estimate",
    "EstimationImpossibleError",
    "KappaCalibration",
    "ModelGrid",
    "ModelRecord",
    "SelectionTrace",
    "adaptive_estimate",
    "calibrate_kappa",
    "inverse_op_norm",
    "penalty",
    "scan_models",
    "select_model",
    "Mixture",
    "ScenarioSpec",
    "UniformArc",
    "VonMises",
    "generate_sample",
    "make_rng",
    "mean_censoring_stats",
    "offset_window_scenario",
    "benchmark_scenario",
    "sample",
    "von_mises_density",
    "FitImpossibleError",
    "MiseReport",
    "MiseRow",
    "OracleRow",
    "OracleScan",
    "VonMisesFit",
    "bessel_ratio",
    "concentration_from_resultant",
    "fit_von_mises",
    "fixed_m_oracle_scan",
    "integrate_periodic",
    "integrated_squared_error",
    "population_gram",
    "quadrature_grid",
    "run_mise",
    "__version__",
]
