"""abcintlik: integrated likelihoods for interest parameters, approximated by
the ratio of density estimates of the ABC posterior and the prior."""

from .backend import active_backend, use_backend
from .core import (
    BudgetExhaustedError,
    Dataset,
    DegenerateSampleError,
    GenerativeModel,
    NumericalError,
    ParameterPoint,
    SummaryVector,
    euclidean_distance,
    extract_psi,
    rng_from,
)
from .kde import KdeEstimate, kde_grid, kde_pdf, mse_optimal_bandwidth, silverman_bandwidth
from .likelihood import (
    LikelihoodCurve,
    abc_integrated_likelihood,
    normalize_curve,
    ratio_error_diagnostics,
)
from .samplers import (
    AbcConfig,
    AbcDraws,
    PilotCalibration,
    abc_mcmc_movestay,
    abc_mcmc_retry,
    calibrate_tolerance,
    pool_chains,
    prior_psi_sample,
    rejection_abc,
)

__version__ = "0.1.0"

__all__ = [
    "AbcConfig",
    "AbcDraws",
    "BudgetExhaustedError",
    "Dataset",
    "DegenerateSampleError",
    "GenerativeModel",
    "KdeEstimate",
    "LikelihoodCurve",
    "NumericalError",
    "ParameterPoint",
    "PilotCalibration",
    "SummaryVector",
    "abc_integrated_likelihood",
    "abc_mcmc_movestay",
    "abc_mcmc_retry",
    "active_backend",
    "calibrate_tolerance",
    "euclidean_distance",
    "extract_psi",
    "kde_grid",
    "kde_pdf",
    "normalize_curve",
    "mse_optimal_bandwidth",
    "pool_chains",
    "prior_psi_sample",
    "ratio_error_diagnostics",
    "rejection_abc",
    "rng_from",
    "silverman_bandwidth",
    "use_backend",
    "__version__",
]
