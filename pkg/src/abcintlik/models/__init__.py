"""The four reference models, each a :class:`~abcintlik.core.GenerativeModel`
bundled with its analytic or oracle partial likelihoods."""

from .gk import GkModel, gk_quantile, quantile_transform
from .matched_pairs import MatchedPairsModel
from .poisson_ratio import PoissonRatioModel
from .semipar_gp import SemiparGpModel, gls_estimate, gp_covariance

__all__ = [
    "GkModel",
    "MatchedPairsModel",
    "PoissonRatioModel",
    "SemiparGpModel",
    "gk_quantile",
    "gls_estimate",
    "gp_covariance",
    "quantile_transform",
]
