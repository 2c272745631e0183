"""Multivariate normal / t rectangle probabilities and max-T inference."""

from .contrast import ContrastSummary, adjusted_p_values, contrast_covariance, equicoordinate_quantile
from .integrate import ProbResult, check_correlation, mvn_rectangle_prob, mvt_rectangle_prob
from .special import f_cdf, f_sf, std_normal_cdf, student_t_cdf, student_t_sf

__all__ = [
    "ContrastSummary", "ProbResult", "adjusted_p_values", "check_correlation", "contrast_covariance",
    "equicoordinate_quantile", "f_cdf", "f_sf", "mvn_rectangle_prob", "mvt_rectangle_prob",
    "std_normal_cdf", "student_t_cdf", "student_t_sf",
]
