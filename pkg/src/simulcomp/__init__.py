"""Joint Dunnett-type simultaneous inference for sex-by-dose designs."""

__version__ = "0.1.0"

from .contrasts import ContrastMatrix, dunnett_contrasts, joint_matrix, pooled_contrasts, stratified_block_matrix
from .dataset import Dataset, Observation, cell_structure, embedded_liver_dataset, load_csv
from .inference import InferenceResult, joint_dunnett, separate_dunnett
from .linmodel import anova_two_way, fit_cell_means
from .mvt import (adjusted_p_values, contrast_covariance, equicoordinate_quantile, mvn_rectangle_prob,
                  mvt_rectangle_prob)
from .plotting import render_ci_plot
from .sim import Scenario, run_simulation, scenario_from_paper

__all__ = [
    "ContrastMatrix", "Dataset", "InferenceResult", "Observation", "Scenario",
    "adjusted_p_values", "anova_two_way", "cell_structure", "contrast_covariance",
    "dunnett_contrasts", "embedded_liver_dataset", "equicoordinate_quantile", "fit_cell_means",
    "joint_dunnett", "joint_matrix", "load_csv", "mvn_rectangle_prob", "mvt_rectangle_prob",
    "pooled_contrasts", "render_ci_plot", "run_simulation", "scenario_from_paper",
    "separate_dunnett", "stratified_block_matrix",
]
