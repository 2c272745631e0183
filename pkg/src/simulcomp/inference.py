"""End-to-end joint and per-sex Dunnett analyses."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .contrasts import ContrastMatrix, dunnett_contrasts, joint_matrix, stratum_size_weights
from .dataset import Dataset
from .exceptions import ConvergenceError, SimulcompError, ValidationError
from .linmodel import CellMeansModel, fit_cell_means
from .mvt.contrast import ALTERNATIVES, adjusted_p_values, contrast_covariance, equicoordinate_quantile
from .mvt.integrate import DEFAULT_TOL


@dataclass(frozen=True)
class InferenceRow:
    label: str
    estimate: float
    std_error: float
    t_stat: float
    p_adjusted: float
    ci_lower: float
    ci_upper: float
    p_error: float = 0.0

    def excludes_zero(self) -> bool:
        return self.ci_lower > 0 or self.ci_upper < 0


@dataclass(frozen=True)
class InferenceResult:
    rows: tuple[InferenceRow, ...]
    quantile_used: float
    alpha: float
    alternative: str
    df: int
    seed: int
    tolerance: float
    corr: np.ndarray = field(repr=False, compare=False, default=None)

    def __len__(self):
        return len(self.rows)

    def __getitem__(self, label: str) -> InferenceRow:
        for r in self.rows:
            if r.label == label:
                return r
        raise KeyError(label)

    @property
    def labels(self) -> list[str]:
        return [r.label for r in self.rows]

    @property
    def p_values(self) -> np.ndarray:
        return np.array([r.p_adjusted for r in self.rows])

    def to_dict(self) -> dict:
        """Machine-readable form; infinite one-sided bounds become ``None``."""
        def num(x):
            return None if not math.isfinite(x) else float(x)
        return {
            "rows": [{"label": r.label, "estimate": r.estimate, "se": r.std_error, "t": r.t_stat,
                      "p_adj": r.p_adjusted, "ci": [num(r.ci_lower), num(r.ci_upper)]}
                     for r in self.rows],
            "q": self.quantile_used,
            "alpha": self.alpha,
            "df": self.df,
            "seed": self.seed,
        }


def _stage(name, fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except ConvergenceError as exc:
        raise ConvergenceError(f"{name}: {exc}", exc.bracket) from exc
    except SimulcompError as exc:
        raise type(exc)(f"{name}: {exc}") from exc


def simultaneous_inference(model: CellMeansModel, K: ContrastMatrix, alpha: float = 0.05,
                           alternative: str = "two-sided", seed: int = 0,
                           tol: float = DEFAULT_TOL) -> InferenceResult:
    """Max-T adjusted p-values and simultaneous intervals for the rows of ``K``."""
    if not 0 < alpha < 1:
        raise ValidationError(f"alpha must lie in (0, 1), got {alpha}")
    if alternative not in ALTERNATIVES:
        raise ValidationError(f"alternative must be one of {ALTERNATIVES}")
    summary = _stage("covariance", contrast_covariance, model, K)
    p, perr = _stage("adjusted p-values", adjusted_p_values, summary, alternative, tol=tol, seed=seed,
                     full_output=True)
    two_sided = alternative == "two-sided"
    q = _stage("quantile", equicoordinate_quantile, summary.corr, summary.df, 1 - alpha,
               two_sided=two_sided, tol=tol, seed=seed)
    rows = []
    for i, label in enumerate(summary.labels):
        est, se = float(summary.estimates[i]), float(summary.std_errors[i])
        lo = est - q * se if alternative != "less" else -math.inf
        hi = est + q * se if alternative != "greater" else math.inf
        rows.append(InferenceRow(label, est, se, float(summary.t_stats[i]), float(p[i]), lo, hi,
                                 float(perr[i])))
    return InferenceResult(tuple(rows), float(q), alpha, alternative, summary.df, seed, tol,
                           corr=summary.corr)


def joint_dunnett(ds: Dataset, response: str = "rel_liver", control: str | None = None,
                  alpha: float = 0.05, alternative: str = "two-sided", weights=None,
                  seed: int = 0, tol: float = DEFAULT_TOL) -> InferenceResult:
    """Female, male and pooled many-to-one comparisons tested as one family.

    ``weights`` sets the pooling across sexes: ``None`` for equal weights,
    ``"cell_size"`` for weights proportional to each sex's sample size, or
    an explicit sequence summing to one.
    """
    model = _stage("model", fit_cell_means, ds, response)
    if isinstance(weights, str):
        if weights != "cell_size":
            raise ValidationError(f"unknown weighting {weights!r}")
        weights = stratum_size_weights(model.counts, len(ds.sex_levels))
    du = _stage("contrasts", dunnett_contrasts, ds.dose_levels, control)
    K = _stage("contrasts", joint_matrix, du, ds.sex_levels, weights)
    return simultaneous_inference(model, K, alpha, alternative, seed, tol)


def separate_dunnett(ds: Dataset, sex: str, response: str = "rel_liver", control: str | None = None,
                     alpha: float = 0.05, alternative: str = "two-sided", seed: int = 0,
                     tol: float = DEFAULT_TOL) -> InferenceResult:
    """Dunnett test within one sex, refitting the model (and variance) on that subset."""
    sub = _stage("subset", ds.subset, sex)
    model = _stage("model", fit_cell_means, sub, response)
    du = _stage("contrasts", dunnett_contrasts, sub.dose_levels, control)
    K = ContrastMatrix(du.coefficients, [f"{sex}:{lb}" for lb in du.row_labels], du.col_labels)
    return simultaneous_inference(model, K, alpha, alternative, seed, tol)


def format_p(p: float) -> str:
    """Human rendering of a p-value: two decimals, one significant digit below 0.01."""
    if p < 1e-4:
        return "<0.0001"
    if p < 0.01:
        digits = -math.floor(math.log10(p))
        r = round(p, digits)
        return "0.01" if r >= 0.01 else f"{r:.{digits}f}"
    return f"{p:.2f}"
