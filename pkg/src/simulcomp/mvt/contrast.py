"""Standardized contrast statistics and single-step max-T inference."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq
from scipy.special import ndtri, stdtrit

from ..contrasts import ContrastMatrix
from ..exceptions import ConvergenceError, ValidationError
from .integrate import DEFAULT_MAX_POINTS, DEFAULT_TOL, check_correlation, mvt_rectangle_prob

ALTERNATIVES = ("two-sided", "less", "greater")


@dataclass(frozen=True)
class ContrastSummary:
    labels: tuple[str, ...]
    estimates: np.ndarray
    std_errors: np.ndarray
    t_stats: np.ndarray
    corr: np.ndarray
    df: int

    def __len__(self):
        return len(self.labels)


def contrast_covariance(model, K: ContrastMatrix) -> ContrastSummary:
    """Estimates, standard errors and correlation of ``K @ beta``.

    Cell means are independent with variances ``sigma2 / n_j``, so
    ``cov(K beta) = sigma2 * K diag(1/n) K'``.
    """
    C = K.coefficients
    beta = np.asarray(model.beta, dtype=float)
    if C.shape[1] != beta.shape[0]:
        raise ValidationError(f"contrast matrix has {C.shape[1]} columns but the model has "
                              f"{beta.shape[0]} cells")
    if model.resid_df < 1:
        raise ValidationError("model has no residual degrees of freedom")
    cov = model.sigma2 * (C / model.counts) @ C.T
    var = np.diag(cov).copy()
    for label, v in zip(K.row_labels, var):
        if not v > 0:
            raise ValidationError(f"contrast {label!r} has zero variance")
    se = np.sqrt(var)
    corr = np.clip(cov / np.outer(se, se), -1.0, 1.0)
    corr = 0.5 * (corr + corr.T)
    np.fill_diagonal(corr, 1.0)
    est = C @ beta
    return ContrastSummary(K.row_labels, est, se, est / se, corr, int(model.resid_df))


def _t_quantile(p: float, df: float) -> float:
    return float(ndtri(p)) if np.isinf(df) else float(stdtrit(df, p))


def _max_t_prob(q, corr, df, two_sided, tol, max_points, seed):
    m = corr.shape[0]
    lower = np.full(m, -q if two_sided else -np.inf)
    return mvt_rectangle_prob(lower, np.full(m, q), corr, df, tol=tol, max_points=max_points, seed=seed)


def equicoordinate_quantile(corr, df: float, level: float = 0.95, two_sided: bool = True,
                            tol: float = DEFAULT_TOL, seed: int = 0,
                            max_points: int = DEFAULT_MAX_POINTS, maxiter: int = 100) -> float:
    """Common bound ``q`` with ``P(max_i |T_i| <= q) = level`` (or ``max_i T_i`` one-sided).

    The root is bracketed between the univariate quantile and the
    Bonferroni bound, then refined with Brent's method. Every probability
    evaluation reuses the same seed, so the target function is a fixed
    deterministic map of ``q``.
    """
    if not 0.0 < level < 1.0:
        raise ValidationError(f"level must lie in (0, 1), got {level}")
    R = check_correlation(corr)
    m = R.shape[0]
    tail = 1.0 - level
    if two_sided:
        lo, hi = _t_quantile(1 - tail / 2, df), _t_quantile(1 - tail / (2 * m), df)
    else:
        lo, hi = _t_quantile(level, df), _t_quantile(1 - tail / m, df)

    def f(q):
        return _max_t_prob(q, R, df, two_sided, tol / 4, max_points, seed).value - level

    if m == 1:
        return lo
    f_lo = f(lo)
    if f_lo >= 0:
        return lo
    f_hi = f(hi)
    widen = 0
    while f_hi < 0:
        # Bonferroni holds exactly; a negative value here is integration noise
        widen += 1
        if widen > 5:
            raise ConvergenceError("could not bracket the equicoordinate quantile", (lo, hi))
        lo, hi = hi, hi + 0.05 * widen
        f_hi = f(hi)
    try:
        return float(brentq(f, lo, hi, xtol=1e-7, maxiter=maxiter))
    except RuntimeError as exc:
        raise ConvergenceError(f"quantile search did not converge: {exc}", (lo, hi)) from None


def adjusted_p_values(summary: ContrastSummary, alternative: str = "two-sided",
                      tol: float = DEFAULT_TOL, seed: int = 0,
                      max_points: int = DEFAULT_MAX_POINTS, full_output: bool = False):
    """Single-step max-T adjusted p-values.

    For the two-sided case ``p_i = 1 - P(max_j |T_j| <= |t_i|)`` under the
    central multivariate t with the summary's correlation and df.

    Returns
    -------
    p : ndarray
        Adjusted p-values in ``[0, 1]``.
    err : ndarray
        Integration standard errors; only when ``full_output`` is true.
    """
    if alternative not in ALTERNATIVES:
        raise ValidationError(f"alternative must be one of {ALTERNATIVES}, got {alternative!r}")
    R = check_correlation(summary.corr)
    m = R.shape[0]
    t = np.asarray(summary.t_stats, dtype=float)
    p = np.empty(m)
    err = np.empty(m)
    cache = {}
    for i, ti in enumerate(t):
        if alternative == "two-sided":
            key = abs(ti)
            bounds = (np.full(m, -key), np.full(m, key))
        elif alternative == "greater":
            key = ti
            bounds = (np.full(m, -np.inf), np.full(m, key))
        else:
            key = ti
            bounds = (np.full(m, key), np.full(m, np.inf))
        if key not in cache:
            res = mvt_rectangle_prob(*bounds, R, summary.df, tol=tol, max_points=max_points, seed=seed)
            cache[key] = (min(max(1.0 - res.value, 0.0), 1.0), res.mc_error)
        p[i], err[i] = cache[key]
    return (p, err) if full_output else p
