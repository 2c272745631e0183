"""Adaptive-quadrature reference values for low-dimensional rectangle probabilities.

Deliberately independent of simulcomp: only scipy.integrate and scipy.stats.
Each function returns ``(value, abserr)``.
"""

import numpy as np
from scipy import integrate, stats

EPS = 1e-11


def mvn_equicorrelated(lower, upper, rho):
    """P(lower <= Z <= upper), Z equicorrelated with rho >= 0, via the shared factor."""
    lower, upper = np.asarray(lower, float), np.asarray(upper, float)
    r, s = np.sqrt(rho), np.sqrt(1 - rho)

    def f(w):
        return stats.norm.pdf(w) * np.prod(stats.norm.cdf((upper - r * w) / s)
                                           - stats.norm.cdf((lower - r * w) / s))

    return integrate.quad(f, -np.inf, np.inf, epsabs=EPS, epsrel=EPS, limit=200)


def mvt_equicorrelated(lower, upper, rho, df):
    """Chi-scale mixture of :func:`mvn_equicorrelated`, as a 2-d integral."""
    lower, upper = np.asarray(lower, float), np.asarray(upper, float)
    r, s = np.sqrt(rho), np.sqrt(1 - rho)
    chi = stats.chi(df)

    def f(w, v):
        sc = v / np.sqrt(df)
        return chi.pdf(v) * stats.norm.pdf(w) * np.prod(
            stats.norm.cdf((upper * sc - r * w) / s) - stats.norm.cdf((lower * sc - r * w) / s))

    lo, hi = chi.ppf(1e-13), chi.ppf(1 - 1e-13)
    return integrate.dblquad(f, lo, hi, -np.inf, np.inf, epsabs=1e-10, epsrel=1e-10)


def mvn_general(lower, upper, corr):
    """Nested quadrature for m <= 3 with an arbitrary positive definite correlation."""
    lower, upper = np.asarray(lower, float), np.asarray(upper, float)
    R = np.asarray(corr, float)
    m = len(lower)
    if m == 1:
        v = stats.norm.cdf(upper[0]) - stats.norm.cdf(lower[0])
        return v, 1e-16
    if m == 2:
        rho = R[0, 1]
        s = np.sqrt(1 - rho ** 2)

        def f(x):
            return stats.norm.pdf(x) * (stats.norm.cdf((upper[1] - rho * x) / s)
                                        - stats.norm.cdf((lower[1] - rho * x) / s))

        return integrate.quad(f, lower[0], upper[0], epsabs=EPS, epsrel=EPS, limit=200)
    # m == 3: integrate the (x1, x2) density against the conditional law of x3
    S12 = R[:2, :2]
    Sinv = np.linalg.inv(S12)
    c = R[2, :2]
    beta = c @ Sinv
    cond_sd = np.sqrt(1 - c @ Sinv @ c)
    biv = stats.multivariate_normal(np.zeros(2), S12)

    def f(x2, x1):
        mu = beta[0] * x1 + beta[1] * x2
        return biv.pdf([x1, x2]) * (stats.norm.cdf((upper[2] - mu) / cond_sd)
                                    - stats.norm.cdf((lower[2] - mu) / cond_sd))

    return integrate.dblquad(f, lower[0], upper[0], lower[1], upper[1], epsabs=1e-10, epsrel=1e-10)


def bivariate_t_density(lower, upper, rho, df):
    """Brute-force 2-d quadrature of the bivariate t density."""
    det = 1 - rho ** 2
    const = 1.0 / (2 * np.pi * np.sqrt(det))

    def f(y, x):
        q = (x * x - 2 * rho * x * y + y * y) / det
        return const * (1 + q / df) ** (-(df + 2) / 2)

    return integrate.dblquad(f, lower[0], upper[0], lower[1], upper[1], epsabs=1e-10, epsrel=1e-10)


def univariate_t(lower, upper, df):
    return stats.t.cdf(upper[0], df) - stats.t.cdf(lower[0], df), 1e-15
