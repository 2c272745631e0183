"""Cell-means model fit and the sequential two-way ANOVA table."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dataset import CellStructure, Dataset, cell_structure
from .exceptions import DegenerateDesignError, ValidationError
from .mvt.special import f_sf


@dataclass(frozen=True)
class CellMeansModel:
    """Intercept-free one-way fit on the sex-by-dose interaction factor.

    ``beta`` holds one mean per cell (the normal equations are diagonal),
    ``sigma2`` the pooled residual variance with ``resid_df = N - p``.
    """

    cells: CellStructure
    beta: np.ndarray
    sigma2: float
    resid_df: int
    n_total: int
    rss: float

    @property
    def counts(self) -> np.ndarray:
        return self.cells.counts


def _cell_index(ds: Dataset, cells: CellStructure) -> np.ndarray:
    lookup = {c: i for i, c in enumerate(cells.cells)}
    return np.array([lookup[(o.sex, o.dose)] for o in ds.observations])


def fit_cell_means(ds: Dataset, response: str = "rel_liver") -> CellMeansModel:
    cells = cell_structure(ds, response)
    p, n = len(cells), len(ds)
    if p < 2:
        raise DegenerateDesignError("cell-means model needs at least 2 cells")
    if n <= p:
        raise DegenerateDesignError(f"no residual degrees of freedom (N = {n}, cells = {p})")
    y = ds.values(response)
    resid = y - cells.means[_cell_index(ds, cells)]
    rss = float(resid @ resid)
    df = n - p
    return CellMeansModel(cells, cells.means.copy(), rss / df, df, n, rss)


@dataclass(frozen=True)
class AnovaRow:
    term: str
    df: int
    sum_sq: float
    mean_sq: float
    f_value: float | None
    p_value: float | None


@dataclass(frozen=True)
class AnovaTable:
    rows: tuple[AnovaRow, ...]

    def __getitem__(self, term: str) -> AnovaRow:
        for r in self.rows:
            if r.term == term:
                return r
        raise KeyError(term)

    def __iter__(self):
        return iter(self.rows)


def _rss(X: np.ndarray, y: np.ndarray) -> float:
    beta, *_ = np.linalg.lstsq(X, y, rcond=None)
    r = y - X @ beta
    return float(r @ r)


def _indicators(codes: np.ndarray, levels) -> np.ndarray:
    return np.column_stack([(codes == lv).astype(float) for lv in levels])


def anova_two_way(ds: Dataset, response: str = "rel_liver",
                  order: tuple[str, str] = ("Dose", "Sex")) -> AnovaTable:
    """Sequential (type I) sums of squares: first, second, interaction, residual.

    The residual SS comes straight from the cell means. The main-effect
    terms use least squares on indicator designs, so unbalanced data work;
    on balanced data every entry order gives the same table.
    """
    if len(ds.dose_levels) < 2 or len(ds.sex_levels) < 2:
        raise ValidationError("two-way ANOVA needs at least 2 dose and 2 sex levels")
    y = ds.values(response)
    n = len(y)
    model = fit_cell_means(ds, response)
    factors = {"Dose": (ds.doses(), ds.dose_levels), "Sex": (ds.sexes(), ds.sex_levels)}
    first, second = order
    X1 = _indicators(*factors[first])
    X2 = _indicators(*factors[second])[:, 1:]

    tss = float(((y - y.mean()) ** 2).sum())
    rss1 = _rss(X1, y)
    rss12 = _rss(np.column_stack([X1, X2]), y)
    ss = {first: tss - rss1, second: rss1 - rss12, "Dose:Sex": rss12 - model.rss}
    dfs = {first: X1.shape[1] - 1, second: X2.shape[1], "Dose:Sex": model.resid_df}
    dfs["Dose:Sex"] = (n - 1) - dfs[first] - dfs[second] - model.resid_df

    res_ms = model.sigma2
    rows = []
    for term in (first, second, "Dose:Sex"):
        s = max(ss[term], 0.0)
        ms = s / dfs[term]
        if res_ms > 0:
            fv = ms / res_ms
            pv = f_sf(fv, dfs[term], model.resid_df)
        else:
            fv = pv = float("nan")
        rows.append(AnovaRow(term, dfs[term], s, ms, fv, pv))
    rows.append(AnovaRow("Residuals", model.resid_df, model.rss, res_ms, None, None))
    return AnovaTable(tuple(rows))
