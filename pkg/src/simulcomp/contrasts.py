"""Dunnett contrasts and their embedding into the sex-by-dose cell means.

The joint family for two strata stacks three blocks of ``k`` rows: the
many-to-one comparisons within each stratum, then the same comparisons on
the stratum-averaged means. For ``k + 1`` dose levels the result is a
``3k x 2(k + 1)`` matrix.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .exceptions import ValidationError


@dataclass(frozen=True)
class ContrastMatrix:
    coefficients: np.ndarray
    row_labels: tuple[str, ...]
    col_labels: tuple[str, ...]

    def __post_init__(self):
        K = np.asarray(self.coefficients, dtype=float)
        if K.ndim != 2:
            raise ValidationError("contrast coefficients must be a 2-d array")
        m, p = K.shape
        if m < 1 or p < 2:
            raise ValidationError(f"contrast matrix needs >= 1 row and >= 2 columns, got {K.shape}")
        if len(self.row_labels) != m or len(self.col_labels) != p:
            raise ValidationError("label counts do not match the coefficient shape")
        scale = np.abs(K).sum(axis=1)
        if np.any(scale == 0):
            raise ValidationError("contrast matrix contains an all-zero row")
        if np.any(np.abs(K.sum(axis=1)) > 1e-12 * scale):
            raise ValidationError("every contrast row must sum to zero")
        K.setflags(write=False)
        object.__setattr__(self, "coefficients", K)
        object.__setattr__(self, "row_labels", tuple(self.row_labels))
        object.__setattr__(self, "col_labels", tuple(self.col_labels))

    @property
    def shape(self) -> tuple[int, int]:
        return self.coefficients.shape

    def __len__(self):
        return self.coefficients.shape[0]

    def rows(self, labels_or_slice) -> "ContrastMatrix":
        if isinstance(labels_or_slice, slice):
            idx = list(range(len(self)))[labels_or_slice]
        else:
            idx = [self.row_labels.index(lb) for lb in labels_or_slice]
        return ContrastMatrix(self.coefficients[idx], [self.row_labels[i] for i in idx], self.col_labels)

    def to_text(self, decimals: int = 1) -> str:
        """Fixed-width listing: header of column labels, one labelled row per contrast.

        Each column is as wide as its widest entry or label, the layout R
        uses when printing a numeric matrix.
        """
        # + 0.0 folds negative zero
        cells = [[f"{v + 0.0:.{decimals}f}" for v in row] for row in self.coefficients]
        lw = max(len(s) for s in self.row_labels)
        widths = [max(len(name), *(len(row[j]) for row in cells)) for j, name in enumerate(self.col_labels)]
        lines = [" " * lw + "".join(" " + s.rjust(w) for s, w in zip(self.col_labels, widths))]
        for label, row in zip(self.row_labels, cells):
            lines.append(label.ljust(lw) + "".join(" " + c.rjust(w) for c, w in zip(row, widths)))
        return "\n".join(lines) + "\n"


def vstack(*blocks: ContrastMatrix) -> ContrastMatrix:
    cols = blocks[0].col_labels
    if any(b.col_labels != cols for b in blocks):
        raise ValidationError("cannot stack contrast matrices with different columns")
    return ContrastMatrix(np.vstack([b.coefficients for b in blocks]),
                          sum((b.row_labels for b in blocks), ()), cols)


def dunnett_contrasts(levels: Sequence[str], control: str | None = None) -> ContrastMatrix:
    """Many-to-one comparisons of every level against ``control``.

    >>> dunnett_contrasts(["A", "B", "C"], control="B").coefficients
    array([[ 1., -1.,  0.],
           [ 0., -1.,  1.]])
    """
    levels = [str(lv) for lv in levels]
    if len(levels) < 2:
        raise ValidationError("Dunnett contrasts need at least 2 levels")
    control = levels[0] if control is None else str(control)
    if control not in levels:
        raise ValidationError(f"control {control!r} not among levels {levels}")
    c = levels.index(control)
    treated = [i for i in range(len(levels)) if i != c]
    K = np.zeros((len(treated), len(levels)))
    for r, i in enumerate(treated):
        K[r, c] = -1.0
        K[r, i] = 1.0
    return ContrastMatrix(K, [f"{levels[i]} - {control}" for i in treated], levels)


def stratified_block_matrix(du: ContrastMatrix, strata: Sequence[str]) -> ContrastMatrix:
    """Block-diagonal copy of ``du``, one block per stratum, rows prefixed ``"s:"``."""
    s = len(strata)
    if s < 2:
        raise ValidationError("need at least 2 strata")
    k, q = du.shape
    K = np.zeros((s * k, s * q))
    labels = []
    for j, name in enumerate(strata):
        K[j * k:(j + 1) * k, j * q:(j + 1) * q] = du.coefficients
        labels += [f"{name}:{lb}" for lb in du.row_labels]
    return ContrastMatrix(K, labels, du.col_labels * s)


def pooled_contrasts(du: ContrastMatrix, n_strata: int, weights: Sequence[float] | None = None,
                     prefix: str = "p") -> ContrastMatrix:
    """Stratum-averaged comparisons; uniform weights give the usual +-1/2 rows for 2 strata."""
    if n_strata < 2:
        raise ValidationError("need at least 2 strata")
    w = np.full(n_strata, 1.0 / n_strata) if weights is None else np.asarray(weights, dtype=float)
    if w.shape != (n_strata,):
        raise ValidationError(f"expected {n_strata} weights, got {w.shape}")
    if abs(w.sum() - 1.0) > 1e-12:
        raise ValidationError(f"pooling weights must sum to 1, got {w.sum()!r}")
    K = np.hstack([wj * du.coefficients for wj in w])
    labels = [f"{prefix}:{lb.replace(' ', '')}" for lb in du.row_labels]
    return ContrastMatrix(K, labels, du.col_labels * n_strata)


def joint_matrix(du: ContrastMatrix, strata: Sequence[str],
                 weights: Sequence[float] | None = None) -> ContrastMatrix:
    """Per-stratum Dunnett blocks followed by the pooled rows."""
    return vstack(stratified_block_matrix(du, strata), pooled_contrasts(du, len(strata), weights))


def stratum_size_weights(counts: np.ndarray, n_strata: int) -> np.ndarray:
    """Pooling weights proportional to stratum sample sizes (cells ordered stratum-major)."""
    totals = np.asarray(counts, dtype=float).reshape(n_strata, -1).sum(axis=1)
    return totals / totals.sum()
