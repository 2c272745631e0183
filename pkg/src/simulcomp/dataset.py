"""Observations, CSV ingestion and the bundled liver-weight study.

Doses are kept as string labels (``"0"``, ``"62.5"``, ...) but ordered by
their numeric value, so the control (lowest dose) always comes first.
Sex levels are ordered ``f`` then ``m``.
"""

from __future__ import annotations

import csv
import io
import math
import warnings
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .exceptions import DegenerateDesignError, SchemaError, ValidationError

SEX_ORDER = ("f", "m")
REQUIRED_COLUMNS = ("Dose", "BodyWt", "LiverWt", "Sex")

# response names accepted by Dataset.values()
_BUILTIN_RESPONSES = {
    "rel_liver": "rel_liver",
    "RelLiv": "rel_liver",
    "body_weight": "body_weight",
    "BodyWt": "body_weight",
    "liver_weight": "liver_weight",
    "LiverWt": "liver_weight",
}


def dose_label(value: str | float) -> str:
    """Canonical string form of a dose (``62.50`` -> ``"62.5"``, ``0.0`` -> ``"0"``)."""
    x = float(value)
    if not math.isfinite(x):
        raise ValidationError(f"dose must be finite, got {value!r}")
    return repr(int(x)) if x.is_integer() else repr(x)


@dataclass(frozen=True)
class Observation:
    dose: str
    sex: str
    body_weight: float | None = None
    liver_weight: float | None = None
    extra: tuple[tuple[str, float], ...] = ()
    rel_liver: float | None = field(init=False, default=None)

    def __post_init__(self):
        if self.sex not in SEX_ORDER:
            raise ValidationError(f"unknown sex code {self.sex!r}; expected one of {SEX_ORDER}")
        for name in ("body_weight", "liver_weight"):
            w = getattr(self, name)
            if w is not None and not (w > 0 and math.isfinite(w)):
                raise ValidationError(f"{name} must be a positive number, got {w!r}")
        if self.body_weight is not None and self.liver_weight is not None:
            object.__setattr__(self, "rel_liver", 100.0 * self.liver_weight / self.body_weight)

    def get(self, response: str) -> float:
        attr = _BUILTIN_RESPONSES.get(response)
        if attr is not None:
            v = getattr(self, attr)
            if v is None:
                raise ValidationError(f"observation has no value for {response!r}")
            return v
        for name, v in self.extra:
            if name == response:
                return v
        raise ValidationError(f"unknown response column {response!r}")


@dataclass(frozen=True)
class CellStructure:
    """Per-cell counts and means, female block first, doses ascending."""

    cells: tuple[tuple[str, str], ...]
    counts: np.ndarray
    means: np.ndarray

    @property
    def labels(self) -> list[str]:
        return [f"{s}:{d}" for s, d in self.cells]

    def __len__(self):
        return len(self.cells)


def _sorted_doses(doses: Iterable[str]) -> tuple[str, ...]:
    return tuple(sorted(set(doses), key=float))


@dataclass(frozen=True)
class Dataset:
    observations: tuple[Observation, ...]
    dose_levels: tuple[str, ...] = ()
    sex_levels: tuple[str, ...] = ()

    def __post_init__(self):
        obs = tuple(self.observations)
        object.__setattr__(self, "observations", obs)
        if not obs:
            raise ValidationError("dataset has no observations")
        if not self.dose_levels:
            object.__setattr__(self, "dose_levels", _sorted_doses(o.dose for o in obs))
        if not self.sex_levels:
            present = {o.sex for o in obs}
            object.__setattr__(self, "sex_levels", tuple(s for s in SEX_ORDER if s in present))
        for levels in (self.dose_levels, self.sex_levels):
            if len(set(levels)) != len(levels):
                raise ValidationError(f"duplicate levels in {levels}")
        doses, sexes = set(self.dose_levels), set(self.sex_levels)
        for i, o in enumerate(obs):
            if o.dose not in doses or o.sex not in sexes:
                raise ValidationError(f"observation {i} ({o.sex}, {o.dose}) outside declared levels")

    def __len__(self):
        return len(self.observations)

    @property
    def control(self) -> str:
        return self.dose_levels[0]

    def values(self, response: str = "rel_liver") -> np.ndarray:
        return np.array([o.get(response) for o in self.observations], dtype=float)

    def doses(self) -> np.ndarray:
        return np.array([o.dose for o in self.observations])

    def sexes(self) -> np.ndarray:
        return np.array([o.sex for o in self.observations])

    def subset(self, sex: str) -> "Dataset":
        """Observations of one sex, keeping the full dose level list."""
        if sex not in self.sex_levels:
            raise ValidationError(f"sex {sex!r} not present in dataset")
        return Dataset(tuple(o for o in self.observations if o.sex == sex),
                       dose_levels=self.dose_levels, sex_levels=(sex,))

    def to_csv(self, path: str | Path | None = None) -> str:
        """Write the observations as CSV; returns the text as well."""
        extra_names = [n for n, _ in self.observations[0].extra]
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(list(REQUIRED_COLUMNS) + extra_names)
        for o in self.observations:
            w.writerow([o.dose, _fmt(o.body_weight), _fmt(o.liver_weight), o.sex]
                       + [repr(v) for _, v in o.extra])
        text = buf.getvalue()
        if path is not None:
            Path(path).write_text(text, encoding="utf-8")
        return text


def _fmt(x: float | None) -> str:
    return "" if x is None else repr(x)


def _parse_float(raw: str, column: str, row: int) -> float:
    raw = raw.strip()
    if raw == "" or raw.upper() in ("NA", "NAN"):
        raise ValidationError(f"row {row}: missing value in column {column!r}")
    try:
        value = float(raw)
    except ValueError:
        raise ValidationError(f"row {row}: non-numeric value {raw!r} in column {column!r}") from None
    if not math.isfinite(value):
        raise ValidationError(f"row {row}: non-finite value in column {column!r}")
    return value


def parse_csv(text: str, response: str = "derived") -> Dataset:
    """Parse CSV text; see :func:`load_csv`."""
    reader = csv.reader(io.StringIO(text))
    try:
        header = [h.strip() for h in next(reader)]
    except StopIteration:
        raise ValidationError("empty CSV input") from None
    named = None if response == "derived" else response
    need = ["Dose", "Sex"] + (["BodyWt", "LiverWt"] if named is None else [named])
    for col in need:
        if col not in header:
            raise SchemaError(f"missing required column {col!r}")
    known = set(REQUIRED_COLUMNS) | ({named} if named else set())
    ignored = [h for h in header if h not in known]
    if ignored:
        warnings.warn(f"ignoring extra columns {ignored}", stacklevel=3)
    idx = {h: i for i, h in enumerate(header)}

    obs = []
    for row_no, row in enumerate(reader, start=2):
        if not row or all(c.strip() == "" for c in row):
            continue
        if len(row) != len(header):
            raise ValidationError(f"row {row_no}: expected {len(header)} fields, got {len(row)}")
        sex = row[idx["Sex"]].strip()
        if sex not in SEX_ORDER:
            raise ValidationError(f"row {row_no}: unknown sex code {sex!r}")
        dose = dose_label(_parse_float(row[idx["Dose"]], "Dose", row_no))
        weights = {}
        for col in ("BodyWt", "LiverWt"):
            if col in idx and (named is None or row[idx[col]].strip() != ""):
                weights[col] = _parse_float(row[idx[col]], col, row_no)
        extra = ()
        if named is not None and named not in REQUIRED_COLUMNS:
            extra = ((named, _parse_float(row[idx[named]], named, row_no)),)
        try:
            obs.append(Observation(dose, sex, weights.get("BodyWt"), weights.get("LiverWt"), extra))
        except ValidationError as exc:
            raise ValidationError(f"row {row_no}: {exc}") from None
    if not obs:
        raise ValidationError("CSV contains a header but no observations")
    return Dataset(tuple(obs))


def load_csv(path: str | Path, response: str = "derived") -> Dataset:
    """Load a ``Dose,BodyWt,LiverWt,Sex`` CSV file.

    Parameters
    ----------
    path : path-like
        UTF-8 comma-separated file with a header row.
    response : str
        ``"derived"`` computes ``rel_liver = 100 * LiverWt / BodyWt``; any
        other value names a numeric column that must be present, in which
        case the weight columns become optional.

    Raises
    ------
    SchemaError
        A required column is missing.
    ValidationError
        Empty file, missing or non-numeric values, unknown sex codes.
    """
    text = Path(path).read_text(encoding="utf-8")
    return parse_csv(text, response=response)


def embedded_csv_text() -> str:
    return resources.files("simulcomp").joinpath("data/livmf.csv").read_text(encoding="utf-8")


def embedded_liver_dataset() -> Dataset:
    """Relative liver weights of F344 rats, 13-week sodium dichromate study.

    60 males followed by 60 females, 10 animals per dose
    (0, 62.5, 125, 250, 500, 1000). Weights are in grams.
    """
    return parse_csv(embedded_csv_text())


def cell_structure(ds: Dataset, response: str = "rel_liver",
                   dose_levels: Sequence[str] | None = None) -> CellStructure:
    """Group the response by (sex, dose) cell.

    Raises :class:`DegenerateDesignError` when any cell is empty.
    """
    doses = tuple(dose_levels) if dose_levels is not None else ds.dose_levels
    y = ds.values(response)
    obs_sex, obs_dose = ds.sexes(), ds.doses()
    cells, counts, means = [], [], []
    for s in ds.sex_levels:
        for d in doses:
            mask = (obs_sex == s) & (obs_dose == d)
            n = int(mask.sum())
            if n == 0:
                raise DegenerateDesignError(f"empty cell {s}:{d}")
            cells.append((s, d))
            counts.append(n)
            means.append(y[mask].mean())
    return CellStructure(tuple(cells), np.array(counts), np.array(means))
