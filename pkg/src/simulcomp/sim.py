"""Monte Carlo comparison of joint, separate and pre-test Dunnett strategies.

Each replicate draws one balanced sex-by-dose experiment with normal
errors; all procedure arms see the same draw. Because every replicate has
the same design, each family's correlation matrix is fixed, and a
single-step max-T test rejects ``H_i`` exactly when ``|t_i|`` exceeds the
family's equicoordinate quantile. The quantiles are computed once up
front instead of integrating adjusted p-values per replicate.

Procedures and their families:

``joint``
    female, male and pooled comparisons in one family of ``3k``.
``separate``
    one ``k``-family per sex, each on its own refitted variance, each at
    level alpha. Reported FWER counts a false rejection in either sex;
    the per-sex rates are reported as well.
``pretest``
    interaction F test at alpha first. Significant: the two separate
    analyses. Otherwise: the pooled comparisons alone, tested on the
    cell-means model.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .contrasts import dunnett_contrasts, joint_matrix, pooled_contrasts
from .exceptions import ValidationError
from .mvt.contrast import equicoordinate_quantile
from .mvt.special import f_sf

PROCEDURES = ("joint", "separate", "pretest")
SEXES = ("f", "m")


@dataclass(frozen=True)
class Scenario:
    k: int
    n_per_cell: int
    means: tuple[float, ...]
    sigma: float
    alpha: float = 0.05
    n_reps: int = 10_000
    seed: int = 0
    procedures: tuple[str, ...] = PROCEDURES
    tol: float = 1e-4

    def __post_init__(self):
        object.__setattr__(self, "means", tuple(float(v) for v in self.means))
        object.__setattr__(self, "procedures", tuple(self.procedures))
        if self.k < 1:
            raise ValidationError("k must be at least 1")
        if self.n_per_cell < 2:
            raise ValidationError("n_per_cell must be at least 2")
        if len(self.means) != 2 * (self.k + 1):
            raise ValidationError(f"expected {2 * (self.k + 1)} cell means (f block then m block), "
                                  f"got {len(self.means)}")
        if not (self.sigma > 0 and math.isfinite(self.sigma)):
            raise ValidationError("sigma must be positive")
        if not 0 < self.alpha < 1:
            raise ValidationError("alpha must lie in (0, 1)")
        if self.n_reps < 1:
            raise ValidationError("n_reps must be at least 1")
        bad = set(self.procedures) - set(PROCEDURES)
        if bad or not self.procedures:
            raise ValidationError(f"procedures must be a non-empty subset of {PROCEDURES}")

    @classmethod
    def null(cls, k: int = 5, n_per_cell: int = 10, sigma: float = 1.0, **kw) -> "Scenario":
        return cls(k, n_per_cell, (0.0,) * (2 * (k + 1)), sigma, **kw)

    @property
    def dose_levels(self) -> list[str]:
        return [str(i) for i in range(self.k + 1)]


def scenario_from_paper(n_reps: int = 10_000, seed: int = 0) -> Scenario:
    """Design shape and fitted parameters of the bundled liver-weight study."""
    from .dataset import embedded_liver_dataset
    from .linmodel import fit_cell_means

    model = fit_cell_means(embedded_liver_dataset())
    k = len(model.beta) // 2 - 1
    return Scenario(k, int(model.counts[0]), tuple(model.beta), math.sqrt(model.sigma2),
                    n_reps=n_reps, seed=seed)


_INT_KEYS = {"k", "n_per_cell", "n_reps", "seed"}
_FLOAT_KEYS = {"sigma", "alpha", "tol"}


def parse_scenario(text: str) -> Scenario:
    """Read a flat ``key = value`` config (``#`` comments allowed).

    ``means`` is a comma-separated list of ``2(k+1)`` values or the word
    ``null`` for all zeros; ``procedures`` is a comma-separated list.
    """
    raw = {}
    for line_no, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValidationError(f"line {line_no}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        raw[key] = value
    unknown = set(raw) - _INT_KEYS - _FLOAT_KEYS - {"means", "procedures"}
    if unknown:
        raise ValidationError(f"unknown scenario keys {sorted(unknown)}")
    for key in ("k", "n_per_cell", "sigma"):
        if key not in raw:
            raise ValidationError(f"scenario is missing {key!r}")
    kw = {}
    try:
        for key in _INT_KEYS & raw.keys():
            kw[key] = int(raw[key])
        for key in _FLOAT_KEYS & raw.keys():
            kw[key] = float(raw[key])
        means = raw.get("means", "null")
        if means == "null":
            kw["means"] = (0.0,) * (2 * (kw["k"] + 1))
        else:
            kw["means"] = tuple(float(v) for v in means.split(","))
    except ValueError as exc:
        raise ValidationError(f"bad scenario value: {exc}") from None
    if "procedures" in raw:
        kw["procedures"] = tuple(p.strip() for p in raw["procedures"].split(",") if p.strip())
    return Scenario(**kw)


def load_scenario(path: str | Path) -> Scenario:
    return parse_scenario(Path(path).read_text(encoding="utf-8"))


@dataclass
class ArmReport:
    family: list[str]
    fwer: float
    fwer_se: float
    rejection_rates: dict[str, float]
    rejection_se: dict[str, float]
    extra: dict = field(default_factory=dict)


@dataclass
class SimulationReport:
    scenario: Scenario
    arms: dict[str, ArmReport]
    critical_values: dict[str, float]

    def to_dict(self) -> dict:
        sc = self.scenario
        return {
            "scenario": {"k": sc.k, "n_per_cell": sc.n_per_cell, "means": list(sc.means),
                         "sigma": sc.sigma, "alpha": sc.alpha, "n_reps": sc.n_reps, "seed": sc.seed,
                         "procedures": list(sc.procedures), "tol": sc.tol},
            "critical_values": self.critical_values,
            "arms": {name: {"family": a.family, "fwer": a.fwer, "fwer_se": a.fwer_se,
                            "rejection_rates": a.rejection_rates, "rejection_se": a.rejection_se,
                            **a.extra}
                     for name, a in self.arms.items()},
        }

    def to_text(self) -> str:
        sc = self.scenario
        lines = [f"scenario: k={sc.k} n_per_cell={sc.n_per_cell} sigma={sc.sigma:.6g} "
                 f"alpha={sc.alpha} n_reps={sc.n_reps} seed={sc.seed}"]
        for name, a in self.arms.items():
            lines.append(f"[{name}] FWER = {a.fwer:.4f} (SE {a.fwer_se:.4f}); family: {len(a.family)} contrasts")
            for key, value in a.extra.items():
                lines.append(f"  {key}: " + ", ".join(f"{k2}={v:.4f}" for k2, v in value.items()))
            for label, rate in a.rejection_rates.items():
                lines.append(f"  {label:<12} reject {rate:.4f} (SE {a.rejection_se[label]:.4f})")
        return "\n".join(lines) + "\n"


def _se(p: float, n: int) -> float:
    return math.sqrt(p * (1 - p) / n)


def replicate_errors(seed: int, start: int, reps: int, shape) -> np.ndarray:
    """Standard normal errors for replicates ``start .. start + reps - 1``.

    Replicate ``i`` always draws from its own stream keyed by ``(seed, i)``,
    so results do not depend on batching.
    """
    out = np.empty((reps, *shape))
    for j in range(reps):
        ss = np.random.SeedSequence(seed, spawn_key=(start + j,))
        out[j] = np.random.default_rng(ss).standard_normal(shape)
    return out


def _t_stats(K, means, s2, n):
    """Contrast t statistics for batches of cell means (reps x cells) and variances."""
    se_unit = np.sqrt((K ** 2).sum(axis=1) / n)
    return (means @ K.T) / (np.sqrt(s2)[:, None] * se_unit)


def _family_corr(K, n):
    cov = (K / n) @ K.T
    d = np.sqrt(np.diag(cov))
    R = np.clip(cov / np.outer(d, d), -1, 1)
    np.fill_diagonal(R, 1.0)
    return 0.5 * (R + R.T)


def _true_null(K, mu):
    return np.abs(K @ mu) <= 1e-12 * np.maximum(np.abs(mu).max(), 1.0)


def run_simulation(sc: Scenario, batch: int = 2000) -> SimulationReport:
    """Empirical FWER and per-comparison rejection rates for each requested arm."""
    k, n = sc.k, sc.n_per_cell
    p = 2 * (k + 1)
    mu = np.asarray(sc.means)
    du = dunnett_contrasts(sc.dose_levels)
    K_joint = joint_matrix(du, SEXES)
    Kj = K_joint.coefficients
    Kd = du.coefficients
    K_pool = pooled_contrasts(du, 2)
    Kp = K_pool.coefficients
    df_joint = 2 * (k + 1) * (n - 1)
    df_sex = (k + 1) * (n - 1)
    level = 1 - sc.alpha
    want = set(sc.procedures)

    crit = {}
    if "joint" in want:
        crit["joint"] = equicoordinate_quantile(_family_corr(Kj, n), df_joint, level, tol=sc.tol, seed=sc.seed)
    if want & {"separate", "pretest"}:
        crit["separate"] = equicoordinate_quantile(_family_corr(Kd, n), df_sex, level, tol=sc.tol, seed=sc.seed)
    if "pretest" in want:
        crit["pooled"] = equicoordinate_quantile(_family_corr(Kp, n), df_joint, level, tol=sc.tol, seed=sc.seed)

    null_joint = _true_null(Kj, mu)
    null_sex = [_true_null(Kd, mu[s * (k + 1):(s + 1) * (k + 1)]) for s in range(2)]
    null_pool = _true_null(Kp, mu)
    df_int = k

    counts = {name: 0 for name in want}
    sep_sex_counts = np.zeros(2)
    rej_joint = np.zeros(len(Kj))
    rej_sep = np.zeros(2 * k)
    rej_pre = np.zeros(len(Kj))   # f rows, m rows, pooled rows
    n_separate_path = 0

    for start in range(0, sc.n_reps, batch):
        reps = min(batch, sc.n_reps - start)
        e = replicate_errors(sc.seed, start, reps, (p, n))
        y = mu[None, :, None] + sc.sigma * e
        ybar = y.mean(axis=2)
        ss_cell = ((y - ybar[:, :, None]) ** 2).sum(axis=2)
        s2_joint = ss_cell.sum(axis=1) / df_joint
        s2_sex = [ss_cell[:, s * (k + 1):(s + 1) * (k + 1)].sum(axis=1) / df_sex for s in range(2)]

        if "joint" in want:
            rj = np.abs(_t_stats(Kj, ybar, s2_joint, n)) > crit["joint"]
            rej_joint += rj.sum(axis=0)
            counts["joint"] += int((rj & null_joint).any(axis=1).sum())

        if want & {"separate", "pretest"}:
            rs = []
            for s in range(2):
                block = ybar[:, s * (k + 1):(s + 1) * (k + 1)]
                rs.append(np.abs(_t_stats(Kd, block, s2_sex[s], n)) > crit["separate"])
            rs_all = np.hstack(rs)
            false_sex = [(rs[s] & null_sex[s]).any(axis=1) for s in range(2)]
            sep_any = false_sex[0] | false_sex[1]
        if "separate" in want:
            rej_sep += rs_all.sum(axis=0)
            counts["separate"] += int(sep_any.sum())
            sep_sex_counts += [int(f.sum()) for f in false_sex]

        if "pretest" in want:
            cm = ybar.reshape(reps, 2, k + 1)
            inter = cm - cm.mean(axis=2, keepdims=True) - cm.mean(axis=1, keepdims=True) \
                + cm.mean(axis=(1, 2), keepdims=True)
            ss_int = n * (inter ** 2).sum(axis=(1, 2))
            F = (ss_int / df_int) / s2_joint
            significant = np.array([f_sf(f, df_int, df_joint) < sc.alpha for f in F])
            rp = np.abs(_t_stats(Kp, ybar, s2_joint, n)) > crit["pooled"]
            pool_false = (rp & null_pool).any(axis=1)
            counts["pretest"] += int(np.where(significant, sep_any, pool_false).sum())
            rej_pre[:2 * k] += (rs_all & significant[:, None]).sum(axis=0)
            rej_pre[2 * k:] += (rp & ~significant[:, None]).sum(axis=0)
            n_separate_path += int(significant.sum())

    N = sc.n_reps

    def rates(labels, rej):
        r = {lb: float(v / N) for lb, v in zip(labels, rej)}
        return r, {lb: _se(v, N) for lb, v in r.items()}

    arms = {}
    labels_joint = list(K_joint.row_labels)
    if "joint" in want:
        fw = counts["joint"] / N
        arms["joint"] = ArmReport(labels_joint, fw, _se(fw, N), *rates(labels_joint, rej_joint))
    if "separate" in want:
        fw = counts["separate"] / N
        sep_labels = labels_joint[:2 * k]
        per_sex = {s: float(c / N) for s, c in zip(SEXES, sep_sex_counts)}
        arms["separate"] = ArmReport(sep_labels, fw, _se(fw, N), *rates(sep_labels, rej_sep),
                                     extra={"per_sex_fwer": per_sex,
                                            "per_sex_fwer_se": {s: _se(v, N) for s, v in per_sex.items()}})
    if "pretest" in want:
        fw = counts["pretest"] / N
        sep_frac = n_separate_path / N
        arms["pretest"] = ArmReport(labels_joint, fw, _se(fw, N), *rates(labels_joint, rej_pre),
                                    extra={"path_frequency": {"separate": sep_frac, "pooled": 1 - sep_frac}})
    return SimulationReport(sc, arms, {k2: float(v) for k2, v in crit.items()})
