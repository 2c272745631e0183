"""Command-line front end: ``simulcomp {anova,dunnett,joint,plot,simulate}``.

Exit codes: 0 success, 1 validation or usage error, 2 numerical
non-convergence. Every output starts with a header recording the version,
seed, tolerance and a SHA-256 fingerprint of the input.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import os
import sys
import warnings
from dataclasses import replace

from . import __version__
from .dataset import embedded_csv_text, parse_csv
from .exceptions import ConvergenceError, SimulcompError, ValidationError
from .inference import InferenceResult, format_p, joint_dunnett, separate_dunnett
from .linmodel import anova_two_way
from .mvt.integrate import DEFAULT_TOL
from .plotting import render_ci_plot
from .sim import load_scenario, run_simulation, scenario_from_paper

FORMATS = ("text", "json", "tsv", "markdown")
DEFAULT_SEED = 42


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def _default_seed() -> int:
    env = os.environ.get("SIMULCOMP_SEED")
    if env is None:
        return DEFAULT_SEED
    try:
        return int(env)
    except ValueError:
        raise ValidationError(f"SIMULCOMP_SEED must be an integer, got {env!r}") from None


def _read_input(spec: str) -> tuple[str, str]:
    if spec == "embedded":
        return embedded_csv_text(), "embedded"
    try:
        with open(spec, encoding="utf-8") as fh:
            return fh.read(), spec
    except OSError as exc:
        raise ValidationError(f"cannot read input {spec!r}: {exc.strerror}") from None


def _fingerprint(text: str) -> str:
    return "sha256:" + hashlib.sha256(text.encode("utf-8")).hexdigest()[:16]


def _header(args, fingerprint: str) -> dict:
    return {"version": __version__, "command": args.command, "seed": args.seed,
            "tolerance": args.tol, "input": fingerprint}


def _header_line(meta: dict) -> str:
    return "# " + " ".join(f"{k}={v}" for k, v in meta.items())


def _table(headers, rows, fmt) -> str:
    if fmt == "tsv":
        buf = io.StringIO()
        w = csv.writer(buf, delimiter="\t", lineterminator="\n")
        w.writerow(headers)
        w.writerows(rows)
        return buf.getvalue()
    if fmt == "markdown":
        lines = ["| " + " | ".join(headers) + " |", "|" + "|".join("---" for _ in headers) + "|"]
        lines += ["| " + " | ".join(str(c) for c in r) + " |" for r in rows]
        return "\n".join(lines) + "\n"
    widths = [max(len(str(h)), *(len(str(r[i])) for r in rows)) for i, h in enumerate(headers)]
    lines = ["  ".join(str(h).rjust(w) if i else str(h).ljust(w) for i, (h, w) in enumerate(zip(headers, widths)))]
    for r in rows:
        lines.append("  ".join(str(c).rjust(w) if i else str(c).ljust(w) for i, (c, w) in enumerate(zip(r, widths))))
    return "\n".join(lines) + "\n"


def _emit(meta: dict, payload, headers, rows_machine, rows_human, fmt) -> str:
    if fmt == "json":
        return json.dumps({**payload, "meta": meta}, indent=2) + "\n"
    rows = rows_machine if fmt == "tsv" else rows_human
    return _header_line(meta) + "\n" + _table(headers, rows, fmt)


def _ds(args):
    text, _ = _read_input(args.input)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore" if args.quiet else "default")
        ds = parse_csv(text, response=args.response)
    return ds, _fingerprint(text)


def _response(args) -> str:
    return "rel_liver" if args.response == "derived" else args.response


def _cmd_anova(args) -> str:
    ds, fp = _ds(args)
    table = anova_two_way(ds, _response(args))
    headers = ["term", "Df", "Sum Sq", "Mean Sq", "F value", "Pr(>F)"]
    machine, human, payload = [], [], {"rows": []}
    for r in table:
        machine.append([r.term, r.df, repr(r.sum_sq), repr(r.mean_sq),
                        "" if r.f_value is None else repr(r.f_value),
                        "" if r.p_value is None else repr(r.p_value)])
        human.append([r.term, r.df, f"{r.sum_sq:.2f}", f"{r.mean_sq:.2f}",
                      "" if r.f_value is None else f"{r.f_value:.2f}",
                      "" if r.p_value is None else f"{r.p_value:.4f}"])
        payload["rows"].append({"term": r.term, "df": r.df, "sum_sq": r.sum_sq, "mean_sq": r.mean_sq,
                                "f_value": r.f_value, "p_value": r.p_value})
    return _emit(_header(args, fp), payload, headers, machine, human, args.format)


def _inference_table(res: InferenceResult, args, fp) -> str:
    headers = ["comparison", "estimate", "se", "t", "p_adj", "ci_lower", "ci_upper"]
    machine = [[r.label, repr(r.estimate), repr(r.std_error), repr(r.t_stat), repr(r.p_adjusted),
                repr(r.ci_lower), repr(r.ci_upper)] for r in res.rows]
    human = [[r.label, f"{r.estimate:.4f}", f"{r.std_error:.4f}", f"{r.t_stat:.3f}", format_p(r.p_adjusted),
              f"{r.ci_lower:.4f}", f"{r.ci_upper:.4f}"] for r in res.rows]
    meta = {**_header(args, fp), "q": repr(res.quantile_used), "df": res.df, "alpha": res.alpha,
            "alternative": res.alternative}
    return _emit(meta, res.to_dict(), headers, machine, human, args.format)


def _run_joint(args, ds):
    return joint_dunnett(ds, _response(args), args.control, args.alpha, args.alternative,
                         seed=args.seed, tol=args.tol)


def _cmd_joint(args) -> str:
    ds, fp = _ds(args)
    return _inference_table(_run_joint(args, ds), args, fp)


def _cmd_dunnett(args) -> str:
    ds, fp = _ds(args)
    res = separate_dunnett(ds, args.sex, _response(args), args.control, args.alpha, args.alternative,
                           seed=args.seed, tol=args.tol)
    return _inference_table(res, args, fp)


def _cmd_plot(args) -> str:
    ds, fp = _ds(args)
    if args.sex:
        res = separate_dunnett(ds, args.sex, _response(args), args.control, args.alpha, args.alternative,
                               seed=args.seed, tol=args.tol)
    else:
        res = _run_joint(args, ds)
    doc = render_ci_plot(res, args.plot_format)
    meta = _header_line(_header(args, fp))
    if args.plot_format == "svg":
        return doc.replace("?>\n", f"?>\n<!-- {meta[2:]} -->\n", 1)
    return meta + "\n" + doc


def _cmd_simulate(args) -> str:
    if args.config:
        sc = load_scenario(args.config)
        with open(args.config, encoding="utf-8") as fh:
            fp = _fingerprint(fh.read())
    else:
        sc = scenario_from_paper(seed=args.seed)
        fp = "embedded"
        if args.null:
            sc = replace(sc, means=(0.0,) * len(sc.means))
    overrides = {"tol": args.tol}
    if args.seed_given:
        overrides["seed"] = args.seed
    if args.reps is not None:
        overrides["n_reps"] = args.reps
    sc = replace(sc, **overrides)
    args.seed = sc.seed
    report = run_simulation(sc)
    meta = _header(args, fp)
    if args.format == "json":
        return json.dumps({**report.to_dict(), "meta": meta}, indent=2) + "\n"
    return _header_line(meta) + "\n" + report.to_text()


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--input", default="embedded", help='CSV path or "embedded" (default)')
    common.add_argument("--response", default="derived",
                        help='"derived" (100 * LiverWt / BodyWt) or a numeric column name')
    common.add_argument("--control", default=None, help="control dose label (default: lowest dose)")
    common.add_argument("--alpha", type=float, default=0.05)
    common.add_argument("--alternative", choices=("two-sided", "less", "greater"), default="two-sided")
    common.add_argument("--seed", type=int, default=None,
                        help=f"integration seed (default: $SIMULCOMP_SEED or {DEFAULT_SEED})")
    common.add_argument("--tol", type=float, default=DEFAULT_TOL, help="absolute integration error target")
    common.add_argument("--format", choices=FORMATS, default="text")
    common.add_argument("--output", "-o", default=None, help="write to this file instead of stdout")
    common.add_argument("--quiet", action="store_true", help="suppress CSV warnings")

    parser = _Parser(prog="simulcomp", description="Joint Dunnett-type inference for sex-by-dose designs.")
    parser.add_argument("--version", action="version", version=f"simulcomp {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    sub.add_parser("anova", parents=[common], help="global two-way ANOVA table")
    d = sub.add_parser("dunnett", parents=[common], help="Dunnett test within one sex")
    d.add_argument("--sex", choices=("f", "m"), required=True)
    sub.add_parser("joint", parents=[common], help="joint female/male/pooled Dunnett test")
    p = sub.add_parser("plot", parents=[common], help="simultaneous confidence interval chart")
    p.add_argument("--plot-format", choices=("svg", "ascii"), default="svg")
    p.add_argument("--sex", choices=("f", "m"), default=None, help="plot one sex's separate analysis")
    s = sub.add_parser("simulate", parents=[common], help="Monte Carlo FWER / power study")
    s.add_argument("--config", default=None, help="flat key = value scenario file")
    s.add_argument("--reps", type=int, default=None)
    s.add_argument("--null", action="store_true", help="use the bundled study design with all means equal")
    return parser


COMMANDS = {"anova": _cmd_anova, "dunnett": _cmd_dunnett, "joint": _cmd_joint,
            "plot": _cmd_plot, "simulate": _cmd_simulate}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return 1
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)
    try:
        args.seed_given = args.seed is not None
        args.seed = args.seed if args.seed_given else _default_seed()
        if not 0 < args.alpha < 1:
            raise ValidationError("--alpha must lie in (0, 1)")
        if not args.tol > 0:
            raise ValidationError("--tol must be positive")
        out = COMMANDS[args.command](args)
    except ConvergenceError as exc:
        print(f"simulcomp: numerical error: {exc}", file=sys.stderr)
        return 2
    except (SimulcompError, ValueError) as exc:
        print(f"simulcomp: error: {exc}", file=sys.stderr)
        return 1
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(out)
    else:
        sys.stdout.write(out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
