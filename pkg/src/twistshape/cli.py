"""Command-line front end: ``twistshape <command> [options]``.

Every command accepts ``--config FILE`` (flat JSON whose keys are the long
option names, dashes or underscores), ``--format text|csv|json`` and
``--out PATH``.  Flags beat the config file, which beats the ``TS_MESH`` /
``TS_TOL`` environment defaults.

Exit codes: 0 ok, 1 output could not be written, 2 usage or inadmissible
parameters, 3 solver failure, 4 verification failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

import numpy as np

from . import emit as out
from .params import InadmissibleParams, ProblemParams, critical_exponent, gamma_coeff, q_hat
from .radial import ShootingError, ground_state
from .reduced import minimize_reduced_F, reduced_F, restricted_threshold, sweep_reduced
from .twoball import (DEFAULT_MESH, SolverError, TwoBallConfig, TwoBallSolution, bifurcation_sweep,
                      critical_q, euler_residual, optimize_partition, solve_fixed_partition)
from .verify import run_verify, select

EXIT_OK, EXIT_IO, EXIT_USAGE, EXIT_SOLVER, EXIT_VERIFY = 0, 1, 2, 3, 4

log = logging.getLogger("twistshape")


class UsageError(ValueError):
    pass


# command -> (option, type) pairs; the types double as config-file coercions
_LIST = "list"
_OPTIONS = {
    "pstar": [("n", int), ("p", float)],
    "qhat": [("n", int), ("p", float), ("r", float)],
    "gamma": [("n", int), ("p", float), ("q", float), ("r", float)],
    "reduced eval": [("n", int), ("p", float), ("q", float), ("r", float), ("y", float)],
    "reduced minimize": [("n", int), ("p", float), ("q", float), ("r", float), ("tol", float)],
    "reduced sweep": [("n", int), ("p", float), ("r", float), ("q_values", _LIST),
                      ("q_range", _LIST), ("tol", float)],
    "reduced threshold": [("n", int), ("p", float), ("r", float), ("bracket", _LIST), ("tol", float)],
    "ground-state": [("n", int), ("p", float), ("q", float), ("mesh", int)],
    "twoball solve": [("n", int), ("p", float), ("q", float), ("r", float), ("t", float),
                      ("C", float), ("mesh", int), ("eps", float), ("starts", int)],
    "twoball optimize": [("n", int), ("p", float), ("q", float), ("r", float), ("C", float),
                         ("mesh", int), ("scan_points", int), ("tol", float)],
    "twoball sweep": [("n", int), ("p", float), ("r", float), ("q_values", _LIST), ("q_range", _LIST),
                      ("C", float), ("mesh", int), ("scan_points", int), ("tol", float)],
    "twoball qcrit": [("n", int), ("p", float), ("r", float), ("bracket", _LIST), ("tol", float),
                      ("C", float), ("mesh", int), ("scan_points", int)],
    "verify": [("only", _LIST)],
}

_DEFAULTS = {
    "C": 2.0, "starts": 2, "scan_points": 33, "eps": None, "y": None, "only": None,
    "q_values": None, "q_range": None,
}

_TOL_DEFAULTS = {
    "reduced minimize": 1e-10,
    "reduced sweep": 1e-10,
    "reduced threshold": 1e-6,
    "twoball optimize": 1e-6,
    "twoball sweep": 0.05,
    "twoball qcrit": 0.05,
}

_COMMAND_HELP = {
    "pstar": "critical Sobolev exponent", "qhat": "restricted-family threshold q_hat",
    "gamma": "Taylor coefficient of the reduced functional at y = 0",
    "eval": "reduced functional F(y)", "minimize": "global minimizer y* of F",
    "sweep": "optimum along a q grid", "threshold": "onset of asymmetry in the dilation family",
    "ground-state": "single-ball ground state on B_1", "solve": "two-ball minimizer for a fixed split t",
    "optimize": "optimal volume split t*", "qcrit": "onset of asymmetry by bisection in q",
    "verify": "run the known-answer checks",
}

_HELP = {
    "n": "dimension", "p": "gradient exponent", "q": "target norm exponent",
    "r": "moment exponent (constraint int |u|^(r-2) u = 0)", "y": "asymmetry coordinate in (-1, 1)",
    "tol": "tolerance (in y, q or t depending on the command)",
    "q_values": "comma-separated q values", "q_range": "start,stop,step (stop included)",
    "bracket": "lo,hi", "mesh": "cells per ball", "t": "volume fraction of the positive ball",
    "C": "total scaled volume R_+^n + R_-^n", "eps": "gradient regularization for p < 2",
    "starts": "number of starts", "scan_points": "coarse scan size in t",
    "only": "comma-separated check names or groups",
}


@dataclass
class RunConfig:
    command: str
    options: dict = field(default_factory=dict)
    fmt: str = "text"
    out: Optional[str] = None
    deterministic: bool = True  # nothing here draws random numbers

    def __getitem__(self, key):
        return self.options[key]

    def params(self, q: Optional[float] = None) -> ProblemParams:
        o = self.options
        return ProblemParams(o["n"], o["p"], o["q"] if q is None else q, o["r"])


def _list(value) -> list:
    if value is None:
        return None
    if isinstance(value, (list, tuple)):
        return [float(v) if not isinstance(v, str) or _is_number(v) else v for v in value]
    text = str(value).strip()
    if not text:
        return []
    return [float(v) if _is_number(v) else v.strip() for v in text.split(",")]


def _is_number(s) -> bool:
    try:
        float(s)
    except (TypeError, ValueError):
        return False
    return True


def _coerce(kind, value, name):
    if value is None:
        return None
    try:
        if kind is _LIST:
            return _list(value)
        if kind is int:
            if isinstance(value, float) and not value.is_integer():
                raise ValueError
            return int(value)
        return kind(value)
    except (TypeError, ValueError):
        raise UsageError(f"bad value for {name}: {value!r}") from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="flat JSON file with option values")
    common.add_argument("--format", dest="fmt", choices=out.FORMATS, default=None)
    common.add_argument("--out", help="write the result here instead of stdout")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="twistshape", description="Twisted p,q,r problem on two balls.")
    sub = parser.add_subparsers(dest="cmd", required=True)
    groups = {}
    for command, opts in _OPTIONS.items():
        head, _, tail = command.partition(" ")
        if tail:
            if head not in groups:
                grp = sub.add_parser(head, help=f"{head} subcommands")
                groups[head] = grp.add_subparsers(dest="sub", required=True)
            p = groups[head].add_parser(tail, parents=[common], help=_COMMAND_HELP[tail])
        else:
            p = sub.add_parser(head, parents=[common], help=_COMMAND_HELP[head])
        for name, kind in opts:
            flag = "--" + name.replace("_", "-")
            p.add_argument(flag, dest=name, default=None, help=_HELP.get(name),
                           type=str if kind is _LIST else kind)
    return parser


def parse_config(argv: Optional[Sequence[str]] = None, environ: Optional[Mapping[str, str]] = None) -> RunConfig:
    """Merge flags, an optional JSON config file and environment defaults.

    Raises ``UsageError`` for unknown config keys or missing required values;
    argparse itself exits with status 2 on malformed flags.
    """
    environ = os.environ if environ is None else environ
    args = build_parser().parse_args(argv)
    command = args.cmd + (f" {args.sub}" if getattr(args, "sub", None) else "")
    kinds = dict(_OPTIONS[command])
    file_vals = {}
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                raw = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config {args.config}: {exc}") from None
        if not isinstance(raw, dict):
            raise UsageError("config file must hold a flat JSON object")
        for key, value in raw.items():
            name = key.replace("-", "_")
            if name in ("format", "fmt", "out"):
                file_vals[name if name != "format" else "fmt"] = value
                continue
            if name not in kinds:
                raise UsageError(f"unknown config key {key!r} for '{command}'")
            if isinstance(value, (dict, list)) and kinds[name] is not _LIST:
                raise UsageError(f"config value for {key!r} must be a scalar")
            file_vals[name] = _coerce(kinds[name], value, key)

    opts = {}
    for name, kind in kinds.items():
        flag_val = getattr(args, name)
        if flag_val is not None:
            opts[name] = _coerce(kind, flag_val, name)
        elif name in file_vals:
            opts[name] = file_vals[name]
        elif name == "mesh":
            opts[name] = _coerce(int, environ.get("TS_MESH", DEFAULT_MESH), "TS_MESH")
        elif name == "tol":
            opts[name] = _coerce(float, environ.get("TS_TOL", _TOL_DEFAULTS[command]), "TS_TOL")
        elif name in _DEFAULTS:
            opts[name] = _DEFAULTS[name]
        else:
            raise UsageError(f"'{command}' needs --{name.replace('_', '-')}")
    fmt = args.fmt or file_vals.get("fmt") or "text"
    if fmt not in out.FORMATS:
        raise UsageError(f"unknown format {fmt!r}")
    cfg = RunConfig(command=command, options=opts, fmt=fmt, out=args.out or file_vals.get("out"))
    cfg.options["verbose"] = args.verbose
    return cfg


def _pair(values, name):
    if values is None or len(values) != 2:
        raise UsageError(f"--{name} takes two numbers lo,hi")
    return float(values[0]), float(values[1])


def _q_grid(cfg: RunConfig) -> list:
    if cfg["q_values"] is not None and cfg["q_range"] is not None:
        raise UsageError("give either --q-values or --q-range")
    if cfg["q_range"] is not None:
        rng = cfg["q_range"]
        if len(rng) != 3 or not rng[2] > 0:
            raise UsageError("--q-range takes start,stop,step with step > 0")
        start, stop, step = rng
        count = int(math.floor((stop - start) / step + 1e-9)) + 1
        return [float(start + k * step) for k in range(max(count, 0))]
    if cfg["q_values"] is None:
        raise UsageError("a sweep needs --q-values or --q-range")
    return [float(v) for v in cfg["q_values"]]


def _solution_table(sol: TwoBallSolution, params: ProblemParams, extra: dict) -> out.Table:
    meta = {"n": params.n, "p": params.p, "q": params.q, "r": params.r, **extra,
            "t": sol.config.t, "C": sol.config.C, "R_plus": sol.config.R_plus, "R_minus": sol.config.R_minus,
            "lambda": sol.lambda_value, "multiplier_lambda": sol.multiplier_lambda,
            "multiplier_mu": sol.multiplier_mu, "moment": sol.moment, "kkt_residual": sol.kkt_residual,
            "euler_residual": euler_residual(sol, params), "converged": sol.converged,
            "mesh": sol.mesh, "eps": sol.eps}
    return out.Table(("ball", "radius", "value"), list(sol.rows()), meta)


def run(cfg: RunConfig) -> tuple[out.Result, int]:
    """Validate, compute and package the result of one command."""
    c = cfg.command
    o = cfg.options
    if c == "pstar":
        return out.Record({"p_star": critical_exponent(o["p"], o["n"]), "n": o["n"], "p": o["p"]}, "p_star"), EXIT_OK
    if c == "qhat":
        return out.Record({"q_hat": q_hat(o["p"], o["r"], o["n"]), "n": o["n"], "p": o["p"], "r": o["r"]},
                          "q_hat"), EXIT_OK
    if c == "verify":
        return None, EXIT_OK  # handled by main, which streams the lines

    if c in ("reduced threshold", "twoball qcrit"):
        base = None
        for q in _pair(o["bracket"], "bracket"):
            ProblemParams(o["n"], o["p"], q, o["r"]).require_admissible()
    elif c == "twoball sweep":
        base = None
        for q in _q_grid(cfg):
            ProblemParams(o["n"], o["p"], q, o["r"]).require_admissible()
    elif c == "reduced sweep":
        base = None  # inadmissible points are reported per row
    elif c == "ground-state":
        base = ProblemParams(o["n"], o["p"], o["q"], o["q"]).require_admissible()
    else:
        base = cfg.params().require_admissible()

    if c == "gamma":
        return out.Record({"gamma": gamma_coeff(base), **_pdict(base)}, "gamma"), EXIT_OK
    if c == "reduced eval":
        if o["y"] is None:
            raise UsageError("'reduced eval' needs --y")
        return out.Record({"F": reduced_F(o["y"], base), "y": o["y"], **_pdict(base)}, "F"), EXIT_OK
    if c == "reduced minimize":
        res = minimize_reduced_F(base, tol=o["tol"])
        rec = {"y_star": res.y_star, "F_star": res.F_star, "is_symmetric": res.is_symmetric,
               "converged": res.converged, **_pdict(base)}
        return out.Record(rec), EXIT_OK if res.converged else EXIT_SOLVER
    if c == "reduced sweep":
        pts = sweep_reduced(o["n"], o["p"], o["r"], _q_grid(cfg), tol=o["tol"])
        rows = [(pt.q, pt.y_star, pt.F_star, pt.error or "") for pt in pts]
        return out.Table(("q", "y_star", "F_star", "error"), rows), EXIT_OK
    if c == "reduced threshold":
        th = restricted_threshold(o["p"], o["r"], o["n"], _pair(o["bracket"], "bracket"), tol_q=o["tol"])
        return out.Record({"q_c": th.q_c, "uncertainty": th.uncertainty, "q_hat": th.q_hat,
                           "subcritical": th.subcritical}), EXIT_OK
    if c == "ground-state":
        gs = ground_state(o["p"], o["q"], o["n"], mesh=o["mesh"])
        prof = gs.profile
        meta = {"n": o["n"], "p": o["p"], "q": o["q"], "first_zero": gs.first_zero,
                "quotient": gs.quotient, "coeff": gs.coeff, "residual": gs.residual()}
        return out.Table(("radius", "value", "flux"), list(zip(prof.radii, prof.values, prof.flux)), meta), EXIT_OK
    if c == "twoball solve":
        cfg2 = TwoBallConfig.from_t(o["t"], base.n, o["C"])
        sol = solve_fixed_partition(base, cfg2, m=o["mesh"], eps=o["eps"], starts=o["starts"])
        return _solution_table(sol, base, {}), EXIT_OK if sol.converged else EXIT_SOLVER
    if c == "twoball optimize":
        res = optimize_partition(base, C=o["C"], m=o["mesh"], scan_points=o["scan_points"], tol_t=o["tol"])
        table = _solution_table(res.solution, base, {"t_star": res.t_star, "y_star": res.y_star})
        return table, EXIT_OK if res.solution.converged else EXIT_SOLVER
    if c == "twoball sweep":
        grid = _q_grid(cfg)
        diag = bifurcation_sweep(o["n"], o["p"], o["r"], grid, C=o["C"], m=o["mesh"],
                                 scan_points=o["scan_points"], refine_tol=o["tol"])
        for q, msg in diag.errors.items():
            log.warning("q=%s failed: %s", q, msg)
        meta = {"q_critical": diag.q_critical if diag.q_critical is not None else math.nan,
                "exploratory": o["n"] >= 2}
        table = out.Table(("q", "y_star", "lambda_star", "kkt_residual", "mesh"), list(diag.rows()), meta,
                          csv_meta=False)
        return table, EXIT_OK
    if c == "twoball qcrit":
        qc = critical_q(o["n"], o["p"], o["r"], _pair(o["bracket"], "bracket"), tol_q=o["tol"],
                        C=o["C"], m=o["mesh"], scan_points=o["scan_points"])
        rec = {"q_critical": qc, "tol": o["tol"], "mesh": o["mesh"], "exploratory": o["n"] >= 2,
               "n": o["n"], "p": o["p"], "r": o["r"]}
        return out.Record(rec, "q_critical"), EXIT_OK
    raise UsageError(f"unknown command {c!r}")


def _pdict(params: ProblemParams) -> dict:
    return {"n": params.n, "p": params.p, "q": params.q, "r": params.r}


def _verify(cfg: RunConfig) -> int:
    only = [str(v) for v in cfg["only"]] if cfg["only"] else None
    try:
        select(only)
    except KeyError as exc:
        raise UsageError(str(exc.args[0])) from None
    echo = print if cfg.fmt == "text" and not cfg.out else (lambda line: print(line, file=sys.stderr))
    results = run_verify(only, echo=echo)
    if cfg.fmt != "text" or cfg.out:
        rows = [(r.name, r.ok, r.detail, r.seconds, r.budget_s) for r in results]
        out.emit(out.Table(("check", "ok", "detail", "seconds", "budget_s"), rows), cfg.fmt, cfg.out, sys.stdout)
    failed = [r.name for r in results if not r.ok]
    if failed:
        print("verification failed: " + ", ".join(failed), file=sys.stderr)
        return EXIT_VERIFY
    return EXIT_OK


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        cfg = parse_config(argv)
    except UsageError as exc:
        print(f"twistshape: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # argparse: --help or a malformed flag
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if cfg.options.get("verbose") else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if cfg.command == "verify":
            return _verify(cfg)
        result, code = run(cfg)
    except (UsageError, InadmissibleParams, ValueError) as exc:
        print(f"twistshape: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (SolverError, ShootingError, ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"twistshape: solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    try:
        out.emit(result, cfg.fmt, cfg.out, sys.stdout)
    except OSError as exc:
        print(f"twistshape: cannot write {cfg.out}: {exc}", file=sys.stderr)
        return EXIT_IO
    if code == EXIT_SOLVER:
        print("twistshape: solver did not converge (best iterate written)", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
