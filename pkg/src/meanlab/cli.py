"""Configuration-driven experiment runner.

Config comes from a JSON document (--config) with flags overriding file
values.  Every command emits CSV with a fixed header and shortest round-trip
float formatting, so reruns are byte-identical at any parallelism level:
grid points are computed in a thread pool and written in grid order by a
single serializer.

Exit codes: 0 success, 1 usage or parse error, 2 violated precondition,
3 resource limit.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, fields
from typing import Optional

import numpy as np

from . import funcspec as fs
from . import moments as mm
from . import predict as pr
from .errors import (EvaluationError, MeanlabError, PreconditionError,
                     ResourceError, SpecParseError)
from .exprs import parse_spec
from .primesums import (CONDITION_IDS, Params, build_primes, check_condition,
                        default_params)
from .sieve import build_primes as _bp  # noqa: F401  (re-exported for scripts)

COMMANDS = ("primes", "eval", "meanvalue", "check", "predict", "moments",
            "sifted", "decay", "convolve-verify")

_COMPARISON_HEADER = ("formula_id,x,observed_re,observed_im,predicted_re,"
                      "predicted_im,abs_err,rel_err,budget_ratio")
_DECAY_HEADER = ("formula_id,x,eps,delta,observed_re,observed_im,predicted_re,"
                 "predicted_im,abs_err,rel_err,budget_ratio")


class UsageError(MeanlabError):
    """Bad command line or config contents."""


@dataclass
class ExperimentConfig:
    command: str = ""
    f_expr: Optional[str] = None
    r_expr: Optional[str] = None
    h_expr: Optional[str] = None
    x_grid: list = field(default_factory=list)
    params: Optional[Params] = None
    D: int = 1
    tau: float = 0.0
    m_list: list = field(default_factory=lambda: [1, 2, 3, 4])
    formula: str = "T1_13"
    output_path: Optional[str] = None
    dist_output_path: Optional[str] = None
    parallelism: int = 1
    threshold: float = 10.0
    grid_size: int = 64
    seed_params: bool = False


def _fmt(v) -> str:
    """Shortest round-trip decimal for floats; plain ints; lowercase bools."""
    if isinstance(v, bool):
        return str(v).lower()
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return repr(float(v))


def _fmt_complex(v) -> str:
    c = complex(v)
    return f"{_fmt(c.real)},{_fmt(c.imag)}"


def _parse_x_list(text) -> list:
    if isinstance(text, (list, tuple)):
        return [int(v) for v in text]
    out = []
    for part in str(text).split(","):
        part = part.strip()
        if not part:
            continue
        out.append(int(float(part)))
    if not out:
        raise UsageError("empty x list")
    return out


def _mult_spec(expr: Optional[str], what: str) -> fs.MultSpec:
    if expr is None:
        raise UsageError(f"missing required spec expression --{what}")
    spec = parse_spec(expr)
    if not isinstance(spec, fs.MultSpec):
        raise UsageError(f"--{what} must be a multiplicative spec, got {expr!r}")
    return spec


def _add_spec(expr: Optional[str]) -> fs.AddSpec:
    if expr is None:
        raise UsageError("missing required spec expression --h")
    spec = parse_spec(expr)
    if not isinstance(spec, fs.AddSpec):
        raise UsageError(f"--h must be an additive spec, got {expr!r}")
    return spec


def _resolve_params(config: ExperimentConfig, x: int) -> Params:
    if config.params is not None:
        return config.params
    p = default_params(x)
    p.tau = config.tau
    return p


def _write(config: ExperimentConfig, lines: list, path: Optional[str] = None):
    text = "\n".join(lines) + "\n"
    path = path or config.output_path
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _map_grid(config: ExperimentConfig, worker, items) -> list:
    """Apply worker over items, preserving order; thread count is a knob that
    must not change output bytes."""
    if config.parallelism <= 1 or len(items) <= 1:
        return [worker(it) for it in items]
    with ThreadPoolExecutor(max_workers=config.parallelism) as pool:
        return list(pool.map(worker, items))


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def _cmd_primes(config: ExperimentConfig) -> int:
    x = config.x_grid[-1]
    table = build_primes(x)
    lines = ["index,prime"]
    lines.extend(f"{i},{int(p)}" for i, p in enumerate(table.primes))
    _write(config, lines)
    return 0


def _cmd_eval(config: ExperimentConfig) -> int:
    x = config.x_grid[-1]
    spec = parse_spec(config.f_expr) if config.f_expr else None
    if spec is None:
        raise UsageError("eval requires --f")
    if isinstance(spec, fs.MultSpec):
        table = fs.eval_mult(spec, x)
    else:
        table = fs.eval_add(spec, x)
    lines = ["n,value_re,value_im"]
    vals = table.values
    lines.extend(f"{n},{_fmt_complex(vals[n])}" for n in range(1, x + 1))
    _write(config, lines)
    return 0


def _cmd_meanvalue(config: ExperimentConfig) -> int:
    f = _mult_spec(config.f_expr, "f")
    xs = config.x_grid
    table = fs.eval_mult(f, xs[-1])
    lines = ["x,observed_re,observed_im"]
    for x in xs:
        lines.append(f"{x},{_fmt_complex(fs.summatory(table, x))}")
    _write(config, lines)
    return 0


def _cmd_check(config: ExperimentConfig) -> int:
    f = _mult_spec(config.f_expr, "f")
    r = _mult_spec(config.r_expr or config.f_expr, "r")
    h = parse_spec(config.h_expr) if config.h_expr else None
    x = config.x_grid[-1]
    params = _resolve_params(config, x)
    primes = build_primes(x)
    ids = ["CLASS_M", "C1_3", "C1_4", "C1_5", "C1_7", "C1_8", "C1_12", "C4_4"]
    if h is not None:
        ids.append("C3_1_iv")
    lines = ["condition_id,holds,measured_constant,worst_y"]
    for cid in ids:
        rep = check_condition(cid, params, f, r, x, h=h, primes=primes,
                              threshold=config.threshold,
                              grid_points=config.grid_size)
        lines.append(rep.csv_row())
    _write(config, lines)
    return 0


def _comparison_row(formula_id: str, x: int, comp: pr.Comparison) -> str:
    return (f"{formula_id},{x},{_fmt_complex(comp.observed)},"
            f"{_fmt_complex(comp.predicted)},{_fmt(comp.abs_err)},"
            f"{_fmt(comp.rel_err)},{_fmt(comp.budget_ratio)}")


def _predict_at(formula: str, f, r, x, params, f_table, r_table, primes,
                tau: float, D: int, grid_size: int):
    """(observed, prediction) for one formula at one x."""
    if formula == "T1_6":
        prediction = pr.predict_1_6(f, params, x, primes=primes)
        observed = fs.summatory(f_table, x)
    elif formula == "T1_13":
        prediction = pr.predict_1_13(f, r, x, params, r_table=r_table,
                                     primes=primes)
        observed = fs.summatory(f_table, x)
    elif formula == "T2_3":
        prediction = pr.predict_2_3(f, r, tau, x, params, r_table=r_table,
                                    primes=primes)
        observed = fs.summatory(f_table, x)
    elif formula == "T4_5":
        prediction = pr.predict_4_5(r, D, params, x, r_table=r_table,
                                    primes=primes)
        observed = fs.summatory(f_table, x)
    else:
        raise UsageError(f"unknown formula {formula!r} "
                         "(expected T1_6, T1_13, T2_3 or T4_5)")
    return observed, prediction


def _tables_for(config: ExperimentConfig, f, r, x):
    primes = build_primes(x)
    if config.formula == "T4_5":
        f_table = fs.eval_mult(fs.restrict_coprime(r, config.D), x)
    else:
        f_table = fs.eval_mult(f, x)
    if config.formula in ("T1_13", "T2_3", "T4_5"):
        r_table = f_table if r == f else fs.eval_mult(r, x)
    else:
        r_table = None
    return primes, f_table, r_table


def _cmd_predict(config: ExperimentConfig) -> int:
    f = _mult_spec(config.f_expr or config.r_expr, "f")
    r = _mult_spec(config.r_expr or config.f_expr, "r")
    x = config.x_grid[-1]
    params = _resolve_params(config, x)
    primes, f_table, r_table = _tables_for(config, f, r, x)
    observed, prediction = _predict_at(config.formula, f, r, x, params,
                                       f_table, r_table, primes, config.tau,
                                       config.D, config.grid_size)
    comp = pr.compare(observed, prediction)
    _write(config, [_COMPARISON_HEADER,
                    _comparison_row(prediction.formula_id, x, comp)])
    return 0


def _cmd_sifted(config: ExperimentConfig) -> int:
    r = _mult_spec(config.r_expr or config.f_expr, "r")
    x = config.x_grid[-1]
    params = _resolve_params(config, x)
    primes = build_primes(x)
    r_table = fs.eval_mult(r, x)
    sifted_table = fs.eval_mult(fs.restrict_coprime(r, config.D), x)
    prediction = pr.predict_4_5(r, config.D, params, x, r_table=r_table,
                                primes=primes)
    comp = pr.compare(fs.summatory(sifted_table, x), prediction)
    _write(config, [_COMPARISON_HEADER, _comparison_row("T4_5", x, comp)])
    return 0


def _cmd_decay(config: ExperimentConfig) -> int:
    f = _mult_spec(config.f_expr or config.r_expr, "f")
    r = _mult_spec(config.r_expr or config.f_expr, "r")
    xs = config.x_grid
    xmax = xs[-1]
    primes, f_table, r_table = _tables_for(config, f, r, xmax)

    def worker(x):
        params = default_params(x)
        params.tau = config.tau
        observed, prediction = _predict_at(config.formula, f, r, x, params,
                                           f_table, r_table, primes,
                                           config.tau, config.D,
                                           config.grid_size)
        comp = pr.compare(observed, prediction)
        delta = prediction.extras.get("delta", math.nan)
        return (f"{prediction.formula_id},{x},{_fmt(params.eps)},{_fmt(delta)},"
                f"{_fmt_complex(comp.observed)},{_fmt_complex(comp.predicted)},"
                f"{_fmt(comp.abs_err)},{_fmt(comp.rel_err)},"
                f"{_fmt(comp.budget_ratio)}")

    lines = [_DECAY_HEADER]
    lines.extend(_map_grid(config, worker, xs))
    _write(config, lines)
    return 0


def _cmd_moments(config: ExperimentConfig) -> int:
    r = _mult_spec(config.r_expr or config.f_expr, "r")
    h = _add_spec(config.h_expr)
    x = config.x_grid[-1]
    primes = build_primes(x)
    lines = ["m,G_m,nu_m,normalized,budget"]
    for m in config.m_list:
        rep = mm.moment_G(int(m), h, r, x, primes=primes, check=False)
        lines.append(f"{rep.m},{_fmt(rep.G_m)},{_fmt(rep.nu_m)},"
                     f"{_fmt(rep.normalized)},{_fmt(rep.budget)}")
    _write(config, lines)
    if config.dist_output_path:
        rep = mm.ek_report(h, r, x, primes=primes, check=False)
        dlines = ["z,F,Phi,diff"]
        for z, fv, pv in zip(rep.z_grid, rep.F_values, rep.Phi_values):
            dlines.append(f"{_fmt(z)},{_fmt(fv)},{_fmt(pv)},{_fmt(fv - pv)}")
        dlines.append(f"sup_distance,{_fmt(rep.E)},{_fmt(rep.D)},"
                      f"{_fmt(rep.sup_distance)}")
        _write(config, dlines, path=config.dist_output_path)
    return 0


def _cmd_convolve_verify(config: ExperimentConfig) -> int:
    f = _mult_spec(config.f_expr, "f")
    g = _mult_spec(config.r_expr, "r")
    x = config.x_grid[-1]
    ft = fs.eval_mult(f, x)
    gt = fs.eval_mult(g, x)
    via_spec = fs.eval_mult(fs.convolve_spec(f, g), x)
    via_table = fs.convolve_table(ft, gt, x)
    diff = float(np.max(np.abs(via_spec.values - via_table.values)))
    _write(config, ["x,max_abs_diff", f"{x},{_fmt(diff)}"])
    return 0


_DISPATCH = {
    "primes": _cmd_primes,
    "eval": _cmd_eval,
    "meanvalue": _cmd_meanvalue,
    "check": _cmd_check,
    "predict": _cmd_predict,
    "moments": _cmd_moments,
    "sifted": _cmd_sifted,
    "decay": _cmd_decay,
    "convolve-verify": _cmd_convolve_verify,
}


def run(config: ExperimentConfig) -> int:
    """Execute one experiment; outputs are deterministic for a fixed config."""
    if config.command not in _DISPATCH:
        raise UsageError(f"unknown command {config.command!r}")
    if not config.x_grid:
        raise UsageError("no x values given (use --x or the config file)")
    if sorted(config.x_grid) != list(config.x_grid):
        raise UsageError("x grid must be ascending")
    if config.seed_params:
        params = _resolve_params(config, config.x_grid[-1])
        sys.stdout.write(json.dumps(params.as_dict(), sort_keys=True) + "\n")
    return _DISPATCH[config.command](config)


# ---------------------------------------------------------------------------
# argument handling
# ---------------------------------------------------------------------------

class _ArgumentParser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _build_parser() -> _ArgumentParser:
    parser = _ArgumentParser(prog="meanlab", description=__doc__,
                             formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", help="JSON config file")
    parser.add_argument("--f", dest="f_expr", help="spec expression for f")
    parser.add_argument("--r", dest="r_expr", help="spec expression for r")
    parser.add_argument("--h", dest="h_expr", help="spec expression for h")
    parser.add_argument("--x", help="x bound or comma-separated ascending grid")
    parser.add_argument("--tau", type=float)
    parser.add_argument("--D", type=int)
    parser.add_argument("--m", help="comma-separated moment orders")
    parser.add_argument("--formula", choices=("T1_6", "T1_13", "T2_3", "T4_5"))
    parser.add_argument("--out", dest="output_path")
    parser.add_argument("--dist-out", dest="dist_output_path")
    parser.add_argument("--threads", type=int, dest="parallelism")
    parser.add_argument("--threshold", type=float)
    parser.add_argument("--grid-size", type=int, dest="grid_size")
    parser.add_argument("--seed-params", action="store_true",
                        help="dump the resolved parameter bundle as JSON")
    return parser


_PARAM_FIELDS = {f.name for f in fields(Params)}


def _config_from(args) -> ExperimentConfig:
    raw = {}
    if args.config:
        with open(args.config, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
    config = ExperimentConfig(command=args.command)
    config.f_expr = args.f_expr or raw.get("f")
    config.r_expr = args.r_expr or raw.get("r")
    config.h_expr = args.h_expr or raw.get("h")
    x = args.x if args.x is not None else raw.get("x")
    if x is not None:
        config.x_grid = _parse_x_list(x)
    config.tau = args.tau if args.tau is not None else float(raw.get("tau", 0.0))
    config.D = args.D if args.D is not None else int(raw.get("D", 1))
    m = args.m if args.m is not None else raw.get("m")
    if m is not None:
        config.m_list = [int(v) for v in
                         (m.split(",") if isinstance(m, str) else m)]
    config.formula = args.formula or raw.get("formula", "T1_13")
    config.output_path = args.output_path or raw.get("out")
    config.dist_output_path = args.dist_output_path or raw.get("dist_out")
    config.parallelism = (args.parallelism if args.parallelism is not None
                          else int(raw.get("threads", 1)))
    config.threshold = (args.threshold if args.threshold is not None
                        else float(raw.get("threshold", 10.0)))
    if args.grid_size is not None:
        config.grid_size = args.grid_size
    elif "grid_size" in raw:
        config.grid_size = int(raw["grid_size"])
    config.seed_params = args.seed_params
    pdict = raw.get("params")
    if pdict is not None:
        unknown = set(pdict) - _PARAM_FIELDS
        if unknown:
            raise UsageError(f"unknown params fields: {sorted(unknown)}")
        config.params = Params(**pdict)
    return config


def main(argv=None) -> int:
    try:
        args = _build_parser().parse_args(argv)
        config = _config_from(args)
        return run(config)
    except (UsageError, SpecParseError, ValueError) as exc:
        print(f"meanlab: error: {exc}", file=sys.stderr)
        return 1
    except (PreconditionError, EvaluationError) as exc:
        print(f"meanlab: precondition failed: {exc}", file=sys.stderr)
        return 2
    except ResourceError as exc:
        print(f"meanlab: resource limit: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
