"""Command-line front end.

Exit codes: 0 success / check passed; 2 a proven-inequality check failed;
1 usage or I/O errors (including hypothesis violations, each reported with
the theorem's one-line hypothesis reminder).

Reports are byte-identical across runs for a fixed --seed at --threads 1:
runtime_ms is emitted as 0 unless --timings is given, because wall-clock
noise would break reproducibility, which is the product here.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from fractions import Fraction

import numpy as np

from . import classical, extremal, verify
from .cube import (
    SCALAR,
    TargetSpace,
    function_from_json,
    fwht,
    ifwht,
    load_function,
    save_function,
)


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage errors are exit 1, never 2
        self.print_usage(sys.stderr)
        sys.stderr.write(f"error: {message}\n")
        sys.exit(1)


def parse_exponent(text: str) -> float:
    """Exponent values: floats, 'inf', or fractions like 4/3."""
    text = text.strip().lower()
    if text in ("inf", "infinity", "oo"):
        return math.inf
    if "/" in text:
        return float(Fraction(text))
    return float(text)


def parse_target(text: str) -> TargetSpace:
    """scalar | lq:Q:M, e.g. lq:inf:3 for l_inf^3."""
    if text == "scalar":
        return SCALAR
    parts = text.split(":")
    if len(parts) != 3 or parts[0] != "lq":
        raise ValueError("target must be 'scalar' or 'lq:Q:M'")
    return TargetSpace("lq", parse_exponent(parts[1]), int(parts[2]))


def _float_list(text: str):
    return tuple(parse_exponent(x) for x in text.split(",") if x)


def _write(text: str, out: str | None):
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _hypotheses_epilog() -> str:
    lines = ["theorem hypotheses:"]
    for tid in sorted(verify.THEOREMS):
        lines.append(f"  {tid}: {verify.hypothesis_line(tid)}")
    return "\n".join(lines)


def build_parser() -> _Parser:
    parser = _Parser(
        prog="cubespectral",
        description="Spectral analysis and inequality verification on the Hamming cube.",
        epilog="Memory guard: CUBE_SPECTRAL_MAX_N (default 22).",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    pv = sub.add_parser(
        "verify",
        help="run one registered theorem check",
        epilog=_hypotheses_epilog(),
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    pv.add_argument("--thm", required=True, help="theorem id (see epilog for hypotheses)")
    pv.add_argument("--n", type=int, default=6, help="cube dimension")
    pv.add_argument("--d", type=int, help="degree / tail level, per the hypothesis")
    pv.add_argument("--m", type=int, help="spectral bandwidth (band [d, d+m] checks)")
    pv.add_argument("--k", type=int, help="derivative order (MARKOV_HIGHER_K)")
    pv.add_argument("--p", type=parse_exponent, help="outer exponent; 'inf' and fractions accepted")
    pv.add_argument("--q", type=parse_exponent, help="second exponent (moment/entropy checks)")
    pv.add_argument("--beta", type=float, help="fractional power (NAOS_INTERP)")
    pv.add_argument("--t", type=_float_list, default=verify.DEFAULT_T_GRID,
                    help="comma-separated time grid")
    pv.add_argument("--target", type=parse_target, default=SCALAR,
                    help="scalar | lq:Q:M (e.g. lq:inf:3)")
    pv.add_argument("--trials", type=int, default=200)
    pv.add_argument("--seed", type=int, default=0, help="never wall-clock; defaults to 0")
    pv.add_argument("--threads", type=int, default=1, help="worker cap; results thread-count invariant")
    pv.add_argument("--tol", type=float, help="override the default pass tolerance")
    pv.add_argument("--witness-only", action="store_true",
                    help="evaluate the registered extremal witness instead of random trials")
    pv.add_argument("--timings", action="store_true", help="emit measured runtime_ms (breaks byte-identity)")
    pv.add_argument("--out", help="output path (default stdout)")
    pv.add_argument("--format", choices=("json", "csv"), default="json")

    ps = sub.add_parser("sweep", help="run a check across an axis of values")
    ps.add_argument("--thm", required=True)
    ps.add_argument("--axis", required=True, choices=verify.SWEEP_AXES)
    ps.add_argument("--values", required=True, type=_float_list)
    for flag, typ, default in (
        ("--n", int, 6), ("--d", int, None), ("--m", int, None), ("--k", int, None),
        ("--p", parse_exponent, None), ("--q", parse_exponent, None),
        ("--trials", int, 100), ("--seed", int, 0), ("--threads", int, 1),
    ):
        ps.add_argument(flag, type=typ, default=default)
    ps.add_argument("--t", type=_float_list, default=verify.DEFAULT_T_GRID)
    ps.add_argument("--target", type=parse_target, default=SCALAR)
    ps.add_argument("--out", help="output path (default stdout)")
    ps.add_argument("--format", choices=("json", "csv"), default="csv")
    ps.add_argument("--timings", action="store_true")

    pe = sub.add_parser("extremal", help="maximize an operator-ratio functional")
    pe.add_argument("--op", required=True,
                    help="laplacian | heat:T | fractional:GAMMA | w:RE,IM")
    pe.add_argument("--p-in", type=parse_exponent, default=2.0)
    pe.add_argument("--p-out", type=parse_exponent, default=2.0)
    pe.add_argument("--band", default=None, help="LO,HI spectral band (default full)")
    pe.add_argument("--n", type=int, default=6)
    pe.add_argument("--radial", action="store_true", help="restrict to the radial subspace")
    pe.add_argument("--restarts", type=int, default=4)
    pe.add_argument("--iters", type=int, default=150)
    pe.add_argument("--step", type=float, default=0.5)
    pe.add_argument("--grad", choices=("analytic", "central-difference"), default="analytic")
    pe.add_argument("--seed", type=int, default=0)
    pe.add_argument("--trace-out", help="write the per-iteration trace CSV here")
    pe.add_argument("--out")
    pe.add_argument("--format", choices=("json",), default="json")

    pc = sub.add_parser("scan", help="sharpness scan over a witness family")
    pc.add_argument("--family", required=True, choices=("MARKOV_D2", "GRAD_INF_ENDPOINT"))
    pc.add_argument("--d-values", required=True, type=_float_list)
    pc.add_argument("--n-rule", default="100*d^2", help="e.g. 100*d^2, d^2, or a constant")
    pc.add_argument("--out")
    pc.add_argument("--format", choices=("csv", "json"), default="csv")

    pk = sub.add_parser("constants", help="closed-form constants for an exponent")
    pk.add_argument("--p", type=parse_exponent, required=True)
    pk.add_argument("--grid-points", type=int, default=10_000)
    pk.add_argument("--out")

    pt = sub.add_parser("transform", help="FWHT a function file (or invert a spectrum)")
    pt.add_argument("--in", dest="infile", required=True)
    pt.add_argument("--out", required=True)
    pt.add_argument("--inverse", action="store_true")

    po = sub.add_parser("opnorm", help="lower-bound estimate of ||w^Delta||_{p->p}")
    po.add_argument("--w", required=True, help="RE,IM")
    po.add_argument("--p", type=parse_exponent, required=True)
    po.add_argument("--p-out", type=parse_exponent, default=None)
    po.add_argument("--n", type=int, default=4)
    po.add_argument("--restarts", type=int, default=4)
    po.add_argument("--iters", type=int, default=150)
    po.add_argument("--seed", type=int, default=0)
    po.add_argument("--out")
    return parser


def _cmd_verify(args) -> int:
    spec = verify.CheckSpec(
        theorem=args.thm, n=args.n, d=args.d, m=args.m, k=args.k, p=args.p,
        q=args.q, beta=args.beta, t_grid=tuple(args.t), trials=args.trials,
        seed=args.seed, target=args.target, witness_only=args.witness_only,
        tol=args.tol, threads=args.threads,
    )
    report = verify.run_check(spec)
    if args.format == "csv":
        _write(verify.reports_to_csv([report]), args.out)
    else:
        _write(report.to_json(timing=args.timings), args.out)
    if verify.THEOREMS[args.thm].kind in ("proven", "gridcheck", "optimizer", "equivalence"):
        return 0 if report.passed else 2
    return 0


def _cmd_sweep(args) -> int:
    template = verify.CheckSpec(
        theorem=args.thm, n=args.n, d=args.d, m=args.m, k=args.k, p=args.p,
        q=args.q, t_grid=tuple(args.t), trials=args.trials, seed=args.seed,
        target=args.target, threads=args.threads,
    )
    values = args.values
    if args.axis in ("n", "d", "m", "k", "trials"):
        values = tuple(int(v) for v in values)
    reports = verify.sweep(template, args.axis, values)
    if args.format == "csv":
        _write(verify.reports_to_csv(reports), args.out)
    else:
        docs = [
            {"error": str(r)} if isinstance(r, Exception) else r.to_json_dict(timing=args.timings)
            for r in reports
        ]
        _write(json.dumps(docs, indent=2), args.out)
    failed = any(
        not r.passed
        for r in reports
        if not isinstance(r, Exception) and verify.THEOREMS[args.thm].kind != "measured"
    )
    return 2 if failed else 0


def _parse_op(text: str):
    parts = text.split(":")
    name = parts[0]
    if name == "laplacian":
        return "laplacian", None
    if name == "heat":
        return "heat", float(parts[1])
    if name == "fractional":
        return "fractional_laplacian", float(parts[1])
    if name == "w":
        re_, im = (float(x) for x in parts[1].split(","))
        return "w_delta", complex(re_, im)
    raise ValueError(f"unknown operator spec {text!r}")


def _cmd_extremal(args) -> int:
    op, param = _parse_op(args.op)
    from .cube import SpectralBand

    band = (
        SpectralBand(*(int(x) for x in args.band.split(","))) if args.band
        else SpectralBand(0, args.n)
    )
    cfg = extremal.OptimizerConfig(
        restarts=args.restarts, max_iters=args.iters, step_init=args.step,
        grad_mode=args.grad, seed=args.seed,
    )
    res = extremal.maximize_ratio(
        op, args.p_in, args.p_out, band, args.n, cfg, op_param=param, radial=args.radial
    )
    doc = {
        "op": args.op, "p_in": _json_num(args.p_in), "p_out": _json_num(args.p_out),
        "band": [band.low, band.high], "n": args.n, "radial": args.radial,
        "ratio": res.ratio, "best_restart": res.best_restart,
        "evaluations": res.evaluations, "seed": args.seed,
    }
    _write(json.dumps(doc, indent=2), args.out)
    if args.trace_out:
        rows = ["iter,ratio,step"] + [f"{i},{r!r},{s!r}" for i, r, s in res.trace]
        with open(args.trace_out, "w") as fh:
            fh.write("\n".join(rows) + "\n")
    return 0


def _cmd_scan(args) -> int:
    rows = extremal.sharpness_scan(args.family, [int(d) for d in args.d_values], args.n_rule)
    if args.format == "json":
        _write(json.dumps(rows, indent=2), args.out)
    else:
        header = "d,n,ratio,bound,ratio_over_bound,closed_form"
        lines = [header] + [
            f"{r['d']},{r['n']},{r['ratio']!r},{r['bound']!r},"
            f"{r['ratio_over_bound']!r},{r['closed_form']!r}"
            for r in rows
        ]
        _write("\n".join(lines) + "\n", args.out)
    return 0


def _json_num(x):
    if x is None:
        return None
    if isinstance(x, float) and math.isinf(x):
        return "inf"
    return x


def _cmd_constants(args) -> int:
    theta, r_p = classical.theta_and_radius(args.p)
    const, meta = classical.moment_comp1_constant(args.grid_points, details=True)
    doc = {
        "p": _json_num(args.p),
        "theta_p": theta,
        "r_p": r_p,
        "momentComp1Constant": const,
        "grid": {**meta["grid"], "p_star": meta["p_star"]},
    }
    _write(json.dumps(doc, indent=2), args.out)
    return 0


def _cmd_transform(args) -> int:
    obj = load_function(args.infile)
    from .cube import CubeFunction, Spectrum

    if args.inverse:
        out = ifwht(obj) if isinstance(obj, Spectrum) else obj
    else:
        out = fwht(obj) if isinstance(obj, CubeFunction) else obj
    save_function(out, args.out)
    return 0


def _cmd_opnorm(args) -> int:
    re_, im = (float(x) for x in args.w.split(","))
    cfg = extremal.OptimizerConfig(restarts=args.restarts, max_iters=args.iters, seed=args.seed)
    res = extremal.estimate_operator_norm(complex(re_, im), args.p, args.n, cfg, p_out=args.p_out)
    doc = {
        "w": [re_, im], "p": _json_num(args.p),
        "p_out": _json_num(args.p_out if args.p_out is not None else args.p),
        "n": args.n, "estimate": res.ratio, "lower_bound": True, "seed": args.seed,
    }
    _write(json.dumps(doc, indent=2), args.out)
    return 0


_COMMANDS = {
    "verify": _cmd_verify,
    "sweep": _cmd_sweep,
    "extremal": _cmd_extremal,
    "scan": _cmd_scan,
    "constants": _cmd_constants,
    "transform": _cmd_transform,
    "opnorm": _cmd_opnorm,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (ValueError, KeyError) as exc:
        thm = getattr(args, "thm", None)
        if thm and thm in verify.THEOREMS:
            sys.stderr.write(f"error: {exc}\nhypothesis[{thm}]: {verify.hypothesis_line(thm)}\n")
        else:
            sys.stderr.write(f"error: {exc}\n")
        return 1
    except OSError as exc:
        sys.stderr.write(f"io error: {exc}\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
