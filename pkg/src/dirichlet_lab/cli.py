"""dlab: reproducible command-line experiments over the library modules.

One invocation runs exactly one experiment and writes one machine-readable
document (JSON by default, CSV where a row shape is defined) to stdout or
--out.  JSON documents embed the resolved experiment configuration so a run
can be replayed from its own output.  Exit codes: 0 success, 1 precondition
error, 2 numerical failure, 64 usage.
"""

import argparse
import json
import os
import re
import sys

from .coefficients import SeriesSpec, builtin_series, load_source
from .convolution import inverse_coefficients
from .errors import NumericalError, PreconditionError
from .moments import QuadratureConfig, estimate_moment
from .parallel import resolve_threads
from .series import default_evaluator, smooth_truncation_eval
from .torus import Box, FlowConfig, box_hitting_fraction, standard_box_suite
from .zeros import (
    Rectangle,
    density_table,
    mollifier_tail_decay,
    recurrence_scan,
    rouche_verify,
    zero_scan,
)

__all__ = ["UsageError", "main", "run"]


class UsageError(ValueError):
    """Bad argv: unknown subcommand/flag or malformed value (exit 64)."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


_NUM = r"(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?"


def _parse_complex(text: str) -> complex:
    """Complex literals of the form a+bi (also bare a, bare bi)."""
    t = text.strip().replace(" ", "")
    m = re.fullmatch(r"([+-]?%s)" % _NUM, t)
    if m:
        return complex(float(m.group(1)), 0.0)
    m = re.fullmatch(r"([+-]?(?:%s)?)i" % _NUM, t)
    if m:
        c = m.group(1)
        im = 1.0 if c in ("", "+") else -1.0 if c == "-" else float(c)
        return complex(0.0, im)
    m = re.fullmatch(r"([+-]?%s)([+-](?:%s)?)i" % (_NUM, _NUM), t)
    if m:
        c = m.group(2)
        im = 1.0 if c == "+" else -1.0 if c == "-" else float(c)
        return complex(float(m.group(1)), im)
    raise UsageError("complex values use the form a+bi: %r" % text)


def _parse_floats(text: str, what: str):
    try:
        return [float(x) for x in text.split(",")]
    except ValueError:
        raise UsageError("%s must be comma-separated numbers: %r" % (what, text))


def _parse_ints(text: str, what: str):
    try:
        return [int(x) for x in text.split(",")]
    except ValueError:
        raise UsageError("%s must be comma-separated integers: %r" % (what, text))


def _parse_rect(text: str) -> Rectangle:
    vals = _parse_floats(text, "--rect")
    if len(vals) != 4:
        raise UsageError("--rect takes sigma_lo,sigma_hi,t_lo,t_hi")
    return Rectangle(*vals)


def _parse_box(text: str, dims: int) -> Box:
    vals = _parse_floats(text, "--box")
    if len(vals) != 2 * dims:
        raise UsageError("--box takes one lo,hi pair per dimension")
    return Box(lo=tuple(vals[0::2]), hi=tuple(vals[1::2]))


def _resolve_series(ref: str) -> SeriesSpec:
    if ref.startswith("builtin:"):
        return builtin_series(ref[len("builtin:") :])
    if os.path.exists(ref):
        return load_source(ref)
    return builtin_series(ref)


def _cplx(z: complex):
    return {"re": float(z.real), "im": float(z.imag)}


def _csv_cell(c) -> str:
    if c is None:
        return ""
    if isinstance(c, float):
        return repr(float(c))  # plain shortest round-trip, even for np floats
    return str(c)


def _render(args, config, result, csv_header, csv_rows) -> str:
    if args.fmt == "csv":
        if csv_header is None:
            raise UsageError("%s emits JSON only" % args.subcommand)
        lines = [csv_header]
        lines.extend(",".join(_csv_cell(c) for c in row) for row in csv_rows)
        return "\n".join(lines) + "\n"
    doc = {"experiment": args.subcommand, "config": config, "result": result}
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def _base_config(args, **extra):
    # threads intentionally left out: outputs must not vary with worker count.
    cfg = {"subcommand": args.subcommand, "seed": args.seed, "output": args.fmt}
    if hasattr(args, "series"):
        cfg["series"] = args.series
    cfg.update(extra)
    return cfg


# ---------------------------------------------------------------------------
# Subcommand handlers: each returns (config, result, csv_header, csv_rows).


def _cmd_moment(args, threads):
    spec = _resolve_series(args.series)
    cfg = QuadratureConfig(step=args.step, rule=args.rule)
    evaluator = default_evaluator(spec, args.N)
    rep = estimate_moment(
        spec, args.sigma, args.k, args.T,
        cfg=cfg, evaluator=evaluator, threads=threads,
    )
    config = _base_config(
        args, sigma=args.sigma, k=args.k, T=args.T, step=args.step,
        rule=args.rule, N=args.N,
    )
    result = {
        "sigma": rep.sigma, "k": rep.k, "T": rep.T, "step": rep.step,
        "estimate": rep.estimate, "target": rep.target,
        "rel_error": rep.rel_error, "rule": rep.rule, "window": rep.window,
    }
    rows = [(rep.sigma, rep.k, rep.T, rep.step, rep.estimate, rep.target, rep.rel_error)]
    return config, result, "sigma,k,T,step,estimate,target,rel_error", rows


def _cmd_zeros(args, threads):
    spec = _resolve_series(args.series)
    rect = _parse_rect(args.rect)
    f = default_evaluator(spec, args.N)
    records = zero_scan(f, rect, tol=args.tol, boundary_step=args.step)
    config = _base_config(
        args, rect=[rect.sigma_lo, rect.sigma_hi, rect.t_lo, rect.t_hi],
        tol=args.tol, step=args.step, N=args.N,
    )
    result = {
        "count": len(records),
        "zeros": [
            {
                "re": rec.location.real,
                "im": rec.location.imag,
                "residual": rec.refinement_residual,
                "confirmed": rec.winding_confirmed,
            }
            for rec in records
        ],
    }
    rows = [
        (rec.location.real, rec.location.imag, rec.refinement_residual)
        for rec in records
    ]
    return config, result, "re,im,residual", rows


def _cmd_density(args, threads):
    spec = _resolve_series(args.series)
    sigmas = _parse_floats(args.sigma_list, "--sigma-list")
    f = default_evaluator(spec, args.N)
    table = density_table(
        f, sigmas, args.T,
        sigma_hi=args.sigma_hi,
        boundary_step=args.step,
        exclude_origin=spec.has_pole_at_one,
    )
    config = _base_config(
        args, sigma_list=sigmas, T=args.T, sigma_hi=args.sigma_hi,
        step=args.step, N=args.N,
    )
    result = {
        "rows": [{"sigma": s, "T": T, "count": c} for s, T, c in table]
    }
    rows = [(s, T, c) for s, T, c in table]
    return config, result, "sigma,T,count", rows


def _cmd_flow(args, threads):
    if args.suite and args.box:
        raise UsageError("--box and --suite are mutually exclusive")
    if args.suite:
        boxes = standard_box_suite()
    elif args.box:
        boxes = [_parse_box(args.box, args.dims)]
    else:
        raise UsageError("flow needs --box or --suite")
    out_rows = []
    for box in boxes:
        cfg = FlowConfig(dims=box.dims, T=args.T, step=args.step)
        est = box_hitting_fraction(cfg, box, threads=threads)
        target = box.volume
        out_rows.append((box, est, target, abs(est - target)))
    config = _base_config(args, dims=args.dims, T=args.T, step=args.step)
    if args.suite:
        config["suite"] = args.suite
    else:
        config["box"] = list(sum(zip(boxes[0].lo, boxes[0].hi), ()))
    result = {
        "rows": [
            {
                "t_horizon": args.T,
                "estimate": est,
                "target": target,
                "error": err,
                "box": {"lo": list(box.lo), "hi": list(box.hi)},
            }
            for box, est, target, err in out_rows
        ]
    }
    rows = [(args.T, est, target, err) for _, est, target, err in out_rows]
    return config, result, "t-horizon,estimate,target,error", rows


def _cmd_recur(args, threads):
    spec = _resolve_series(args.series)
    f = default_evaluator(spec, args.N)
    rep = recurrence_scan(
        f, args.s0, args.r, args.T, args.t_step, grid=args.grid, threads=threads
    )
    verified = [
        rouche_verify(f, rep.s0, t_j, rep.r, rep.m0) for t_j in rep.hits
    ]
    config = _base_config(
        args, s0=_cplx(args.s0), r=args.r, T=args.T, t_step=args.t_step,
        grid=args.grid, N=args.N,
    )
    result = {
        "s0": _cplx(rep.s0),
        "r": rep.r,
        "m0": rep.m0,
        "T": rep.T,
        "t_step": rep.t_step,
        "threshold": rep.threshold,
        "hits": list(rep.hits),
        "hit_integrals": list(rep.hit_integrals),
        "verified": verified,
        "lower_bound_rate": rep.lower_bound_rate,
    }
    return config, result, None, None


def _cmd_mollify(args, threads):
    spec = _resolve_series(args.series)
    xs = _parse_ints(args.X_list, "--X-list")
    a = spec.coeffs.dense(args.N)
    b = inverse_coefficients(spec, args.N)
    pairs = mollifier_tail_decay(a, b, args.sigma, xs, args.N)
    config = _base_config(args, sigma=args.sigma, X_list=xs, N=args.N)
    result = {"pairs": [{"X": X, "tail": tail} for X, tail in pairs]}
    rows = [(X, tail) for X, tail in pairs]
    return config, result, "X,tail", rows


def _cmd_truncate(args, threads):
    spec = _resolve_series(args.series)
    value, bound = smooth_truncation_eval(spec, args.s, args.k, args.M)
    config = _base_config(args, s=_cplx(args.s), k=args.k, M=args.M)
    result = {"value": _cplx(value), "tail_bound": bound, "k": args.k, "M": args.M}
    rows = [(value.real, value.imag, bound)]
    return config, result, "re,im,tail_bound", rows


_HANDLERS = {
    "moment": _cmd_moment,
    "zeros": _cmd_zeros,
    "density": _cmd_density,
    "flow": _cmd_flow,
    "recur": _cmd_recur,
    "mollify": _cmd_mollify,
    "truncate": _cmd_truncate,
}


def _add_common(sp, series=True):
    if series:
        sp.add_argument(
            "--series", required=True,
            help="builtin name, builtin:NAME, or a coefficient JSON path",
        )
    sp.add_argument("--format", dest="fmt", choices=("json", "csv"), default="json")
    sp.add_argument("--out", default=None, help="write the document here instead of stdout")
    sp.add_argument("--threads", type=int, default=None,
                    help="worker cap (default: DLAB_THREADS or 1)")
    sp.add_argument("--seed", type=int, default=0)


def _build_parser() -> _Parser:
    p = _Parser(prog="dlab", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="subcommand", metavar="SUBCOMMAND")
    sub.required = True

    sp = sub.add_parser("moment", help="quadrature mean of |f|^{2k} over [0, T]")
    _add_common(sp)
    sp.add_argument("--sigma", type=float, required=True)
    sp.add_argument("--k", type=int, default=1)
    sp.add_argument("--T", type=float, required=True)
    sp.add_argument("--step", type=float, default=0.01)
    sp.add_argument("--rule", choices=("simpson", "trapezoid"), default="simpson")
    sp.add_argument("--N", type=int, default=100_000,
                    help="truncation length for generic series evaluators")

    sp = sub.add_parser("zeros", help="scan a rectangle for zeros")
    _add_common(sp)
    sp.add_argument("--rect", required=True, help="sigma_lo,sigma_hi,t_lo,t_hi")
    sp.add_argument("--tol", type=float, default=1e-10)
    sp.add_argument("--step", type=float, default=0.01, help="boundary step")
    sp.add_argument("--N", type=int, default=100_000)

    sp = sub.add_parser("density", help="zero counts right of each sigma, up to height T")
    _add_common(sp)
    sp.add_argument("--sigma-list", required=True)
    sp.add_argument("--T", type=float, required=True)
    sp.add_argument("--sigma-hi", type=float, default=1.2)
    sp.add_argument("--step", type=float, default=0.01, help="boundary step")
    sp.add_argument("--N", type=int, default=100_000)

    sp = sub.add_parser("flow", help="torus flow box-hitting fractions")
    _add_common(sp, series=False)
    sp.add_argument("--dims", type=int, default=1)
    sp.add_argument("--T", type=float, required=True)
    sp.add_argument("--step", type=float, default=0.01)
    sp.add_argument("--box", default=None, help="lo,hi pairs, one per dimension")
    sp.add_argument("--suite", choices=("standard",), default=None)

    sp = sub.add_parser("recur", help="near-recurrence scan around a seed zero")
    _add_common(sp)
    sp.add_argument("--s0", type=_parse_complex, required=True, help="seed zero, a+bi")
    sp.add_argument("--r", type=float, required=True, help="disc radius")
    sp.add_argument("--T", type=float, required=True)
    sp.add_argument("--t-step", type=float, default=0.01)
    sp.add_argument("--grid", type=int, default=64)
    sp.add_argument("--N", type=int, default=100_000)

    sp = sub.add_parser("mollify", help="mollified tail decay across cutoffs X")
    _add_common(sp)
    sp.add_argument("--sigma", type=float, required=True)
    sp.add_argument("--X-list", required=True, help="comma-separated cutoffs")
    sp.add_argument("--N", type=int, default=100_000)

    sp = sub.add_parser("truncate", help="smooth truncation value with tail bound")
    _add_common(sp)
    sp.add_argument("--s", type=_parse_complex, required=True, help="a+bi")
    sp.add_argument("--k", type=int, required=True, help="smoothness 2^k")
    sp.add_argument("--M", type=int, default=None,
                    help="index cutoff; omit for the pure Euler-product route")

    return p


def run(argv=None) -> int:
    """Parse argv, run one experiment, write one document.  Returns the
    process exit code; errors print one line on stderr."""
    try:
        parser = _build_parser()
        args = parser.parse_args(argv)
        threads = resolve_threads(args.threads)
        config, result, csv_header, csv_rows = _HANDLERS[args.subcommand](
            args, threads
        )
        text = _render(args, config, result, csv_header, csv_rows)
    except UsageError as exc:
        sys.stderr.write("dlab: usage: %s\n" % exc)
        return 64
    except PreconditionError as exc:
        sys.stderr.write("dlab: precondition: %s\n" % exc)
        return 1
    except NumericalError as exc:
        sys.stderr.write("dlab: numerical: %s\n" % exc)
        return 2
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def main():
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
