"""Command-line front end.

Subcommands: ``reduce``, ``sparsify``, ``snowflake-audit``, ``bench``, ``gen``.
Exit status is 0 on success, 2 on invalid input, 3 on numerical failure.
"""

import argparse
import csv
import io
import sys
import time

import numpy as np

from . import __version__
from .datasets import KINDS, make_points
from .exceptions import ConstructionError, SparsifierBreakdown, ValidationError
from .io import RunReport, dumps, format_csv_matrix, read_csv_matrix, write_json
from .pipeline import ReductionConfig, measure_distortion, predicted_n, reduce_lp
from .snowflake import audit_snowflake, build_snowflake_map
from .sparsifier import bss_sparsify, verify_sandwich

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_NUMERICAL = 3


def _config_from_args(args):
    u_range = None
    if args.umin is not None or args.umax is not None:
        if args.umin is None or args.umax is None:
            raise ValidationError("--umin and --umax must be given together")
        u_range = (args.umin, args.umax)
    if args.eps_total is not None:
        return ReductionConfig(eps_total=args.eps_total, normalization=args.normalization,
                               u_range=u_range)
    return ReductionConfig(eps_snow=args.eps_snow, d_bss=args.d_bss,
                           normalization=args.normalization, u_range=u_range)


def build_run_report(X, reduced, config, timings):
    audit = measure_distortion(X, reduced)
    snow = None
    if reduced.snowflake is not None:
        snow = dict(reduced.snowflake.summary())
        snow["audit"] = audit_snowflake(reduced.snowflake).as_dict()
    return RunReport(
        version=__version__,
        config=config.as_dict(),
        p=reduced.p,
        k=int(X.shape[0]),
        m=int(X.shape[1]),
        n=reduced.n,
        sigma=[int(i) for i in reduced.sigma],
        weights=[float(w) for w in reduced.effective_weights],
        normalization_scale=reduced.normalization_scale,
        distortion=audit.as_dict(),
        certified_factor=reduced.certified_factor,
        kappa=reduced.kappa,
        snowflake=snow,
        subspace_dims=[int(k) for k in reduced.subspace_dims],
        degenerate=reduced.degenerate,
        timings=timings,
    )


def cmd_reduce(args):
    X = read_csv_matrix(args.input)
    config = _config_from_args(args)
    reduced = reduce_lp(X, args.p, config)
    tic = time.perf_counter()
    report = build_run_report(X, reduced, config, {})
    report.timings = {**reduced.timings, "audit": time.perf_counter() - tic}
    if args.output:
        if args.output.endswith(".csv"):
            with open(args.output, "w", newline="") as fh:
                fh.write(format_csv_matrix(reduced.points))
        else:
            write_json(args.output, reduced.to_dict())
    if args.report:
        with open(args.report, "w") as fh:
            fh.write(report.to_json())
    d = report.distortion
    print(f"k={report.k} m={report.m} -> n={report.n}  ratios [{d['min_ratio']:.6g}, "
          f"{d['max_ratio']:.6g}]  certified p-th-power factor F={report.certified_factor:.6g}")
    return EXIT_OK


def cmd_sparsify(args):
    V = read_csv_matrix(args.input)
    result = bss_sparsify(V, args.d)
    out = result.to_dict()
    if args.verify:
        lo, hi = verify_sandwich(V, result)
        slack = 1e-8
        out["verified"] = {"lambda_min": lo, "lambda_max": hi}
        if not (lo >= result.lower_bound - slack and hi <= result.upper_bound + slack):
            raise SparsifierBreakdown(
                f"verification failed: eigenvalues [{lo}, {hi}] outside "
                f"[{result.lower_bound}, {result.upper_bound}]"
            )
    text = dumps(out)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_snowflake_audit(args):
    smap = build_snowflake_map(args.rho, args.eps, args.umin, args.umax)
    audit = audit_snowflake(smap, args.samples)
    out = {"snowflake": smap.summary(), "audit": audit.as_dict(),
           "passes": audit.passes(args.eps)}
    text = dumps(out)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    sys.stdout.write(text)
    return EXIT_OK


def _parse_k_values(text):
    try:
        ks = [int(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise ValidationError(f"--k-values: {exc}") from exc
    if not ks or any(k < 2 for k in ks):
        raise ValidationError("--k-values needs at least one value, each >= 2")
    return ks


def cmd_bench(args):
    ks = _parse_k_values(args.k_values)
    config = _config_from_args(args)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["k", "s", "n_bound", "n_actual", "measured_distortion",
                     "certified_distortion", "runtime_ms"])
    for k in ks:
        bound = predicted_n(k, args.p, config, args.range_ratio)
        X = make_points(args.kind, k, args.m, scale=args.scale, seed=args.seed)
        tic = time.perf_counter()
        reduced = reduce_lp(X, args.p, config)
        runtime = (time.perf_counter() - tic) * 1e3
        rep = measure_distortion(X, reduced)
        writer.writerow([k, bound.s, bound.n_bound, reduced.n, repr(rep.spread),
                         repr(reduced.certified_factor ** (2.0 / args.p)), f"{runtime:.1f}"])
    if args.output:
        with open(args.output, "w", newline="") as fh:
            fh.write(buf.getvalue())
    sys.stdout.write(buf.getvalue())
    return EXIT_OK


def cmd_gen(args):
    X = make_points(args.kind, args.k, args.m, scale=args.scale, seed=args.seed)
    text = format_csv_matrix(X)
    if args.output:
        with open(args.output, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _add_reduction_flags(parser):
    parser.add_argument("--p", type=float, required=True, help="exponent in (0, 2)")
    parser.add_argument("--eps-total", type=float, default=None,
                        help="overall distortion budget; overrides --eps-snow/--d-bss")
    parser.add_argument("--eps-snow", type=float, default=0.1)
    parser.add_argument("--d-bss", type=float, default=9.0)
    parser.add_argument("--normalization", choices=["balanced", "certified", "none"],
                        default="balanced")
    parser.add_argument("--umin", type=float, default=None)
    parser.add_argument("--umax", type=float, default=None)


def make_parser():
    parser = argparse.ArgumentParser(prog="lpreduce", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("reduce", help="reduce a CSV point set")
    p.add_argument("--input", required=True)
    p.add_argument("--output", help="reduced points (.json or .csv)")
    p.add_argument("--report", help="run report JSON")
    _add_reduction_flags(p)
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("sparsify", help="barrier sparsification of CSV row vectors")
    p.add_argument("--input", required=True)
    p.add_argument("--d", type=float, required=True)
    p.add_argument("--verify", action="store_true")
    p.add_argument("--output")
    p.set_defaults(func=cmd_sparsify)

    p = sub.add_parser("snowflake-audit", help="build and audit a snowflake helix")
    p.add_argument("--rho", type=float, required=True)
    p.add_argument("--eps", type=float, default=0.1)
    p.add_argument("--umin", type=float, required=True)
    p.add_argument("--umax", type=float, required=True)
    p.add_argument("--samples", type=int, default=10_000)
    p.add_argument("--output")
    p.set_defaults(func=cmd_snowflake_audit)

    p = sub.add_parser("bench", help="sweep k and report n against the construction bound")
    p.add_argument("--k-values", default="8,16,32")
    p.add_argument("--m", type=int, default=100)
    p.add_argument("--kind", default="gaussian")
    p.add_argument("--scale", type=float, default=1.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--range-ratio", type=float, default=1e4,
                   help="difference range ratio used for the n bound")
    p.add_argument("--output")
    _add_reduction_flags(p)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("gen", help="write a synthetic point set as CSV")
    p.add_argument("--kind", required=True, help=f"one of {', '.join(KINDS)}")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--scale", type=float, default=1.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output")
    p.set_defaults(func=cmd_gen)
    return parser


_STAGES = {ConstructionError: "snowflake", SparsifierBreakdown: "sparsify"}


def main(argv=None):
    args = make_parser().parse_args(argv)
    try:
        return args.func(args)
    except ValidationError as exc:
        print(f"lpreduce {args.command}: invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except OSError as exc:
        print(f"lpreduce {args.command}: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (ConstructionError, SparsifierBreakdown, np.linalg.LinAlgError) as exc:
        stage = _STAGES.get(type(exc), "linear algebra")
        print(f"lpreduce {args.command}: failed in stage {stage}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
