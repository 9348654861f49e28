"""Command-line front end.

Subcommands: ``cap``, ``hausdorff``, ``alpha``, ``green``, ``check``,
``arcs``, ``cantor``.  Exit status is 0 on success, 1 on bad input and 2 on
numeric failure.  Set ``LOGCAP_THREADS`` to bound BLAS threads.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import tempfile
from pathlib import Path

import numpy as np

from . import experiments as ex
from .green import check_holder, check_pommerenke, green_eval, read_probe_csv
from .potential import NumericalError, capacity_leja, closed_form_capacity, equilibrium_measure
from .sets import (
    ArcFamily,
    CantorStage,
    MaterializeError,
    SpecError,
    arc_alpha_lower,
    cantor_alpha,
    estimate_alpha,
    hausdorff_distance,
    materialize,
    spec_from_dict,
)

EXIT_OK, EXIT_INPUT, EXIT_NUMERIC = 0, 1, 2


class InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise InputError(message)


def load_spec(value: str):
    """A JSON object given inline, as a path to a file, or already parsed (from --config)."""
    if value is None:
        raise InputError("a set spec is required (--spec)")
    if isinstance(value, dict):
        return spec_from_dict(value)
    text = value
    if not value.lstrip().startswith("{"):
        try:
            text = Path(value).read_text()
        except OSError as exc:
            raise InputError(f"cannot read spec file {value!r}: {exc.strerror}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"malformed JSON spec ({exc.msg} at line {exc.lineno} column {exc.colno})") from None
    return spec_from_dict(data)


def parse_point(text: str) -> complex:
    try:
        x, y = (float(t) for t in text.split(","))
    except ValueError:
        raise InputError(f"expected a point 'x,y', got {text!r}") from None
    return complex(x, y)


def atomic_write(path: str, text: str):
    target = Path(path)
    fd, tmp = tempfile.mkstemp(dir=target.parent or ".", prefix=f".{target.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, target)
    except BaseException:
        Path(tmp).unlink(missing_ok=True)
        raise


def emit(args, text: str, summary: str):
    """Write the payload and print the one-line summary."""
    if args.output:
        atomic_write(args.output, text)
        print(summary)
    else:
        sys.stdout.write(text)
        print(summary, file=sys.stderr)


def _csv(header, rows):
    out = io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([repr(float(v)) if isinstance(v, float) else v for v in r])
    return out.getvalue()


def _json(obj):
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def _set(args, which="spec"):
    return materialize(load_spec(getattr(args, which)), args.resolution, min_points=args.min_points)


def cmd_cap(args):
    spec = load_spec(args.spec)
    if args.method == "closed_form":
        cap = closed_form_capacity(spec)
        if cap is None:
            raise InputError(f"no closed form for kind {spec.kind!r}")
        d = {"capacity": cap, "energy": -math.log(cap), "frostman_residual": 0.0, "method": "closed_form", "n_points": 0}
        status = EXIT_OK
    else:
        A = materialize(spec, args.resolution, min_points=args.min_points)
        if args.method == "leja":
            cap = capacity_leja(A, min(args.leja_n, len(A) - 1))
            d = {"capacity": cap, "energy": -math.log(cap), "frostman_residual": 0.0, "method": "leja", "n_points": len(A)}
            status = EXIT_OK
        else:
            res = equilibrium_measure(A, solver=args.solver)
            d = res.to_dict()
            if args.measure_csv:
                atomic_write(args.measure_csv, res.measure.to_csv())
            status = EXIT_OK if res.converged else EXIT_NUMERIC
    text = _json(d) if args.format == "json" else _csv(list(d), [list(d.values())])
    emit(args, text, f"cap: capacity={d['capacity']:.6g} energy={d['energy']:.6g} method={d['method']} n_points={d['n_points']}")
    return status


def cmd_hausdorff(args):
    A, B = _set(args, "spec"), _set(args, "other")
    d = {"d_h": hausdorff_distance(A, B), "slack": A.resolution + B.resolution}
    text = _json(d) if args.format == "json" else _csv(list(d), [list(d.values())])
    emit(args, text, f"hausdorff: d_h={d['d_h']:.6g} (+/- {d['slack']:.2g})")
    return EXIT_OK


def cmd_alpha(args):
    est = estimate_alpha(_set(args), q=args.q)
    d = est.to_dict()
    if args.format == "json":
        text = _json(d)
    else:
        w = d["witness"] or {"center": ["", ""], "r": ""}
        text = _csv(
            ["alpha_lower", "alpha_upper", "slack", "witness_x", "witness_y", "witness_r"],
            [[d["alpha_lower"], d["alpha_upper"], d["slack"], *w["center"], w["r"]]],
        )
    emit(args, text, f"alpha: [{est.alpha_lower:.4g}, {est.alpha_upper:.4g}]")
    return EXIT_OK


def _read_points(path):
    try:
        with open(path, newline="") as fh:
            return read_probe_csv(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path!r}: {exc.strerror}") from None
    except ValueError as exc:
        raise InputError(str(exc)) from None


def cmd_green(args):
    A = _set(args)
    res = equilibrium_measure(A)
    pts = [parse_point(p) for p in args.z or []]
    if args.points:
        pts.extend(_read_points(args.points)[0])
    if not pts:
        raise InputError("give evaluation points with --z x,y or --points FILE")
    z = np.array(pts, dtype=complex)
    g = green_eval(res, z)
    if args.format == "json":
        text = _json([{"x": p.real, "y": p.imag, "g": float(v)} for p, v in zip(z, g)])
    else:
        text = _csv(["x", "y", "g"], [[p.real, p.imag, float(v)] for p, v in zip(z, g)])
    emit(args, text, f"green: {z.size} points, max g={g.max():.6g}")
    return EXIT_OK if res.converged else EXIT_NUMERIC


def _default_alpha(spec):
    if isinstance(spec, CantorStage):
        return cantor_alpha(spec.epsilons, spec.depth)
    if isinstance(spec, ArcFamily) and spec.L < math.pi:
        return arc_alpha_lower(spec.n, spec.L)
    raise InputError(f"no certified alpha for kind {spec.kind!r}; pass --alpha")


def cmd_check(args):
    spec = load_spec(args.spec)
    A = materialize(spec, args.resolution, min_points=args.min_points)
    alpha = args.alpha if args.alpha is not None else _default_alpha(spec)
    rng = np.random.default_rng(args.seed)
    if args.bound == "holder":
        a = parse_point(args.center) if args.center else complex(A.points[0])
        if args.probes:
            probes = _read_points(args.probes)[0]
        else:
            rad = A.diam * np.sqrt(rng.random(args.random))
            probes = a + rad * np.exp(2j * np.pi * rng.random(args.random))
        res = equilibrium_measure(A)
        report = check_holder(res, A, alpha, a, probes)
    else:
        if args.probes:
            pts, radii = _read_points(args.probes)
            if radii is None:
                raise InputError("pommerenke trials need an 'r' column")
            trials = list(zip(pts, radii))
        else:
            centers = A.points[rng.integers(len(A), size=args.random)]
            trials = list(zip(centers, A.diam * rng.random(args.random)))
        report = check_pommerenke(A, alpha, trials)
    d = report.to_dict(with_samples=args.samples)
    d.update(bound=args.bound, alpha=alpha)
    text = _json(d) if args.format == "json" else _csv(
        ["bound", "alpha", "n_samples", "n_violations", "worst_margin", "n_skipped"],
        [[args.bound, alpha, d["n_samples"], d["n_violations"], d["worst_margin"], d["n_skipped"]]],
    )
    emit(args, text, f"check {args.bound}: {report.n_violations} violations in {report.n_samples} samples")
    return EXIT_OK


def _experiment_output(args, rows, summary):
    if args.format == "json":
        text = _json({"rows": [r.to_dict() for r in sorted(rows, key=lambda r: r.n)], "summary": summary})
    else:
        text = ex.rows_to_csv(rows)
        path = args.summary or (str(Path(args.output).with_suffix(".summary.json")) if args.output else None)
        if path:
            atomic_write(path, _json(summary))
        else:
            print(json.dumps(summary, sort_keys=True), file=sys.stderr)
    emit(args, text, f"{args.command}: {len(rows)} rows, verdict={summary['verdict']}")


def cmd_arcs(args):
    if args.lseq == "exp":
        ls = ex.ExpDecay()
    elif args.lseq == "reciprocal":
        ls = ex.Reciprocal()
    else:
        if not args.values:
            raise InputError("--lseq custom needs --values")
        ls = ex.Custom(tuple(args.values))
    rows = ex.arc_convergence(
        ls, args.nmax, args.resolution, numeric_max_n=args.numeric_max_n, min_points=args.min_points,
        workers=args.workers,
    )
    config = {"lseq": args.lseq, "values": args.values, "nmax": args.nmax, "resolution": args.resolution,
              "numeric_max_n": args.numeric_max_n, "min_points": args.min_points}
    _experiment_output(args, rows, ex.arc_summary(rows, config))
    return EXIT_NUMERIC if any("converge" in r.note for r in rows) else EXIT_OK


def cmd_cantor(args):
    report = ex.cantor_convergence(
        args.eps, args.nmax, args.resolution, args.C, tolerance=args.tolerance, min_points=args.min_points,
        workers=args.workers,
    )
    _experiment_output(args, report.rows, report.summary())
    return EXIT_NUMERIC if any("converge" in r.note for r in report.rows) else EXIT_OK


def build_parser():
    p = _Parser(prog="logcap", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, resolution=0.01):
        sp.add_argument("--config", help="JSON file of option defaults")
        sp.add_argument("--resolution", type=float, default=resolution)
        sp.add_argument("--min-points", type=int, default=8, help="minimum samples per component")
        sp.add_argument("--format", choices=("csv", "json"), default="json")
        sp.add_argument("--output", help="write here (atomically) instead of stdout")
        sp.add_argument("--seed", type=int, default=42)
        return sp

    s = common(sub.add_parser("cap", help="capacity of a set"))
    s.add_argument("--spec", help="set spec: JSON file or inline object")
    s.add_argument("--method", choices=("qp", "leja", "closed_form"), default="qp")
    s.add_argument("--solver", choices=("active_set", "pgd"), default="active_set")
    s.add_argument("--leja-n", type=int, default=256)
    s.add_argument("--measure-csv", help="also export the equilibrium measure as CSV")
    s.set_defaults(func=cmd_cap)

    s = common(sub.add_parser("hausdorff", help="Hausdorff distance between two sets"))
    s.add_argument("--spec")
    s.add_argument("--other")
    s.set_defaults(func=cmd_hausdorff)

    s = common(sub.add_parser("alpha", help="uniformly-perfect constant bracket"))
    s.add_argument("--spec")
    s.add_argument("--q", type=float, default=1.05, help="radius grid ratio")
    s.set_defaults(func=cmd_alpha)

    s = common(sub.add_parser("green", help="Green's function values"))
    s.add_argument("--spec")
    s.add_argument("--z", action="append", help="evaluation point x,y (repeatable)")
    s.add_argument("--points", help="CSV file with x,y columns")
    s.set_defaults(func=cmd_green)

    s = common(sub.add_parser("check", help="Hölder or Pommerenke bound check"))
    s.add_argument("bound", choices=("holder", "pommerenke"))
    s.add_argument("--spec")
    s.add_argument("--alpha", type=float, help="certified constant (default: from the set family)")
    s.add_argument("--center", help="Hölder center x,y (a point of the set)")
    s.add_argument("--probes", help="CSV file x,y[,r] of probes or trials")
    s.add_argument("--random", type=int, default=200, help="number of random probes/trials")
    s.add_argument("--samples", action="store_true", help="include per-sample values")
    s.set_defaults(func=cmd_check)

    s = common(sub.add_parser("arcs", help="arc-family convergence table"))
    s.add_argument("--lseq", choices=("exp", "reciprocal", "custom"), default="exp")
    s.add_argument("--values", type=float, nargs="+")
    s.add_argument("--nmax", type=int, default=10)
    s.add_argument("--numeric-max-n", type=int, default=16)
    s.add_argument("--summary", help="summary JSON path")
    s.add_argument("--workers", type=int)
    s.set_defaults(func=cmd_arcs, format="csv", min_points=32)

    s = common(sub.add_parser("cantor", help="Cantor-type NED experiment"), resolution=2.0**-12)
    s.add_argument("--eps", type=float, nargs="+", default=[1 / 3])
    s.add_argument("--nmax", type=int, default=8)
    s.add_argument("--C", type=float, default=0.06)
    s.add_argument("--tolerance", type=float, default=0.005)
    s.add_argument("--summary", help="summary JSON path")
    s.add_argument("--workers", type=int)
    s.set_defaults(func=cmd_cantor, format="csv")
    return p


def parse_args(argv):
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "config", None):
        try:
            cfg = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise InputError(f"cannot load config {args.config!r}: {exc}") from None
        if not isinstance(cfg, dict):
            raise InputError("config must be a JSON object")
        sp = parser._subparsers._group_actions[0].choices[args.command]
        known = {a.dest for a in sp._actions}
        unknown = set(cfg) - known - {"command"}
        if unknown:
            raise InputError(f"unknown config field(s): {', '.join(sorted(unknown))}")
        sp.set_defaults(**{k: v for k, v in cfg.items() if k != "command"})
        args = parser.parse_args(argv)
    return args


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    threads = os.environ.get("LOGCAP_THREADS")
    try:
        args = parse_args(argv)
        if threads:
            from threadpoolctl import threadpool_limits

            with threadpool_limits(limits=int(threads)):
                return args.func(args)
        return args.func(args)
    except (InputError, SpecError, MaterializeError, ValueError) as exc:
        print(f"logcap: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except NumericalError as exc:
        print(f"logcap: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
