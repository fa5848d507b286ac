"""Command-line front end.

Exit codes: 0 when everything checked holds, 1 when a universally valid
relation (or an acceptance criterion) fails, 2 on bad input.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from pathlib import Path

from . import __version__, acceptance, bounds, modelfile, qmodel, spinlab
from .exceptions import EdrlabError
from .relations import DEFAULT_TOL, RelationId, evaluate_all

EXIT_OK, EXIT_VIOLATION, EXIT_INPUT = 0, 1, 2


class InputError(Exception):
    pass


def _emit(text: str, out: str | None) -> None:
    if not text.endswith("\n"):
        text += "\n"
    if out is None or out == "-":
        sys.stdout.write(text)
        return
    try:
        Path(out).write_text(text)
    except OSError as exc:
        raise InputError(f"cannot write {out}: {exc.strerror}") from exc


def _pick(model: modelfile.ModelFile, name: str | None, default: str, fallback: str):
    if name is None:
        name = default if default in model.observables else fallback
    return model.observable(name)


def _load(args):
    model = modelfile.load_model(args.model)
    a = _pick(model, args.a, "A", "Z")
    b = _pick(model, args.b, "B", "X")
    return model, a, b


def _relation_ids(names: str | None) -> list[RelationId]:
    if names is None or names.strip().lower() == "all":
        return list(RelationId)
    ids = [t for t in (s.strip() for s in names.split(",")) if t]
    try:
        return [RelationId.parse(t) for t in ids]
    except ValueError as exc:
        raise InputError(f"{exc}; known: {', '.join(r.name for r in RelationId)}") from None


def _moments(model, a, b):
    j = qmodel.to_joint_model(model.process, b)
    ms = qmodel.moments(j, a, b, model.rho)
    bp = bounds.bound_pair(a, b, model.rho)
    return modelfile.moments_dict(ms, bp.c_ab, bp.d_ab)


def cmd_compute(args) -> int:
    model, a, b = _load(args)
    values = _moments(model, a, b)
    if args.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(values.keys())
        w.writerow(modelfile.fmt17(v) for v in values.values())
        text = buf.getvalue()
    else:
        text = json.dumps({"format": modelfile.REPORT_FORMAT, "moments": values}, indent=1, ensure_ascii=False)
    _emit(text, args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    model, a, b = _load(args)
    ids = _relation_ids(args.relations)
    reports = evaluate_all(model.process, a, b, model.rho, ids, args.tolerance)
    violators = [r.id.name for r in reports if not r.skipped and not r.comparator and not r.satisfied]
    if args.format == "csv":
        text = modelfile.relation_csv(reports)
    else:
        text = json.dumps(
            {
                "format": modelfile.REPORT_FORMAT,
                "tolerance": args.tolerance,
                "moments": _moments(model, a, b),
                "relations": modelfile.report_dict(reports),
                "violations": violators,
            },
            indent=1,
            ensure_ascii=False,
        )
    _emit(text, args.out)
    for r in reports:
        if r.skipped:
            print(f"skipped {r.id.name}: {r.diagnostic}", file=sys.stderr)
    if violators:
        print("violated: " + ", ".join(violators), file=sys.stderr)
        return EXIT_VIOLATION
    return EXIT_OK


def _tolerance(text: str) -> float:
    try:
        tol = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not (tol >= 0 and math.isfinite(tol)):
        raise argparse.ArgumentTypeError(f"tolerance must be a finite number >= 0, got {text!r}")
    return tol


def _angle(text: str) -> float:
    try:
        return modelfile.parse_angle(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _sweep_args(args):
    if args.steps < 2:
        raise InputError("--steps must be at least 2")
    rho = modelfile.decode_rho(args.rho, 2)
    return rho


def cmd_sweep(args) -> int:
    rho = _sweep_args(args)
    ids = [] if args.relations in (None, "") else _relation_ids(args.relations)
    res = spinlab.sweep(args.theta_min, args.theta_max, args.steps, rho, ids)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["theta", "eps_sq", "eta_sq", "circle_residual"] + [f"residual_{r.name}" for r in ids])
    for pt in res.grid:
        row = [pt.theta, pt.eps_sq, pt.eta_sq, pt.circle_residual]
        row += [pt.residuals.get(r, math.nan) for r in ids]
        w.writerow(modelfile.fmt17(x) for x in row)
    _emit(buf.getvalue(), args.out)
    return EXIT_OK


def cmd_spin_demo(args) -> int:
    rho = _sweep_args(args)
    res = spinlab.sweep(args.theta_min, args.theta_max, args.steps, rho)
    lines = [f"{'theta':>10} {'eps^2':>12} {'eta^2':>12} {'circle-4':>12}"]
    for pt in res.grid:
        lines.append(f"{pt.theta:10.6f} {pt.eps_sq:12.9f} {pt.eta_sq:12.9f} {pt.circle_residual:12.3e}")
    lines.append(f"max |circle - 4| = {res.max_abs_circle_residual:.3e}")
    _emit("\n".join(lines), args.out)
    ok = res.max_abs_circle_residual <= args.tolerance
    return EXIT_OK if ok else EXIT_VIOLATION


def cmd_suite(args) -> int:
    results = acceptance.run_all(draws=args.draws, bridge_draws=min(args.draws, 500), seed=args.seed)
    _emit("\n".join(r.line() for r in results), args.out)
    return EXIT_OK if all(r.passed for r in results) else EXIT_VIOLATION


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="edrlab", description="Evaluate error-disturbance relations on finite models.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="write output here instead of stdout")

    model_args = argparse.ArgumentParser(add_help=False)
    model_args.add_argument("model", help="JSON model file")
    model_args.add_argument("--a", help="observable name for A (default: A from file, else Z)")
    model_args.add_argument("--b", help="observable name for B (default: B from file, else X)")
    model_args.add_argument("--format", choices=("json", "csv"), default="json")

    p = sub.add_parser("compute", parents=[common, model_args], help="moments and commutator bounds")
    p.set_defaults(func=cmd_compute)

    p = sub.add_parser("verify", parents=[common, model_args], help="evaluate relations; exit 1 on violation")
    p.add_argument("--relations", help="comma-separated relation ids (default: all)")
    p.add_argument("--tolerance", type=_tolerance, default=DEFAULT_TOL)
    p.set_defaults(func=cmd_verify)

    grid = argparse.ArgumentParser(add_help=False)
    grid.add_argument("--theta-min", type=_angle, default=0.0)
    grid.add_argument("--theta-max", type=_angle, default=math.pi / 4)
    grid.add_argument("--steps", type=int, default=101)
    grid.add_argument("--rho", default="maximally_mixed", help="maximally_mixed or bloch:x,y,z")

    p = sub.add_parser("sweep", parents=[common, grid], help="CSV over the spin-model theta grid")
    p.add_argument("--relations", default="", help="comma-separated relation ids to add as residual columns")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("spin-demo", parents=[common, grid], help="print the theta grid and circle residuals")
    p.add_argument("--tolerance", type=_tolerance, default=DEFAULT_TOL)
    p.set_defaults(func=cmd_spin_demo)

    p = sub.add_parser("suite", parents=[common], help="run the acceptance checks")
    p.add_argument("--seed", type=int, default=2024)
    p.add_argument("--draws", type=int, default=1000)
    p.set_defaults(func=cmd_suite)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (InputError, EdrlabError, ValueError) as exc:
        print(f"edrlab {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
