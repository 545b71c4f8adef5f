"""Command-line surface: file-based pipelines over family and chain JSON.

Exit codes are stable: 0 success, 1 validation or tolerance failure,
2 malformed input, 3 solver failure.  All outputs are plain JSON or CSV and
are byte-stable for fixed inputs.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys

import numpy as np

from .convergence import family_distance, hemigroup_distance
from .families import GeneratingFamily
from .hemigroups import LawKind, boolean_eta_series, free_eta_series, moment
from .loewner import (ChainSample, HFamilyRep, SolverError,
                      extract_generating_family, integral_residual,
                      solve_chain, solve_transition)

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_FORMAT = 2
EXIT_SOLVER = 3


class _Abort(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def _read_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise _Abort(EXIT_FORMAT, f"cannot read {path}: {exc}")
    except json.JSONDecodeError as exc:
        raise _Abort(EXIT_FORMAT, f"malformed JSON in {path}: {exc}")


def _load_family(path) -> GeneratingFamily:
    try:
        family = GeneratingFamily.from_json_dict(_read_json(path))
    except ValueError as exc:
        raise _Abort(EXIT_FORMAT, f"{path}: {exc}")
    problems = family.validate()
    if problems:
        raise _Abort(EXIT_INVALID,
                     f"{path} is not a valid family:\n" +
                     "\n".join("  - " + p for p in problems))
    return family


def _load_chain(path) -> ChainSample:
    try:
        return ChainSample.from_json_dict(_read_json(path))
    except ValueError as exc:
        raise _Abort(EXIT_FORMAT, f"{path}: {exc}")


def _dump_json(obj, path=None) -> None:
    text = json.dumps(obj, indent=2, sort_keys=True) + "\n"
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def _csv_writer(path):
    if path is None:
        return csv.writer(sys.stdout, lineterminator="\n"), None
    fh = open(path, "w", newline="")
    return csv.writer(fh, lineterminator="\n"), fh


def _parse_times(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise _Abort(EXIT_FORMAT, f"bad time list {text!r}: {exc}")


# ----------------------------------------------------------------- subcommands

def _cmd_validate(args) -> int:
    data = _read_json(args.family)
    try:
        family = GeneratingFamily.from_json_dict(data)
    except ValueError as exc:
        raise _Abort(EXIT_FORMAT, str(exc))
    problems = family.validate()
    for p in problems:
        print(p)
    return EXIT_INVALID if problems else EXIT_OK


def _cmd_moments(args) -> int:
    family = _load_family(args.family)
    writer, fh = _csv_writer(args.output)
    try:
        writer.writerow(["s", "t", "n", "re", "im"])
        for t in _parse_times(args.times):
            for n in range(1, args.orders + 1):
                val = moment(args.law, family, args.start, t, n)
                writer.writerow([repr(float(args.start)), repr(float(t)), n,
                                 repr(float(val.real)), repr(float(val.imag))])
    finally:
        if fh is not None:
            fh.close()
    return EXIT_OK


def _cmd_map(args) -> int:
    family = _load_family(args.family)
    thetas = 2.0 * np.pi * np.arange(args.points) / args.points
    z = args.radius * np.exp(1j * thetas)
    law = LawKind(args.law)
    if law is LawKind.MONOTONE:
        values = solve_transition(family, 0.0, args.time, z)
    elif law is LawKind.FREE:
        values = free_eta_series(family, 0.0, args.time, args.order)(z)
    elif law is LawKind.BOOLEAN:
        values = boolean_eta_series(family, 0.0, args.time, args.order)(z)
    else:
        raise _Abort(EXIT_FORMAT, "map supports the free, boolean and monotone laws")
    writer, fh = _csv_writer(args.output)
    try:
        writer.writerow(["theta", "re", "im"])
        for theta, val in zip(thetas, values):
            writer.writerow([repr(float(theta)), repr(float(val.real)),
                             repr(float(val.imag))])
    finally:
        if fh is not None:
            fh.close()
    return EXIT_OK


def _cmd_solve(args) -> int:
    family = _load_family(args.family)
    chain = solve_chain(family, num_intervals=args.knots, order=args.order)
    _dump_json(chain.to_json_dict(), args.output)
    return EXIT_OK


def _cmd_extract(args) -> int:
    chain = _load_chain(args.chain)
    try:
        result = extract_generating_family(chain)
    except ValueError as exc:
        raise _Abort(EXIT_FORMAT, str(exc))
    _dump_json(result.family.to_json_dict(), args.output)
    rotated, _ = chain.rotated()
    residual = integral_residual(rotated, HFamilyRep.from_family(result.family))
    _dump_json({
        "min_eigenvalue": result.diagnostics.min_eigenvalue,
        "max_adjustment": result.diagnostics.max_adjustment,
        "clipped_intervals": result.diagnostics.clipped_intervals,
        "residual": residual,
    })
    return EXIT_OK


def _cmd_subordinate(args) -> int:
    from .subordination import subordinated_family, verify_subordination

    family = _load_family(args.family)
    if args.knots:
        family = family.resample(family.uniform_knots(args.knots))
    ring = subordinated_family(family)
    _dump_json(ring.to_json_dict(), args.output)
    if args.verify:
        report = verify_subordination(family)
        _dump_json({"sup_discrepancy": report.sup_discrepancy,
                    "num_times": report.num_times,
                    "num_points": report.num_points})
    return EXIT_OK


def _cmd_compare(args) -> int:
    a = _load_family(args.family_a)
    b = _load_family(args.family_b)
    report = family_distance(a, b, order=args.orders, tolerance=args.tol)
    if args.law:
        hg = hemigroup_distance(args.law, a, b, n_max=args.orders,
                                num_times=args.times, tolerance=args.tol)
        report.entries.update(hg.entries)
    _dump_json(report.to_json_dict())
    if args.tol is not None and not report.passed:
        return EXIT_INVALID
    return EXIT_OK


def _cmd_roundtrip(args) -> int:
    family = _load_family(args.family)
    chain = solve_chain(family, num_intervals=args.knots, order=args.order)
    extracted = extract_generating_family(chain).family
    report = family_distance(family, extracted, order=8)
    _dump_json(report.to_json_dict())
    print(f"round-trip distance: {repr(report.max_value)}")
    return EXIT_OK


# ----------------------------------------------------------------------- main

def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="circleflow",
        description="Convolution hemigroups on the unit circle and their Loewner chains")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a family file")
    p.add_argument("family")
    p.set_defaults(fn=_cmd_validate)

    p = sub.add_parser("moments", help="increment moments as CSV")
    p.add_argument("family")
    p.add_argument("--law", required=True,
                   choices=[k.value for k in LawKind])
    p.add_argument("--orders", type=int, required=True, metavar="K")
    p.add_argument("--times", required=True, help="comma-separated end times")
    p.add_argument("--from", dest="start", type=float, default=0.0)
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(fn=_cmd_moments)

    p = sub.add_parser("map", help="image of a circle under an eta-transform")
    p.add_argument("family")
    p.add_argument("--law", required=True, choices=["free", "boolean", "monotone"])
    p.add_argument("--time", type=float, required=True)
    p.add_argument("--radius", type=float, default=0.5)
    p.add_argument("--points", type=int, default=64)
    p.add_argument("--order", type=int, default=32)
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(fn=_cmd_map)

    p = sub.add_parser("solve", help="solve the chain, write a chain file")
    p.add_argument("family")
    p.add_argument("--knots", type=int, default=64)
    p.add_argument("--order", type=int, default=32)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(fn=_cmd_solve)

    p = sub.add_parser("extract", help="recover the family of a chain file")
    p.add_argument("chain")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(fn=_cmd_extract)

    p = sub.add_parser("subordinate", help="subordinated monotone family")
    p.add_argument("family")
    p.add_argument("--knots", type=int, default=0,
                   help="resample to this many uniform intervals first")
    p.add_argument("--verify", action="store_true")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(fn=_cmd_subordinate)

    p = sub.add_parser("compare", help="convergence report for two families")
    p.add_argument("family_a")
    p.add_argument("family_b")
    p.add_argument("--law", default=None, choices=[k.value for k in LawKind])
    p.add_argument("--orders", type=int, default=8)
    p.add_argument("--times", type=int, default=17)
    p.add_argument("--tol", type=float, default=None)
    p.set_defaults(fn=_cmd_compare)

    p = sub.add_parser("roundtrip", help="solve, extract, compare")
    p.add_argument("family")
    p.add_argument("--knots", type=int, default=64)
    p.add_argument("--order", type=int, default=32)
    p.set_defaults(fn=_cmd_roundtrip)

    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except _Abort as exc:
        print(str(exc), file=sys.stderr)
        return exc.code
    except SolverError as exc:
        where = "" if exc.time is None else f" at time {exc.time}"
        print(f"solver failure{where}: {exc}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
