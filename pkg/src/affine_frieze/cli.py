"""Command-line front end: ``affine-frieze {coxeter,frieze,verify,detect,conjecture}``.

Exit codes: 0 success, 1 mathematical failure (a check did not hold, or a
symbolic computation hit its term budget), 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from typing import Sequence

from . import _matrix as mx
from .errors import (
    CalibrationFailed,
    FriezeError,
    InsufficientDepth,
    InvalidPath,
    InvalidQuiverError,
    NotAdjacent,
    NotDivisible,
    ResourceLimitExceeded,
    UnknownConjecture,
)
from .frieze import FriezeTable
from .lattice import (
    build_quiver,
    coxeter,
    euler_matrix,
    expected_b_m,
    order_s_theta_cprime,
)
from .laurent import RationalSpecialization
from .recdetect import check_conjecture
from .relations import (
    E7_ALIGNMENT,
    fold_check,
    tube_sequence,
    verify_apq,
    verify_apq_second_order,
    verify_dn_odd,
    verify_e7_chain,
    verify_e8_chain,
    verify_extending,
    verify_neighbor,
    verify_path_relation,
)

RELATIONS = (
    "extending", "dn-odd", "dn-odd-twisted", "apq", "apq-second-order", "neighbor",
    "path", "tube", "e8-chain", "e7-chain", "fold",
)


class UsageError(Exception):
    pass


def _emit(obj, fmt: str, text: str, out):
    if fmt == "json":
        out.write(json.dumps(obj, sort_keys=True) + "\n")
    else:
        out.write(text.rstrip("\n") + "\n")


def _window(text: str | None, default: tuple[int, int]) -> tuple[int, int]:
    if text is None:
        return default
    try:
        a, b = (int(x) for x in text.split(":"))
    except ValueError:
        raise UsageError(f"window must look like a:b, got {text!r}") from None
    if a > b:
        raise UsageError(f"empty window {text!r}")
    return a, b


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.replace("->", ",").split(",") if x.strip()]
    except ValueError:
        raise UsageError(f"expected comma-separated vertices, got {text!r}") from None


def _specs(args, quiver) -> list[RationalSpecialization]:
    if args.spec is not None:
        try:
            return [RationalSpecialization.parse(args.spec, quiver.labels)]
        except ValueError as exc:
            raise UsageError(str(exc)) from None
    rng = random.Random(args.seed)
    return [RationalSpecialization.random(quiver.n_plus_one, rng) for _ in range(args.specs)]


# ---------------------------------------------------------------- coxeter

def cmd_coxeter(args, out) -> int:
    q = build_quiver(args.type)
    data = coxeter(q)
    order = order_s_theta_cprime(q)
    b_ref, m_ref = expected_b_m(args.type)
    e = euler_matrix(q)
    # <x, y> = -<y, c x> on basis vectors, i.e. E^T = -E c
    euler_ok = mx.transpose(e) == mx.mat_neg(mx.mat_mul(e, data.c_matrix))
    checks = {
        "c_fixes_delta": mx.mat_vec(data.c_matrix, data.delta) == data.delta,
        "euler_c_identity": euler_ok,
        "order_s_theta_cprime_equals_b": order == data.b,
        "b_matches_closed_form": data.b == b_ref,
        "abs_m_matches_closed_form": abs(data.m) == m_ref,
    }
    report = {
        "quiver": q.to_json(),
        "delta": list(data.delta),
        "c_matrix": [list(r) for r in data.c_matrix],
        "b": data.b,
        "m": data.m,
        "order_s_theta_cprime": order,
        "note": "b is a multiple of the width of every tube",
        "checks": checks,
    }
    lines = [
        f"type {q.type_tag}",
        "delta " + " ".join(f"{lab}:{d}" for lab, d in zip(q.labels, data.delta)),
        "c =",
        *("  " + " ".join(f"{x:3d}" for x in row) for row in data.c_matrix),
        f"b = {data.b}, m = {data.m}",
        f"order of s_theta c' = {order}",
        "b is a multiple of the width of every tube",
        *(f"{'ok ' if v else 'FAIL'} {k}" for k, v in checks.items()),
    ]
    _emit(report, args.format, "\n".join(lines), out)
    return 0 if all(checks.values()) else 1


# ---------------------------------------------------------------- frieze

def cmd_frieze(args, out) -> int:
    q = build_quiver(args.type)
    if args.terms < 0:
        raise UsageError("--terms must be >= 0")
    if args.mode == "symbolic":
        table = FriezeTable(q, max_terms=args.max_terms)
    else:
        table = FriezeTable(q, _specs(args, q)[0])
    table.extend(args.terms)
    if args.format == "json":
        _emit(table.to_json(text=args.text_terms), "json", "", out)
    elif args.format == "csv":
        out.write(table.to_csv())
    else:
        names = table.variable_names()
        lines = []
        for j in range(table.depth + 1):
            for lab, v in zip(q.labels, table.row(j)):
                shown = v.to_text(names) if table.spec is None else str(v)
                lines.append(f"X^{lab}_{j} = {shown}")
        _emit(None, "text", "\n".join(lines), out)
    return 0


# ---------------------------------------------------------------- verify

_DEFAULT_WINDOWS = {
    "extending": lambda q: (coxeter(q).b, coxeter(q).b + 6),
    "dn-odd": lambda q: (2 * q.n - 4, 2 * q.n + 2),
    "dn-odd-twisted": lambda q: (q.n - 2, q.n + 5),
    "apq": lambda q: (q.params[1], q.params[1] + 8),
    "apq-second-order": lambda q: (q.params[1], q.params[1] + 8),
    "neighbor": lambda q: (0, 15),
    "path": lambda q: (2, 12),
    "tube": lambda q: (0, 12),
    "e8-chain": lambda q: (7, 20),
    "e7-chain": lambda q: (8, 20),
    "fold": lambda q: (0, 25),
}


def _run_relation(args, q, table, window):
    rel = args.relation
    vertex = args.vertex
    if rel == "extending":
        return verify_extending(table, q.label(0) if vertex is None else vertex, window)
    if rel in ("dn-odd", "dn-odd-twisted"):
        part = "twisted" if rel == "dn-odd-twisted" else "both"
        return verify_dn_odd(table, 0 if vertex is None else vertex, window, part=part)
    if rel == "apq":
        return verify_apq(table, window, None if vertex is None else [vertex])
    if rel == "apq-second-order":
        return verify_apq_second_order(table, window, None if vertex is None else [vertex])
    if rel == "neighbor":
        if vertex is None or args.neighbor is None:
            raise UsageError("neighbor needs --vertex and --neighbor")
        return verify_neighbor(table, vertex, args.neighbor, window)
    if rel == "path":
        if args.path is None:
            raise UsageError("path needs --path, e.g. 1,2,7")
        return verify_path_relation(table, _int_list(args.path), window)
    if rel == "tube":
        if vertex is None:
            raise UsageError("tube needs --vertex")
        return tube_sequence(table, vertex, window)[1]
    if rel == "e8-chain":
        return verify_e8_chain(table, window)
    if rel == "e7-chain":
        return verify_e7_chain(table, window, E7_ALIGNMENT)
    raise UsageError(f"unknown relation {rel!r}")


def cmd_verify(args, out) -> int:
    q = build_quiver(args.type)
    if args.relation not in RELATIONS:
        raise UsageError(f"unknown relation {args.relation!r}; choose from {', '.join(RELATIONS)}")
    window = _window(args.window, _DEFAULT_WINDOWS[args.relation](q))
    reports = []
    if args.relation == "fold":
        if args.orbits is None:
            raise UsageError("fold needs --orbits, e.g. 1,3,5/2,4,6/7")
        orbits = [_int_list(o) for o in args.orbits.split("/")]
        if args.mode == "symbolic":
            reports.append(fold_check(q, orbits, window))
        else:
            rng = random.Random(args.seed)
            for _ in range(args.specs):
                rep = {lab: orb[0] for orb in orbits for lab in orb}
                base = {lab: RationalSpecialization.random(1, rng)[0] for lab in (o[0] for o in orbits)}
                spec = RationalSpecialization(base[rep[lab]] for lab in q.labels)
                report = fold_check(q, orbits, window, FriezeTable(q, spec))
                report.extra["spec"] = spec.to_text(q.labels)
                reports.append(report)
    elif args.mode == "symbolic":
        reports.append(_run_relation(args, q, FriezeTable(q, max_terms=args.max_terms), window))
    else:
        for spec in _specs(args, q):
            rep = _run_relation(args, q, FriezeTable(q, spec), window)
            rep.extra["spec"] = spec.to_text(q.labels)
            reports.append(rep)
    ok = all(r.passed for r in reports)
    for r in reports:
        text = f"{'PASS' if r.passed else 'FAIL'} {r.relation} {q.type_tag} rows {r.window[0]}..{r.window[1]} ({r.mode})"
        if "spec" in r.extra:
            text += f" at {r.extra['spec']}"
        for f in r.failures[:5]:
            text += f"\n  row {f['j']}: residual {f['residual']}"
        _emit(r.to_json(), args.format, text, out)
    return 0 if ok else 1


# ---------------------------------------------------------------- detection

def _detection(args, out, use_pattern: bool) -> int:
    q = build_quiver(args.type)
    if args.vertex is None:
        raise UsageError("--vertex is required")
    q.index(args.vertex)
    specs = _specs(args, q) if args.spec is not None else args.specs
    report = check_conjecture(
        q, args.vertex, specs, seed=args.seed, terms=args.terms, jobs=args.jobs,
        use_pattern=use_pattern,
    )
    data = report.to_json()
    lines = [f"{q.type_tag} vertex {args.vertex}: degrees {report.degrees}"]
    if report.pattern is not None:
        lines.append(f"pattern {report.pattern.to_text()} (table degree {report.pattern.table_degree})")
        lines.append(f"matches conjecture: {report.matches}")
    if report.unlucky:
        lines.append(f"discarded {len(report.unlucky)} unlucky specialization(s)")
    lines.append("consistent" if report.consistent else "INCONSISTENT across specializations")
    _emit(data, args.format, "\n".join(lines), out)
    return 0 if report.passed else 1


def cmd_detect(args, out) -> int:
    return _detection(args, out, use_pattern=False)


def cmd_conjecture(args, out) -> int:
    return _detection(args, out, use_pattern=True)


# ---------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="affine-frieze", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--type", required=True, help="quiver selector, e.g. D:5, A:3,2, E:7")
        fmt = p.add_mutually_exclusive_group()
        fmt.add_argument("--format", choices=["text", "json"], default="text")
        fmt.add_argument("--json", dest="format", action="store_const", const="json")
        return p

    def specialization(p, mode_default):
        mode = p.add_mutually_exclusive_group()
        mode.add_argument("--symbolic", dest="mode", action="store_const", const="symbolic")
        mode.add_argument("--numeric", dest="mode", action="store_const", const="numeric")
        p.set_defaults(mode=mode_default)
        p.add_argument("--spec", help="x0=2,x1=1/3,... or all=1")
        p.add_argument("--seed", type=int, default=0, help="seed for random positive specializations")
        p.add_argument("--specs", type=int, default=3, help="number of random specializations")
        p.add_argument("--max-terms", type=int, default=None,
                       help="abort a symbolic run once one entry exceeds this many terms")

    p = common(sub.add_parser("coxeter", help="root-lattice data and (b, m)"))
    p.set_defaults(func=cmd_coxeter)

    p = common(sub.add_parser("frieze", help="dump frieze rows 0..J"))
    p.add_argument("--terms", type=int, default=5, help="last row J")
    specialization(p, "symbolic")
    p.add_argument("--csv", dest="format", action="store_const", const="csv")
    p.add_argument("--text-terms", action="store_true", help="JSON: write polynomials as text")
    p.set_defaults(func=cmd_frieze)

    p = common(sub.add_parser("verify", help="check a relation over a window of rows"))
    p.add_argument("--relation", required=True, help=", ".join(RELATIONS))
    p.add_argument("--vertex", type=int)
    p.add_argument("--neighbor", type=int, help="second vertex for the neighbor relation")
    p.add_argument("--path", help="oriented path for the path relation, e.g. 1,2,7")
    p.add_argument("--orbits", help="fold orbits, e.g. 1,3,5/2,4,6/7")
    p.add_argument("--window", help="rows a:b")
    specialization(p, "numeric")
    p.set_defaults(func=cmd_verify)

    for name, func, helptext in (
        ("detect", cmd_detect, "minimal recurrence by Berlekamp-Massey"),
        ("conjecture", cmd_conjecture, "compare detection with the conjectured tables"),
    ):
        p = common(sub.add_parser(name, help=helptext))
        p.add_argument("--vertex", type=int)
        p.add_argument("--terms", type=int, default=None, help="sequence length (default from the table)")
        p.add_argument("--jobs", type=int, default=1)
        specialization(p, "numeric")
        p.set_defaults(func=func)
    return parser


def main(argv: Sequence[str] | None = None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if getattr(args, "mode", None) == "numeric" and getattr(args, "specs", 1) < 1:
            raise UsageError("--specs must be >= 1")
        return args.func(args, out)
    except (UsageError, InvalidQuiverError, InvalidPath, NotAdjacent, UnknownConjecture,
            InsufficientDepth, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (NotDivisible, ResourceLimitExceeded, CalibrationFailed, FriezeError) as exc:
        print(f"failure: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
