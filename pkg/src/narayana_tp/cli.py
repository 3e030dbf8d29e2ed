"""Command line interface.

Exit codes: 0 when every verdict holds, 1 on any failure or counterexample,
2 on usage or resource errors.
"""

import argparse
import sys
from fractions import Fraction
from pathlib import Path

from .errors import (
    ConsistencyError, DimensionError, MethodError, NotSymmetricError, ParameterError, PivotError,
    ResourceError,
)
from .exactmat import format_rational, to_csv
from .families import MATRIX_FAMILIES, SEQUENCE_FAMILIES, build_matrix, family, parse_sequence
from .harness import STATEMENTS, dumps, load_config, run_statement, write_reports
from .identities import LDL_FAMILIES, narayana_square_ldl
from .tpkit import check_stp, check_tp, is_pf_truncated, is_sm_truncated

SHAPE_ALIASES = {"triangle": "triangle", "reversed": "reversed-triangle",
                 "reversed-triangle": "reversed-triangle", "square": "square"}

USAGE_ERRORS = (ParameterError, MethodError, DimensionError, ResourceError, ConsistencyError,
                NotSymmetricError, PivotError, ValueError, KeyError)


def _matrix_json(m):
    return [[format_rational(x) for x in m.row(i)] for i in range(m.rows)]


def _emit(text, out=None):
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_gen(args):
    m = build_matrix(family(args.family, args.m), SHAPE_ALIASES[args.shape], args.size)
    if args.format == "csv":
        _emit(to_csv(m), args.out)
    else:
        _emit(dumps({"family": str(family(args.family, args.m)), "shape": SHAPE_ALIASES[args.shape],
                     "size": args.size, "entries": _matrix_json(m)}), args.out)
    return 0


def cmd_check(args):
    m = build_matrix(family(args.family, args.m), SHAPE_ALIASES[args.shape], args.size)
    if args.property == "tp":
        v = check_tp(m, args.method or "neville", args.max_order)
    else:
        v = check_stp(m, args.method or "fekete")
    sys.stdout.write(dumps(v.to_json()))
    return 0 if v.holds else 1


def cmd_seq(args):
    s = parse_sequence(args.seq, Fraction(args.t) if args.t is not None else None)
    if args.test == "pf":
        v = is_pf_truncated(s, args.order, args.max_order, args.method or "neville")
    else:
        v = is_sm_truncated(s, args.order)
    sys.stdout.write(dumps(v.to_json()))
    return 0 if v.holds else 1


def cmd_verify(args):
    config = load_config(args.config) if args.config else None
    ids = list(STATEMENTS) if args.statement == "all" else [args.statement]
    for sid in ids:
        if sid not in STATEMENTS:
            raise ParameterError(f"unknown statement {sid!r}; try the 'list' subcommand")
    overrides = {k: v for k, v in (("size", args.size), ("m", args.m), ("t", args.t),
                                    ("bruteOrder", args.brute_order)) if v is not None}
    reports = []
    for sid in ids:
        rep = run_statement(sid, overrides, config)
        reports.append(rep)
        print(f"{rep.status:22} {sid}  ({rep.wall_time_millis} ms)")
    if args.report:
        print(f"index: {write_reports(reports, args.report)}")
    elif len(reports) == 1 and args.json:
        sys.stdout.write(dumps(reports[0].to_json()))
    codes = [r.exit_code for r in reports]
    return 1 if 1 in codes else (2 if 2 in codes else 0)


def cmd_decomp(args):
    L, D, rep = narayana_square_ldl(args.family, args.m, args.size)
    if L is None:
        sys.stdout.write(dumps({"report": rep.to_json()}))
        return 1
    if args.format == "csv":
        sys.stdout.write(to_csv(L) + ",".join(format_rational(d) for d in D) + "\n")
    else:
        sys.stdout.write(dumps({"L": _matrix_json(L), "D": [format_rational(d) for d in D],
                                "report": rep.to_json()}))
    return 0 if rep.holds else 1


def cmd_list(args):
    for sid, st in STATEMENTS.items():
        print(f"{sid:28} {st.kind:10} {st.description}")
    return 0


def build_parser():
    p = argparse.ArgumentParser(prog="narayana-tp", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def matrix_args(sp):
        sp.add_argument("--family", required=True, choices=MATRIX_FAMILIES)
        sp.add_argument("--m", type=int)
        sp.add_argument("--shape", required=True, choices=sorted(SHAPE_ALIASES))
        sp.add_argument("--size", type=int, required=True)

    g = sub.add_parser("gen", help="print a matrix truncation")
    matrix_args(g)
    g.add_argument("--format", choices=("csv", "json"), default="csv")
    g.add_argument("--out")
    g.set_defaults(func=cmd_gen)

    c = sub.add_parser("check", help="test TP or STP of a matrix truncation")
    matrix_args(c)
    c.add_argument("--property", choices=("tp", "stp"), required=True)
    c.add_argument("--method", choices=("brute", "fekete", "neville"))
    c.add_argument("--max-order", type=int)
    c.set_defaults(func=cmd_check)

    s = sub.add_parser("seq", help="test PF or SM of a sequence truncation")
    s.add_argument("--seq", required=True,
                   help=f"one of {', '.join(SEQUENCE_FAMILIES)}, or shift(...), hadamard(...,...), "
                        "explicit(a0,a1,...)")
    s.add_argument("--t")
    s.add_argument("--test", choices=("pf", "sm"), required=True)
    s.add_argument("--order", type=int, required=True)
    s.add_argument("--method", choices=("brute", "neville"))
    s.add_argument("--max-order", type=int)
    s.set_defaults(func=cmd_seq)

    v = sub.add_parser("verify", help="run a registered statement (or 'all')")
    v.add_argument("--statement", required=True)
    v.add_argument("--m", help="M, A..B or a comma list")
    v.add_argument("--t", help="comma list of rationals")
    v.add_argument("--size", type=int)
    v.add_argument("--brute-order", type=int)
    v.add_argument("--report", help="directory for JSON reports")
    v.add_argument("--config", help="INI file with [defaults] and per-statement sections")
    v.add_argument("--json", action="store_true", help="print the report of a single statement")
    v.set_defaults(func=cmd_verify)

    d = sub.add_parser("decomp", help="exact LDL of a Narayana-type square")
    d.add_argument("--family", required=True, choices=LDL_FAMILIES)
    d.add_argument("--m", type=int)
    d.add_argument("--size", type=int, required=True)
    d.add_argument("--format", choices=("json", "csv"), default="json")
    d.set_defaults(func=cmd_decomp)

    ls = sub.add_parser("list", help="list registered statements")
    ls.set_defaults(func=cmd_list)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except USAGE_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
