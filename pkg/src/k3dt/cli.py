"""Command-line interface.

Exit status: 0 when every requested certification/verification passes,
1 when a verification fails, 2 on usage or cache-integrity errors and 3 when a
query cannot be certified.
"""
from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from . import forms, theory
from .cache import CacheError, Table, load_or_build, pure_q_table, qseries_table
from .igusa import CONVENTION_TAG, IgusaTable
from .series import InsufficientTruncation, TruncationSpec
from .verify import SUITES, run_suite

_PURE_Q = {"delta", "e2", "goettsche"}
_DEFAULT_TABLE = TruncationSpec(4, 3, 8)


def _emit(table: Table, fmt: str, out) -> None:
    out.write(table.to_csv() if fmt == "csv" else table.to_json())


def _scalar_table(names, exponents, value, query, trunc, metadata) -> Table:
    return Table(tuple(names), [(tuple(exponents), Fraction(value))], query,
                 trunc.as_dict() if trunc is not None else {}, metadata=metadata)


def cmd_form(args, out) -> int:
    trunc = TruncationSpec(args.qmax, 0, args.pwin)
    f = forms.registry.get(args.name, trunc)
    query = {"form": args.name, "qmax": args.qmax, "pwin": args.pwin}
    if args.name in _PURE_Q:
        name = "n" if args.name == "goettsche" else "q"
        table = pure_q_table(f, args.qmax, query, trunc, name=name)
    else:
        table = qseries_table(f, args.qmax, args.pwin, query, trunc)
    _emit(table, args.format, out)
    return 0


def _table_for(args, need: TruncationSpec) -> IgusaTable:
    need = need.union(TruncationSpec(args.qmax, args.tmax, args.pwin))
    cache, _ = load_or_build(args.cache, need)
    return cache.igusa_table


def cmd_igusa_coeff(args, out) -> int:
    h, n, m = args.h, args.n, args.m
    query = {"c": [h, n, m]}
    if h < -1 or n < -1:
        value, certificate, trunc = Fraction(0), "pole bound", None
    else:
        table = _table_for(args, TruncationSpec(max(h, -1), max(n, -1), max(m, 0)))
        value, certificate = table.lookup(h, n, m)
        trunc = table.trunc
    meta = {"certificate": certificate, "expansion": CONVENTION_TAG}
    _emit(_scalar_table(("h", "n", "m"), (h, n, m), value, query, trunc, meta), args.format, out)
    return 0


def cmd_igusa_table(args, out) -> int:
    table = _table_for(args, TruncationSpec(args.qmax, args.tmax, args.pwin))
    rows = sorted((k, v) for k, v in table.entries.items())
    t = Table(("h", "n", "m"), rows, {"igusa_table": table.trunc.as_dict()}, table.trunc.as_dict())
    _emit(t, args.format, out)
    return 0


def cmd_theory(args, out) -> int:
    sub = args.theory_cmd
    if sub == "quot":
        value = theory.quot_q(args.n, args.h, args.m)
        t = _scalar_table(("n", "h", "m"), (args.n, args.h, args.m), value,
                          {"quot": [args.n, args.h, args.m]}, None, theory.QUOT_METADATA)
    elif sub == "quot-euler":
        triple = theory.MukaiTriple(args.vv, args.uu, args.uv)
        value = theory.quot_euler_by_pairings(triple)
        meta = dict(theory.QUOT_METADATA, normal_form=list(triple.normal_form()))
        t = _scalar_table(("vv", "uu", "uv"), (args.vv, args.uu, args.uv), value,
                          {"quot-euler": [args.vv, args.uu, args.uv]}, None, meta)
    else:
        spec = theory.CurveClassSpec(args.d, args.h0, args.n, args.m)
        halves = [spec.half_square(r) for r in spec.cover_divisors()]
        need = TruncationSpec(max(max(halves), -1), max(spec.n - 1, -1), max(abs(spec.m), 0))
        table = _table_for(args, need)
        fn = theory.dt_imprimitive if sub == "dt" else theory.gw_hilb_imprimitive
        value = fn(spec, table)
        t = _scalar_table(("n", "d", "h0", "m"), (spec.n, spec.d, spec.h0, spec.m), value,
                          {sub: [spec.n, spec.d, spec.h0, spec.m]}, table.trunc, theory.GW_METADATA)
    _emit(t, args.format, out)
    return 0


def cmd_verify(args, out) -> int:
    names = list(SUITES) if args.suite == "all" else [args.suite]
    table = None
    if args.cache is not None:
        table = load_or_build(args.cache, _DEFAULT_TABLE)[0].igusa_table
    results = []
    for name in names:
        default = SUITES[name][1]
        trunc = TruncationSpec(
            default.q_max if args.qmax is None else args.qmax,
            default.t_max if args.tmax is None else args.tmax,
            default.p_window if args.pwin is None else args.pwin,
        )
        kwargs = {"table": table} if name == "multiple-cover" and table is not None else {}
        results.append(run_suite(name, trunc, **kwargs))
    passed = all(r.passed for r in results)
    doc = {
        "version": 1,
        "convention_tag": CONVENTION_TAG,
        "passed": passed,
        "checks": [r.as_dict() for r in results],
    }
    out.write(json.dumps(doc, indent=1) + "\n")
    return 0 if passed else 1


def _add_format(p):
    g = p.add_mutually_exclusive_group()
    g.add_argument("--json", dest="format", action="store_const", const="json")
    g.add_argument("--csv", dest="format", action="store_const", const="csv")
    p.set_defaults(format="json")


def _add_trunc(p, qmax, tmax, pwin):
    p.add_argument("--qmax", type=int, default=qmax)
    p.add_argument("--tmax", type=int, default=tmax)
    p.add_argument("--pwin", type=int, default=pwin)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="k3dt", description="Exact K3 DT/GW/Quot generating series")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("form", help="emit a named modular/Jacobi form")
    p.add_argument("name", choices=forms.FORM_NAMES)
    p.add_argument("--qmax", type=int, default=4)
    p.add_argument("--pwin", type=int, default=8)
    _add_format(p)
    p.set_defaults(func=cmd_form)

    p = sub.add_parser("igusa", help="coefficients of 1/chi_10")
    isub = p.add_subparsers(dest="igusa_cmd", required=True)
    c = isub.add_parser("coeff", help="c(h, n, m)")
    c.add_argument("h", type=int)
    c.add_argument("n", type=int)
    c.add_argument("m", type=int)
    c.add_argument("--cache", default=None)
    _add_trunc(c, -1, -1, 0)
    _add_format(c)
    c.set_defaults(func=cmd_igusa_coeff)
    c = isub.add_parser("table", help="the full certified table")
    c.add_argument("--cache", default=None)
    _add_trunc(c, _DEFAULT_TABLE.q_max, _DEFAULT_TABLE.t_max, _DEFAULT_TABLE.p_window)
    _add_format(c)
    c.set_defaults(func=cmd_igusa_table)

    p = sub.add_parser("theory", help="Quot, DT and GW invariants")
    tsub = p.add_subparsers(dest="theory_cmd", required=True)
    c = tsub.add_parser("quot", help="Q_{n,h,m}")
    for flag in ("--n", "--h", "--m"):
        c.add_argument(flag, type=int, required=True)
    _add_format(c)
    c = tsub.add_parser("quot-euler", help="Quot Euler number from Mukai pairings")
    for flag in ("--vv", "--uu", "--uv"):
        c.add_argument(flag, type=int, required=True)
    _add_format(c)
    for name in ("dt", "gw"):
        c = tsub.add_parser(name, help=f"{name.upper()} invariant of an imprimitive class")
        for flag in ("--n", "--d", "--h0", "--m"):
            c.add_argument(flag, type=int, required=True)
        c.add_argument("--cache", default=None)
        _add_trunc(c, -1, -1, 0)
        _add_format(c)
    p.set_defaults(func=cmd_theory)

    p = sub.add_parser("verify", help="run identity checks")
    p.add_argument("--suite", default="all", choices=["all", *SUITES])
    p.add_argument("--cache", default=None)
    _add_trunc(p, None, None, None)
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None, out=None) -> int:
    out = sys.stdout if out is None else out
    args = build_parser().parse_args(argv)
    try:
        return args.func(args, out)
    except CacheError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except InsufficientTruncation as exc:
        needed = exc.needed.as_dict() if exc.needed is not None else None
        print(f"error: insufficient truncation: {exc} (needed: {needed})", file=sys.stderr)
        return 3
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
