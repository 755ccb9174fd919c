"""Command-line interface.

Exit status: 0 answered, 2 obstructed, 3 inconsistent knowledge base,
64 usage or input error.
"""

from __future__ import annotations

import argparse
import sys
from typing import Optional, Sequence

from . import engine as E
from .catalog import lookup
from .cells import StableComplex, cp_stunted
from .cohomotopy import cells_for, complex_cohomotopy, cp_cohomotopy, hurewicz_table
from .errors import BFCalcError, Inconsistent
from .fourman import ManifoldDescriptor, SurfaceData, blowup_times, glue
from .session import locked_session

EXIT_OK, EXIT_OBSTRUCTED, EXIT_INCONSISTENT, EXIT_USAGE = 0, 2, 3, 64


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse exits with 2 by default
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _parse_vec(text: str, rank: int) -> tuple[int, ...]:
    t = text.strip().lower()
    if t in ("0", "canonical", "zero"):
        return (0,) * rank
    vals = tuple(int(x) for x in t.replace(" ", "").split(",") if x)
    if len(vals) != rank:
        raise UsageError(f"expected {rank} coordinates, got {len(vals)}")
    return vals


def _parse_form(text: str) -> list[list[int]]:
    """Rows separated by ';', entries by ','.  An empty string is the empty form."""
    if not text.strip():
        return []
    return [[int(x) for x in row.split(",")] for row in text.split(";")]


# ---------------------------------------------------------------------------
# group


def cmd_group(args) -> int:
    if args.kind == "cp":
        if args.n is None or args.j is None:
            raise UsageError("group cp needs --n and --j")
        g = cp_cohomotopy(args.n, args.j)
        print(g)
        if args.audit:
            h = hurewicz_table(args.n, args.j)
            print(f"hurewicz kernel {h.kernel}, cokernel {h.cokernel}")
            k = cells_for(args.j)
            if args.j <= 4 and args.n >= 4:
                X = cp_stunted(args.n, k)
                res = complex_cohomotopy(X, 2 * args.n - args.j)
                print(f"cells {X} in degree {2 * args.n - args.j}")
                print(res.audit())
                print(f"long exact sequence gives {res.group}")
            else:
                print("closed form only")
        return EXIT_OK
    if args.cells is None or args.m is None:
        raise UsageError("group complex needs --cells and --m")
    X = StableComplex.parse(args.cells)
    res = complex_cohomotopy(X, args.m)
    print(res.group)
    if args.audit:
        print(res.audit())
    return EXIT_OK


# ---------------------------------------------------------------------------
# kb


def _resolve(kb: E.KnowledgeBase, name: str) -> tuple[E.KnowledgeBase, ManifoldDescriptor]:
    if name not in kb.manifolds:
        try:
            kb = E.add_manifold(kb, lookup(name))
        except KeyError:
            raise UsageError(f"unknown manifold {name!r}; add it with 'kb add-manifold'") from None
    return kb, kb.manifold(name)


def _print_chain(err: Inconsistent) -> None:
    print(f"INCONSISTENT: {err}")
    for ref, prov in err.chain:
        print(f"  {ref} {prov or 'BY ' + E.ASSERTED}")


def _kb_add_manifold(kb, args):
    if args.catalog:
        kb, X = _resolve(kb, args.catalog)
    elif args.blowup:
        kb, base = _resolve(kb, args.blowup)
        X = blowup_times(base, args.times)
    elif args.sum:
        parts = []
        for n in args.sum:
            kb, P = _resolve(kb, n)
            parts.append(P)
        X = parts[0]
        for P in parts[1:]:
            X = glue(X, P)
        if args.name:
            X = ManifoldDescriptor(
                args.name, X.b1, X.b2_plus, X.b2_minus, X.form, pieces=X.pieces, glue_kind=X.glue_kind
            )
    else:
        if not args.name or args.form is None:
            raise UsageError("add-manifold needs --catalog, --blowup, --sum, or --name with --form")
        X = ManifoldDescriptor.create(
            args.name, args.b1, _parse_form(args.form), symplectic=args.symplectic,
            h1_no_2torsion=not args.h1_2torsion,
        )
    kb = E.add_manifold(kb, X)
    print(f"registered {X.name}: b1={X.b1}, b2+={X.b2_plus}, b2-={X.b2_minus}, sigma={X.sigma}, chi={X.euler}")
    return kb


def _kb_assert(kb, args):
    if args.axioms:
        kb = E.load_catalog_axioms(kb)
        print("loaded catalog axioms")
    if args.pair:
        keys = []
        for item in args.pair:
            name, _, vec = item.partition(":")
            kb, X = _resolve(kb, name)
            keys.append((name, _parse_vec(vec or "0", X.class_rank)))
        kb = E.declare_common_complement(kb, keys[0], keys[1])
        print(f"common complement {E.fmt_key(keys[0])} ~ {E.fmt_key(keys[1])}")
    if args.manifold:
        kb, X = _resolve(kb, args.manifold)
        if args.flag:
            name, _, val = args.flag.partition("=")
            kb = E.assert_flag(kb, X.name, name, val.lower() not in ("false", "0", "no"))
            print(f"flag {name}({X.name}) recorded")
        if args.bf or args.sw:
            c1 = _parse_vec(args.c1 or "0", X.class_rank)
            sw = E.SWFact.parse(args.sw) if args.sw else None
            kb = E.assert_fact(kb, X.name, c1, bf=args.bf, sw=sw)
            print(f"asserted {E.fmt_key((X.name, c1))}")
    return kb


def _verdict_exit(v: E.Verdict) -> int:
    return EXIT_OBSTRUCTED if v.kind == "Obstructed" else EXIT_OK


def cmd_kb(args) -> int:
    def run(kb: E.KnowledgeBase) -> tuple[E.KnowledgeBase, int]:
        action = args.action
        if action == "add-manifold":
            return _kb_add_manifold(kb, args), EXIT_OK
        if action == "assert":
            return _kb_assert(kb, args), EXIT_OK
        if action == "infer":
            kb = E.infer(kb)
            for key in sorted(kb.bf):
                print(E.explain(kb, key))
            return kb, EXIT_OK
        if action == "query":
            if not args.manifold:
                raise UsageError("query needs --manifold")
            kb, X = _resolve(kb, args.manifold)
            c1 = _parse_vec(args.c1 or "0", X.class_rank)
            kb, val = E.query(kb, X.name, c1)
            key = (X.name, c1)
            prov = f" {val.provenance}" if val.provenance else ""
            print(f"{val.state}{prov}" if args.audit or val.provenance else str(val.state))
            if args.audit:
                print(f"d = {kb.dim(key)}, group = {val.group if val.group is not None else 'outside the tables'}")
            return kb, EXIT_OK
        if action == "check-decomposition":
            if not args.x or not args.x_prime:
                raise UsageError("check-decomposition needs --x and --x-prime")
            xs, xps = [], []
            for n in args.x:
                kb, P = _resolve(kb, n)
                xs.append(P)
            for n in args.x_prime:
                kb, P = _resolve(kb, n)
                xps.append(P)
            v = E.decomposition_verdict(kb, xs, xps)
            print(v)
            for c in v.constraints:
                print(f"  constraint: {c}")
            return kb, _verdict_exit(v)
        if action == "check-adjunction":
            if not args.manifold or args.surface_class is None:
                raise UsageError("check-adjunction needs --manifold and --surface-class")
            kb, X = _resolve(kb, args.manifold)
            c1 = _parse_vec(args.c1 or "0", X.class_rank)
            S = SurfaceData(
                "embedded" if args.surface == "embedded" else "immersed_sphere",
                _parse_vec(args.surface_class, X.rank),
                genus=args.genus,
                positive_double_points=args.positive,
                negative_double_points=args.negative,
            )
            kb, v = E.adjunction_verdict(kb, X.name, c1, S)
            print(v)
            for d in v.derived:
                print(f"  derived: {d}")
            return kb, EXIT_OK
        if action == "check-type":
            if not args.manifold:
                raise UsageError("check-type needs --manifold")
            kb, X = _resolve(kb, args.manifold)
            for k, val in E.simple_type_verdict(kb, X.name).items():
                print(f"{k}: {'Unknown' if val is None else val}")
            print(f"bf_dimension: {E.bf_dimension(kb, X.name)}")
            return kb, EXIT_OK
        raise UsageError(f"unknown action {action!r}")  # pragma: no cover

    try:
        if args.session:
            with locked_session(args.session, create=args.action in ("add-manifold", "assert")) as box:
                box[0], code = run(box[0])
                box[0].history.append(" ".join(args.argv))
            return code
        _, code = run(E.KnowledgeBase())
        return code
    except Inconsistent as err:
        _print_chain(err)
        return EXIT_INCONSISTENT


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="bfcalc", description="Bauer-Furuta invariant calculus")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("group", help="stable cohomotopy groups")
    g.add_argument("kind", choices=["cp", "complex"])
    g.add_argument("--n", type=int)
    g.add_argument("--j", type=int)
    g.add_argument("--cells", help="cell data such as S8,e10:eta")
    g.add_argument("--m", type=int)
    g.add_argument("--audit", action="store_true")
    g.set_defaults(func=cmd_group)

    k = sub.add_parser("kb", help="knowledge base operations")
    k.add_argument(
        "action",
        choices=["add-manifold", "assert", "infer", "query", "check-decomposition", "check-adjunction", "check-type"],
    )
    k.add_argument("--session")
    k.add_argument("--manifold")
    k.add_argument("--c1", help="comma separated coordinates, or 0")
    k.add_argument("--bf", choices=[s.value for s in E.BF if s != E.BF.UNKNOWN])
    k.add_argument("--sw", help="integer, odd or even")
    k.add_argument("--flag", help="NAME or NAME=false")
    k.add_argument("--axioms", action="store_true", help="load the catalog's external axioms")
    k.add_argument("--pair", nargs=2, metavar="NAME:C1", help="declare a common-complement pair")
    k.add_argument("--catalog")
    k.add_argument("--blowup")
    k.add_argument("--times", type=int, default=1)
    k.add_argument("--sum", nargs="+")
    k.add_argument("--name")
    k.add_argument("--form", help="rows separated by ';', entries by ','")
    k.add_argument("--b1", type=int, default=0)
    k.add_argument("--symplectic", action="store_true")
    k.add_argument("--h1-2torsion", action="store_true")
    k.add_argument("--x", nargs="+")
    k.add_argument("--x-prime", nargs="+")
    k.add_argument("--surface", choices=["embedded", "immersed"], default="embedded")
    k.add_argument("--surface-class")
    k.add_argument("--genus", type=int, default=0)
    k.add_argument("--positive", type=int, default=0)
    k.add_argument("--negative", type=int, default=0)
    k.add_argument("--audit", action="store_true")
    k.set_defaults(func=cmd_kb)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    args.argv = argv
    try:
        return args.func(args)
    except (UsageError, BFCalcError, ValueError, FileNotFoundError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
