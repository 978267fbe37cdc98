"""``halg`` command line.

Exit status: 0 when the property holds or the construction succeeded,
1 when the property fails (witness lines follow), 2 on usage or input
errors.
"""
from __future__ import annotations

import argparse
import contextlib
import sys

from . import lab
from .algebra import (AlgebraError, FiniteAlgebra, QuasiIdentity, direct_product,
                      satisfies_identity, satisfies_quasi_identity, subalgebra_generated)
from .clone import CLONE_CAP, CloneCapExceeded, enumerate_term_operations
from .constructions import (FilterError, SpectrumError, direct_limit, parse_filter,
                            reduced_product, ultraproduct)
from .hyper import (HyperMonoid, MonoidError, all_hypersubstitutions_mod, derived_algebra,
                    satisfies_M_hyper_quasi_identity, short_term)
from .terms import TermError, format_term, parse_equation
from .workspace import WorkspaceError, format_algebra, load, parse_quasi

WITNESS = "WITNESS-v1"


class UsageError(Exception):
    pass


def _assign(A: FiniteAlgebra, values) -> str:
    return "(" + ",".join(A.label(v) for v in values) + ")"


def _hex_table(table, n: int) -> str:
    width = len(format(max(n - 1, 0), "x"))
    return "".join(format(v, f"0{width}x") for v in table.tolist())


def _verdict(out, holds: bool, witness_lines=()):
    out.append("HOLDS" if holds else "FAILS")
    if not holds:
        out.extend(f"{WITNESS} {w}" for w in witness_lines)
    return 0 if holds else 1


def _algebra(ws, name) -> FiniteAlgebra:
    return ws.get("algebra", name)


def _quasi(ws, A, spec: str, arity) -> QuasiIdentity:
    if spec in ws.quasis:
        q = ws.quasis[spec]
        if q.sig != A.sig:
            raise UsageError(f"quasi-identity {spec!r} and algebra {A.name!r} have different signatures")
        return q
    if arity is None:
        raise UsageError(f"{spec!r} is not a declared quasi-identity; inline formulas need --arity")
    return parse_quasi(spec, A.sig, arity)


def cmd_check_id(ws, a, out):
    A = _algebra(ws, a.algebra)
    lhs, rhs = parse_equation(a.equation, A.sig)
    v = satisfies_identity(A, lhs, rhs, a.arity)
    return _verdict(out, v.holds, [f"assign={_assign(A, v.witness)}"] if not v else [])


def cmd_check_quasi(ws, a, out):
    A = _algebra(ws, a.algebra)
    v = satisfies_quasi_identity(A, _quasi(ws, A, a.quasi, a.arity))
    return _verdict(out, v.holds, [f"assign={_assign(A, v.witness)}"] if not v else [])


def _monoid(ws, A, name, clone_cap) -> HyperMonoid:
    if name == "all":
        return all_hypersubstitutions_mod(A, clone_cap)
    return ws.get("monoid", name)


def cmd_hyper_check(ws, a, out):
    A = _algebra(ws, a.algebra)
    q = _quasi(ws, A, a.quasi, a.arity)
    M = _monoid(ws, A, a.monoid, a.clone_cap)
    v = satisfies_M_hyper_quasi_identity(A, M, q)
    lines = []
    if not v:
        w = v.witness
        lines.append(f"sigma={M.name_of(w.index)} images={w.sigma.describe()} assign={_assign(A, w.assignment)}")
    return _verdict(out, v.holds, lines)


def cmd_derive(ws, a, out):
    A = _algebra(ws, a.algebra)
    D = derived_algebra(A, ws.hypersub(a.hypersub, A.sig))
    out.append(format_algebra(D, f"{A.name}_{a.hypersub}"))
    return 0


def cmd_clone(ws, a, out):
    A = _algebra(ws, a.algebra)
    ops = enumerate_term_operations(A, a.arity, a.clone_cap)
    for table, term in ops.sorted_items():
        out.append(f"{_hex_table(table, A.size)}  {format_term(term, A.sig)}")
    return 0


def cmd_product(ws, a, out):
    P = direct_product([_algebra(ws, n) for n in a.algebras])
    out.append(format_algebra(P, "P"))
    return 0


def cmd_subalgebra(ws, a, out):
    A = _algebra(ws, a.algebra)
    gens = [A.element(g) for g in a.gens.split(",") if g.strip()] if a.gens else []
    B, emb = subalgebra_generated(A, gens)
    out.append(format_algebra(B, "S"))
    out.append(f"# embedding [{', '.join(str(e) for e in emb)}]")
    return 0


def cmd_reduced_product(ws, a, out, ultra=False):
    algs = [_algebra(ws, n) for n in a.algebras]
    f = parse_filter(a.filter, len(algs))
    Q, cmap = (ultraproduct if ultra else reduced_product)(algs, f)
    out.append(format_algebra(Q, "R"))
    out.append(f"# classes [{', '.join(str(c) for c in cmap)}]")
    return 0


def cmd_direct_limit(ws, a, out):
    lim = direct_limit(ws.get("spectrum", a.spectrum))
    out.append(format_algebra(lim.algebra, "lim"))
    for (i, e), c in sorted(lim.injection.items()):
        out.append(f"# <{e},{i}> -> {c}")
    return 0


def cmd_lab(ws, a, out):
    what = a.check
    algs = [_algebra(ws, n) for n in a.algebras]
    if what != "derived-closed" and len(algs) != 1:
        raise UsageError(f"lab {what} takes exactly one algebra")
    A = algs[0]
    if what == "medial":
        v = lab.check_medial(A, a.clone_cap)
        lines = [] if v else [f"sigma={v.witness.index} images={v.witness.sigma.describe()} "
                              f"assign={_assign(A, v.witness.assignment)}"]
        return _verdict(out, v.holds, lines)
    if what == "prop23":
        v = lab.check_prop23(A)
        lines = [] if v else [f"F={short_term(v.witness.F, A.sig)} G={short_term(v.witness.G, A.sig)} "
                              f"assign={_assign(A, v.witness.assignment)}"]
        return _verdict(out, v.holds, lines)
    if what == "semidist":
        sj, sm = lab.semidistributivity(A)
        out.append(f"SD_join {'HOLDS' if sj else 'FAILS'}")
        out.append(f"SD_meet {'HOLDS' if sm else 'FAILS'}")
        lines = [f"law={name} assign={_assign(A, v.witness)}"
                 for name, v in (("SD_join", sj), ("SD_meet", sm)) if not v]
        return _verdict(out, bool(sj and sm), lines)
    if what == "abelian":
        v = lab.is_abelian(A, a.max_arity, a.clone_cap)
        w = v.witness
        lines = [] if v else [f"term={format_term(w.term, A.sig, compact=True)} u={A.label(w.u)} "
                              f"v={A.label(w.v)} x={_assign(A, w.x)} y={_assign(A, w.y)}"]
        out.append(f"# term condition checked up to arity {v.max_arity}")
        return _verdict(out, v.holds, lines)
    if what == "rb":
        v = lab.check_rb_hyperidentities(A, a.max_arity)
        w = v.witness
        lines = [] if v else [f"arity={w.arity} law={w.law} F={format_term(w.image, A.sig, compact=True)} "
                              f"assign={_assign(A, w.assignment)}"]
        return _verdict(out, v.holds, lines)
    if what == "derived-closed":
        M = None if a.monoid == "all" else ws.get("monoid", a.monoid)
        v = lab.check_derived_closed(algs, M)
        lines = [] if v else [f"algebra={algs[v.witness.algebra].name} sigma={v.witness.sigma.describe()}"]
        return _verdict(out, v.holds, lines)
    raise UsageError(f"unknown lab check {what!r}")


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-f", "--file", action="append", dest="files", default=argparse.SUPPRESS,
                        help="workbench file to load (repeatable)")
    common.add_argument("--no-prelude", action="store_true", default=argparse.SUPPRESS,
                        help="do not load the built-in algebras")
    common.add_argument("--max-arity", type=int, default=argparse.SUPPRESS)
    common.add_argument("--clone-cap", type=int, default=argparse.SUPPRESS)
    common.add_argument("--depth-cap", type=int, default=argparse.SUPPRESS)

    p = argparse.ArgumentParser(prog="halg", parents=[common],
                                description="Finite algebra workbench: identities, quasi-identities "
                                            "and their hyper versions.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("check-id", parents=[common], help="check an identity")
    s.add_argument("algebra")
    s.add_argument("equation")
    s.add_argument("--arity", type=int, required=True)
    s.set_defaults(func=cmd_check_id)

    s = sub.add_parser("check-quasi", parents=[common], help="check a quasi-identity")
    s.add_argument("algebra")
    s.add_argument("quasi", help="declared name or inline 'p = q & ... => l = r'")
    s.add_argument("--arity", type=int)
    s.set_defaults(func=cmd_check_quasi)

    s = sub.add_parser("hyper-check", parents=[common], help="M-hyper-satisfaction")
    s.add_argument("algebra")
    s.add_argument("quasi")
    s.add_argument("--arity", type=int)
    s.add_argument("--monoid", default="all", help="monoid name, or 'all' (default)")
    s.set_defaults(func=cmd_hyper_check)

    s = sub.add_parser("derive", parents=[common], help="print a derived algebra")
    s.add_argument("algebra")
    s.add_argument("hypersub")
    s.set_defaults(func=cmd_derive)

    s = sub.add_parser("clone", parents=[common], help="list term operations")
    s.add_argument("algebra")
    s.add_argument("--arity", type=int, required=True)
    s.set_defaults(func=cmd_clone)

    s = sub.add_parser("product", parents=[common], help="direct product")
    s.add_argument("algebras", nargs="+")
    s.set_defaults(func=cmd_product)

    s = sub.add_parser("subalgebra", parents=[common], help="generated subalgebra")
    s.add_argument("algebra")
    s.add_argument("--gens", default="")
    s.set_defaults(func=cmd_subalgebra)

    for name, ultra in (("reduced-product", False), ("ultraproduct", True)):
        s = sub.add_parser(name, parents=[common])
        s.add_argument("algebras", nargs="+")
        s.add_argument("--filter", required=True,
                       help="'{0,1};{0,1,2}', 'principal:I' or 'trivial'")
        s.set_defaults(func=lambda ws, a, out, u=ultra: cmd_reduced_product(ws, a, out, u))

    s = sub.add_parser("direct-limit", parents=[common])
    s.add_argument("spectrum")
    s.set_defaults(func=cmd_direct_limit)

    s = sub.add_parser("lab", parents=[common], help="checks from the lab module")
    s.add_argument("check", choices=["medial", "prop23", "semidist", "abelian", "rb", "derived-closed"])
    s.add_argument("algebras", nargs="+")
    s.add_argument("--monoid", default="all")
    s.set_defaults(func=cmd_lab)
    return p


def main(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = _parser()
    try:
        with contextlib.redirect_stdout(stdout), contextlib.redirect_stderr(stderr):
            a = parser.parse_args(argv)
    except SystemExit as e:
        return 0 if e.code == 0 else 2
    a.files = getattr(a, "files", [])
    a.no_prelude = getattr(a, "no_prelude", False)
    a.max_arity = getattr(a, "max_arity", 3)
    a.clone_cap = getattr(a, "clone_cap", CLONE_CAP)
    a.depth_cap = getattr(a, "depth_cap", 12)
    out: list[str] = []
    try:
        ws = load(a.files, prelude=not a.no_prelude, depth_cap=a.depth_cap)
        code = a.func(ws, a, out)
    except (UsageError, WorkspaceError, TermError, AlgebraError, MonoidError, FilterError,
            SpectrumError, CloneCapExceeded, lab.NotALattice, OSError, ValueError) as e:
        for line in out:
            print(line, file=stdout)
        print(f"halg: error: {e}", file=stderr)
        return 2
    for line in out:
        print(line, file=stdout)
    return code


if __name__ == "__main__":
    sys.exit(main())
