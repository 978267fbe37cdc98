"""Executable checks: abelianness, semidistributivity, the lattice
hyper-quasi-identity, medial and rectangular-band hyperidentities,
commutation of derived algebras with class operators, derived closure."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .algebra import (FiniteAlgebra, QuasiIdentity, Verdict, decode, direct_product, find_isomorphism,
                      restrict, satisfies_identity, satisfies_quasi_identity, subalgebra_generated)
from .clone import CLONE_CAP, enumerate_term_operations
from .constructions import (DirectSpectrum, FilterOnFiniteSet, direct_limit, is_subdirect,
                            is_superdirect, reduced_product, ultraproduct)
from .hyper import (HyperMonoid, Hypersubstitution, all_hypersubstitutions_mod, derived_algebra,
                    satisfies_M_hyper_quasi_identity, satisfies_M_hyperidentity)
from .terms import App, Signature, Term, Var, parse_equation


class NotALattice(ValueError):
    pass


# --- abelianness -------------------------------------------------------------

@dataclass(frozen=True)
class AbelianWitness:
    term: Term
    u: int
    v: int
    x: tuple[int, ...]
    y: tuple[int, ...]


@dataclass(frozen=True)
class AbelianVerdict(Verdict):
    max_arity: int = 0


def _term_condition_failure(table: np.ndarray, n: int, m: int):
    """Least ``(u, v, x, y)`` with f(u,x)=f(u,y) and f(v,x)!=f(v,y), or the
    converse; None when the term condition holds for ``f``."""
    rows = table.reshape(n, n ** (m - 1))
    kernel = rows[:, :, None] == rows[:, None, :]
    if (kernel == kernel[0]).all():
        return None
    bad = np.argwhere(kernel[:, None, :, :] != kernel[None, :, :, :])
    u, v, xi, yi = (int(c) for c in bad[0])
    return u, v, decode(xi, n, m - 1), decode(yi, n, m - 1)


def is_abelian(A: FiniteAlgebra, max_arity: int = 3, clone_cap: int = CLONE_CAP) -> AbelianVerdict:
    """Term condition for every term operation of arity 2..max_arity.

    "Abelian" here always means abelian up to ``max_arity``.
    """
    if max_arity < 2:
        raise ValueError("max_arity must be at least 2")
    for m in range(2, max_arity + 1):
        for table, term in enumerate_term_operations(A, m, clone_cap):
            hit = _term_condition_failure(table, A.size, m)
            if hit is not None:
                return AbelianVerdict(False, AbelianWitness(term, *hit), max_arity)
    return AbelianVerdict(True, None, max_arity)


def hyper_slot(A: FiniteAlgebra, m: int, name: str = "F"):
    """Expand ``A`` by an m-ary hypervariable symbol and build the monoid
    of hypersubstitutions sending it to each m-ary term operation of A.

    The new symbol is interpreted as the first projection, so the identity
    hypersubstitution coincides (modulo the expanded algebra) with the
    member whose image is ``x0``.
    """
    while name in {s for s, _ in A.sig.symbols}:
        name += "_"
    sig = Signature(A.sig.symbols + ((name, m),), f"{A.sig.name}+{name}")
    proj = np.repeat(np.arange(A.size), A.size ** (m - 1))
    B = FiniteAlgebra(sig, A.size, list(A.tables) + [proj], A.name, A.labels)
    ident = Hypersubstitution.identity(sig).images
    f = len(A.sig)
    members = [Hypersubstitution(sig, ident[:f] + (w,))
               for w in enumerate_term_operations(A, m).witnesses]
    return B, HyperMonoid.explicit(members, algebra=B), f


def _abelian_quasi(sig: Signature, f: int, m: int):
    """Both directions of the term condition as quasi-identities in 2m
    variables: u=x0, v=x1, x-bar=x2.., y-bar=x_{m+1}.."""
    u, v = Var(0), Var(1)
    xs = tuple(Var(2 + i) for i in range(m - 1))
    ys = tuple(Var(m + 1 + i) for i in range(m - 1))
    fu = (App(f, (u,) + xs), App(f, (u,) + ys))
    fv = (App(f, (v,) + xs), App(f, (v,) + ys))
    k = 2 * m
    return QuasiIdentity(sig, k, (fu,), fv), QuasiIdentity(sig, k, (fv,), fu)


def abelian_via_hyperquasi(A: FiniteAlgebra, max_arity: int = 3) -> AbelianVerdict:
    """Abelianness as two hyper-quasi-identities per arity, over all term
    operations of that arity. Witnesses use the is_abelian format."""
    if max_arity < 2:
        raise ValueError("max_arity must be at least 2")
    for m in range(2, max_arity + 1):
        B, M, f = hyper_slot(A, m)
        q1, q2 = _abelian_quasi(B.sig, f, m)
        fails = [v.witness for v in (satisfies_M_hyper_quasi_identity(B, M, q1),
                                     satisfies_M_hyper_quasi_identity(B, M, q2)) if not v]
        if fails:
            w = min(fails, key=lambda w: (w.index, w.assignment))
            a = w.assignment
            return AbelianVerdict(False, AbelianWitness(w.sigma.images[f], a[0], a[1],
                                                        a[2:m + 1], a[m + 1:]), max_arity)
    return AbelianVerdict(True, None, max_arity)


# --- lattices ----------------------------------------------------------------

LATTICE_LAWS = (
    (1, "meet(x0, x0) = x0"), (1, "join(x0, x0) = x0"),
    (2, "meet(x0, x1) = meet(x1, x0)"), (2, "join(x0, x1) = join(x1, x0)"),
    (3, "meet(meet(x0, x1), x2) = meet(x0, meet(x1, x2))"),
    (3, "join(join(x0, x1), x2) = join(x0, join(x1, x2))"),
    (2, "meet(x0, join(x0, x1)) = x0"), (2, "join(x0, meet(x0, x1)) = x0"),
)


def check_lattice(L: FiniteAlgebra) -> None:
    names = {s for s, _ in L.sig.symbols}
    if not {"meet", "join"} <= names or L.sig.arity(L.sig.index("meet")) != 2 \
            or L.sig.arity(L.sig.index("join")) != 2:
        raise NotALattice("signature needs binary symbols meet and join")
    for k, law in LATTICE_LAWS:
        v = satisfies_identity(L, *parse_equation(law, L.sig), k)
        if not v:
            raise NotALattice(f"{law} fails at {v.witness}")


def sd_join_law(sig: Signature) -> QuasiIdentity:
    """x v y = x v z  ->  x v y = x v (y ^ z)."""
    return QuasiIdentity(sig, 3, (parse_equation("join(x0, x1) = join(x0, x2)", sig),),
                         parse_equation("join(x0, x1) = join(x0, meet(x1, x2))", sig))


def sd_meet_law(sig: Signature) -> QuasiIdentity:
    return QuasiIdentity(sig, 3, (parse_equation("meet(x0, x1) = meet(x0, x2)", sig),),
                         parse_equation("meet(x0, x1) = meet(x0, join(x1, x2))", sig))


def semidistributivity(L: FiniteAlgebra) -> tuple[Verdict, Verdict]:
    """``(SD_join, SD_meet)``, each with the least failing triple."""
    check_lattice(L)
    return satisfies_quasi_identity(L, sd_join_law(L.sig)), satisfies_quasi_identity(L, sd_meet_law(L.sig))


@dataclass(frozen=True)
class JoinMeetWitness:
    F: Term
    G: Term
    assignment: tuple[int, int, int]


def check_prop23(L: FiniteAlgebra) -> Verdict:
    """``F(x,y) = F(x,z) -> F(x,y) = F(x,G(y,z))`` over all pairs of binary
    term operations. F is carried by the join symbol and G by meet, so the
    hyper-quasi-identity is the join law read with both symbols hyper."""
    check_lattice(L)
    M = all_hypersubstitutions_mod(L)
    v = satisfies_M_hyper_quasi_identity(L, M, sd_join_law(L.sig))
    if v:
        return v
    w = v.witness
    sig = L.sig
    return Verdict(False, JoinMeetWitness(w.sigma.images[sig.index("join")],
                                        w.sigma.images[sig.index("meet")], w.assignment))


# --- hyperidentities -----------------------------------------------------------

def check_medial(A: FiniteAlgebra, clone_cap: int = CLONE_CAP) -> Verdict:
    """Medial hyperidentity F(F(x0,x1),F(x2,x3)) = F(F(x0,x2),F(x1,x3)) over
    every binary term operation of an algebra with one binary symbol."""
    if A.sig.arities != (2,):
        raise ValueError("medial check needs a signature with exactly one binary symbol")
    M = all_hypersubstitutions_mod(A, clone_cap)
    F = lambda a, b: App(0, (a, b))  # noqa: E731
    x = [Var(i) for i in range(4)]
    return satisfies_M_hyperidentity(A, M, F(F(x[0], x[1]), F(x[2], x[3])),
                                     F(F(x[0], x[2]), F(x[1], x[3])), 4)


@dataclass(frozen=True)
class RBWitness:
    arity: int
    law: int  # 0 idempotence, 1 first-argument, 2 last-argument
    image: Term
    assignment: tuple[int, ...]


def rb_hyperidentities(f: int, m: int):
    """The three rectangular-band hyperidentities for an m-ary F as
    ``(lhs, rhs, k)``."""
    F = lambda *a: App(f, a)  # noqa: E731
    x = [Var(i) for i in range(2 * m - 1)]
    inner, rest = x[:m], x[m:2 * m - 1]
    return [
        (F(*[x[0]] * m), x[0], 1),
        (F(F(*inner), *rest), F(x[0], *rest), 2 * m - 1),
        (F(*x[:m - 1], F(*x[m - 1:2 * m - 1])), F(*x[:m - 1], x[2 * m - 2]), 2 * m - 1),
    ]


def check_rb_hyperidentities(A: FiniteAlgebra, max_arity: int = 3) -> Verdict:
    if max_arity < 2:
        raise ValueError("max_arity must be at least 2")
    for m in range(2, max_arity + 1):
        B, M, f = hyper_slot(A, m)
        for law, (lhs, rhs, k) in enumerate(rb_hyperidentities(f, m)):
            v = satisfies_M_hyperidentity(B, M, lhs, rhs, k)
            if not v:
                w = v.witness
                return Verdict(False, RBWitness(m, law, w.sigma.images[f], w.assignment))
    return Verdict(True)


# --- class operators and derived algebras ---------------------------------------

@dataclass
class InclusionReport:
    case: int
    holds: bool
    sigma: Hypersubstitution | None = None
    lhs: FiniteAlgebra | None = None
    rhs: FiniteAlgebra | None = None
    isomorphism: tuple[int, ...] | None = None
    detail: str = ""

    def __bool__(self):
        return self.holds


def _compare(case, sigma, lhs, rhs, extra_ok=True, detail=""):
    same = lhs == rhs
    iso = tuple(range(lhs.size)) if same else find_isomorphism(lhs, rhs)
    return InclusionReport(case, (same or iso is not None) and extra_ok, sigma, lhs, rhs, iso,
                        detail or ("equal tables" if same else "isomorphic" if iso else "differ"))


def check_prop43_case(case: int, M: HyperMonoid | Sequence[Hypersubstitution], *,
                      algebras: Sequence[FiniteAlgebra] = (), gens: Sequence[int] = (),
                      filter: FilterOnFiniteSet | None = None,
                      spectrum: DirectSpectrum | None = None,
                      sig: Signature | None = None) -> InclusionReport:
    """Build a member of the left-hand class for each sigma in ``M`` and the
    right-hand witness from the derived factors; compare them.

    case 1: S, algebras=[A], gens in A;  2/3: P / P_fin, algebras;
    4: P_s, algebras and gens in their product (must generate a subdirect
    product);  5: P_r, algebras and filter;  6: P_u, ultrafilter;
    7: L, spectrum;  8: L_s, superdirect spectrum.
    """
    members = list(M.members if isinstance(M, HyperMonoid) else M)
    report = None
    for sigma in members:
        report = _prop43_one(case, sigma, list(algebras), list(gens), filter, spectrum, sig)
        if not report:
            return report
    return report


def _prop43_one(case, sigma, algebras, gens, filt, spectrum, sig) -> InclusionReport:
    if case == 1:
        (A,) = algebras
        S, emb = subalgebra_generated(A, gens)
        rhs = restrict(derived_algebra(A, sigma), emb)
        return _compare(case, sigma, derived_algebra(S, sigma), rhs)
    if case in (2, 3):
        if case == 3 and not algebras:
            raise ValueError("case 3 needs a nonempty finite family")
        P = direct_product(algebras, sig=sig)
        rhs = direct_product([derived_algebra(A, sigma) for A in algebras], sig=sig)
        return _compare(case, sigma, derived_algebra(P, sigma), rhs)
    if case == 4:
        P = direct_product(algebras)
        B, emb = subalgebra_generated(P, gens)
        if not is_subdirect(B, emb, algebras):
            raise ValueError("generators do not give a subdirect product")
        derived = [derived_algebra(A, sigma) for A in algebras]
        rhs = restrict(direct_product(derived), emb)
        return _compare(case, sigma, derived_algebra(B, sigma), rhs,
                        extra_ok=is_subdirect(rhs, emb, derived))
    if case in (5, 6):
        build = reduced_product if case == 5 else ultraproduct
        Q, _ = build(algebras, filt)
        rhs, _ = build([derived_algebra(A, sigma) for A in algebras], filt)
        return _compare(case, sigma, derived_algebra(Q, sigma), rhs)
    if case in (7, 8):
        if case == 8 and not is_superdirect(spectrum):
            raise ValueError("case 8 needs a superdirect spectrum")
        lim = direct_limit(spectrum).algebra
        dspec = spectrum.derived(sigma)
        rhs = direct_limit(dspec).algebra
        extra = is_superdirect(dspec) if case == 8 else True
        return _compare(case, sigma, derived_algebra(lim, sigma), rhs, extra_ok=extra)
    raise ValueError(f"unknown case {case}")


@dataclass(frozen=True)
class Escape:
    algebra: int
    sigma: Hypersubstitution
    derived: FiniteAlgebra


def check_derived_closed(K: Sequence[FiniteAlgebra], M: HyperMonoid | None = None) -> Verdict:
    """Is every derived algebra of every member of K isomorphic to a member
    of K? ``M=None`` uses all hypersubstitutions, materialised per algebra."""
    K = list(K)
    for i, A in enumerate(K):
        monoid = M if M is not None else all_hypersubstitutions_mod(A)
        if monoid.mode == "all-mod":
            monoid.check_algebra(A)
        for sigma in monoid.members:
            D = derived_algebra(A, sigma)
            if not any(B.size == D.size and find_isomorphism(D, B) is not None for B in K):
                return Verdict(False, Escape(i, sigma, D))
    return Verdict(True)
