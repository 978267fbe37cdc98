"""Hypersubstitutions, hypersubstitution monoids, derived algebras and
hyper-satisfaction of identities and quasi-identities.

A hypersubstitution maps each m-ary operation symbol to a term over
x0..x_{m-1} of the same signature. Its extension to all terms fixes
variables and rewrites ``f(t_1, ..., t_m)`` to ``sigma(f)`` with each ``x_i``
replaced by the rewritten ``t_{i+1}``.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Mapping, Sequence

import numpy as np

from .algebra import (AlgebraError, FiniteAlgebra, QuasiIdentity, Verdict, decode,
                      quasi_identity_failures, satisfies_quasi_identity, term_table)
from .clone import CLONE_CAP, enumerate_term_operations
from .terms import App, Signature, Term, TermError, Var, check_term, format_term, substitute


class MonoidError(ValueError):
    pass


class DepthCapExceeded(MonoidError):
    pass


class MonoidTooLarge(MonoidError):
    pass


def projection_term(op: int, arity: int) -> App:
    return App(op, tuple(Var(i) for i in range(arity)))


@dataclass(frozen=True)
class Hypersubstitution:
    sig: Signature
    images: tuple[Term, ...]

    def __post_init__(self):
        object.__setattr__(self, "images", tuple(self.images))
        if len(self.images) != len(self.sig):
            raise TermError("hypersubstitution must give one image per symbol")
        for op, img in enumerate(self.images):
            check_term(img, self.sig, self.sig.arity(op))

    @classmethod
    def identity(cls, sig: Signature) -> "Hypersubstitution":
        return cls(sig, tuple(projection_term(op, m) for op, m in enumerate(sig.arities)))

    @classmethod
    def from_mapping(cls, sig: Signature, mapping: Mapping[str, Term]) -> "Hypersubstitution":
        """Images by symbol name; symbols left out keep their identity image."""
        images = list(cls.identity(sig).images)
        for sym, img in mapping.items():
            images[sig.index(sym)] = img
        return cls(sig, tuple(images))

    def __call__(self, t: Term) -> Term:
        return apply_hyper(self, t)

    def is_identity(self) -> bool:
        return self == Hypersubstitution.identity(self.sig)

    def describe(self) -> str:
        """Compact ``sym->image`` list; identity images abbreviate to the name."""
        parts = []
        for op, img in enumerate(self.images):
            parts.append(f"{self.sig.symbol(op)}->{short_term(img, self.sig)}")
        return ";".join(parts)


def short_term(t: Term, sig: Signature) -> str:
    """``f`` for ``f(x0, ..., x_{m-1})``, the compact term otherwise."""
    if isinstance(t, App) and t.args and t == projection_term(t.op, len(t.args)):
        return sig.symbol(t.op)
    return format_term(t, sig, compact=True)


def apply_hyper(sigma: Hypersubstitution, t: Term, _memo: dict | None = None) -> Term:
    memo = {} if _memo is None else _memo
    hit = memo.get(t)
    if hit is not None:
        return hit
    if isinstance(t, Var):
        out = t
    else:
        args = [apply_hyper(sigma, a, memo) for a in t.args]
        out = substitute(sigma.images[t.op], args)
    memo[t] = out
    return out


def compose(s1: Hypersubstitution, s2: Hypersubstitution) -> Hypersubstitution:
    """``(s1 . s2)(f) = s1^(s2(f))``: apply s2 first, then s1."""
    if s1.sig != s2.sig:
        raise TermError("composing hypersubstitutions of different signatures")
    memo: dict = {}
    return Hypersubstitution(s1.sig, tuple(apply_hyper(s1, img, memo) for img in s2.images))


def derived_algebra(A: FiniteAlgebra, sigma: Hypersubstitution) -> FiniteAlgebra:
    if sigma.sig != A.sig:
        raise AlgebraError("hypersubstitution and algebra have different signatures")
    tables = [term_table(A, img, m) for img, m in zip(sigma.images, A.sig.arities)]
    name = f"{A.name}^sigma" if A.name else ""
    return FiniteAlgebra(A.sig, A.size, tables, name, A.labels)


def image_key(sigma: Hypersubstitution, A: FiniteAlgebra | None):
    """Identity of ``sigma`` under the active equivalence: syntax, or the
    term functions of its images on ``A``."""
    if A is None:
        return sigma.images
    return tuple(term_table(A, img, m).tobytes() for img, m in zip(sigma.images, A.sig.arities))


class HyperMonoid:
    """A finite monoid of hypersubstitutions.

    ``mode`` is ``"explicit"`` (a validated member list, optionally taken
    modulo term-function equality on ``algebra``) or ``"all-mod"`` (every
    hypersubstitution of the type, one representative per tuple of image
    term functions on ``algebra``).
    """

    def __init__(self, sig: Signature, members: Sequence[Hypersubstitution], mode: str,
                 algebra: FiniteAlgebra | None = None, names: Sequence[str] | None = None):
        self.sig = sig
        self.members = tuple(members)
        self.mode = mode
        self.algebra = algebra
        self.names = tuple(names) if names is not None else tuple(str(i) for i in range(len(self.members)))

    def __len__(self):
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    def __repr__(self):
        return f"HyperMonoid({self.mode}, {len(self)} members)"

    @classmethod
    def explicit(cls, members: Sequence[Hypersubstitution], algebra: FiniteAlgebra | None = None,
                 names: Sequence[str] | None = None) -> "HyperMonoid":
        """Validate that ``members`` contain the identity and are closed
        under composition (modulo ``algebra`` when given)."""
        members = list(members)
        if not members:
            raise MonoidError("a monoid needs at least the identity")
        sig = members[0].sig
        if any(s.sig != sig for s in members):
            raise MonoidError("members have different signatures")
        if algebra is not None and algebra.sig != sig:
            raise MonoidError("reference algebra has a different signature")
        names = list(names) if names is not None else [str(i) for i in range(len(members))]
        keys = {image_key(s, algebra): i for i, s in enumerate(members)}
        if image_key(Hypersubstitution.identity(sig), algebra) not in keys:
            raise MonoidError("identity hypersubstitution is missing")
        for i, a in enumerate(members):
            for j, b in enumerate(members):
                c = compose(a, b)
                if image_key(c, algebra) not in keys:
                    raise MonoidError(
                        f"not closed under composition: {names[i]} . {names[j]} = {c.describe()}")
        return cls(sig, members, "explicit", algebra, names)

    def check_algebra(self, A: FiniteAlgebra):
        if A.sig != self.sig:
            raise MonoidError("monoid and algebra have different signatures")
        if self.algebra is not None and self.algebra != A:
            raise MonoidError("monoid was materialised for a different algebra")

    def name_of(self, i: int) -> str:
        return self.names[i]


def monoid_closure(gens: Sequence[Hypersubstitution], algebra: FiniteAlgebra | None = None,
                   depth_cap: int = 12, sig: Signature | None = None,
                   limit: int | None = None) -> HyperMonoid:
    """Least monoid containing ``gens``, found breadth-first by composing
    members on the right with generators.

    Without ``algebra`` members are compared syntactically and the search
    fails when words longer than ``depth_cap`` still produce new members.
    With it, members are identified when their images have equal term
    functions on ``algebra``; since A^(w.g) = (A^w)^g, right multiplication
    respects that identification, so the members are exactly the classes of
    the generated monoid. ``limit`` bounds the member count (MonoidTooLarge).
    """
    gens = list(gens)
    if sig is None:
        if not gens:
            raise MonoidError("need a signature or at least one generator")
        sig = gens[0].sig
    if any(g.sig != sig for g in gens):
        raise MonoidError("generators have different signatures")
    members = [Hypersubstitution.identity(sig)]
    keys = {image_key(members[0], algebra)}
    level = [members[0]]
    length = 0
    while level:
        nxt = []
        for w in level:
            for g in gens:
                c = compose(w, g)
                k = image_key(c, algebra)
                if k in keys:
                    continue
                if algebra is None and length >= depth_cap:
                    raise DepthCapExceeded(
                        f"syntactic closure still growing after words of length {depth_cap}")
                keys.add(k)
                members.append(c)
                nxt.append(c)
                if limit is not None and len(members) > limit:
                    raise MonoidTooLarge(f"closure has more than {limit} members")
        level = nxt
        length += 1
    return HyperMonoid(sig, members, "explicit", algebra)


def all_hypersubstitutions_mod(A: FiniteAlgebra, clone_cap: int = CLONE_CAP) -> HyperMonoid:
    """Every hypersubstitution of A's type, one per tuple of image term
    functions on ``A``. Members vary the last symbol fastest."""
    choices = []
    cache: dict[int, list[Term]] = {}
    for m in A.sig.arities:
        if m not in cache:
            cache[m] = list(enumerate_term_operations(A, m, clone_cap).witnesses)
        choices.append(cache[m])
    members = [Hypersubstitution(A.sig, imgs) for imgs in product(*choices)]
    return HyperMonoid(A.sig, members, "all-mod", A)


@dataclass(frozen=True)
class HyperWitness:
    index: int
    sigma: Hypersubstitution
    assignment: tuple[int, ...]


def satisfies_M_hyperidentity(A: FiniteAlgebra, M: HyperMonoid, lhs: Term, rhs: Term, k: int) -> Verdict:
    q = QuasiIdentity(A.sig, k, (), (lhs, rhs))
    return satisfies_M_hyper_quasi_identity(A, M, q)


def hyper_transform(sigma: Hypersubstitution, q: QuasiIdentity) -> QuasiIdentity:
    memo: dict = {}
    return QuasiIdentity(
        q.sig, q.arity,
        tuple((apply_hyper(sigma, l, memo), apply_hyper(sigma, r, memo)) for l, r in q.premises),
        (apply_hyper(sigma, q.conclusion[0], memo), apply_hyper(sigma, q.conclusion[1], memo)))


def satisfies_M_hyper_quasi_identity(A: FiniteAlgebra, M: HyperMonoid, q: QuasiIdentity) -> Verdict:
    """For every sigma in M and every assignment: sigma-premises imply the
    sigma-conclusion. Evaluates the rewritten terms directly in ``A``."""
    M.check_algebra(A)
    for i, sigma in enumerate(M.members):
        bad = np.flatnonzero(quasi_identity_failures(A, hyper_transform(sigma, q)))
        if bad.size:
            return Verdict(False, HyperWitness(i, sigma, decode(int(bad[0]), A.size, q.arity)))
    return Verdict(True)


def hyper_quasi_via_derived(A: FiniteAlgebra, M: HyperMonoid, q: QuasiIdentity) -> Verdict:
    """Same verdict computed as ordinary satisfaction in each derived algebra."""
    M.check_algebra(A)
    for i, sigma in enumerate(M.members):
        v = satisfies_quasi_identity(derived_algebra(A, sigma), q)
        if not v:
            return Verdict(False, HyperWitness(i, sigma, v.witness))
    return Verdict(True)
