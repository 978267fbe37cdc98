"""Random small instances for property checks and experiment scripts."""
from __future__ import annotations

import random
from itertools import product
from typing import Sequence

from .algebra import (FiniteAlgebra, QuasiIdentity, congruence_generated, quotient_algebra,
                      subalgebra_generated)
from .constructions import DirectSpectrum, FilterOnFiniteSet
from .hyper import HyperMonoid, Hypersubstitution, MonoidTooLarge, monoid_closure
from .terms import App, Signature, Term, Var
from .zoo import GROUPOID


def random_algebra(rng: random.Random, sig: Signature = GROUPOID, max_size: int = 3,
                   size: int | None = None) -> FiniteAlgebra:
    n = size or rng.randint(1, max_size)
    tables = [[rng.randrange(n) for _ in range(n**m)] for m in sig.arities]
    return FiniteAlgebra(sig, n, tables, f"R{n}")


def random_term(rng: random.Random, sig: Signature, k: int, depth: int) -> Term:
    """Random term over x0..x_{k-1} of depth at most ``depth``."""
    leaves = [op for op, m in enumerate(sig.arities) if m == 0]
    inner = [op for op, m in enumerate(sig.arities) if m > 0]
    if depth == 0 or not inner or rng.random() < 0.3:
        if k and (not leaves or rng.random() < 0.8):
            return Var(rng.randrange(k))
        if leaves:
            return App(rng.choice(leaves), ())
        return Var(0)
    op = rng.choice(inner)
    return App(op, tuple(random_term(rng, sig, k, depth - 1) for _ in range(sig.arity(op))))


def random_hypersub(rng: random.Random, sig: Signature, depth: int = 2) -> Hypersubstitution:
    return Hypersubstitution(sig, tuple(random_term(rng, sig, m, depth) for m in sig.arities))


def random_monoid(rng: random.Random, A: FiniteAlgebra, max_members: int = 4,
                  tries: int = 40) -> HyperMonoid:
    """Closure of one or two random hypersubstitutions modulo ``A``, kept
    only when it has at most ``max_members`` members."""
    for _ in range(tries):
        gens = [random_hypersub(rng, A.sig) for _ in range(rng.randint(1, 2))]
        try:
            return monoid_closure(gens, algebra=A, limit=max_members)
        except MonoidTooLarge:
            continue
    return monoid_closure([], algebra=A, sig=A.sig)


def random_quasi(rng: random.Random, sig: Signature, max_vars: int = 3, max_premises: int = 2,
                 depth: int = 2) -> QuasiIdentity:
    k = rng.randint(1, max_vars)

    def eq():
        return random_term(rng, sig, k, depth), random_term(rng, sig, k, depth)
    return QuasiIdentity(sig, k, tuple(eq() for _ in range(rng.randint(0, max_premises))), eq())


def random_filter(rng: random.Random, index_size: int) -> FilterOnFiniteSet:
    """A random proper filter; on a finite set these are all principal."""
    core = [i for i in range(index_size) if rng.random() < 0.5] or [rng.randrange(index_size)]
    return FilterOnFiniteSet.up_closure(index_size, core)


def random_quotient(rng: random.Random, A: FiniteAlgebra):
    pairs = [(rng.randrange(A.size), rng.randrange(A.size)) for _ in range(rng.randint(0, 1))]
    return quotient_algebra(A, congruence_generated(A, pairs))


def random_subdirect_gens(rng: random.Random, factors: Sequence[FiniteAlgebra]) -> list[int]:
    """Generators of a subalgebra of the product whose projections are onto."""
    from .algebra import direct_product
    from .constructions import is_subdirect
    P = direct_product(factors)
    gens = [rng.randrange(P.size) for _ in range(rng.randint(1, 2))]
    while True:
        B, emb = subalgebra_generated(P, gens)
        if is_subdirect(B, emb, factors):
            return gens
        gens.append(rng.randrange(P.size))


def random_spectrum(rng: random.Random, sig: Signature = GROUPOID, max_size: int = 3,
                    superdirect: bool = False) -> DirectSpectrum:
    """Spectrum over a point, a 2- or 3-chain, or a V (0, 1 <= 2).

    Maps are quotient maps or, unless ``superdirect``, inclusions.
    """
    shape = rng.choice(["point", "chain2", "chain3", "vee"])
    if shape == "point":
        return DirectSpectrum([random_algebra(rng, sig, max_size)], set())
    if shape in ("chain2", "chain3"):
        points = 2 if shape == "chain2" else 3
        algebras = [random_algebra(rng, sig, max_size)]
        maps = {}
        for i in range(points - 1):
            B, g = _step(rng, algebras[i], max_size, superdirect)
            algebras.append(B)
            maps[(i, i + 1)] = g
        return DirectSpectrum(algebras, {(i, i + 1) for i in range(points - 1)}, maps)
    X = random_algebra(rng, sig, max_size)
    if superdirect:
        pairs1 = [(rng.randrange(X.size), rng.randrange(X.size))]
        pairs2 = pairs1 + [(rng.randrange(X.size), rng.randrange(X.size))]
        A1, p1 = quotient_algebra(X, congruence_generated(X, pairs1))
        A2, p2 = quotient_algebra(X, congruence_generated(X, pairs2))
        g12 = [0] * A1.size
        for x in range(X.size):
            g12[p1[x]] = p2[x]
        return DirectSpectrum([X, A1, A2], {(0, 2), (1, 2)}, {(0, 2): p2, (1, 2): tuple(g12)})
    S0, e0 = subalgebra_generated(X, [rng.randrange(X.size)])
    S1, e1 = subalgebra_generated(X, [rng.randrange(X.size)])
    return DirectSpectrum([S0, S1, X], {(0, 2), (1, 2)}, {(0, 2): e0, (1, 2): e1})


def extend_algebra(rng: random.Random, A: FiniteAlgebra, m: int) -> FiniteAlgebra:
    """Random algebra on m >= |A| elements with A as the subalgebra on 0..|A|-1."""
    n = A.size
    tables = []
    for op, ar in enumerate(A.sig.arities):
        tab = [rng.randrange(m) for _ in range(m**ar)]
        for args in product(range(n), repeat=ar):
            idx = 0
            for a in args:
                idx = idx * m + a
            tab[idx] = A.op(op, *args)
        tables.append(tab)
    return FiniteAlgebra(A.sig, m, tables, f"R{m}")


def _step(rng, A, max_size, superdirect):
    """A homomorphism out of ``A``: a quotient map or an inclusion."""
    if superdirect or rng.random() < 0.6:
        return random_quotient(rng, A)
    m = min(max_size, A.size + rng.randint(0, 1))
    return extend_algebra(rng, A, m), tuple(range(A.size))


def random_prop43_instance(rng: random.Random, case: int, sig: Signature = GROUPOID,
                           max_size: int = 3, max_index: int = 3) -> dict:
    """Keyword arguments for ``lab.check_prop43_case`` on a random instance."""
    def family():
        return [random_algebra(rng, sig, max_size) for _ in range(rng.randint(1, max_index))]
    if case == 1:
        A = random_algebra(rng, sig, max_size)
        gens = [rng.randrange(A.size) for _ in range(rng.randint(1, 2))]
        return {"algebras": [A], "gens": gens}
    if case == 2:
        fam = family()[:rng.randint(0, max_index)]
        return {"algebras": fam, "sig": sig}
    if case == 3:
        return {"algebras": family()}
    if case == 4:
        fam = family()
        return {"algebras": fam, "gens": random_subdirect_gens(rng, fam)}
    if case == 5:
        fam = family()
        return {"algebras": fam, "filter": random_filter(rng, len(fam))}
    if case == 6:
        fam = family()
        return {"algebras": fam, "filter": FilterOnFiniteSet.principal(len(fam), rng.randrange(len(fam)))}
    if case in (7, 8):
        return {"spectrum": random_spectrum(rng, sig, max_size, superdirect=case == 8)}
    raise ValueError(f"unknown case {case}")
