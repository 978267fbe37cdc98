"""Small standard algebras used by the lab, the CLI prelude and the tests."""
from __future__ import annotations

from itertools import permutations, product

from .algebra import FiniteAlgebra, trivial_algebra
from .terms import Signature

GROUPOID = Signature((("plus", 2),), "G")
LATTICE = Signature((("meet", 2), ("join", 2)), "Lat")


def groupoid(n: int, fn, name: str = "", sig: Signature = GROUPOID, labels=None) -> FiniteAlgebra:
    return FiniteAlgebra(sig, n, [[fn(a, b) for a in range(n) for b in range(n)]], name, labels)


def cyclic_group(n: int) -> FiniteAlgebra:
    """``(Z_n, +)``."""
    return groupoid(n, lambda a, b: (a + b) % n, f"Z{n}")


def left_zero_band(n: int = 2) -> FiniteAlgebra:
    return groupoid(n, lambda a, b: a, f"LZ{n}")


def right_zero_band(n: int = 2) -> FiniteAlgebra:
    return groupoid(n, lambda a, b: b, f"RZ{n}")


def constant_groupoid(n: int = 2, c: int = 0) -> FiniteAlgebra:
    return groupoid(n, lambda a, b: c, f"C{n}")


def rectangular_band(p: int = 2, q: int = 2) -> FiniteAlgebra:
    """Pairs ``(a, b)`` encoded as ``a*q + b`` with ``(a,b)(c,d) = (a,d)``."""
    def mul(x, y):
        return (x // q) * q + y % q
    labels = [f"{a}{b}" for a in range(p) for b in range(q)]
    return groupoid(p * q, mul, f"RB{p}{q}", labels=labels)


def trivial_groupoid() -> FiniteAlgebra:
    return trivial_algebra(GROUPOID, "T")


def lattice_from_order(leq, name: str = "", labels=None) -> FiniteAlgebra:
    """Meet/join tables of a finite lattice from its order matrix."""
    n = len(leq)

    def rel(a, b):
        return bool(leq[a][b])

    def bound(a, b, lower):
        cands = [c for c in range(n) if (rel(c, a) and rel(c, b) if lower else rel(a, c) and rel(b, c))]
        best = [c for c in cands if all((rel(d, c) if lower else rel(c, d)) for d in cands)]
        if len(best) != 1:
            raise ValueError(f"not a lattice: no {'meet' if lower else 'join'} of {a}, {b}")
        return best[0]

    meet = [bound(a, b, True) for a in range(n) for b in range(n)]
    join = [bound(a, b, False) for a in range(n) for b in range(n)]
    return FiniteAlgebra(LATTICE, n, [meet, join], name, labels)


def _order_from_covers(n, covers):
    leq = [[a == b for b in range(n)] for a in range(n)]
    for a, b in covers:
        leq[a][b] = True
    for k in range(n):
        for a in range(n):
            for b in range(n):
                if leq[a][k] and leq[k][b]:
                    leq[a][b] = True
    return leq


def chain(n: int) -> FiniteAlgebra:
    return lattice_from_order([[a <= b for b in range(n)] for a in range(n)], f"C{n}L")


def two_element_lattice() -> FiniteAlgebra:
    return chain(2).renamed("L2")


def n5() -> FiniteAlgebra:
    """Pentagon: 0 < a < b < 1 and 0 < c < 1."""
    labels = ["0", "a", "b", "c", "1"]
    covers = [(0, 1), (1, 2), (2, 4), (0, 3), (3, 4)]
    return lattice_from_order(_order_from_covers(5, covers), "N5", labels)


def m3() -> FiniteAlgebra:
    """Diamond with atoms a, b, c."""
    labels = ["0", "a", "b", "c", "1"]
    covers = [(0, 1), (0, 2), (0, 3), (1, 4), (2, 4), (3, 4)]
    return lattice_from_order(_order_from_covers(5, covers), "M3", labels)


def dual(L: FiniteAlgebra, name: str = "") -> FiniteAlgebra:
    """Same carrier with the two lattice operations exchanged."""
    return FiniteAlgebra(L.sig, L.size, [L.tables[1], L.tables[0]], name or f"{L.name}^d", L.labels)


def lattices_up_to(max_size: int) -> list[FiniteAlgebra]:
    """All lattices with at most ``max_size`` elements, one per iso type.

    Brute force over orders on {0..n-1} with 0 bottom and n-1 top, filtered
    to lattices and deduplicated by relabelling the inner elements.
    """
    out = []
    for n in range(1, max_size + 1):
        if n <= 2:
            out.append(chain(n))
            continue
        inner = list(range(1, n - 1))
        pairs = [(a, b) for a in inner for b in inner if a != b]
        seen = set()
        for bits in product((False, True), repeat=len(pairs)):
            rel = {p for p, on in zip(pairs, bits) if on}
            if any((b, a) in rel for a, b in rel):
                continue
            if any((a, b) in rel and (b, c) in rel and (a, c) not in rel
                   for a in inner for b in inner for c in inner if len({a, b, c}) == 3):
                continue
            canon = min(
                tuple(sorted((perm[a - 1], perm[b - 1]) for a, b in rel))
                for perm in permutations(inner))
            if canon in seen:
                continue
            seen.add(canon)
            leq = [[a == b or a == 0 or b == n - 1 or (a, b) in rel for b in range(n)]
                   for a in range(n)]
            try:
                out.append(lattice_from_order(leq, f"Lat{n}_{len(seen)}"))
            except ValueError:
                continue
    return out


def standard_algebras() -> dict[str, FiniteAlgebra]:
    algs = [cyclic_group(2), cyclic_group(3), cyclic_group(4), left_zero_band(2),
            right_zero_band(2), constant_groupoid(2), rectangular_band(2, 2), trivial_groupoid(),
            two_element_lattice(), n5(), m3()]
    return {A.name: A for A in algs}
