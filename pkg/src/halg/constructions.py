"""Reduced products, ultraproducts, direct and superdirect limits over
finite index sets, subdirectness and trivial-system adjunction."""
from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from itertools import product
from typing import Iterable, Mapping, Sequence

import numpy as np

from .algebra import (PRODUCT_BOUND, AlgebraError, Congruence, FiniteAlgebra, Verdict,
                      _UnionFind, apply_table, assignments, assignments_for_sizes,
                      canonical_blocks, direct_product, find_isomorphism, is_homomorphism,
                      projection_map, quotient_algebra, trivial_algebra)
from .hyper import Hypersubstitution, derived_algebra


class FilterError(ValueError):
    pass


class SpectrumError(ValueError):
    pass


def _subset_mask(s: Iterable[int], n: int | None = None) -> int:
    m = 0
    for i in s:
        if i < 0 or (n is not None and i >= n):
            raise FilterError(f"index {i} outside the index set of size {n}")
        m |= 1 << i
    return m


def _mask_members(mask: int, n: int) -> tuple[int, ...]:
    return tuple(i for i in range(n) if mask >> i & 1)


@dataclass(frozen=True)
class FilterOnFiniteSet:
    """A family of subsets of ``I = {0..index_size-1}`` stored as bitmasks."""
    index_size: int
    members: frozenset[int]

    @classmethod
    def from_sets(cls, index_size: int, sets: Iterable[Iterable[int]]) -> "FilterOnFiniteSet":
        return cls(index_size, frozenset(_subset_mask(s, index_size) for s in sets))

    @classmethod
    def up_closure(cls, index_size: int, *generators: Iterable[int]) -> "FilterOnFiniteSet":
        """Principal filter of all supersets of the intersection of ``generators``."""
        full = (1 << index_size) - 1
        core = full
        for g in generators:
            core &= _subset_mask(g, index_size)
        return cls(index_size, frozenset(s for s in range(full + 1) if s & core == core))

    @classmethod
    def principal(cls, index_size: int, i: int) -> "FilterOnFiniteSet":
        return cls.up_closure(index_size, [i])

    @classmethod
    def trivial(cls, index_size: int) -> "FilterOnFiniteSet":
        return cls(index_size, frozenset({(1 << index_size) - 1}))

    def __contains__(self, s) -> bool:
        mask = s if isinstance(s, int) else _subset_mask(s)
        return mask in self.members

    def sets(self) -> list[tuple[int, ...]]:
        return [_mask_members(m, self.index_size) for m in sorted(self.members)]


@dataclass(frozen=True)
class FilterReport:
    ok: bool
    proper: bool
    ultra: bool
    violations: tuple = ()
    not_ultra_witness: tuple[int, ...] | None = None

    def __bool__(self):
        return self.ok


def validate_filter(f: FilterOnFiniteSet) -> FilterReport:
    n = f.index_size
    full = (1 << n) - 1
    violations = []
    if any(m & ~full for m in f.members):
        violations.append(("not subsets of I",))
    if full not in f.members:
        violations.append(("I not a member",))
    members = sorted(f.members)
    for a in members:
        for b in range(full + 1):
            if b & a == a and b not in f.members:
                violations.append(("not upward closed", _mask_members(a, n), _mask_members(b, n)))
                break
    for a in members:
        for b in members:
            if a & b not in f.members:
                violations.append(("not closed under intersection",
                                   _mask_members(a, n), _mask_members(b, n)))
                break
    ok = not violations
    proper = 0 not in f.members
    witness = None
    if ok and proper:
        for s in range(full + 1):
            if s not in f.members and (full & ~s) not in f.members:
                witness = _mask_members(s, n)
                break
    ultra = ok and proper and witness is None
    return FilterReport(ok, proper, ultra, tuple(violations), witness)


def parse_filter(src: str, index_size: int) -> FilterOnFiniteSet:
    """``"principal:2"``, ``"trivial"`` or explicit sets ``"{0,1};{0,1,2}"``."""
    src = src.strip()
    if src == "trivial":
        return FilterOnFiniteSet.trivial(index_size)
    if src.startswith("principal:"):
        return FilterOnFiniteSet.principal(index_size, int(src.split(":", 1)[1]))
    sets = []
    for part in src.split(";"):
        part = part.strip()
        if not (part.startswith("{") and part.endswith("}")):
            raise FilterError(f"bad filter member {part!r}")
        body = part[1:-1].strip()
        sets.append([int(x) for x in body.split(",")] if body else [])
    return FilterOnFiniteSet.from_sets(index_size, sets)


def filter_congruence_blocks(algebras: Sequence[FiniteAlgebra], f: FilterOnFiniteSet) -> tuple[int, ...]:
    """Classes of ``a ~ b  iff  {i : a_i = b_i} in F`` on the full product."""
    coords = assignments_for_sizes(tuple(A.size for A in algebras))
    N = coords.shape[0]
    weights = 1 << np.arange(len(algebras), dtype=np.int64)
    members = np.array(sorted(f.members), dtype=np.int64)
    uf = _UnionFind(N)
    for a in range(N):
        agree = ((coords == coords[a]) * weights).sum(axis=1)
        for b in np.flatnonzero(np.isin(agree, members)).tolist():
            if b > a:
                uf.union(a, b)
    return canonical_blocks([uf.find(e) for e in range(N)])


def reduced_product(algebras: Sequence[FiniteAlgebra], f: FilterOnFiniteSet,
                    bound: int = PRODUCT_BOUND):
    """Return ``(prod A_i / F, class map from the full product)``."""
    algebras = list(algebras)
    if len(algebras) != f.index_size:
        raise FilterError("filter index set does not match the family")
    rep = validate_filter(f)
    if not rep.ok:
        raise FilterError(f"not a filter: {rep.violations[0]}")
    if not rep.proper:
        raise FilterError("filter is not proper")
    if not algebras:
        raise FilterError("reduced product of an empty family is undefined for a proper filter")
    P = direct_product(algebras, bound=bound)
    # Congruence validation re-checks every cell against block representatives
    c = Congruence(P, filter_congruence_blocks(algebras, f))
    Q, proj = quotient_algebra(P, c)
    return Q.renamed(f"prod/F({P.name})"), proj


def reduced_product_well_defined(algebras: Sequence[FiniteAlgebra], f: FilterOnFiniteSet) -> bool:
    """Recompute every cell of the reduced product from every choice of
    class representatives and compare."""
    Q, proj = reduced_product(algebras, f)
    P = direct_product(algebras)
    proj = np.asarray(proj)
    classes = [np.flatnonzero(proj == b) for b in range(Q.size)]
    for op, m in enumerate(P.sig.arities):
        for cls_args in product(range(Q.size), repeat=m):
            expected = Q.op(op, *cls_args)
            for reps in product(*(classes[c] for c in cls_args)):
                if proj[P.op(op, *reps)] != expected:
                    return False
    return True


def ultraproduct(algebras: Sequence[FiniteAlgebra], f: FilterOnFiniteSet):
    if not validate_filter(f).ultra:
        raise FilterError("filter is not an ultrafilter")
    return reduced_product(algebras, f)


def is_subdirect(B: FiniteAlgebra, embedding: Sequence[int], factors: Sequence[FiniteAlgebra]) -> bool:
    """``B`` embedded in ``prod factors``: every projection maps it onto."""
    P = direct_product(factors)
    if len(set(embedding)) != len(embedding):
        raise AlgebraError("embedding is not injective")
    if not is_homomorphism(B, P, embedding):
        raise AlgebraError("embedding is not a homomorphism")
    for j, A in enumerate(factors):
        pj = projection_map(factors, j)
        if len({pj[e] for e in embedding}) != A.size:
            return False
    return True


def adjoin_trivial(K: Sequence[FiniteAlgebra], sig) -> list[FiniteAlgebra]:
    K = list(K)
    if any(A.size == 1 for A in K):
        return K
    return K + [trivial_algebra(sig)]


# --- direct spectra ----------------------------------------------------------

@dataclass
class DirectSpectrum:
    """Algebras ``A_i`` over a finite up-directed poset with compatible
    homomorphisms ``g_ij`` for ``i <= j``.

    ``order`` may list only generating pairs; reflexive-transitive closure
    is taken and missing maps are composed along paths, then every triangle
    ``g_jk . g_ij = g_ik`` is checked.
    """
    algebras: list[FiniteAlgebra]
    order: set[tuple[int, int]]
    maps: dict[tuple[int, int], tuple[int, ...]] = field(default_factory=dict)

    def __post_init__(self):
        n = len(self.algebras)
        if n == 0:
            raise SpectrumError("spectrum has no points")
        sig = self.algebras[0].sig
        if any(A.sig != sig for A in self.algebras):
            raise SpectrumError("spectrum algebras have different signatures")
        self.sig = sig
        leq = {(i, i) for i in range(n)} | set(self.order)
        for i, j in leq:
            if not (0 <= i < n and 0 <= j < n):
                raise SpectrumError(f"order pair {i}<={j} outside the index set")
        changed = True
        while changed:
            changed = False
            for i, j in list(leq):
                for j2, k in list(leq):
                    if j == j2 and (i, k) not in leq:
                        leq.add((i, k))
                        changed = True
        for i, j in leq:
            if i != j and (j, i) in leq:
                raise SpectrumError(f"order is not antisymmetric: {i} and {j}")
        for i in range(n):
            for j in range(n):
                if not any((i, k) in leq and (j, k) in leq for k in range(n)):
                    raise SpectrumError(f"poset not up-directed: {i} and {j} have no upper bound")
        self.leq = leq
        maps = {k: tuple(int(x) for x in v) for k, v in self.maps.items()}
        for (i, j) in maps:
            if (i, j) not in leq:
                raise SpectrumError(f"map given for {i}->{j} but {i} <= {j} does not hold")
        for i in range(n):
            ident = tuple(range(self.algebras[i].size))
            if maps.setdefault((i, i), ident) != ident:
                raise SpectrumError(f"g_{i}{i} is not the identity")
        for (i, j), g in maps.items():
            v = is_homomorphism(self.algebras[i], self.algebras[j], g)
            if not v:
                raise SpectrumError(f"g_{i}{j} is not a homomorphism: fails at {v.witness}")
        # fill in composites along chains
        changed = True
        while changed:
            changed = False
            for (i, j), g in list(maps.items()):
                for (j2, k), h in list(maps.items()):
                    if j == j2 and (i, k) not in maps:
                        maps[(i, k)] = tuple(h[x] for x in g)
                        changed = True
        missing = leq - set(maps)
        if missing:
            i, j = min(missing)
            raise SpectrumError(f"no map for {i} <= {j}")
        for (i, j), g in maps.items():
            for k in range(n):
                if (j, k) in leq:
                    composite = tuple(maps[(j, k)][x] for x in g)
                    if composite != maps[(i, k)]:
                        raise SpectrumError(f"maps do not commute: g_{j}{k} . g_{i}{j} != g_{i}{k}")
        self.maps = maps
        self.linear = self._linear_extension()

    def __len__(self):
        return len(self.algebras)

    def _linear_extension(self) -> list[int]:
        n = len(self.algebras)
        indeg = [sum(1 for i in range(n) if i != j and (i, j) in self.leq) for j in range(n)]
        heap = [j for j in range(n) if indeg[j] == 0]
        heapq.heapify(heap)
        out = []
        while heap:
            i = heapq.heappop(heap)
            out.append(i)
            for j in range(n):
                if j != i and (i, j) in self.leq:
                    indeg[j] -= 1
                    if indeg[j] == 0:
                        heapq.heappush(heap, j)
        return out

    def upper_bounds(self, points: Iterable[int]) -> list[int]:
        """Common upper bounds in linear-extension order."""
        points = list(points)
        return [j for j in self.linear if all((i, j) in self.leq for i in points)]

    def derived(self, sigma: Hypersubstitution) -> "DirectSpectrum":
        """Apply one hypersubstitution to every algebra; maps are unchanged
        (and re-validated as homomorphisms)."""
        return DirectSpectrum([derived_algebra(A, sigma) for A in self.algebras],
                              set(self.leq), dict(self.maps))


def is_superdirect(spectrum: DirectSpectrum) -> bool:
    return all(len(set(g)) == spectrum.algebras[j].size for (i, j), g in spectrum.maps.items())


@dataclass(frozen=True)
class DirectLimit:
    algebra: FiniteAlgebra
    # class of (i, a) for every point i and element a of A_i
    injection: dict
    representatives: tuple[tuple[int, int], ...]


def _limit_classes(spectrum: DirectSpectrum):
    pairs = [(i, a) for i in range(len(spectrum)) for a in range(spectrum.algebras[i].size)]
    pos = {p: k for k, p in enumerate(pairs)}
    uf = _UnionFind(len(pairs))
    for (i, a) in pairs:
        for (j, b) in pairs:
            if (i, a) < (j, b) and any(
                    spectrum.maps[(i, k)][a] == spectrum.maps[(j, k)][b]
                    for k in spectrum.upper_bounds((i, j))):
                uf.union(pos[(i, a)], pos[(j, b)])
    blocks = canonical_blocks([uf.find(k) for k in range(len(pairs))])
    injection = {p: blocks[k] for k, p in enumerate(pairs)}
    reps: dict[int, tuple[int, int]] = {}
    for p in pairs:
        reps.setdefault(injection[p], p)
    return injection, tuple(reps[b] for b in range(len(reps)))


def _limit_cell(spectrum, injection, op, args, j):
    """``f(<a_0,i_0>, ...) = <f^{A_j}(g_{i_0 j}(a_0), ...), j>``."""
    A = spectrum.algebras[j]
    lifted = [spectrum.maps[(i, j)][a] for i, a in args]
    return injection[(j, A.op(op, *lifted))]


def direct_limit(spectrum: DirectSpectrum) -> DirectLimit:
    injection, reps = _limit_classes(spectrum)
    size = len(reps)
    tables = []
    for op, m in enumerate(spectrum.sig.arities):
        tab = []
        for cls_args in product(range(size), repeat=m):
            args = [reps[c] for c in cls_args]
            j = spectrum.upper_bounds(i for i, _ in args)[0]
            tab.append(_limit_cell(spectrum, injection, op, args, j))
        tables.append(tab)
    return DirectLimit(FiniteAlgebra(spectrum.sig, size, tables, "lim"), injection, reps)


def direct_limit_well_defined(spectrum: DirectSpectrum) -> bool:
    """Recompute every cell from every representative of each argument
    class and every common upper bound; all must agree."""
    lim = direct_limit(spectrum)
    members: dict[int, list] = {}
    for p, c in lim.injection.items():
        members.setdefault(c, []).append(p)
    for op, m in enumerate(spectrum.sig.arities):
        for cls_args in product(range(lim.algebra.size), repeat=m):
            expected = lim.algebra.op(op, *cls_args)
            for args in product(*(members[c] for c in cls_args)):
                for j in spectrum.upper_bounds(i for i, _ in args):
                    if _limit_cell(spectrum, lim.injection, op, args, j) != expected:
                        return False
    return True
