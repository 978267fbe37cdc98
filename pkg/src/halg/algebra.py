"""Finite algebras as dense operation tables.

The universe of every algebra is ``{0, ..., n-1}``. A table for an m-ary
symbol is a flat array of length ``n**m`` indexed lexicographically, so the
argument tuple ``(a_0, ..., a_{m-1})`` sits at ``sum(a_i * n**(m-1-i))``.
Assignments to ``k`` variables are enumerated in the same order.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from itertools import product
from typing import Any, Iterable, Sequence

import numpy as np

from .terms import App, Signature, Term, TermError, Var, _fold, check_term, max_var

PRODUCT_BOUND = 10**6


class AlgebraError(ValueError):
    pass


class SizeBoundExceeded(AlgebraError):
    pass


@dataclass(frozen=True)
class Verdict:
    """Outcome of a check: ``holds`` plus the first witness when it fails."""
    holds: bool
    witness: Any = None

    def __bool__(self):
        return self.holds


class FiniteAlgebra:
    def __init__(self, sig: Signature, size: int, tables: Sequence[Sequence[int]],
                 name: str = "", labels: Sequence[str] | None = None):
        if size < 1:
            raise AlgebraError("algebra size must be positive")
        if len(tables) != len(sig):
            raise AlgebraError(f"expected {len(sig)} tables, got {len(tables)}")
        arrays = []
        for (sym, arity), tab in zip(sig.symbols, tables):
            arr = np.asarray(tab, dtype=np.int64).reshape(-1)
            if arr.size != size**arity:
                raise AlgebraError(
                    f"{name or 'algebra'}/{sym}: table has {arr.size} entries, expected {size**arity}")
            if arr.size and (arr.min() < 0 or arr.max() >= size):
                raise AlgebraError(f"{name or 'algebra'}/{sym}: table value outside 0..{size - 1}")
            arr.setflags(write=False)
            arrays.append(arr)
        if labels is not None:
            labels = tuple(str(x) for x in labels)
            if len(labels) != size or len(set(labels)) != size:
                raise AlgebraError("labels must name every element exactly once")
        self.sig = sig
        self.size = size
        self.tables = tuple(arrays)
        self.name = name
        self.labels = labels
        self._lists = tuple(a.tolist() for a in arrays)

    def __eq__(self, other):
        return (isinstance(other, FiniteAlgebra) and self.sig == other.sig
                and self.size == other.size
                and all(np.array_equal(a, b) for a, b in zip(self.tables, other.tables)))

    def __hash__(self):
        return hash((self.sig, self.size, tuple(t.tobytes() for t in self.tables)))

    def __repr__(self):
        return f"FiniteAlgebra({self.name or '?'}, size={self.size}, sig={self.sig.name or self.sig.symbols})"

    def table(self, symbol: str | int) -> np.ndarray:
        op = self.sig.index(symbol) if isinstance(symbol, str) else symbol
        return self.tables[op]

    def op(self, symbol: str | int, *args: int) -> int:
        op = self.sig.index(symbol) if isinstance(symbol, str) else symbol
        return self._lists[op][_flat_index(args, self.size)]

    def label(self, e: int) -> str:
        return self.labels[e] if self.labels else str(e)

    def element(self, label: str) -> int:
        if self.labels and label in self.labels:
            return self.labels.index(label)
        return int(label)

    def renamed(self, name: str, labels=None) -> "FiniteAlgebra":
        return FiniteAlgebra(self.sig, self.size, self.tables, name, labels)


def _flat_index(args: Sequence[int], n: int) -> int:
    idx = 0
    for a in args:
        idx = idx * n + a
    return idx


def decode(index: int, n: int, k: int) -> tuple[int, ...]:
    """Inverse of the lexicographic tuple encoding."""
    out = []
    for _ in range(k):
        index, r = divmod(index, n)
        out.append(r)
    return tuple(reversed(out))


@lru_cache(maxsize=256)
def assignments(n: int, k: int) -> np.ndarray:
    """All of ``{0..n-1}**k`` as rows, lexicographic, x0 most significant."""
    if k == 0:
        out = np.zeros((1, 0), dtype=np.int64)
    else:
        grids = np.indices((n,) * k).reshape(k, -1)
        out = np.ascontiguousarray(grids.T, dtype=np.int64)
    out.setflags(write=False)
    return out


def apply_table(table: np.ndarray, n: int, args: Sequence[np.ndarray]) -> np.ndarray:
    """Pointwise application of a flat operation table to argument arrays."""
    if not args:
        return table[0]
    idx = args[0]
    for a in args[1:]:
        idx = idx * n + a
    return table[idx]


def eval_term(A: FiniteAlgebra, t: Term, a: Sequence[int]) -> int:
    def leaf(v):
        if v.index >= len(a):
            raise TermError(f"unbound variable x{v.index}")
        return a[v.index]
    return _fold(t, leaf, lambda u, vals: A._lists[u.op][_flat_index(vals, A.size)])


def _term_array(A: FiniteAlgebra, t: Term, cols: np.ndarray, memo: dict) -> np.ndarray:
    def node(u, args):
        if args:
            return apply_table(A.tables[u.op], A.size, args)
        return np.full(cols.shape[0], A.tables[u.op][0], dtype=np.int64)
    return _fold(t, lambda v: cols[:, v.index], node, memo)


def term_table(A: FiniteAlgebra, t: Term, k: int) -> np.ndarray:
    """The k-ary term operation of ``t`` on ``A`` as a flat table."""
    check_term(t, A.sig, k)
    return _term_array(A, t, assignments(A.size, k), {})


def term_tables(A: FiniteAlgebra, terms: Iterable[Term], k: int) -> list[np.ndarray]:
    """Like term_table for several terms, sharing common subterms."""
    cols = assignments(A.size, k)
    memo: dict = {}
    out = []
    for t in terms:
        check_term(t, A.sig, k)
        out.append(_term_array(A, t, cols, memo))
    return out


@dataclass(frozen=True)
class QuasiIdentity:
    """``premises -> conclusion`` over variables x0..x_{arity-1}.

    With no premises this is a plain identity.
    """
    sig: Signature
    arity: int
    premises: tuple[tuple[Term, Term], ...]
    conclusion: tuple[Term, Term]

    def __post_init__(self):
        object.__setattr__(self, "premises", tuple(tuple(p) for p in self.premises))
        object.__setattr__(self, "conclusion", tuple(self.conclusion))
        for lhs, rhs in self.premises + (self.conclusion,):
            check_term(lhs, self.sig, self.arity)
            check_term(rhs, self.sig, self.arity)

    @classmethod
    def identity(cls, sig, arity, lhs, rhs):
        return cls(sig, arity, (), (lhs, rhs))

    def terms(self) -> list[Term]:
        return [t for eq in self.premises + (self.conclusion,) for t in eq]


def _check_k(terms, k):
    need = max((max_var(t) for t in terms), default=-1) + 1
    if k < need:
        raise TermError(f"context arity {k} too small; terms use {need} variables")


def satisfies_identity(A: FiniteAlgebra, lhs: Term, rhs: Term, k: int) -> Verdict:
    _check_k((lhs, rhs), k)
    lt, rt = term_tables(A, (lhs, rhs), k)
    bad = np.flatnonzero(lt != rt)
    if bad.size:
        return Verdict(False, decode(int(bad[0]), A.size, k))
    return Verdict(True)


def quasi_identity_failures(A: FiniteAlgebra, q: QuasiIdentity) -> np.ndarray:
    """Boolean mask over assignments: premises hold and conclusion fails."""
    if q.sig != A.sig:
        raise AlgebraError("quasi-identity and algebra have different signatures")
    tabs = term_tables(A, q.terms(), q.arity)
    mask = np.ones(len(tabs[0]), dtype=bool)
    for i in range(len(q.premises)):
        mask &= tabs[2 * i] == tabs[2 * i + 1]
    return mask & (tabs[-2] != tabs[-1])


def satisfies_quasi_identity(A: FiniteAlgebra, q: QuasiIdentity) -> Verdict:
    bad = np.flatnonzero(quasi_identity_failures(A, q))
    if bad.size:
        return Verdict(False, decode(int(bad[0]), A.size, q.arity))
    return Verdict(True)


# --- constructions -----------------------------------------------------------

def trivial_algebra(sig: Signature, name: str = "trivial") -> FiniteAlgebra:
    return FiniteAlgebra(sig, 1, [[0] for _ in sig.symbols], name)


def direct_product(algebras: Sequence[FiniteAlgebra], sig: Signature | None = None,
                   bound: int = PRODUCT_BOUND) -> FiniteAlgebra:
    """Componentwise product; element ``(a_0, ..., a_{r-1})`` is encoded
    lexicographically with the first factor most significant.

    An empty family gives the trivial algebra of ``sig``.
    """
    algebras = list(algebras)
    if not algebras:
        if sig is None:
            raise AlgebraError("empty product needs an explicit signature")
        return trivial_algebra(sig)
    sig = algebras[0].sig
    if any(A.sig != sig for A in algebras):
        raise AlgebraError("product factors have different signatures")
    sizes = [A.size for A in algebras]
    N = math.prod(sizes)
    cells = sum(N**m for m in sig.arities)
    if cells > bound:
        raise SizeBoundExceeded(f"product needs {cells} table cells, bound is {bound}")
    coords = assignments_for_sizes(tuple(sizes))
    strides = product_strides(sizes)
    tables = []
    for op, m in enumerate(sig.arities):
        args = assignments(N, m)
        out = np.zeros(N**m, dtype=np.int64)
        for j, A in enumerate(algebras):
            comp = [coords[args[:, p], j] for p in range(m)]
            out += apply_table(A.tables[op], A.size, comp) * strides[j]
        tables.append(out)
    name = " x ".join(A.name or "?" for A in algebras)
    return FiniteAlgebra(sig, N, tables, name)


def product_strides(sizes: Sequence[int]) -> list[int]:
    strides = [1] * len(sizes)
    for j in range(len(sizes) - 2, -1, -1):
        strides[j] = strides[j + 1] * sizes[j + 1]
    return strides


@lru_cache(maxsize=64)
def assignments_for_sizes(sizes: tuple[int, ...]) -> np.ndarray:
    """Coordinates of every element of a mixed-radix product, in order."""
    if not sizes:
        return np.zeros((1, 0), dtype=np.int64)
    return np.indices(sizes).reshape(len(sizes), -1).T.copy()


def projection_map(algebras: Sequence[FiniteAlgebra], j: int) -> tuple[int, ...]:
    coords = assignments_for_sizes(tuple(A.size for A in algebras))
    return tuple(coords[:, j].tolist())


def restrict(A: FiniteAlgebra, elements: Sequence[int], name: str = "") -> FiniteAlgebra:
    """The subalgebra on ``elements``, renumbered in the given order."""
    elements = list(elements)
    pos = {e: i for i, e in enumerate(elements)}
    if len(pos) != len(elements):
        raise AlgebraError("repeated element in subuniverse")
    lookup = np.full(A.size, -1, dtype=np.int64)
    lookup[elements] = np.arange(len(elements))
    elems = np.asarray(elements, dtype=np.int64)
    tables = []
    for op, m in enumerate(A.sig.arities):
        args = elems[assignments(len(elements), m)]
        vals = lookup[apply_table(A.tables[op], A.size, [args[:, p] for p in range(m)])]
        vals = np.atleast_1d(vals)
        if (vals < 0).any():
            raise AlgebraError(f"subset not closed under {A.sig.symbol(op)}")
        tables.append(vals)
    labels = [A.label(e) for e in elements] if A.labels else None
    return FiniteAlgebra(A.sig, len(elements), tables, name, labels)


def closure(A: FiniteAlgebra, gens: Iterable[int]) -> list[int]:
    """Least subuniverse containing ``gens``, listed in discovery order."""
    found: list[int] = []
    seen = set()

    def add(e):
        if e not in seen:
            seen.add(e)
            found.append(e)

    for g in sorted(set(gens)):
        if not 0 <= g < A.size:
            raise AlgebraError(f"generator {g} outside universe")
        add(g)
    for op, m in enumerate(A.sig.arities):
        if m == 0:
            add(A._lists[op][0])
    done = 0
    while done < len(found):
        old, done = done, len(found)
        for op, m in enumerate(A.sig.arities):
            if m == 0:
                continue
            tab = A._lists[op]
            for idx in product(range(done), repeat=m):
                if max(idx) < old:
                    continue
                add(tab[_flat_index([found[i] for i in idx], A.size)])
    return found


def subalgebra_generated(A: FiniteAlgebra, gens: Iterable[int]):
    """Return ``(B, embedding)`` where ``embedding[i]`` is the element of A."""
    gens = set(gens)
    if not gens and 0 not in A.sig.arities:
        raise AlgebraError("empty generating set and no constants in the signature")
    elements = closure(A, gens)
    return restrict(A, elements, f"Sg({A.name})"), tuple(elements)


def is_homomorphism(source: FiniteAlgebra, target: FiniteAlgebra, mapping: Sequence[int]) -> Verdict:
    """Check ``h(f(a..)) = f(h(a)..)`` everywhere; witness ``(symbol, tuple)``."""
    if source.sig != target.sig:
        raise AlgebraError("homomorphism between different signatures")
    h = np.asarray(mapping, dtype=np.int64)
    if h.shape != (source.size,) or (h < 0).any() or (h >= target.size).any():
        raise AlgebraError("map is not a total function into the target universe")
    for op, m in enumerate(source.sig.arities):
        args = assignments(source.size, m)
        lhs = h[source.tables[op]]
        rhs = apply_table(target.tables[op], target.size, [h[args[:, p]] for p in range(m)])
        bad = np.flatnonzero(np.atleast_1d(lhs != rhs))
        if bad.size:
            return Verdict(False, (source.sig.symbol(op), decode(int(bad[0]), source.size, m)))
    return Verdict(True)


@dataclass(frozen=True)
class Homomorphism:
    source: FiniteAlgebra
    target: FiniteAlgebra
    map: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "map", tuple(int(x) for x in self.map))
        v = is_homomorphism(self.source, self.target, self.map)
        if not v:
            sym, args = v.witness
            raise AlgebraError(f"not a homomorphism: fails at {sym}{args}")

    def __call__(self, a: int) -> int:
        return self.map[a]

    def then(self, other: "Homomorphism") -> "Homomorphism":
        """``other`` after ``self``."""
        return Homomorphism(self.source, other.target, tuple(other.map[x] for x in self.map))

    def is_surjective(self) -> bool:
        return len(set(self.map)) == self.target.size


def _element_profile(A: FiniteAlgebra) -> list[tuple]:
    """Isomorphism-invariant data per element, built from unary and
    diagonal term operations."""
    n = A.size
    prof = [[] for _ in range(n)]
    for op, m in enumerate(A.sig.arities):
        tab = A.tables[op]
        if m == 0:
            c = int(tab[0])
            for a in range(n):
                prof[a].append(a == c)
            continue
        diag_idx = sum(n**p for p in range(m))
        diag = (np.arange(n) * diag_idx).astype(np.int64)
        d = tab[diag].tolist()
        preimages = np.bincount(tab, minlength=n).tolist()
        for a in range(n):
            # eventual cycle/tail data of a under the diagonal map
            seen, x = {}, a
            while x not in seen:
                seen[x] = len(seen)
                x = d[x]
            prof[a].append((d[a] == a, len(seen), len(seen) - seen[x], preimages[a]))
        if m >= 2:
            grid = tab.reshape((n,) * m)
            for a in range(n):
                row = np.take(grid, a, axis=0).reshape(-1)
                col = np.take(grid, a, axis=m - 1).reshape(-1)
                prof[a].append((int((row == a).sum()), int((col == a).sum()),
                                len(set(row.tolist())), len(set(col.tolist()))))
    return [tuple(p) for p in prof]


def find_isomorphism(A: FiniteAlgebra, B: FiniteAlgebra) -> tuple[int, ...] | None:
    """Least (lexicographic) isomorphism ``A -> B``, or None.

    Plain backtracking with invariant pruning; exponential in the worst
    case, meant for algebras of a few dozen elements at most.
    """
    if A.sig != B.sig:
        raise AlgebraError("isomorphism between different signatures")
    n = A.size
    if n != B.size:
        return None
    pa, pb = _element_profile(A), _element_profile(B)
    if sorted(pa) != sorted(pb):
        return None
    # table entries of A grouped by the largest element they mention, so each
    # entry is checked exactly when its last element gets assigned
    checks: list[list[tuple[int, np.ndarray, np.ndarray]]] = [[] for _ in range(n)]
    for op, m in enumerate(A.sig.arities):
        args = assignments(n, m)
        res = A.tables[op]
        key = np.maximum(args.max(axis=1) if m else np.zeros(1, dtype=np.int64), res)
        for e in range(n):
            sel = np.flatnonzero(key == e)
            if sel.size:
                checks[e].append((op, args[sel], res[sel]))
    h = np.full(n, -1, dtype=np.int64)
    used = [False] * n

    def consistent(e):
        for op, args, res in checks[e]:
            m = args.shape[1]
            img = apply_table(B.tables[op], n, [h[args[:, p]] for p in range(m)]) if m else \
                np.full(len(res), B.tables[op][0])
            if not np.array_equal(h[res], img):
                return False
        return True

    def search(e):
        if e == n:
            return True
        for b in range(n):
            if used[b] or pa[e] != pb[b]:
                continue
            h[e] = b
            used[b] = True
            if consistent(e) and search(e + 1):
                return True
            used[b] = False
            h[e] = -1
        return False

    if search(0):
        return tuple(h.tolist())
    return None


class _UnionFind:
    def __init__(self, n):
        self.parent = list(range(n))

    def find(self, x):
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if ra > rb:
            ra, rb = rb, ra
        self.parent[rb] = ra
        return True


def canonical_blocks(labels: Sequence[int]) -> tuple[int, ...]:
    """Renumber block labels so blocks are numbered by their least member."""
    ids: dict[int, int] = {}
    return tuple(ids.setdefault(x, len(ids)) for x in labels)


def _compatibility_failures(A: FiniteAlgebra, blocks: np.ndarray):
    """Yield element pairs that must be identified for compatibility."""
    n = A.size
    rep = np.zeros(n, dtype=np.int64)
    # least member of each block
    for e in range(n - 1, -1, -1):
        rep[blocks == blocks[e]] = e
    for op, m in enumerate(A.sig.arities):
        if m == 0:
            continue
        grid = A.tables[op].reshape((n,) * m)
        for p in range(m):
            moved = np.take(grid, rep, axis=p)
            bad = blocks[grid] != blocks[moved]
            if bad.any():
                for x, y in zip(grid[bad].tolist(), moved[bad].tolist()):
                    yield x, y


@dataclass(frozen=True)
class Congruence:
    algebra: FiniteAlgebra
    blocks: tuple[int, ...]

    def __post_init__(self):
        blocks = canonical_blocks(self.blocks)
        if len(blocks) != self.algebra.size:
            raise AlgebraError("partition does not cover the universe")
        object.__setattr__(self, "blocks", blocks)
        for x, y in _compatibility_failures(self.algebra, np.asarray(blocks)):
            raise AlgebraError(f"partition is not compatible: {x} and {y} should be identified")

    @property
    def count(self) -> int:
        return max(self.blocks) + 1

    def classes(self) -> list[list[int]]:
        out = [[] for _ in range(self.count)]
        for e, b in enumerate(self.blocks):
            out[b].append(e)
        return out


def congruence_generated(A: FiniteAlgebra, pairs: Iterable[tuple[int, int]]) -> Congruence:
    uf = _UnionFind(A.size)
    for a, b in pairs:
        uf.union(a, b)
    while True:
        blocks = np.array([uf.find(e) for e in range(A.size)])
        changed = False
        for x, y in _compatibility_failures(A, blocks):
            changed |= uf.union(x, y)
        if not changed:
            return Congruence(A, tuple(blocks.tolist()))


def quotient_algebra(A: FiniteAlgebra, c: Congruence):
    """Return ``(A/c, projection)``; blocks numbered by least member."""
    if c.algebra != A:
        raise AlgebraError("congruence belongs to a different algebra")
    reps = [cls[0] for cls in c.classes()]
    sub = restrict_reps(A, reps, np.asarray(c.blocks))
    return sub, c.blocks


def restrict_reps(A: FiniteAlgebra, reps: Sequence[int], blocks: np.ndarray) -> FiniteAlgebra:
    reps_arr = np.asarray(reps, dtype=np.int64)
    k = len(reps)
    tables = []
    for op, m in enumerate(A.sig.arities):
        args = reps_arr[assignments(k, m)]
        vals = blocks[apply_table(A.tables[op], A.size, [args[:, p] for p in range(m)])]
        tables.append(np.atleast_1d(vals))
    return FiniteAlgebra(A.sig, k, tables, f"{A.name}/~")
