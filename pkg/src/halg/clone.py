"""Enumeration of the k-ary term operations of a finite algebra.

The closure runs breadth first by term depth, so the stored witness of each
operation is a term of least depth; ties go to the first construction in
(symbol, argument indices) order.
"""
from __future__ import annotations

from itertools import product

import numpy as np

from .algebra import FiniteAlgebra, assignments
from .terms import App, Term, Var

CLONE_CAP = 2**20


class CloneCapExceeded(RuntimeError):
    def __init__(self, count: int, cap: int):
        self.count = count
        self.cap = cap
        super().__init__(f"clone enumeration exceeded cap of {cap} tables (reached {count})")


class TermOperationSet:
    """Distinct k-ary term operations of ``algebra``, each with a witness."""

    def __init__(self, algebra: FiniteAlgebra, arity: int):
        self.algebra = algebra
        self.arity = arity
        self.tables: list[np.ndarray] = []
        self.witnesses: list[Term] = []
        self._index: dict[bytes, int] = {}

    def __len__(self):
        return len(self.tables)

    def __iter__(self):
        return iter(zip(self.tables, self.witnesses))

    def __contains__(self, table) -> bool:
        return _key(table) in self._index

    def index(self, table) -> int:
        try:
            return self._index[_key(table)]
        except KeyError:
            raise KeyError("table is not a term operation in this set") from None

    def witness_for(self, table) -> Term:
        return self.witnesses[self.index(table)]

    def _add(self, table: np.ndarray, witness: Term) -> bool:
        key = table.tobytes()
        if key in self._index:
            return False
        table = np.array(table, dtype=np.int64)
        table.setflags(write=False)
        self._index[key] = len(self.tables)
        self.tables.append(table)
        self.witnesses.append(witness)
        return True

    def sorted_items(self):
        """Members ordered by table key (the value sequence)."""
        return sorted(zip(self.tables, self.witnesses), key=lambda tw: tuple(tw[0].tolist()))


def _key(table) -> bytes:
    return np.asarray(table, dtype=np.int64).tobytes()


def enumerate_term_operations(A: FiniteAlgebra, k: int, cap: int = CLONE_CAP) -> TermOperationSet:
    """All k-ary term operations of ``A``.

    ``k = 0`` is allowed and yields the values of ground terms (only useful
    when the signature has constants).
    """
    if k < 0:
        raise ValueError("arity must be non-negative")
    n = A.size
    ops = TermOperationSet(A, k)
    cols = assignments(n, k)
    length = n**k
    codes = _Codes(n, length)

    def add(table, witness):
        if ops._add(table, witness):
            codes.mark(table)
            if len(ops) > cap:
                raise CloneCapExceeded(len(ops), cap)

    for i in range(k):
        add(cols[:, i], Var(i))
    for op, m in enumerate(A.sig.arities):
        if m == 0:
            add(np.full(length, A.tables[op][0], dtype=np.int64), App(op, ()))

    frontier = 0
    while frontier < len(ops):
        known = len(ops)
        stack = np.stack(ops.tables[:known])
        for op, m in enumerate(A.sig.arities):
            if m == 0:
                continue
            table = A.tables[op]
            if m == 1:
                idx = stack[frontier:]
                _absorb(ops, add, codes, table, idx, np.arange(known - frontier),
                        lambda p: App(op, (ops.witnesses[frontier + p],)))
                continue
            # all but the last two arguments fixed; those two are vectorised
            chunk = max(1, (1 << 22) // (known * length))
            for prefix in product(range(known), repeat=m - 2):
                prefix_old = not prefix or max(prefix) < frontier
                base = np.zeros(length, dtype=np.int64)
                for p in prefix:
                    base = base * n + ops.tables[p]
                head = tuple(ops.witnesses[p] for p in prefix)
                for a0 in range(0, known, chunk):
                    a1 = min(known, a0 + chunk)
                    idx = (((base * n + stack[a0:a1]) * n)[:, None, :] + stack[None, :, :])
                    idx = idx.reshape(-1, length)
                    pairs = np.arange(idx.shape[0])
                    if prefix_old and a0 < frontier:
                        a_of, b_of = np.divmod(pairs, known)
                        keep = (a_of + a0 >= frontier) | (b_of >= frontier)
                        idx, pairs = idx[keep], pairs[keep]

                    def witness(p, a0=a0, head=head):
                        a, b = divmod(p, known)
                        return App(op, head + (ops.witnesses[a0 + a], ops.witnesses[b]))
                    _absorb(ops, add, codes, table, idx, pairs, witness)
        frontier = known
    return ops


class _Codes:
    """Integer codes of tables, plus a bitmap of known codes when the code
    space is small enough."""

    def __init__(self, n: int, length: int):
        self.exact = length * np.log2(max(n, 2)) < 62
        self.weights = n ** np.arange(length - 1, -1, -1, dtype=np.int64) if self.exact else None
        self.seen = np.zeros(n**length, dtype=bool) if self.exact and n**length <= 1 << 26 else None

    def of(self, rows: np.ndarray) -> np.ndarray:
        if self.exact:
            return rows @ self.weights
        rows = np.ascontiguousarray(rows, dtype=np.int64)
        return rows.view(np.dtype((np.void, rows.dtype.itemsize * rows.shape[1]))).ravel()

    def mark(self, table):
        if self.seen is not None:
            self.seen[int(np.asarray(table) @ self.weights)] = True


def _absorb(ops: TermOperationSet, add, codes: _Codes, table: np.ndarray, idx: np.ndarray,
            pairs: np.ndarray, witness) -> None:
    """Apply ``table`` at each row of indices and add the new distinct
    results in order of first occurrence."""
    if not idx.shape[0]:
        return
    rows = table[idx]
    keys = codes.of(rows)
    if codes.seen is not None:
        fresh = np.flatnonzero(~codes.seen[keys])
        if not fresh.size:
            return
        rows, keys, pairs = rows[fresh], keys[fresh], pairs[fresh]
    _, first = np.unique(keys, return_index=True)
    for i in np.sort(first):
        if rows[i].tobytes() not in ops._index:
            add(rows[i], witness(int(pairs[i])))


def witness_for(tset: TermOperationSet, table) -> Term:
    return tset.witness_for(table)
