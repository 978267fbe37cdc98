import random
from itertools import product

import numpy as np
import pytest
from hypothesis import given, strategies as st

from halg.algebra import FiniteAlgebra, apply_table, term_table
from halg.clone import CloneCapExceeded, enumerate_term_operations
from halg.randgen import random_algebra
from halg.terms import App, Signature, Var, parse_term
from halg.zoo import cyclic_group, two_element_lattice

L2 = two_element_lattice()


def monotone_idempotent_tables(k):
    """Oracle: every k-ary Boolean table that is monotone and fixes the
    constant tuples. These are exactly the lattice term operations."""
    points = list(product((0, 1), repeat=k))
    out = set()
    for bits in range(2 ** (2 ** k)):
        f = [(bits >> (2 ** k - 1 - i)) & 1 for i in range(2 ** k)]
        if f[0] != 0 or f[-1] != 1:
            continue
        if all(f[i] <= f[j] for i, a in enumerate(points) for j, b in enumerate(points)
               if all(x <= y for x, y in zip(a, b))):
            out.add(tuple(f))
    return out


def test_lattice_binary_is_four():
    ops = enumerate_term_operations(L2, 2)
    assert len(ops) == 4
    assert [str(w) for w in ops.witnesses][:2] == [str(Var(0)), str(Var(1))]
    names = {parse_term(s, L2.sig) for s in ("meet(x0,x1)", "join(x0,x1)")}
    assert names <= set(ops.witnesses)


def test_lattice_ternary_matches_oracle():
    ops = enumerate_term_operations(L2, 3)
    assert len(ops) == 18
    assert {tuple(t.tolist()) for t in ops.tables} == monotone_idempotent_tables(3)


def test_z3_binary_is_nine_affine_maps():
    ops = enumerate_term_operations(cyclic_group(3), 2)
    expected = {tuple((a * x + b * y) % 3 for x in range(3) for y in range(3))
                for a in range(3) for b in range(3)}
    assert {tuple(t.tolist()) for t in ops.tables} == expected


def test_witness_for():
    ops = enumerate_term_operations(L2, 2)
    assert ops.witness_for([0, 1, 0, 1]) == Var(1)
    assert ops.witness_for([0, 0, 0, 1]) == parse_term("meet(x0,x1)", L2.sig)
    with pytest.raises(KeyError):
        ops.witness_for([1, 1, 0, 0])  # negation-like, not monotone


def test_cap_is_loud():
    with pytest.raises(CloneCapExceeded) as e:
        enumerate_term_operations(cyclic_group(3), 2, cap=5)
    assert e.value.count > 5


def test_constants_appear_at_every_arity():
    sig = Signature.parse("plus/2, zero/0")
    Z3z = FiniteAlgebra(sig, 3, [cyclic_group(3).tables[0], [0]])
    for k in (0, 1, 2):
        ops = enumerate_term_operations(Z3z, k)
        assert np.zeros(3 ** k, dtype=np.int64).tobytes() in ops._index
    assert len(enumerate_term_operations(Z3z, 0)) == 1


def test_nullary_free_signature_has_no_ground_terms():
    assert len(enumerate_term_operations(cyclic_group(2), 0)) == 0


seeds = st.integers(0, 10**9)


def _random_small(seed):
    """Binary clones of 3-element algebras can have 3^9 members; keep
    those to arity 1."""
    r = random.Random(seed)
    k = r.randint(1, 2)
    return random_algebra(r, max_size=3 if k == 1 else 2), k


@given(seeds)
def test_witnesses_reproduce_tables(seed):
    A, k = _random_small(seed)
    ops = enumerate_term_operations(A, k)
    for table, w in ops:
        assert np.array_equal(term_table(A, w, k), table)
    assert len({t.tobytes() for t in ops.tables}) == len(ops)


@given(seeds)
def test_closed_and_contains_projections(seed):
    A, k = _random_small(seed)
    ops = enumerate_term_operations(A, k)
    for i in range(k):
        assert term_table(A, Var(i), k) in ops
    tabs = list(ops.tables)
    for f in tabs[:6]:
        for g in tabs[:6]:
            assert apply_table(A.tables[0], A.size, [f, g]) in ops


@given(seeds)
def test_reseeding_with_witnesses_is_idempotent(seed):
    A, k = _random_small(seed)
    ops = enumerate_term_operations(A, k)
    again = {term_table(A, App(0, (w1, w2)), k).tobytes() for w1 in ops.witnesses for w2 in ops.witnesses}
    assert again <= {t.tobytes() for t in ops.tables}


@given(seeds)
def test_cylindrification_monotone_in_arity(seed):
    A = random_algebra(random.Random(seed), max_size=2)
    small = enumerate_term_operations(A, 1)
    big = enumerate_term_operations(A, 2)
    for w in small.witnesses:
        assert term_table(A, w, 2) in big


def test_bfs_gives_minimal_depth():
    from halg.terms import depth
    ops = enumerate_term_operations(cyclic_group(3), 2)
    # x0+x0+x0... : doubling needs depth 1, tripling (constant 0) needs depth 2
    zero = np.zeros(9, dtype=np.int64)
    assert depth(ops.witness_for(zero)) == 2
