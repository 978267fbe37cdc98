import random

import pytest
from hypothesis import given, strategies as st

from halg.algebra import QuasiIdentity, eval_term, satisfies_quasi_identity, term_table
from halg.clone import enumerate_term_operations
from halg.hyper import (DepthCapExceeded, HyperMonoid, Hypersubstitution, MonoidError,
                        MonoidTooLarge, all_hypersubstitutions_mod, apply_hyper, compose,
                        derived_algebra, hyper_quasi_via_derived, monoid_closure,
                        satisfies_M_hyper_quasi_identity, satisfies_M_hyperidentity)
from halg.randgen import random_algebra, random_hypersub, random_monoid, random_quasi, random_term
from halg.terms import Var, parse_equation, parse_term
from halg.zoo import (GROUPOID, cyclic_group, dual, left_zero_band, trivial_groupoid,
                      two_element_lattice)

G = GROUPOID
Z2, Z3 = cyclic_group(2), cyclic_group(3)
L2 = two_element_lattice()
LAT = L2.sig


def hs(src, sig=G):
    """``"plus(x1,x0)"`` for one symbol, ``"a ; b"`` for several."""
    return Hypersubstitution(sig, tuple(parse_term(p, sig) for p in src.split(";")))


SWAP, P1, DUP = hs("plus(x1,x0)"), hs("x0"), hs("plus(x0,x0)")
ID = Hypersubstitution.identity(G)
CANCEL = QuasiIdentity(G, 3, (parse_equation("plus(x0,x1)=plus(x0,x2)", G),),
                       parse_equation("x1=x2", G))


def test_apply_examples():
    t = parse_term("plus(x0,x1)", G)
    assert apply_hyper(SWAP, t) == parse_term("plus(x1,x0)", G)
    nested = parse_term("plus(plus(x0,x1),x2)", G)
    assert apply_hyper(SWAP, nested) == parse_term("plus(x2, plus(x1,x0))", G)
    assert apply_hyper(ID, nested) == nested
    assert apply_hyper(SWAP, Var(4)) == Var(4)


def test_compose_examples():
    assert compose(SWAP, SWAP) == ID
    # extension of the projection applied to plus(x1,x0) keeps the first argument, x1
    assert compose(P1, SWAP) == hs("x1")
    assert compose(SWAP, P1) == hs("x0")
    assert compose(ID, SWAP) == SWAP and compose(SWAP, ID) == SWAP


def test_image_context_enforced():
    with pytest.raises(Exception):
        hs("plus(x0,x2)")


def test_closure_examples():
    M = monoid_closure([SWAP])
    assert [m.describe() for m in M] == ["plus->plus", "plus->plus(x1,x0)"]
    Mz = monoid_closure([DUP], algebra=Z2)
    assert len(Mz) == 2
    assert term_table(Z2, Mz.members[1].images[0], 2).tolist() == [0, 0, 0, 0]


def test_dup_is_idempotent_syntactically():
    # the extension of plus(x0,x0) sends plus(x0,x0) to itself
    assert compose(DUP, DUP) == DUP
    assert len(monoid_closure([DUP], depth_cap=1)) == 2


def test_growing_closure_hits_depth_cap():
    grow = hs("plus(plus(x0,x1),x1)")
    with pytest.raises(DepthCapExceeded):
        monoid_closure([grow], depth_cap=3)
    # modulo Z2 the same generator gives a finite monoid
    assert len(monoid_closure([grow], algebra=Z2)) >= 1


def test_closure_limit():
    with pytest.raises(MonoidTooLarge):
        monoid_closure([hs("plus(plus(x0,x1),x1)")], limit=2)


def test_all_mod_examples():
    assert len(all_hypersubstitutions_mod(L2)) == 16
    M = all_hypersubstitutions_mod(Z2)
    tables = sorted(term_table(Z2, s.images[0], 2).tolist() for s in M)
    assert tables == [[0, 0, 0, 0], [0, 0, 1, 1], [0, 1, 0, 1], [0, 1, 1, 0]]
    assert len(all_hypersubstitutions_mod(trivial_groupoid())) == 1
    assert M.mode == "all-mod"


def test_all_mod_bound_to_its_algebra():
    M = all_hypersubstitutions_mod(Z2)
    with pytest.raises(MonoidError):
        satisfies_M_hyper_quasi_identity(left_zero_band(), M, CANCEL)


def test_derived_examples():
    assert derived_algebra(Z2, P1) == left_zero_band()
    D = derived_algebra(L2, hs("join(x0,x1);meet(x0,x1)", LAT))
    assert D == dual(L2)
    assert derived_algebra(Z3, ID) == Z3


def test_hyperidentity_examples():
    medial = parse_equation("plus(plus(x0,x1),plus(x2,x3)) = plus(plus(x0,x2),plus(x1,x3))", G)
    assert satisfies_M_hyperidentity(Z3, all_hypersubstitutions_mod(Z3), *medial, 4)
    idem = parse_equation("meet(x0,x0) = x0", LAT)
    assert satisfies_M_hyperidentity(L2, all_hypersubstitutions_mod(L2), *idem, 1)
    comm = parse_equation("plus(x0,x1) = plus(x1,x0)", G)
    M = all_hypersubstitutions_mod(Z2)
    v = satisfies_M_hyperidentity(Z2, M, *comm, 2)
    assert not v
    assert v.witness.sigma.images[0] == Var(0) and v.witness.assignment == (0, 1)


def test_hyper_quasi_examples():
    swaps = HyperMonoid.explicit([ID, SWAP])
    assert satisfies_M_hyper_quasi_identity(Z2, swaps, CANCEL)
    v = satisfies_M_hyper_quasi_identity(Z2, all_hypersubstitutions_mod(Z2), CANCEL)
    assert not v
    assert v.witness.sigma.images[0] == Var(0) and v.witness.assignment == (0, 0, 1)
    one = HyperMonoid.explicit([ID])
    for A in (Z2, Z3, left_zero_band()):
        a, b = satisfies_M_hyper_quasi_identity(A, one, CANCEL), satisfies_quasi_identity(A, CANCEL)
        assert a.holds == b.holds and (a.holds or a.witness.assignment == b.witness)


def test_explicit_monoid_validation():
    with pytest.raises(MonoidError, match="identity"):
        HyperMonoid.explicit([SWAP])
    with pytest.raises(MonoidError, match="not closed"):
        HyperMonoid.explicit([ID, P1, SWAP])
    # modulo Z2, dup and the constant image coincide and the set is closed
    HyperMonoid.explicit([ID, DUP], algebra=Z2)


# --- properties ------------------------------------------------------------------

seeds = st.integers(0, 10**9)


@given(seeds)
def test_evaluation_lemma(seed):
    r = random.Random(seed)
    A = random_algebra(r)
    s = random_hypersub(r, G)
    t = random_term(r, G, 3, 3)
    a = tuple(r.randrange(A.size) for _ in range(3))
    assert eval_term(derived_algebra(A, s), t, a) == eval_term(A, apply_hyper(s, t), a)


@given(seeds)
def test_composition_law(seed):
    r = random.Random(seed)
    A = random_algebra(r)
    s1, s2 = random_hypersub(r, G), random_hypersub(r, G)
    assert derived_algebra(derived_algebra(A, s1), s2) == derived_algebra(A, compose(s1, s2))


@given(seeds)
def test_extension_is_a_monoid_action(seed):
    r = random.Random(seed)
    s1, s2, s3 = (random_hypersub(r, G) for _ in range(3))
    t = random_term(r, G, 3, 3)
    assert apply_hyper(compose(s1, s2), t) == apply_hyper(s1, apply_hyper(s2, t))
    assert compose(s1, compose(s2, s3)) == compose(compose(s1, s2), s3)
    assert compose(ID, s1) == s1 == compose(s1, ID)


@given(seeds)
def test_quotient_soundness(seed):
    r = random.Random(seed)
    A = random_algebra(r, max_size=2)
    ops = enumerate_term_operations(A, 2)
    s = random_hypersub(r, G)
    canon = Hypersubstitution(G, (ops.witness_for(term_table(A, s.images[0], 2)),))
    assert derived_algebra(A, s) == derived_algebra(A, canon)


@given(seeds)
def test_two_paths_agree(seed):
    r = random.Random(seed)
    A = random_algebra(r)
    M = random_monoid(r, A)
    q = random_quasi(r, G)
    a, b = satisfies_M_hyper_quasi_identity(A, M, q), hyper_quasi_via_derived(A, M, q)
    assert a.holds == b.holds
    assert a.witness == b.witness


@given(seeds)
def test_identity_monoid_reduces_to_classical(seed):
    r = random.Random(seed)
    A = random_algebra(r)
    q = random_quasi(r, G)
    h = satisfies_M_hyper_quasi_identity(A, HyperMonoid.explicit([ID]), q)
    c = satisfies_quasi_identity(A, q)
    assert h.holds == c.holds
    assert (h.witness.assignment if h.witness else None) == c.witness


@given(seeds)
def test_closure_mod_algebra_is_closed(seed):
    r = random.Random(seed)
    A = random_algebra(r)
    M = random_monoid(r, A)
    HyperMonoid.explicit(M.members, algebra=A)
    keys = {tuple(derived_algebra(A, s).tables[0].tolist()) for s in M}
    assert len(keys) == len(M)


@given(seeds)
def test_derived_tables_are_clone_members(seed):
    r = random.Random(seed)
    A = random_algebra(r, max_size=2)
    ops = enumerate_term_operations(A, 2)
    for s in all_hypersubstitutions_mod(A):
        assert derived_algebra(A, s).tables[0] in ops
    assert derived_algebra(A, random_hypersub(r, G)).tables[0] in ops
