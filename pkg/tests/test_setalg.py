import random

import pytest
from hypothesis import given, settings, strategies as st

from polyheyting.algebra import (ClosureOverflow, NotASubuniverse, SetAlgebra, check_closed, cyl, diag,
                                 dim_set, dimset_bound_report, generated, neat_reduct, random_system,
                                 subalgebra_closure, subst_dimset_bound)
from polyheyting.kripke import KripkeSystem, validate_system

from instances import generated_algebras


def test_random_systems_are_valid():
    rng = random.Random(0)
    for relativized in (False, True):
        for _ in range(40):
            S = random_system(rng, relativized=relativized)
            assert validate_system(S).ok


# --- closure ------------------------------------------------------------------------

def test_closure_of_nothing_holds_constants():
    S = random_system(random.Random(1), max_worlds=2, max_domain=2, max_dims=2, min_dims=2)
    A = SetAlgebra.full(S, with_eq=True)
    C = subalgebra_closure(A, [])
    assert A.top in C and A.bottom in C
    assert diag(A.space, 0, 1) in C


def test_closure_idempotent_and_monotone():
    for B, X, rng in generated_algebras(2, 20, min_carrier=3):
        A = SetAlgebra.full(B.system, subst_kind="replacements")
        C = subalgebra_closure(A, X)
        assert C == B.carrier
        assert subalgebra_closure(A, C) == C
        assert subalgebra_closure(A, X[:1]) <= C


def test_generated_carrier_is_closed():
    for B, _, _ in generated_algebras(3, 15, min_carrier=4):
        check_closed(B)
        assert all(x.is_monotone() for x in B.elements())


def test_check_closed_names_the_operation():
    B, _, _ = next(generated_algebras(4, 1, min_carrier=4))
    broken = B.restrict([e for e in B.elements() if e != B.top])
    with pytest.raises(NotASubuniverse) as info:
        check_closed(broken)
    assert info.value.result == B.top


def test_overflow():
    S = random_system(random.Random(5), max_worlds=3, max_domain=3, max_dims=3, min_dims=3)
    A = SetAlgebra.full(S)
    rng = random.Random(5)
    with pytest.raises(ClosureOverflow):
        subalgebra_closure(A, [A.space.random_element(rng) for _ in range(4)], cap=8)


# --- neat reducts ----------------------------------------------------------------------

def test_neat_reduct_of_all_indices_is_identity():
    for B, _, _ in generated_algebras(6, 10, min_carrier=3):
        R = neat_reduct(B, B.indices)
        assert R.carrier == B.carrier


def test_neat_reduct_elements_have_small_dimension_sets():
    for B, _, _ in generated_algebras(7, 15, min_carrier=3):
        for alpha in ((), (0,)):
            R = neat_reduct(B, alpha)
            assert all(dim_set(x, B.indices) <= set(alpha) for x in R.elements())


def test_full_neat_reduct_membership():
    S = KripkeSystem.from_edges(("w0",), [], 2, {"w0": ("a", "b")})
    A = SetAlgebra.full(S)
    R = neat_reduct(A, (0,))
    assert R.contains(cyl(1, A.space.random_element(random.Random(1))))
    assert not R.contains(diag(A.space, 0, 1))


def test_sg_inside_reduct_equals_reduct_of_sg():
    # generators already live in Nr_α; the brute-force closure is computed both ways
    rng = random.Random(0)
    checked = 0
    while checked < 60:
        S = random_system(rng, max_worlds=2, max_domain=2, max_dims=3, min_dims=2)
        A = SetAlgebra.full(S, subst_kind="replacements")
        alpha = tuple(range(S.dims - 1))
        X = [cyl({S.dims - 1}, A.space.random_element(rng)) for _ in range(rng.randint(1, 2))]
        try:
            B = generated(A, X, cap=512)
        except ClosureOverflow:
            continue
        inner = subalgebra_closure(SetAlgebra(A.space, alpha, subst_kind="replacements"), X, cap=512)
        assert inner == neat_reduct(B, alpha).carrier
        checked += 1


# --- the dimension-set bound ------------------------------------------------------------

def test_identity_has_empty_c_tau():
    S = random_system(random.Random(9), max_dims=3, min_dims=3)
    a = SetAlgebra.full(S).space.random_element(random.Random(9))
    rep = dimset_bound_report(a, (0, 1, 2), (0,))
    assert rep["ok"] and rep["C_tau"] == []


def test_left_side_empty_when_tau_fixes_m():
    S = random_system(random.Random(10), max_dims=3, min_dims=3)
    sp = SetAlgebra.full(S).space
    a = cyl({1, 2}, sp.random_element(random.Random(10)))
    rep = dimset_bound_report(a, (1, 1, 2), (0,))
    assert rep["lhs"] == []


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32))
def test_bound_holds_on_random_triples(seed):
    rng = random.Random(seed)
    S = random_system(rng, max_dims=3)
    sp = SetAlgebra.full(S).space
    n = S.dims
    tau = tuple(rng.randrange(n) for _ in range(n))
    alpha = [i for i in range(n) if rng.random() < 0.5]
    assert subst_dimset_bound(sp.random_element(rng), tau, alpha)
