from pathlib import Path

import pytest
from hypothesis import given, settings, strategies as st

from polyheyting.calculus import (AXIOM_IDS, EqAxiom, Proof, ProofError, PropAxiom, QuantAxiom, check_proof,
                                  check_side_condition, format_proof, instantiate_axiom, load_proof, match_axiom, parse_proof)
from polyheyting.kripke import is_valid_in, load_model
from polyheyting.syntax import And, Atom, Eq, Exists, Forall, Implies, Or, parse_formula

CORPUS = Path(__file__).parent / "corpus"
PROOFS = sorted((CORPUS / "proofs").glob("*.prf"))
P = parse_formula


def rejected(text):
    with pytest.raises(ProofError) as info:
        check_proof(parse_proof(text))
    return info.value


# --- acceptance ---------------------------------------------------------------------

@pytest.mark.parametrize("path", PROOFS, ids=lambda p: p.stem)
def test_corpus_proof_accepted(path):
    P_ = load_proof(path)
    assert check_proof(P_) == P_.steps[-1][0]


def test_modus_ponens_from_premises():
    proof = parse_proof("""
premise p
premise (imp p q)
step p by premise 1
step (imp p q) by premise 2
step q by mp 1 2
""")
    assert check_proof(proof) == P("q")


def test_recheck_is_idempotent():
    proof = load_proof(CORPUS / "proofs" / "forall_exists.prf")
    assert check_proof(proof) == check_proof(proof)


@pytest.mark.parametrize("path", PROOFS[:10], ids=lambda p: p.stem)
def test_format_round_trip(path):
    proof = load_proof(path)
    again = parse_proof(format_proof(proof))
    assert again.steps == proof.steps


def test_equality_reflexivity_step():
    assert check_proof(Proof([], [(Eq(0, 0), EqAxiom(1))])) == Eq(0, 0)


def test_gen_over_any_variable_is_allowed():
    proof = parse_proof("premise (p v0)\nstep (p v0) by premise 1\nstep (forall v0 (p v0)) by gen 1 v0")
    assert check_proof(proof) == P("(forall v0 (p v0))")


# --- rejection reasons ----------------------------------------------------------------

def test_q2_with_v_free_in_phi():
    e = rejected("step (imp (forall v0 (imp (p v0) (q v0))) (imp (p v0) (forall v0 (q v0)))) by axiom Q2")
    assert (e.step, e.code) == (1, "Q2-free")


def test_q3_with_v_free_on_both_sides():
    e = rejected("step (imp (forall v0 (imp (p v0) (q v0))) (imp (exists v0 (p v0)) (q v0))) by axiom Q3")
    assert e.code == "Q3-free"


def test_q4_capture():
    e = rejected("step (imp (forall v0 (exists v1 (r v0 v1))) (exists v1 (r v1 v1))) "
                 "by axiom Q4 phi=(exists v1 (r v0 v1)) v=v0 tau={0:1}")
    assert e.code == "Q4-capture"


def test_q4_moving_another_free_variable():
    e = rejected("step (imp (forall v0 (r v0 v1)) (r v0 v0)) by axiom Q4 phi=(r v0 v1) v=v0 tau={1:0}")
    assert e.code == "Q4-moves"


def test_e3_capture():
    e = rejected("step (imp (eq v0 v1) (imp (exists v1 (r v0 v1)) (exists v1 (r v1 v1)))) "
                 "by axiom E3 phi=(exists v1 (r v0 v1)) tau={} sigma={0:1}")
    assert e.code == "E3-capture"


def test_mp_mismatch():
    e = rejected("step (imp p p) by axiom I\nstep q by mp 1 1")
    assert (e.step, e.code) == (2, "bad-mp")


def test_dangling_reference():
    e = rejected("step (imp p p) by axiom I\nstep (forall v0 (imp p p)) by gen 2 v0")
    assert (e.step, e.code) == (2, "dangling-reference")


def test_missing_premise():
    e = rejected("step p by premise 1")
    assert e.code == "dangling-reference"


def test_not_an_instance():
    e = rejected("step (imp p q) by axiom K")
    assert e.code == "not-an-instance"


def test_bindings_must_match_the_formula():
    e = rejected("step (imp p (imp q p)) by axiom K phi=q psi=p")
    assert e.code == "not-an-instance"


def test_fsubst_non_injective():
    e = rejected("step (imp (p v0) (p v0)) by axiom I\nstep (imp (q v0 v1) (q v0 v1)) by fsubst 1 {0:0,1:0}")
    assert e.code == "fsubst-injective"


def test_fsubst_into_bound_variable():
    e = rejected("step (imp (p v1) (exists v1 (p v1))) by axiom Q5\n"
                 "step (imp (p v0) (exists v1 (p v1))) by fsubst 1 {0:1}")
    assert e.code == "fsubst-bound"


def test_subst_non_injective():
    e = rejected("step (imp (p v0) (imp (q v1) (p v0))) by axiom K\n"
                 "step (imp (p v0) (imp (q v0) (p v0))) by subst 1 {1:0}")
    assert e.code == "subst-injective"


def test_arity_clash_across_steps():
    e = rejected("step (imp p p) by axiom I\nstep (imp (p v0) (p v0)) by axiom I")
    assert e.code == "arity-mismatch"


def test_empty_proof():
    assert rejected("# nothing\n").code == "empty-proof"


@pytest.mark.parametrize("line, code", [
    ("step p by magic 1", "malformed-justification"),
    ("step p by axiom Z9", "unknown-axiom"),
    ("step (imp p by axiom I", "syntax"),
    ("stop p by axiom I", "syntax"),
    ("step p by axiom E3", "malformed-instantiation"),
    ("step p by axiom K foo=(p)", "malformed-instantiation"),
])
def test_malformed_lines(line, code):
    with pytest.raises(ProofError) as info:
        check_proof(parse_proof(line))
    assert info.value.code == code


# --- instantiation and side conditions -------------------------------------------------------

def test_q3_instance():
    f = instantiate_axiom("Q3", {"phi": P("(p v1)"), "psi": P("(q v0)"), "v": 0})
    assert f == P("(imp (forall v0 (imp (p v1) (q v0))) (imp (exists v0 (p v1)) (q v0)))")


def test_k_instance():
    assert instantiate_axiom("K", {"phi": P("p"), "psi": P("q")}) == P("(imp p (imp q p))")


def test_q4_capture_raises():
    ok, reason = check_side_condition("Q4", {"phi": P("(exists v1 (r v0 v1))"), "v": 0, "tau": {0: 1}})
    assert not ok and "bound" in reason


def test_e3_conjunction_order():
    f = instantiate_axiom("E3", {"phi": P("(r v0 v1)"), "tau": {}, "sigma": {0: 1, 1: 0}})
    assert f == P("(imp (and (eq v0 v1) (eq v1 v0)) (imp (r v0 v1) (r v1 v0)))")


def test_side_condition_examples():
    assert not check_side_condition("fsubst", {"phi": P("(r v0 v1)"), "tau": {0: 2, 1: 2}})[0]
    assert check_side_condition("subst", {"phi": P("(forall v0 (r v0 v1))"), "tau": {0: 1, 1: 0}})[0]
    assert check_side_condition("gen", {})[0]


def axiom_key(j):
    if isinstance(j, PropAxiom):
        return j.schema
    return ("Q" if isinstance(j, QuantAxiom) else "E") + str(j.id)


def test_match_recovers_bindings():
    for path in PROOFS:
        for f, j in load_proof(path).steps:
            if isinstance(j, (PropAxiom, QuantAxiom, EqAxiom)) and axiom_key(j) != "E3":
                b = match_axiom(axiom_key(j), f)
                assert b is not None and instantiate_axiom(axiom_key(j), b) == f


def test_all_ids_instantiate():
    phi, psi, chi = P("(p v0)"), P("(q v1)"), P("(eq v0 v1)")
    data = {"phi": phi, "psi": psi, "chi": chi, "v": 2, "w": 1, "tau": {}, "sigma": {}}
    for key in AXIOM_IDS:
        instantiate_axiom(key, data)


# --- semantic soundness on random instances -------------------------------------------------

MODELS = [load_model(p) for p in sorted((CORPUS / "models").glob("*.kml"))]

atoms = st.one_of(st.builds(lambda v: Atom("p", (v,)), st.integers(0, 1)),
                  st.builds(lambda v: Atom("q", (v,)), st.integers(0, 1)),
                  st.builds(Eq, st.integers(0, 1), st.integers(0, 1)))
small = st.recursive(atoms, lambda c: st.one_of(st.builds(And, c, c), st.builds(Or, c, c),
                                                 st.builds(Implies, c, c), st.builds(Forall, st.integers(0, 1), c),
                                                 st.builds(Exists, st.integers(0, 1), c)), max_leaves=4)


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(["K", "S", "A1", "A2", "A3", "O1", "O2", "O3", "F", "I"]), small, small, small)
def test_propositional_instances_valid(key, phi, psi, chi):
    f = instantiate_axiom(key, {"phi": phi, "psi": psi, "chi": chi})
    assert all(is_valid_in(M, f) for M in MODELS)


@settings(max_examples=40, deadline=None)
@given(small, st.integers(0, 1), st.integers(0, 1))
def test_quantifier_instances_valid_when_accepted(phi, v, t):
    for key in ("Q4", "Q5"):
        data = {"phi": phi, "v": v, "tau": {v: t}}
        if check_side_condition(key, data)[0]:
            f = instantiate_axiom(key, data)
            assert all(is_valid_in(M, f) for M in MODELS), f


@settings(max_examples=40, deadline=None)
@given(small, small, st.integers(0, 1))
def test_q2_q3_instances_valid_when_accepted(phi, psi, v):
    for key in ("Q2", "Q3"):
        data = {"phi": phi, "psi": psi, "v": v}
        if check_side_condition(key, data)[0]:
            assert all(is_valid_in(M, instantiate_axiom(key, data)) for M in MODELS)


@settings(max_examples=40, deadline=None)
@given(small, st.dictionaries(st.integers(0, 1), st.integers(0, 1)),
       st.dictionaries(st.integers(0, 1), st.integers(0, 1)))
def test_e3_instances_valid_when_accepted(phi, tau, sigma):
    data = {"phi": phi, "tau": tau, "sigma": sigma}
    if check_side_condition("E3", data)[0]:
        assert all(is_valid_in(M, instantiate_axiom("E3", data)) for M in MODELS)
