import time
from pathlib import Path

import pytest
from hypothesis import given, settings, strategies as st

from polyheyting.kripke import (Evaluator, KripkeModel, KripkeSystem, ModelError, check_persistence,
                                find_countermodel, is_valid_in, load_model, model_to_text,
                                parse_assignment, parse_model, preorders, satisfies, validate_model,
                                validate_system)
from polyheyting.syntax import Signature, enumerate_formulas, parse_formula

CORPUS = Path(__file__).parent / "corpus"
P = parse_formula


def two_chain():
    return load_model(CORPUS / "two_chain.kml")


def system(worlds, edges, dims, domains, assignments=None):
    return KripkeSystem.from_edges(worlds, edges, dims, domains, assignments)


# --- systems ---------------------------------------------------------------------

def test_single_world_is_valid():
    assert validate_system(system(["w"], [], 2, {"w": ("a", "b", "c")})).ok


def test_shrinking_domain_is_rejected():
    rep = validate_system(system(["w0", "w1"], [("w0", "w1")], 1, {"w0": ("a", "b"), "w1": ("a",)}))
    assert not rep.ok
    assert any(v["violation"] == "X_k⊆X_{k'}" for v in rep.violations)


def test_growing_chain_is_valid():
    S = system(["w0", "w1", "w2"], [("w0", "w1"), ("w1", "w2")], 2,
               {"w0": ("a",), "w1": ("a", "b"), "w2": ("a", "b", "c")})
    assert validate_system(S).ok
    assert S.leq("w0", "w2")


def test_assignments_must_grow():
    S = system(["w0", "w1"], [("w0", "w1")], 1, {"w0": ("a", "b"), "w1": ("a", "b")},
               {"w0": {("a",), ("b",)}, "w1": {("a",)}})
    assert any(v["violation"] == "V_k⊆V_{k'}" for v in validate_system(S).violations)


def test_non_persistent_atom_is_reported():
    M = parse_model("""
[worlds]
w0 w1
[order]
w0 w1
[domains]
w0: a
w1: a
[valuation]
p w0: (a)
""")
    rep = validate_model(M)
    assert not rep.ok and any(v["violation"] == "atomic persistence" for v in rep.violations)


# --- satisfaction -------------------------------------------------------------------

def test_excluded_middle_fails_at_bottom_of_two_chain():
    M = two_chain()
    phi = P("(or p (imp p bot))")
    assert not satisfies(M, "w0", phi, ("a",))
    assert satisfies(M, "w1", phi, ("a",))


def test_reflexivity_of_equality_everywhere():
    for f in sorted((CORPUS / "models").glob("*.kml")):
        M = load_model(f)
        assert is_valid_in(M, P("(eq v0 v0)")), f.name


def test_forall_looks_at_later_worlds():
    # chain2_growing: q holds of everything at w0, but b appears at w1
    M = load_model(CORPUS / "models" / "chain2_growing.kml")
    s = ("a", "a", "a")
    assert satisfies(M, "w0", P("(q v0)"), s)
    assert satisfies(M, "w1", P("(forall v0 (q v0))"), s)
    assert not satisfies(M, "w0", P("(forall v0 (p v0))"), s)


def test_exists_uses_current_domain():
    M = load_model(CORPUS / "models" / "chain2_growing.kml")
    s = ("a", "a", "a")
    assert not satisfies(M, "w0", P("(exists v0 (p v0))"), s)
    assert satisfies(M, "w1", P("(exists v0 (p v0))"), s)


@pytest.mark.parametrize("name", ["chain2_growing", "fork", "cluster", "diamond"])
def test_bitmask_evaluator_matches_recursion(name):
    M = load_model(CORPUS / "models" / f"{name}.kml")
    ev = Evaluator(M)
    sig = Signature((("p", 1), ("q", 1)))
    for level in enumerate_formulas(sig, (0, 1), 2):
        for phi in level[::53]:
            m = ev.mask(phi)
            for i, (w, s) in enumerate(ev.positions):
                assert bool(m >> i & 1) == satisfies(M, w, phi, s), (phi, w, s)


# --- persistence --------------------------------------------------------------------

def brute_persistence(M, max_depth, variables):
    """Oracle: every formula, every pair w ≤ w', every assignment at w, by direct recursion."""
    S = M.system
    sig = Signature(M.signature.predicates[:2], M.signature.with_equality)
    for level in enumerate_formulas(sig, variables, max_depth):
        for phi in level:
            for w, w2 in S.order:
                for s in S.V(w):
                    if satisfies(M, w, phi, s) and not satisfies(M, w2, phi, s):
                        return phi
    return None


def test_persistence_agrees_with_brute_force_on_two_chain():
    M = two_chain()
    assert brute_persistence(M, 2, (0,)) is None
    assert check_persistence(M, 2).ok


def test_persistence_fork_depth_one_oracle():
    M = load_model(CORPUS / "models" / "fork.kml")
    assert brute_persistence(M, 1, (0, 1)) is None
    assert check_persistence(M, 3).ok


def test_persistence_catches_broken_model():
    M = parse_model("""
[worlds]
w0 w1
[order]
w0 w1
[domains]
w0: a
w1: a
[valuation]
p w0: (a)
""")
    rep = check_persistence(M, 1)
    assert not rep.ok
    assert rep.witness["world"] == "w0" and rep.witness["above"] == "w1"


def test_single_world_persistence_trivial():
    M = load_model(CORPUS / "models" / "single.kml")
    assert check_persistence(M, 3).ok


# --- countermodels -------------------------------------------------------------------

def test_identity_has_no_countermodel():
    t = time.perf_counter()
    r = find_countermodel(P("(imp p p)"), max_worlds=3, max_domain=2)
    assert not r.found and r.verdict == "exhausted within bounds"
    assert r.searched == 1506
    assert time.perf_counter() - t < 5


def test_excluded_middle_countermodel():
    r = find_countermodel(P("(or p (imp p bot))"), max_worlds=3, max_domain=2)
    assert r.found and len(r.model.system.worlds) == 2
    assert not satisfies(r.model, r.world, P("(or p (imp p bot))"), r.assignment)
    assert validate_model(r.model).ok


def test_bot_countermodel_has_one_world():
    r = find_countermodel(P("bot"))
    assert r.found and len(r.model.system.worlds) == 1


def test_double_negation_shift_style_countermodel():
    phi = P("(imp (imp (imp p bot) bot) p)")
    r = find_countermodel(phi, max_worlds=2, max_domain=1)
    assert r.found


def test_countermodel_limit():
    r = find_countermodel(P("(imp p p)"), limit=10)
    assert not r.found and r.verdict == "limit reached"


def test_preorder_counts():
    # number of preorders on 1, 2, 3 points
    assert [len(preorders(n)) for n in (1, 2, 3)] == [1, 4, 29]


# --- file format ---------------------------------------------------------------------

@pytest.mark.parametrize("path", sorted((CORPUS / "models").glob("*.kml")) + [CORPUS / "two_chain.kml"],
                         ids=lambda p: p.stem)
def test_corpus_models_are_valid_and_round_trip(path):
    M = load_model(path)
    assert validate_model(M).ok
    again = parse_model(model_to_text(M))
    assert again.system.order == M.system.order
    assert again.valuation == M.valuation
    assert again.signature == M.signature


@pytest.mark.parametrize("text, msg", [
    ("[worlds]\nw0\n", "domains"),
    ("[worlds]\nw0\n[domains]\nw1: a\n", "unknown world"),
    ("[bogus]\n", "unknown section"),
    ("w0\n", "before first section"),
])
def test_model_errors(text, msg):
    with pytest.raises(ModelError, match=msg):
        parse_model(text)


def test_parse_assignment():
    M = load_model(CORPUS / "models" / "chain2_growing.kml")
    assert parse_assignment("v1=b", M, "w1") == ("a", "b", "a")
    with pytest.raises(ModelError):
        parse_assignment("v0=b", M, "w0")
    with pytest.raises(ModelError, match="no value"):
        parse_assignment("", M, "w1", P("(p v2)"))


# --- random persistence ----------------------------------------------------------------

@st.composite
def small_models(draw):
    n = draw(st.integers(1, 3))
    order_idx = draw(st.sampled_from(preorders(n)))
    worlds = [f"w{i}" for i in range(n)]
    order = [(worlds[a], worlds[b]) for a, b in order_idx]
    domains = {w: ("a", "b") for w in worlds}
    val = {}
    # an upward closed set of worlds for each unary fact
    for pred in ("p", "q"):
        for a in ("a", "b"):
            seeds = {w for w in worlds if draw(st.booleans())}
            up = {v for (u, v) in order if u in seeds}
            for w in up:
                val.setdefault((pred, w), set()).add((a,))
    S = KripkeSystem.from_edges(worlds, order, 1, domains)
    return KripkeModel(S, Signature((("p", 1), ("q", 1))), {k: frozenset(v) for k, v in val.items()})


@settings(max_examples=25, deadline=None)
@given(small_models())
def test_random_models_persist(M):
    assert validate_model(M).ok
    assert check_persistence(M, 2).ok
