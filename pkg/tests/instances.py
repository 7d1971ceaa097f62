"""Seeded instance generators shared by the algebra and acceptance tests."""
import random

from polyheyting.algebra import (ClosureOverflow, ReplacementAlgebra, SetAlgebra, cyl, generated,
                                 has_slack, random_system, subalgebra_closure)


def random_algebras(seed, count, **bounds):
    """Full set algebras over random systems within ``bounds``."""
    rng = random.Random(seed)
    bounds = {"max_worlds": 3, "max_domain": 3, "max_dims": 3, **bounds}
    for _ in range(count):
        yield SetAlgebra.full(random_system(rng, **bounds)), rng


def generated_algebras(seed, count, max_carrier=64, min_carrier=1, gens=(1, 2), tries=5000, **bounds):
    """Explicit subalgebras Sg(X) for random X, skipping closures past ``max_carrier``."""
    rng = random.Random(seed)
    bounds = {"max_worlds": 3, "max_domain": 2, "max_dims": 2, **bounds}
    out = 0
    for _ in range(tries):
        if out == count:
            return
        A = SetAlgebra.full(random_system(rng, **bounds), subst_kind="replacements")
        X = [A.space.random_element(rng) for _ in range(rng.randint(*gens))]
        try:
            B = generated(A, X, cap=max_carrier)
        except ClosureOverflow:
            continue
        if len(B) < min_carrier:
            continue
        out += 1
        yield B, X, rng


def slack_instances(seed, count, min_carrier=3, tries=5000):
    """Dims-3 replacement algebras generated by sentences c_(all) x; all have slack."""
    rng = random.Random(seed)
    out = 0
    for _ in range(tries):
        if out == count:
            return
        S = random_system(rng, max_worlds=4, max_domain=2, max_dims=3, min_dims=3)
        A = SetAlgebra.full(S, subst_kind="replacements")
        every = set(range(S.dims))
        X = [cyl(every, A.space.random_element(rng)) for _ in range(rng.randint(1, 3))]
        try:
            B = generated(A, X, cap=256)
        except ClosureOverflow:
            continue
        R = ReplacementAlgebra.from_set_algebra(B)
        if len(B) < min_carrier or not has_slack(R):
            continue
        out += 1
        yield B, R


def interpolation_instances(seed, count, tries=5000):
    """(A, X1, X2, a, b) with a ∈ Sg(X1), b ∈ Sg(X2) and a ≤ b; X1 and X2 share an element."""
    rng = random.Random(seed)
    out = 0
    for _ in range(tries):
        if out == count:
            return
        S = random_system(rng, max_worlds=3, max_domain=2, max_dims=2)
        A = SetAlgebra.full(S, with_q=True)
        sp = A.space
        shared = sp.random_element(rng)
        X1 = [shared, sp.random_element(rng)]
        X2 = [shared, sp.random_element(rng)]
        try:
            C1 = sorted(subalgebra_closure(A, X1, cap=128), key=lambda e: e.mask)
            C2 = sorted(subalgebra_closure(A, X2, cap=128), key=lambda e: e.mask)
        except ClosureOverflow:
            continue
        pairs = [(a, b) for a in C1 for b in C2 if a <= b and a != sp.bottom and b != sp.top]
        if not pairs:
            continue
        a, b = rng.choice(pairs)
        out += 1
        yield A, X1, X2, a, b
