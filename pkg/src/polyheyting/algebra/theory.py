"""Theories (Γ, Δ) in finite algebras, completion, saturation and interpolants."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional

from .setalg import SetAlgebra, subalgebra_closure
from .space import AlgebraError, AlgebraElement, cyl, dim_set, join_all, meet_all, subst_repl


class InconsistentTheory(AlgebraError):
    pass


@dataclass(frozen=True)
class TheoryPair:
    gamma: frozenset
    delta: frozenset

    @classmethod
    def of(cls, gamma: Iterable = (), delta: Iterable = ()):
        return cls(frozenset(gamma), frozenset(delta))

    def add_gamma(self, a):
        return TheoryPair(self.gamma | {a}, self.delta)

    def add_delta(self, a):
        return TheoryPair(self.gamma, self.delta | {a})


def _space(T: TheoryPair, A: Optional[SetAlgebra] = None):
    if A is not None:
        return A.space
    for e in list(T.gamma) + list(T.delta):
        return e.space
    raise AlgebraError("cannot tell which system an empty theory lives in; pass the algebra")


def is_consistent(T: TheoryPair, A: Optional[SetAlgebra] = None) -> bool:
    """No meet of Γ lies below a join of Δ; for finite sets the extreme pair decides."""
    sp = _space(T, A)
    return not meet_all(sp, T.gamma) <= join_all(sp, T.delta)


def is_complete(T: TheoryPair, A: SetAlgebra) -> bool:
    return set(A.elements()) <= (T.gamma | T.delta)


def complete_theory(T: TheoryPair, A: SetAlgebra) -> TheoryPair:
    """Extend a consistent theory so every carrier element lands in Γ or Δ.

    Elements are visited in carrier order and tried on the Γ side first.
    """
    if not is_consistent(T, A):
        raise InconsistentTheory("input theory is inconsistent")
    sp = A.space
    g = meet_all(sp, T.gamma)
    d = join_all(sp, T.delta)
    gamma, delta = set(T.gamma), set(T.delta)
    for a in A.elements():
        if a in gamma or a in delta:
            continue
        if not (g & a) <= d:
            gamma.add(a)
            g = g & a
        else:
            delta.add(a)
            d = d | a
            if g <= d:
                raise AssertionError("both extensions inconsistent; the carrier is not distributive")
    return TheoryPair(frozenset(gamma), frozenset(delta))


def completion_exists_backtracking(T: TheoryPair, A: SetAlgebra) -> bool:
    """Independent oracle: search all Γ/Δ splits of the carrier with pruning."""
    sp = A.space
    rest = [a for a in A.elements() if a not in T.gamma and a not in T.delta]

    def go(k, g, d):
        if g <= d:
            return False
        if k == len(rest):
            return True
        a = rest[k]
        return go(k + 1, g & a, d) or go(k + 1, g, d | a)

    return go(0, meet_all(sp, T.gamma), join_all(sp, T.delta))


@dataclass
class SaturationReport:
    ok: bool
    obligations: int
    unmet: list

    def as_dict(self):
        return {"ok": self.ok, "obligations": self.obligations, "unmet": self.unmet}


def is_saturated(T: TheoryPair, A: SetAlgebra, universe: Optional[Iterable[AlgebraElement]] = None) -> SaturationReport:
    """Every c_j a ∈ Γ needs some k ∉ Δa with s_[j|k] a ∈ Γ.

    ``a`` ranges over the carrier, or over ``universe`` for a full algebra.
    """
    elems = list(universe) if universe is not None else A.elements()
    unmet = []
    count = 0
    for a in elems:
        da = dim_set(a, A.indices)
        for j in A.indices:
            if cyl(j, a) not in T.gamma:
                continue
            count += 1
            if not any(subst_repl(j, k, a) in T.gamma for k in A.indices if k not in da):
                unmet.append({"element": hex(a.mask), "j": j})
    return SaturationReport(not unmet, count, unmet)


# ------------------------------------------------------------ interpolation

@dataclass
class Interpolation:
    found: bool
    c: Optional[AlgebraElement]
    least: Optional[AlgebraElement]
    common_size: int
    certificate: bool

    def as_dict(self):
        return {"found": self.found, "c": None if self.c is None else hex(self.c.mask),
                "least": None if self.least is None else hex(self.least.mask),
                "common_size": self.common_size, "certificate": self.certificate}


def certify(a: AlgebraElement, c: AlgebraElement, b: AlgebraElement) -> bool:
    """a ≤ c ≤ b, checked world by world on the bit tables."""
    ta, tc, tb = a.table(), c.table(), b.table()
    return all(ta[w][x] <= tc[w][x] <= tb[w][x] for w in ta for x in ta[w])


def interpolant_search(A: SetAlgebra, X1, X2, a: AlgebraElement, b: AlgebraElement,
                       cap: int = 4096, check_generated: bool = False) -> Interpolation:
    if not a <= b:
        raise AlgebraError("precondition a ≤ b fails")
    X1, X2 = set(X1), set(X2)
    if check_generated:
        if a not in subalgebra_closure(A, X1, cap):
            raise AlgebraError("a is not in the subalgebra generated by X1")
        if b not in subalgebra_closure(A, X2, cap):
            raise AlgebraError("b is not in the subalgebra generated by X2")
    C = subalgebra_closure(A, X1 & X2, cap)
    least = meet_all(A.space, (t for t in C if a <= t))
    if least <= b:
        if not certify(a, least, b):
            raise AssertionError("certificate check failed")
        return Interpolation(True, least, least, len(C), True)
    return Interpolation(False, None, least, len(C), False)


def interpolant(A: SetAlgebra, X1, X2, a: AlgebraElement, b: AlgebraElement,
                cap: int = 4096) -> Optional[AlgebraElement]:
    """The least element of Sg(X1∩X2) above a, when it lies below b; otherwise None."""
    return interpolant_search(A, X1, X2, a, b, cap).c
