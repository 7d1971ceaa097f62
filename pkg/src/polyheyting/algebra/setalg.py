"""Set algebras over a Kripke system: signatures of operations, generated
subuniverses and neat reducts."""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Iterable, Optional

from ..kripke import KripkeSystem, preorders
from .space import (AlgebraElement, AlgebraError, Space, cyl, diag, dim_set, himp, join,
                    meet, space_of, subst, ucyl)


class ClosureOverflow(AlgebraError):
    def __init__(self, cap):
        self.cap = cap
        super().__init__(f"generated subuniverse exceeds {cap} elements")


class NotASubuniverse(AlgebraError):
    def __init__(self, op, args, result):
        self.op, self.args, self.result = op, args, result
        super().__init__(f"{op} applied to {args} leaves the carrier: {result}")


@dataclass(eq=False)
class SetAlgebra:
    """An algebra of monotone families over ``space``.

    ``indices`` are the dimensions the quantifiers and substitutions range over;
    substitutions move only those indices.  ``carrier`` is ``None`` for the full
    algebra of all monotone families, or an explicit frozenset of elements.
    ``subst_kind`` is ``"window"`` (every map of ``indices`` into itself) or
    ``"replacements"`` (only the s_[i|j]).
    """

    space: Space
    indices: tuple = None
    carrier: Optional[frozenset] = None
    with_q: bool = True
    with_eq: bool = False
    subst_kind: str = "window"
    _sorted: list = field(default=None, repr=False)

    def __post_init__(self):
        if self.indices is None:
            self.indices = tuple(range(self.space.dims))
        self.indices = tuple(sorted(self.indices))
        for i in self.indices:
            self.space.check_index(i)
        if self.subst_kind not in ("window", "replacements"):
            raise AlgebraError(f"unknown substitution kind {self.subst_kind!r}")

    @classmethod
    def full(cls, system: KripkeSystem, **kw):
        return cls(space_of(system), **kw)

    @property
    def system(self):
        return self.space.system

    @property
    def explicit(self) -> bool:
        return self.carrier is not None

    def elements(self) -> list:
        """Carrier in a fixed order (by mask)."""
        if self.carrier is None:
            raise AlgebraError("full algebra carrier is not enumerated; take a closure first")
        if self._sorted is None:
            self._sorted = sorted(self.carrier, key=lambda e: e.mask)
        return self._sorted

    def __len__(self):
        return len(self.elements())

    def contains(self, a: AlgebraElement) -> bool:
        if a.space is not self.space or not a.is_monotone():
            return False
        return self.carrier is None or a in self.carrier

    @property
    def top(self):
        return self.space.top

    @property
    def bottom(self):
        return self.space.bottom

    # -------------------------------------------------------- signature
    def transformations(self):
        """Every substitution in the signature, as window tables."""
        n, idx = self.space.dims, self.indices
        out = []
        if self.subst_kind == "replacements":
            for i in idx:
                for j in idx:
                    if i != j:
                        out.append(tuple(j if t == i else t for t in range(n)))
            return out
        for values in itertools.product(idx, repeat=len(idx)):
            m = dict(zip(idx, values))
            out.append(tuple(m.get(t, t) for t in range(n)))
        return out

    def generating_transformations(self):
        """A generating set for the substitution semigroup (replacements and transpositions)."""
        n, idx = self.space.dims, self.indices
        out = []
        for i in idx:
            for j in idx:
                if i != j:
                    out.append(tuple(j if t == i else t for t in range(n)))
                    if self.subst_kind == "window" and i < j:
                        out.append(tuple(j if t == i else i if t == j else t for t in range(n)))
        return out

    def unary_ops(self):
        """(name, function) for every unary operation in the signature."""
        ops = []
        for i in self.indices:
            ops.append((f"c_{i}", lambda a, i=i: cyl(i, a)))
            if self.with_q:
                ops.append((f"q_{i}", lambda a, i=i: ucyl(i, a)))
        for t in self.generating_transformations():
            ops.append((f"s_{list(t)}", lambda a, t=t: subst(t, a)))
        return ops

    def constants(self):
        out = [self.space.top, self.space.bottom]
        if self.with_eq:
            out += [diag(self.space, i, j) for i in self.indices for j in self.indices if i != j]
        return out

    def restrict(self, carrier) -> "SetAlgebra":
        return SetAlgebra(self.space, self.indices, frozenset(carrier), self.with_q, self.with_eq, self.subst_kind)

    def dim_set(self, a: AlgebraElement) -> frozenset:
        return dim_set(a, self.indices)


def subalgebra_closure(A: SetAlgebra, X: Iterable[AlgebraElement], cap: int = 4096) -> frozenset:
    """Sg^A X by a worklist fixed point.  Raises :class:`ClosureOverflow` past ``cap``."""
    seen = set()
    order = []
    todo = []

    def add(e):
        if e not in seen:
            if A.carrier is not None and e not in A.carrier:
                raise NotASubuniverse("closure", [], e)
            seen.add(e)
            order.append(e)
            todo.append(e)
            if len(seen) > cap:
                raise ClosureOverflow(cap)

    for e in list(A.constants()) + list(X):
        if e.space is not A.space:
            raise AlgebraError("generator from a different system")
        add(e)
    unary = A.unary_ops()
    while todo:
        e = todo.pop()
        for _, f in unary:
            add(f(e))
        for o in list(order):
            add(meet(e, o))
            add(join(e, o))
            add(himp(e, o))
            add(himp(o, e))
    return frozenset(seen)


def generated(A: SetAlgebra, X, cap: int = 4096) -> SetAlgebra:
    return A.restrict(subalgebra_closure(A, X, cap))


def check_closed(A: SetAlgebra):
    """Raise :class:`NotASubuniverse` with a witness unless the carrier is closed."""
    C = A.carrier
    for c in A.constants():
        if c not in C:
            raise NotASubuniverse("constant", [], c)
    elems = A.elements()
    for a in elems:
        for name, f in A.unary_ops():
            r = f(a)
            if r not in C:
                raise NotASubuniverse(name, [a], r)
    for a in elems:
        for b in elems:
            for name, f in (("∧", meet), ("∨", join), ("→", himp)):
                r = f(a, b)
                if r not in C:
                    raise NotASubuniverse(name, [a, b], r)


def neat_reduct(B: SetAlgebra, alpha) -> SetAlgebra:
    """Nr_α B: elements with Δx ⊆ α, operations indexed in α.

    For an explicit carrier the result is checked for closure; the full algebra
    gives back a full algebra with restricted indices and a membership filter.
    """
    alpha = tuple(sorted(set(alpha)))
    if not set(alpha) <= set(B.indices):
        raise AlgebraError(f"{alpha} is not inside the indices {B.indices}")
    if B.carrier is None:
        return NeatReductFull(B.space, alpha, None, B.with_q, B.with_eq, B.subst_kind, parent_indices=B.indices)
    keep = frozenset(x for x in B.carrier if B.dim_set(x) <= set(alpha))
    R = SetAlgebra(B.space, alpha, keep, B.with_q, B.with_eq, B.subst_kind)
    check_closed(R)
    return R


@dataclass(eq=False)
class NeatReductFull(SetAlgebra):
    """Nr_α of a full set algebra; membership is Δx ⊆ α computed over the parent indices."""

    parent_indices: tuple = ()

    def contains(self, a):
        return (a.space is self.space and a.is_monotone()
                and dim_set(a, self.parent_indices) <= set(self.indices))


def subst_dimset_bound(a: AlgebraElement, tau, alpha, indices=None) -> bool:
    """M∩Δ(s_τ a) ⊆ (M∩Δa) ∪ C_τ with M = dims∖α and C_τ = M∖D_τ."""
    return dimset_bound_report(a, tau, alpha, indices)["ok"]


def dimset_bound_report(a: AlgebraElement, tau, alpha, indices=None) -> dict:
    sp = a.space
    table = sp.window_table(tau)
    dims = range(sp.dims) if indices is None else indices
    M = frozenset(dims) - frozenset(alpha)
    D = frozenset(m for m in M if table[m] == m and all(table[t] != m for t in dims if t != m))
    C = M - D
    lhs = M & dim_set(subst(table, a), dims)
    rhs = (M & dim_set(a, dims)) | C
    return {"ok": lhs <= rhs, "M": sorted(M), "C_tau": sorted(C), "lhs": sorted(lhs), "rhs": sorted(rhs),
            "tau": list(table)}


# ------------------------------------------------------------ random systems

def random_system(rng: random.Random, max_worlds=3, max_domain=3, max_dims=3,
                  min_dims=1, relativized=False) -> KripkeSystem:
    """A random valid Kripke system within the bounds.

    With ``relativized`` each world keeps a random subset of tuples closed under
    every window map, grown along the order.
    """
    n = rng.randint(1, max_worlds)
    order_idx = rng.choice(preorders(n))
    worlds = tuple(f"w{i}" for i in range(n))
    order = frozenset((worlds[a], worlds[b]) for a, b in order_idx)
    dims = rng.randint(min_dims, max_dims)
    elems = [f"a{i}" for i in range(max_domain)]
    # grow domains along a linear extension: each world includes the domains below it
    doms = {}
    for w in _linear_extension(worlds, order):
        below = set()
        for v in worlds:
            if (v, w) in order and v in doms:
                below |= set(doms[v])
        size = rng.randint(max(1, len(below)), max_domain)
        extra = [e for e in elems if e not in below]
        rng.shuffle(extra)
        doms[w] = below | set(extra[: size - len(below)])
    # worlds in the same cluster of a preorder must share a domain
    for w in worlds:
        cluster = [v for v in worlds if (v, w) in order and (w, v) in order]
        union = set().union(*[doms[v] for v in cluster])
        for v in cluster:
            doms[v] = union
    changed = True
    while changed:
        changed = False
        for a, b in order:
            if not doms[a] <= doms[b]:
                doms[b] = doms[b] | doms[a]
                changed = True
    domains = {w: tuple(sorted(doms[w])) for w in worlds}
    assignments = None
    if relativized:
        assignments = {}
        maps = list(itertools.product(range(dims), repeat=dims))
        for w in _linear_extension(worlds, order):
            base = set()
            for v in worlds:
                if (v, w) in order and v in assignments:
                    base |= assignments[v]
            full = list(itertools.product(domains[w], repeat=dims))
            seeds = {s for s in full if rng.random() < 0.3} | base
            if not seeds:
                seeds = {full[0]}
            closed = {tuple(s[t[i]] for i in range(dims)) for s in seeds for t in maps}
            assignments[w] = frozenset(closed)
        changed = True
        while changed:
            changed = False
            for a, b in order:
                if not assignments[a] <= assignments[b]:
                    assignments[b] = assignments[b] | assignments[a]
                    changed = True
    return KripkeSystem(worlds, order, dims, domains, assignments)


def _linear_extension(worlds, order):
    rest = list(worlds)
    out = []
    while rest:
        for w in rest:
            if all(v == w or (v, w) not in order or (w, v) in order or v in out for v in worlds):
                out.append(w)
                rest.remove(w)
                break
        else:
            out.append(rest.pop(0))
    return out
