"""Monotone families over a Kripke system, stored as bitmasks.

A position is a pair (world k, assignment x ∈ V_k).  An element is the set of
positions where its characteristic function is 1; monotone means closed
upward along the world order.
"""
from __future__ import annotations

import os
import random
from functools import reduce
from typing import Iterable, Optional

from ..kripke import KripkeSystem
from ..transform import Transformation

_DEBUG = os.environ.get("POLYHEYTING_DEBUG", "") not in ("", "0")


def set_debug(flag: bool):
    """Check the monotone-family invariant after every operation."""
    global _DEBUG
    _DEBUG = bool(flag)


def debug_enabled() -> bool:
    return _DEBUG


class AlgebraError(ValueError):
    pass


class NotMonotone(AlgebraError):
    pass


_SPACES = {}


def space_of(system: KripkeSystem) -> "Space":
    """The cached :class:`Space` of a system, so elements built twice compare equal."""
    key = _system_key(system)
    sp = _SPACES.get(key)
    if sp is None:
        sp = _SPACES[key] = Space(system)
    return sp


def _system_key(S):
    doms = tuple((w, tuple(S.domains[w])) for w in S.worlds)
    ass = None if S.assignments is None else tuple((w, tuple(sorted(S.assignments[w]))) for w in S.worlds)
    return (S.worlds, tuple(sorted(S.order)), S.dims, doms, ass)


class Space:
    def __init__(self, system: KripkeSystem):
        self.system = S = system
        self.dims = S.dims
        self.positions = [(w, s) for w in S.worlds for s in S.V(w)]
        self.index = {p: i for i, p in enumerate(self.positions)}
        self.size = len(self.positions)
        self.full = (1 << self.size) - 1
        self.up = []
        for (w, s) in self.positions:
            m = 0
            for u in S.above(w):
                j = self.index.get((u, s))
                if j is not None:
                    m |= 1 << j
            self.up.append(m)
        self._cls = {}
        self._fa = {}
        self._fa_literal = {}
        self._perm = {}
        self._diag = {}
        self._jcls = {}

    def __repr__(self):
        return f"Space(worlds={self.system.worlds}, dims={self.dims}, positions={self.size})"

    # ------------------------------------------------------------ helpers
    def elem(self, mask: int) -> "AlgebraElement":
        return AlgebraElement(self, mask)

    def check_index(self, j):
        if not 0 <= j < self.dims:
            raise AlgebraError(f"index {j} outside dims window [0,{self.dims})")

    def is_monotone(self, mask: int) -> bool:
        m = mask
        while m:
            low = m & -m
            i = low.bit_length() - 1
            if self.up[i] & ~mask:
                return False
            m ^= low
        return True

    def up_closure(self, mask: int) -> int:
        out = 0
        m = mask
        while m:
            low = m & -m
            out |= self.up[low.bit_length() - 1]
            m ^= low
        return out

    def interior(self, mask: int) -> int:
        """Largest up-closed subset of mask."""
        out = 0
        for i, u in enumerate(self.up):
            if u & mask == u:
                out |= 1 << i
        return out

    def _classes(self, J: frozenset):
        """Partition of positions into (same world, agree off J) blocks, as masks."""
        if J not in self._jcls:
            blocks = {}
            for i, (w, s) in enumerate(self.positions):
                key = (w, tuple(a for t, a in enumerate(s) if t not in J))
                blocks[key] = blocks.get(key, 0) | (1 << i)
            self._jcls[J] = list(blocks.values())
        return self._jcls[J]

    def _forall_table(self, J: frozenset, literal=False):
        cache = self._fa_literal if literal else self._fa
        if J not in cache:
            S = self.system
            rows = []
            for (w, s) in self.positions:
                m = 0
                for u in S.above(w):
                    src = w if literal else u
                    for t in S.V(src):
                        if all(t[i] == s[i] for i in range(self.dims) if i not in J):
                            j = self.index.get((u, t))
                            if j is not None:
                                m |= 1 << j
                rows.append(m)
            cache[J] = rows
        return cache[J]

    def _perm_table(self, table: tuple):
        if table not in self._perm:
            perm = []
            for (w, s) in self.positions:
                t = tuple(s[table[i]] for i in range(self.dims))
                j = self.index.get((w, t))
                if j is None:
                    raise AlgebraError(f"x∘τ leaves V_{w}: {s} ∘ {table} = {t}")
                perm.append(j)
            self._perm[table] = perm
        return self._perm[table]

    def window_table(self, tau) -> tuple:
        """τ restricted to the dims window, as a tuple; rejects maps that escape it."""
        if isinstance(tau, Transformation):
            table = tau.table(self.dims)
        elif isinstance(tau, dict):
            table = tuple(tau.get(i, i) for i in range(self.dims))
        else:
            table = tuple(tau)
            if len(table) != self.dims:
                raise AlgebraError(f"transformation table {table} does not cover dims {self.dims}")
        if any(not 0 <= v < self.dims for v in table):
            raise AlgebraError(f"τ escapes the dims window: {table}")
        return table

    # -------------------------------------------------------- raw operations
    def himp_mask(self, a: int, b: int) -> int:
        bad = a & ~b
        m = 0
        for i, u in enumerate(self.up):
            if not u & bad:
                m |= 1 << i
        return m

    def cyl_mask(self, J, a: int) -> int:
        out = 0
        for blk in self._classes(frozenset(J)):
            if blk & a:
                out |= blk
        return out

    def ucyl_mask(self, J, a: int, literal=False) -> int:
        out = 0
        for i, t in enumerate(self._forall_table(frozenset(J), literal)):
            if t & a == t:
                out |= 1 << i
        return out

    def subst_mask(self, table: tuple, a: int) -> int:
        perm = self._perm_table(table)
        out = 0
        for i, j in enumerate(perm):
            if a >> j & 1:
                out |= 1 << i
        return out

    def diag_mask(self, i: int, j: int) -> int:
        if (i, j) not in self._diag:
            m = 0
            for p, (w, s) in enumerate(self.positions):
                if s[i] == s[j]:
                    m |= 1 << p
            self._diag[(i, j)] = m
        return self._diag[(i, j)]

    # ------------------------------------------------------------ elements
    @property
    def top(self):
        return self.elem(self.full)

    @property
    def bottom(self):
        return self.elem(0)

    def random_element(self, rng: random.Random, density: Optional[float] = None) -> "AlgebraElement":
        p = rng.random() if density is None else density
        raw = 0
        for i in range(self.size):
            if rng.random() < p:
                raw |= 1 << i
        return self.elem(self.up_closure(raw) if rng.random() < 0.5 else self.interior(raw))

    def from_table(self, table: dict) -> "AlgebraElement":
        """Build from ``{world: iterable of assignments where the value is 1}``."""
        m = 0
        for w, ss in table.items():
            for s in ss:
                j = self.index.get((w, tuple(s)))
                if j is None:
                    raise AlgebraError(f"{s} is not in V_{w}")
                m |= 1 << j
        return self.elem(m)


class AlgebraElement:
    """A monotone family (f_k) stored as a bitmask over the positions of its space."""

    __slots__ = ("space", "mask")

    def __init__(self, space: Space, mask: int):
        self.space = space
        self.mask = mask
        if _DEBUG and not space.is_monotone(mask):
            raise NotMonotone(f"not a monotone family: {mask:#x}")

    def __eq__(self, other):
        return isinstance(other, AlgebraElement) and self.space is other.space and self.mask == other.mask

    def __hash__(self):
        return hash((id(self.space), self.mask))

    def __le__(self, other):
        _same(self, other)
        return self.mask & ~other.mask == 0

    def __lt__(self, other):
        return self <= other and self != other

    def __ge__(self, other):
        return other <= self

    def __repr__(self):
        return f"AlgebraElement({self.mask:#x})"

    def __and__(self, other):
        return meet(self, other)

    def __or__(self, other):
        return join(self, other)

    def __rshift__(self, other):
        return himp(self, other)

    def table(self) -> dict:
        """Per-world bit tables ``{world: {assignment: 0 or 1}}``."""
        out = {w: {} for w in self.space.system.worlds}
        for i, (w, s) in enumerate(self.space.positions):
            out[w][s] = self.mask >> i & 1
        return out

    def is_monotone(self) -> bool:
        return self.space.is_monotone(self.mask)


def _same(a, b):
    if a.space is not b.space:
        raise AlgebraError("elements live over different systems")


def meet(a: AlgebraElement, b: AlgebraElement) -> AlgebraElement:
    _same(a, b)
    return AlgebraElement(a.space, a.mask & b.mask)


def join(a: AlgebraElement, b: AlgebraElement) -> AlgebraElement:
    _same(a, b)
    return AlgebraElement(a.space, a.mask | b.mask)


def himp(a: AlgebraElement, b: AlgebraElement) -> AlgebraElement:
    _same(a, b)
    return AlgebraElement(a.space, a.space.himp_mask(a.mask, b.mask))


def top(space: Space) -> AlgebraElement:
    return space.top


def bottom(space: Space) -> AlgebraElement:
    return space.bottom


def meet_all(space: Space, items: Iterable[AlgebraElement]) -> AlgebraElement:
    return reduce(meet, items, space.top)


def join_all(space: Space, items: Iterable[AlgebraElement]) -> AlgebraElement:
    return reduce(join, items, space.bottom)


def _indexset(sp, J):
    J = frozenset([J]) if isinstance(J, int) else frozenset(J)
    for j in J:
        sp.check_index(j)
    return J


def cyl(j, a: AlgebraElement) -> AlgebraElement:
    """c_j, or c_(J) when ``j`` is a set: join over assignments agreeing off J at the same world."""
    J = _indexset(a.space, j)
    return AlgebraElement(a.space, a.space.cyl_mask(J, a.mask))


def ucyl(j, a: AlgebraElement) -> AlgebraElement:
    """q_j, or q_(J): meet over every later world l and every y ∈ V_l agreeing with x off J."""
    J = _indexset(a.space, j)
    return AlgebraElement(a.space, a.space.ucyl_mask(J, a.mask))


def ucyl_literal(j, a: AlgebraElement) -> int:
    """The variant that draws y from V_k instead of V_l.

    Returns a raw mask, since the result need not be monotone.
    """
    J = _indexset(a.space, j)
    return a.space.ucyl_mask(J, a.mask, literal=True)


def cyl_iterated(J, a: AlgebraElement) -> AlgebraElement:
    for j in sorted(J, reverse=True):
        a = cyl(j, a)
    return a


def ucyl_iterated(J, a: AlgebraElement) -> AlgebraElement:
    for j in sorted(J, reverse=True):
        a = ucyl(j, a)
    return a


def subst(tau, a: AlgebraElement) -> AlgebraElement:
    """s_τ: g_k(x) = f_k(x∘τ)."""
    table = a.space.window_table(tau)
    return AlgebraElement(a.space, a.space.subst_mask(table, a.mask))


def subst_repl(i: int, j: int, a: AlgebraElement) -> AlgebraElement:
    """s_[i|j]."""
    table = tuple(j if t == i else t for t in range(a.space.dims))
    a.space.check_index(i)
    a.space.check_index(j)
    return AlgebraElement(a.space, a.space.subst_mask(table, a.mask))


def diag(space: Space, i: int, j: int) -> AlgebraElement:
    space.check_index(i)
    space.check_index(j)
    return AlgebraElement(space, space.diag_mask(i, j))


def dim_set(a: AlgebraElement, indices=None) -> frozenset:
    """Δa: the indices i with c_i a ≠ a."""
    sp = a.space
    idx = range(sp.dims) if indices is None else indices
    return frozenset(i for i in idx if sp.cyl_mask(frozenset([i]), a.mask) != a.mask)


def element_of(model, phi) -> AlgebraElement:
    """The element of the model's set algebra that a formula denotes."""
    from .. import syntax as sx

    sp = space_of(model.system)

    def go(f):
        if isinstance(f, sx.Falsum):
            return sp.bottom
        if isinstance(f, sx.Eq):
            return diag(sp, f.left, f.right)
        if isinstance(f, sx.Atom):
            m = 0
            for i, (w, s) in enumerate(sp.positions):
                if model.holds_atom(f.pred, w, tuple(s[v] for v in f.args)):
                    m |= 1 << i
            return sp.elem(m)
        if isinstance(f, sx.And):
            return meet(go(f.left), go(f.right))
        if isinstance(f, sx.Or):
            return join(go(f.left), go(f.right))
        if isinstance(f, sx.Implies):
            return himp(go(f.left), go(f.right))
        if isinstance(f, sx.Forall):
            return ucyl(f.var, go(f.body))
        if isinstance(f, sx.Exists):
            return cyl(f.var, go(f.body))
        raise TypeError(f"not a formula: {f!r}")

    return go(phi)
