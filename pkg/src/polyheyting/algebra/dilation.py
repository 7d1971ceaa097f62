"""Dilation by one fresh dimension through a quotient of (indices × A).

R relates (k, x) and (λ, y) when λ ∉ Δx and y = s_[k|λ] x.  Classes of R carry
the Heyting operations, c_i and s_[j|i] computed at a representative index μ,
plus the new operations c_fresh, s_[i|fresh] and s_[fresh|i].  The embedding
sends x to the class of (μ, x) for any μ ∉ Δx.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

from .space import AlgebraError


class DilationError(AlgebraError):
    pass


@dataclass
class ReplacementAlgebra:
    """A finite algebra given by its operations: Heyting, c_i and s_[i|j] for i, j in ``indices``."""

    elements: list
    indices: tuple
    meet: Callable
    join: Callable
    himp: Callable
    cyl: Callable          # cyl(i, x)
    srepl: Callable        # srepl(i, j, x) = s_[i|j] x
    dim_set: Callable

    @classmethod
    def from_set_algebra(cls, A):
        from .space import cyl, dim_set, himp, join, meet, subst_repl
        return cls(list(A.elements()), tuple(A.indices), meet, join, himp, cyl, subst_repl,
                   lambda x: dim_set(x, A.indices))


@dataclass
class DilationReport:
    reflexive: bool
    symmetric: bool
    transitive: bool
    unique_representatives: bool
    h_injective: bool
    fresh_fixes_image: bool
    preservation_failures: list = field(default_factory=list)
    undefined: list = field(default_factory=list)
    ill_defined: list = field(default_factory=list)

    @property
    def equivalence(self):
        return self.reflexive and self.symmetric and self.transitive

    @property
    def ok(self):
        return (self.equivalence and self.unique_representatives and self.h_injective
                and self.fresh_fixes_image and not self.preservation_failures
                and not self.undefined and not self.ill_defined)

    def as_dict(self):
        return {"ok": self.ok, "reflexive": self.reflexive, "symmetric": self.symmetric,
                "transitive": self.transitive, "unique_representatives": self.unique_representatives,
                "h_injective": self.h_injective, "fresh_fixes_image": self.fresh_fixes_image,
                "preservation_failures": self.preservation_failures[:5],
                "undefined": self.undefined[:5], "ill_defined": self.ill_defined[:5]}


def has_slack(A: ReplacementAlgebra) -> bool:
    """Every pair x, y leaves some μ outside Δx ∪ Δy, and every x and i ≠ j leave some μ ∉ Δx ∪ {i, j}.

    This is what the class operations need: binary operations pick a common
    representative index, and s_[j|i] one that differs from both i and j.
    """
    alpha = set(A.indices)
    deltas = {frozenset(A.dim_set(x)) for x in A.elements}
    for d in deltas:
        free = alpha - d
        if any(len(free - {i, j}) == 0 for i in alpha for j in alpha if i != j):
            return False
        if any(not (free - e) for e in deltas):
            return False
    return True


class Dilation:
    def __init__(self, A: ReplacementAlgebra, fresh=None, require_slack=True):
        self.A = A
        self.alpha = tuple(A.indices)
        self.fresh = (max(self.alpha) + 1 if self.alpha else 0) if fresh is None else fresh
        if self.fresh in self.alpha:
            raise DilationError(f"fresh index {self.fresh} is already a dimension")
        self.elems = list(A.elements)
        self.eid = {x: i for i, x in enumerate(self.elems)}
        self.delta = [frozenset(A.dim_set(x)) for x in self.elems]
        if require_slack:
            for i, d in enumerate(self.delta):
                if set(self.alpha) <= d:
                    raise DilationError(f"slack condition fails: element {i} depends on every index")
        self.nodes = [(k, i) for k in self.alpha for i in range(len(self.elems))]
        self.R = set((n, n) for n in self.nodes)
        for (k, i) in self.nodes:
            x = self.elems[i]
            for lam in self.alpha:
                if lam not in self.delta[i]:
                    y = A.srepl(k, lam, x)
                    if y not in self.eid:
                        raise DilationError("carrier not closed under replacements")
                    self.R.add(((k, i), (lam, self.eid[y])))
        self.adj = {n: set() for n in self.nodes}
        for a, b in self.R:
            self.adj[a].add(b)
        # classes: connected components, so a broken relation still yields a partition to inspect
        self.cls = {}
        cid = 0
        und = {n: set() for n in self.nodes}
        for a, b in self.R:
            und[a].add(b)
            und[b].add(a)
        for n in self.nodes:
            if n in self.cls:
                continue
            stack = [n]
            self.cls[n] = cid
            while stack:
                m = stack.pop()
                for o in und[m]:
                    if o not in self.cls:
                        self.cls[o] = cid
                        stack.append(o)
            cid += 1
        self.nclasses = cid
        self.members = [[] for _ in range(cid)]
        for n in self.nodes:
            self.members[self.cls[n]].append(n)
        self.undefined = []
        self.ill_defined = []

    # ------------------------------------------------------------- audits
    def audit_relation(self):
        refl = all((n, n) in self.R for n in self.nodes)
        sym = all((b, a) in self.R for a, b in self.R)
        trans = all(c in self.adj[a] for a, b in self.R for c in self.adj[b])
        uniq = True
        for mem in self.members:
            ks = [k for k, _ in mem]
            if len(ks) != len(set(ks)):
                uniq = False
        return refl, sym, trans, uniq

    # ------------------------------------------------------------ classes
    def class_of(self, k, x):
        return self.cls[(k, self.eid[x])]

    def reps(self, c):
        return {k: self.elems[i] for k, i in self.members[c]}

    def h(self, x):
        i = self.eid[x]
        options = {self.cls[(mu, i)] for mu in self.alpha if mu not in self.delta[i]}
        if not options:
            raise DilationError("no spare index for this element")
        if len(options) > 1:
            self.ill_defined.append({"op": "h", "element": i})
        return min(options)

    def _apply(self, name, cands):
        """cands: list of (mu, element) results; all must land in one class."""
        if not cands:
            self.undefined.append({"op": name})
            return None
        out = {self.class_of(mu, y) for mu, y in cands}
        if len(out) > 1:
            self.ill_defined.append({"op": name, "classes": sorted(out)})
        return min(out)

    def binop(self, name, c1, c2):
        f = {"meet": self.A.meet, "join": self.A.join, "himp": self.A.himp}[name]
        r1, r2 = self.reps(c1), self.reps(c2)
        return self._apply(name, [(mu, f(r1[mu], r2[mu])) for mu in r1 if mu in r2])

    def cyl(self, i, c):
        r = self.reps(c)
        if i == self.fresh:
            return self._apply("c_fresh", [(mu, self.A.cyl(mu, x)) for mu, x in r.items()])
        return self._apply(f"c_{i}", [(mu, self.A.cyl(i, x)) for mu, x in r.items() if mu != i])

    def srepl(self, j, i, c):
        """s_[j|i] on classes, including the fresh-index cases."""
        r = self.reps(c)
        if j == self.fresh and i == self.fresh:
            return c
        if i == self.fresh:
            return self._apply(f"s_[{j}|fresh]", [(mu, self.A.srepl(j, mu, x)) for mu, x in r.items() if mu != j])
        if j == self.fresh:
            return self._apply(f"s_[fresh|{i}]", [(mu, self.A.srepl(mu, i, x)) for mu, x in r.items() if mu != i])
        return self._apply(f"s_[{j}|{i}]", [(mu, self.A.srepl(j, i, x)) for mu, x in r.items() if mu not in (i, j)])

    # ------------------------------------------------------------- verify
    def verify(self) -> DilationReport:
        refl, sym, trans, uniq = self.audit_relation()
        self.undefined, self.ill_defined = [], []
        A = self.A
        hs = {}
        for x in self.elems:
            try:
                hs[x] = self.h(x)
            except DilationError:
                self.undefined.append({"op": "h", "element": self.eid[x]})
        inj = len(set(hs.values())) == len(hs)
        fails = []
        for x, hx in hs.items():
            for i in self.alpha:
                got = self.cyl(i, hx)
                want = hs.get(A.cyl(i, x))
                if got != want:
                    fails.append({"op": f"c_{i}", "x": self.eid[x]})
                for j in self.alpha:
                    if i != j:
                        got = self.srepl(j, i, hx)
                        want = hs.get(A.srepl(j, i, x))
                        if got != want:
                            fails.append({"op": f"s_[{j}|{i}]", "x": self.eid[x]})
            for y, hy in hs.items():
                for name, f in (("meet", A.meet), ("join", A.join), ("himp", A.himp)):
                    got = self.binop(name, hx, hy)
                    want = hs.get(f(x, y))
                    if got != want:
                        fails.append({"op": name, "x": self.eid[x], "y": self.eid[y]})
        fresh_ok = all(self.cyl(self.fresh, hx) == hx for hx in hs.values())
        # the new operations must be well defined on every class, not only on the image
        for c in range(self.nclasses):
            self.cyl(self.fresh, c)
            for i in self.alpha:
                self.srepl(i, self.fresh, c)
                self.srepl(self.fresh, i, c)
        return DilationReport(refl, sym, trans, uniq, inj, fresh_ok, fails,
                              list(self.undefined), list(self.ill_defined))


def dilate(A, fresh=None) -> Dilation:
    """Build the one-step dilation; ``A`` is a :class:`ReplacementAlgebra` or an explicit SetAlgebra."""
    if not isinstance(A, ReplacementAlgebra):
        A = ReplacementAlgebra.from_set_algebra(A)
    return Dilation(A, fresh)
