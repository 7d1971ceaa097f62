"""Randomised instantiation of the quantifier, polyadic and diagonal identities."""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Callable, Optional

from .setalg import SetAlgebra
from .space import (AlgebraElement, cyl, cyl_iterated, diag, himp, join, meet, subst, subst_repl,
                    ucyl, ucyl_iterated)


def compose_tables(f: tuple, g: tuple) -> tuple:
    """(f∘g)(i) = f(g(i)) on the window."""
    return tuple(f[g[i]] for i in range(len(g)))


def update_table(t: tuple, i: int, j: int) -> tuple:
    return tuple(j if x == i else t[x] for x in range(len(t)))


def repl(n, i, j):
    return tuple(j if t == i else t for t in range(n))


class Ctx:
    """Random choices for one instantiation."""

    def __init__(self, A: SetAlgebra, rng: random.Random, pool=None):
        self.A, self.rng, self.sp = A, rng, A.space
        self.n = A.space.dims
        self.idx = A.indices
        self.pool = pool

    def x(self) -> AlgebraElement:
        if self.pool:
            return self.rng.choice(self.pool)
        return self.sp.random_element(self.rng)

    def i(self):
        return self.rng.choice(self.idx)

    def J(self):
        k = self.rng.randint(1, len(self.idx))
        return frozenset(self.rng.sample(self.idx, k))

    def tau(self):
        m = {t: self.rng.choice(self.idx) for t in self.idx}
        return tuple(m.get(t, t) for t in range(self.n))


@dataclass
class SchemaResult:
    name: str
    passed: int = 0
    failed: int = 0
    vacuous: int = 0
    witnesses: list = field(default_factory=list)


@dataclass
class SuiteReport:
    ok: bool
    trials: int
    schemas: dict

    def as_dict(self):
        return {
            "ok": self.ok,
            "trials": self.trials,
            "schemas": {k: {"passed": v.passed, "failed": v.failed, "vacuous": v.vacuous,
                            "witnesses": v.witnesses[:3]} for k, v in self.schemas.items()},
        }

    def table(self) -> str:
        lines = [f"{'schema':<14} {'pass':>6} {'fail':>6} {'vacuous':>8}"]
        for k, v in self.schemas.items():
            lines.append(f"{k:<14} {v.passed:>6} {v.failed:>6} {v.vacuous:>8}")
        return "\n".join(lines)


def _eq(lhs, rhs, **wit):
    if lhs == rhs:
        return True, None
    w = {k: (list(v) if isinstance(v, (tuple, frozenset, set)) else
             (hex(v.mask) if isinstance(v, AlgebraElement) else v)) for k, v in wit.items()}
    w["lhs"], w["rhs"] = hex(lhs.mask), hex(rhs.mask)
    return False, w


def _le(lhs, rhs, **wit):
    if lhs <= rhs:
        return True, None
    ok, w = _eq(lhs, rhs, **wit)
    w["relation"] = "≤"
    return False, w


# Each schema returns (ok, witness) or None when the random draw does not meet
# its hypothesis even after a few redraws.

def _exists_schemas():
    def e1(c):
        J = c.J()
        return _eq(cyl(J, c.sp.bottom), c.sp.bottom, J=J)

    def e2(c):
        J, p = c.J(), c.x()
        return _le(p, cyl(J, p), J=J, p=p)

    def e3(c):
        J, p, q = c.J(), c.x(), c.x()
        return _eq(cyl(J, meet(p, cyl(J, q))), meet(cyl(J, p), cyl(J, q)), J=J, p=p, q=q)

    def e4(c):
        J, p, q = c.J(), c.x(), c.x()
        r = himp(cyl(J, p), cyl(J, q))
        return _eq(cyl(J, r), r, J=J, p=p, q=q)

    def e5(c):
        J, p, q = c.J(), c.x(), c.x()
        r = join(cyl(J, p), cyl(J, q))
        return _eq(cyl(J, r), r, J=J, p=p, q=q)

    def e6(c):
        J, p = c.J(), c.x()
        return _eq(cyl(J, cyl(J, p)), cyl(J, p), J=J, p=p)

    return {"exists.1": e1, "exists.2": e2, "exists.3": e3, "exists.4": e4, "exists.5": e5, "exists.6": e6}


def _forall_schemas():
    def f1(c):
        J = c.J()
        return _eq(ucyl(J, c.sp.top), c.sp.top, J=J)

    def f2(c):
        J, p = c.J(), c.x()
        return _le(ucyl(J, p), p, J=J, p=p)

    def f3(c):
        J, p, q = c.J(), c.x(), c.x()
        return _le(ucyl(J, himp(p, q)), himp(ucyl(J, p), ucyl(J, q)), J=J, p=p, q=q)

    def f4(c):
        J, p = c.J(), c.x()
        return _eq(ucyl(J, ucyl(J, p)), ucyl(J, p), J=J, p=p)

    return {"forall.1": f1, "forall.2": f2, "forall.3": f3, "forall.4": f4}


def _gpha_schemas():
    def g1(c):
        p = c.x()
        return _eq(subst(tuple(range(c.n)), p), p, p=p)

    def g2(c):
        s, t, p = c.tau(), c.tau(), c.x()
        return _eq(subst(compose_tables(s, t), p), subst(s, subst(t, p)), sigma=s, tau=t, p=p)

    def g3c(c):
        J, K, p = c.J(), c.J(), c.x()
        return _eq(cyl(J | K, p), cyl(J, cyl(K, p)), J=J, J2=K, p=p)

    def g3q(c):
        J, K, p = c.J(), c.J(), c.x()
        return _eq(ucyl(J | K, p), ucyl(J, ucyl(K, p)), J=J, J2=K, p=p)

    def g4c(c):
        J, p = c.J(), c.x()
        return _eq(cyl(J, ucyl(J, p)), ucyl(J, p), J=J, p=p)

    def g4q(c):
        J, p = c.J(), c.x()
        return _eq(ucyl(J, cyl(J, p)), cyl(J, p), J=J, p=p)

    def agree_off(c):
        J, t = c.J(), c.tau()
        s = tuple(c.rng.choice(c.idx) if i in J else t[i] for i in range(c.n))
        return J, s, t

    def g5c(c):
        J, s, t = agree_off(c)
        p = c.x()
        return _eq(subst(s, cyl(J, p)), subst(t, cyl(J, p)), J=J, sigma=s, tau=t, p=p)

    def g5q(c):
        J, s, t = agree_off(c)
        p = c.x()
        return _eq(subst(s, ucyl(J, p)), subst(t, ucyl(J, p)), J=J, sigma=s, tau=t, p=p)

    def inj_on_preimage(c):
        for _ in range(20):
            J, s = c.J(), c.tau()
            pre = [i for i in c.idx if s[i] in J]
            if len({s[i] for i in pre}) == len(pre):
                return J, s, frozenset(pre)
        return None

    def g6c(c):
        d = inj_on_preimage(c)
        if d is None:
            return None
        J, s, pre = d
        p = c.x()
        return _eq(cyl(J, subst(s, p)), subst(s, cyl(pre, p)), J=J, sigma=s, p=p)

    def g6q(c):
        d = inj_on_preimage(c)
        if d is None:
            return None
        J, s, pre = d
        p = c.x()
        return _eq(ucyl(J, subst(s, p)), subst(s, ucyl(pre, p)), J=J, sigma=s, p=p)

    return {"gpha.1": g1, "gpha.2": g2, "gpha.3c": g3c, "gpha.3q": g3q, "gpha.4c": g4c, "gpha.4q": g4q,
            "gpha.5c": g5c, "gpha.5q": g5q, "gpha.6c": g6c, "gpha.6q": g6q}


def _cylset_schemas():
    def direct_vs_iterated_c(c):
        J, p = c.J(), c.x()
        return _eq(cyl(J, p), cyl_iterated(J, p), J=J, p=p)

    def direct_vs_iterated_q(c):
        J, p = c.J(), c.x()
        return _eq(ucyl(J, p), ucyl_iterated(J, p), J=J, p=p)

    return {"cylset.c": direct_vs_iterated_c, "cylset.q": direct_vs_iterated_q}


def _gphae_schemas():
    def d1(c):
        k = c.i()
        return _eq(diag(c.sp, k, k), c.sp.top, k=k)

    def d2(c):
        t, k, l = c.tau(), c.i(), c.i()
        return _eq(subst(t, diag(c.sp, k, l)), diag(c.sp, t[k], t[l]), tau=t, k=k, l=l)

    def d3(c):
        k, l, x = c.i(), c.i(), c.x()
        return _le(meet(x, diag(c.sp, k, l)), subst(repl(c.n, k, l), x), k=k, l=l, x=x)

    return {"gphae.1": d1, "gphae.2": d2, "gphae.3": d3}


def _axiom_schemas():
    def a1(c):
        i, j, x, y = c.i(), c.i(), c.x(), c.x()
        cx = cyl(i, x)
        ok = x <= cx and cx == cyl(i, cx) and cyl(i, join(x, y)) == join(cx, cyl(i, y)) \
            and cyl(i, cyl(j, x)) == cyl(j, cx)
        return (True, None) if ok else (False, {"i": i, "j": j, "x": hex(x.mask), "y": hex(y.mask)})

    def a2(c):
        t, x, y = c.tau(), c.x(), c.x()
        s = lambda e: subst(t, e)
        ok = (s(meet(x, y)) == meet(s(x), s(y)) and s(join(x, y)) == join(s(x), s(y))
              and s(himp(x, y)) == himp(s(x), s(y)) and s(c.sp.bottom) == c.sp.bottom
              and s(c.sp.top) == c.sp.top)
        return (True, None) if ok else (False, {"tau": list(t), "x": hex(x.mask), "y": hex(y.mask)})

    def a3(c):
        t, s, x = c.tau(), c.tau(), c.x()
        ok = subst(t, subst(s, x)) == subst(compose_tables(t, s), x) and subst(tuple(range(c.n)), x) == x
        return (True, None) if ok else (False, {"tau": list(t), "sigma": list(s), "x": hex(x.mask)})

    def a4(c):
        t, i, j, x = c.tau(), c.i(), c.i(), c.x()
        return _eq(subst(t, cyl(i, x)), subst(update_table(t, i, j), cyl(i, x)), tau=t, i=i, j=j, x=x)

    def unique_preimage(c):
        for _ in range(30):
            t, j = c.tau(), c.i()
            pre = [a for a in c.idx if t[a] == j]
            if len(pre) == 1:
                return t, pre[0], j
        return None

    def a5c(c):
        d = unique_preimage(c)
        if d is None:
            return None
        t, i, j = d
        x = c.x()
        return _eq(subst(t, cyl(i, x)), cyl(j, subst(t, x)), tau=t, i=i, j=j, x=x)

    def a5q(c):
        d = unique_preimage(c)
        if d is None:
            return None
        t, i, j = d
        x = c.x()
        return _eq(subst(t, ucyl(i, x)), ucyl(j, subst(t, x)), tau=t, i=i, j=j, x=x)

    def distinct(c, k=2):
        if len(c.idx) < k:
            return None
        return c.rng.sample(c.idx, k)

    def a6c(c):
        d = distinct(c)
        if d is None:
            return None
        i, j = d
        x = c.x()
        return _eq(cyl(i, subst_repl(i, j, x)), subst_repl(i, j, x), i=i, j=j, x=x)

    def a6q(c):
        d = distinct(c)
        if d is None:
            return None
        i, j = d
        x = c.x()
        return _eq(ucyl(i, subst_repl(i, j, x)), subst_repl(i, j, x), i=i, j=j, x=x)

    def a7c(c):
        i, j, x = c.i(), c.i(), c.x()
        return _eq(subst_repl(i, j, cyl(i, x)), cyl(i, x), i=i, j=j, x=x)

    def a7q(c):
        i, j, x = c.i(), c.i(), c.x()
        return _eq(subst_repl(i, j, ucyl(i, x)), ucyl(i, x), i=i, j=j, x=x)

    def three(c):
        i, j = c.i(), c.i()
        rest = [k for k in c.idx if k not in (i, j)]
        if not rest:
            return None
        return i, j, c.rng.choice(rest)

    def a8c(c):
        d = three(c)
        if d is None:
            return None
        i, j, k = d
        x = c.x()
        return _eq(subst_repl(i, j, cyl(k, x)), cyl(k, subst_repl(i, j, x)), i=i, j=j, k=k, x=x)

    def a8q(c):
        d = three(c)
        if d is None:
            return None
        i, j, k = d
        x = c.x()
        return _eq(subst_repl(i, j, ucyl(k, x)), ucyl(k, subst_repl(i, j, x)), i=i, j=j, k=k, x=x)

    def a9c(c):
        i, j, x = c.i(), c.i(), c.x()
        return _eq(cyl(i, subst_repl(j, i, x)), cyl(j, subst_repl(i, j, x)), i=i, j=j, x=x)

    def a9q(c):
        i, j, x = c.i(), c.i(), c.x()
        return _eq(ucyl(i, subst_repl(j, i, x)), ucyl(j, subst_repl(i, j, x)), i=i, j=j, x=x)

    return {"axioms.1": a1, "axioms.2": a2, "axioms.3": a3, "axioms.4": a4, "axioms.5c": a5c,
            "axioms.5q": a5q, "axioms.6c": a6c, "axioms.6q": a6q, "axioms.7c": a7c, "axioms.7q": a7q,
            "axioms.8c": a8c, "axioms.8q": a8q, "axioms.9c": a9c, "axioms.9q": a9q}


def schemas(with_eq=True) -> dict:
    out = {}
    out.update(_exists_schemas())
    out.update(_forall_schemas())
    out.update(_gpha_schemas())
    out.update(_cylset_schemas())
    if with_eq:
        out.update(_gphae_schemas())
    out.update(_axiom_schemas())
    return out


def axiom_suite(A: SetAlgebra, trials: int = 20, rng: Optional[random.Random] = None,
                seed: int = 0, only: Optional[list] = None) -> SuiteReport:
    """Instantiate every schema ``trials`` times with random elements and indices.

    Elements come from the carrier when it is explicit, otherwise they are random
    monotone families.  Equality is exact.
    """
    rng = rng or random.Random(seed)
    pool = A.elements() if A.explicit else None
    ctx = Ctx(A, rng, pool)
    table = schemas(with_eq=True)
    if only:
        table = {k: v for k, v in table.items() if k in only}
    results = {k: SchemaResult(k) for k in table}
    for _ in range(trials):
        for name, fn in table.items():
            r = fn(ctx)
            res = results[name]
            if r is None:
                res.vacuous += 1
            elif r[0]:
                res.passed += 1
            else:
                res.failed += 1
                res.witnesses.append(r[1])
    ok = all(r.failed == 0 for r in results.values())
    return SuiteReport(ok, trials, results)
