"""Kripke systems and models, satisfaction, persistence and countermodel search."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Optional

from .syntax import (And, Atom, Eq, Exists, Falsum, Forall, Formula, Implies, Or,
                     Signature, all_vars, format_formula, free_vars, predicates_of)


class ModelError(ValueError):
    pass


def reflexive_transitive_closure(worlds, edges) -> frozenset:
    idx = {w: i for i, w in enumerate(worlds)}
    n = len(worlds)
    reach = [[i == j for j in range(n)] for i in range(n)]
    for a, b in edges:
        if a not in idx or b not in idx:
            raise ModelError(f"order edge mentions unknown world: {a} {b}")
        reach[idx[a]][idx[b]] = True
    for k in range(n):
        for i in range(n):
            if reach[i][k]:
                for j in range(n):
                    if reach[k][j]:
                        reach[i][j] = True
    return frozenset((worlds[i], worlds[j]) for i in range(n) for j in range(n) if reach[i][j])


@dataclass(frozen=True)
class KripkeSystem:
    """Worlds, a preorder given as a set of pairs (a, b) meaning a ≤ b, a dims window,
    per-world domains and per-world assignment sets (``None`` means all tuples)."""

    worlds: tuple
    order: frozenset
    dims: int
    domains: dict
    assignments: Optional[dict] = None

    @classmethod
    def from_edges(cls, worlds, edges, dims, domains, assignments=None):
        worlds = tuple(worlds)
        return cls(worlds, reflexive_transitive_closure(worlds, edges), dims,
                   {w: tuple(domains[w]) for w in worlds},
                   None if assignments is None else {w: frozenset(map(tuple, assignments[w])) for w in worlds})

    def __hash__(self):
        return hash((self.worlds, self.order, self.dims))

    def leq(self, a, b) -> bool:
        return (a, b) in self.order

    def above(self, w):
        return [v for v in self.worlds if (w, v) in self.order]

    def V(self, w):
        """Assignment set at w, as a sorted list of tuples."""
        if self.assignments is None:
            return list(itertools.product(self.domains[w], repeat=self.dims))
        return sorted(self.assignments[w])

    def in_V(self, w, s) -> bool:
        if self.assignments is None:
            return len(s) == self.dims and all(a in self.domains[w] for a in s)
        return tuple(s) in self.assignments[w]

    @property
    def full(self) -> bool:
        return self.assignments is None


@dataclass
class Report:
    ok: bool
    violations: list = field(default_factory=list)

    def __bool__(self):
        return self.ok

    def as_dict(self):
        return {"ok": self.ok, "violations": self.violations}


def validate_system(S: KripkeSystem) -> Report:
    v = []
    for w in S.worlds:
        if (w, w) not in S.order:
            v.append({"violation": "reflexivity", "worlds": [w]})
        if not S.domains.get(w):
            v.append({"violation": "X_k nonempty", "worlds": [w]})
    for (a, b) in sorted(S.order):
        if a not in S.worlds or b not in S.worlds:
            v.append({"violation": "order on known worlds", "worlds": [a, b]})
            continue
        for c in S.worlds:
            if (b, c) in S.order and (a, c) not in S.order:
                v.append({"violation": "transitivity", "worlds": [a, b, c]})
        if not set(S.domains[a]) <= set(S.domains[b]):
            v.append({"violation": "X_k⊆X_{k'}", "worlds": [a, b]})
        if S.assignments is not None and not S.assignments[a] <= S.assignments[b]:
            v.append({"violation": "V_k⊆V_{k'}", "worlds": [a, b]})
    if S.assignments is not None:
        for w in S.worlds:
            for s in sorted(S.assignments[w]):
                if len(s) != S.dims or not all(x in S.domains[w] for x in s):
                    v.append({"violation": "V_k⊆^n X_k", "worlds": [w], "assignment": list(s)})
                    break
    return Report(not v, v)


@dataclass(frozen=True)
class KripkeModel:
    """A system plus a valuation ``{(pred, world): frozenset of argument tuples}``."""

    system: KripkeSystem
    signature: Signature
    valuation: dict

    def __hash__(self):
        return hash((self.system, self.signature))

    def holds_atom(self, pred, w, args) -> bool:
        return tuple(args) in self.valuation.get((pred, w), frozenset())


def validate_model(M: KripkeModel) -> Report:
    rep = validate_system(M.system)
    v = list(rep.violations)
    S = M.system
    for (p, w), tuples in sorted(M.valuation.items(), key=lambda kv: (kv[0][0], str(kv[0][1]))):
        r = M.signature.rank(p)
        for t in sorted(tuples):
            if len(t) != r or not all(x in S.domains[w] for x in t):
                v.append({"violation": "valuation within domain", "worlds": [w], "predicate": p, "tuple": list(t)})
    for p in M.signature.names:
        for a, b in sorted(S.order):
            if not M.valuation.get((p, a), frozenset()) <= M.valuation.get((p, b), frozenset()):
                v.append({"violation": "atomic persistence", "worlds": [a, b], "predicate": p})
    return Report(not v, v)


# ------------------------------------------------------------- satisfaction

def _check_vars(M, phi):
    vs = all_vars(phi)
    if vs and max(vs) >= M.system.dims:
        raise ModelError(f"variable v{max(vs)} outside dims window [0,{M.system.dims})")
    for p, r in predicates_of(phi).items():
        try:
            rank = M.signature.rank(p)
        except Exception:
            raise ModelError(f"unknown predicate {p!r}") from None
        if rank != r:
            raise ModelError(f"predicate {p!r} has rank {rank}, used with {r}")


def satisfies(M: KripkeModel, w, phi: Formula, s) -> bool:
    """w ⊨ φ[s], by direct recursion on the satisfaction clauses."""
    _check_vars(M, phi)
    S = M.system
    s = tuple(s)
    if not S.in_V(w, s):
        raise ModelError(f"assignment {s} is not in V_{w}")
    return _sat(M, w, phi, s)


def _sat(M, w, phi, s):
    S = M.system
    if isinstance(phi, Falsum):
        return False
    if isinstance(phi, Atom):
        return M.holds_atom(phi.pred, w, tuple(s[i] for i in phi.args))
    if isinstance(phi, Eq):
        if not M.signature.with_equality:
            raise ModelError("equality not enabled in this model")
        return s[phi.left] == s[phi.right]
    if isinstance(phi, And):
        return _sat(M, w, phi.left, s) and _sat(M, w, phi.right, s)
    if isinstance(phi, Or):
        return _sat(M, w, phi.left, s) or _sat(M, w, phi.right, s)
    if isinstance(phi, Implies):
        return all(not _sat(M, u, phi.left, s) or _sat(M, u, phi.right, s) for u in S.above(w))
    v = phi.var
    if isinstance(phi, Forall):
        for u in S.above(w):
            for a in S.domains[u]:
                t = s[:v] + (a,) + s[v + 1:]
                if S.in_V(u, t) and not _sat(M, u, phi.body, t):
                    return False
        return True
    if isinstance(phi, Exists):
        for a in S.domains[w]:
            t = s[:v] + (a,) + s[v + 1:]
            if S.in_V(w, t) and _sat(M, w, phi.body, t):
                return True
        return False
    raise TypeError(f"not a formula: {phi!r}")


class Evaluator:
    """Truth sets as bitmasks over positions (world, assignment in V_world).

    Compositional and much faster than :func:`satisfies`; the two are cross-checked in tests.
    """

    def __init__(self, M: KripkeModel):
        self.model = M
        S = M.system
        self.positions = [(w, s) for w in S.worlds for s in S.V(w)]
        self.index = {p: i for i, p in enumerate(self.positions)}
        self.full = (1 << len(self.positions)) - 1
        self.up = []
        for (w, s) in self.positions:
            m = 0
            for u in S.above(w):
                j = self.index.get((u, s))
                if j is not None:
                    m |= 1 << j
            self.up.append(m)
        self._fa = {}
        self._ex = {}
        self._atoms = {}

    def _quant_tables(self, v):
        if v not in self._fa:
            S = self.model.system
            fa, ex = [], []
            for (w, s) in self.positions:
                mf = me = 0
                for u in S.above(w):
                    for a in S.domains[u]:
                        j = self.index.get((u, s[:v] + (a,) + s[v + 1:]))
                        if j is not None:
                            mf |= 1 << j
                            if u == w:
                                me |= 1 << j
                fa.append(mf)
                ex.append(me)
            self._fa[v], self._ex[v] = fa, ex
        return self._fa[v], self._ex[v]

    def atom(self, phi):
        key = phi
        if key not in self._atoms:
            m = 0
            for i, (w, s) in enumerate(self.positions):
                if isinstance(phi, Eq):
                    ok = s[phi.left] == s[phi.right]
                else:
                    ok = self.model.holds_atom(phi.pred, w, tuple(s[a] for a in phi.args))
                if ok:
                    m |= 1 << i
            self._atoms[key] = m
        return self._atoms[key]

    def himp(self, a, b):
        bad = a & ~b
        m = 0
        for i, u in enumerate(self.up):
            if not u & bad:
                m |= 1 << i
        return m

    def forall(self, v, a):
        fa, _ = self._quant_tables(v)
        m = 0
        for i, t in enumerate(fa):
            if t & a == t:
                m |= 1 << i
        return m

    def exists(self, v, a):
        _, ex = self._quant_tables(v)
        m = 0
        for i, t in enumerate(ex):
            if t & a:
                m |= 1 << i
        return m

    def mask(self, phi: Formula) -> int:
        if isinstance(phi, Falsum):
            return 0
        if isinstance(phi, (Atom, Eq)):
            return self.atom(phi)
        if isinstance(phi, And):
            return self.mask(phi.left) & self.mask(phi.right)
        if isinstance(phi, Or):
            return self.mask(phi.left) | self.mask(phi.right)
        if isinstance(phi, Implies):
            return self.himp(self.mask(phi.left), self.mask(phi.right))
        if isinstance(phi, Forall):
            return self.forall(phi.var, self.mask(phi.body))
        if isinstance(phi, Exists):
            return self.exists(phi.var, self.mask(phi.body))
        raise TypeError(f"not a formula: {phi!r}")

    def persistence_failure(self, m):
        """First (i, j) with position i true, j above i false, else None."""
        for i, u in enumerate(self.up):
            if m >> i & 1 and u & ~m:
                j = (u & ~m & -(u & ~m)).bit_length() - 1
                return i, j
        return None


def is_valid_in(M: KripkeModel, phi: Formula) -> bool:
    """φ holds at every world under every assignment of V."""
    _check_vars(M, phi)
    ev = Evaluator(M)
    return ev.mask(phi) == ev.full


# -------------------------------------------------------------- persistence

@dataclass
class PersistenceReport:
    ok: bool
    depth: int
    classes: int
    witness: Optional[dict] = None

    def as_dict(self):
        return {"ok": self.ok, "depth": self.depth, "classes": self.classes, "witness": self.witness}


def check_persistence(M: KripkeModel, depth: int, predicates=None, variables=None) -> PersistenceReport:
    """Check w⊨φ[s], w≤w' ⟹ w'⊨φ[s] for every formula up to ``depth``.

    Formulas are enumerated level by level and identified by truth set, which is
    exact because every connective acts on truth sets only.  ``predicates``
    defaults to the whole signature; ``variables`` to the dims window.
    """
    S = M.system
    ev = Evaluator(M)
    names = M.signature.names if predicates is None else tuple(predicates)
    variables = tuple(range(S.dims)) if variables is None else tuple(variables)
    base = [Falsum()]
    for name in names:
        r = M.signature.rank(name)
        base += [Atom(name, args) for args in itertools.product(variables, repeat=r)]
    if M.signature.with_equality:
        base += [Eq(a, b) for a in variables for b in variables]
    known = {}
    level = []
    for f in base:
        m = ev.mask(f)
        if m not in known:
            known[m] = f
            level.append(m)

    def fail(m):
        hit = ev.persistence_failure(m)
        if hit is None:
            return None
        (w, s), (w2, _) = ev.positions[hit[0]], ev.positions[hit[1]]
        return {"formula": format_formula(known[m]), "world": w, "above": w2, "assignment": list(s)}

    for m in level:
        wit = fail(m)
        if wit:
            return PersistenceReport(False, depth, len(known), wit)
    for _ in range(depth):
        allm = list(known)
        new = []

        def add(m, f):
            if m not in known:
                known[m] = f
                new.append(m)

        for a in level:
            fa = known[a]
            for b in allm:
                fb = known[b]
                add(a & b, And(fa, fb))
                add(a | b, Or(fa, fb))
                add(ev.himp(a, b), Implies(fa, fb))
                add(ev.himp(b, a), Implies(fb, fa))
            for v in variables:
                add(ev.forall(v, a), Forall(v, fa))
                add(ev.exists(v, a), Exists(v, fa))
        for m in new:
            wit = fail(m)
            if wit:
                return PersistenceReport(False, depth, len(known), wit)
        level = new
    return PersistenceReport(True, depth, len(known))


# ----------------------------------------------------------- countermodels

@dataclass
class CountermodelResult:
    found: bool
    model: Optional[KripkeModel] = None
    world: object = None
    assignment: Optional[tuple] = None
    searched: int = 0
    verdict: str = ""

    def as_dict(self):
        d = {"found": self.found, "verdict": self.verdict, "searched": self.searched}
        if self.found:
            d.update(world=self.world, assignment=list(self.assignment), model=model_to_text(self.model))
        return d


def preorders(n: int):
    """Distinct preorders on range(n), from closures of edge subsets, in a fixed order."""
    worlds = tuple(range(n))
    pairs = [(a, b) for a in worlds for b in worlds if a != b]
    seen = set()
    out = []
    for r in range(len(pairs) + 1):
        for edges in itertools.combinations(pairs, r):
            c = reflexive_transitive_closure(worlds, edges)
            if c not in seen:
                seen.add(c)
                out.append(c)
    return out


def _monotone_choices(worlds, order, options):
    """Dicts world -> frozenset, one option per world, growing along the order.

    ``options`` is either one list shared by all worlds or a dict of per-world lists.
    """
    per = [options[w] if isinstance(options, dict) else options for w in worlds]
    for combo in itertools.product(*per):
        pick = dict(zip(worlds, combo))
        if all(pick[a] <= pick[b] for a, b in order):
            yield pick


def _subsets(items, nonempty=False):
    items = list(items)
    out = []
    for r in range(1 if nonempty else 0, len(items) + 1):
        out += [frozenset(c) for c in itertools.combinations(items, r)]
    return out


def find_countermodel(phi: Formula, max_worlds: int = 3, max_domain: int = 2,
                      dims: Optional[int] = None, signature: Optional[Signature] = None,
                      limit: Optional[int] = None) -> CountermodelResult:
    """Search finite models for a world and assignment falsifying φ.

    The first hit in enumeration order is returned after re-checking it with
    :func:`satisfies`.  Running out of models only means none exists within the bounds.
    """
    vs = all_vars(phi)
    need = max(vs) + 1 if vs else 0
    dims = need if dims is None else dims
    if dims < need:
        raise ModelError(f"formula uses v{need - 1} but dims is {dims}")
    arities = predicates_of(phi)
    if signature is None:
        signature = Signature(tuple(sorted(arities.items())), True)
    preds = [(p, signature.rank(p)) for p in sorted(arities)]
    searched = 0
    for n in range(1, max_worlds + 1):
        worlds = tuple(f"w{i}" for i in range(n))
        for order_idx in preorders(n):
            order = frozenset((worlds[a], worlds[b]) for a, b in order_idx)
            for doms in _monotone_choices(worlds, order, _subsets(range(max_domain), nonempty=True)):
                domains = {w: tuple(f"a{x}" for x in sorted(doms[w])) for w in worlds}
                S = KripkeSystem(worlds, order, dims, domains)
                per_pred = [
                    list(_monotone_choices(worlds, order, {
                        w: _subsets(itertools.product(domains[w], repeat=r)) for w in worlds}))
                    for _, r in preds]
                for choice in itertools.product(*per_pred):
                    val = {}
                    for (p, _), combo in zip(preds, choice):
                        for w in worlds:
                            val[(p, w)] = combo[w]
                    M = KripkeModel(S, signature, val)
                    searched += 1
                    ev = Evaluator(M)
                    m = ev.mask(phi)
                    if m != ev.full:
                        i = ((~m & ev.full) & -(~m & ev.full)).bit_length() - 1
                        w, s = ev.positions[i]
                        if satisfies(M, w, phi, s):
                            raise AssertionError("evaluator and satisfies disagree")
                        return CountermodelResult(True, M, w, s, searched, "countermodel")
                    if limit is not None and searched >= limit:
                        return CountermodelResult(False, searched=searched, verdict="limit reached")
    return CountermodelResult(False, searched=searched, verdict="exhausted within bounds")


# ------------------------------------------------------------- model files

SECTIONS = ("signature", "worlds", "order", "dims", "domains", "assignments", "valuation")


def _tuples(text, where):
    text = text.strip()
    out = []
    while text:
        if not text.startswith("("):
            raise ModelError(f"{where}: expected '(' in {text!r}")
        j = text.find(")")
        if j < 0:
            raise ModelError(f"{where}: unclosed tuple")
        out.append(tuple(text[1:j].split()))
        text = text[j + 1:].strip()
    return out


def parse_model(text: str) -> KripkeModel:
    """Read the sectioned ``.kml`` text format (see README)."""
    sections = {}
    cur = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            cur = line[1:-1].strip().lower()
            if cur not in SECTIONS:
                raise ModelError(f"line {lineno}: unknown section [{cur}]")
            if cur in sections:
                raise ModelError(f"line {lineno}: section [{cur}] repeated")
            sections[cur] = []
            continue
        if cur is None:
            raise ModelError(f"line {lineno}: content before first section")
        sections[cur].append((lineno, line))
    for req in ("worlds", "domains"):
        if req not in sections:
            raise ModelError(f"missing section [{req}]")
    worlds = tuple(tok for _, l in sections["worlds"] for tok in l.split())
    if len(set(worlds)) != len(worlds) or not worlds:
        raise ModelError("worlds must be nonempty and distinct")
    edges = []
    for ln, l in sections.get("order", []):
        parts = l.replace("<=", " ").split()
        if len(parts) != 2:
            raise ModelError(f"line {ln}: order lines are 'a b' meaning a ≤ b")
        edges.append(tuple(parts))
    domains = {}
    for ln, l in sections["domains"]:
        w, _, rest = l.partition(":")
        w = w.strip()
        if w not in worlds:
            raise ModelError(f"line {ln}: unknown world {w!r}")
        domains[w] = tuple(rest.split())
    for w in worlds:
        if w not in domains:
            raise ModelError(f"no domain given for world {w}")
    preds = []
    with_eq = True
    if "signature" in sections:
        with_eq = False
        for ln, l in sections["signature"]:
            parts = l.split()
            if parts == ["equality"]:
                with_eq = True
            elif len(parts) == 2 and parts[1].isdigit():
                preds.append((parts[0], int(parts[1])))
            else:
                raise ModelError(f"line {ln}: signature lines are 'name rank' or 'equality'")
    val_lines = []
    for ln, l in sections.get("valuation", []):
        head, sep, rest = l.partition(":")
        parts = head.split()
        if not sep or len(parts) != 2:
            raise ModelError(f"line {ln}: valuation lines are 'pred world: (..) (..)'")
        val_lines.append((ln, parts[0], parts[1], _tuples(rest, f"line {ln}")))
    if "signature" not in sections:
        seen = {}
        for ln, p, w, ts in val_lines:
            for t in ts:
                if seen.setdefault(p, len(t)) != len(t):
                    raise ModelError(f"line {ln}: inconsistent arity for {p}")
        preds = sorted(seen.items())
    sig = Signature(tuple(preds), with_eq)
    if "dims" in sections:
        try:
            dims = int(sections["dims"][0][1])
        except ValueError:
            raise ModelError("dims must be an integer") from None
    else:
        dims = max([r for _, r in preds] + [1])
    assignments = None
    if "assignments" in sections:
        assignments = {w: set() for w in worlds}
        for ln, l in sections["assignments"]:
            w, _, rest = l.partition(":")
            w = w.strip()
            if w not in worlds:
                raise ModelError(f"line {ln}: unknown world {w!r}")
            assignments[w].update(_tuples(rest, f"line {ln}"))
    S = KripkeSystem.from_edges(worlds, edges, dims, domains, assignments)
    val = {}
    for ln, p, w, ts in val_lines:
        if w not in worlds:
            raise ModelError(f"line {ln}: unknown world {w!r}")
        try:
            r = sig.rank(p)
        except Exception:
            raise ModelError(f"line {ln}: unknown predicate {p!r}") from None
        for t in ts:
            if len(t) != r:
                raise ModelError(f"line {ln}: {p} has rank {r}")
        val[(p, w)] = val.get((p, w), frozenset()) | frozenset(ts)
    for p in sig.names:
        for w in worlds:
            val.setdefault((p, w), frozenset())
    return KripkeModel(S, sig, val)


def load_model(path) -> KripkeModel:
    with open(path, encoding="utf-8") as fh:
        return parse_model(fh.read())


def model_to_text(M: KripkeModel) -> str:
    S = M.system
    out = ["[signature]"]
    out += [f"{p} {r}" for p, r in M.signature.predicates]
    if M.signature.with_equality:
        out.append("equality")
    out += ["[worlds]", " ".join(S.worlds), "[order]"]
    out += [f"{a} {b}" for a in S.worlds for b in S.worlds if a != b and (a, b) in S.order]
    out += ["[dims]", str(S.dims), "[domains]"]
    out += [f"{w}: " + " ".join(S.domains[w]) for w in S.worlds]
    if S.assignments is not None:
        out.append("[assignments]")
        out += [f"{w}: " + " ".join("(" + " ".join(s) + ")" for s in sorted(S.assignments[w])) for w in S.worlds]
    out.append("[valuation]")
    for p in M.signature.names:
        for w in S.worlds:
            ts = sorted(M.valuation.get((p, w), ()))
            if ts:
                out.append(f"{p} {w}: " + " ".join("(" + " ".join(t) + ")" for t in ts))
    return "\n".join(out) + "\n"


def parse_assignment(text: str, M: KripkeModel, w, phi: Optional[Formula] = None) -> tuple:
    """``"v0=a,v1=b"`` to a full tuple; unmentioned coordinates take the world's first element."""
    S = M.system
    if w not in S.worlds:
        raise ModelError(f"unknown world {w!r}")
    vals = {}
    for part in filter(None, (x.strip() for x in (text or "").split(","))):
        k, sep, a = part.partition("=")
        k = k.strip()
        if not sep or not k.startswith("v") or not k[1:].isdigit():
            raise ModelError(f"bad assignment entry {part!r}")
        i = int(k[1:])
        if i >= S.dims:
            raise ModelError(f"{k} outside dims window [0,{S.dims})")
        if a.strip() not in S.domains[w]:
            raise ModelError(f"{a.strip()!r} not in the domain of {w}")
        vals[i] = a.strip()
    if phi is not None:
        missing = sorted(v for v in free_vars(phi) if v not in vals)
        if missing:
            raise ModelError("no value given for " + ", ".join(f"v{v}" for v in missing))
    s = tuple(vals.get(i, S.domains[w][0]) for i in range(S.dims))
    if not S.in_V(w, s):
        raise ModelError(f"assignment {s} not in V_{w}")
    return s
