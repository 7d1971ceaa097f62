"""Hilbert-style proofs and a checker.

Axiom ids
  K   φ→(ψ→φ)                      S   (φ→(ψ→χ))→((φ→ψ)→(φ→χ))
  A1  (φ∧ψ)→φ       A2 (φ∧ψ)→ψ     A3  φ→(ψ→(φ∧ψ))
  O1  φ→(φ∨ψ)       O2 ψ→(φ∨ψ)     O3  (φ→χ)→((ψ→χ)→((φ∨ψ)→χ))
  F   ⊥→φ           I  φ→φ
  Q2  ∀v(φ→ψ)→(φ→∀vψ)             v not free in φ
  Q3  ∀v(φ→ψ)→(∃vφ→ψ)             v not free in φ, or not free in ψ
  Q4  ∀vφ→S_f(τ)φ                  τ moves only v, and τ(v) is not bound in φ
  Q5  S_f(τ)φ→∃vφ                  same condition
  E1  v=v           E2 v=w→w=v
  E3  (⋀ τ(u)=σ(u))→(S_f(τ)φ→S_f(σ)φ), u over free variables of φ where τ and σ differ,
      with no τ(u) or σ(u) bound in φ

Rules: mp i j (step i is φ, step j is φ→ψ), gen i v, fsubst i τ (from S_f(τ)φ
infer φ; τ one to one on the free variables of φ with values not bound in φ),
subst i τ (from φ infer S(τ)φ; τ one to one on the variables of φ).
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Optional, Union

from .syntax import (BOT, And, Atom, Eq, Exists, Falsum, Forall, Formula, FormulaError, Implies, Or,
                     all_vars, apply_free_subst, apply_subst, bound_vars, format_formula, free_vars,
                     parse_formula, predicates_of)

PROP_IDS = ("K", "S", "A1", "A2", "A3", "O1", "O2", "O3", "F", "I")
QUANT_IDS = ("Q2", "Q3", "Q4", "Q5")
EQ_IDS = ("E1", "E2", "E3")
AXIOM_IDS = PROP_IDS + QUANT_IDS + EQ_IDS


class ProofError(Exception):
    """A rejected step.  ``code`` is machine-readable, ``step`` 1-based (0 for file-level problems)."""

    def __init__(self, step: int, code: str, reason: str):
        self.step, self.code, self.reason = step, code, reason
        super().__init__(f"step {step}: [{code}] {reason}")

    def as_dict(self):
        return {"step": self.step, "code": self.code, "reason": self.reason}


class SideConditionError(ValueError):
    def __init__(self, code, reason):
        self.code, self.reason = code, reason
        super().__init__(reason)


# ------------------------------------------------------------ justifications

@dataclass(frozen=True)
class Premise:
    index: int


@dataclass(frozen=True)
class PropAxiom:
    schema: str
    bindings: tuple = ()


@dataclass(frozen=True)
class QuantAxiom:
    id: int
    bindings: tuple = ()


@dataclass(frozen=True)
class EqAxiom:
    id: int
    bindings: tuple = ()


@dataclass(frozen=True)
class MP:
    minor: int
    major: int


@dataclass(frozen=True)
class Gen:
    step: int
    var: int


@dataclass(frozen=True)
class FreeSubstRule:
    step: int
    tau: tuple


@dataclass(frozen=True)
class SubstRule:
    step: int
    tau: tuple


Justification = Union[Premise, PropAxiom, QuantAxiom, EqAxiom, MP, Gen, FreeSubstRule, SubstRule]


@dataclass
class Proof:
    premises: list = field(default_factory=list)
    steps: list = field(default_factory=list)   # (Formula, Justification)


def _as_map(t) -> dict:
    return dict(t) if not isinstance(t, dict) else t


def _key(j) -> str:
    if isinstance(j, PropAxiom):
        return j.schema
    if isinstance(j, QuantAxiom):
        return f"Q{j.id}"
    if isinstance(j, EqAxiom):
        return f"E{j.id}"
    raise TypeError(j)


# ---------------------------------------------------------- side conditions

def check_side_condition(kind: str, data: dict) -> tuple:
    """Return (ok, reason).  ``kind`` is an axiom id or one of ``fsubst``, ``subst``, ``gen``."""
    try:
        _side(kind, data)
    except SideConditionError as e:
        return False, e.reason
    return True, "ok"


def _side(kind, d):
    if kind == "Q2":
        if d["v"] in free_vars(d["phi"]):
            raise SideConditionError("Q2-free", f"v{d['v']} is free in φ")
    elif kind == "Q3":
        if d["v"] in free_vars(d["phi"]) and d["v"] in free_vars(d["psi"]):
            raise SideConditionError("Q3-free", f"v{d['v']} is free in both φ and ψ")
    elif kind in ("Q4", "Q5"):
        phi, v, tau = d["phi"], d["v"], _as_map(d["tau"])
        for u in sorted(free_vars(phi) - {v}):
            if tau.get(u, u) != u:
                raise SideConditionError(f"{kind}-moves", f"τ moves v{u}, a free variable other than v{v}")
        t = tau.get(v, v)
        # Requiring t to be bound instead would admit capture and reject ∀v p(v) → p(w).
        if t != v and t in bound_vars(phi):
            raise SideConditionError(f"{kind}-capture", f"τ(v{v}) = v{t} is bound in φ")
    elif kind == "E3":
        phi, tau, sigma = d["phi"], _as_map(d["tau"]), _as_map(d["sigma"])
        b = bound_vars(phi)
        for u in sorted(free_vars(phi)):
            for name, m in (("τ", tau), ("σ", sigma)):
                if m.get(u, u) != u and m.get(u, u) in b:
                    raise SideConditionError("E3-capture", f"{name}(v{u}) = v{m[u]} is bound in φ")
    elif kind == "fsubst":
        phi, tau = d["phi"], _as_map(d["tau"])
        fv, b = sorted(free_vars(phi)), bound_vars(phi)
        img = [tau.get(u, u) for u in fv]
        if len(set(img)) != len(img):
            raise SideConditionError("fsubst-injective", "τ is not one to one on the free variables")
        for u, t in zip(fv, img):
            if t in b:
                raise SideConditionError("fsubst-bound", f"τ(v{u}) = v{t} is bound in φ")
    elif kind == "subst":
        phi, tau = d["phi"], _as_map(d["tau"])
        vs = sorted(all_vars(phi))
        img = [tau.get(u, u) for u in vs]
        if len(set(img)) != len(img):
            raise SideConditionError("subst-injective", "τ is not one to one on the variables of φ")
    elif kind == "gen":
        pass
    else:
        raise ValueError(f"unknown side-condition kind {kind!r}")


# ------------------------------------------------------------ instantiation

def _conj(items):
    out = None
    for e in reversed(items):
        out = e if out is None else And(e, out)
    return out


def instantiate_axiom(id: str, bindings: dict) -> Formula:
    """The concrete axiom for metavariable ``bindings``; side conditions are re-checked."""
    b = dict(bindings)

    def need(*names):
        for n in names:
            if n not in b:
                raise SideConditionError("missing-binding", f"axiom {id} needs {n}")
        return [b[n] for n in names]

    if id == "K":
        p, q = need("phi", "psi")
        return Implies(p, Implies(q, p))
    if id == "S":
        p, q, r = need("phi", "psi", "chi")
        return Implies(Implies(p, Implies(q, r)), Implies(Implies(p, q), Implies(p, r)))
    if id == "A1":
        p, q = need("phi", "psi")
        return Implies(And(p, q), p)
    if id == "A2":
        p, q = need("phi", "psi")
        return Implies(And(p, q), q)
    if id == "A3":
        p, q = need("phi", "psi")
        return Implies(p, Implies(q, And(p, q)))
    if id == "O1":
        p, q = need("phi", "psi")
        return Implies(p, Or(p, q))
    if id == "O2":
        p, q = need("phi", "psi")
        return Implies(q, Or(p, q))
    if id == "O3":
        p, q, r = need("phi", "psi", "chi")
        return Implies(Implies(p, r), Implies(Implies(q, r), Implies(Or(p, q), r)))
    if id == "F":
        (p,) = need("phi")
        return Implies(BOT, p)
    if id == "I":
        (p,) = need("phi")
        return Implies(p, p)
    if id == "Q2":
        p, q, v = need("phi", "psi", "v")
        _side("Q2", b)
        return Implies(Forall(v, Implies(p, q)), Implies(p, Forall(v, q)))
    if id == "Q3":
        p, q, v = need("phi", "psi", "v")
        _side("Q3", b)
        return Implies(Forall(v, Implies(p, q)), Implies(Exists(v, p), q))
    if id in ("Q4", "Q5"):
        p, v, tau = need("phi", "v", "tau")
        _side(id, b)
        inst = apply_free_subst(_as_map(tau), p)
        return Implies(Forall(v, p), inst) if id == "Q4" else Implies(inst, Exists(v, p))
    if id == "E1":
        (v,) = need("v")
        return Eq(v, v)
    if id == "E2":
        v, w = need("v", "w")
        return Implies(Eq(v, w), Eq(w, v))
    if id == "E3":
        p, tau, sigma = need("phi", "tau", "sigma")
        _side("E3", b)
        tau, sigma = _as_map(tau), _as_map(sigma)
        eqs = [Eq(tau.get(u, u), sigma.get(u, u)) for u in sorted(free_vars(p))
               if tau.get(u, u) != sigma.get(u, u)]
        body = Implies(apply_free_subst(tau, p), apply_free_subst(sigma, p))
        return body if not eqs else Implies(_conj(eqs), body)
    raise SideConditionError("unknown-axiom", f"unknown axiom id {id!r}")


# --------------------------------------------------------------- matching

def match_axiom(id: str, f: Formula) -> Optional[dict]:
    """Recover bindings for ``f`` as an instance of axiom ``id`` (E3 needs explicit bindings)."""
    I = lambda x: isinstance(x, Implies)
    try:
        if id == "K" and I(f) and I(f.right):
            return {"phi": f.left, "psi": f.right.left}
        if id == "S" and I(f) and I(f.left) and I(f.left.right):
            return {"phi": f.left.left, "psi": f.left.right.left, "chi": f.left.right.right}
        if id in ("A1", "A2") and I(f) and isinstance(f.left, And):
            return {"phi": f.left.left, "psi": f.left.right}
        if id == "A3" and I(f) and I(f.right) and isinstance(f.right.right, And):
            return {"phi": f.left, "psi": f.right.left}
        if id in ("O1", "O2") and I(f) and isinstance(f.right, Or):
            return {"phi": f.right.left, "psi": f.right.right}
        if id == "O3" and I(f) and I(f.left):
            return {"phi": f.left.left, "chi": f.left.right, "psi": f.right.left.left}
        if id in ("F", "I") and I(f):
            return {"phi": f.right}
        if id in ("Q2", "Q3") and I(f) and isinstance(f.left, Forall) and I(f.left.body):
            return {"phi": f.left.body.left, "psi": f.left.body.right, "v": f.left.var}
        if id == "Q4" and I(f) and isinstance(f.left, Forall):
            v, p = f.left.var, f.left.body
            for t in sorted(all_vars(f.right) | {v}):
                if apply_free_subst({v: t}, p) == f.right:
                    return {"phi": p, "v": v, "tau": {v: t}}
        if id == "Q5" and I(f) and isinstance(f.right, Exists):
            v, p = f.right.var, f.right.body
            for t in sorted(all_vars(f.left) | {v}):
                if apply_free_subst({v: t}, p) == f.left:
                    return {"phi": p, "v": v, "tau": {v: t}}
        if id == "E1" and isinstance(f, Eq):
            return {"v": f.left}
        if id == "E2" and I(f) and isinstance(f.left, Eq):
            return {"v": f.left.left, "w": f.left.right}
    except AttributeError:
        return None
    return None


# ---------------------------------------------------------------- checking

def _check_axiom(n, f, j):
    key = _key(j)
    if key not in AXIOM_IDS:
        raise ProofError(n, "unknown-axiom", f"no axiom with id {key!r}")
    b = dict(j.bindings)
    if not b:
        if key == "E3":
            raise ProofError(n, "malformed-instantiation", "E3 needs phi, tau and sigma")
        b = match_axiom(key, f)
        if b is None:
            raise ProofError(n, "not-an-instance", f"formula does not have the shape of axiom {key}")
    try:
        inst = instantiate_axiom(key, b)
    except SideConditionError as e:
        raise ProofError(n, e.code, f"axiom {key}: {e.reason}") from None
    if inst != f:
        raise ProofError(n, "not-an-instance",
                         f"axiom {key} instance is {format_formula(inst)}, step has {format_formula(f)}")


def _ref(n, k, lines):
    if not 1 <= k < n:
        raise ProofError(n, "dangling-reference", f"step {k} is not an earlier step")
    return lines[k - 1]


def check_proof(P: Proof) -> Formula:
    """Check every step; return the last formula or raise :class:`ProofError`."""
    if not P.steps:
        raise ProofError(0, "empty-proof", "a proof needs at least one step")
    arity = {}
    for f in list(P.premises) + [s for s, _ in P.steps]:
        try:
            for p, r in predicates_of(f).items():
                if arity.setdefault(p, r) != r:
                    raise ProofError(0, "arity-mismatch", f"predicate {p} used with arities {arity[p]} and {r}")
        except FormulaError as e:
            raise ProofError(0, "arity-mismatch", str(e)) from None
    lines = []
    for n, (f, j) in enumerate(P.steps, 1):
        if isinstance(j, Premise):
            if not 1 <= j.index <= len(P.premises):
                raise ProofError(n, "dangling-reference", f"no premise {j.index}")
            if P.premises[j.index - 1] != f:
                raise ProofError(n, "premise-mismatch", f"premise {j.index} is a different formula")
        elif isinstance(j, (PropAxiom, QuantAxiom, EqAxiom)):
            _check_axiom(n, f, j)
        elif isinstance(j, MP):
            a, b = _ref(n, j.minor, lines), _ref(n, j.major, lines)
            if not (isinstance(b, Implies) and b.left == a and b.right == f):
                raise ProofError(n, "bad-mp", f"step {j.major} is not ({format_formula(a)} → {format_formula(f)})")
        elif isinstance(j, Gen):
            a = _ref(n, j.step, lines)
            if f != Forall(j.var, a):
                raise ProofError(n, "bad-gen", f"expected (forall v{j.var} {format_formula(a)})")
        elif isinstance(j, FreeSubstRule):
            a = _ref(n, j.step, lines)
            tau = dict(j.tau)
            try:
                _side("fsubst", {"phi": f, "tau": tau})
            except SideConditionError as e:
                raise ProofError(n, e.code, f"free substitution: {e.reason}") from None
            if apply_free_subst(tau, f) != a:
                raise ProofError(n, "bad-fsubst", f"step {j.step} is not S_f(τ) of this formula")
        elif isinstance(j, SubstRule):
            a = _ref(n, j.step, lines)
            tau = dict(j.tau)
            try:
                _side("subst", {"phi": a, "tau": tau})
            except SideConditionError as e:
                raise ProofError(n, e.code, f"substitution: {e.reason}") from None
            if apply_subst(tau, a) != f:
                raise ProofError(n, "bad-subst", f"formula is not S(τ) of step {j.step}")
        else:
            raise ProofError(n, "malformed-justification", f"unknown justification {j!r}")
        lines.append(f)
    return lines[-1]


# --------------------------------------------------------------- file format

_STEP = re.compile(r"step\s+(.*?)\s+by\s+(.*)\Z")


def _split_values(text, lineno):
    """Split ``key=value`` pairs where values may be parenthesised formulas or {maps}."""
    out = {}
    i, n = 0, len(text)
    while i < n:
        while i < n and text[i].isspace():
            i += 1
        if i >= n:
            break
        eq = text.find("=", i)
        if eq < 0:
            raise ProofError(lineno, "malformed-justification", f"expected key=value in {text[i:]!r}")
        key = text[i:eq].strip()
        j = eq + 1
        if j < n and text[j] in "({":
            close = ")" if text[j] == "(" else "}"
            depth = 0
            k = j
            while k < n:
                if text[k] == text[j]:
                    depth += 1
                elif text[k] == close:
                    depth -= 1
                    if depth == 0:
                        break
                k += 1
            if depth:
                raise ProofError(lineno, "malformed-justification", f"unbalanced value for {key}")
            out[key] = text[j:k + 1]
            i = k + 1
        else:
            k = j
            while k < n and not text[k].isspace():
                k += 1
            out[key] = text[j:k]
            i = k
    return out


def parse_varmap(text: str) -> dict:
    body = text.strip()
    if not (body.startswith("{") and body.endswith("}")):
        raise ValueError(f"expected a map like {{0:1}}, got {text!r}")
    out = {}
    for part in filter(None, (p.strip() for p in body[1:-1].split(","))):
        a, sep, b = part.partition(":")
        if not sep:
            raise ValueError(f"bad map entry {part!r}")
        out[_var(a)] = _var(b)
    return out


def _var(tok: str) -> int:
    tok = tok.strip()
    if tok.startswith("v"):
        tok = tok[1:]
    if not tok.isdigit():
        raise ValueError(f"bad variable {tok!r}")
    return int(tok)


def format_varmap(m) -> str:
    return "{" + ",".join(f"{a}:{b}" for a, b in sorted(dict(m).items())) + "}"


def parse_justification(text: str, lineno: int = 0) -> Justification:
    parts = text.split(None, 1)
    if not parts:
        raise ProofError(lineno, "malformed-justification", "empty justification")
    kind, rest = parts[0], (parts[1] if len(parts) > 1 else "")
    try:
        if kind == "premise":
            return Premise(int(rest))
        if kind == "mp":
            a, b = rest.split()
            return MP(int(a), int(b))
        if kind == "gen":
            a, v = rest.split()
            return Gen(int(a), _var(v))
        if kind in ("fsubst", "subst"):
            a, m = rest.split(None, 1)
            tau = tuple(sorted(parse_varmap(m).items()))
            return (FreeSubstRule if kind == "fsubst" else SubstRule)(int(a), tau)
        if kind == "axiom":
            bits = rest.split(None, 1)
            ident = bits[0]
            raw = _split_values(bits[1], lineno) if len(bits) > 1 else {}
            b = {}
            for k, v in raw.items():
                if k in ("phi", "psi", "chi"):
                    b[k] = parse_formula(v)
                elif k in ("v", "w"):
                    b[k] = _var(v)
                elif k in ("tau", "sigma"):
                    b[k] = tuple(sorted(parse_varmap(v).items()))
                else:
                    raise ProofError(lineno, "malformed-instantiation", f"unknown binding {k!r}")
            bt = tuple(sorted(b.items(), key=lambda kv: kv[0]))
            if ident in PROP_IDS:
                return PropAxiom(ident, bt)
            if ident in QUANT_IDS:
                return QuantAxiom(int(ident[1:]), bt)
            if ident in EQ_IDS:
                return EqAxiom(int(ident[1:]), bt)
            raise ProofError(lineno, "unknown-axiom", f"no axiom with id {ident!r}")
    except ProofError:
        raise
    except (ValueError, FormulaError) as e:
        raise ProofError(lineno, "malformed-justification", str(e)) from None
    raise ProofError(lineno, "malformed-justification", f"unknown justification kind {kind!r}")


def parse_proof(text: str) -> Proof:
    """Line format: ``premise <formula>`` and ``step <formula> by <justification>``; ``#`` starts a comment."""
    P = Proof()
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            if line.startswith("premise "):
                P.premises.append(parse_formula(line[len("premise "):]))
                continue
            m = _STEP.match(line)
            if not m:
                raise ProofError(len(P.steps) + 1, "syntax", f"line {lineno}: expected 'premise' or 'step ... by ...'")
            f = parse_formula(m.group(1))
            j = parse_justification(m.group(2), len(P.steps) + 1)
        except FormulaError as e:
            raise ProofError(len(P.steps) + 1, "syntax", f"line {lineno}: {e}") from None
        P.steps.append((f, j))
    return P


def load_proof(path) -> Proof:
    with open(path, encoding="utf-8") as fh:
        return parse_proof(fh.read())


def format_justification(j: Justification) -> str:
    if isinstance(j, Premise):
        return f"premise {j.index}"
    if isinstance(j, MP):
        return f"mp {j.minor} {j.major}"
    if isinstance(j, Gen):
        return f"gen {j.step} v{j.var}"
    if isinstance(j, FreeSubstRule):
        return f"fsubst {j.step} {format_varmap(j.tau)}"
    if isinstance(j, SubstRule):
        return f"subst {j.step} {format_varmap(j.tau)}"
    parts = [f"axiom {_key(j)}"]
    for k, v in j.bindings:
        if isinstance(v, Formula):
            parts.append(f"{k}={format_formula(v)}")
        elif isinstance(v, tuple):
            parts.append(f"{k}={format_varmap(v)}")
        else:
            parts.append(f"{k}=v{v}")
    return " ".join(parts)


def format_proof(P: Proof) -> str:
    lines = [f"premise {format_formula(f)}" for f in P.premises]
    lines += [f"step {format_formula(f)} by {format_justification(j)}" for f, j in P.steps]
    return "\n".join(lines) + "\n"
