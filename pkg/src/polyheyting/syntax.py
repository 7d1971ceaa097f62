"""Formulas, variable sets and the two substitution operators.

Variables are plain non-negative ints; ``v3`` in text is ``3`` in code.
"""
from __future__ import annotations

import re
from collections.abc import Mapping
from dataclasses import dataclass
from typing import Callable, Iterable, Union

VarId = int


class Formula:
    """Base class; concrete formulas are the frozen dataclasses below."""

    __slots__ = ()

    def __str__(self):
        return format_formula(self)


@dataclass(frozen=True)
class Falsum(Formula):
    pass


@dataclass(frozen=True)
class Atom(Formula):
    pred: str
    args: tuple = ()


@dataclass(frozen=True)
class Eq(Formula):
    left: int
    right: int


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Implies(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Forall(Formula):
    var: int
    body: Formula


@dataclass(frozen=True)
class Exists(Formula):
    var: int
    body: Formula


BOT = Falsum()
BINARY = {And: "and", Or: "or", Implies: "imp"}
QUANT = {Forall: "forall", Exists: "exists"}
KEYWORDS = {"bot", "eq", "and", "or", "imp", "forall", "exists"}


def Not(phi: Formula) -> Formula:
    return Implies(phi, BOT)


@dataclass(frozen=True)
class Signature:
    predicates: tuple = ()
    with_equality: bool = True

    def __post_init__(self):
        names = [n for n, _ in self.predicates]
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate predicate names in {names}")
        for n, r in self.predicates:
            if r < 0:
                raise ValueError(f"negative rank for {n}")

    def rank(self, name):
        for n, r in self.predicates:
            if n == name:
                return r
        raise FormulaError(f"unknown predicate {name!r}")

    @property
    def names(self):
        return tuple(n for n, _ in self.predicates)


class FormulaError(ValueError):
    """Raised on malformed text or signature violations."""

    def __init__(self, msg, pos=None):
        self.pos = pos
        super().__init__(msg if pos is None else f"{msg} at position {pos}")


# ---------------------------------------------------------------- variables

def free_vars(phi: Formula) -> frozenset:
    if isinstance(phi, Falsum):
        return frozenset()
    if isinstance(phi, Atom):
        return frozenset(phi.args)
    if isinstance(phi, Eq):
        return frozenset((phi.left, phi.right))
    if isinstance(phi, (And, Or, Implies)):
        return free_vars(phi.left) | free_vars(phi.right)
    if isinstance(phi, (Forall, Exists)):
        return free_vars(phi.body) - {phi.var}
    raise TypeError(f"not a formula: {phi!r}")


def bound_vars(phi: Formula) -> frozenset:
    if isinstance(phi, (Falsum, Atom, Eq)):
        return frozenset()
    if isinstance(phi, (And, Or, Implies)):
        return bound_vars(phi.left) | bound_vars(phi.right)
    if isinstance(phi, (Forall, Exists)):
        return bound_vars(phi.body) | {phi.var}
    raise TypeError(f"not a formula: {phi!r}")


def all_vars(phi: Formula) -> frozenset:
    return free_vars(phi) | bound_vars(phi)


def binder_occurrences(phi: Formula) -> list:
    """Binder variables in prefix order, with repetitions."""
    if isinstance(phi, (Falsum, Atom, Eq)):
        return []
    if isinstance(phi, (And, Or, Implies)):
        return binder_occurrences(phi.left) + binder_occurrences(phi.right)
    return [phi.var] + binder_occurrences(phi.body)


def depth(phi: Formula) -> int:
    """Connective/quantifier nesting depth; atoms, equalities and bot have depth 0."""
    if isinstance(phi, (Falsum, Atom, Eq)):
        return 0
    if isinstance(phi, (And, Or, Implies)):
        return 1 + max(depth(phi.left), depth(phi.right))
    return 1 + depth(phi.body)


def predicates_of(phi: Formula) -> dict:
    """Map predicate name to the arity it is used with."""
    out = {}

    def walk(f):
        if isinstance(f, Atom):
            if out.setdefault(f.pred, len(f.args)) != len(f.args):
                raise FormulaError(f"predicate {f.pred!r} used with arities {out[f.pred]} and {len(f.args)}")
        elif isinstance(f, (And, Or, Implies)):
            walk(f.left)
            walk(f.right)
        elif isinstance(f, (Forall, Exists)):
            walk(f.body)

    walk(phi)
    return out


def has_equality(phi: Formula) -> bool:
    if isinstance(phi, Eq):
        return True
    if isinstance(phi, (And, Or, Implies)):
        return has_equality(phi.left) or has_equality(phi.right)
    if isinstance(phi, (Forall, Exists)):
        return has_equality(phi.body)
    return False


# ------------------------------------------------------------ substitution

VarMap = Union[Mapping, Callable[[int], int]]


def as_function(tau: VarMap) -> Callable[[int], int]:
    """Turn a dict (identity off its keys) or a callable into a function on variables."""
    if isinstance(tau, Mapping):
        return lambda v, _t=tau: _t.get(v, v)
    return tau


def restrict(f: Mapping, Z: Iterable[int]) -> dict:
    """f|Z: agrees with f on dom f ∩ Z and is the identity on the rest of Z."""
    return {z: f.get(z, z) for z in Z}


def apply_subst(tau: VarMap, phi: Formula) -> Formula:
    """Rename every variable occurrence, binders included."""
    t = as_function(tau)

    def go(f):
        if isinstance(f, Falsum):
            return f
        if isinstance(f, Atom):
            return Atom(f.pred, tuple(t(v) for v in f.args))
        if isinstance(f, Eq):
            return Eq(t(f.left), t(f.right))
        if isinstance(f, (And, Or, Implies)):
            return type(f)(go(f.left), go(f.right))
        return type(f)(t(f.var), go(f.body))

    return go(phi)


def apply_free_subst(tau: VarMap, phi: Formula) -> Formula:
    """Rename free occurrences only; under a binder for v the map is frozen at v."""
    t = as_function(tau)

    def go(f, frozen):
        if isinstance(f, Falsum):
            return f
        if isinstance(f, Atom):
            return Atom(f.pred, tuple(v if v in frozen else t(v) for v in f.args))
        if isinstance(f, Eq):
            l, r = f.left, f.right
            return Eq(l if l in frozen else t(l), r if r in frozen else t(r))
        if isinstance(f, (And, Or, Implies)):
            return type(f)(go(f.left, frozen), go(f.right, frozen))
        return type(f)(f.var, go(f.body, frozen | {f.var}))

    return go(phi, frozenset())


# ----------------------------------------------------------------- parsing

_TOKEN = re.compile(r"\s*(?:(\()|(\))|([A-Za-z_][A-Za-z0-9_']*))")
_VAR = re.compile(r"v(\d+)\Z")


def _tokenize(text):
    pos, out = 0, []
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m:
            j = pos
            while j < len(text) and text[j].isspace():
                j += 1
            raise FormulaError(f"unexpected character {text[j]!r}", j)
        start = m.start(m.lastindex)
        out.append((m.group(m.lastindex), start))
        pos = m.end()
    return out


def is_var_token(tok):
    return _VAR.match(tok) is not None


def parse_formula(text: str, signature: Signature | None = None) -> Formula:
    """Parse the fully parenthesised prefix grammar.

    Without a signature, predicate arities are inferred and must be used consistently.
    """
    toks = _tokenize(text)
    i = 0
    seen = {}

    def peek():
        return toks[i] if i < len(toks) else (None, len(text))

    def take(expect=None):
        nonlocal i
        tok, p = peek()
        if tok is None:
            raise FormulaError("unexpected end of input", p)
        if expect is not None and tok != expect:
            raise FormulaError(f"expected {expect!r}, found {tok!r}", p)
        i += 1
        return tok, p

    def var():
        tok, p = take()
        m = _VAR.match(tok)
        if not m:
            raise FormulaError(f"expected a variable, found {tok!r}", p)
        return int(m.group(1))

    def atom(name, args, p):
        if name in KEYWORDS or is_var_token(name):
            raise FormulaError(f"{name!r} cannot be a predicate", p)
        if signature is not None:
            try:
                r = signature.rank(name)
            except FormulaError:
                raise FormulaError(f"unknown predicate {name!r}", p) from None
            if r != len(args):
                raise FormulaError(f"arity mismatch: {name} has rank {r}, got {len(args)}", p)
        elif seen.setdefault(name, len(args)) != len(args):
            raise FormulaError(f"arity mismatch: {name} used with {seen[name]} and {len(args)} arguments", p)
        return Atom(name, tuple(args))

    def form():
        tok, p = take()
        if tok == ")":
            raise FormulaError("unexpected ')'", p)
        if tok != "(":
            if tok == "bot":
                return BOT
            if tok in KEYWORDS or is_var_token(tok):
                raise FormulaError(f"unexpected {tok!r}", p)
            return atom(tok, (), p)
        head, hp = take()
        if head in ("(", ")"):
            raise FormulaError(f"expected an operator, found {head!r}", hp)
        if head == "bot":
            raise FormulaError("bot takes no arguments", hp)
        if head == "eq":
            if signature is not None and not signature.with_equality:
                raise FormulaError("equality not in signature", hp)
            a, b = var(), var()
            take(")")
            return Eq(a, b)
        if head in ("and", "or", "imp"):
            l, r = form(), form()
            take(")")
            return {"and": And, "or": Or, "imp": Implies}[head](l, r)
        if head in ("forall", "exists"):
            v = var()
            body = form()
            take(")")
            return (Forall if head == "forall" else Exists)(v, body)
        args = []
        while peek()[0] not in (")", None):
            args.append(var())
        take(")")
        return atom(head, args, hp)

    phi = form()
    if i != len(toks):
        raise FormulaError(f"trailing input {toks[i][0]!r}", toks[i][1])
    return phi


def format_formula(phi: Formula) -> str:
    if isinstance(phi, Falsum):
        return "bot"
    if isinstance(phi, Atom):
        if not phi.args:
            return phi.pred
        return "(" + " ".join([phi.pred] + [f"v{a}" for a in phi.args]) + ")"
    if isinstance(phi, Eq):
        return f"(eq v{phi.left} v{phi.right})"
    if isinstance(phi, (And, Or, Implies)):
        return f"({BINARY[type(phi)]} {format_formula(phi.left)} {format_formula(phi.right)})"
    if isinstance(phi, (Forall, Exists)):
        return f"({QUANT[type(phi)]} v{phi.var} {format_formula(phi.body)})"
    raise TypeError(f"not a formula: {phi!r}")


def enumerate_formulas(sig: Signature, variables, max_depth: int):
    """All formulas over ``sig`` using ``variables`` up to ``max_depth``, level by level.

    Yields lists: level d holds the formulas of depth exactly d.  Grows very fast, so
    keep it to depth 2 or a tiny signature.
    """
    from itertools import product

    variables = tuple(variables)
    base = [BOT]
    for name, r in sig.predicates:
        base += [Atom(name, args) for args in product(variables, repeat=r)]
    if sig.with_equality:
        base += [Eq(a, b) for a in variables for b in variables]
    levels = [base]
    yield base
    for d in range(1, max_depth + 1):
        below = [f for lv in levels for f in lv]
        prev = levels[-1]
        new = []
        for cls in (And, Or, Implies):
            for l in below:
                for r in below:
                    if depth(l) == d - 1 or depth(r) == d - 1:
                        new.append(cls(l, r))
        for cls in (Forall, Exists):
            new += [cls(v, f) for v in variables for f in prev]
        levels.append(new)
        yield new
