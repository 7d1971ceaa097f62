"""Self-maps of ω in eventual-shift normal form, and richness checks.

A :class:`Transformation` is ``n ↦ prefix[n]`` below ``N = len(prefix)`` and
``n ↦ n + shift`` from ``N`` on.  The normal form keeps ``N`` minimal.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Optional


@dataclass(frozen=True)
class Transformation:
    prefix: tuple = ()
    shift: int = 0

    def __post_init__(self):
        prefix = tuple(int(x) for x in self.prefix)
        k = int(self.shift)
        if any(x < 0 for x in prefix):
            raise ValueError(f"negative value in prefix {prefix}")
        n = len(prefix)
        if n + k < 0:
            raise ValueError(f"shift {k} sends {n} below zero; prefix too short")
        lo = max(0, -k)
        while n > lo and prefix[n - 1] == n - 1 + k:
            n -= 1
        object.__setattr__(self, "prefix", prefix[:n])
        object.__setattr__(self, "shift", k)

    @classmethod
    def from_map(cls, mapping: dict, shift: int = 0):
        """Build from a finite dict; points not mentioned follow ``n + shift``."""
        n = max([max(0, -shift)] + [i + 1 for i in mapping])
        return cls(tuple(mapping.get(i, i + shift) for i in range(n)), shift)

    @property
    def N(self):
        return len(self.prefix)

    def __call__(self, n: int) -> int:
        if n < 0:
            raise ValueError("transformations act on non-negative integers")
        return self.prefix[n] if n < len(self.prefix) else n + self.shift

    def __matmul__(self, other):
        return compose(self, other)

    def table(self, window: int) -> tuple:
        return tuple(self(i) for i in range(window))

    def is_finite(self) -> bool:
        return self.shift == 0

    def is_injective(self) -> bool:
        vals = list(self.prefix)
        if len(set(vals)) != len(vals):
            return False
        tail_start = self.N + self.shift
        return all(v < tail_start for v in vals)

    def range_complement(self) -> frozenset:
        """ω ∖ Rg(τ), which is finite for every eventual shift."""
        bound = self.N + self.shift
        return frozenset(range(max(bound, 0))) - set(self.prefix)

    def __str__(self):
        return format_transformation(self)


ID = Transformation()
SUC = Transformation((), 1)
PRED = Transformation((0,), -1)


def compose(f: Transformation, g: Transformation) -> Transformation:
    """(f∘g)(n) = f(g(n))."""
    n = max(g.N, f.N - g.shift, 0)
    return Transformation(tuple(f(g(i)) for i in range(n)), f.shift + g.shift)


def power(f: Transformation, n: int) -> Transformation:
    out = ID
    for _ in range(n):
        out = compose(f, out)
    return out


def support(t: Transformation) -> Optional[frozenset]:
    """Exact support for finite transformations, ``None`` standing for an infinite one."""
    if t.shift != 0:
        return None
    return frozenset(i for i, v in enumerate(t.prefix) if v != i)


def replacement(i: int, j: int) -> Transformation:
    """[i|j]: send i to j, fix everything else."""
    return Transformation.from_map({i: j})


def transposition(i: int, j: int) -> Transformation:
    return Transformation.from_map({i: j, j: i})


def update(t: Transformation, i: int, j: int) -> Transformation:
    """t[i|j]: agrees with t except that i goes to j."""
    n = max(t.N, i + 1)
    return Transformation(tuple(j if x == i else t(x) for x in range(n)), t.shift)


def update_identity_on(t: Transformation, points: Iterable[int]) -> Transformation:
    """t[P|Id]: identity on the finite set P, t elsewhere."""
    pts = set(points)
    n = max([t.N] + [p + 1 for p in pts])
    return Transformation(tuple(x if x in pts else t(x) for x in range(n)), t.shift)


def finite_from_window(table: Iterable[int]) -> Transformation:
    """A map on [0, n) extended by the identity."""
    return Transformation(tuple(table), 0)


# ------------------------------------------------------------------ text form

_TEXT = re.compile(r"\s*shift\s*=\s*(-?\d+)\s*;\s*prefix\s*=\s*\[(.*)\]\s*\Z")
_PAIR = re.compile(r"\(\s*(\d+)\s*,\s*(\d+)\s*\)")
_REPL = re.compile(r"\s*\[\s*(\d+)\s*([|,])\s*(\d+)\s*\]\s*\Z")


def format_transformation(t: Transformation) -> str:
    pairs = ",".join(f"({i},{v})" for i, v in enumerate(t.prefix))
    return f"shift={t.shift}; prefix=[{pairs}]"


def parse_transformation(text: str) -> Transformation:
    """Accepts the ``shift=..; prefix=[..]`` form, ``id``, ``suc``, ``pred``, ``[i|j]`` and ``[i,j]``.

    Names may be raised to a power: ``suc^3``.
    """
    s = text.strip()
    m = re.fullmatch(r"(id|suc|pred)(?:\^(\d+))?", s)
    if m:
        base = {"id": ID, "suc": SUC, "pred": PRED}[m.group(1)]
        return power(base, int(m.group(2) or 1))
    m = _REPL.match(s)
    if m:
        i, j = int(m.group(1)), int(m.group(3))
        return replacement(i, j) if m.group(2) == "|" else transposition(i, j)
    m = _TEXT.match(s)
    if not m:
        raise ValueError(f"cannot parse transformation {text!r}")
    shift = int(m.group(1))
    body = m.group(2)
    pairs = _PAIR.findall(body)
    if _PAIR.sub("", body).replace(",", "").strip():
        raise ValueError(f"malformed prefix in {text!r}")
    mapping = {}
    for a, b in pairs:
        a, b = int(a), int(b)
        if a in mapping and mapping[a] != b:
            raise ValueError(f"point {a} listed twice")
        mapping[a] = b
    return Transformation.from_map(mapping, shift)


# ------------------------------------------------------------------ semigroups

@dataclass(frozen=True)
class SemigroupSpec:
    """Which transformations count as members.

    kind is ``"finite"`` (all finitely supported maps), ``"window"`` (maps of
    [0, n) into itself, identity beyond) or ``"rich"`` (generated by sigma, pi
    and ``gens``, plus every finite map when ``with_finite`` is set).
    """

    kind: str
    n: int = 0
    sigma: Optional[Transformation] = None
    pi: Optional[Transformation] = None
    gens: tuple = ()
    with_finite: bool = True

    def __post_init__(self):
        if self.kind not in ("finite", "window", "rich"):
            raise ValueError(f"unknown semigroup kind {self.kind!r}")
        if self.kind == "rich":
            if self.sigma is None or self.pi is None:
                raise ValueError("rich semigroup needs sigma and pi")
            if compose(self.pi, self.sigma) != ID:
                raise ValueError("pi∘sigma must be the identity")
            if not self.sigma.range_complement():
                raise ValueError("Rg sigma must not be all of ω")

    @classmethod
    def finite(cls):
        return cls("finite")

    @classmethod
    def window(cls, n):
        return cls("window", n=n)

    @classmethod
    def rich(cls, sigma, pi, gens=(), with_finite=True):
        return cls("rich", sigma=sigma, pi=pi, gens=tuple(gens), with_finite=with_finite)

    def generators(self):
        if self.kind != "rich":
            return ()
        return (self.sigma, self.pi) + tuple(self.gens)

    def contains(self, t: Transformation, depth: int = 6) -> Optional[bool]:
        """True or False when decided, ``None`` when undecided by words of length ≤ depth."""
        if self.kind == "finite":
            return t.shift == 0
        if self.kind == "window":
            return t.shift == 0 and t.N <= self.n and all(v < self.n for v in t.prefix)
        if t.shift == 0 and self.with_finite:
            return True
        for w in _words(self.generators(), depth):
            if w == t:
                return True
            if self.with_finite and (_left_finite_factor(t, w) or _right_finite_factor(t, w)):
                return True
        return None


def _words(gens, depth):
    """Distinct compositions of 1..depth generators, breadth first."""
    seen = set()
    frontier = []
    for g in gens:
        if g not in seen:
            seen.add(g)
            frontier.append(g)
            yield g
    for _ in range(depth - 1):
        nxt = []
        for w in frontier:
            for g in gens:
                c = compose(w, g)
                if c not in seen:
                    seen.add(c)
                    nxt.append(c)
                    yield c
        frontier = nxt


def _window_for(t, w):
    vals = list(t.prefix) + list(w.prefix) + [0]
    return max(t.N, w.N) + max(vals) + abs(t.shift) + abs(w.shift) + 2


def _left_finite_factor(t, w) -> Optional[Transformation]:
    """A finite f with f∘w = t, if one exists."""
    if t.shift != w.shift:
        return None
    W = _window_for(t, w)
    f = {}
    for n in range(W):
        a = w(n)
        if f.setdefault(a, t(n)) != t(n):
            return None
    cand = Transformation.from_map(f)
    return cand if compose(cand, w) == t else None


def _right_finite_factor(t, w) -> Optional[Transformation]:
    """A finite g with w∘g = t, if one exists."""
    if t.shift != w.shift:
        return None
    W = _window_for(t, w)
    inv = {}
    for n in range(W + max(0, -w.shift) + max(t.prefix, default=0) + 2):
        inv.setdefault(w(n), n)
    g = {}
    for n in range(W):
        if t(n) not in inv:
            return None
        g[n] = inv[t(n)]
    cand = Transformation.from_map(g)
    return cand if compose(w, cand) == t else None


# ------------------------------------------------------------------ richness

@dataclass
class RichReport:
    rich: bool
    condition1: bool
    condition2: Optional[bool]
    failures: list = field(default_factory=list)
    unknown: list = field(default_factory=list)
    depth: int = 0
    checked: int = 0

    def as_dict(self):
        return {
            "rich": self.rich,
            "condition1": self.condition1,
            "condition2": self.condition2,
            "failures": self.failures,
            "unknown": self.unknown,
            "depth": self.depth,
            "checked": self.checked,
        }


def rich_image(sigma: Transformation, tau: Transformation, pi: Transformation) -> Transformation:
    """(σ∘τ∘π)[(ω∖Rgσ)|Id]."""
    return update_identity_on(compose(sigma, compose(tau, pi)), sigma.range_complement())


def check_rich(sigma, pi, sample, semigroup: Optional[SemigroupSpec] = None, depth: int = 6) -> RichReport:
    """Check both richness conditions, the second on ``sample``.

    Undecided memberships land in ``unknown`` with the depth that was tried.
    """
    if semigroup is None:
        semigroup = SemigroupSpec("rich", sigma=sigma, pi=pi) if _pair_ok(sigma, pi) else SemigroupSpec.finite()
    failures, unknown = [], []
    c1 = True
    if compose(pi, sigma) != ID:
        c1 = False
        failures.append({"condition": 1, "reason": "π∘σ=Id fails", "witness": str(compose(pi, sigma))})
    if not sigma.range_complement():
        c1 = False
        failures.append({"condition": 1, "reason": "Rgσ≠ω fails", "witness": str(sigma)})
    for name, g in (("sigma", sigma), ("pi", pi)):
        m = semigroup.contains(g, depth)
        if m is False:
            c1 = False
            failures.append({"condition": 1, "reason": f"{name} not in T", "witness": str(g)})
        elif m is None:
            unknown.append({"element": str(g), "reason": f"unknown at depth {depth}"})
    c2 = True
    for tau in sample:
        img = rich_image(sigma, tau, pi)
        m = semigroup.contains(img, depth)
        if m is False:
            c2 = False
            failures.append({"condition": 2, "tau": str(tau), "image": str(img)})
        elif m is None:
            unknown.append({"tau": str(tau), "image": str(img), "reason": f"unknown at depth {depth}"})
    if unknown and c2:
        c2 = None
    return RichReport(rich=bool(c1 and c2), condition1=c1, condition2=c2,
                      failures=failures, unknown=unknown, depth=depth, checked=len(sample))


def _pair_ok(sigma, pi):
    return compose(pi, sigma) == ID and bool(sigma.range_complement())


@dataclass
class StrongRichReport:
    ok: bool
    precondition: bool
    rows: list = field(default_factory=list)
    failures: list = field(default_factory=list)

    def as_dict(self):
        return {"ok": self.ok, "precondition": self.precondition,
                "rows": self.rows, "failures": self.failures}


def check_strongly_rich(sigma: Transformation, pi: Transformation, n_max: int) -> StrongRichReport:
    """For n ≤ n_max: σⁿ∘πⁿ has finite support lying outside Rng(σⁿ)."""
    failures = []
    if compose(pi, sigma) != ID:
        return StrongRichReport(False, False, [], [{"reason": "π∘σ=Id fails"}])
    if not sigma.range_complement():
        return StrongRichReport(False, False, [], [{"reason": "Rgσ≠ω fails"}])
    rows = []
    sn, pn = ID, ID
    for n in range(n_max + 1):
        rho = compose(sn, pn)
        supp = support(rho)
        outside = sn.range_complement()
        row = {"n": n, "support": None if supp is None else sorted(supp), "outside_range": sorted(outside)}
        if supp is None:
            failures.append({"n": n, "reason": "support infinite"})
        elif not supp <= outside:
            failures.append({"n": n, "reason": "support meets Rng(σⁿ)", "witness": sorted(supp - outside)})
        rows.append(row)
        sn, pn = compose(sigma, sn), compose(pn, pi)
    return StrongRichReport(not failures, True, rows, failures)
