"""Command-line entry point.

Exit codes: 0 for a positive verdict, 1 for a negative one (unsatisfied,
countermodel found, proof rejected, suite failure), 2 for usage and input errors.
Every subcommand takes ``--json`` for one sorted JSON record per result.
"""
from __future__ import annotations

import argparse
import json
import random
import sys

from . import __version__
from .calculus import ProofError, check_proof, load_proof
from .kripke import ModelError, find_countermodel, load_model, parse_assignment, satisfies, validate_model
from .syntax import FormulaError, all_vars, depth, format_formula, free_vars, parse_formula
from .transform import (check_rich, check_strongly_rich, format_transformation, parse_transformation,
                        replacement, transposition)

ALIASES = {
    "algebra-axioms": ["algebra", "axioms"],
    "algebra-interpolate": ["algebra", "interpolate"],
    "semigroup-check": ["semigroup", "check-rich"],
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _emit(args, record: dict, human: str, out):
    if args.json:
        out.write(json.dumps(record, sort_keys=True, ensure_ascii=False) + "\n")
    else:
        out.write(human.rstrip("\n") + "\n")


def _formula(text, what="formula"):
    try:
        return parse_formula(text)
    except FormulaError as e:
        raise UsageError(f"{what}: {e}") from None


def _formulas(text):
    return [_formula(t) for t in (text or "").split(";") if t.strip()]


# ---------------------------------------------------------------- commands

def _model(path):
    M = load_model(path)
    rep = validate_model(M)
    if not rep.ok:
        v = rep.violations[0]
        raise ModelError(f"{path}: {v['violation']} fails at {', '.join(v.get('worlds', []))}")
    return M


def cmd_parse(args, out):
    phi = _formula(args.formula)
    rec = {"formula": format_formula(phi), "free": sorted(free_vars(phi)),
           "variables": sorted(all_vars(phi)), "depth": depth(phi)}
    _emit(args, rec, f"{rec['formula']}\nfree: {rec['free']}  depth: {rec['depth']}", out)
    return 0


def cmd_eval(args, out):
    M = _model(args.model)
    phi = _formula(args.formula)
    s = parse_assignment(args.assign or "", M, args.world, phi)
    ok = satisfies(M, args.world, phi, s)
    rec = {"formula": format_formula(phi), "world": args.world, "assignment": list(s), "satisfied": ok}
    word = "satisfied" if ok else "not satisfied"
    _emit(args, rec, f"{args.world} {'⊨' if ok else '⊭'} {rec['formula']} [{', '.join(s)}]: {word}", out)
    return 0 if ok else 1


def cmd_countermodel(args, out):
    phi = _formula(args.formula)
    r = find_countermodel(phi, args.max_worlds, args.max_domain, args.dims, limit=args.limit)
    rec = dict(r.as_dict(), formula=format_formula(phi))
    if r.found:
        human = (f"countermodel at {r.world} with assignment {list(r.assignment)} "
                 f"after {r.searched} models\n{rec['model']}")
    else:
        human = f"no countermodel: {r.verdict} ({r.searched} models)"
    _emit(args, rec, human, out)
    return 1 if r.found else 0


def cmd_check_proof(args, out):
    try:
        P = load_proof(args.file)
    except OSError as e:
        raise UsageError(str(e)) from None
    except ProofError as e:
        _emit(args, {"accepted": False, "error": e.as_dict()}, f"rejected: {e}", out)
        return 2
    try:
        f = check_proof(P)
    except ProofError as e:
        _emit(args, {"accepted": False, "error": e.as_dict()}, f"rejected: {e}", out)
        return 1
    rec = {"accepted": True, "conclusion": format_formula(f), "steps": len(P.steps),
           "premises": len(P.premises)}
    _emit(args, rec, f"accepted ({len(P.steps)} steps): {rec['conclusion']}", out)
    return 0


def _algebra_for(args, **kw):
    from .algebra import SetAlgebra
    M = _model(args.system)
    if args.dims is not None and args.dims != M.system.dims:
        raise UsageError(f"--dims {args.dims} does not match the system's dims {M.system.dims}")
    return M, SetAlgebra.full(M.system, **kw)


def cmd_algebra_axioms(args, out):
    from .algebra import axiom_suite
    _, A = _algebra_for(args)
    rep = axiom_suite(A, trials=args.trials, seed=args.seed)
    rec = dict(rep.as_dict(), seed=args.seed)
    _emit(args, rec, rep.table() + f"\n{'all schemas pass' if rep.ok else 'FAILURES'}", out)
    return 0 if rep.ok else 1


def cmd_algebra_interpolate(args, out):
    from .algebra import element_of, interpolant_search
    M, A = _algebra_for(args)
    X1 = [element_of(M, f) for f in _formulas(args.x1)]
    X2 = [element_of(M, f) for f in _formulas(args.x2)]
    a, b = element_of(M, _formula(args.a, "--a")), element_of(M, _formula(args.b, "--b"))
    r = interpolant_search(A, X1, X2, a, b, cap=args.cap, check_generated=True)
    rec = r.as_dict()
    human = (f"interpolant {rec['c']} (least in a common subalgebra of {r.common_size} elements)"
             if r.found else f"no interpolant in the common subalgebra; least element above a is {rec['least']}")
    _emit(args, rec, human, out)
    return 0 if r.found else 1


def cmd_semigroup(args, out):
    sigma, pi = parse_transformation(args.sigma), parse_transformation(args.pi)
    strong = check_strongly_rich(sigma, pi, args.nmax)
    sample = [replacement(i, j) for i in range(args.sample) for j in range(args.sample) if i != j]
    sample += [transposition(i, j) for i in range(args.sample) for j in range(i + 1, args.sample)]
    rich = check_rich(sigma, pi, sample)
    ok = strong.ok and rich.rich
    rec = {"sigma": format_transformation(sigma), "pi": format_transformation(pi), "nmax": args.nmax,
           "ok": ok, "strongly_rich": strong.as_dict(), "rich": rich.as_dict()}
    lines = [f"σ: {rec['sigma']}", f"π: {rec['pi']}",
             f"rich on {len(sample)} sample maps: {rich.rich}",
             f"strongly rich for n ≤ {args.nmax}: {strong.ok}"]
    lines += [f"  {f}" for f in strong.failures[:5] + rich.failures[:5]]
    _emit(args, rec, "\n".join(lines), out)
    return 0 if ok else 1


def cmd_dilate(args, out):
    from .algebra import ReplacementAlgebra, dilate, element_of, generated
    M, A = _algebra_for(args, subst_kind="replacements")
    B = generated(A, [element_of(M, f) for f in _formulas(args.gen)], cap=args.cap)
    D = dilate(ReplacementAlgebra.from_set_algebra(B))
    rep = D.verify()
    rec = dict(rep.as_dict(), carrier=len(B.elements()), classes=D.nclasses, fresh=D.fresh)
    human = (f"carrier {rec['carrier']}, {D.nclasses} classes, fresh index {D.fresh}\n"
             f"equivalence {rep.equivalence}, h injective {rep.h_injective}, "
             f"c_fresh∘h = h {rep.fresh_fixes_image}, preservation failures {len(rep.preservation_failures)}\n"
             f"{'dilation verified' if rep.ok else 'dilation FAILED'}")
    _emit(args, rec, human, out)
    return 0 if rep.ok else 1


# ------------------------------------------------------------------ parser

def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="polyheyting", description="Kripke semantics, polyadic Heyting algebras and proofs.")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="cmd", required=True, parser_class=_Parser)

    def common(q, seeded=False):
        q.add_argument("--json", action="store_true", help="one JSON record per result")
        if seeded:
            q.add_argument("--seed", type=int, default=0)
            q.add_argument("--trials", type=int, default=20)

    q = sub.add_parser("parse", help="parse and normalise a formula")
    q.add_argument("formula")
    common(q)
    q.set_defaults(fn=cmd_parse)

    q = sub.add_parser("eval", help="evaluate a formula at a world")
    q.add_argument("--model", required=True)
    q.add_argument("--formula", required=True)
    q.add_argument("--world", required=True)
    q.add_argument("--assign", default="")
    common(q)
    q.set_defaults(fn=cmd_eval)

    q = sub.add_parser("countermodel", help="search finite models for a countermodel")
    q.add_argument("--formula", required=True)
    q.add_argument("--max-worlds", type=int, default=3)
    q.add_argument("--max-domain", type=int, default=2)
    q.add_argument("--dims", type=int, default=None)
    q.add_argument("--limit", type=int, default=None, help="stop after this many models")
    common(q)
    q.set_defaults(fn=cmd_countermodel)

    q = sub.add_parser("check-proof", help="check a .prf proof file")
    q.add_argument("file")
    common(q)
    q.set_defaults(fn=cmd_check_proof)

    alg = sub.add_parser("algebra", help="set algebra suites").add_subparsers(dest="sub", required=True,
                                                                             parser_class=_Parser)
    q = alg.add_parser("axioms", help="random instances of every equational schema")
    q.add_argument("--system", required=True)
    q.add_argument("--dims", type=int, default=None)
    common(q, seeded=True)
    q.set_defaults(fn=cmd_algebra_axioms)

    q = alg.add_parser("interpolate", help="least interpolant in Sg(X1∩X2); elements are formulas")
    q.add_argument("--system", required=True)
    q.add_argument("--x1", required=True, help="';'-separated formulas")
    q.add_argument("--x2", required=True, help="';'-separated formulas")
    q.add_argument("--a", required=True)
    q.add_argument("--b", required=True)
    q.add_argument("--dims", type=int, default=None)
    q.add_argument("--cap", type=int, default=4096)
    common(q)
    q.set_defaults(fn=cmd_algebra_interpolate)

    sg = sub.add_parser("semigroup", help="transformation semigroups").add_subparsers(dest="sub", required=True,
                                                                                       parser_class=_Parser)
    q = sg.add_parser("check-rich", help="richness and strong richness of (σ, π)")
    q.add_argument("--sigma", default="suc")
    q.add_argument("--pi", default="pred")
    q.add_argument("--nmax", type=int, default=50)
    q.add_argument("--sample", type=int, default=4, help="replacements and transpositions below this index")
    common(q)
    q.set_defaults(fn=cmd_semigroup)

    q = sub.add_parser("dilate", help="dilate the subalgebra generated by formulas")
    q.add_argument("--system", required=True)
    q.add_argument("--gen", default="", help="';'-separated generator formulas")
    q.add_argument("--dims", type=int, default=None)
    q.add_argument("--cap", type=int, default=4096)
    common(q)
    q.set_defaults(fn=cmd_dilate)
    return p


def run(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    argv = list(sys.argv[1:] if argv is None else argv)
    if argv and argv[0] in ALIASES:
        argv = ALIASES[argv[0]] + argv[1:]
    try:
        args = build_parser().parse_args(argv)
        return args.fn(args, out)
    except UsageError as e:
        err.write(f"error: {e}\n")
        return 2
    except (ModelError, FormulaError, ValueError, OSError) as e:
        err.write(f"error: {e}\n")
        return 2
    except SystemExit as e:   # --help and --version
        return int(e.code or 0)


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
