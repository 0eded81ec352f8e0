"""Command-line front end: one subcommand per library operation, JSON
verdicts on stdout.

Exit codes: 0 the command ran (a "false" verdict included), 1 usage or
input error, 2 an enumeration budget was exceeded.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time

from . import calculus as calc
from . import consequence as cons
from . import heyting, kripke, language, matrix
from . import lindenbaum_tarski as lt

EXIT_OK, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


# --------------------------------------------------------------------------
# input helpers

def _formula(text, what="--formula"):
    if text is None:
        raise UsageError(f"{what} is required")
    try:
        return language.parse(text)
    except language.ParseError as e:
        raise UsageError(f"cannot parse {what}: {e}") from None


def _read_text(arg):
    if arg is not None and os.path.isfile(arg):
        with open(arg, encoding="utf-8") as fh:
            return fh.read()
    return arg


def _premises(arg):
    """A JSON list, a file holding one, or formulas separated by ';' or
    newlines."""
    text = _read_text(arg)
    if text is None or not text.strip():
        return []
    text = text.strip()
    if text.startswith("["):
        items = json.loads(text)
    else:
        items = [s for s in text.replace("\n", ";").split(";") if s.strip()]
    return [_formula(s.strip(), "--premises") for s in items]


def _matrix(arg):
    if arg is None:
        raise UsageError("--matrix is required")
    if os.path.isfile(arg):
        with open(arg, encoding="utf-8") as fh:
            return matrix.matrix_from_json(json.load(fh))
    try:
        return matrix.builtin(arg)
    except (KeyError, ValueError) as e:
        raise UsageError(f"unknown matrix {arg!r}; builtins: {', '.join(matrix.BUILTIN_NAMES)}") from e


def _calculus(arg):
    try:
        return calc.builtin_calculus(arg or "hilbert_cl")
    except (KeyError, ValueError) as e:
        raise UsageError(str(e)) from None


def _json_arg(arg, what):
    text = _read_text(arg)
    if text is None:
        raise UsageError(f"{what} is required")
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise UsageError(f"{what} is not valid JSON: {e}") from None


def _valuation(text):
    out = {}
    for part in (text or "").split(","):
        if part.strip():
            k, _, v = part.partition("=")
            out[k.strip()] = v.strip()
    return out


# --------------------------------------------------------------------------
# commands; each returns (payload, witness, evaluations, dot-or-None)

def cmd_parse(a):
    f = _formula(a.formula)
    tree = language.build_tree(f)
    payload = {"formula": language.to_infix(f), "prefix": language.to_prefix(f),
               "ascii": language.to_ascii(f), "json": language.to_json(f),
               "degree": language.degree(f), "variables": language.sorted_vars(language.variables(f)),
               "tree": [[n, language.to_infix(g)] for n, g in tree.pairs()]}
    return payload, None, None, tree.to_dot()


def cmd_eval(a):
    m = _matrix(a.matrix)
    f = _formula(a.formula)
    v = _valuation(a.valuation)
    try:
        val = matrix.evaluate(m, v, f)
    except (KeyError, matrix.SignatureMismatch) as e:
        raise UsageError(str(e)) from None
    return {"value": val, "designated": m.is_designated(val)}, None, 1, None


def cmd_valid(a):
    m = _matrix(a.matrix)
    v = matrix.check_validity(m, _formula(a.formula), a.budget)
    return {"valid": v.valid}, v.witness, v.evaluations, None


def cmd_conseq(a):
    m = _matrix(a.matrix)
    v = matrix.check_consequence(m, _premises(a.premises), _formula(a.formula), a.budget)
    return {"valid": v.valid}, v.witness, v.evaluations, None


def cmd_lc_valid(a):
    r = matrix.lc_check(_formula(a.formula), a.budget)
    return {"valid": r["valid"], "via": r["via"]}, r["witness"], r["evaluations"], None


def cmd_derive_check(a):
    c = _calculus(a.calculus)
    d = calc.Derivation.from_json(_json_arg(a.proof, "--proof"))
    goal = _formula(a.formula) if a.formula else None
    r = calc.check_derivation(c, d, goal)
    return dict(r.to_json(), steps=len(d), calculus=c.name), None, None, None


_EXAMPLES = {
    "conj": lambda: calc.conj_intro_confirmation(language.Var("p"), language.Var("q")),
    "excluded-middle": lambda: calc.excluded_middle_confirmation(language.Var("p")),
    "ax8": lambda: calc.disjunction_elim_confirmation(language.Var("p"), language.Var("q"),
                                                       language.Var("r")),
}


def cmd_confirm3_check(a):
    if a.example:
        conf = _EXAMPLES[a.example]()
    else:
        conf = calc.Confirmation.from_json(_json_arg(a.proof, "--proof"))
    r = calc.check_confirmation(conf)
    payload = dict(r.to_json(), formula=language.to_infix(conf.formula), nodes=len(conf.nodes()))
    if a.example:
        payload["confirmation"] = conf.to_json()
    return payload, None, None, None


def cmd_search(a):
    c = _calculus(a.calculus)
    X = _premises(a.premises)
    goal = _formula(a.formula)
    r = calc.bounded_search(c, X, goal, max_steps=a.max_steps, max_degree=a.max_degree)
    if r:
        return {"found": True, "steps": len(r), "binding_degree": calc.max_binding_degree(c, r),
                "derivation": r.to_json()}, None, None, None
    return r.to_json(), None, None, None


def cmd_horn(a):
    c = _calculus(a.calculus)
    rules = [c.rule(a.rule)] if a.rule else list(c.rules)
    return {"calculus": c.name, "horn": {r.name: calc.rule_to_horn(r) for r in rules}}, None, None, None


def cmd_cn_lab(a):
    n = a.size
    out = {"size": n}
    if n <= 3:
        bad, count = [], 0
        for fam in cons.closure_systems(n):
            cs = cons.FiniteClosureSystem(tuple(range(n)), fam)
            ax = cons.check_operator_axioms(cons.ExtensionalOperator.from_closure_system(cs))
            count += 1
            if not all(ax[k] for k in ("a", "b", "c")):
                bad.append(sorted(fam))
        out["closure_systems"] = {"count": count, "a_b_c_fail": bad}
    samples = a.samples if n == 3 else None
    r = cons.verify_con_connections(n, samples=samples, seed=a.seed)
    out["connections"] = r.to_json()
    return out, None, None, None


def cmd_lt_cl(a):
    try:
        q = lt.lt_classical(a.rank)
    except lt.BadRank as e:
        raise UsageError(str(e)) from None
    payload = q.to_json()
    if a.formula:
        f = _formula(a.formula)
        payload["class_of"] = q.classes[lt.class_of(q, f)].name
    return payload, None, None, q.to_dot()


def cmd_rn(a):
    if a.formula:
        f = _formula(a.formula)
        r = kripke.rn_classify(f, a.worlds)
        if isinstance(r, kripke.Unresolved):
            return {"class": None, "unresolved": r.reason,
                    "candidates": [kripke.rn_name(c) for c in r.candidates]}, None, None, None
        return {"class": kripke.rn_name(r)}, None, None, None
    try:
        q = lt.rn_lattice(a.count, a.worlds)
    except lt.BadRank as e:
        raise UsageError(str(e)) from None
    payload = q.to_json()
    if a.count == 12:
        payload["figure"] = lt.figure_check(q, a.worlds)
    return payload, None, None, q.to_dot()


def cmd_countermodel(a):
    f = _formula(a.formula)
    if not 1 <= a.worlds <= 7:
        raise UsageError("--worlds must be between 1 and 7")
    r = kripke.int_countermodel(f, a.worlds, a.budget)
    if r is None:
        return {"found": False, "max_worlds": a.worlds}, None, None, None
    model, world = r
    return ({"found": True, "world": world, "worlds": model.frame.size},
            model.to_json(), None, model.to_dot(world))


def cmd_tree_assemble(a):
    if a.pairs is None and a.formula is None:
        raise UsageError("give --pairs (JSON list of [id, formula]) or --formula")
    if a.pairs is None:
        f = _formula(a.formula)
        pairs = language.build_tree(f).pairs()
    else:
        raw = _json_arg(a.pairs, "--pairs")
        pairs = [(int(n), _formula(s, "--pairs")) for n, s in raw]
    try:
        t = language.assemble_tree(pairs)
    except language.NotATree as e:
        return {"tree": False, "reason": str(e)}, None, None, None
    return ({"tree": True, "formula": language.to_infix(t.nodes[t.root]),
             "nodes": [[n, language.to_infix(g)] for n, g in t.pairs()],
             "edges": [list(e) for e in t.edges]}, None, None, t.to_dot())


_POSETS = {"chain": heyting.FinitePoset.chain, "antichain": heyting.FinitePoset.antichain}


def cmd_identities(a):
    if a.poset:
        kind, _, size = a.poset.partition(":")
        if kind == "fork":
            p = heyting.FinitePoset.fork()
        elif kind in _POSETS and size.isdigit():
            p = _POSETS[kind](int(size))
        else:
            raise UsageError("--poset is chain:N, antichain:N or fork")
        alg = heyting.upset_algebra(p)
    else:
        alg = _matrix(a.matrix).algebra
    suites = a.suite.split(",") if a.suite else list(heyting.HEYTING_SUITES)
    unknown = [s for s in suites if s not in heyting.SUITES]
    if unknown:
        raise UsageError(f"unknown suite(s) {unknown}; known: {sorted(heyting.SUITES)}")
    rep = heyting.check_identities(alg, suites)
    return ({"algebra": alg.name, "all_hold": heyting.all_pass(rep), "report": rep},
            None, None, heyting.algebra_dot(alg) if "∧" in alg.ops else None)


COMMANDS = {
    "parse": cmd_parse, "eval": cmd_eval, "valid": cmd_valid, "conseq": cmd_conseq,
    "lc-valid": cmd_lc_valid, "derive-check": cmd_derive_check,
    "confirm3-check": cmd_confirm3_check, "search": cmd_search, "horn": cmd_horn,
    "cn-lab": cmd_cn_lab, "lt-cl": cmd_lt_cl, "rn": cmd_rn, "countermodel": cmd_countermodel,
    "tree-assemble": cmd_tree_assemble, "identities": cmd_identities,
}


def build_parser():
    p = _Parser(prog="sentential", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    def add(name, help_, *flags):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("--json", action="store_true", help="JSON verdict (the default)")
        sp.add_argument("--dot", action="store_true", help="print a DOT diagram instead")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--budget", type=int, default=matrix.DEFAULT_BUDGET)
        sp.add_argument("--threads", type=int, default=1)
        sp.add_argument("--timing", action="store_true", help="add elapsed seconds to stats")
        for f in flags:
            if f == "formula":
                sp.add_argument("--formula")
            elif f == "matrix":
                sp.add_argument("--matrix")
            elif f == "premises":
                sp.add_argument("--premises")
            elif f == "calculus":
                sp.add_argument("--calculus", default="hilbert_cl")
            elif f == "proof":
                sp.add_argument("--proof")
        return sp

    add("parse", "parse and print a formula", "formula")
    sp = add("eval", "value of a formula under a valuation", "matrix", "formula")
    sp.add_argument("--valuation", help="p=1,q=0")
    add("valid", "validity in a matrix", "matrix", "formula")
    add("conseq", "matrix consequence", "matrix", "premises", "formula")
    add("lc-valid", "validity in every Gödel chain", "formula")
    add("derive-check", "check a derivation", "calculus", "proof", "formula")
    sp = add("confirm3-check", "check a hyperrule confirmation", "proof")
    sp.add_argument("--example", choices=sorted(_EXAMPLES))
    sp = add("search", "bounded proof search", "calculus", "premises", "formula")
    sp.add_argument("--max-steps", type=int, default=40)
    sp.add_argument("--max-degree", type=int, default=None)
    sp = add("horn", "rules as Horn sentences", "calculus")
    sp.add_argument("--rule")
    sp = add("cn-lab", "consequence operator experiments")
    sp.add_argument("--size", type=int, default=2, choices=(1, 2, 3))
    sp.add_argument("--samples", type=int, default=100000)
    sp = add("lt-cl", "free Boolean algebra of a rank", "formula")
    sp.add_argument("--rank", type=int, default=1)
    sp = add("rn", "Rieger–Nishimura prefix or classification", "formula")
    sp.add_argument("--count", type=int, default=12)
    sp.add_argument("--worlds", type=int, default=lt.RN_WORLDS)
    sp = add("countermodel", "Kripke countermodel search", "formula")
    sp.add_argument("--worlds", type=int, default=6)
    sp = add("tree-assemble", "rebuild a formula tree from (id, formula) pairs", "formula")
    sp.add_argument("--pairs")
    sp = add("identities", "identity suites on a finite algebra", "matrix")
    sp.add_argument("--poset", help="chain:N, antichain:N or fork (its up-set algebra)")
    sp.add_argument("--suite", help="comma separated suite names")
    return p


def _echo(args):
    skip = {"command", "json", "dot", "timing"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip and v is not None}


def run(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if not args.command:
            raise UsageError("a subcommand is required")
    except UsageError as e:
        print(f"sentential: {e}", file=sys.stderr)
        return EXIT_USAGE
    t0 = time.perf_counter()
    verdict = {"command": args.command, "input": _echo(args)}
    code = EXIT_OK
    dot = None
    try:
        payload, witness, evals, dot = COMMANDS[args.command](args)
        verdict.update(payload)
        verdict["witness"] = witness
        stats = {"evaluations": evals}
    except UsageError as e:
        print(f"sentential: {e}", file=sys.stderr)
        verdict["error"] = {"kind": "usage", "message": str(e)}
        verdict["witness"] = None
        stats = {"evaluations": None}
        code = EXIT_USAGE
    except matrix.BudgetExceeded as e:
        verdict["error"] = {"kind": "budget", "message": str(e)}
        verdict["witness"] = None
        stats = {"evaluations": None}
        code = EXIT_BUDGET
    except (ValueError, KeyError) as e:
        # module errors reached with well-formed flags
        verdict["error"] = {"kind": type(e).__name__, "message": str(e)}
        verdict["witness"] = None
        stats = {"evaluations": None}
        code = EXIT_USAGE
    if args.timing:
        stats["elapsed"] = round(time.perf_counter() - t0, 6)
    verdict["stats"] = stats
    verdict["seed"] = args.seed
    if args.dot and code == EXIT_OK:
        if dot is None:
            print(f"sentential: {args.command} has no diagram", file=sys.stderr)
            return EXIT_USAGE
        print(dot, file=out)
    else:
        print(json.dumps(verdict, ensure_ascii=False, indent=1, default=_default), file=out)
    return code


def _default(o):
    if hasattr(o, "tolist"):
        return o.tolist()
    if hasattr(o, "item"):
        return o.item()
    if isinstance(o, (set, frozenset)):
        return sorted(o)
    raise TypeError(f"not serializable: {type(o).__name__}")


def main(argv=None):
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
