"""Structural rules, Hilbert-style derivations and their checker, the
three-type confirmation system with the hyperrules c-i..c-iii, built-in
calculi, soundness checks against matrices, proof search, Horn rendering and
the Γ* demonstration."""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from typing import Mapping


from .language import (App, Formula, Iff, Imp, MVar, Not, Var, degree, metavariables, parse,
                       to_infix)
from .matrix import BadParameter, Matrix, check_consequence, evaluate, godel
from .substitution import instantiate, match_all

A, B, G = MVar("𝛂"), MVar("𝛃"), MVar("𝛄")


class BadName(KeyError):
    pass


def _mf(text):
    return parse(text, metavars=True)


@dataclass(frozen=True)
class StructuralRule:
    name: str
    premises: tuple       # ordered metaformulas
    conclusion: Formula

    @property
    def metavariables(self):
        out = set(metavariables(self.conclusion))
        for p in self.premises:
            out |= metavariables(p)
        return sorted(out)

    def instance(self, inst: Mapping):
        return [instantiate(p, inst) for p in self.premises], instantiate(self.conclusion, inst)

    def __str__(self):
        prem = ", ".join(to_infix(p) for p in self.premises)
        return f"{self.name}: {prem} / {to_infix(self.conclusion)}" if prem else \
            f"{self.name}: / {to_infix(self.conclusion)}"


def axiom(name, text):
    return StructuralRule(name, (), _mf(text))


AXIOMS = {
    "ax1": axiom("ax1", "𝛂→(𝛃→𝛂)"),
    "ax2": axiom("ax2", "(𝛂→𝛃)→((𝛂→(𝛃→𝛄))→(𝛂→𝛄))"),
    "ax3": axiom("ax3", "𝛂→(𝛃→(𝛂∧𝛃))"),
    "ax4": axiom("ax4", "(𝛂∧𝛃)→𝛂"),
    "ax5": axiom("ax5", "(𝛂∧𝛃)→𝛃"),
    "ax6": axiom("ax6", "𝛂→(𝛂∨𝛃)"),
    "ax7": axiom("ax7", "𝛃→(𝛂∨𝛃)"),
    "ax8": axiom("ax8", "(𝛂→𝛄)→((𝛃→𝛄)→((𝛂∨𝛃)→𝛄))"),
    "ax9": axiom("ax9", "(𝛂→𝛃)→((𝛂→¬𝛃)→¬𝛂)"),
    "ax10": axiom("ax10", "¬¬𝛂→𝛂"),
    "ax11": axiom("ax11", "𝛃→(¬𝛃→𝛂)"),
    "ax12": axiom("ax12", "(𝛂→𝛃)∨(𝛃→𝛂)"),
}

MP = StructuralRule("MP", (A, Imp(A, B)), B)

ND_RULES = (
    StructuralRule("a-i", (A, B), _mf("𝛂∧𝛃")),
    StructuralRule("a-ii", (A,), _mf("𝛂∨𝛃")),
    StructuralRule("a-iii", (B,), _mf("𝛂∨𝛃")),
    StructuralRule("a-iv", (A,), _mf("¬¬𝛂")),
    StructuralRule("b-i", (_mf("𝛂∧𝛃"),), A),
    StructuralRule("b-ii", (_mf("𝛂∧𝛃"),), B),
    StructuralRule("b-iii", (A, Imp(A, B)), B),
    StructuralRule("b-iv", (_mf("¬¬𝛂"),), A),
)

# modus ponens answers to either name
_ALIASES = {"b-iii": "MP", "MP": "b-iii"}


@dataclass(frozen=True)
class Calculus:
    rules: tuple
    name: str = ""

    def __post_init__(self):
        names = [r.name for r in self.rules]
        if len(set(names)) != len(names):
            raise ValueError("rule names must be distinct")

    def rule(self, name) -> StructuralRule:
        for r in self.rules:
            if r.name == name:
                return r
        alt = _ALIASES.get(name)
        for r in self.rules:
            if r.name == alt:
                return r
        raise BadName(name)

    def has(self, name) -> bool:
        try:
            self.rule(name)
            return True
        except BadName:
            return False

    @property
    def axioms(self):
        return [r for r in self.rules if not r.premises]

    def __len__(self):
        return len(self.rules)


def _hilbert(name, axes):
    return Calculus(tuple(AXIOMS[a] for a in axes) + (MP,), name)


_P = ["ax1", "ax2", "ax3", "ax4", "ax5", "ax6", "ax7", "ax8"]
CALCULI = {
    "hilbert_p": lambda: _hilbert("hilbert_p", _P),
    "hilbert_int": lambda: _hilbert("hilbert_int", _P + ["ax9", "ax11"]),
    "hilbert_cl": lambda: _hilbert("hilbert_cl", _P + ["ax9", "ax10"]),
    "hilbert_lc": lambda: _hilbert("hilbert_lc", _P + ["ax9", "ax11", "ax12"]),
    "nd_rules": lambda: Calculus(ND_RULES, "nd_rules"),
}


def builtin_calculus(name: str) -> Calculus:
    try:
        return CALCULI[name]()
    except KeyError:
        raise BadName(f"unknown calculus {name!r}; known: {', '.join(CALCULI)}") from None


# --------------------------------------------------------------------------
# derivations

@dataclass(frozen=True)
class Premise:
    def to_json(self):
        return "Premise"


@dataclass(frozen=True)
class RuleApp:
    rule: str
    cites: tuple = ()
    inst: Mapping | None = None

    def to_json(self):
        out = {"rule": self.rule, "from": list(self.cites)}
        if self.inst is not None:
            out["inst"] = {k: to_infix(v) for k, v in sorted(self.inst.items())}
        return out


@dataclass(frozen=True)
class Derivation:
    premises: frozenset
    steps: tuple          # of (Formula, Premise | RuleApp)

    def __len__(self):
        return len(self.steps)

    @property
    def conclusion(self):
        return self.steps[-1][0] if self.steps else None

    def to_json(self):
        return {"premises": sorted(to_infix(p) for p in self.premises),
                "steps": [{"formula": to_infix(f), "by": j.to_json()} for f, j in self.steps]}

    @classmethod
    def from_json(cls, obj):
        if isinstance(obj, str):
            obj = json.loads(obj)
        prem = frozenset(parse(p) for p in obj.get("premises", []))
        steps = []
        for s in obj["steps"]:
            f = parse(s["formula"])
            by = s["by"]
            if by == "Premise":
                steps.append((f, Premise()))
            else:
                inst = by.get("inst")
                if inst is not None:
                    inst = {k: parse(v) for k, v in inst.items()}
                steps.append((f, RuleApp(by["rule"], tuple(by.get("from", ())), inst)))
        return cls(prem, tuple(steps))

    def pretty(self):
        lines = []
        for i, (f, j) in enumerate(self.steps):
            if isinstance(j, Premise):
                why = "premise"
            else:
                why = j.rule + (" " + ",".join(str(c + 1) for c in j.cites) if j.cites else "")
            lines.append(f"{i + 1:>3}. {to_infix(f)}   [{why}]")
        return "\n".join(lines)


@dataclass(frozen=True)
class Verified:
    def __bool__(self):
        return True

    def to_json(self):
        return {"verified": True}


@dataclass(frozen=True)
class FirstFailure:
    step: object
    reason: str

    def __bool__(self):
        return False

    def to_json(self):
        return {"verified": False, "step": self.step, "reason": self.reason}


def check_step(c: Calculus, d: Derivation, i: int):
    """None when step i is justified, else the reason it is not."""
    f, j = d.steps[i]
    if isinstance(j, Premise):
        return None if f in d.premises else "not a premise"
    try:
        r = c.rule(j.rule)
    except BadName:
        return f"unknown rule {j.rule}"
    if any(not isinstance(k, int) or k < 0 or k >= i for k in j.cites):
        return "ordering: cites a step that does not precede it"
    if len(j.cites) != len(r.premises):
        return f"{r.name} takes {len(r.premises)} premise(s), {len(j.cites)} cited"
    if j.inst is not None:
        try:
            prem, concl = r.instance(j.inst)
        except KeyError:
            return "instantiation leaves a metavariable unbound"
        if concl != f or any(p != d.steps[k][0] for p, k in zip(prem, j.cites)):
            return "recorded instantiation does not fit"
        return None
    pairs = [(p, d.steps[k][0]) for p, k in zip(r.premises, j.cites)] + [(r.conclusion, f)]
    if match_all(pairs) is None:
        return f"not an instance of {r.name}"
    return None


def check_derivation(c: Calculus, d: Derivation, goal: Formula | None = None):
    if not d.steps:
        return FirstFailure(0, "empty derivation")
    for i in range(len(d.steps)):
        why = check_step(c, d, i)
        if why:
            return FirstFailure(i, why)
    if goal is not None and d.steps[-1][0] != goal:
        return FirstFailure(len(d.steps) - 1, "last step is not the goal")
    return Verified()


def max_binding_degree(c: Calculus, d: Derivation) -> int:
    """Largest degree of a formula bound to a metavariable of an axiom
    instance. Bindings of rules with premises are fixed by the cited lines,
    so only axiom instances carry free choices."""
    top = 0
    for i, (f, j) in enumerate(d.steps):
        if isinstance(j, RuleApp) and not c.rule(j.rule).premises:
            inst = j.inst
            if inst is None:
                r = c.rule(j.rule)
                inst = match_all([(p, d.steps[k][0]) for p, k in zip(r.premises, j.cites)]
                                 + [(r.conclusion, f)]) or {}
            top = max([top] + [degree(v) for v in inst.values()])
    return top


# --------------------------------------------------------------------------
# confirmations (the hyperrule system)

@dataclass(frozen=True)
class Type1:
    derivation: Derivation


@dataclass(frozen=True)
class Type2:
    rule: str            # c-i, c-ii, c-iii
    children: tuple


@dataclass(frozen=True)
class Type3:
    children: tuple
    derivation: Derivation


@dataclass(frozen=True)
class Confirmation:
    premises: frozenset
    formula: Formula
    by: object

    def children(self):
        return getattr(self.by, "children", ())

    def nodes(self):
        """Post-order list of (path, node)."""
        out = []

        def go(n, path):
            for k, ch in enumerate(n.children()):
                go(ch, path + (k,))
            out.append((path, n))
        go(self, ())
        return out

    def to_json(self):
        by = self.by
        if isinstance(by, Type1):
            j = {"type": 1, "derivation": by.derivation.to_json()}
        elif isinstance(by, Type2):
            j = {"type": 2, "rule": by.rule, "children": [ch.to_json() for ch in by.children]}
        else:
            j = {"type": 3, "children": [ch.to_json() for ch in by.children],
                 "derivation": by.derivation.to_json()}
        return {"premises": sorted(to_infix(p) for p in self.premises),
                "formula": to_infix(self.formula), "by": j}

    @classmethod
    def from_json(cls, obj):
        if isinstance(obj, str):
            obj = json.loads(obj)
        prem = frozenset(parse(p) for p in obj.get("premises", []))
        f = parse(obj["formula"])
        by = obj["by"]
        t = by["type"]
        if t == 1:
            b = Type1(Derivation.from_json(by["derivation"]))
        elif t == 2:
            b = Type2(by["rule"], tuple(cls.from_json(ch) for ch in by["children"]))
        elif t == 3:
            b = Type3(tuple(cls.from_json(ch) for ch in by["children"]),
                      Derivation.from_json(by["derivation"]))
        else:
            raise ValueError(f"unknown confirmation type {t}")
        return cls(prem, f, b)

    def widen(self, extra):
        """The same confirmation with every premise set enlarged."""
        extra = frozenset(extra)
        by = self.by
        if isinstance(by, Type1):
            nb = Type1(Derivation(by.derivation.premises | extra, by.derivation.steps))
        elif isinstance(by, Type2):
            nb = Type2(by.rule, tuple(ch.widen(extra) for ch in by.children))
        else:
            nb = Type3(tuple(ch.widen(extra) for ch in by.children),
                       Derivation(by.derivation.premises | extra, by.derivation.steps))
        return Confirmation(self.premises | extra, self.formula, nb)


def _hyper_ok(node: Confirmation):
    rule, kids = node.by.rule, node.by.children
    X, f = node.premises, node.formula
    if rule == "c-i":
        if len(kids) != 1:
            return "c-i takes one premise sequent"
        if not (type(f) is App and f.op == "→"):
            return "c-i concludes an implication"
        a, b = f.args
        k = kids[0]
        if k.formula != b or k.premises != X | {a}:
            return "c-i premise must be X,α ⊢ β"
        return None
    if rule == "c-ii":
        if len(kids) != 2:
            return "c-ii takes two premise sequents"
        if not (type(f) is App and f.op == "¬"):
            return "c-ii concludes a negation"
        a = f.args[0]
        k1, k2 = kids
        if k1.premises != X | {a} or k2.premises != X | {a}:
            return "c-ii premises must be X,α ⊢ β and X,α ⊢ ¬β"
        if k2.formula != Not(k1.formula):
            return "c-ii second premise must derive the negation of the first"
        return None
    if rule == "c-iii":
        if len(kids) != 2:
            return "c-iii takes two premise sequents"
        k1, k2 = kids
        if k1.formula != f or k2.formula != f:
            return "c-iii premises must derive the conclusion's formula"
        for d in X:
            if type(d) is App and d.op == "∨":
                rest = X - {d}
                a, b = d.args
                if k1.premises == rest | {a} and k2.premises == rest | {b}:
                    return None
        return "c-iii needs X,α∨β in the conclusion and X,α / X,β in the premises"
    return f"unknown hyperrule {rule}"


def check_confirmation(conf: Confirmation, rules: Calculus | None = None):
    """Post-order check; embedded derivations use the rules (a)-(b) unless
    another calculus is given. Failures name the node by its child path."""
    rules = rules or builtin_calculus("nd_rules")
    for path, node in conf.nodes():
        by = node.by
        if isinstance(by, Type1):
            d = by.derivation
            if d.premises != node.premises:
                return FirstFailure(list(path), "derivation premises differ from the sequent")
            r = check_derivation(rules, d, node.formula)
            if not r:
                return FirstFailure(list(path), f"step {r.step}: {r.reason}")
        elif isinstance(by, Type2):
            why = _hyper_ok(node)
            if why:
                return FirstFailure(list(path), why)
        elif isinstance(by, Type3):
            if any(ch.premises != node.premises for ch in by.children):
                return FirstFailure(list(path), "type 3 children must share the premise set")
            want = node.premises | {ch.formula for ch in by.children}
            d = by.derivation
            if d.premises != want:
                return FirstFailure(list(path), "derivation premises must be X plus the confirmed formulas")
            r = check_derivation(rules, d, node.formula)
            if not r:
                return FirstFailure(list(path), f"step {r.step}: {r.reason}")
        else:
            return FirstFailure(list(path), "unknown justification")
    return Verified()


def _deriv(premises, *steps):
    return Derivation(frozenset(premises), tuple(steps))


def _P1():
    return Premise()


def conj_intro_confirmation(a: Formula, b: Formula) -> Confirmation:
    """⊢ α→(β→(α∧β)) from {α,β} ⊢ α∧β by c-i twice."""
    leaf = Confirmation(frozenset({a, b}), App("∧", (a, b)),
                        Type1(_deriv({a, b}, (a, Premise()), (b, Premise()),
                                     (App("∧", (a, b)), RuleApp("a-i", (0, 1))))))
    mid = Confirmation(frozenset({a}), Imp(b, App("∧", (a, b))), Type2("c-i", (leaf,)))
    return Confirmation(frozenset(), Imp(a, Imp(b, App("∧", (a, b)))), Type2("c-i", (mid,)))


def excluded_middle_confirmation(a: Formula) -> Confirmation:
    """⊢ α∨¬α via two uses of c-ii and a final type-3 step."""
    em = App("∨", (a, Not(a)))
    h = Not(em)
    X1 = frozenset({h, a})
    s1 = Confirmation(X1, em, Type1(_deriv(X1, (a, Premise()), (em, RuleApp("a-ii", (0,))))))
    s2 = Confirmation(X1, h, Type1(_deriv(X1, (h, Premise()))))
    s3 = Confirmation(frozenset({h}), Not(a), Type2("c-ii", (s1, s2)))
    X2 = frozenset({h, Not(a)})
    s4a = Confirmation(X2, em, Type1(_deriv(X2, (Not(a), Premise()), (em, RuleApp("a-iii", (0,))))))
    s4b = Confirmation(X2, h, Type1(_deriv(X2, (h, Premise()))))
    s4 = Confirmation(frozenset({h}), Not(Not(a)), Type2("c-ii", (s4a, s4b)))
    s5 = Confirmation(frozenset(), Not(h), Type2("c-ii", (s3, s4)))
    s6 = Confirmation(frozenset(), em,
                      Type3((s5,), _deriv({Not(h)}, (Not(h), Premise()), (em, RuleApp("b-iv", (0,))))))
    return s6


def disjunction_elim_confirmation(a: Formula, b: Formula, c: Formula) -> Confirmation:
    """⊢ (α→γ)→((β→γ)→((α∨β)→γ)) by c-iii then c-i three times."""
    ag, bg, ab = Imp(a, c), Imp(b, c), App("∨", (a, b))
    base = frozenset({ag, bg})
    l1 = Confirmation(base | {a}, c, Type1(_deriv(base | {a}, (a, Premise()), (ag, Premise()),
                                                  (c, RuleApp("b-iii", (0, 1))))))
    l2 = Confirmation(base | {b}, c, Type1(_deriv(base | {b}, (b, Premise()), (bg, Premise()),
                                                  (c, RuleApp("b-iii", (0, 1))))))
    s2 = Confirmation(base | {ab}, c, Type2("c-iii", (l1, l2)))
    s3 = Confirmation(base, Imp(ab, c), Type2("c-i", (s2,)))
    s4 = Confirmation(frozenset({ag}), Imp(bg, Imp(ab, c)), Type2("c-i", (s3,)))
    return Confirmation(frozenset(), Imp(ag, Imp(bg, Imp(ab, c))), Type2("c-i", (s4,)))


# --------------------------------------------------------------------------
# soundness against a matrix

_STAND_INS = ["p", "q", "r", "s", "t", "u", "v", "w"]


def _as_formulas(rule: StructuralRule):
    mvs = rule.metavariables
    sub = {m: Var(_STAND_INS[k]) for k, m in enumerate(mvs)}
    prem, concl = rule.instance(sub)
    return prem, concl, {_STAND_INS[k]: m for k, m in enumerate(mvs)}


def soundness_check(c: Calculus, m, budget: int = 10**7) -> dict:
    """Designated-preservation of every rule: exhaustive over all
    assignments of matrix elements to the rule's metavariables."""
    ms = m if isinstance(m, (list, tuple)) else [m]
    report = {"calculus": c.name, "rules": []}
    for r in c.rules:
        prem, concl, back = _as_formulas(r)
        entry = {"rule": r.name, "sound": True, "witness": None}
        for mm in ms:
            v = check_consequence(mm, prem, concl, budget)
            if not v.valid:
                entry["sound"] = False
                entry["witness"] = {back[k]: val for k, val in v.witness.items() if k in back}
                entry["matrix"] = mm.algebra.name
                break
        report["rules"].append(entry)
    report["sound"] = all(e["sound"] for e in report["rules"])
    return report


def rule_sound(r: StructuralRule, m: Matrix, budget: int = 10**7):
    prem, concl, back = _as_formulas(r)
    v = check_consequence(m, prem, concl, budget)
    return v.valid, None if v.valid else {back[k]: val for k, val in v.witness.items() if k in back}


# --------------------------------------------------------------------------
# Horn rendering

_FO = ["x", "y", "z", "u", "v", "w"]


def rule_to_horn(r: StructuralRule) -> str:
    mvs = r.metavariables
    names = {m: (_FO[k] if k < len(_FO) else f"x{k}") for k, m in enumerate(mvs)}
    sub = {m: Var(n) for m, n in names.items()}
    prem, concl = r.instance(sub)
    prefix = "".join(f"∀{names[m]}" for m in mvs)

    def d(f):
        # D(...) already brackets its argument
        s = to_infix(f)
        if isinstance(f, App) and len(f.args) == 2:
            s = s[1:-1]
        return f"D({s})"
    head = d(concl)
    if prem:
        body = " & ".join(d(p) for p in prem)
        if len(prem) > 1:
            body = f"({body})"
        return f"{prefix}({body} ⇒ {head})"
    return f"{prefix} {head}" if prefix else head


# --------------------------------------------------------------------------
# Γ* at finite scale

def gamma_star_pairs(m: int):
    """First m index pairs 0 < i < j, ordered by j then i."""
    out = []
    for j in itertools.count(2):
        for i in range(1, j):
            out.append((i, j))
            if len(out) == m:
                return out


def gamma_star_premises(pairs):
    p0 = Var("p0")
    return [Imp(Iff(Var(f"p{i}"), Var(f"p{j}")), p0) for i, j in pairs]


def gamma_star_demo(m: int, contrast: bool = True) -> dict:
    """Refute p0 from the first m premises of Γ* in godel(m+3) with the
    valuation p0 = the element just below the top and pairwise distinct
    values elsewhere; optionally confirm that in godel(m+2) the full pair set
    over m+3 indices does entail p0 (pigeonhole)."""
    if not isinstance(m, int) or m < 1:
        raise BadParameter("m must be a positive integer")
    pairs = gamma_star_pairs(m)
    prem = gamma_star_premises(pairs)
    g = godel(m + 3)
    els = g.algebra.elements
    idx = sorted({i for pr in pairs for i in pr})
    v = {"p0": els[-2]}
    for k, i in enumerate(idx):
        v[f"p{i}"] = els[k]
    designated = all(g.is_designated(evaluate(g, v, f)) for f in prem)
    p0_val = evaluate(g, v, Var("p0"))
    out = {"m": m, "matrix": g.algebra.name,
           "premises": [to_infix(f) for f in prem],
           "valuation": v,
           "refutes": bool(designated and not g.is_designated(p0_val))}
    if contrast:
        n = m + 2
        full = [(i, j) for j in range(2, m + 4) for i in range(1, j)]
        c = check_consequence(godel(n), gamma_star_premises(full), Var("p0"))
        out["contrast"] = {"matrix": f"G{n}", "indices": m + 3, "premises": len(full),
                           "entails": c.valid, "evaluations": c.evaluations}
    return out


# --------------------------------------------------------------------------
# proof search

from .prover import NotFound, bounded_search  # noqa: E402,F401  (re-export)
