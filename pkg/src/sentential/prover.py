"""Proof search producing checked Hilbert-style derivations.

Two engines:

* a goal-directed natural-deduction prover whose proof terms are compiled
  to Hilbert lines by bracket abstraction over the axioms ax1/ax2 (the
  deduction theorem made constructive).  Tactics are enabled only when the
  axioms they compile to belong to the calculus; with ax9 and ax10 present
  the prover is classically complete (refutation with case cuts).
* a small forward search that instantiates rules over the subformulas of the
  problem; used for calculi without a deduction theorem and for tiny goals.

Every result is re-verified by check_derivation before it is returned.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .language import App, Formula, Imp, Not, degree, subformulas, to_infix
from .matrix import b2, godel, matrix_consequence
from .substitution import instantiate, match_all, match_instance


@dataclass
class NotFound:
    reason: str

    def __bool__(self):
        return False

    def to_json(self):
        return {"found": False, "reason": self.reason}


# --------------------------------------------------------------------------
# proof terms: DAGs of premises, hypotheses, axiom instances and MP

class Term:
    __slots__ = ("kind", "formula", "f", "g", "free", "rule", "inst", "_size", "_cost")

    def __init__(self, kind, formula, f=None, g=None, free=frozenset(), rule=None, inst=None):
        self.kind = kind
        self.formula = formula
        self.f = f
        self.g = g
        self.free = free
        self.rule = rule
        self.inst = inst
        self._size = None
        self._cost = None

    def size(self):
        """Number of distinct formulas needed (an upper bound on lines)."""
        if self._size is None:
            seen = set()
            stack = [self]
            while stack:
                t = stack.pop()
                if t.formula in seen:
                    continue
                seen.add(t.formula)
                if t.kind == "mp":
                    stack.append(t.f)
                    stack.append(t.g)
            self._size = len(seen)
        return self._size

    def cost(self):
        """Estimated line count after compilation: every step still depending
        on k open hypotheses roughly triples per abstraction."""
        if self._cost is None:
            seen = set()
            total = 0
            stack = [self]
            while stack:
                t = stack.pop()
                key = (t.formula, t.free)
                if key in seen:
                    continue
                seen.add(key)
                total += 3 ** len(t.free) if t.kind != "hyp" else 1
                if t.kind == "mp":
                    stack.append(t.f)
                    stack.append(t.g)
            self._cost = total
        return self._cost


def _hyp(a):
    return Term("hyp", a, free=frozenset({a}))


def _prem(a):
    return Term("prem", a)


def _neg(f):
    return type(f) is App and f.op == "¬"


def _is(f, op):
    return type(f) is App and f.op == op


class _Kit:
    """Term builders for one calculus."""

    def __init__(self, calculus):
        self.c = calculus
        self.ax = {r.name: r for r in calculus.axioms}
        self.mp = calculus.has("MP")
        self.dt = self.mp and "ax1" in self.ax and "ax2" in self.ax
        self.classical = self.dt and "ax9" in self.ax and "ax10" in self.ax
        self._abs = {}
        self._I = {}

    def has(self, *names):
        return all(n in self.ax for n in names)

    def axiom(self, name, **inst):
        r = self.ax[name]
        inst = {{"a": "𝛂", "b": "𝛃", "c": "𝛄"}[k]: v for k, v in inst.items()}
        return Term("ax", instantiate(r.conclusion, inst), rule=name, inst=inst)

    def app(self, f, g):
        """Modus ponens: f proves g→x, g proves g; result proves x."""
        fm = f.formula
        assert _is(fm, "→") and fm.args[0] == g.formula, (to_infix(fm), to_infix(g.formula))
        return Term("mp", fm.args[1], f, g, f.free | g.free)

    def as_axiom(self, formula):
        for name, r in self.ax.items():
            inst = match_instance(r.conclusion, formula)
            if inst is not None:
                return Term("ax", formula, rule=name, inst=inst)
        return None

    # ---- abstraction (deduction theorem)

    def I(self, a):
        t = self._I.get(a)
        if t is None:
            aa = Imp(a, a)
            s = self.axiom("ax2", a=a, b=aa, c=a)
            t = self.app(self.app(s, self.axiom("ax1", a=a, b=a)), self.axiom("ax1", a=a, b=aa))
            self._I[a] = t
        return t

    def lam(self, a, t):
        """Term proving a→t.formula with the hypothesis a discharged."""
        key = (a, id(t))
        hit = self._abs.get(key)
        if hit is not None and hit[0] is t:
            return hit[1]
        r = self._lam(a, t)
        self._abs[key] = (t, r)
        return r

    def _lam(self, a, t):
        target = Imp(a, t.formula)
        if a not in t.free:
            ax = self.as_axiom(target)
            if ax is not None:
                return ax
            return self.app(self.axiom("ax1", a=t.formula, b=a), t)
        if t.kind == "hyp":
            return self.I(a)
        ax = self.as_axiom(target)
        if ax is not None:
            return ax
        f, g = t.f, t.g
        if a not in f.free and g.kind == "hyp" and g.formula == a:
            return f
        c = g.formula
        s = self.axiom("ax2", a=a, b=c, c=t.formula)
        return self.app(self.app(s, self.lam(a, g)), self.lam(a, f))

    # ---- derived rules

    def conj(self, ta, tb):
        return self.app(self.app(self.axiom("ax3", a=ta.formula, b=tb.formula), ta), tb)

    def left(self, t):
        a, b = t.formula.args
        return self.app(self.axiom("ax4", a=a, b=b), t)

    def right(self, t):
        a, b = t.formula.args
        return self.app(self.axiom("ax5", a=a, b=b), t)

    def inl(self, ta, b):
        return self.app(self.axiom("ax6", a=ta.formula, b=b), ta)

    def inr(self, a, tb):
        return self.app(self.axiom("ax7", a=a, b=tb.formula), tb)

    def cases(self, tor, l1, l2):
        """From a∨b, a→c and b→c conclude c."""
        a, b = tor.formula.args
        c = l1.formula.args[1]
        s = self.axiom("ax8", a=a, b=b, c=c)
        return self.app(self.app(self.app(s, l1), l2), tor)

    def neg_intro(self, a, imp_b, imp_nb):
        """From a→b and a→¬b conclude ¬a."""
        b = imp_b.formula.args[1]
        s = self.axiom("ax9", a=a, b=b)
        return self.app(self.app(s, imp_b), imp_nb)

    def dne(self, t):
        return self.app(self.axiom("ax10", a=t.formula.args[0].args[0]), t)

    def exfalso(self, tb, tnb, goal):
        """From b and ¬b conclude goal, or None."""
        if self.has("ax11"):
            s = self.axiom("ax11", a=goal, b=tb.formula)
            return self.app(self.app(s, tb), tnb)
        if not self.has("ax9"):
            return None
        if _neg(goal):
            d = goal.args[0]
            return self.neg_intro(d, self.lam(d, tb), self.lam(d, tnb))
        if self.classical:
            ng = Not(goal)
            return self.dne(self.neg_intro(ng, self.lam(ng, tb), self.lam(ng, tnb)))
        return None


def _cheapest(ts):
    return min(ts, key=Term.cost) if ts else None


# --------------------------------------------------------------------------
# contexts

class _Ctx:
    __slots__ = ("facts", "done", "key")

    def __init__(self, facts, done=frozenset()):
        self.facts = facts
        self.done = done
        self.key = None

    def with_fact(self, f, t):
        if f in self.facts:
            return self
        d = dict(self.facts)
        d[f] = t
        return _Ctx(d, self.done)

    def k(self):
        if self.key is None:
            # open hypotheses matter: a cached term may only be reused where
            # the same formulas are still undischarged assumptions
            self.key = frozenset((f, t.free) for f, t in self.facts.items())
        return self.key


class _Prover:
    def __init__(self, calculus, max_depth=4, node_budget=20000):
        self.kit = _Kit(calculus)
        self.max_depth = max_depth
        self.node_budget = node_budget
        self.nodes = 0
        self.memo = {}
        self.sat_memo = {}

    # ---- forward saturation

    def saturate(self, ctx):
        hit = self.sat_memo.get(ctx.k())
        if hit is not None:
            return hit
        kit = self.kit
        facts = dict(ctx.facts)
        changed = True
        while changed:
            changed = False
            for f, t in list(facts.items()):
                new = []
                if _is(f, "∧") and kit.has("ax4", "ax5") and kit.mp:
                    new.append((f.args[0], lambda t=t: kit.left(t)))
                    new.append((f.args[1], lambda t=t: kit.right(t)))
                elif _is(f, "→") and kit.mp:
                    a, b = f.args
                    if a in facts:
                        new.append((b, lambda t=t, a=a: kit.app(t, facts[a])))
                elif _neg(f):
                    g = f.args[0]
                    if _neg(g) and kit.classical:
                        new.append((g.args[0], lambda t=t: kit.dne(t)))
                    if kit.dt and kit.has("ax9"):
                        if _is(g, "∨") and kit.has("ax6", "ax7"):
                            a, b = g.args
                            new.append((Not(a), lambda t=t, a=a, b=b, g=g: kit.neg_intro(
                                a, kit.axiom("ax6", a=a, b=b), kit.lam(a, t))))
                            new.append((Not(b), lambda t=t, a=a, b=b, g=g: kit.neg_intro(
                                b, kit.axiom("ax7", a=a, b=b), kit.lam(b, t))))
                        elif _is(g, "→"):
                            a, b = g.args
                            new.append((Not(b), lambda t=t, a=a, b=b: kit.neg_intro(
                                b, kit.axiom("ax1", a=b, b=a), kit.lam(b, t))))
                        elif _is(g, "∧") and kit.has("ax3"):
                            a, b = g.args
                            if a in facts:
                                new.append((Not(b), lambda t=t, a=a, b=b: kit.neg_intro(
                                    b, kit.app(kit.axiom("ax3", a=a, b=b), facts[a]), kit.lam(b, t))))
                            if b in facts:
                                new.append((Not(a), lambda t=t, a=a, b=b: kit.neg_intro(
                                    a, kit.lam(a, kit.conj(_hyp(a), facts[b])), kit.lam(a, t))))
                        # modus tollens: a→g with ¬g gives ¬a
                        for h in list(facts):
                            if _is(h, "→") and h.args[1] == g and Not(h.args[0]) not in facts:
                                a = h.args[0]
                                new.append((Not(a), lambda th=facts[h], a=a, t=t: kit.neg_intro(
                                    a, th, kit.lam(a, t))))
                for g, mk in new:
                    if g not in facts:
                        facts[g] = mk()
                        changed = True
        out = _Ctx(facts, ctx.done)
        self.sat_memo[ctx.k()] = out
        self.sat_memo[out.k()] = out
        return out

    def contradiction(self, ctx):
        best = None
        for f, t in ctx.facts.items():
            if _neg(f) and f.args[0] in ctx.facts:
                tb = ctx.facts[f.args[0]]
                cost = t.size() + tb.size()
                if best is None or cost < best[0]:
                    best = (cost, tb, t)
        return None if best is None else best[1:]

    def assume(self, ctx, a):
        if a in ctx.facts:
            return ctx
        return ctx.with_fact(a, _hyp(a))

    # ---- negation introduction from a hypothesis

    def refute_hyp(self, ctx, a, d):
        """Term for ¬a, assuming a and deriving a contradiction."""
        kit = self.kit
        c2 = self.saturate(self.assume(ctx, a))
        pair = self.contradiction(c2)
        if pair is not None:
            tb, tnb = pair
            return kit.neg_intro(a, kit.lam(a, tb), kit.lam(a, tnb))
        na = Not(a)
        t = self.prove(c2, na, d)
        if t is None:
            return None
        return kit.neg_intro(a, kit.I(a), kit.lam(a, t))

    # ---- main search

    def prove(self, ctx, goal, d):
        self.nodes += 1
        if self.nodes > self.node_budget:
            return None
        ctx = self.saturate(ctx)
        key = (ctx.k(), goal, d)
        if key in self.memo:
            return self.memo[key]
        self.memo[key] = None   # cycle guard
        t = self._prove(ctx, goal, d)
        self.memo[key] = t
        return t

    def _prove(self, ctx, goal, d):
        """Cheapest term found for goal (by estimated compiled cost)."""
        kit = self.kit
        facts = ctx.facts
        if goal in facts:
            return facts[goal]
        cands = []
        pair = self.contradiction(ctx)
        if pair is not None:
            t = kit.exfalso(pair[0], pair[1], goal)
            if t is not None:
                cands.append(t)
        # invertible introductions
        if _is(goal, "→") and kit.dt:
            a, b = goal.args
            t = self.prove(self.assume(ctx, a), b, d)
            if t is not None:
                cands.append(kit.lam(a, t))
            return _cheapest(cands)
        if _is(goal, "∧") and kit.has("ax3"):
            ta = self.prove(ctx, goal.args[0], d)
            tb = None if ta is None else self.prove(ctx, goal.args[1], d)
            if tb is not None:
                cands.append(kit.conj(ta, tb))
            return _cheapest(cands)
        if _neg(goal) and kit.dt and kit.has("ax9") and goal.args[0] not in facts:
            t = self.refute_hyp(ctx, goal.args[0], d)
            if t is not None:
                cands.append(t)
            return _cheapest(cands)
        if d <= 0:
            if _is(goal, "∨") and kit.has("ax6", "ax7"):
                a, b = goal.args
                if a in facts:
                    cands.append(kit.inl(facts[a], b))
                if b in facts:
                    cands.append(kit.inr(a, facts[b]))
            return _cheapest(cands)
        # disjunction goals
        if _is(goal, "∨") and kit.has("ax6", "ax7"):
            a, b = goal.args
            ta = self.prove(ctx, a, d - 1)
            if ta is not None:
                cands.append(kit.inl(ta, b))
            tb = self.prove(ctx, b, d - 1)
            if tb is not None:
                cands.append(kit.inr(a, tb))
        # eliminate disjunction facts
        if kit.dt and kit.has("ax8"):
            for f in list(facts):
                if _is(f, "∨") and f.args[0] not in facts and f.args[1] not in facts:
                    a, b = f.args
                    t1 = self.prove(self.assume(ctx, a), goal, d - 1)
                    if t1 is None:
                        continue
                    t2 = self.prove(self.assume(ctx, b), goal, d - 1)
                    if t2 is None:
                        continue
                    cands.append(kit.cases(facts[f], kit.lam(a, t1), kit.lam(b, t2)))
        # use implications whose antecedent is provable
        if kit.mp:
            for f in list(facts):
                if _is(f, "→") and f.args[1] not in facts and f.args[0] != goal:
                    ta = self.prove(ctx, f.args[0], d - 1)
                    if ta is not None:
                        t = self.prove(ctx.with_fact(f.args[1], kit.app(facts[f], ta)), goal, d)
                        if t is not None:
                            cands.append(t)
        # contradict a negated fact
        for f in list(facts):
            if _neg(f) and f.args[0] != goal and not _neg(f.args[0]) and f.args[0] not in facts:
                tx = self.prove(ctx, f.args[0], d - 1)
                if tx is not None:
                    t = kit.exfalso(tx, facts[f], goal)
                    if t is not None:
                        cands.append(t)
        if not kit.classical:
            return _cheapest(cands)
        ng = Not(goal)
        if ng not in facts:
            # classical refutation
            c2 = self.saturate(self.assume(ctx, ng))
            pair = self.contradiction(c2)
            if pair is not None:
                cands.append(kit.dne(kit.neg_intro(ng, kit.lam(ng, pair[0]), kit.lam(ng, pair[1]))))
            t = self.prove(c2, goal, d - 1)
            if t is not None:
                cands.append(kit.dne(kit.neg_intro(ng, kit.lam(ng, t), kit.I(ng))))
            return _cheapest(cands)
        # refutation mode: cut on a formula whose truth would unlock a fact
        for cut in self._cuts(ctx):
            t = self.prove(self.assume(ctx, cut), goal, d - 1)
            if t is None:
                continue
            # cut→goal with ¬goal gives ¬cut
            tn = kit.neg_intro(cut, kit.lam(cut, t), kit.lam(cut, facts[ng]))
            t2 = self.prove(ctx.with_fact(Not(cut), tn), goal, d)
            if t2 is not None:
                cands.append(t2)
        return _cheapest(cands)

    def _cuts(self, ctx):
        facts = ctx.facts
        out = []
        for f in facts:
            if _is(f, "→"):
                a, b = f.args
                if b not in facts and a not in facts and Not(a) not in facts:
                    out.append(a)
            elif _neg(f):
                g = f.args[0]
                if _is(g, "∧"):
                    a, b = g.args
                    if a not in facts and Not(a) not in facts and Not(b) not in facts:
                        out.append(a)
                elif _is(g, "→"):
                    a = g.args[0]
                    if a not in facts and Not(a) not in facts:
                        out.append(Not(a))
        seen, res = set(), []
        for c in out:
            if c not in seen:
                seen.add(c)
                res.append(c)
        res.sort(key=degree)
        return res


# --------------------------------------------------------------------------
# compilation of closed terms to derivation steps

def compile_term(t: Term, premises):
    from .calculus import Derivation, Premise, RuleApp
    line = {}
    steps = []

    def emit(u):
        stack = [(u, False)]
        while stack:
            v, ready = stack.pop()
            if v.formula in line:
                continue
            if v.kind == "mp" and not ready:
                stack.append((v, True))
                stack.append((v.g, False))
                stack.append((v.f, False))
                continue
            if v.kind == "prem":
                j = Premise()
            elif v.kind == "ax":
                j = RuleApp(v.rule, (), dict(v.inst))
            elif v.kind == "mp":
                a = v.g.formula
                j = RuleApp("MP", (line[a], line[v.f.formula]), {"𝛂": a, "𝛃": v.formula})
            else:
                raise ValueError("open hypothesis left in a proof term")
            line[v.formula] = len(steps)
            steps.append((v.formula, j))
    emit(t)
    return _prune(Derivation(frozenset(premises), tuple(steps)))


def _prune(d):
    """Drop steps the last one does not depend on, renumbering citations."""
    from .calculus import Derivation, RuleApp
    n = len(d.steps)
    need = [False] * n
    need[n - 1] = True
    for i in range(n - 1, -1, -1):
        if need[i] and isinstance(d.steps[i][1], RuleApp):
            for k in d.steps[i][1].cites:
                need[k] = True
    new_index, steps = {}, []
    for i, (f, j) in enumerate(d.steps):
        if not need[i]:
            continue
        new_index[i] = len(steps)
        if isinstance(j, RuleApp):
            j = RuleApp(j.rule, tuple(new_index[k] for k in j.cites), j.inst)
        steps.append((f, j))
    return Derivation(d.premises, tuple(steps))


# --------------------------------------------------------------------------
# forward search over subformula instances

def forward_search(c, X, goal, max_steps=40, max_degree=None, rounds=6):
    """Saturate the premises under the rules, binding unconstrained
    metavariables to subformulas of the problem and keeping only conclusions
    among those subformulas (plus their implications for the axiom
    schemata).  Returns a Derivation or None."""
    from .calculus import Derivation, Premise, RuleApp
    X = list(X)
    universe = set(subformulas(goal))
    for x in X:
        universe |= subformulas(x)
    if max_degree is not None:
        universe = {u for u in universe if degree(u) <= max_degree}
    atoms = sorted(universe, key=lambda u: (degree(u), to_infix(u)))
    # derived: formula -> (size, justification, premises formulas)
    best = {x: (1, Premise(), ()) for x in X}
    rules = list(c.rules)
    for _ in range(rounds):
        added = False
        for r in rules:
            for f, inst, prem in _rule_apps(r, best, atoms, max_degree):
                if not r.premises and f not in universe and not _useful_axiom(f, universe):
                    continue
                if r.premises and f not in universe:
                    continue
                size = 1 + sum(best[p][0] for p in prem)
                if f not in best or best[f][0] > size:
                    best[f] = (size, (r.name, inst), prem)
                    added = True
        if goal in best or not added:
            break
    if goal not in best:
        return None
    order, seen = [], set()

    def visit(f):
        if f in seen:
            return
        seen.add(f)
        for p in best[f][2]:
            visit(p)
        order.append(f)
    visit(goal)
    index = {f: i for i, f in enumerate(order)}
    steps = []
    for f in order:
        _, j, prem = best[f]
        if isinstance(j, Premise):
            steps.append((f, j))
        else:
            steps.append((f, RuleApp(j[0], tuple(index[p] for p in prem), j[1])))
    d = Derivation(frozenset(X), tuple(steps))
    return d if len(d) <= max_steps else None


def _useful_axiom(f, universe):
    # an axiom instance is worth keeping if detaching its antecedents can
    # reach the universe
    g = f
    while _is(g, "→"):
        g = g.args[1]
        if g in universe:
            return True
    return False


def _rule_apps(r, best, atoms, max_degree):
    known = list(best)
    mvs = r.metavariables
    if not r.premises:
        import itertools
        for combo in itertools.product(atoms, repeat=len(mvs)):
            inst = dict(zip(mvs, combo))
            yield instantiate(r.conclusion, inst), inst, ()
        return
    import itertools
    for prem in itertools.product(known, repeat=len(r.premises)):
        inst = match_all(list(zip(r.premises, prem)))
        if inst is None:
            continue
        free = [m for m in mvs if m not in inst]
        for combo in itertools.product(atoms, repeat=len(free)):
            full = dict(inst, **dict(zip(free, combo)))
            if max_degree is not None and any(degree(v) > max_degree for v in full.values()):
                continue
            yield instantiate(r.conclusion, full), full, prem


# --------------------------------------------------------------------------
# entry point

DEFAULT_STEPS = 40
DEGREE_SLACK = 4


def _refuted(c, X, goal):
    """True when a matrix for which every rule is sound separates X from
    goal, so no search can succeed."""
    for m in _reference_matrices():
        if _sound_for(c, m) and not matrix_consequence(m, X, goal):
            return m.algebra.name
    return None


@lru_cache(maxsize=None)
def _reference_matrices():
    return (b2(), godel(3))


_SOUND = {}


def _sound_for(c, m):
    from .calculus import soundness_check
    key = (c.rules, m.algebra.name)
    if key not in _SOUND:
        _SOUND[key] = soundness_check(c, m)["sound"]
    return _SOUND[key]


def _in_language(c, fs):
    ops = set()
    for r in c.rules:
        for p in list(r.premises) + [r.conclusion]:
            ops |= {g.op for g in subformulas(p) if type(g) is App}
    return all(g.op in ops for f in fs for g in subformulas(f) if type(g) is App)


def bounded_search(c, X, goal: Formula, max_steps: int = DEFAULT_STEPS,
                   max_degree: int | None = None, depth: int = 5, node_budget: int = 20000):
    """Derivation of goal from X in calculus c with at most max_steps lines
    and every metavariable bound to a formula of degree at most max_degree
    (default: degree of the problem + 4), or NotFound."""
    from .calculus import check_derivation, max_binding_degree
    X = frozenset(X)
    if max_degree is None:
        max_degree = max([degree(goal)] + [degree(x) for x in X]) + DEGREE_SLACK
    if not _in_language(c, list(X) + [goal]):
        return NotFound("goal or premises use connectives the calculus never mentions")
    try:
        m = _refuted(c, X, goal)
    except Exception:
        m = None
    if m:
        return NotFound(f"refuted in {m}, for which every rule is sound")
    candidates = []
    kit = _Kit(c)
    if kit.dt:
        for dmax in range(0, depth + 1):
            p = _Prover(c, node_budget=node_budget)
            ctx = _Ctx({x: _prem(x) for x in X})
            try:
                t = p.prove(ctx, goal, dmax)
            except RecursionError:
                t = None
            if t is not None and not t.free:
                candidates.append(compile_term(t, X))
                # deeper searches sometimes find shorter proofs
                if len(candidates) == 3 or len(candidates[0]) <= 12:
                    break
    if not candidates and (not kit.dt or len(X) + degree(goal) <= 6):
        fs = forward_search(c, X, goal, max_steps, max_degree)
        if fs is not None:
            candidates.append(fs)
    good = []
    for d in candidates:
        if check_derivation(c, d, goal) and len(d) <= max_steps \
                and max_binding_degree(c, d) <= max_degree:
            good.append(d)
    if good:
        return min(good, key=len)
    if candidates:
        d = min(candidates, key=len)
        return NotFound(f"shortest derivation found has {len(d)} steps and binding degree "
                        f"{max_binding_degree(c, d)}, over the limits")
    return NotFound("search exhausted within limits")
