"""Finite-rank Lindenbaum–Tarski quotients.

Classical case: classes of formulas in k variables are Boolean functions,
keyed by their truth table over the two-element matrix, with a full DNF as
representative.  Intuitionistic one-variable case: the prefix P0..Pn of the
Rieger–Nishimura formulas, ordered by the absence of small Kripke
countermodels.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field

import numpy as np

from .heyting import (BOOLEAN_SUITES, HEYTING_SUITES, all_pass, check_identities,
                      hasse_dot, normal_form)
from .kripke import (Unresolved, int_countermodel, one_var_profile, profile_leq,
                     rn_formula, rn_name)
from .language import (BOT, TOP, And, Formula, Imp, Not, Or, Var, to_infix,
                       variables)
from .matrix import FiniteAlgebra, b2, is_valid, truth_table

RANK_VARS = ("p", "q", "r")


class BadRank(ValueError):
    pass


class RankExceeded(ValueError):
    pass


@dataclass(frozen=True)
class QClass:
    key: tuple
    representative: Formula
    label: str = ""

    @property
    def name(self):
        return self.label or to_infix(self.representative)


@dataclass
class QuotientAlgebra:
    """Classes with op tables (entries are class indices, or None where the
    construction could not settle them), unit and zero classes, and the
    order as a boolean matrix."""

    name: str
    classes: list
    ops: dict
    unit: int
    zero: int
    order: np.ndarray
    generators: tuple = ()
    unresolved: list = field(default_factory=list)

    @property
    def size(self):
        return len(self.classes)

    def index_of_key(self, key):
        for i, c in enumerate(self.classes):
            if c.key == key:
                return i
        raise KeyError(key)

    def total(self) -> bool:
        return all(all(x is not None for x in np.asarray(t, dtype=object).ravel())
                   for t in self.ops.values())

    def hasse_edges(self):
        """Covering pairs (i, j) with class i strictly below class j."""
        n = self.size
        le = self.order
        out = []
        for i in range(n):
            for j in range(n):
                if i == j or not le[i, j] or le[j, i]:
                    continue
                if not any(k not in (i, j) and le[i, k] and le[k, j]
                           and not le[k, i] and not le[j, k] for k in range(n)):
                    out.append((i, j))
        return sorted(out)

    def to_dot(self):
        names = [c.name for c in self.classes]
        edges = [(names[i], names[j]) for i, j in self.hasse_edges()]
        return hasse_dot(names, edges, name=self.name.replace("(", "_").replace(")", ""))

    def algebra(self) -> FiniteAlgebra:
        """The quotient as a FiniteAlgebra (total tables only)."""
        if not self.total():
            raise ValueError("some table entries are unsettled")
        ops = {op: np.asarray(t, dtype=np.int64) for op, t in self.ops.items()}
        consts = {"⊤": self.unit, "⊥": self.zero}
        return FiniteAlgebra(tuple(c.name for c in self.classes), ops, consts, {}, self.name)

    def to_json(self):
        def table(t):
            return np.asarray(t, dtype=object).tolist()
        return {
            "name": self.name,
            "generators": list(self.generators),
            "classes": [{"key": list(c.key), "representative": to_infix(c.representative),
                         "label": c.name} for c in self.classes],
            "unit": self.unit,
            "zero": self.zero,
            "ops": {op: table(t) for op, t in self.ops.items()},
            "hasse": [list(e) for e in self.hasse_edges()],
            "unresolved": [list(u) for u in self.unresolved],
        }

    def dumps(self):
        return json.dumps(self.to_json(), ensure_ascii=False, indent=1)


# --------------------------------------------------------------------------
# free Boolean algebras of rank <= 3

def _rank_keys(k):
    # all Boolean functions of k arguments as tuples of row values
    rows = 1 << k
    return [tuple((m >> (rows - 1 - i)) & 1 for i in range(rows)) for m in range(1 << rows)]


def _key(f: Formula, gens) -> tuple:
    if not gens:
        return (_const_value(f),)
    return tuple(int(x) for x in truth_table(b2().algebra, f, list(gens)))


def _const_value(f):
    # closed formulas: evaluate in the two-element algebra directly
    from .matrix import evaluate
    return 1 if evaluate(b2(), {}, f) == "1" else 0


def _representative(key, gens) -> Formula:
    if not gens:
        return TOP if key[0] else BOT
    # build any formula with this table, then take its normal form
    terms = []
    for bits, val in zip(itertools.product((0, 1), repeat=len(gens)), key):
        if val:
            lits = [Var(x) if b else Not(Var(x)) for x, b in zip(gens, bits)]
            term = lits[0]
            for l in lits[1:]:
                term = And(term, l)
            terms.append(term)
    g0 = Var(gens[0])
    f = And(g0, Not(g0))
    for t in terms:
        f = Or(f, t)
    return normal_form(f, "dnf", gens)


def lt_classical(k: int) -> QuotientAlgebra:
    """Free Boolean algebra on k <= 3 generators p, q, r as truth-table classes."""
    if not isinstance(k, int) or not 0 <= k <= 3:
        raise BadRank(f"rank must be 0..3, got {k!r}")
    gens = RANK_VARS[:k]
    keys = _rank_keys(k)
    keys.sort(key=lambda t: (sum(t), [-x for x in t]))
    classes = []
    for key in keys:
        rep = _representative(key, gens)
        classes.append(QClass(key, rep))
    n = len(classes)
    index = {c.key: i for i, c in enumerate(classes)}
    arr = np.array([c.key for c in classes], dtype=np.int64)

    def lift(fn, arity):
        t = np.zeros((n,) * arity, dtype=np.int64)
        for xs in itertools.product(range(n), repeat=arity):
            t[xs] = index[tuple(int(v) for v in fn(*[arr[x] for x in xs]))]
        return t

    ops = {
        "∧": lift(lambda a, b: a & b, 2),
        "∨": lift(lambda a, b: a | b, 2),
        "→": lift(lambda a, b: (1 - a) | b, 2),
        "¬": lift(lambda a: 1 - a, 1),
    }
    order = np.all(arr[:, None, :] <= arr[None, :, :], axis=2)
    unit = index[tuple([1] * len(keys[0]))]
    zero = index[tuple([0] * len(keys[0]))]
    labelled = []
    for i, c in enumerate(classes):
        lab = to_infix(c.representative)
        if i == unit:
            lab = f"𝟏 = [{lab}]"
        elif i == zero:
            lab = f"𝟎 = [{lab}]"
        else:
            lab = f"[{lab}]"
        labelled.append(QClass(c.key, c.representative, lab))
    return QuotientAlgebra(f"LT_Cl({k})", labelled, ops, unit, zero, order, tuple(gens))


def class_of(q: QuotientAlgebra, f: Formula) -> int:
    """Index of the class of f in a classical quotient."""
    extra = variables(f) - set(q.generators)
    if extra:
        raise RankExceeded(f"variables {sorted(extra)} outside the generators {list(q.generators)}")
    if q.name.startswith("LT_Int"):
        return _rn_class_of(q, f)
    return q.index_of_key(_key(f, q.generators))


# --------------------------------------------------------------------------
# the Rieger–Nishimura prefix

# Covering pairs among P0..P12 as drawn in the figure of LT_Int(1)
FIGURE_EDGES = [(0, 1), (0, 2), (1, 4), (2, 3), (2, 4), (3, 6), (4, 5), (4, 6), (5, 8),
                (6, 7), (6, 8), (7, 10), (8, 9), (8, 10), (9, 12), (10, 11), (10, 12)]

# Labels the figure gives; some differ syntactically from the recursion
FIGURE_LABELS = {
    3: "¬¬p", 4: "(p∨¬p)", 5: "(¬¬p→p)", 6: "(¬p∨¬¬p)",
    7: "(P5→P4)", 8: "(P5∨P3)", 9: "(P7→P6)", 10: "(P5∨P7)", 11: "(P9→P8)", 12: "(P7∨P9)",
}

RN_WORLDS = 6


def figure_formula(i: int) -> Formula:
    """The figure's own label for P_i read as a formula (P-names expanded)."""
    from .language import parse
    text = FIGURE_LABELS.get(i)
    if text is None:
        return rn_formula(i)
    if "P" not in text:
        return parse(text)
    a, op, b = _split(text[1:-1])
    left, right = rn_formula(int(a[1:])), rn_formula(int(b[1:]))
    return Imp(left, right) if op == "→" else Or(left, right)


def _split(s):
    for op in ("→", "∨"):
        if op in s:
            a, b = s.split(op)
            return a, op, b
    raise ValueError(s)


def rn_lattice(count: int = 12, max_worlds: int = RN_WORLDS) -> QuotientAlgebra:
    """P0..P_count and 𝟏 = p→p, ordered by absence of countermodels with at
    most max_worlds worlds; ∧, ∨, → tables filled by classifying the
    combined formulas. Pairs that the bound cannot separate are recorded
    in .unresolved instead of being guessed."""
    if not isinstance(count, int) or not 0 <= count <= 13:
        raise BadRank(f"prefix length must be 0..13, got {count!r}")
    idx = list(range(count + 1)) + ["∞"]
    forms = [rn_formula(i) for i in idx]
    profs = [one_var_profile(f, max_worlds) for f in forms]
    n = len(idx)
    order = np.zeros((n, n), dtype=bool)
    unresolved = []
    for i in range(n):
        for j in range(n):
            order[i, j] = profile_leq(profs[i], profs[j])
    for i in range(n):
        for j in range(i + 1, n):
            if order[i, j] and order[j, i]:
                unresolved.append((rn_name(idx[i]), rn_name(idx[j]), "not separated"))
    lookup = {}
    for k, p in enumerate(profs):
        lookup.setdefault(p, k)
    # profiles of P's just past the prefix, so that results landing there are
    # recognised as outside rather than mistaken for a prefix element
    beyond = {one_var_profile(rn_formula(m), max_worlds) for m in range(count + 1, count + 3)}

    wide = {}

    def escalate(f):
        # one more world separates P's the default bound merges
        w = max_worlds + 1
        if w > 7:
            return None
        if not wide:
            wide["forms"] = [one_var_profile(g, w) for g in forms]
            wide["beyond"] = {one_var_profile(rn_formula(m), w)
                              for m in range(count + 1, count + 3)}
        p = one_var_profile(f, w)
        hits = [k for k, q in enumerate(wide["forms"]) if q == p]
        if len(hits) == 1 and p not in wide["beyond"]:
            return hits[0]
        return None if hits else "outside"

    def classify(f, a, b, op):
        p = one_var_profile(f, max_worlds)
        k = lookup.get(p)
        if k is not None and p not in beyond:
            return k
        if k is not None:
            k = escalate(f)
            if isinstance(k, int):
                return k
        unresolved.append((rn_name(idx[a]), op, rn_name(idx[b]),
                           "outside the prefix" if lookup.get(p) is None or k == "outside"
                           else "not separated from P's past the prefix"))
        return None

    top = n - 1
    ops = {}
    for op, mk in (("∧", And), ("∨", Or), ("→", Imp)):
        t = np.empty((n, n), dtype=object)
        for a in range(n):
            for b in range(n):
                # comparable arguments are settled by Heyting laws alone
                if order[a, b]:
                    t[a, b] = {"∧": a, "∨": b, "→": top}[op]
                elif order[b, a] and op != "→":
                    t[a, b] = {"∧": b, "∨": a}[op]
                elif a == top and op == "→":
                    t[a, b] = b
                else:
                    t[a, b] = classify(mk(forms[a], forms[b]), a, b, op)
        ops[op] = t
    classes = [QClass((str(i),), f, rn_name(i)) for i, f in zip(idx, forms)]
    return QuotientAlgebra(f"LT_Int(1)[P0..P{count}]", classes, ops, n - 1, 0, order,
                           ("p",), unresolved)


def _rn_class_of(q, f):
    from .kripke import rn_classify
    r = rn_classify(f, RN_WORLDS, count=q.size - 2)
    if isinstance(r, Unresolved):
        raise RankExceeded(f"{to_infix(f)} is not settled within the prefix: {r.reason}")
    return q.size - 1 if r == "∞" else r


def figure_check(q: QuotientAlgebra | None = None, max_worlds: int = RN_WORLDS):
    """Compare the computed order on P0..P12 with the figure: every figure
    edge must hold with no countermodel, every pair the figure leaves
    incomparable must have countermodels both ways."""
    q = q or rn_lattice(12, max_worlds)
    n = 13
    le = q.order[:n, :n]
    g = np.eye(n, dtype=bool)
    for a, b in FIGURE_EDGES:
        g[a, b] = True
    for k in range(n):      # transitive closure of the drawn edges
        g = g | (g[:, [k]] & g[[k], :])
    missing_edges = [(a, b) for a, b in FIGURE_EDGES if not le[a, b]]
    extra = [(a, b) for a in range(n) for b in range(n) if le[a, b] and not g[a, b]]
    lost = [(a, b) for a in range(n) for b in range(n) if g[a, b] and not le[a, b]]
    computed = [(a, b) for a, b in q.hasse_edges() if a < n and b < n]
    return {"edges_hold": not missing_edges, "missing": missing_edges,
            "extra_comparabilities": extra, "lost_comparabilities": lost,
            "hasse_matches": sorted(computed) == sorted(FIGURE_EDGES),
            "computed_hasse": computed}


def separation_witnesses(count: int = 12, max_worlds: int = RN_WORLDS):
    """For each pair i < j, a countermodel to P_i↔P_j (or None)."""
    out = {}
    for i in range(count + 1):
        for j in range(i + 1, count + 1):
            a, b = rn_formula(i), rn_formula(j)
            cm = int_countermodel(Imp(b, a), max_worlds) or int_countermodel(Imp(a, b), max_worlds)
            out[(i, j)] = cm
    return out


# --------------------------------------------------------------------------
# verification

def partial_identities(q: QuotientAlgebra, suites=HEYTING_SUITES) -> dict:
    """Identity suites over a quotient with partial tables: every assignment
    of x, y, z whose subterms all have settled values is checked, the rest
    are counted as skipped."""
    from .heyting import SUITES
    consts = {"⊤": q.unit, "⊥": q.zero}
    n = q.size
    report = {}

    def ev(f, env):
        if isinstance(f, Var):
            return env[f.name]
        if f.is_atom:
            return consts[f.name]
        vals = [ev(a, env) for a in f.args]
        if any(v is None for v in vals):
            return None
        if f.op == "¬":
            # ¬x = x→0
            return q.ops["→"][vals[0], q.zero]
        return q.ops[f.op][vals[0], vals[1]]

    def holds(stmt, env):
        if stmt[0] == "eq":
            a, b = ev(stmt[1], env), ev(stmt[2], env)
            return None if a is None or b is None else a == b
        l, r = holds(stmt[1], env), holds(stmt[2], env)
        return None if l is None or r is None else l == r

    for suite in suites:
        rows = []
        for label, stmt in SUITES[suite]:
            checked = skipped = 0
            witness = None
            for xs in itertools.product(range(n), repeat=3):
                env = dict(zip("xyz", xs))
                h = holds(stmt, env)
                if h is None:
                    skipped += 1
                    continue
                checked += 1
                if not h and witness is None:
                    witness = {k: q.classes[v].name for k, v in env.items()}
            rows.append({"name": label, "holds": witness is None, "witness": witness,
                         "checked": checked, "skipped": skipped})
        report[suite] = rows
    return report


def verify_quotient(q: QuotientAlgebra, corpus=None) -> dict:
    """Identity suites on the quotient (partial tables: only settled
    assignments) and the Lindenbaum valuation check: a formula's class is
    the unit exactly when the oracle calls it a theorem."""
    classical = q.name.startswith("LT_Cl")
    report = {"name": q.name}
    if q.total():
        suites = BOOLEAN_SUITES if classical else HEYTING_SUITES
        ids = check_identities(q.algebra(), suites)
    else:
        ids = partial_identities(q)
    report["identities"] = ids
    report["identities_pass"] = all_pass(ids)
    if corpus is None:
        corpus = _default_corpus(q)
    bad = []
    for f in corpus:
        in_unit = class_of(q, f) == q.unit
        if classical:
            theorem = is_valid(b2(), f) if variables(f) else _const_value(f) == 1
        else:
            theorem = int_countermodel(f, RN_WORLDS) is None
        if in_unit != theorem:
            bad.append(to_infix(f))
    report["valuation_check"] = {"cases": len(corpus), "failures": bad}
    report["ok"] = report["identities_pass"] and not bad
    return report


def _default_corpus(q):
    from .language import formulas_up_to
    gens = list(q.generators)
    if not gens:
        return [TOP, BOT, Not(TOP), And(TOP, BOT), Or(BOT, TOP), Imp(TOP, BOT)]
    layers = formulas_up_to(gens, 2)
    return [f for layer in layers for f in layer]
