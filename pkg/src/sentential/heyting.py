"""Finite posets, up-set Heyting algebras, identity suites for lattices,
Boolean and Heyting algebras, and Boolean normal forms."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property

import networkx as nx
import numpy as np

from .language import And, App, Const, Formula, Imp, Not, Or, TOP, Var, parse, sorted_vars, variables, walk
from .matrix import (FiniteAlgebra, Matrix, _eval_vec, _grid, _valuation_batches,
                     _with_iff, b2, truth_table)


class TooLarge(ValueError):
    pass


class NotBoolean(ValueError):
    pass


class TooManyVariables(ValueError):
    pass


# --------------------------------------------------------------------------
# posets

@dataclass(frozen=True, eq=False)
class FinitePoset:
    """elements plus covering pairs (a, b) meaning a < b with nothing between."""

    elements: tuple
    covers: frozenset

    @classmethod
    def from_relation(cls, elements, pairs):
        elements = tuple(elements)
        g = nx.DiGraph()
        g.add_nodes_from(elements)
        g.add_edges_from((a, b) for a, b in pairs if a != b)
        if not nx.is_directed_acyclic_graph(g):
            raise ValueError("the order relation has a cycle")
        red = nx.transitive_reduction(g)
        return cls(elements, frozenset(red.edges()))

    @classmethod
    def chain(cls, n):
        els = tuple(f"w{i}" for i in range(n))
        return cls(els, frozenset(zip(els, els[1:])))

    @classmethod
    def antichain(cls, n):
        return cls(tuple(f"w{i}" for i in range(n)), frozenset())

    @classmethod
    def fork(cls):
        """A root below two incomparable tops."""
        return cls(("r", "a", "b"), frozenset({("r", "a"), ("r", "b")}))

    @property
    def size(self):
        return len(self.elements)

    @cached_property
    def leq(self) -> np.ndarray:
        """Reflexive-transitive closure as a boolean matrix."""
        idx = {e: i for i, e in enumerate(self.elements)}
        n = len(self.elements)
        m = np.eye(n, dtype=bool)
        for a, b in self.covers:
            m[idx[a], idx[b]] = True
        for k in range(n):
            m |= m[:, [k]] & m[[k], :]
        return m

    def le(self, a, b) -> bool:
        return bool(self.leq[self.elements.index(a), self.elements.index(b)])

    @cached_property
    def up_masks(self) -> list:
        """Bitmask of the principal up-set of each element."""
        n = len(self.elements)
        return [sum(1 << j for j in range(n) if self.leq[i, j]) for i in range(n)]

    @cached_property
    def upsets(self) -> list:
        """All up-closed subsets as bitmasks, by size then value."""
        n = len(self.elements)
        ups = self.up_masks
        out = [s for s in range(1 << n)
               if all(not (s >> i) & 1 or (ups[i] & ~s) == 0 for i in range(n))]
        return sorted(out, key=lambda s: (bin(s).count("1"), s))

    def mask_name(self, s) -> str:
        if s == 0:
            return "∅"
        return "{" + ",".join(e for i, e in enumerate(self.elements) if (s >> i) & 1) + "}"

    def graph(self) -> nx.DiGraph:
        g = nx.DiGraph()
        g.add_nodes_from(self.elements)
        g.add_edges_from(self.covers)
        return g

    def to_json(self):
        return {"elements": list(self.elements), "covers": sorted(map(list, self.covers))}


def heyting_imp(up_masks, u, v, full):
    """Largest up-set W with W ∩ u ⊆ v: worlds all of whose successors in u lie in v."""
    w = 0
    for i, m in enumerate(up_masks):
        if (m & u & ~v) == 0:
            w |= 1 << i
    return w & full


def upset_algebra(p: FinitePoset, max_size: int = 12) -> FiniteAlgebra:
    """Heyting algebra of up-closed subsets: ∧ = ∩, ∨ = ∪, U→V the largest
    up-set W with W∩U ⊆ V, ¬U = U→∅, 1 = all worlds."""
    if p.size > max_size:
        raise TooLarge(f"{p.size} worlds; up-set algebras are built for at most {max_size}")
    ups = p.upsets
    pos = {s: i for i, s in enumerate(ups)}
    n = len(ups)
    full = (1 << p.size) - 1
    masks = np.array(ups, dtype=np.int64)
    meet = pos_lookup(pos, masks[:, None] & masks[None, :])
    join = pos_lookup(pos, masks[:, None] | masks[None, :])
    imp = np.zeros((n, n), dtype=np.int64)
    for i, u in enumerate(ups):
        for j, v in enumerate(ups):
            imp[i, j] = pos[heyting_imp(p.up_masks, u, v, full)]
    neg = imp[:, pos[0]].copy()
    ops = {"∧": meet, "∨": join, "→": imp, "¬": neg}
    names = tuple(p.mask_name(s) for s in ups)
    return FiniteAlgebra(names, _with_iff(ops, n), {"⊤": pos[full], "⊥": pos[0]}, {},
                         f"Up({p.size})")


def pos_lookup(pos, arr):
    flat = [pos[int(x)] for x in arr.reshape(-1)]
    return np.array(flat, dtype=np.int64).reshape(arr.shape)


def upset_matrix(p: FinitePoset) -> Matrix:
    alg = upset_algebra(p)
    return Matrix(alg, frozenset({alg.elements[alg.consts["⊤"]]}), degenerate=alg.size < 2)


def boolean_algebra(k: int) -> FiniteAlgebra:
    """Power set of k atoms with ∧, ∨, ¬ and constants (no implication)."""
    n = 1 << k
    full = n - 1
    ops = {"∧": _grid(n, lambda x, y: x & y, 2),
           "∨": _grid(n, lambda x, y: x | y, 2),
           "¬": _grid(n, lambda x: full & ~x, 1)}
    atoms = "abcdefgh"[:k]
    names = tuple("0" if s == 0 else "1" if s == full else "".join(a for i, a in enumerate(atoms) if (s >> i) & 1)
                  for s in range(n))
    return FiniteAlgebra(names, ops, {"⊤": full, "⊥": 0}, {}, f"Bool({k})")


# --------------------------------------------------------------------------
# identity suites

def _p(s):
    return parse(s)


def _le(a, b):
    # a ≤ b as the equation a∧b = a
    return ("eq", And(a, b), a)


_X, _Y, _Z = Var("x"), Var("y"), Var("z")
_ONE = TOP

SUITES = {
    "lattice_l1_l4": [
        ("l1 ∧-commutative", ("eq", _p("(x∧y)"), _p("(y∧x)"))),
        ("l1 ∨-commutative", ("eq", _p("(x∨y)"), _p("(y∨x)"))),
        ("l2 ∧-associative", ("eq", _p("(x∧(y∧z))"), _p("((x∧y)∧z)"))),
        ("l2 ∨-associative", ("eq", _p("(x∨(y∨z))"), _p("((x∨y)∨z)"))),
        ("l3 absorption ∨", ("eq", _p("((x∧y)∨y)"), _Y)),
        ("l3 absorption ∧", ("eq", _p("(x∧(x∨y))"), _X)),
        ("l4 ∧ over ∨", ("eq", _p("(x∧(y∨z))"), _p("((x∧y)∨(x∧z))"))),
        ("l4 ∨ over ∧", ("eq", _p("(x∨(y∧z))"), _p("((x∨y)∧(x∨z))"))),
    ],
    "bounded_b1": [
        ("b1 x∧1 = x", ("eq", And(_X, _ONE), _X)),
        ("b1 x∨1 = 1", ("eq", Or(_X, _ONE), _ONE)),
    ],
    "boolean_b2": [
        ("b2 (x∧¬x)∨y = y", ("eq", _p("((x∧¬x)∨y)"), _Y)),
        ("b2 (x∨¬x)∧y = y", ("eq", _p("((x∨¬x)∧y)"), _Y)),
    ],
    "heyting_h1_h6": [
        ("h1 x∧(x→y) = x∧y", ("eq", _p("(x∧(x→y))"), _p("(x∧y)"))),
        ("h2 (x→y)∧y = y", ("eq", _p("((x→y)∧y)"), _Y)),
        ("h3 (x→y)∧(x→z) = x→(y∧z)", ("eq", _p("((x→y)∧(x→z))"), _p("(x→(y∧z))"))),
        ("h4 x∧(y→y) = x", ("eq", _p("(x∧(y→y))"), _X)),
        ("h5 ¬1∨y = y", ("eq", Or(Not(_ONE), _Y), _Y)),
        ("h6 ¬x = x→¬1", ("eq", Not(_X), Imp(_X, Not(_ONE)))),
    ],
    "int_props_a_h": [
        ("a x ≤ y→x", _le(_X, _p("(y→x)"))),
        ("b x→y ≤ (x→(y→z))→(x→z)", _le(_p("(x→y)"), _p("((x→(y→z))→(x→z))"))),
        ("c x ≤ y→(x∧y)", _le(_X, _p("(y→(x∧y))"))),
        ("d x∧y ≤ x", _le(_p("(x∧y)"), _X)),
        ("e x ≤ x∨y", _le(_X, _p("(x∨y)"))),
        ("f x→z ≤ (y→z)→((x∨y)→z)", _le(_p("(x→z)"), _p("((y→z)→((x∨y)→z))"))),
        ("g x→y ≤ (x→¬y)→¬x", _le(_p("(x→y)"), _p("((x→¬y)→¬x)"))),
        ("h x ≤ ¬x→y", _le(_X, _p("(¬x→y)"))),
    ],
    "derived_eqs": [
        ("x∧x = x", ("eq", _p("(x∧x)"), _X)),
        ("x∨x = x", ("eq", _p("(x∨x)"), _X)),
        ("x→x = 1", ("eq", _p("(x→x)"), _ONE)),
        ("x∧¬x = 0", ("eq", _p("(x∧¬x)"), Not(_ONE))),
        ("x ≤ y→z iff x∧y ≤ z", ("iff", _le(_X, _p("(y→z)")), _le(_p("(x∧y)"), _Z))),
        ("x ≤ y iff x→y = 1", ("iff", _le(_X, _Y), ("eq", _p("(x→y)"), _ONE))),
    ],
    "boolean_derived": [
        ("¬¬x = x", ("eq", _p("¬¬x"), _X)),
        ("x∨¬x = 1", ("eq", _p("(x∨¬x)"), _ONE)),
        ("x∧¬x = 0", ("eq", _p("(x∧¬x)"), Not(_ONE))),
    ],
}

BOOLEAN_SUITES = ("lattice_l1_l4", "bounded_b1", "boolean_b2", "boolean_derived")
HEYTING_SUITES = ("lattice_l1_l4", "bounded_b1", "heyting_h1_h6", "int_props_a_h", "derived_eqs")


def _uses(alg, f):
    for g in walk(f):
        if type(g) is App and g.op not in alg.ops:
            return False
        if type(g) is Const and g.name not in alg.consts:
            return False
    return True


def _holds(alg, stmt, env, size):
    kind = stmt[0]
    if kind == "eq":
        a = np.broadcast_to(_eval_vec(alg, stmt[1], env, size, {}), (size,))
        b = np.broadcast_to(_eval_vec(alg, stmt[2], env, size, {}), (size,))
        return a == b
    return _holds(alg, stmt[1], env, size) == _holds(alg, stmt[2], env, size)


def _stmt_formulas(stmt):
    if stmt[0] == "eq":
        return [stmt[1], stmt[2]]
    return _stmt_formulas(stmt[1]) + _stmt_formulas(stmt[2])


def check_identities(alg, suites=HEYTING_SUITES) -> dict:
    """Exhaustively check each statement of the chosen suites over all
    assignments of x, y, z. Returns {suite: [{name, holds, witness}]};
    statements mentioning an operation the algebra lacks are reported with
    holds = None."""
    if isinstance(alg, Matrix):
        alg = alg.algebra
    if isinstance(suites, str):
        suites = [suites]
    report = {}
    names = ["x", "y", "z"]
    for suite in suites:
        rows = []
        for label, stmt in SUITES[suite]:
            fs = _stmt_formulas(stmt)
            if not all(_uses(alg, f) for f in fs):
                rows.append({"name": label, "holds": None, "witness": None})
                continue
            witness = None
            for _, size, env in _valuation_batches(alg.size, names, 10**8):
                ok = _holds(alg, stmt, env, size)
                bad = np.flatnonzero(~ok)
                if bad.size:
                    i = int(bad[0])
                    witness = {x: alg.elements[int(env[x][i])] for x in names}
                    break
            rows.append({"name": label, "holds": witness is None, "witness": witness})
        report[suite] = rows
    return report


def suite_passes(report, suite) -> bool:
    return all(r["holds"] is True for r in report[suite])


def all_pass(report) -> bool:
    return all(suite_passes(report, s) for s in report)


def boolean_to_heyting(b: FiniteAlgebra) -> FiniteAlgebra:
    """Add x→y := ¬x∨y to a Boolean algebra."""
    if isinstance(b, Matrix):
        b = b.algebra
    for op in ("∧", "∨", "¬"):
        if op not in b.ops:
            raise NotBoolean(f"missing operation {op}")
    if "⊤" not in b.consts:
        raise NotBoolean("missing unit constant")
    rep = check_identities(b, ("lattice_l1_l4", "bounded_b1", "boolean_b2"))
    if not all_pass(rep):
        failed = [r["name"] for s in rep for r in rep[s] if not r["holds"]]
        raise NotBoolean("fails " + ", ".join(failed))
    n = b.size
    neg, join = b.ops["¬"], b.ops["∨"]
    ops = {k: v for k, v in b.ops.items() if k != "↔"}
    ops["→"] = _grid(n, lambda x, y: join[neg[x], y], 2)
    consts = dict(b.consts)
    consts.setdefault("⊥", int(neg[consts["⊤"]]))
    return FiniteAlgebra(b.elements, _with_iff(ops, n), consts, dict(b.aliases), b.name)


def leq_matrix(alg: FiniteAlgebra) -> np.ndarray:
    """x ≤ y iff x∧y = x."""
    meet = alg.ops["∧"]
    n = alg.size
    return meet == np.arange(n)[:, None]


def hasse_edges(alg: FiniteAlgebra):
    le = leq_matrix(alg)
    n = alg.size
    g = nx.DiGraph()
    g.add_nodes_from(range(n))
    g.add_edges_from((i, j) for i in range(n) for j in range(n) if i != j and le[i, j])
    red = nx.transitive_reduction(g)
    return sorted((alg.elements[i], alg.elements[j]) for i, j in red.edges())


def hasse_dot(nodes, edges, labels=None, name="hasse"):
    """DOT text with the unit on top (edges drawn upward)."""
    labels = labels or {}
    lines = [f"digraph {name} {{", "  rankdir=BT;", "  node [shape=plaintext];"]
    ids = {n: f"n{i}" for i, n in enumerate(nodes)}
    for n in nodes:
        lab = str(labels.get(n, n)).replace('"', '\\"')
        lines.append(f'  {ids[n]} [label="{lab}"];')
    for a, b in edges:
        lines.append(f"  {ids[a]} -> {ids[b]} [arrowhead=none];")
    lines.append("}")
    return "\n".join(lines)


def algebra_dot(alg: FiniteAlgebra):
    return hasse_dot(list(alg.elements), hasse_edges(alg), name="algebra")


# --------------------------------------------------------------------------
# Boolean normal forms

def _fold(op, items):
    out = items[0]
    for it in items[1:]:
        out = App(op, (out, it))
    return out


def normal_form(f: Formula, kind: str = "dnf", generators=None) -> Formula:
    """Full disjunctive (or conjunctive) normal form over the generators,
    rows taken with 1 before 0. The empty disjunction is written p∧¬p and
    the empty conjunction p∨¬p over the first generator."""
    gens = sorted_vars(variables(f)) if generators is None else list(generators)
    if not set(variables(f)) <= set(gens):
        raise ValueError("generators must include every variable of the formula")
    if len(gens) > 3:
        raise TooManyVariables(f"{len(gens)} generators; at most 3 are supported")
    if not gens:
        raise TooManyVariables("normal forms need at least one generator")
    table = truth_table(b2().algebra, f, gens)
    k = len(gens)
    rows = []
    for bits in itertools.product((1, 0), repeat=k):
        idx = int("".join(map(str, bits)), 2)
        rows.append((bits, int(table[idx])))
    g0 = Var(gens[0])
    if kind == "dnf":
        terms = [_fold("∧", [Var(x) if b else Not(Var(x)) for x, b in zip(gens, bits)])
                 for bits, val in rows if val]
        return _fold("∨", terms) if terms else And(g0, Not(g0))
    if kind == "cnf":
        clauses = [_fold("∨", [Not(Var(x)) if b else Var(x) for x, b in zip(gens, bits)])
                   for bits, val in rows if not val]
        return _fold("∧", clauses) if clauses else Or(g0, Not(g0))
    raise ValueError("kind must be 'dnf' or 'cnf'")
