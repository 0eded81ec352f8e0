"""Finite Kripke models for intuitionistic logic: forcing, enumeration of
frames up to isomorphism, countermodel search, and classification of
one-variable formulas against the Rieger–Nishimura formulas."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

import networkx as nx

from .heyting import FinitePoset, heyting_imp
from .language import And, Const, Formula, Imp, Not, Or, Var, sorted_vars, variables
from .matrix import BudgetExceeded


@dataclass(frozen=True, eq=False)
class KripkeModel:
    frame: FinitePoset
    valuation: dict     # variable -> frozenset of worlds (up-closed)

    def __post_init__(self):
        for x, ws in self.valuation.items():
            s = self.mask(ws)
            for i, up in enumerate(self.frame.up_masks):
                if (s >> i) & 1 and up & ~s:
                    raise ValueError(f"extension of {x} is not up-closed")

    def mask(self, worlds) -> int:
        els = self.frame.elements
        return sum(1 << els.index(w) for w in worlds)

    def worlds_of(self, mask):
        return [w for i, w in enumerate(self.frame.elements) if (mask >> i) & 1]

    def to_json(self):
        return {"worlds": list(self.frame.elements),
                "order": sorted(map(list, self.frame.covers)),
                "valuation": {x: sorted(ws, key=self.frame.elements.index)
                              for x, ws in sorted(self.valuation.items())}}

    def to_dot(self, world=None):
        lines = ["digraph kripke {", "  rankdir=BT;"]
        for w in self.frame.elements:
            true = [x for x in sorted(self.valuation) if w in self.valuation[x]]
            lab = w + (": " + ",".join(true) if true else "")
            style = ", shape=doublecircle" if w == world else ""
            lines.append(f'  "{w}" [label="{lab}"{style}];')
        for a, b in sorted(self.frame.covers):
            lines.append(f'  "{a}" -> "{b}";')
        lines.append("}")
        return "\n".join(lines)


def truth_mask(up_masks, full, env, f, memo=None):
    """Set of worlds forcing f, as a bitmask; env maps variables to masks."""
    memo = {} if memo is None else memo
    return _tm(up_masks, full, env, f, memo)


def _tm(ups, full, env, f, memo):
    t = type(f)
    if t is Var:
        return env[f.name]
    if t is Const:
        if f.name == "⊤":
            return full
        if f.name == "⊥":
            return 0
        raise ValueError(f"no Kripke reading for constant {f.name}")
    r = memo.get(f)
    if r is not None:
        return r
    op = f.op
    if op == "∧":
        r = _tm(ups, full, env, f.args[0], memo) & _tm(ups, full, env, f.args[1], memo)
    elif op == "∨":
        r = _tm(ups, full, env, f.args[0], memo) | _tm(ups, full, env, f.args[1], memo)
    elif op == "→":
        r = heyting_imp(ups, _tm(ups, full, env, f.args[0], memo),
                        _tm(ups, full, env, f.args[1], memo), full)
    elif op == "¬":
        r = heyting_imp(ups, _tm(ups, full, env, f.args[0], memo), 0, full)
    elif op == "↔":
        a = _tm(ups, full, env, f.args[0], memo)
        b = _tm(ups, full, env, f.args[1], memo)
        r = heyting_imp(ups, a, b, full) & heyting_imp(ups, b, a, full)
    else:
        raise ValueError(f"no Kripke clause for {op}")
    memo[f] = r
    return r


def forces(m: KripkeModel, w, f: Formula) -> bool:
    env = {x: m.mask(ws) for x, ws in m.valuation.items()}
    for x in variables(f):
        env.setdefault(x, 0)
    full = (1 << m.frame.size) - 1
    s = truth_mask(m.frame.up_masks, full, env, f)
    return bool((s >> m.frame.elements.index(w)) & 1)


# --------------------------------------------------------------------------
# frames up to isomorphism

def _poset_from_masks(ups):
    n = len(ups)
    els = tuple(f"w{i}" for i in range(n))
    pairs = [(els[i], els[j]) for i in range(n) for j in range(n) if i != j and (ups[i] >> j) & 1]
    return FinitePoset.from_relation(els, pairs)


def _graph(ups):
    g = nx.DiGraph()
    n = len(ups)
    g.add_nodes_from(range(n))
    g.add_edges_from((i, j) for i in range(n) for j in range(n) if i != j and (ups[i] >> j) & 1)
    return g


@lru_cache(maxsize=None)
def _posets_masks(n: int):
    """Representatives (as up-mask tuples) of all n-element posets up to
    isomorphism. Each poset arises from a smaller one by adding a new maximal
    element above some down-closed set."""
    if n == 0:
        return ((),)
    out, buckets = [], {}
    for ups in _posets_masks(n - 1):
        m = n - 1
        downs = [s for s in range(1 << m)
                 if all(not (s >> i) & 1 or all((s >> j) & 1 for j in range(m) if (ups[j] >> i) & 1)
                        for i in range(m))]
        for d in downs:
            # new element m sits above exactly the elements of d
            new = tuple(u | (1 << m) if (d >> i) & 1 else u for i, u in enumerate(ups)) + (1 << m,)
            g = _graph(new)
            key = nx.weisfeiler_lehman_graph_hash(g, iterations=3)
            bucket = buckets.setdefault(key, [])
            if any(nx.is_isomorphic(g, h) for h in bucket):
                continue
            bucket.append(g)
            out.append(new)
    return tuple(out)


def posets(n: int):
    """All n-element posets up to isomorphism, worlds named w0.. ."""
    return [_poset_from_masks(u) for u in _posets_masks(n)]


@lru_cache(maxsize=None)
def _rooted_masks(n: int):
    # a rooted poset is an arbitrary poset with a new bottom world
    out = []
    for ups in _posets_masks(n - 1):
        full = (1 << n) - 1
        out.append((full,) + tuple(u << 1 for u in ups))
    return tuple(out)


def rooted_frames(n: int):
    return [_poset_from_masks(u) for u in _rooted_masks(n)]


@lru_cache(maxsize=None)
def _frame_data(max_worlds: int):
    """(up_masks, upsets, full) for every rooted frame with <= max_worlds worlds."""
    out = []
    for n in range(1, max_worlds + 1):
        for ups in _rooted_masks(n):
            full = (1 << n) - 1
            upsets = [s for s in range(1 << n)
                      if all(not (s >> i) & 1 or (ups[i] & ~s) == 0 for i in range(n))]
            upsets.sort(key=lambda s: (bin(s).count("1"), s))
            out.append((n, ups, tuple(upsets), full))
    return tuple(out)


def int_countermodel(f: Formula, max_worlds: int = 6, budget: int = 10**7):
    """First rooted model (frames by size, valuations in up-set order) with a
    world not forcing f; returns (KripkeModel, world) or None. Searching
    rooted frames loses nothing: the part of a countermodel above the
    refuting world is itself a rooted countermodel."""
    if max_worlds > 7:
        raise ValueError("countermodel search is limited to 7 worlds")
    names = sorted_vars(variables(f))
    spent = 0
    for n, ups, upsets, full in _frame_data(max_worlds):
        for combo in itertools.product(upsets, repeat=len(names)):
            spent += 1
            if spent > budget:
                raise BudgetExceeded(f"more than {budget} models examined")
            env = dict(zip(names, combo))
            s = truth_mask(ups, full, env, f)
            if s != full:
                frame = _poset_from_masks(ups)
                val = {x: frozenset(frame.elements[i] for i in range(n) if (combo[k] >> i) & 1)
                       for k, x in enumerate(names)}
                # report the root: it fails whenever any world fails
                return KripkeModel(frame, val), frame.elements[0]
    return None


def int_valid_bounded(f: Formula, max_worlds: int = 6) -> bool:
    """No countermodel with at most max_worlds worlds (evidence, not proof)."""
    return int_countermodel(f, max_worlds) is None


# --------------------------------------------------------------------------
# one-variable formulas

def one_var_profile(f: Formula, max_worlds: int = 6, var: str = "p"):
    """Truth sets of f in every rooted model over one variable with at most
    max_worlds worlds, as a tuple of masks. Two formulas have equal profiles
    iff no such model separates them."""
    out = []
    for n, ups, upsets, full in _frame_data(max_worlds):
        for u in upsets:
            out.append(truth_mask(ups, full, {var: u}, f))
    return tuple(out)


def profile_leq(a, b) -> bool:
    return all(x & ~y == 0 for x, y in zip(a, b))


P = Var("p")


@lru_cache(maxsize=None)
def rn_formula(i) -> Formula:
    """Rieger–Nishimura formulas: P0 = p∧¬p, P1 = ¬p, P2 = p, P∞ = p→p,
    P(2n+3) = P(2n+1) → P(2n), P(2n+4) = P(2n+1) ∨ P(2n+2)."""
    if i in ("inf", "∞", float("inf")):
        return Imp(P, P)
    if i == 0:
        return And(P, Not(P))
    if i == 1:
        return Not(P)
    if i == 2:
        return P
    if i % 2 == 1:
        return Imp(rn_formula(i - 2), rn_formula(i - 3))
    return Or(rn_formula(i - 3), rn_formula(i - 2))


def rn_name(i):
    return "P∞" if i in ("inf", "∞") else f"P{i}"


class Unresolved:
    def __init__(self, reason, candidates=()):
        self.reason = reason
        self.candidates = list(candidates)

    def __repr__(self):
        return f"Unresolved({self.reason!r})"

    def __bool__(self):
        return False


def rn_classify(f: Formula, max_worlds: int = 6, count: int = 12):
    """Index i (or "∞") of the unique Rieger–Nishimura formula among P0..P_count
    and P∞ that no model with at most max_worlds worlds separates from f;
    Unresolved when none or several survive."""
    if not variables(f) <= {"p"}:
        raise ValueError("rn_classify takes formulas in the single variable p")
    prof = one_var_profile(f, max_worlds)
    hits = [i for i in list(range(count + 1)) + ["∞"]
            if one_var_profile(rn_formula(i), max_worlds) == prof]
    if len(hits) == 1:
        return hits[0]
    if not hits:
        return Unresolved("no candidate survives", [])
    return Unresolved("several candidates survive", hits)
