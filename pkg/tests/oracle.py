"""Slow, independent reference semantics used to derive expected values.

Nothing here calls the library's evaluators: formulas are walked with plain
recursion over explicit Python tables, relations and sets.
"""

import itertools
from fractions import Fraction

from sentential.language import App, Const, Var


def _walk_vars(f, out):
    if isinstance(f, Var):
        out.add(f.name)
    elif isinstance(f, App):
        for a in f.args:
            _walk_vars(a, out)
    return out


def atoms(f):
    return sorted(_walk_vars(f, set()))


def classical(f, v):
    if isinstance(f, Var):
        return v[f.name]
    if isinstance(f, Const):
        return f.name == "⊤"
    a = [classical(x, v) for x in f.args]
    return {"¬": lambda: not a[0], "∧": lambda: a[0] and a[1], "∨": lambda: a[0] or a[1],
            "→": lambda: (not a[0]) or a[1], "↔": lambda: a[0] == a[1]}[f.op]()


def valuations(names, values):
    for combo in itertools.product(values, repeat=len(names)):
        yield dict(zip(names, combo))


def tautology(f):
    return all(classical(f, v) for v in valuations(atoms(f), (False, True)))


# Łukasiewicz three-valued: values 0, 1/2, 1 as Fractions, designated {1}
def luk(f, v):
    if isinstance(f, Var):
        return v[f.name]
    a = [luk(x, v) for x in f.args]
    one = Fraction(1)
    return {"¬": lambda: one - a[0], "∧": lambda: min(a[0], a[1]),
            "∨": lambda: max(a[0], a[1]), "→": lambda: min(one, one - a[0] + a[1]),
            "↔": lambda: one - abs(a[0] - a[1]),
            "□": lambda: one if a[0] == one else Fraction(0),
            "◇": lambda: Fraction(0) if a[0] == 0 else one}[f.op]()


L3_VALUES = (Fraction(0), Fraction(1, 2), Fraction(1))


def l3_valid(f):
    return all(luk(f, v) == 1 for v in valuations(atoms(f), L3_VALUES))


# Gödel chain on 0 < 1 < ... < n-1, designated top
def goedel(f, v, n):
    if isinstance(f, Var):
        return v[f.name]
    a = [goedel(x, v, n) for x in f.args]
    top = n - 1
    if f.op == "¬":
        return top if a[0] == 0 else 0
    if f.op == "∧":
        return min(a)
    if f.op == "∨":
        return max(a)
    if f.op == "→":
        return top if a[0] <= a[1] else a[1]
    if f.op == "↔":
        return top if a[0] == a[1] else min(a)
    raise KeyError(f.op)


def goedel_valid(f, n):
    return all(goedel(f, v, n) == n - 1 for v in valuations(atoms(f), range(n)))


# Kripke forcing by the textbook clauses over an explicit order relation
def force(worlds, le, val, w, f):
    if isinstance(f, Var):
        return w in val.get(f.name, ())
    if isinstance(f, Const):
        return f.name == "⊤"
    op = f.op
    if op == "∧":
        return all(force(worlds, le, val, w, a) for a in f.args)
    if op == "∨":
        return any(force(worlds, le, val, w, a) for a in f.args)
    above = [u for u in worlds if (w, u) in le]
    if op == "→":
        a, b = f.args
        return all(not force(worlds, le, val, u, a) or force(worlds, le, val, u, b) for u in above)
    if op == "¬":
        return not any(force(worlds, le, val, u, f.args[0]) for u in above)
    raise KeyError(op)


def order_closure(worlds, pairs):
    le = {(w, w) for w in worlds} | set(pairs)
    changed = True
    while changed:
        changed = False
        for (a, b), (c, d) in itertools.product(list(le), repeat=2):
            if b == c and (a, d) not in le:
                le.add((a, d))
                changed = True
    return le


def up_sets(worlds, le):
    out = []
    for r in range(len(worlds) + 1):
        for s in itertools.combinations(worlds, r):
            s = set(s)
            if all(u in s for w in s for u in worlds if (w, u) in le):
                out.append(frozenset(s))
    return out


def all_posets(n):
    """Every partial order on range(n) (labelled, so with repetitions)."""
    worlds = list(range(n))
    cand = [(a, b) for a in worlds for b in worlds if a != b]
    seen = set()
    for r in range(len(cand) + 1):
        for pairs in itertools.combinations(cand, r):
            le = order_closure(worlds, pairs)
            if any((b, a) in le for a, b in le if a != b):
                continue
            key = frozenset(le)
            if key not in seen:
                seen.add(key)
                yield worlds, key


def int_refutable(f, max_worlds):
    names = atoms(f)
    for n in range(1, max_worlds + 1):
        for worlds, le in all_posets(n):
            ups = up_sets(worlds, le)
            for combo in itertools.product(ups, repeat=len(names)):
                val = dict(zip(names, combo))
                if not all(force(worlds, le, val, w, f) for w in worlds):
                    return True
    return False


# closure operators from families of sets
def moore_families(n):
    universe = frozenset(range(n))
    subsets = [frozenset(s) for r in range(n + 1) for s in itertools.combinations(range(n), r)]
    others = [s for s in subsets if s != universe]
    for r in range(len(others) + 1):
        for pick in itertools.combinations(others, r):
            fam = set(pick) | {universe}
            if all(a & b in fam for a in fam for b in fam):
                yield fam
