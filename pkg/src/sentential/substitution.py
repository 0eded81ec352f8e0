"""Substitutions (finite-support variable maps), their monoid structure,
images and preimages, and instantiation/matching of metaformulas."""

from __future__ import annotations

import itertools
from typing import Iterable, Mapping

from .language import App, Formula, MVar, Var, from_json, to_infix, to_json, variables


class UnboundMetavariable(KeyError):
    pass


class Substitution:
    """Variable -> formula map with finite support; identity bindings are dropped."""

    __slots__ = ("_map",)

    def __init__(self, mapping: Mapping | None = None):
        m = {}
        for k, v in (mapping or {}).items():
            name = k.name if isinstance(k, Var) else k
            if not (type(v) is Var and v.name == name):
                m[name] = v
        self._map = m

    @property
    def support(self):
        return dict(self._map)

    def __call__(self, f: Formula) -> Formula:
        return apply(self, f)

    def __eq__(self, other):
        return isinstance(other, Substitution) and self._map == other._map

    def __hash__(self):
        return hash(frozenset(self._map.items()))

    def __repr__(self):
        inner = ", ".join(f"{k}↦{to_infix(v)}" for k, v in sorted(self._map.items()))
        return "{" + inner + "}"

    def to_json(self):
        return {k: to_json(v) for k, v in self._map.items()}

    @classmethod
    def from_json(cls, obj):
        return cls({k: from_json(v) for k, v in obj.items()})


IDENTITY = Substitution()


def apply(s: Substitution, f: Formula) -> Formula:
    m = s._map
    if not m:
        return f
    return _apply(m, f, {})


def _apply(m, f, memo):
    t = type(f)
    if t is Var:
        return m.get(f.name, f)
    if t is App:
        r = memo.get(f)
        if r is None:
            r = App(f.op, [_apply(m, a, memo) for a in f.args])
            memo[f] = r
        return r
    return f


def unary(p, a: Formula) -> Substitution:
    name = p.name if isinstance(p, Var) else p
    return Substitution({name: a})


def compose(s1: Substitution, s2: Substitution) -> Substitution:
    """compose(s1, s2) applies s2 first, then s1."""
    m = {k: apply(s1, v) for k, v in s2._map.items()}
    for k, v in s1._map.items():
        m.setdefault(k, v)
    return Substitution(m)


def image(s: Substitution, X: Iterable[Formula]) -> set:
    return {apply(s, f) for f in X}


def preimage(s: Substitution, X: Iterable[Formula], universe: Iterable[Formula]) -> set:
    """{a in universe : s(a) in X}; the full preimage is infinite, so a finite
    universe must be given."""
    X = set(X)
    return {a for a in universe if apply(s, a) in X}


def unary_chain(s: Substitution, f: Formula, fresh_prefix="z"):
    """Decompose the action of s on f into unary substitutions: first rename
    every variable in the support to a fresh one, then substitute each image.
    Returns the list in application order."""
    used = variables(f) | {v for img in s._map.values() for v in variables(img)}
    used |= set(s._map)
    fresh = (f"{fresh_prefix}{i}" for i in itertools.count(1))
    chain, back = [], []
    for name in sorted(s._map):
        if name not in variables(f):
            continue
        z = next(n for n in fresh if n not in used)
        chain.append(unary(name, Var(z)))
        back.append(unary(z, s._map[name]))
    return chain + back


def apply_chain(chain, f):
    for u in chain:
        f = apply(u, f)
    return f


# --------------------------------------------------------------------------
# metaformulas

def instantiate(m: Formula, inst: Mapping) -> Formula:
    t = type(m)
    if t is MVar:
        try:
            return inst[m.name]
        except KeyError:
            raise UnboundMetavariable(m.name) from None
    if t is App:
        return App(m.op, [instantiate(a, inst) for a in m.args])
    return m


def match_instance(m: Formula, f: Formula, inst: dict | None = None):
    """First-order matching: the instantiation i with instantiate(m, i) == f,
    or None when there is none. An existing partial binding may be passed."""
    inst = dict(inst) if inst else {}
    return inst if _match(m, f, inst) else None


def _match(m, f, inst):
    t = type(m)
    if t is MVar:
        bound = inst.get(m.name)
        if bound is None:
            inst[m.name] = f
            return True
        return bound == f
    if t is App:
        if type(f) is not App or f.op != m.op or len(f.args) != len(m.args):
            return False
        return all(_match(a, b, inst) for a, b in zip(m.args, f.args))
    return m == f


def match_all(pairs, inst=None):
    """Simultaneous matching of several (metaformula, formula) pairs."""
    inst = dict(inst) if inst else {}
    for m, f in pairs:
        if not _match(m, f, inst):
            return None
    return inst
