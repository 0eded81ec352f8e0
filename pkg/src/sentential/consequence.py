"""Consequence relations and operators on finite universes.

Relations are exposed as decision backends (``derives(X, f)``); operators on a
finite universe U are tables indexed by subsets of U encoded as bitmasks
(bit i set iff the i-th element of U belongs to the set).  The operator axioms
a†..j† are checked by full quantifier expansion, and their interrelations are
verified by brute force over all (or sampled) tables.
"""

from __future__ import annotations

import itertools
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .language import Formula, metavariables, random_formula, subformulas, to_infix
from .matrix import matrix_consequence
from .substitution import Substitution, apply, instantiate, match_instance

AXIOMS = ("a", "b", "c", "d", "e", "f", "g", "h", "i", "j")

# (name, premises, conclusion)
IMPLICATIONS = (
    ("i", ("a", "g"), "c"),
    ("ii", ("b", "c"), "e"),
    ("iii", ("e",), "g"),
    ("iv", ("f",), "g"),
    ("v", ("a", "g"), "f"),
    ("vi", ("a", "f"), "c"),
    ("vii", ("a", "b", "c"), "f"),
    ("viii", ("i",), "d"),
    ("ix", ("b", "d"), "i"),
    ("x", ("b",), "h"),
    ("xi", ("b", "d"), "j"),
    ("xii", ("d", "h"), "b"),
)

MAX_EXHAUSTIVE = 5


class UniverseTooLarge(ValueError):
    pass


class NotAClosureSystem(ValueError):
    pass


def _members(mask, universe):
    return frozenset(u for i, u in enumerate(universe) if (mask >> i) & 1)


def _mask(X, universe):
    idx = {u: i for i, u in enumerate(universe)}
    m = 0
    for x in X:
        if x not in idx:
            raise ValueError(f"{x!r} is outside the universe")
        m |= 1 << idx[x]
    return m


# --------------------------------------------------------------------------
# closure systems and operators

@dataclass(frozen=True)
class FiniteClosureSystem:
    universe: tuple
    family: frozenset          # of bitmasks

    def __post_init__(self):
        full = (1 << len(self.universe)) - 1
        fam = self.family
        if full not in fam:
            raise NotAClosureSystem("the universe itself must be closed")
        for a in fam:
            for b in fam:
                if a & b not in fam:
                    raise NotAClosureSystem("family is not closed under intersection")

    @classmethod
    def of_sets(cls, universe, sets):
        universe = tuple(universe)
        return cls(universe, frozenset(_mask(s, universe) for s in sets))

    def sets(self):
        return [_members(m, self.universe) for m in sorted(self.family)]


def _cn_mask(family, x):
    out = -1
    for y in family:
        if x & ~y == 0:
            out &= y
    return out


def cn_from_closure_system(cs: FiniteClosureSystem, X) -> frozenset:
    """Least closed set containing X."""
    return _members(_cn_mask(cs.family, _mask(X, cs.universe)), cs.universe)


def closure_systems(n: int):
    """All closure systems on an n-element universe, as bitmask families."""
    if n > 4:
        raise UniverseTooLarge("closure systems are enumerated for |U| <= 4 only")
    full = (1 << n) - 1
    others = [s for s in range(1 << n) if s != full]
    for choice in range(1 << len(others)):
        fam = {full} | {s for k, s in enumerate(others) if (choice >> k) & 1}
        if all(a & b in fam for a in fam for b in fam):
            yield frozenset(fam)


@dataclass(frozen=True, eq=False)
class ExtensionalOperator:
    """table[X] = Cn(X) for every subset X (bitmasks) of the universe."""

    universe: tuple
    table: np.ndarray

    def __post_init__(self):
        n = len(self.universe)
        t = np.asarray(self.table, dtype=np.int64)
        if t.shape != (1 << n,):
            raise ValueError("table must have one entry per subset of the universe")
        if t.min() < 0 or t.max() >= (1 << n):
            raise ValueError("table entries must be subsets of the universe")
        object.__setattr__(self, "table", t)

    def __call__(self, X) -> frozenset:
        return _members(int(self.table[_mask(X, self.universe)]), self.universe)

    @classmethod
    def from_function(cls, universe, fn: Callable):
        universe = tuple(universe)
        n = len(universe)
        return cls(universe, np.array([_mask(fn(_members(x, universe)), universe)
                                       for x in range(1 << n)]))

    @classmethod
    def from_closure_system(cls, cs: FiniteClosureSystem):
        n = len(cs.universe)
        return cls(cs.universe, np.array([_cn_mask(cs.family, x) & ((1 << n) - 1)
                                          for x in range(1 << n)]))

    def closed_sets(self):
        return frozenset(x for x in range(len(self.table)) if self.table[x] == x)

    def to_json(self):
        return {"universe": [str(u) for u in self.universe],
                "table": {",".join(map(str, sorted(map(str, _members(x, self.universe))))) or "∅":
                          sorted(map(str, _members(int(y), self.universe)))
                          for x, y in enumerate(self.table)}}


# --------------------------------------------------------------------------
# axioms, vectorized over a batch of tables

@dataclass(frozen=True)
class _Lattice:
    n: int
    S: int
    sub: np.ndarray      # sub[X, Y]: X ⊆ Y
    union: np.ndarray    # union[X, Y] = X | Y
    ids: np.ndarray


def _lattice(n):
    S = 1 << n
    ids = np.arange(S)
    sub = (ids[:, None] & ~ids[None, :]) == 0
    union = ids[:, None] | ids[None, :]
    return _Lattice(n, S, sub, union, ids)


def _incl(a, b):
    return (a & ~b) == 0


def axioms_batch(tables: np.ndarray, n: int) -> dict:
    """Truth of every axiom for each row of tables (shape (N, 2^n))."""
    T = np.asarray(tables, dtype=np.int64)
    L = _lattice(n)
    ids = L.ids
    N = T.shape[0]
    # inc[k, X, Y]: T[X] ⊆ T[Y]
    inc = _incl(T[:, :, None], T[:, None, :])
    nonsub = ~L.sub[None]
    out = {}
    out["a"] = _incl(ids[None, :], T).all(1)
    out["b"] = (inc | nonsub).all((1, 2))
    TT = np.take_along_axis(T, T, axis=1)
    out["c"] = _incl(TT, T).all(1)
    # union of T[Y] over (nonempty) finite subsets Y of X; every subset of a
    # finite universe is finite
    below = np.zeros_like(T)
    below_ne = np.zeros_like(T)
    for y in range(L.S):
        mask = L.sub[y]                       # sets X containing y
        below[:, mask] |= T[:, y:y + 1]
        if y:
            below_ne[:, mask] |= T[:, y:y + 1]
    out["d"] = _incl(T, below).all(1)
    cond = _incl(ids[None, :, None], T[:, None, :])        # X ⊆ T[Y]
    out["e"] = (~cond | inc).all((1, 2))
    TU = T[:, L.union]                                      # T[X ∪ Y]
    out["f"] = (~cond | _incl(TU, T[:, None, :])).all((1, 2))
    # X ⊆ Y ⊆ T[X] implies T[Y] ⊆ T[X]
    cond_g = L.sub[None] & _incl(ids[None, None, :], T[:, :, None])
    out["g"] = (~cond_g | inc.transpose(0, 2, 1)).all((1, 2))
    out["h"] = _incl(below, T).all(1)
    out["i"] = _incl(T[:, 1:], below_ne[:, 1:]).all(1) if L.S > 1 else np.ones(N, bool)
    out["j"] = _maximalizable(T, L)
    return out


def _maximalizable(T, L):
    """j†: whenever α ∉ T[X] some maximal Y ⊇ X has α ∉ T[Y].  Evaluated
    literally: the candidate family is finite and contains X, so it has
    maximal members; we still compute them to keep the check honest."""
    N = T.shape[0]
    ok = np.ones(N, bool)
    for a in range(L.n):
        bit = 1 << a
        out_a = (T & bit) == 0                 # α ∉ T[Y]
        # maximal in {Y : α ∉ T[Y]}: no proper superset also avoids α
        proper = L.sub & (L.ids[:, None] != L.ids[None, :])
        has_bigger = (out_a[:, None, :] & proper[None]).any(2)
        maximal = out_a & ~has_bigger
        # for X with α ∉ T[X], need maximal Y with X ⊆ Y
        reach = (maximal[:, None, :] & L.sub[None]).any(2)
        ok &= (~out_a | reach).all(1)
    return ok


def check_operator_axioms(op: ExtensionalOperator) -> dict:
    n = len(op.universe)
    if n > MAX_EXHAUSTIVE:
        raise UniverseTooLarge(f"|U| = {n} exceeds {MAX_EXHAUSTIVE}")
    res = axioms_batch(op.table[None, :], n)
    return {k: bool(v[0]) for k, v in res.items()}


def _implication_failures(ax: dict):
    """name -> boolean array of rows violating the implication."""
    return {name: np.logical_and.reduce([ax[p] for p in prem]) & ~ax[concl]
            for name, prem, concl in IMPLICATIONS}


@dataclass
class AllHold:
    operators: int
    nontrivial: dict = field(default_factory=dict)   # implication -> rows with premises true
    seed: int | None = None

    def __bool__(self):
        return True

    def to_json(self):
        return {"result": "AllHold", "operators": self.operators,
                "premises_met": self.nontrivial, "seed": self.seed}


@dataclass
class Violation:
    implication: str
    table: list
    seed: int | None = None

    def __bool__(self):
        return False

    def to_json(self):
        return {"result": "Violation", "implication": self.implication,
                "table": self.table, "seed": self.seed}


def _all_tables(n):
    S = 1 << n
    ids = np.arange(S ** S, dtype=np.int64)
    cols = [(ids // S ** k) % S for k in range(S)]
    return np.stack(cols, axis=1)


def _sample_tables(n, count, rng: np.random.Generator):
    """Half uniform tables, half perturbed closure operators (so that the
    premises of every implication are met reasonably often)."""
    S = 1 << n
    k = count // 2
    uni = rng.integers(0, S, size=(k, S))
    fams = list(closure_systems(n))
    base = np.array([[_cn_mask(f, x) & (S - 1) for x in range(S)] for f in fams])
    pick = base[rng.integers(0, len(fams), size=count - k)]
    flips = rng.random((count - k, S)) < 1.0 / S
    noise = rng.integers(0, S, size=(count - k, S))
    near = np.where(flips, pick ^ noise, pick)
    return np.concatenate([uni, near])


def verify_con_connections(n: int, samples: int | None = None, seed: int = 0,
                           batch: int = 20000):
    """Check implications i–xii over all operators on an n-element universe
    (samples=None) or over a seeded sample."""
    if n > 3:
        raise UniverseTooLarge("operator space is explored for |U| <= 3")
    if samples is None:
        if n == 3:
            raise UniverseTooLarge("exhaustive search is for |U| <= 2; pass samples")
        tables = _all_tables(n)
        seed = None
    else:
        tables = _sample_tables(n, samples, np.random.default_rng(seed))
    met = {name: 0 for name, _, _ in IMPLICATIONS}
    for start in range(0, len(tables), batch):
        chunk = tables[start:start + batch]
        ax = axioms_batch(chunk, n)
        for name, prem, concl in IMPLICATIONS:
            pm = np.logical_and.reduce([ax[p] for p in prem])
            met[name] += int(pm.sum())
            bad = np.flatnonzero(pm & ~ax[concl])
            if bad.size:
                return Violation(name, chunk[bad[0]].tolist(), seed)
    return AllHold(len(tables), met, seed)


# --------------------------------------------------------------------------
# relation backends

@dataclass(frozen=True)
class ConsequenceBackend:
    derives: Callable[[frozenset, Formula], bool]
    structural: bool = False
    finitary: bool = False
    name: str = ""

    def __call__(self, X, f):
        return self.derives(frozenset(X), f)


def matrix_backend(m) -> ConsequenceBackend:
    ms = m if isinstance(m, (list, tuple)) else [m]
    label = ",".join(x.algebra.name or "M" for x in ms)
    return ConsequenceBackend(lambda X, f: matrix_consequence(ms, X, f),
                              structural=True, finitary=True, name=f"⊨[{label}]")


def intersection(backends) -> ConsequenceBackend:
    bs = list(backends)
    return ConsequenceBackend(lambda X, f: all(b.derives(X, f) for b in bs),
                              structural=all(b.structural for b in bs),
                              finitary=all(b.finitary for b in bs),
                              name="∩".join(b.name for b in bs))


def nonempty(b: ConsequenceBackend) -> ConsequenceBackend:
    """X ⊢° α iff X ⊢ α and X is nonempty."""
    return ConsequenceBackend(lambda X, f: bool(X) and b.derives(X, f),
                              structural=b.structural, finitary=b.finitary,
                              name=b.name + "°")


def _report(prop, cases, failures, seed, **extra):
    r = {"property": prop, "cases": cases, "failures": failures, "seed": seed}
    r.update(extra)
    return r


def _run(fn, n, threads):
    if threads <= 1:
        return [fn(k) for k in range(n)]
    with ThreadPoolExecutor(threads) as ex:
        return list(ex.map(fn, range(n)))


def relation_axioms_sample(b: ConsequenceBackend, cases: int = 1000, seed: int = 0,
                           names=("p", "q"), depth: int = 3, threads: int = 1) -> list:
    """Sampled reflexivity, monotonicity and cut (X ⊢ β and Z,β ⊢ α give X,Z ⊢ α).
    Each case draws its formulas from its own seeded generator, so the
    outcome does not depend on the thread count."""
    def fset(rng, k):
        return frozenset(random_formula(rng, names, depth) for _ in range(k))

    def one(k):
        rng = random.Random(f"{seed}:{k}")
        X, Y, Z = fset(rng, rng.randint(0, 2)), fset(rng, rng.randint(0, 2)), fset(rng, rng.randint(0, 2))
        a, beta = random_formula(rng, names, depth), random_formula(rng, names, depth)
        out = []
        if not b.derives(X | {a}, a):
            out.append(("reflexivity", {"X": _strs(X | {a}), "f": to_infix(a)}))
        if b.derives(X, a) and not b.derives(X | Y, a):
            out.append(("monotonicity", {"X": _strs(X), "Y": _strs(Y), "f": to_infix(a)}))
        if b.derives(X, beta) and b.derives(Z | {beta}, a) and not b.derives(X | Z, a):
            out.append(("cut", {"X": _strs(X), "Z": _strs(Z), "beta": to_infix(beta),
                                "f": to_infix(a)}))
        return out

    results = _run(one, cases, threads)
    reports = []
    for prop in ("reflexivity", "monotonicity", "cut"):
        fails = [inp for r in results for p, inp in r if p == prop]
        reports.append(_report(prop, cases, fails, seed, backend=b.name))
    return reports


def _strs(X):
    return sorted(to_infix(x) for x in X)


def random_substitution(rng, names=("p", "q"), depth=2, targets=None) -> Substitution:
    targets = targets or names
    return Substitution({x: random_formula(rng, targets, depth) for x in names})


def structurality_sample(b: ConsequenceBackend, cases: int = 1000, seed: int = 0,
                         names=("p", "q"), depth: int = 3) -> dict:
    rng = random.Random(seed)
    fails = []
    for _ in range(cases):
        X = frozenset(random_formula(rng, names, depth) for _ in range(rng.randint(0, 2)))
        a = random_formula(rng, names, depth)
        s = random_substitution(rng, names)
        if b.derives(X, a) and not b.derives(frozenset(apply(s, x) for x in X), apply(s, a)):
            fails.append({"X": _strs(X), "f": to_infix(a), "sigma": repr(s)})
    return _report("structurality", cases, fails, seed, backend=b.name)


# --------------------------------------------------------------------------
# Lindenbaum matrix harness and Brown–Suszko sampling

def schema_instances(schemata, atoms) -> set:
    """All instances of the metaformulas with metavariables ranging over atoms."""
    atoms = list(atoms)
    out = set()
    for m in schemata:
        mvs = sorted(metavariables(m))
        for combo in itertools.product(atoms, repeat=len(mvs)):
            out.add(instantiate(m, dict(zip(mvs, combo))))
    return out


def _is_instance(f, schemata):
    return any(match_instance(m, f) is not None for m in schemata)


def lindenbaum_property_harness(b: ConsequenceBackend, schemata, f: Formula, sample,
                                atoms=None) -> dict:
    """For each σ: if X ⊢ f then σ(X) consists of schema instances and
    σ(X) ⊢ σ(f), where X is the instance set of the schemata over the atoms
    (default: subformulas of f).  The designated set of the Lindenbaum matrix
    is only probed by membership queries."""
    atoms = sorted(subformulas(f), key=to_infix) if atoms is None else list(atoms)
    X = frozenset(schema_instances(schemata, atoms))
    theorem = b.derives(X, f)
    fails = []
    if theorem:
        for s in sample:
            sX = frozenset(apply(s, x) for x in X)
            if not all(_is_instance(x, schemata) for x in sX):
                fails.append({"sigma": repr(s), "reason": "σ(X) leaves the instance set"})
            elif not b.derives(sX, apply(s, f)):
                fails.append({"sigma": repr(s), "reason": "σ(f) not derivable"})
    return _report("lindenbaum", len(sample), fails, None, theorem=theorem,
                   premises=len(X), formula=to_infix(f))


def brown_suszko_sample(b: ConsequenceBackend, X, s: Substitution, universe,
                        samples: int = 1000, seed: int = 0) -> dict:
    """Pointwise closedness, on the universe, of the preimage under s of the
    theory generated by X."""
    X = frozenset(X)
    U = list(universe)
    theory = {a for a in U if b.derives(X, a)}
    pre = [a for a in U if b.derives(X, apply(s, a))]
    pre_set = set(pre)
    rng = random.Random(seed)
    fails = []
    if pre:
        for _ in range(samples):
            Y = frozenset(rng.choice(pre) for _ in range(rng.randint(0, 2)))
            a = rng.choice(U)
            if a not in pre_set and b.derives(Y, a):
                fails.append({"Y": _strs(Y), "f": to_infix(a)})
    return _report("brown-suszko", samples, fails, seed,
                   theory_size=len(theory), preimage_size=len(pre),
                   preimage_is_theory=pre_set == theory)
