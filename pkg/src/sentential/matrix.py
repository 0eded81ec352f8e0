"""Finite algebras and logical matrices: evaluation, validity and matrix
consequence by exhaustive (numpy-vectorized) enumeration, the standard
matrices (two-valued, three-valued Łukasiewicz with and without modalities,
Gödel chains), LC decision, and exact rational Łukasiewicz evaluation."""

from __future__ import annotations

import itertools
import json
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping

import numpy as np

from .language import App, Const, Formula, Var, subformulas, sorted_vars, variables

DEFAULT_BUDGET = 10**8
_CHUNK = 1 << 16


class BudgetExceeded(RuntimeError):
    pass


class SignatureMismatch(ValueError):
    pass


class UnassignedVariable(KeyError):
    pass


class BadParameter(ValueError):
    pass


class OutOfRange(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class FiniteAlgebra:
    """elements: names in a fixed order; ops: connective -> integer table of
    shape (n,)*arity indexed by element positions; consts: name -> position."""

    elements: tuple
    ops: dict
    consts: dict = field(default_factory=dict)
    aliases: dict = field(default_factory=dict)
    name: str = ""

    def __post_init__(self):
        n = len(self.elements)
        if len(set(self.elements)) != n:
            raise ValueError("element names must be distinct")
        for op, t in self.ops.items():
            t = np.asarray(t)
            if t.ndim < 1 or any(d != n for d in t.shape):
                raise ValueError(f"table of {op} is not total over {n} elements")
            if t.min() < 0 or t.max() >= n:
                raise ValueError(f"table of {op} leaves the carrier")
        for c, i in self.consts.items():
            if not 0 <= i < n:
                raise ValueError(f"constant {c} not interpreted by an element")

    @property
    def size(self):
        return len(self.elements)

    def arity(self, op):
        return self.ops[op].ndim

    def index(self, name) -> int:
        name = self.aliases.get(name, name)
        try:
            return self.elements.index(name)
        except ValueError:
            raise KeyError(f"{name!r} is not an element of {self.name or 'the algebra'}") from None

    def op(self, name, *xs):
        """Apply an operation to element names."""
        t = self.ops[name]
        return self.elements[int(t[tuple(self.index(x) for x in xs)])]


@dataclass(frozen=True, eq=False)
class Matrix:
    algebra: FiniteAlgebra
    designated: frozenset
    degenerate: bool = False

    def __post_init__(self):
        if not set(self.designated) <= set(self.algebra.elements):
            raise ValueError("designated set must consist of elements")
        if self.algebra.size < 2 and not self.degenerate:
            raise ValueError("a matrix needs at least two elements unless flagged degenerate")

    @property
    def name(self):
        return self.algebra.name

    @property
    def elements(self):
        return self.algebra.elements

    @property
    def mask(self):
        return np.array([e in self.designated for e in self.algebra.elements])

    def is_designated(self, x) -> bool:
        return self.algebra.elements[self.algebra.index(x)] in self.designated

    def with_designated(self, designated, name=None):
        alg = self.algebra
        if name:
            alg = FiniteAlgebra(alg.elements, alg.ops, alg.consts, alg.aliases, name)
        return Matrix(alg, frozenset(designated))


# --------------------------------------------------------------------------
# evaluation

def _check_signature(alg: FiniteAlgebra, f: Formula):
    for g in subformulas(f):
        if type(g) is App:
            if g.op not in alg.ops:
                raise SignatureMismatch(f"{alg.name or 'algebra'} has no operation {g.op}")
            if alg.ops[g.op].ndim != len(g.args):
                raise SignatureMismatch(f"{g.op} has arity {alg.ops[g.op].ndim} here")
        elif type(g) is Const and g.name not in alg.consts:
            raise SignatureMismatch(f"{alg.name or 'algebra'} does not interpret {g.name}")
        elif type(g) not in (Var, Const):
            raise SignatureMismatch("metavariables cannot be evaluated")


def _alg(m):
    return m.algebra if isinstance(m, Matrix) else m


def evaluate(m, v: Mapping, f: Formula):
    """Value (element name) of f under the valuation v (variable -> element)."""
    alg = _alg(m)
    _check_signature(alg, f)
    env = {}
    for x in variables(f):
        if x not in v:
            raise UnassignedVariable(x)
        env[x] = alg.index(v[x])
    return alg.elements[_eval_idx(alg, f, env, {})]


def _eval_idx(alg, f, env, memo):
    t = type(f)
    if t is Var:
        return env[f.name]
    if t is Const:
        return alg.consts[f.name]
    r = memo.get(f)
    if r is None:
        r = int(alg.ops[f.op][tuple(_eval_idx(alg, a, env, memo) for a in f.args)])
        memo[f] = r
    return r


def eval_vectorized(alg: FiniteAlgebra, f: Formula, env: dict, size: int, memo=None):
    """Evaluate f on a batch of valuations; env maps each variable to an
    integer array of element positions."""
    memo = {} if memo is None else memo
    return _eval_vec(alg, f, env, size, memo)


def _eval_vec(alg, f, env, size, memo):
    t = type(f)
    if t is Var:
        return env[f.name]
    if t is Const:
        return np.full(size, alg.consts[f.name], dtype=np.int64)
    r = memo.get(f)
    if r is None:
        args = tuple(_eval_vec(alg, a, env, size, memo) for a in f.args)
        r = alg.ops[f.op][args]
        memo[f] = r
    return r


def _valuation_batches(n: int, names: list, budget: int):
    """Yield (start, env) for all valuations in lexicographic order (first
    variable most significant, elements in carrier order)."""
    k = len(names)
    total = n ** k
    if total > budget:
        raise BudgetExceeded(f"{n}^{k} = {total} valuations exceed the budget of {budget}")
    weights = [n ** (k - 1 - i) for i in range(k)]
    for start in range(0, total, _CHUNK):
        idx = np.arange(start, min(total, start + _CHUNK), dtype=np.int64)
        env = {x: (idx // w) % n for x, w in zip(names, weights)}
        yield start, idx.size, env


@dataclass
class Verdict:
    valid: bool
    witness: dict | None
    evaluations: int

    def to_json(self):
        return {"valid": self.valid, "witness": self.witness, "evaluations": self.evaluations}


def _search(m: Matrix, premises, f, budget):
    alg = m.algebra
    for g in list(premises) + [f]:
        _check_signature(alg, g)
    names = sorted_vars(set().union(variables(f), *(variables(g) for g in premises)))
    mask = m.mask
    count = 0
    for start, size, env in _valuation_batches(alg.size, names, budget):
        memo = {}
        ok = np.ones(size, dtype=bool)
        for g in premises:
            ok &= mask[_eval_vec(alg, g, env, size, memo)]
        bad = ok & ~mask[_eval_vec(alg, f, env, size, memo)]
        hits = np.flatnonzero(bad)
        if hits.size:
            i = int(hits[0])
            count += i + 1
            return Verdict(False, {x: alg.elements[int(env[x][i])] for x in names}, count)
        count += size
    return Verdict(True, None, count)


def check_validity(m: Matrix, f: Formula, budget: int = DEFAULT_BUDGET) -> Verdict:
    return _search(m, [], f, budget)


def is_valid(m: Matrix, f: Formula, budget: int = DEFAULT_BUDGET) -> bool:
    return _search(m, [], f, budget).valid


def find_refutation(m: Matrix, f: Formula, budget: int = DEFAULT_BUDGET):
    """Lexicographically least valuation sending f outside the designated set."""
    return _search(m, [], f, budget).witness


def check_consequence(m, X: Iterable[Formula], f: Formula, budget=DEFAULT_BUDGET) -> Verdict:
    if isinstance(m, (list, tuple)):
        total = 0
        for mm in m:
            v = _search(mm, list(X), f, budget)
            total += v.evaluations
            if not v.valid:
                return Verdict(False, dict(v.witness, matrix=mm.name), total)
        return Verdict(True, None, total)
    return _search(m, list(X), f, budget)


def matrix_consequence(m, X: Iterable[Formula], f: Formula, budget=DEFAULT_BUDGET) -> bool:
    """X ⊨_m f; m may be a single matrix or a list (consequence of the class)."""
    return check_consequence(m, X, f, budget).valid


def truth_table(alg: FiniteAlgebra, f: Formula, names=None):
    """Vector of values of f over all valuations of names (default: its variables)."""
    names = sorted_vars(variables(f)) if names is None else list(names)
    out = []
    for _, size, env in _valuation_batches(alg.size, names, DEFAULT_BUDGET):
        out.append(np.broadcast_to(_eval_vec(alg, f, env, size, {}), (size,)))
    return np.concatenate(out) if out else np.zeros(0, dtype=np.int64)


# --------------------------------------------------------------------------
# the standard matrices

def _grid(n, fn, arity):
    t = np.zeros((n,) * arity, dtype=np.int64)
    for xs in itertools.product(range(n), repeat=arity):
        t[xs] = fn(*xs)
    return t


def _with_iff(ops, n):
    if "↔" not in ops and "→" in ops and "∧" in ops:
        imp, conj = ops["→"], ops["∧"]
        ops["↔"] = _grid(n, lambda x, y: conj[imp[x, y], imp[y, x]], 2)
    return ops


def chain_algebra(names, name=""):
    """Gödel (relative pseudocomplement) operations on a chain, bottom first."""
    n = len(names)
    top = n - 1
    ops = {
        "∧": _grid(n, min, 2),
        "∨": _grid(n, max, 2),
        "→": _grid(n, lambda x, y: top if x <= y else y, 2),
        "¬": _grid(n, lambda x: top if x == 0 else 0, 1),
    }
    return FiniteAlgebra(tuple(names), _with_iff(ops, n), {"⊤": top, "⊥": 0}, {}, name)


def b2() -> Matrix:
    alg = chain_algebra(["0", "1"], "B2")
    return Matrix(alg, frozenset({"1"}))


def _l3_algebra(name, modal=False):
    n = 3
    ops = {
        "∧": _grid(n, min, 2),
        "∨": _grid(n, max, 2),
        "→": _grid(n, lambda x, y: min(2, 2 - x + y), 2),
        "¬": _grid(n, lambda x: 2 - x, 1),
    }
    if modal:
        ops["□"] = np.array([0, 0, 2])
        ops["◇"] = np.array([0, 2, 2])
    return FiniteAlgebra(("0", "τ", "1"), _with_iff(ops, n), {"⊤": 2, "⊥": 0}, {"t": "τ"}, name)


def l3() -> Matrix:
    return Matrix(_l3_algebra("L3"), frozenset({"1"}))


def l3_tau() -> Matrix:
    return Matrix(_l3_algebra("L3_tau"), frozenset({"τ", "1"}))


def l3_modal() -> Matrix:
    return Matrix(_l3_algebra("L3_modal", modal=True), frozenset({"1"}))


def godel_names(n):
    return ["0"] + [f"t{i}" for i in range(1, n - 1)] + ["1"]


def godel(n: int) -> Matrix:
    if n < 2:
        raise BadParameter("a Gödel chain needs at least 2 elements")
    alg = chain_algebra(godel_names(n), f"G{n}")
    if n == 3:
        alg.aliases.update({"τ": "t1", "t": "t1"})
    return Matrix(alg, frozenset({"1"}))


def g3_prime() -> Matrix:
    g = godel(3)
    return g.with_designated({"t1", "1"}, "G3_prime")


_BUILTINS = {"b2": b2, "l3": l3, "l3_tau": l3_tau, "l3_modal": l3_modal, "g3_prime": g3_prime}


def builtin(name: str) -> Matrix:
    key = name.strip().lower().replace("ł", "l")
    if key in _BUILTINS:
        return _BUILTINS[key]()
    m = re.fullmatch(r"g(?:odel)?[\(_]?(\d+)\)?", key)
    if m:
        return godel(int(m.group(1)))
    raise BadParameter(f"unknown matrix {name!r}")


BUILTIN_NAMES = sorted(_BUILTINS) + ["godel(n)"]


# --------------------------------------------------------------------------
# JSON

def matrix_to_json(m: Matrix):
    alg = m.algebra
    ops = {}
    for op, t in alg.ops.items():
        ops[op] = {"arity": int(t.ndim),
                   "table": np.vectorize(lambda i: alg.elements[i])(t).tolist()}
    return {"name": alg.name, "elements": list(alg.elements), "designated":
            [e for e in alg.elements if e in m.designated], "ops": ops,
            "consts": {c: alg.elements[i] for c, i in alg.consts.items()}}


def matrix_from_json(obj) -> Matrix:
    if isinstance(obj, str):
        obj = json.loads(obj)
    elems = tuple(obj["elements"])
    pos = {e: i for i, e in enumerate(elems)}
    ops = {}
    for op, spec in obj["ops"].items():
        t = np.vectorize(lambda e: pos[e])(np.array(spec["table"], dtype=object))
        t = np.asarray(t, dtype=np.int64)
        if t.ndim != spec.get("arity", t.ndim):
            raise ValueError(f"table of {op} does not match its arity")
        ops[op] = t
    ops = _with_iff(ops, len(elems))
    consts = {c: pos[e] for c, e in obj.get("consts", {}).items()}
    alg = FiniteAlgebra(elems, ops, consts, {}, obj.get("name", ""))
    return Matrix(alg, frozenset(obj["designated"]))


# --------------------------------------------------------------------------
# LC = intersection of the logics of all Gödel chains

def lc_check(f: Formula, budget: int = DEFAULT_BUDGET):
    """Decide LC-validity: a refutation in some chain yields one in a chain
    with at most |Sub(f)| + 2 elements (values of the subformulas plus both
    bounds form a subalgebra)."""
    n = len(subformulas(f)) + 2
    v = check_validity(godel(n), f, budget)
    return {"valid": v.valid, "via": f"G{n}", "witness": v.witness, "evaluations": v.evaluations}


def lc_is_valid(f: Formula, budget: int = DEFAULT_BUDGET) -> bool:
    return lc_check(f, budget)["valid"]


# --------------------------------------------------------------------------
# infinite-valued Łukasiewicz logic over exact rationals

def _fr(x):
    x = Fraction(x)
    if not 0 <= x <= 1:
        raise OutOfRange(f"{x} is outside [0, 1]")
    return x


def lukasiewicz_rational_eval(v: Mapping, f: Formula) -> Fraction:
    t = type(f)
    if t is Var:
        if f.name not in v:
            raise UnassignedVariable(f.name)
        return _fr(v[f.name])
    if t is Const:
        return {"⊤": Fraction(1), "⊥": Fraction(0)}[f.name]
    xs = [lukasiewicz_rational_eval(v, a) for a in f.args]
    op = f.op
    if op == "¬":
        return 1 - xs[0]
    if op == "→":
        return min(Fraction(1), 1 - xs[0] + xs[1])
    if op == "∧":
        return min(xs)
    if op == "∨":
        return max(xs)
    if op == "↔":
        a, b = xs
        return min(min(Fraction(1), 1 - a + b), min(Fraction(1), 1 - b + a))
    raise SignatureMismatch(f"no rational Łukasiewicz operation {op}")


def rational_grid(d: int):
    return sorted({Fraction(a, b) for b in range(1, d + 1) for a in range(b + 1)})


def grid_refute(f: Formula, d: int):
    """First valuation with values of denominator <= d at which f is not 1."""
    names = sorted_vars(variables(f))
    grid = rational_grid(d)
    for combo in itertools.product(grid, repeat=len(names)):
        v = dict(zip(names, combo))
        if lukasiewicz_rational_eval(v, f) != 1:
            return v
    return None


# --------------------------------------------------------------------------
# homomorphisms and subalgebras

def check_hom_filter(h: Mapping, m1: Matrix, m2: Matrix) -> bool:
    """True iff h is a surjective homomorphism of the algebra of m1 onto that
    of m2 mapping designated elements to designated elements."""
    a1, a2 = m1.algebra, m2.algebra
    try:
        hi = np.array([a2.index(h[e]) for e in a1.elements])
    except KeyError:
        return False
    if set(hi.tolist()) != set(range(a2.size)):
        return False
    for op, t1 in a1.ops.items():
        if op not in a2.ops:
            continue
        t2 = a2.ops[op]
        if t2.ndim != t1.ndim:
            return False
        grids = np.indices(t1.shape)
        lhs = hi[t1]
        rhs = t2[tuple(hi[g] for g in grids)]
        if not np.array_equal(lhs, rhs):
            return False
    for c, i in a1.consts.items():
        if c in a2.consts and hi[i] != a2.consts[c]:
            return False
    return all(a2.elements[hi[a1.index(d)]] in m2.designated for d in m1.designated)


def subuniverse_closure(m, seed: Iterable, ops: Iterable[str] | None = None) -> set:
    """Least superset of seed closed under the chosen operations (all by
    default) and containing the chosen constants (all when ops is None)."""
    alg = _alg(m)
    if ops is None:
        ops = list(alg.ops)
        consts = list(alg.consts)
    else:
        ops = list(ops)
        consts = [c for c in ops if c in alg.consts]
        ops = [o for o in ops if o in alg.ops]
    cur = {alg.index(x) for x in seed} | {alg.consts[c] for c in consts}
    while True:
        new = set(cur)
        for op in ops:
            t = alg.ops[op]
            for xs in itertools.product(sorted(cur), repeat=t.ndim):
                new.add(int(t[xs]))
        if new == cur:
            return {alg.elements[i] for i in cur}
        cur = new


def describe(m: Matrix) -> str:
    alg = m.algebra
    lines = [f"{alg.name}: elements {list(alg.elements)}, designated "
             f"{[e for e in alg.elements if e in m.designated]}"]
    for op, t in alg.ops.items():
        if t.ndim == 1:
            lines.append(f"  {op}: " + " ".join(f"{alg.elements[i]}↦{alg.elements[int(t[i])]}"
                                                 for i in range(alg.size)))
        elif t.ndim == 2:
            lines.append(f"  {op}:")
            for i in range(alg.size):
                lines.append("    " + alg.elements[i] + " | " +
                             " ".join(alg.elements[int(t[i, j])] for j in range(alg.size)))
    return "\n".join(lines)
