"""Formulas over a sentential signature: construction, parsing, printing,
structural measures, prime-labelled formula trees and replacement."""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Iterator, Sequence


# --------------------------------------------------------------------------
# errors

class ParseError(ValueError):
    def __init__(self, message, position=None):
        self.position = position
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)


class UnreadableWord(ParseError):
    pass


class ArityMismatch(ParseError):
    pass


class UnbalancedParentheses(ParseError):
    pass


class BadPath(ValueError):
    pass


class NotATree(ValueError):
    def __init__(self, reason):
        self.reason = reason
        super().__init__(reason)


# --------------------------------------------------------------------------
# formulas

class Formula:
    """Base class. Formulas are immutable and hash-consed by structure."""

    __slots__ = ()

    is_atom = False

    def __iter__(self):
        return iter(())

    # convenience constructors so tests can write p >> q etc.
    def __rshift__(self, other):
        return App("→", (self, other))

    def __and__(self, other):
        return App("∧", (self, other))

    def __or__(self, other):
        return App("∨", (self, other))

    def __invert__(self):
        return App("¬", (self,))

    def __str__(self):
        return to_infix(self)


class Var(Formula):
    __slots__ = ("name", "_hash")
    is_atom = True

    def __init__(self, name: str):
        self.name = name
        self._hash = hash(("v", name))

    def __eq__(self, other):
        return self is other or (type(other) is Var and other.name == self.name)

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"Var({self.name!r})"

    def __reduce__(self):
        return (Var, (self.name,))


class Const(Formula):
    __slots__ = ("name", "_hash")
    is_atom = True

    def __init__(self, name: str):
        self.name = name
        self._hash = hash(("c", name))

    def __eq__(self, other):
        return self is other or (type(other) is Const and other.name == self.name)

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"Const({self.name!r})"

    def __reduce__(self):
        return (Const, (self.name,))


class MVar(Formula):
    """Metavariable; leaf of a metaformula. Printed in bold Greek when known."""

    __slots__ = ("name", "_hash")
    is_atom = True

    def __init__(self, name: str):
        self.name = name
        self._hash = hash(("m", name))

    def __eq__(self, other):
        return self is other or (type(other) is MVar and other.name == self.name)

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"MVar({self.name!r})"

    def __reduce__(self):
        return (MVar, (self.name,))


class App(Formula):
    __slots__ = ("op", "args", "_hash", "_degree")

    def __init__(self, op: str, args: Sequence[Formula]):
        self.op = op
        self.args = tuple(args)
        self._hash = hash((op, self.args))
        self._degree = 1 + sum(degree(a) for a in self.args)

    def __eq__(self, other):
        if self is other:
            return True
        return (type(other) is App and self._hash == other._hash
                and self.op == other.op and self.args == other.args)

    def __hash__(self):
        return self._hash

    def __iter__(self):
        return iter(self.args)

    def __repr__(self):
        return f"App({self.op!r}, {list(self.args)!r})"

    def __reduce__(self):
        # cached hashes are per-process; rebuild on unpickling
        return (App, (self.op, self.args))


def Not(a):
    return App("¬", (a,))


def And(a, b):
    return App("∧", (a, b))


def Or(a, b):
    return App("∨", (a, b))


def Imp(a, b):
    return App("→", (a, b))


def Iff(a, b):
    return App("↔", (a, b))


def Box(a):
    return App("□", (a,))


def Dia(a):
    return App("◇", (a,))


TOP = Const("⊤")
BOT = Const("⊥")


def expand_iff(f: Formula) -> Formula:
    """Rewrite every a↔b as ((a→b)∧(b→a))."""
    if type(f) is not App:
        return f
    args = tuple(expand_iff(a) for a in f.args)
    if f.op == "↔":
        a, b = args
        return And(Imp(a, b), Imp(b, a))
    return App(f.op, args)


# --------------------------------------------------------------------------
# signatures

ALIASES = {
    "&": "∧", "|": "∨", "->": "→", "~": "¬", "<->": "↔",
    "T": "⊤", "F": "⊥", "[]": "□", "<>": "◇",
}

_VAR_RE = re.compile(r"[a-z](?:[0-9]+)?")


@dataclass(frozen=True)
class Signature:
    connectives: dict = field(default_factory=dict)    # name -> arity
    constants: tuple = ()
    aliases: dict = field(default_factory=dict)        # spelling -> canonical name

    def __post_init__(self):
        names = list(self.connectives) + list(self.constants)
        if len(set(names)) != len(names):
            raise ValueError("connective and constant names must be pairwise disjoint")
        for name, arity in self.connectives.items():
            if arity < 1:
                raise ValueError(f"connective {name} needs arity >= 1")
        # a constant spelled like a variable (e.g. "a") shadows that variable:
        # the tokenizer always prefers signature symbols

    def __hash__(self):
        return hash((tuple(sorted(self.connectives.items())), self.constants))

    def arity(self, op):
        return self.connectives[op]

    def tokens(self):
        """All spellings (canonical and alias) -> canonical name."""
        out = {n: n for n in self.connectives}
        out.update({c: c for c in self.constants})
        for spelling, canon in self.aliases.items():
            if canon in out:
                out[spelling] = canon
        return out

    def restrict(self, ops: Iterable[str], constants: Iterable[str] = ()):
        ops = set(ops)
        return Signature({k: v for k, v in self.connectives.items() if k in ops},
                         tuple(c for c in self.constants if c in set(constants)),
                         self.aliases)

    def check(self, f: Formula):
        """Raise ArityMismatch / UnreadableWord if f is not over this signature."""
        for g in walk(f):
            if type(g) is App:
                if g.op not in self.connectives:
                    raise UnreadableWord(f"connective {g.op!r} not in signature")
                if len(g.args) != self.connectives[g.op]:
                    raise ArityMismatch(f"{g.op} expects {self.connectives[g.op]} arguments")
            elif type(g) is Const and g.name not in self.constants:
                raise UnreadableWord(f"constant {g.name!r} not in signature")


# the standard signature: the four classical connectives plus the biconditional,
# the two truth constants and the two modal operators
STANDARD = Signature({"¬": 1, "∧": 2, "∨": 2, "→": 2, "↔": 2, "□": 1, "◇": 1},
                     ("⊤", "⊥"), ALIASES)
# the plain language of the Hilbert calculi: ¬, ∧, ∨, →
LA = STANDARD.restrict(["¬", "∧", "∨", "→"])


# --------------------------------------------------------------------------
# traversal and measures

def walk(f: Formula) -> Iterator[Formula]:
    """Pre-order traversal of all subformula occurrences."""
    stack = [f]
    while stack:
        g = stack.pop()
        yield g
        if type(g) is App:
            stack.extend(reversed(g.args))


def degree(f: Formula) -> int:
    if type(f) is App:
        return f._degree
    return 0


def subformulas(f: Formula) -> set:
    return set(walk(f))


def variables(f: Formula) -> set:
    return {g.name for g in walk(f) if type(g) is Var}


def metavariables(f: Formula) -> set:
    return {g.name for g in walk(f) if type(g) is MVar}


def var_key(name: str):
    """Natural order on variable names: p, q, r, ..., then p1 < p2 < p10."""
    m = re.fullmatch(r"([a-z]+)([0-9]*)", name)
    if not m:
        return (name, -1)
    return (m.group(1), int(m.group(2)) if m.group(2) else -1)


def sorted_vars(names: Iterable[str]) -> list:
    return sorted(set(names), key=var_key)


# --------------------------------------------------------------------------
# printing

def to_infix(f: Formula) -> str:
    if type(f) is Var or type(f) is Const:
        return f.name
    if type(f) is MVar:
        return f.name
    n = len(f.args)
    if n == 1:
        return f.op + to_infix(f.args[0])
    if n == 2:
        op = f" {f.op} " if f.op[0].isalnum() else f.op
        return "(" + to_infix(f.args[0]) + op + to_infix(f.args[1]) + ")"
    return f.op + "(" + ", ".join(to_infix(a) for a in f.args) + ")"


def to_prefix(f: Formula) -> str:
    """Polish notation. Tokens are separated by spaces unless all are one character."""
    toks = list(_prefix_tokens(f))
    if all(len(t) == 1 for t in toks):
        return "".join(toks)
    return " ".join(toks)


def _prefix_tokens(f):
    for g in walk(f):
        yield g.op if type(g) is App else g.name


def to_ascii(f: Formula) -> str:
    back = {"∧": "&", "∨": "|", "→": "->", "¬": "~", "↔": "<->",
            "⊤": "T", "⊥": "F", "□": "[]", "◇": "<>"}
    if type(f) is App:
        n = len(f.args)
        op = back.get(f.op, f.op)
        if n == 1:
            return op + to_ascii(f.args[0])
        if n == 2:
            return "(" + to_ascii(f.args[0]) + " " + op + " " + to_ascii(f.args[1]) + ")"
        return op + "(" + ", ".join(to_ascii(a) for a in f.args) + ")"
    return back.get(f.name, f.name) if type(f) is Const else f.name


# --------------------------------------------------------------------------
# parsing

_METAVARS = "𝛂𝛃𝛄𝛅𝛆𝛇𝛈𝛉𝛏𝛔"


def _tokenize(text: str, sig: Signature, metavars: bool):
    table = sig.tokens()
    spellings = sorted(table, key=len, reverse=True)
    i, out = 0, []
    while i < len(text):
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if ch in "(),":
            out.append((ch, ch, i))
            i += 1
            continue
        for s in spellings:
            if text.startswith(s, i):
                out.append(("sym", table[s], i))
                i += len(s)
                break
        else:
            m = _VAR_RE.match(text, i)
            if m:
                out.append(("var", m.group(0), i))
                i = m.end()
            elif metavars and ch in _METAVARS:
                j = i + 1
                while j < len(text) and text[j].isdigit():
                    j += 1
                out.append(("mvar", text[i:j], i))
                i = j
            else:
                raise UnreadableWord(f"unreadable symbol {ch!r}", i)
    return out


def parse(text: str, signature: Signature = STANDARD, notation: str = "infix",
          metavars: bool = False) -> Formula:
    """Read a formula. Infix: binary connectives parenthesized, unary
    connectives and atoms bare; connectives of arity >= 3 as F(a, b, c).
    A single unparenthesized binary connective at top level is tolerated."""
    toks = _tokenize(text, signature, metavars)
    if notation == "prefix":
        return _parse_prefix(toks, signature, text)
    if notation != "infix":
        raise ValueError(f"unknown notation {notation!r}")
    depth = 0
    for kind, _, pos in toks:
        if kind == "(":
            depth += 1
        elif kind == ")":
            depth -= 1
            if depth < 0:
                raise UnbalancedParentheses("unexpected ')'", pos)
    if depth:
        raise UnbalancedParentheses("missing ')'", len(text))
    p = _InfixParser(toks, signature, len(text))
    f = p.formula()
    if p.i < len(toks) and toks[p.i][0] == "sym" and signature.connectives.get(toks[p.i][1]) == 2:
        op = toks[p.i][1]
        p.i += 1
        g = p.formula()
        f = App(op, (f, g))
    if p.i != len(toks):
        raise UnreadableWord("trailing input", toks[p.i][2])
    return f


class _InfixParser:
    def __init__(self, toks, sig, end):
        self.toks, self.sig, self.i, self.end = toks, sig, 0, end

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else (None, None, self.end)

    def take(self):
        t = self.peek()
        if t[0] is None:
            raise ArityMismatch("formula ends too early", self.end)
        self.i += 1
        return t

    def formula(self):
        kind, val, pos = self.take()
        if kind == "var":
            return Var(val)
        if kind == "mvar":
            return MVar(val)
        if kind == "sym":
            if val in self.sig.constants:
                return Const(val)
            ar = self.sig.connectives[val]
            if ar == 1:
                return App(val, (self.formula(),))
            if ar == 2:
                raise ArityMismatch(f"binary {val} needs a left argument inside parentheses", pos)
            if self.take()[0] != "(":
                raise ArityMismatch(f"{val} expects a parenthesized argument list", pos)
            args = [self.formula()]
            while self.peek()[0] == ",":
                self.take()
                args.append(self.formula())
            close = self.take()
            if close[0] != ")":
                raise UnbalancedParentheses("expected ')'", close[2])
            if len(args) != ar:
                raise ArityMismatch(f"{val} expects {ar} arguments, got {len(args)}", pos)
            return App(val, args)
        if kind == "(":
            left = self.formula()
            k2, op, p2 = self.take()
            if k2 != "sym" or self.sig.connectives.get(op) != 2:
                raise ArityMismatch("expected a binary connective", p2)
            right = self.formula()
            close = self.take()
            if close[0] != ")":
                raise UnbalancedParentheses("expected ')'", close[2])
            return App(op, (left, right))
        raise UnreadableWord(f"unexpected {val!r}", pos)


def _parse_prefix(toks, sig, text):
    pos = 0

    def go():
        nonlocal pos
        if pos >= len(toks):
            raise ArityMismatch("a connective is missing arguments", len(text))
        kind, val, at = toks[pos]
        pos += 1
        if kind == "var":
            return Var(val)
        if kind == "mvar":
            return MVar(val)
        if kind == "sym":
            if val in sig.constants:
                return Const(val)
            return App(val, [go() for _ in range(sig.connectives[val])])
        raise UnreadableWord("parentheses are not used in prefix notation", at)

    f = go()
    if pos != len(toks):
        raise ArityMismatch("surplus symbols after a complete formula", toks[pos][2])
    return f


# --------------------------------------------------------------------------
# JSON

def to_json(f: Formula):
    if type(f) is Var:
        return {"var": f.name}
    if type(f) is Const:
        return {"const": f.name}
    if type(f) is MVar:
        return {"mvar": f.name}
    return {"app": {"op": f.op, "args": [to_json(a) for a in f.args]}}


def from_json(obj) -> Formula:
    if isinstance(obj, str):
        obj = json.loads(obj)
    if "var" in obj:
        return Var(obj["var"])
    if "const" in obj:
        return Const(obj["const"])
    if "mvar" in obj:
        return MVar(obj["mvar"])
    app = obj["app"]
    return App(ALIASES.get(app["op"], app["op"]), [from_json(a) for a in app["args"]])


# --------------------------------------------------------------------------
# formula trees with prime-product node ids

@lru_cache(maxsize=None)
def nth_prime(k: int) -> int:
    """k-th prime, 1-based (nth_prime(1) == 2)."""
    from sympy import prime
    return int(prime(k))


@dataclass(frozen=True)
class FormulaTree:
    nodes: dict          # id -> Formula
    edges: tuple         # (parent id, child id, weight)
    root: int = 2

    def children(self, n):
        return sorted((w, c) for p, c, w in self.edges if p == n)

    def pairs(self):
        return sorted(self.nodes.items())

    def to_dot(self):
        lines = ["digraph formula {"]
        for n, f in sorted(self.nodes.items()):
            lines.append(f'  n{n} [label="{n}: {to_infix(f)}"];')
        for p, c, w in self.edges:
            lines.append(f'  n{p} -> n{c} [label="{w}"];')
        lines.append("}")
        return "\n".join(lines)


def build_tree(f: Formula) -> FormulaTree:
    """Root gets id 2; child i of a node n whose largest prime factor is the
    j-th prime gets id n * p_(j+i)."""
    nodes, edges = {}, []
    stack = [(f, 2, 1)]
    while stack:
        g, n, j = stack.pop()
        nodes[n] = g
        if type(g) is App:
            for i, a in enumerate(g.args, 1):
                c = n * nth_prime(j + i)
                edges.append((n, c, i))
                stack.append((a, c, j + i))
    edges.sort()
    return FormulaTree(nodes, tuple(edges))


def assemble_tree(pairs) -> FormulaTree:
    """Rebuild a formula tree from its (id, formula) pairs in any order.
    Raises NotATree with a reason when the pairs are not exactly the nodes
    of some formula tree."""
    pairs = list(pairs)
    table = {}
    for n, g in pairs:
        if n in table:
            raise NotATree(f"duplicate id {n}")
        table[n] = g
    if 2 not in table:
        raise NotATree("missing root (id 2)")
    nodes, edges, seen = {}, [], set()
    stack = [(2, 1)]
    while stack:
        n, j = stack.pop()
        g = table[n]
        nodes[n] = g
        seen.add(n)
        if type(g) is App:
            for i, a in enumerate(g.args, 1):
                c = n * nth_prime(j + i)
                if c not in table:
                    raise NotATree(f"missing node {c}, argument {i} of node {n}")
                if table[c] != a:
                    raise NotATree(f"label mismatch at node {c}: expected {to_infix(a)}, "
                                   f"found {to_infix(table[c])}")
                edges.append((n, c, i))
                stack.append((c, j + i))
    orphans = sorted(set(table) - seen)
    if orphans:
        raise NotATree(f"orphan id {orphans[0]}")
    edges.sort()
    return FormulaTree(nodes, tuple(edges))


# --------------------------------------------------------------------------
# replacement

def subformula_at(f: Formula, path: Sequence[int]) -> Formula:
    g = f
    for k, w in enumerate(path):
        if type(g) is not App or not 1 <= w <= len(g.args):
            raise BadPath(f"no edge of weight {w} at depth {k}")
        g = g.args[w - 1]
    return g


def replace_at(f: Formula, path: Sequence[int], g: Formula) -> Formula:
    """Replace the occurrence addressed by the edge weights in path."""
    if not path:
        return g
    if type(f) is not App or not 1 <= path[0] <= len(f.args):
        raise BadPath(f"no edge of weight {path[0]} here")
    i = path[0] - 1
    args = list(f.args)
    args[i] = replace_at(args[i], path[1:], g)
    return App(f.op, args)


def occurrence_paths(f: Formula):
    """Every path (tuple of edge weights) addressing a node of the tree of f."""
    out = [()]
    if type(f) is App:
        for i, a in enumerate(f.args, 1):
            out.extend((i,) + p for p in occurrence_paths(a))
    return out


# --------------------------------------------------------------------------
# random formulas (used by property runs)

def random_formula(rng, names=("p", "q"), max_depth=4, ops=("¬", "∧", "∨", "→"),
                   constants=(), leaf_prob=0.3, arities=None):
    """Random formula of depth <= max_depth; rng is a random.Random."""
    arities = arities or {"¬": 1, "□": 1, "◇": 1}
    atoms = [Var(n) for n in names] + [Const(c) for c in constants]
    if max_depth == 0 or rng.random() < leaf_prob:
        return rng.choice(atoms)
    op = rng.choice(ops)
    k = arities.get(op, 2)
    return App(op, [random_formula(rng, names, max_depth - 1, ops, constants, leaf_prob, arities)
                    for _ in range(k)])


def formulas_up_to(names, max_degree, ops=(("¬", 1), ("∧", 2), ("∨", 2), ("→", 2))):
    """All formulas over the given variables with degree <= max_degree,
    grouped by degree (list of lists)."""
    by_deg = [[Var(n) for n in names]]
    for d in range(1, max_degree + 1):
        layer = []
        for op, k in ops:
            if k == 1:
                layer.extend(App(op, (a,)) for a in by_deg[d - 1])
            elif k == 2:
                for i in range(d):
                    for a in by_deg[i]:
                        for b in by_deg[d - 1 - i]:
                            layer.append(App(op, (a, b)))
        by_deg.append(layer)
    return by_deg
