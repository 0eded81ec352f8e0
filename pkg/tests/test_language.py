import random

import pytest

from sentential.language import (
    And, App, ArityMismatch, BadPath, Const, Imp, Not, NotATree, Or, Signature,
    UnbalancedParentheses, UnreadableWord, Var, assemble_tree, build_tree, degree,
    from_json, nth_prime, occurrence_paths, parse, random_formula, replace_at,
    subformula_at, subformulas, to_ascii, to_infix, to_json, to_prefix, variables,
)
from sentential.substitution import Substitution, apply

p, q, r = Var("p"), Var("q"), Var("r")
FIJ = Signature({"Fi": 2, "Fj": 2}, ("a",))


def test_degree_counts_connectives():
    assert degree(parse("(p∨¬p)")) == 2
    assert degree(p) == 0
    assert degree(parse("((p→q)∨(q→p))")) == 3


def test_subformulas():
    f = parse("((p→q)∨(q→p))")
    assert subformulas(f) == {f, Imp(p, q), Imp(q, p), p, q}


def test_variables_of_substitution_image():
    rng = random.Random(5)
    for _ in range(100):
        f = random_formula(rng, ("p", "q", "r"), 4)
        s = Substitution({x: random_formula(rng, ("q", "s"), 2) for x in ("p", "r")})
        want = set()
        for x in variables(f):
            want |= variables(s.support.get(x, Var(x)))
        assert variables(apply(s, f)) == want


@pytest.mark.parametrize("text", ["(p→q)", "¬¬p", "((p∧q)∨¬r)", "(p↔⊤)", "□◇p"])
def test_print_parse_roundtrip(text):
    f = parse(text)
    assert to_infix(f) == text
    assert parse(to_prefix(f), notation="prefix") == f
    assert parse(to_ascii(f)) == f
    assert from_json(to_json(f)) == f


def test_ascii_aliases():
    assert parse("~(p -> q) & T") == And(Not(Imp(p, q)), Const("⊤"))
    assert parse("(p | q)") == Or(p, q)


def test_prefix_notation():
    assert parse("→p∧qr", notation="prefix") == Imp(p, And(q, r))


def test_top_level_binary_without_parentheses():
    assert parse("p→q") == Imp(p, q)


@pytest.mark.parametrize("text,err", [
    ("(p∧q", UnbalancedParentheses),
    ("p∧q)", UnbalancedParentheses),
    ("(p∧q∧r)", UnbalancedParentheses),
    ("(p ? q)", UnreadableWord),
    ("¬", ArityMismatch),
    ("(p→)", UnreadableWord),
])
def test_parse_errors(text, err):
    with pytest.raises(err):
        parse(text)


def test_parse_error_reports_position():
    with pytest.raises(UnreadableWord) as e:
        parse("(p ? q)")
    assert e.value.position == 3


def test_custom_signature_prefix():
    f = parse("Fi Fj a p q", FIJ, notation="prefix")
    assert f == App("Fi", (App("Fj", (Const("a"), p)), q))
    assert to_prefix(f) == "Fi Fj a p q"


def test_nth_prime():
    assert [nth_prime(k) for k in range(1, 8)] == [2, 3, 5, 7, 11, 13, 17]


def test_tree_of_repeated_leaf():
    f = parse("Fi Fj a p p", FIJ, notation="prefix")
    t = build_tree(f)
    # ids worked out by hand: 2; 2·3, 2·5; 6·5, 6·7
    assert sorted(t.nodes) == [2, 6, 10, 30, 42]
    assert t.nodes[10] == p and t.nodes[42] == p
    assert t.edges == ((2, 6, 1), (2, 10, 2), (6, 30, 1), (6, 42, 2))


def test_tree_ids_unique_on_random_formulas():
    rng = random.Random(11)
    for _ in range(500):
        f = random_formula(rng, ("p", "q", "r"), 6)
        t = build_tree(f)
        assert len(t.nodes) == len(occurrence_paths(f))


def test_assemble_roundtrip_shuffled():
    rng = random.Random(3)
    for _ in range(200):
        f = random_formula(rng, ("p", "q"), 5)
        t = build_tree(f)
        pairs = t.pairs()
        rng.shuffle(pairs)
        assert assemble_tree(pairs) == t


@pytest.mark.parametrize("pairs,reason", [
    ([(2, And(p, q)), (6, p)], "missing node 10"),
    ([(2, And(p, q)), (6, p), (10, r)], "label mismatch"),
    ([(2, p), (6, p)], "orphan"),
    ([(6, p)], "missing root"),
    ([(2, p), (2, p)], "duplicate"),
])
def test_assemble_rejects(pairs, reason):
    with pytest.raises(NotATree, match=reason):
        assemble_tree(pairs)


def test_replace_second_occurrence():
    f = parse("Fi Fj a p p", FIJ, notation="prefix")
    beta = Var("b")
    g = replace_at(f, (2,), beta)
    assert g == App("Fi", (App("Fj", (Const("a"), p)), beta))
    # the other occurrence of p is untouched
    assert subformula_at(g, (1, 2)) == p


def test_replace_then_read_back():
    rng = random.Random(8)
    for _ in range(300):
        f = random_formula(rng, ("p", "q"), 5)
        path = rng.choice(occurrence_paths(f))
        g = random_formula(rng, ("r",), 2)
        assert subformula_at(replace_at(f, path, g), path) == g


def test_bad_path():
    with pytest.raises(BadPath):
        replace_at(p, (1,), q)
    with pytest.raises(BadPath):
        subformula_at(Not(p), (2,))
