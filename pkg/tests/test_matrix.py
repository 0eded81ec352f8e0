import json
from fractions import Fraction

import numpy as np
import pytest

import oracle
from sentential.language import formulas_up_to, parse
from sentential.matrix import (
    BudgetExceeded, FiniteAlgebra, Matrix, SignatureMismatch, UnassignedVariable, b2,
    builtin, check_consequence, check_hom_filter, check_validity, evaluate, find_refutation,
    g3_prime, godel, grid_refute, is_valid, l3, l3_modal, l3_tau, lc_check, lc_is_valid,
    lukasiewicz_rational_eval, matrix_consequence, matrix_from_json, matrix_to_json,
    subuniverse_closure,
)

P = parse
CORPUS2 = [f for layer in formulas_up_to(["p", "q"], 3) for f in layer]


def test_l3_tables():
    assert evaluate(l3(), {"p": "τ"}, P("¬p")) == "τ"
    assert evaluate(l3(), {"p": "τ", "q": "0"}, P("(p→q)")) == "τ"


def test_peirce_in_b2():
    assert is_valid(b2(), P("(((p→q)→p)→p)"))


def test_excluded_middle_fails_in_l3():
    v = check_validity(l3(), P("(p∨¬p)"))
    assert not v.valid and v.witness == {"p": "τ"}
    assert find_refutation(l3(), P("(p∨¬p)")) == {"p": "τ"}


def test_turquette():
    f = P("(¬(p→¬p)∨¬(¬p→p))")
    assert is_valid(b2(), f)
    v = check_validity(l3_tau(), f)
    assert not v.valid and v.witness == {"p": "τ"}


def test_validity_agrees_with_oracle():
    for f in CORPUS2:
        assert is_valid(b2(), f) == oracle.tautology(f)
        assert is_valid(l3(), f) == oracle.l3_valid(f)
        assert is_valid(godel(4), f) == oracle.goedel_valid(f, 4)


def test_g3_prime_validates_exactly_the_tautologies():
    for f in CORPUS2:
        assert is_valid(g3_prime(), f) == oracle.tautology(f)


def test_lukasiewicz_identities():
    a = l3().algebra
    for x in a.elements:
        for y in a.elements:
            assert a.op("∨", x, y) == a.op("→", a.op("→", x, y), y)
            assert a.op("∧", x, y) == a.op("¬", a.op("∨", a.op("¬", x), a.op("¬", y)))


def test_modal_identities():
    a = l3_modal().algebra
    for x in a.elements:
        assert a.op("◇", x) == a.op("→", a.op("¬", x), x)
        assert a.op("□", x) == a.op("¬", a.op("◇", a.op("¬", x)))


def test_godel3_implication():
    assert godel(3).algebra.op("→", "1", "τ") == "t1"
    assert godel(3).algebra.op("→", "t1", "0") == "0"


def test_de_morgan_laws_hold_in_godel_chains():
    # only the double negation and Peirce laws separate the chains from B2
    laws = ["(¬(p∧q)↔(¬p∨¬q))", "(¬(p∨q)↔(¬p∧¬q))"]
    for n in range(2, 7):
        for law in laws:
            assert is_valid(godel(n), P(law)) == oracle.goedel_valid(P(law), n) is True
    for n in range(3, 7):
        assert not is_valid(godel(n), P("(¬¬p↔p)"))
        assert not is_valid(godel(n), P("(((p→q)→p)→p)"))


def test_consequence():
    assert matrix_consequence(b2(), [P("p"), P("(p→q)")], P("q"))
    v = check_consequence(l3(), [P("(p→q)")], P("(¬q→¬p)"))
    assert v.valid
    v = check_consequence(b2(), [P("(p∨q)")], P("p"))
    assert not v.valid and v.witness == {"p": "0", "q": "1"}


def test_consequence_ignores_disjoint_consistent_premise():
    # γ shares no variable with α, β and is satisfiable, so it can be dropped
    cases = [("(r∨¬r)", "p", "(q→p)"), ("r", "(p∧q)", "p"), ("¬¬r", "p", "(p∨q)")]
    for m in (b2(), l3(), godel(3)):
        for g, a, b in cases:
            if matrix_consequence(m, [P(g), P(a)], P(b)):
                assert matrix_consequence(m, [P(a)], P(b))


def test_lc():
    r = lc_check(P("((p→q)∨(q→p))"))
    assert r["valid"] and r["via"] == "G7"
    assert not lc_is_valid(P("(((p→q)→p)→p)"))


def test_lc_agrees_with_chains_on_one_variable():
    for layer in formulas_up_to(["p"], 4):
        for f in layer:
            want = all(oracle.goedel_valid(f, n) for n in range(2, 9))
            assert lc_is_valid(f) == want


def test_rational_lukasiewicz():
    assert lukasiewicz_rational_eval({"p": Fraction(1, 2)}, P("(p∨¬p)")) == Fraction(1, 2)
    assert grid_refute(P("(p∨¬p)"), 2) == {"p": Fraction(1, 2)}
    assert grid_refute(P("(p→(q→p))"), 5) is None


def test_collapse_homomorphism():
    h = {"0": "0", "t1": "t1", "t2": "1", "1": "1"}
    assert check_hom_filter(h, godel(4), godel(3))
    assert not check_hom_filter({"0": "0", "t1": "0", "t2": "t1", "1": "1"}, godel(4), godel(3))


def test_subuniverses():
    assert subuniverse_closure(l3(), {"τ"}, ["∧", "¬"]) == {"τ"}
    assert subuniverse_closure(l3(), {"0", "1"}) == {"0", "1"}
    assert subuniverse_closure(godel(3), {"0", "1"}) == {"0", "1"}


def test_budget():
    with pytest.raises(BudgetExceeded):
        check_validity(b2(), P("((p∨q)∨(r∨s))"), budget=10)


def test_unassigned_and_signature_errors():
    with pytest.raises(UnassignedVariable):
        evaluate(b2(), {}, P("p"))
    with pytest.raises(SignatureMismatch):
        is_valid(b2(), P("□p"))


def test_bad_tables_rejected():
    with pytest.raises(ValueError):
        FiniteAlgebra(("0", "1"), {"¬": np.array([1, 2])})
    with pytest.raises(ValueError):
        Matrix(b2().algebra, frozenset({"2"}))


def test_builtins_and_json_roundtrip():
    for name in ("b2", "l3", "l3_tau", "l3_modal", "g3_prime", "godel(5)"):
        m = builtin(name)
        m2 = matrix_from_json(json.loads(json.dumps(matrix_to_json(m))))
        assert m2.elements == m.elements and m2.designated == m.designated
        for op, t in m.algebra.ops.items():
            assert np.array_equal(m2.algebra.ops[op], t)
