import json

import pytest

import oracle
from sentential.calculus import (
    BadName, Confirmation, Derivation, FirstFailure, NotFound, Premise, RuleApp, Type1, Type2,
    Type3, Verified, bounded_search, builtin_calculus, check_confirmation, check_derivation,
    conj_intro_confirmation, disjunction_elim_confirmation, excluded_middle_confirmation,
    gamma_star_demo, max_binding_degree, rule_sound, rule_to_horn, soundness_check,
)
from sentential.heyting import FinitePoset, upset_matrix
from sentential.kripke import posets
from sentential.language import Var, parse
from sentential.matrix import b2, godel

P = parse
p, q, r = Var("p"), Var("q"), Var("r")
CL = builtin_calculus("hilbert_cl")


def identity_proof():
    return Derivation(frozenset(), (
        (P("(p→(p→p))"), RuleApp("ax1", ())),
        (P("((p→(p→p))→((p→((p→p)→p))→(p→p)))"), RuleApp("ax2", ())),
        (P("((p→((p→p)→p))→(p→p))"), RuleApp("MP", (0, 1))),
        (P("(p→((p→p)→p))"), RuleApp("ax1", ())),
        (P("(p→p)"), RuleApp("MP", (3, 2))),
    ))


def test_identity_derivation_checks():
    assert check_derivation(CL, identity_proof(), P("(p→p)"))


def test_derivation_json_roundtrip():
    d = identity_proof()
    d2 = Derivation.from_json(json.dumps(d.to_json()))
    assert d2 == d


@pytest.mark.parametrize("i", range(5))
def test_mutating_a_step_fails_there(i):
    d = identity_proof()
    steps = list(d.steps)
    steps[i] = (P("(q→q)"), steps[i][1])
    res = check_derivation(CL, Derivation(d.premises, tuple(steps)))
    assert isinstance(res, FirstFailure) and res.step == i


def test_derivation_errors():
    d = Derivation(frozenset(), ((p, Premise()),))
    assert check_derivation(CL, d).reason == "not a premise"
    d = Derivation(frozenset({p}), ((p, Premise()), (q, RuleApp("MP", (0, 2)))))
    assert "ordering" in check_derivation(CL, d).reason
    d = Derivation(frozenset({p}), ((p, Premise()), (q, RuleApp("ax99", ()))))
    assert "unknown rule" in check_derivation(CL, d).reason
    assert check_derivation(CL, Derivation(frozenset(), ())).reason == "empty derivation"
    assert check_derivation(CL, identity_proof(), P("(q→q)")).reason == "last step is not the goal"


def test_unknown_calculus():
    with pytest.raises(BadName):
        builtin_calculus("hilbert_x")


def test_calculus_contents():
    assert len(CL) == 11
    assert all(builtin_calculus("hilbert_p").rules[k] in builtin_calculus(n).rules
               for n in ("hilbert_int", "hilbert_cl")
               for k in range(len(builtin_calculus("hilbert_p"))))
    assert builtin_calculus("hilbert_lc").has("ax12")
    assert not builtin_calculus("hilbert_int").has("ax10")


WORKED = {
    "conj": (conj_intro_confirmation(p, q), 3),
    "excluded middle": (excluded_middle_confirmation(p), 8),
    "ax8": (disjunction_elim_confirmation(p, q, r), 6),
}


@pytest.mark.parametrize("name", WORKED)
def test_worked_confirmations_verify(name):
    conf, nodes = WORKED[name]
    assert isinstance(check_confirmation(conf), Verified)
    assert len(conf.nodes()) == nodes
    assert Confirmation.from_json(json.dumps(conf.to_json())) == conf


def _mutate(conf, path, new_formula):
    if not path:
        return Confirmation(conf.premises, new_formula, conf.by)
    kids = list(conf.children())
    kids[path[0]] = _mutate(kids[path[0]], path[1:], new_formula)
    by = conf.by
    nb = Type2(by.rule, tuple(kids)) if isinstance(by, Type2) else Type3(tuple(kids), by.derivation)
    return Confirmation(conf.premises, conf.formula, nb)


@pytest.mark.parametrize("name", WORKED)
def test_mutating_any_node_fails_at_that_node(name):
    conf, _ = WORKED[name]
    for path, _node in conf.nodes():
        res = check_confirmation(_mutate(conf, path, Var("z")))
        assert isinstance(res, FirstFailure)
        assert tuple(res.step) == path


def test_confirmation_structural_errors():
    leaf = Confirmation(frozenset({p}), q, Type1(Derivation(frozenset({p}), ((p, Premise()),))))
    assert not check_confirmation(leaf)
    good_leaf = Confirmation(frozenset({p}), p, Type1(Derivation(frozenset({p}), ((p, Premise()),))))
    bad = Confirmation(frozenset(), P("(p→p)"), Type2("c-ii", (good_leaf,)))
    assert check_confirmation(bad).reason == "c-ii takes two premise sequents"
    wrong = Confirmation(frozenset(), P("(q→p)"), Type2("c-i", (good_leaf,)))
    assert check_confirmation(wrong).reason == "c-i premise must be X,α ⊢ β"


def test_soundness():
    assert soundness_check(CL, b2())["sound"]
    assert soundness_check(builtin_calculus("hilbert_int"), godel(3))["sound"]
    ok, witness = rule_sound(CL.rule("ax10"), godel(3))
    assert not ok and witness == {"𝛂": "t1"}


def test_int_sound_in_small_upset_algebras():
    c = builtin_calculus("hilbert_int")
    for n in (1, 2, 3):
        for fr in posets(n):
            assert soundness_check(c, upset_matrix(fr))["sound"]


def test_horn():
    assert rule_to_horn(CL.rule("MP")) == "∀x∀y((D(x) & D(x→y)) ⇒ D(y))"
    assert rule_to_horn(CL.rule("ax1")) == "∀x∀y D(x→(y→x))"
    assert rule_to_horn(CL.rule("ax10")) == "∀x D(¬¬x→x)"


def test_search_identity_five_steps():
    d = bounded_search(CL, set(), P("(p→p)"), max_steps=40, max_degree=4)
    assert d and len(d) == 5
    assert check_derivation(CL, d, P("(p→p)"))


def test_search_from_premises():
    d = bounded_search(CL, {p, P("(p→q)")}, q, max_steps=10, max_degree=5)
    assert d and check_derivation(CL, d, q)
    assert max_binding_degree(CL, d) <= 5


def test_search_rejects_non_theorem():
    res = bounded_search(CL, set(), P("(p→q)"), max_steps=20, max_degree=5)
    assert isinstance(res, NotFound)


def test_search_results_are_sound():
    for text in ("(p→(q→p))", "((p∧q)→(q∧p))", "((p∨q)→(q∨p))"):
        f = P(text)
        assert oracle.tautology(f)
        d = bounded_search(CL, set(), f, max_steps=40, max_degree=6)
        assert d and check_derivation(CL, d, f)


def test_negation_theorems_need_large_bindings():
    # the shortest derivations found bind metavariables to formulas of degree 8-9
    for text, steps in (("(p→¬¬p)", 17), ("(p∨¬p)", 23)):
        f = P(text)
        assert isinstance(bounded_search(CL, set(), f, max_steps=40), NotFound)
        d = bounded_search(CL, set(), f, max_steps=40, max_degree=10)
        assert d and len(d) == steps and check_derivation(CL, d, f)


@pytest.mark.parametrize("m", [1, 2, 3, 4])
def test_gamma_star(m):
    r = gamma_star_demo(m, contrast=m <= 2)
    assert r["refutes"] and r["matrix"] == f"G{m + 3}"
    if m <= 2:
        assert r["contrast"]["entails"]


def test_fork_poset_shape():
    fk = FinitePoset.fork()
    assert fk.size == 3 and len(fk.covers) == 2
