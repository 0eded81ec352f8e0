import networkx as nx
import pytest

import oracle
from sentential.heyting import FinitePoset
from sentential.kripke import (
    KripkeModel, Unresolved, forces, int_countermodel, int_valid_bounded, one_var_profile,
    posets, profile_leq, rn_classify, rn_formula, rooted_frames,
)
from sentential.language import formulas_up_to, parse

P = parse


def test_two_chain_refutes_excluded_middle():
    m = KripkeModel(FinitePoset.chain(2), {"p": frozenset({"w1"})})
    assert not forces(m, "w0", P("(p∨¬p)"))
    assert forces(m, "w1", P("(p∨¬p)"))


def test_valuation_must_be_up_closed():
    with pytest.raises(ValueError):
        KripkeModel(FinitePoset.chain(2), {"p": frozenset({"w0"})})


def test_frame_counts():
    # posets up to isomorphism: 1, 2, 5, 16, 63 on 1..5 elements
    assert [len(posets(n)) for n in range(1, 6)] == [1, 2, 5, 16, 63]
    assert [len(rooted_frames(n)) for n in range(1, 7)] == [1, 1, 2, 5, 16, 63]


def test_rooted_frames_match_oracle():
    for n in range(1, 5):
        shapes = []
        for worlds, le in oracle.all_posets(n):
            if not any(all((r, u) in le for u in worlds) for r in worlds):
                continue
            g = nx.DiGraph()
            g.add_nodes_from(worlds)
            g.add_edges_from((a, b) for a, b in le if a != b)
            if not any(nx.is_isomorphic(g, h) for h in shapes):
                shapes.append(g)
        assert len(rooted_frames(n)) == len(shapes)


def test_countermodels():
    peirce = int_countermodel(P("(((p→q)→p)→p)"), 6)
    assert peirce and peirce[0].frame.size <= 2
    assert int_countermodel(P("(p→(q→p))"), 5) is None
    m, w = int_countermodel(P("(¬¬p→p)"), 6)
    assert m.frame.size == 2 and len(m.frame.covers) == 1
    assert not forces(m, w, P("(¬¬p→p)"))


def test_countermodel_agrees_with_oracle():
    corpus = [f for layer in formulas_up_to(["p", "q"], 3) for f in layer]
    for f in corpus[::7]:
        assert (int_countermodel(f, 3) is not None) == oracle.int_refutable(f, 3)


def test_countermodel_limit():
    with pytest.raises(ValueError):
        int_countermodel(P("p"), 8)


def test_rn_classify_named_formulas():
    assert rn_classify(P("¬¬p")) == 3
    assert rn_classify(P("(p∨¬p)")) == 4
    assert rn_classify(P("(¬¬p→p)")) == 5
    assert rn_classify(P("(¬p∨¬¬p)")) == 6
    assert rn_classify(P("(p→p)")) == "∞"
    assert rn_classify(P("(p∧¬p)")) == 0


def test_rn_classify_rejects_two_variables():
    with pytest.raises(ValueError):
        rn_classify(P("(p→q)"))


def test_rn_beyond_budget_unresolved():
    # P13 and P12 are not separated by models of at most 6 worlds
    r = rn_classify(rn_formula(13), 6, count=13)
    assert isinstance(r, Unresolved) and 12 in r.candidates


def test_rn_prefix_separated_at_six_worlds():
    profs = [one_var_profile(rn_formula(i), 6) for i in range(13)]
    assert len(set(profs)) == 13


def test_rn_recursion_order():
    prof = {i: one_var_profile(rn_formula(i), 6) for i in range(8)}
    assert profile_leq(prof[1], prof[4]) and profile_leq(prof[2], prof[4])
    assert profile_leq(prof[2], prof[3])
    assert not profile_leq(prof[1], prof[2]) and not profile_leq(prof[2], prof[1])


def test_bounded_validity():
    assert int_valid_bounded(P("((p∧q)→(q∧p))"), 4)
    assert not int_valid_bounded(P("(p∨¬p)"), 2)
