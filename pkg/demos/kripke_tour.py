"""Intuitionistic countermodels and the one-variable lattice they carve out."""

from sentential import parse
from sentential.kripke import forces, int_countermodel, rn_classify, rn_formula
from sentential.lindenbaum_tarski import figure_check, rn_lattice

for text in ("(((p→q)→p)→p)", "(¬¬p→p)", "((p→q)∨(q→p))", "(p→(q→p))"):
    found = int_countermodel(parse(text), 6)
    if found is None:
        print(f"{text}: no countermodel with at most 6 worlds")
        continue
    m, w = found
    print(f"{text}: refuted at {w} on a {m.frame.size}-world frame, covers {sorted(m.frame.covers)}")
    assert not forces(m, w, parse(text))

print()
for i in range(7):
    print(f"P{i} = {rn_formula(i)}")
print("¬p∨¬¬p lands in class", rn_classify(parse("(¬p∨¬¬p)")))

print()
print("building the P0..P12 prefix (a few seconds)...")
q = rn_lattice()
fc = figure_check(q)
print("Hasse diagram matches the reference drawing:", fc["hasse_matches"])
print(q.to_dot())
