"""Walk through a few finite matrices and watch classical laws survive or fail."""

from sentential import b2, check_validity, godel, l3, l3_tau, lc_check, parse

LAWS = {
    "excluded middle": "(p∨¬p)",
    "Peirce": "(((p→q)→p)→p)",
    "double negation": "(¬¬p↔p)",
    "De Morgan (∧)": "(¬(p∧q)↔(¬p∨¬q))",
    "Turquette": "(¬(p→¬p)∨¬(¬p→p))",
}

MATRICES = {"B2": b2(), "Ł3": l3(), "Ł3 with τ designated": l3_tau(), "G3": godel(3)}

print(f"{'law':<18}" + "".join(f"{n:>28}" for n in MATRICES))
for name, text in LAWS.items():
    row = []
    for m in MATRICES.values():
        v = check_validity(m, parse(text))
        row.append("valid" if v.valid else "fails at " + ",".join(f"{k}={x}" for k, x in v.witness.items()))
    print(f"{name:<18}" + "".join(f"{c:>28}" for c in row))

print()
print("Dummett's linearity axiom is decided on a finite chain:")
print(" ", lc_check(parse("((p→q)∨(q→p))")))
