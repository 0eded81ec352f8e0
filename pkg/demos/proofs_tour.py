"""Search for Hilbert-style derivations, check them, and break them on purpose."""

from sentential import Var, builtin_calculus, check_derivation, parse
from sentential.calculus import (
    Derivation, bounded_search, check_confirmation, excluded_middle_confirmation,
)

cl = builtin_calculus("hilbert_cl")
goal = parse("((p∨q)→(q∨p))")
d = bounded_search(cl, set(), goal, max_steps=40)
print(f"derivation of {goal} in {len(d)} lines:")
for i, (f, why) in enumerate(d.steps):
    label = why.rule + (f" {list(why.cites)}" if why.cites else "")
    print(f"  {i:>2}. {f}    [{label}]")
print("checker:", check_derivation(cl, d, goal))

# swap one line for nonsense and the checker names that line
steps = list(d.steps)
steps[2] = (parse("(q→q)"), steps[2][1])
print("tampered:", check_derivation(cl, Derivation(d.premises, tuple(steps)), goal))

print()
conf = excluded_middle_confirmation(Var("p"))
print("sequent-style confirmation of p∨¬p:", check_confirmation(conf))

print()
print("p∨¬p with the default binding-degree cap:",
      bounded_search(cl, set(), parse("(p∨¬p)"), max_steps=40))
print("...and with bindings up to degree 10:",
      len(bounded_search(cl, set(), parse("(p∨¬p)"), max_steps=40, max_degree=10)), "lines")
