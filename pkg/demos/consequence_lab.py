"""Closure systems on a tiny universe and the operators they induce."""

from sentential.consequence import (
    ExtensionalOperator, FiniteClosureSystem, check_operator_axioms, closure_systems,
    cn_from_closure_system, verify_con_connections,
)

for n in (1, 2, 3):
    print(f"closure systems on a {n}-point universe:", sum(1 for _ in closure_systems(n)))

cs = FiniteClosureSystem.of_sets("xyz", [{"x"}, {"x", "y"}, {"x", "y", "z"}])
for X in (set(), {"y"}, {"z"}):
    print(f"Cn({sorted(X)}) = {sorted(cn_from_closure_system(cs, X))}")

op = ExtensionalOperator.from_function("xy", lambda X: {"x"})
print("constant operator axioms:", check_operator_axioms(op))

print()
print("exhaustive over |U|=2:", verify_con_connections(2).to_json())
r = verify_con_connections(3, samples=20_000, seed=1)
print("sampled over |U|=3:", r.to_json()["result"], r.operators, "operators")
