"""Sentential logic workbench: formulas, finite matrices, proof systems and
Lindenbaum–Tarski quotients."""

from .language import (Formula, Var, Const, MVar, App, And, Or, Imp, Not, Iff,
                       parse, to_infix, to_prefix, to_ascii, to_json, from_json,
                       degree, variables, subformulas, build_tree, assemble_tree,
                       ParseError, NotATree)
from .substitution import Substitution, apply, compose
from .matrix import (FiniteAlgebra, Matrix, Verdict, BudgetExceeded, evaluate,
                     check_validity, is_valid, check_consequence, lc_check, builtin,
                     b2, l3, l3_tau, l3_modal, godel, g3_prime)
from .calculus import (Calculus, Derivation, Confirmation, builtin_calculus,
                       check_derivation, check_confirmation, bounded_search, rule_to_horn)
from .kripke import KripkeModel, int_countermodel, rn_formula, rn_classify
from .lindenbaum_tarski import QuotientAlgebra, lt_classical, rn_lattice, class_of

__version__ = "0.1.0"

__all__ = [
    "Formula",
    "Var",
    "Const",
    "MVar",
    "App",
    "And",
    "Or",
    "Imp",
    "Not",
    "Iff",
    "parse",
    "to_infix",
    "to_prefix",
    "to_ascii",
    "to_json",
    "from_json",
    "degree",
    "variables",
    "subformulas",
    "build_tree",
    "assemble_tree",
    "ParseError",
    "NotATree",
    "Substitution",
    "apply",
    "compose",
    "FiniteAlgebra",
    "Matrix",
    "Verdict",
    "BudgetExceeded",
    "evaluate",
    "check_validity",
    "is_valid",
    "check_consequence",
    "lc_check",
    "builtin",
    "b2",
    "l3",
    "l3_tau",
    "l3_modal",
    "godel",
    "g3_prime",
    "Calculus",
    "Derivation",
    "Confirmation",
    "builtin_calculus",
    "check_derivation",
    "check_confirmation",
    "bounded_search",
    "rule_to_horn",
    "KripkeModel",
    "int_countermodel",
    "rn_formula",
    "rn_classify",
    "QuotientAlgebra",
    "lt_classical",
    "rn_lattice",
    "class_of",
]
