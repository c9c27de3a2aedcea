"""Multiset non-recursive Datalog with safe negation."""
from .analysis import (
    RecursionVerdict,
    SafetyViolation,
    check_nonrecursive,
    check_safe,
    eliminate_equalities,
    validate,
)
from .derivations import TreeBudgetExceeded, count_trees, enumerate_derivation_trees
from .engine import compute_relations, eval_program
from .normalform import check_normal_form, normalize, rule_shape
from .program import (
    Atom,
    Const,
    DatalogError,
    DatalogSyntaxError,
    Eq,
    Negated,
    Neq,
    Program,
    Rule,
    Substitution,
    SubstitutionMultiset,
    Var,
    parse_atom,
    parse_program,
    render_program,
)

__all__ = [
    "Atom", "Const", "DatalogError", "DatalogSyntaxError", "Eq", "Negated", "Neq",
    "Program", "RecursionVerdict", "Rule", "SafetyViolation", "Substitution",
    "SubstitutionMultiset", "TreeBudgetExceeded", "Var", "check_nonrecursive",
    "check_normal_form", "check_safe", "compute_relations", "count_trees",
    "eliminate_equalities", "enumerate_derivation_trees", "eval_program",
    "normalize", "parse_atom", "parse_program", "render_program", "rule_shape",
    "validate",
]
