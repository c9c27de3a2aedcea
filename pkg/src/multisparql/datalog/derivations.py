"""Brute-force derivation-tree enumeration.

Deliberately shares nothing with the bottom-up engine beyond validation: the
answer count of a substitution is the number of distinct trees that derive
the instantiated goal. Rules are grounded over the active domain."""
from __future__ import annotations

import itertools

from .analysis import validate
from .engine import check_goal
from .program import Atom, Const, Eq, Negated, Neq, Program, SubstitutionMultiset


class TreeBudgetExceeded(RuntimeError):
    pass


def enumerate_derivation_trees(prog: Program, goal: Atom, budget: int = 10_000) -> SubstitutionMultiset:
    validate(prog)
    check_goal(prog, goal)
    adom = sorted(prog.constants() | {a.value for a in goal.args if isinstance(a, Const)})
    fact_counts = {(a.pred, tuple(t.value for t in a.args)): n for a, n in prog.facts}
    rules = list(enumerate(prog.rules))
    memo: dict = {}
    made = [0]

    def value(term, theta):
        return term.value if isinstance(term, Const) else theta[term]

    def trees(pred: str, row: tuple) -> list:
        key = (pred, row)
        if key in memo:
            return memo[key]
        out = [("fact", pred, row, i) for i in range(fact_counts.get(key, 0))]
        for index, rule in rules:
            if rule.head.pred != pred:
                continue
            theta: dict = {}
            ok = True
            for term, val in zip(rule.head.args, row):
                if isinstance(term, Const):
                    ok = term.value == val
                elif theta.setdefault(term, val) != val:
                    ok = False
                if not ok:
                    break
            if not ok:
                continue
            free = [v for v in rule.vars() if v not in theta]
            if len(adom) ** len(free) > 100 * budget:
                raise TreeBudgetExceeded(f"grounding of rule {rule} is too large")
            for values in itertools.product(adom, repeat=len(free)):
                full = {**theta, **dict(zip(free, values))}
                children = []
                for lit in rule.body:
                    if isinstance(lit, Eq):
                        ok = value(lit.left, full) == value(lit.right, full)
                    elif isinstance(lit, Neq):
                        ok = value(lit.left, full) != value(lit.right, full)
                    elif isinstance(lit, Negated):
                        a = lit.atom
                        ok = not trees(a.pred, tuple(value(t, full) for t in a.args))
                    else:
                        sub = trees(lit.pred, tuple(value(t, full) for t in lit.args))
                        ok = bool(sub)
                        children.append(sub)
                    if not ok:
                        break
                if not ok:
                    continue
                for combo in itertools.product(*children):
                    made[0] += 1
                    if made[0] > budget:
                        raise TreeBudgetExceeded(f"more than {budget} derivation trees")
                    out.append(("rule", index, pred, row, combo))
        memo[key] = out
        return out

    goal_vars = goal.vars()
    result = []
    for values in itertools.product(adom, repeat=len(goal_vars)):
        theta = dict(zip(goal_vars, values))
        row = tuple(a.value if isinstance(a, Const) else theta[a] for a in goal.args)
        n = len(trees(goal.pred, row))
        if n:
            result.append(({v.name: c for v, c in theta.items()}, n))
    return SubstitutionMultiset(result)


def count_trees(prog: Program, atom: Atom, budget: int = 10_000) -> int:
    """Number of derivation trees of a single ground atom."""
    if not atom.is_ground():
        raise ValueError("count_trees needs a ground atom")
    answers = enumerate_derivation_trees(prog, atom, budget)
    return sum(n for _, n in answers.items())


__all__ = ["TreeBudgetExceeded", "enumerate_derivation_trees", "count_trees"]
