"""Bottom-up evaluation of non-recursive programs under bag semantics."""
from __future__ import annotations

from .analysis import eliminate_equalities, validate
from .program import (
    Atom,
    Const,
    DatalogError,
    Program,
    Rule,
    SubstitutionMultiset,
)

Relation = dict  # tuple of constant values -> positive count


def _match(atom: Atom, row: tuple, theta: dict) -> dict | None:
    out = None
    for term, value in zip(atom.args, row):
        if isinstance(term, Const):
            if term.value != value:
                return None
        else:
            bound = theta.get(term) if out is None else out.get(term)
            if bound is None:
                if out is None:
                    out = dict(theta)
                out[term] = value
            elif bound != value:
                return None
    return out if out is not None else theta


def _ground(atom: Atom, theta: dict) -> tuple:
    return tuple(t.value if isinstance(t, Const) else theta[t] for t in atom.args)


def eval_rule(rule: Rule, relations: dict[str, Relation]) -> Relation:
    """Head instances produced by one rule, with summed counts."""
    rule = eliminate_equalities(rule)
    out: Relation = {}
    if rule is None:
        return out
    partial = [({}, 1)]
    for atom in rule.positives():
        rel = relations.get(atom.pred, {})
        nxt = []
        for theta, count in partial:
            for row, n in rel.items():
                ext = _match(atom, row, theta)
                if ext is not None:
                    nxt.append((ext, count * n))
        partial = nxt
        if not partial:
            return out
    neqs = rule.comparisons()
    negs = rule.negatives()
    for theta, count in partial:
        if any(_value(c.left, theta) == _value(c.right, theta) for c in neqs):
            continue
        if any(_ground(a, theta) in relations.get(a.pred, {}) for a in negs):
            continue
        key = _ground(rule.head, theta)
        out[key] = out.get(key, 0) + count
    return out


def _value(term, theta):
    return term.value if isinstance(term, Const) else theta[term]


def compute_relations(prog: Program) -> dict[str, Relation]:
    """Every predicate's relation, computed in dependency order."""
    order = validate(prog)
    relations: dict[str, Relation] = {}
    for atom, count in prog.facts:
        rel = relations.setdefault(atom.pred, {})
        row = tuple(a.value for a in atom.args)
        rel[row] = rel.get(row, 0) + count
    for pred in order:
        for rule in prog.rules_for(pred):
            rel = relations.setdefault(pred, {})
            for row, n in eval_rule(rule, relations).items():
                rel[row] = rel.get(row, 0) + n
    return relations


def answers(goal: Atom, rel: Relation) -> SubstitutionMultiset:
    """Substitutions over the goal's variables, one per matching row."""
    out = []
    for row, n in rel.items():
        theta = _match(goal, row, {})
        if theta is not None:
            out.append(({v.name: c for v, c in theta.items()}, n))
    return SubstitutionMultiset(out)


def check_goal(prog: Program, goal: Atom) -> None:
    arities = prog.arities()
    if goal.pred not in arities:
        raise DatalogError(f"unknown goal predicate {goal.pred}")
    if arities[goal.pred] != goal.arity:
        raise DatalogError(f"goal {goal} has arity {goal.arity}, predicate has {arities[goal.pred]}")


def eval_program(prog: Program, goal: Atom) -> SubstitutionMultiset:
    check_goal(prog, goal)
    return answers(goal, compute_relations(prog).get(goal.pred, {}))

