"""Static checks on programs: safety, non-recursiveness, and equality
elimination by substitution."""
from __future__ import annotations

import graphlib
from dataclasses import dataclass

from .program import (
    Atom,
    Const,
    DatalogError,
    Eq,
    Negated,
    Neq,
    Program,
    Rule,
    Var,
)


@dataclass(frozen=True)
class SafetyViolation:
    rule: Rule
    variable: Var

    def __str__(self):
        return f"variable {self.variable} is unsafe in rule: {self.rule}"


def safe_vars(rule: Rule) -> set[Var]:
    safe = {v for atom in rule.positives() for v in atom.vars()}
    changed = True
    while changed:
        changed = False
        for lit in rule.body:
            if not isinstance(lit, Eq):
                continue
            a, b = lit.left, lit.right
            for x, y in ((a, b), (b, a)):
                if isinstance(x, Var) and x not in safe and (isinstance(y, Const) or y in safe):
                    safe.add(x)
                    changed = True
    return safe


def check_safe(prog: Program) -> list[SafetyViolation]:
    """Empty list when every rule is safe."""
    out = []
    for rule in prog.rules:
        safe = safe_vars(rule)
        out.extend(SafetyViolation(rule, v) for v in rule.vars() if v not in safe)
    return out


@dataclass(frozen=True)
class RecursionVerdict:
    order: tuple = ()
    cycle: tuple = ()

    @property
    def ok(self) -> bool:
        return not self.cycle


def dependency_graph(prog: Program) -> dict[str, set[str]]:
    graph: dict[str, set[str]] = {p: set() for p in sorted(prog.predicates())}
    for rule in prog.rules:
        deps = graph[rule.head.pred]
        deps.update(a.pred for a in rule.positives())
        deps.update(a.pred for a in rule.negatives())
    return graph


def check_nonrecursive(prog: Program) -> RecursionVerdict:
    sorter = graphlib.TopologicalSorter(dependency_graph(prog))
    try:
        return RecursionVerdict(order=tuple(sorter.static_order()))
    except graphlib.CycleError as exc:
        cycle = list(exc.args[1])
        if len(cycle) > 1 and cycle[0] == cycle[-1]:
            cycle.pop()
        return RecursionVerdict(cycle=tuple(reversed(cycle)))


def validate(prog: Program) -> tuple:
    """Raise on unsafe, recursive or arity-inconsistent programs; return the
    topological order of predicates."""
    prog.arities()
    problems = check_safe(prog)
    if problems:
        raise DatalogError("unsafe program: " + "; ".join(str(p) for p in problems))
    verdict = check_nonrecursive(prog)
    if not verdict.ok:
        raise DatalogError("recursive program, cycle: " + " -> ".join(verdict.cycle))
    return verdict.order


def _substitute(term, sub: dict):
    return sub.get(term, term) if isinstance(term, Var) else term


def _subst_atom(atom: Atom, sub: dict) -> Atom:
    return Atom(atom.pred, tuple(_substitute(t, sub) for t in atom.args))


def eliminate_equalities(rule: Rule) -> Rule | None:
    """Remove every ``=`` literal by substitution. Returns ``None`` when the
    rule can never fire (two distinct constants equated, or ``t != t``).
    Inequalities between distinct constants are dropped as trivially true."""
    parent: dict = {}

    def find(t):
        while parent.get(t, t) != t:
            t = parent[t]
        return t

    for lit in rule.body:
        if isinstance(lit, Eq):
            a, b = find(lit.left), find(lit.right)
            if a == b:
                continue
            if isinstance(a, Const) and isinstance(b, Const):
                return None
            # constants always win as class representatives
            if isinstance(a, Const) or (isinstance(b, Var) and a.name < b.name):
                a, b = b, a
            parent[a] = b
    sub = {v: find(v) for v in rule.vars() if find(v) != v}
    body = []
    for lit in rule.body:
        if isinstance(lit, Eq):
            continue
        if isinstance(lit, Atom):
            body.append(_subst_atom(lit, sub))
        elif isinstance(lit, Negated):
            body.append(Negated(_subst_atom(lit.atom, sub)))
        else:
            left, right = _substitute(lit.left, sub), _substitute(lit.right, sub)
            if left == right:
                return None
            if isinstance(left, Const) and isinstance(right, Const):
                continue
            body.append(Neq(left, right))
    return Rule(_subst_atom(rule.head, sub), tuple(body))
