"""Pattern-to-pattern rewrites into the core fragment.

``to_core`` removes OPT, MINUS, DIFF and EXCEPTSTAR and reduces every FILTER
to a single atom or negated atom, preserving multiplicities exactly.

Unbound variables make filter atoms evaluate to *error*, so the textbook
two-valued identities need care here:

* A disjunction ``d1 || ... || dk`` is split into one branch per nonzero
  sign vector, where a ``-`` sign means "not true" (false *or* error), and
  each "not true" outcome is itself split into mutually exclusive chains of
  atomic filters (for instance ``!bound(?x)`` versus ``!(?x = c)``).
  When no atom can raise an error this is exactly the familiar
  ``(d1 && !d2) || (!d1 && d2) || (d1 && d2)`` expansion.
* Compatibility of two mappings is encoded with three mutually exclusive
  states per shared variable: unbound on the left, bound on the left only,
  or bound on both sides and equal.
"""
from __future__ import annotations

import itertools

from .patterns import (
    ATOMS,
    And,
    CAnd,
    CBound,
    CEq,
    CEqVar,
    CNot,
    COr,
    Constraint,
    Diff,
    Except,
    ExceptStar,
    Filter,
    Minus,
    Opt,
    Pattern,
    Select,
    TriplePattern,
    Union_,
    children,
    conjunction,
    constraint_vars,
    disjunction,
    dom,
    is_literal_constraint,
    pattern_vars,
)
from .rdf import Var


class RewriteError(ValueError):
    pass


class FreshNameSource:
    """Hands out variable names that do not occur in ``taken``."""

    def __init__(self, taken=(), prefix: str = "f"):
        self.prefix = prefix
        self.counter = 0
        self.taken = {v.name if isinstance(v, Var) else v for v in taken}

    def var(self) -> Var:
        while True:
            self.counter += 1
            name = f"{self.prefix}{self.counter}"
            if name not in self.taken:
                self.taken.add(name)
                return Var(name)

    def renaming(self, variables) -> dict[Var, Var]:
        return {v: self.var() for v in sorted(variables, key=lambda v: v.name)}


# -- renaming ----------------------------------------------------------------

def rename_constraint(c: Constraint, theta: dict) -> Constraint:
    if isinstance(c, CEq):
        return CEq(theta.get(c.var, c.var), c.term)
    if isinstance(c, CEqVar):
        return CEqVar(theta.get(c.left, c.left), theta.get(c.right, c.right))
    if isinstance(c, CBound):
        return CBound(theta.get(c.var, c.var))
    if isinstance(c, CNot):
        return CNot(rename_constraint(c.operand, theta))
    return type(c)(rename_constraint(c.left, theta), rename_constraint(c.right, theta))


def rename_pattern(p: Pattern, theta: dict) -> Pattern:
    if isinstance(p, TriplePattern):
        return TriplePattern(*(theta.get(t, t) if isinstance(t, Var) else t for t in p))
    if isinstance(p, Filter):
        return Filter(rename_pattern(p.pattern, theta), rename_constraint(p.constraint, theta))
    if isinstance(p, Select):
        return Select(frozenset(theta.get(v, v) for v in p.variables), rename_pattern(p.pattern, theta))
    return type(p)(rename_pattern(p.left, theta), rename_pattern(p.right, theta))


# -- filter atomization ------------------------------------------------------

def _nnf(c: Constraint, positive: bool = True):
    """Negation normal form as nested ('and'|'or', parts) / literal leaves."""
    if isinstance(c, ATOMS):
        return c if positive else CNot(c)
    if isinstance(c, CNot):
        return _nnf(c.operand, not positive)
    is_and = isinstance(c, CAnd)
    op = "and" if is_and == positive else "or"
    return (op, [_nnf(c.left, positive), _nnf(c.right, positive)])


def cnf_clauses(c: Constraint) -> list[list[Constraint]]:
    """Conjunctive normal form as a list of clauses of literals."""

    def go(node):
        if not isinstance(node, tuple):
            return [[node]]
        op, parts = node
        sub = [go(part) for part in parts]
        if op == "and":
            return [clause for s in sub for clause in s]
        out = [[]]
        for s in sub:
            out = [a + b for a in out for b in s]
        return out

    clauses = []
    for clause in go(_nnf(c)):
        deduped = list(dict.fromkeys(clause))
        if deduped not in clauses:
            clauses.append(deduped)
    return clauses


def atom_outcomes(atom) -> dict[str, list[list[Constraint]]]:
    """For each truth value, mutually exclusive chains of literals that hold
    exactly when the atom takes that value."""
    if isinstance(atom, CBound):
        return {"true": [[atom]], "false": [[CNot(atom)]], "error": []}
    if isinstance(atom, CEq):
        return {"true": [[atom]], "false": [[CNot(atom)]], "error": [[CNot(CBound(atom.var))]]}
    if isinstance(atom, CEqVar):
        if atom.left == atom.right:
            error = [[CNot(CBound(atom.left))]]
        else:
            error = [
                [CNot(CBound(atom.left))],
                [CBound(atom.left), CNot(CBound(atom.right))],
            ]
        return {"true": [[atom]], "false": [[CNot(atom)]], "error": error}
    raise TypeError(f"not an atom: {atom!r}")


def literal_chains(literal: Constraint, holds: bool) -> list[list[Constraint]]:
    """Chains covering "literal is true" (holds) or "literal is not true"."""
    if isinstance(literal, CNot):
        out = atom_outcomes(literal.operand)
        return out["false"] if holds else out["true"] + out["error"]
    out = atom_outcomes(literal)
    return out["true"] if holds else out["false"] + out["error"]


def disjunction_branches(clause: list[Constraint]) -> list[list[Constraint]]:
    """Mutually exclusive literal chains whose union holds iff the clause is true."""
    if len(clause) == 1:
        return [[clause[0]]]
    branches = []
    for signs in itertools.product((True, False), repeat=len(clause)):
        if not any(signs):
            continue
        options = [literal_chains(lit, s) for lit, s in zip(clause, signs)]
        for combo in itertools.product(*options):
            branches.append([lit for chain in combo for lit in chain])
    return branches


def filter_chain(p: Pattern, chain) -> Pattern:
    for literal in chain:
        p = Filter(p, literal)
    return p


def union_all(parts: list[Pattern]) -> Pattern:
    out = parts[0]
    for part in parts[1:]:
        out = Union_(out, part)
    return out


def atomize_filters(p: Filter) -> Pattern:
    if is_literal_constraint(p.constraint):
        return p
    out = p.pattern
    for clause in cnf_clauses(p.constraint):
        out = union_all([filter_chain(out, chain) for chain in disjunction_branches(clause)])
    return out


def _filter(p: Pattern, c: Constraint) -> Pattern:
    return atomize_filters(Filter(p, c))


# -- set-difference constructions --------------------------------------------

def none_bound(variables) -> Constraint:
    return conjunction(CNot(CBound(v)) for v in sorted(variables, key=lambda v: v.name))


def some_bound(variables) -> Constraint:
    return disjunction(CBound(v) for v in sorted(variables, key=lambda v: v.name))


def except_via_exceptstar(p: Except) -> ExceptStar:
    return ExceptStar(p.left, p.right)


def exceptstar_via_except(p: ExceptStar) -> Pattern:
    left, right = p.left, p.right
    dl, dr = dom(left), dom(right)
    shared = dl & dr
    only_left, only_right = dl - shared, dr - shared
    if not only_left and not only_right:
        return Except(left, right)
    lhs = Select(shared, Filter(left, none_bound(only_left))) if only_left else left
    rhs = Select(shared, Filter(right, none_bound(only_right))) if only_right else right
    out = Except(lhs, rhs)
    if only_left:
        out = Union_(out, Filter(left, some_bound(only_left)))
    return out


_UNBOUND, _LEFT_ONLY, _EQUAL = 1, 2, 3


def _state_chain(x: Var, x2: Var, state: int) -> list[Constraint]:
    if state == _UNBOUND:
        return [CNot(CBound(x))]
    if state == _LEFT_ONLY:
        return [CBound(x), CNot(CBound(x2))]
    return [CEqVar(x, x2)]


def _compatible_branches(shared, theta, require_overlap=False):
    """Yield (states, chain) for every compatibility state vector."""
    shared = sorted(shared, key=lambda v: v.name)
    for states in itertools.product((_UNBOUND, _LEFT_ONLY, _EQUAL), repeat=len(shared)):
        if require_overlap and _EQUAL not in states:
            continue
        chain = [lit for x, s in zip(shared, states) for lit in _state_chain(x, theta[x], s)]
        yield dict(zip(shared, states)), chain


def diff_via_except(p: Diff, fresh: FreshNameSource) -> Pattern:
    """(P1 DIFF P2) as P1 EXCEPT (the P1-mappings having a compatible P2 partner)."""
    left, right = p.left, p.right
    w = dom(left)
    theta = fresh.renaming(pattern_vars(right))
    base = And(left, rename_pattern(right, theta))
    shared = w & dom(right)
    branches = [filter_chain(base, chain) for _, chain in _compatible_branches(shared, theta)]
    return Except(left, Select(w, union_all(branches)))


def minus_via_except(p: Minus, fresh: FreshNameSource) -> Pattern:
    left, right = p.left, p.right
    w = dom(left)
    shared = w & dom(right)
    if not shared:
        return left
    theta = fresh.renaming(pattern_vars(right))
    base = And(left, rename_pattern(right, theta))
    branches = [
        filter_chain(base, chain)
        for _, chain in _compatible_branches(shared, theta, require_overlap=True)
    ]
    return Except(left, Select(w, union_all(branches)))


def opt_via_except(p: Opt, fresh: FreshNameSource) -> Pattern:
    left, right = p.left, p.right
    if not isinstance(right, Filter):
        return Union_(And(left, right), Diff(left, right))
    inner, c = right.pattern, right.constraint
    w = dom(left)
    shared = w & dom(inner)
    theta = fresh.renaming(pattern_vars(inner))
    base = And(left, rename_pattern(inner, theta))
    branches = []
    for states, chain in _compatible_branches(shared, theta):
        # value of each filter variable in the merged mapping
        subst = {
            x: (x if states.get(x) in (_LEFT_ONLY, _EQUAL) else theta[x])
            for x in constraint_vars(c)
        }
        branches.append(Filter(filter_chain(base, chain), rename_constraint(c, subst)))
    matched = Filter(And(left, inner), c)
    return Union_(matched, Except(left, Select(w, union_all(branches))))


# -- passes ------------------------------------------------------------------

def _bottom_up(p: Pattern, fn, memo: dict) -> Pattern:
    hit = memo.get(p)
    if hit is not None:
        return hit
    kids = children(p)
    if kids:
        new = tuple(_bottom_up(k, fn, memo) for k in kids)
        if isinstance(p, Filter):
            node = Filter(new[0], p.constraint)
        elif isinstance(p, Select):
            node = Select(p.variables, new[0])
        else:
            node = type(p)(*new)
    else:
        node = p
    out = fn(node)
    memo[p] = out
    return out


def eliminate_opt(p: Pattern, fresh: FreshNameSource) -> Pattern:
    return _bottom_up(p, lambda n: opt_via_except(n, fresh) if isinstance(n, Opt) else n, {})


def eliminate_minus_diff(p: Pattern, fresh: FreshNameSource) -> Pattern:
    def step(n):
        if isinstance(n, Minus):
            return minus_via_except(n, fresh)
        if isinstance(n, Diff):
            return diff_via_except(n, fresh)
        return n

    return _bottom_up(p, step, {})


def eliminate_exceptstar(p: Pattern) -> Pattern:
    return _bottom_up(p, lambda n: exceptstar_via_except(n) if isinstance(n, ExceptStar) else n, {})


def atomize_all(p: Pattern) -> Pattern:
    return _bottom_up(p, lambda n: atomize_filters(n) if isinstance(n, Filter) else n, {})


_KNOWN = (TriplePattern, And, Union_, Opt, Minus, Diff, Except, ExceptStar, Filter, Select)


def to_core(p: Pattern) -> Pattern:
    stack = [p]
    while stack:
        node = stack.pop()
        if not isinstance(node, _KNOWN):
            raise RewriteError(f"cannot rewrite node {node!r}")
        if isinstance(node, Filter) and not isinstance(node.constraint, (*ATOMS, CNot, CAnd, COr)):
            raise RewriteError(f"cannot rewrite constraint {node.constraint!r}")
        stack.extend(children(node))
    fresh = FreshNameSource(pattern_vars(p))
    p = eliminate_opt(p, fresh)
    p = eliminate_minus_diff(p, fresh)
    p = eliminate_exceptstar(p)
    return atomize_all(p)
