"""Normalized Datalog programs to graph patterns over a reified fact graph.

Each fact copy ``p(c1, ..., cn)`` becomes a fresh resource ``u`` with triples
``(u, predicate, "p")`` and ``(u, rdf:_i, "ci")``. A fact with multiplicity n
gets n distinct resources so that pattern evaluation sees n matches."""
from __future__ import annotations

import itertools

from ..datalog.analysis import validate
from ..datalog.normalform import JOIN, NEGATION, PROJECTION, SELECTION, check_normal_form, rule_shape
from ..datalog.program import Atom, Const, Eq, Neq, Program, Rule, Substitution, SubstitutionMultiset
from ..datalog.program import Var as DVar
from ..multiset import Mapping, MappingMultiset
from ..patterns import (
    And,
    CEq,
    CEqVar,
    CNot,
    ExceptStar,
    Filter,
    Pattern,
    Select,
    TriplePattern,
    Union_,
)
from ..rdf import Graph, Iri, Literal, Triple, Var
from .sparql_datalog import TranslationError

PREDICATE = Iri("predicate")


def position(i: int) -> Iri:
    return Iri(f"rdf:_{i}")


def facts_to_graph(facts) -> Graph:
    """Reify every copy of every fact with its own fresh subject."""
    triples = []
    counter = itertools.count(1)
    for atom, count in facts:
        for _ in range(count):
            u = Iri(f"u{next(counter)}")
            triples.append(Triple(u, PREDICATE, Literal(atom.pred)))
            triples += [Triple(u, position(i), Literal(c.value)) for i, c in enumerate(atom.args, 1)]
    return Graph(triples)


def _svar(v: DVar) -> Var:
    return Var(v.name)


class _Gp:
    def __init__(self, prog: Program, goal: Atom):
        self.prog = prog
        self.idb = prog.idb_predicates()
        taken = {v.name for r in prog.rules for v in r.vars()} | {v.name for v in goal.vars()}
        self.fresh_names = (f"_Y{i}" for i in itertools.count(1) if f"_Y{i}" not in taken)

    def fresh(self) -> DVar:
        return DVar(next(self.fresh_names))

    def gp(self, atom: Atom) -> Pattern:
        """Pattern whose answers over the fact graph are the atom's
        substitutions; ``atom`` must be pure."""
        if atom.pred not in self.idb:
            y = _svar(self.fresh())
            p: Pattern = TriplePattern(y, PREDICATE, Literal(atom.pred))
            for i, a in enumerate(atom.args, 1):
                p = And(p, TriplePattern(y, position(i), _svar(a)))
            return Select(frozenset(_svar(a) for a in atom.args), p)
        parts = [self.rule_pattern(self.rename(rule, atom)) for rule in self.prog.rules_for(atom.pred)]
        out = parts[0]
        for part in parts[1:]:
            out = Union_(out, part)
        return out

    def rename(self, rule: Rule, atom: Atom) -> Rule:
        sub = dict(zip(rule.head.args, atom.args))
        for v in rule.vars():
            if v not in sub:
                sub[v] = self.fresh()

        def r(t):
            return sub[t] if isinstance(t, DVar) else t

        def ra(a: Atom) -> Atom:
            return Atom(a.pred, tuple(r(t) for t in a.args))

        body = []
        for lit in rule.body:
            if isinstance(lit, Atom):
                body.append(ra(lit))
            elif isinstance(lit, (Eq, Neq)):
                body.append(type(lit)(r(lit.left), r(lit.right)))
            else:
                body.append(type(lit)(ra(lit.atom)))
        return Rule(ra(rule.head), tuple(body))

    def rule_pattern(self, rule: Rule) -> Pattern:
        shape = rule_shape(rule)
        first = self.gp(rule.body[0])
        if shape == PROJECTION:
            return Select(frozenset(_svar(a) for a in rule.head.args), first)
        if shape == JOIN:
            return And(first, self.gp(rule.body[1]))
        if shape == NEGATION:
            neg = rule.body[1].atom
            second = self.gp(neg)
            if set(neg.args) != set(rule.body[0].args):
                # compare whole mappings: keep the first-atom rows that join
                second = Select(frozenset(_svar(a) for a in rule.body[0].args), And(first, second))
            return ExceptStar(first, second)
        if shape == SELECTION:
            p = first
            for lit in rule.body[1:]:
                p = Filter(p, comparison_constraint(lit))
            return p
        raise TranslationError(f"rule is not in normal form: {rule}")


def comparison_constraint(lit):
    left, right = lit.left, lit.right
    if isinstance(left, Const):
        left, right = right, left
    if isinstance(left, Const):
        raise TranslationError(f"comparison between two constants: {lit}")
    if isinstance(right, Const):
        atom = CEq(_svar(left), Literal(right.value))
    else:
        atom = CEqVar(_svar(left), _svar(right))
    return atom if isinstance(lit, Eq) else CNot(atom)


def datalog_to_sparql(prog: Program, goal: Atom) -> tuple[Pattern, Graph]:
    validate(prog)
    problems = check_normal_form(prog)
    if problems:
        raise TranslationError("program is not normalized: " + "; ".join(problems))
    if not goal.is_pure():
        raise TranslationError(f"goal {goal} must have distinct variable arguments")
    return _Gp(prog, goal).gp(goal), facts_to_graph(prog.facts)


def mapping_to_answer(mu: Mapping) -> Substitution:
    return Substitution((v.name, t.value) for v, t in mu.items())


def sparql_answers(omega: MappingMultiset) -> SubstitutionMultiset:
    """Convert pattern answers over the fact graph back to substitutions."""
    return SubstitutionMultiset((mapping_to_answer(mu), c) for mu, c in omega.items())
