"""Translations between relational algebra expressions and normalized Datalog.

Attribute names double as Datalog variable names, so a row of a relation and
a substitution over the same names carry identical information."""
from __future__ import annotations

import itertools

from .. import mra
from ..datalog.analysis import validate
from ..datalog.normalform import JOIN, NEGATION, PROJECTION, SELECTION, check_normal_form, rule_shape
from ..datalog.program import Atom, Const, Eq, Negated, Neq, Program, Rule, Substitution, SubstitutionMultiset
from ..datalog.program import Var as DVar
from .sparql_datalog import TranslationError


# -- conditions to literal branches ----------------------------------------------

def _nnf(c, positive=True):
    if isinstance(c, mra.CondNot):
        return _nnf(c.operand, not positive)
    if isinstance(c, (mra.CondAnd, mra.CondOr)):
        is_and = isinstance(c, mra.CondAnd) == positive
        kind = mra.CondAnd if is_and else mra.CondOr
        return kind(_nnf(c.left, positive), _nnf(c.right, positive))
    if positive:
        return c
    return mra.CondNeq(c.attr, c.other) if isinstance(c, mra.CondEq) else mra.CondEq(c.attr, c.other)


def condition_clauses(c) -> list[list]:
    """CNF of a condition as a list of clauses of Eq/Neq atoms."""
    def go(n):
        if isinstance(n, mra.CondAnd):
            return go(n.left) + go(n.right)
        if isinstance(n, mra.CondOr):
            return [a + b for a in go(n.left) for b in go(n.right)]
        return [[n]]

    out = []
    for clause in go(_nnf(c)):
        clause = list(dict.fromkeys(clause))
        if clause not in out:
            out.append(clause)
    return out


def _negate(atom):
    return mra.CondNeq(atom.attr, atom.other) if isinstance(atom, mra.CondEq) else mra.CondEq(atom.attr, atom.other)


def clause_branches(clause: list) -> list[list]:
    """Mutually exclusive conjunctions whose disjunction is the clause."""
    if len(clause) == 1:
        return [clause]
    out = []
    for signs in itertools.product((True, False), repeat=len(clause)):
        if any(signs):
            out.append([a if s else _negate(a) for a, s in zip(clause, signs)])
    return out


def _operand(o):
    return DVar(o.name) if isinstance(o, mra.Attr) else Const(o)


def comparison_literal(atom):
    cls = Eq if isinstance(atom, mra.CondEq) else Neq
    return cls(DVar(atom.attr), _operand(atom.other))


# -- MRA to Datalog ---------------------------------------------------------------

class _ToDatalog:
    def __init__(self, db: dict):
        self.db = db
        self.rules: list[Rule] = []
        self.n = 0
        self.base: dict[str, str] = {}

    def fresh(self) -> str:
        self.n += 1
        return f"out{self.n}"

    def head(self, schema) -> Atom:
        return Atom(self.fresh(), tuple(DVar(a) for a in schema))

    def atom(self, e) -> Atom:
        if isinstance(e, mra.BaseRelation):
            rel = self.db[e.name]
            self.base.setdefault(e.name, f"db_{e.name}")
            head = self.head(rel.schema)
            self.rules.append(Rule(head, (Atom(self.base[e.name], head.args),)))
            return head
        if isinstance(e, mra.Select):
            current = self.atom(e.expr)
            for clause in condition_clauses(e.condition):
                head = self.head(a.name for a in current.args)
                for branch in clause_branches(clause):
                    self.rules.append(Rule(head, (current,) + tuple(comparison_literal(a) for a in branch)))
                current = head
            return current
        if isinstance(e, mra.Project):
            inner = self.atom(e.expr)
            head = self.head(e.attrs)
            self.rules.append(Rule(head, (inner,)))
            return head
        left, right = self.atom(e.left), self.atom(e.right)
        if isinstance(e, mra.Join):
            head = Atom(self.fresh(), tuple(dict.fromkeys(left.args + right.args)))
            self.rules.append(Rule(head, (left, right)))
        elif isinstance(e, mra.Union_):
            head = Atom(self.fresh(), left.args)
            self.rules += [Rule(head, (left,)), Rule(head, (right,))]
        elif isinstance(e, mra.Except):
            head = Atom(self.fresh(), left.args)
            self.rules.append(Rule(head, (left, Negated(right))))
        else:
            raise TypeError(f"not an MRA expression: {e!r}")
        return head


def mra_to_datalog(e, db: dict) -> tuple[Program, Atom]:
    mra.schema_of(e, {k: r.schema for k, r in db.items()})
    tr = _ToDatalog(db)
    goal = tr.atom(e)
    facts = [
        (Atom(pred, tuple(Const(v) for v in row)), n)
        for name, pred in tr.base.items()
        for row, n in db[name].rows()
    ]
    return Program(tuple(tr.rules), tuple(facts)), goal


def relation_to_answers(r: mra.Relation) -> SubstitutionMultiset:
    return SubstitutionMultiset((Substitution(zip(r.schema, row)), n) for row, n in r.rows())


def answers_to_relation(answers: SubstitutionMultiset, schema) -> mra.Relation:
    schema = tuple(schema)
    rows = []
    for theta, n in answers.items():
        d = theta.as_dict()
        rows.append((tuple(d[a] for a in schema), n))
    return mra.Relation(schema, rows)


# -- Datalog to MRA ---------------------------------------------------------------

class _ToMra:
    def __init__(self, prog: Program, goal: Atom):
        self.prog = prog
        self.idb = prog.idb_predicates()
        self.facts: dict[str, list] = {}
        for atom, n in prog.facts:
            self.facts.setdefault(atom.pred, []).append((tuple(c.value for c in atom.args), n))
        taken = {v.name for r in prog.rules for v in r.vars()} | {v.name for v in goal.vars()}
        self.fresh_vars = (f"_A{i}" for i in itertools.count(1) if f"_A{i}" not in taken)
        self.relation_names = set(prog.predicates())
        self.copies: dict = {}
        self.db: dict[str, mra.Relation] = {}

    def base(self, atom: Atom):
        schema = tuple(a.name for a in atom.args)
        key = (atom.pred, schema)
        if key not in self.copies:
            for i in itertools.count(1):
                name = f"{atom.pred}_{i}"
                if name not in self.relation_names:
                    break
            self.relation_names.add(name)
            self.copies[key] = name
            self.db[name] = mra.Relation(schema, self.facts.get(atom.pred, []))
        return mra.BaseRelation(self.copies[key])

    def expr(self, atom: Atom):
        """Expression with schema equal to the atom's variables, in order."""
        if atom.pred not in self.idb:
            return self.base(atom)
        parts = [self.rule_expr(self.rename(rule, atom)) for rule in self.prog.rules_for(atom.pred)]
        out = parts[0]
        for part in parts[1:]:
            out = mra.Union_(out, part)
        return out

    def rename(self, rule: Rule, atom: Atom) -> Rule:
        sub = dict(zip(rule.head.args, atom.args))
        for v in rule.vars():
            if v not in sub:
                sub[v] = DVar(next(self.fresh_vars))

        def r(t):
            return sub[t] if isinstance(t, DVar) else t

        def ra(a):
            return Atom(a.pred, tuple(r(t) for t in a.args))

        body = []
        for lit in rule.body:
            if isinstance(lit, Atom):
                body.append(ra(lit))
            elif isinstance(lit, Negated):
                body.append(Negated(ra(lit.atom)))
            else:
                body.append(type(lit)(r(lit.left), r(lit.right)))
        return Rule(ra(rule.head), tuple(body))

    def rule_expr(self, rule: Rule):
        shape = rule_shape(rule)
        head = tuple(a.name for a in rule.head.args)
        first_atom = rule.body[0]
        first = self.expr(first_atom)
        first_schema = tuple(a.name for a in first_atom.args)
        if shape == PROJECTION:
            return mra.Project(head, first)
        if shape == SELECTION:
            cond = None
            for lit in rule.body[1:]:
                atom = literal_condition(lit)
                cond = atom if cond is None else mra.CondAnd(cond, atom)
            out, schema = mra.Select(cond, first), first_schema
        elif shape == JOIN:
            second = rule.body[1]
            out = mra.Join(first, self.expr(second))
            schema = tuple(dict.fromkeys(first_schema + tuple(a.name for a in second.args)))
        elif shape == NEGATION:
            out = mra.Except(first, mra.Join(first, self.expr(rule.body[1].atom)))
            schema = first_schema
        else:
            raise TranslationError(f"rule is not in normal form: {rule}")
        return out if schema == head else mra.Project(head, out)


def literal_condition(lit):
    left, right = lit.left, lit.right
    if isinstance(left, Const):
        left, right = right, left
    if isinstance(left, Const):
        raise TranslationError(f"comparison between two constants: {lit}")
    other = mra.Attr(right.name) if isinstance(right, DVar) else right.value
    return mra.CondEq(left.name, other) if isinstance(lit, Eq) else mra.CondNeq(left.name, other)


def datalog_to_mra(prog: Program, goal: Atom):
    """Expression and database whose evaluation yields the goal's answers,
    with one attribute per goal variable."""
    validate(prog)
    problems = check_normal_form(prog)
    if problems:
        raise TranslationError("program is not normalized: " + "; ".join(problems))
    if not goal.is_pure():
        raise TranslationError(f"goal {goal} must have distinct variable arguments")
    tr = _ToMra(prog, goal)
    e = tr.expr(goal)
    return e, tr.db
