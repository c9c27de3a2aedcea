"""Core graph patterns to Datalog, one predicate per subpattern.

Mappings are encoded positionally over the sorted variables of a subpattern,
with ``null`` standing for an unbound variable. Joins go through the ``comp``
relation, which relates two possibly-null values to their merge."""
from __future__ import annotations

from dataclasses import dataclass, field

from ..datalog.program import Atom, Const, Eq, Negated, Neq, Program, Rule
from ..datalog.program import Var as DVar
from ..patterns import (
    And,
    CBound,
    CEq,
    CEqVar,
    CNot,
    Except,
    Filter,
    Pattern,
    Select,
    TriplePattern,
    Union_,
    check_well_formed,
    dom,
    var_order,
)
from ..rdf import NULL, Graph, Iri, Var
from .encoding import datalog_var, term_const

NULL_CONST = Const(NULL)


class TranslationError(ValueError):
    pass


@dataclass
class TranslationBundle:
    program: Program
    goal: Atom
    var_order: tuple
    notes: list = field(default_factory=list)


def graph_to_facts(g: Graph) -> list:
    """Facts describing ``g``: term kinds, the null marker and the triples."""
    iris, literals = set(), set()
    for term in g.terms():
        (iris if isinstance(term, Iri) else literals).add(term)
    facts = [(Atom("iri", (term_const(t),)), 1) for t in sorted(iris)]
    facts += [(Atom("literal", (term_const(t),)), 1) for t in sorted(literals)]
    facts.append((Atom("Null", (NULL_CONST,)), 1))
    facts += [(Atom("triple", tuple(term_const(t) for t in tr)), 1) for tr in g]
    return facts


X, N = DVar("X"), DVar("N")


def term_rules() -> list[Rule]:
    return [
        Rule(Atom("term", (X,)), (Atom("iri", (X,)),)),
        Rule(Atom("term", (X,)), (Atom("literal", (X,)),)),
    ]


def comp_rules() -> list[Rule]:
    """comp(a, b, c): c is the merge of the possibly-null values a and b."""
    return [
        Rule(Atom("comp", (X, X, X)), (Atom("term", (X,)),)),
        Rule(Atom("comp", (X, N, X)), (Atom("term", (X,)), Atom("Null", (N,)))),
        Rule(Atom("comp", (N, X, X)), (Atom("term", (X,)), Atom("Null", (N,)))),
        Rule(Atom("comp", (N, N, N)), (Atom("Null", (N,)),)),
    ]


def _args(variables) -> tuple:
    return tuple(datalog_var(v) for v in variables)


def _pattern_term(t):
    return datalog_var(t) if isinstance(t, Var) else term_const(t)


def null_padding(head_vars, branch_vars) -> list:
    return [Atom("Null", (datalog_var(v),)) for v in head_vars if v not in branch_vars]


def _union_rules(head: Atom, p: Union_, left: Atom, right: Atom) -> list[Rule]:
    order = var_order(p)
    return [
        Rule(head, (left,) + tuple(null_padding(order, dom(p.left)))),
        Rule(head, (right,) + tuple(null_padding(order, dom(p.right)))),
    ]


def condition_literals(c) -> tuple:
    """Datalog literals true exactly when the atomic filter ``c`` is true."""
    if isinstance(c, CBound):
        return (Negated(Atom("Null", (datalog_var(c.var),))),)
    if isinstance(c, CEq):
        return (Eq(datalog_var(c.var), term_const(c.term)),)
    if isinstance(c, CEqVar):
        x = datalog_var(c.left)
        return (Eq(x, datalog_var(c.right)), Negated(Atom("Null", (x,))))
    if isinstance(c, CNot):
        a = c.operand
        if isinstance(a, CBound):
            return (Atom("Null", (datalog_var(a.var),)),)
        if isinstance(a, CEq):
            x = datalog_var(a.var)
            return (Neq(x, term_const(a.term)), Negated(Atom("Null", (x,))))
        if isinstance(a, CEqVar):
            x, y = datalog_var(a.left), datalog_var(a.right)
            return (Neq(x, y), Negated(Atom("Null", (x,))), Negated(Atom("Null", (y,))))
    raise TranslationError(f"filter constraint is not atomic: {c!r}")


class _Translator:
    def __init__(self):
        self.rules: list[Rule] = []
        self.n = 0

    def fresh(self) -> str:
        self.n += 1
        return f"p{self.n}"

    def atom(self, p: Pattern) -> Atom:
        """Emit rules for ``p`` and return its head atom over var_order(p)."""
        if isinstance(p, TriplePattern):
            head = Atom(self.fresh(), _args(var_order(p)))
            body = Atom("triple", tuple(_pattern_term(t) for t in p))
            self.rules.append(Rule(head, (body,)))
            return head
        if isinstance(p, And):
            left, right = self.atom(p.left), self.atom(p.right)
            shared = sorted(dom(p.left) & dom(p.right), key=lambda v: v.name)
            nu1 = {datalog_var(v): DVar("L_" + v.name) for v in shared}
            nu2 = {datalog_var(v): DVar("R_" + v.name) for v in shared}
            body = [
                Atom(left.pred, tuple(nu1.get(a, a) for a in left.args)),
                Atom(right.pred, tuple(nu2.get(a, a) for a in right.args)),
            ]
            body += [Atom("comp", (nu1[datalog_var(v)], nu2[datalog_var(v)], datalog_var(v))) for v in shared]
            head = Atom(self.fresh(), _args(var_order(p)))
            self.rules.append(Rule(head, tuple(body)))
            return head
        if isinstance(p, Union_):
            left, right = self.atom(p.left), self.atom(p.right)
            head = Atom(self.fresh(), _args(var_order(p)))
            self.rules.extend(_union_rules(head, p, left, right))
            return head
        if isinstance(p, Except):
            left, right = self.atom(p.left), self.atom(p.right)
            head = Atom(self.fresh(), left.args)
            self.rules.append(Rule(head, (left, Negated(right))))
            return head
        if isinstance(p, Select):
            inner = self.atom(p.pattern)
            head = Atom(self.fresh(), _args(var_order(p)))
            self.rules.append(Rule(head, (inner,)))
            return head
        if isinstance(p, Filter):
            inner = self.atom(p.pattern)
            head = Atom(self.fresh(), inner.args)
            self.rules.append(Rule(head, (inner,) + condition_literals(p.constraint)))
            return head
        raise TranslationError(f"not a core pattern node: {type(p).__name__}")


def sparql_to_datalog(p: Pattern, g: Graph) -> TranslationBundle:
    check_well_formed(p)
    tr = _Translator()
    goal = tr.atom(p)
    rules = term_rules() + comp_rules() + tr.rules
    return TranslationBundle(Program(tuple(rules), tuple(graph_to_facts(g))), goal, var_order(p))


__all__ = [
    "TranslationBundle", "TranslationError", "comp_rules", "condition_literals",
    "graph_to_facts", "null_padding", "sparql_to_datalog", "term_rules",
]
