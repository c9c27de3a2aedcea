"""Graph pattern AST, filter constraints, concrete syntax and well-formedness.

Concrete syntax (all binary operators share one precedence level and are
left associative; use braces or parentheses to group)::

    { ?x <p> ?y . ?y <q> "lit" }
    ({ ?x <p> ?y } OPT { ?y <q> ?z }) FILTER(bound(?z) || ?x = <a>)
    SELECT ?x { { ?x <p> ?y } EXCEPTSTAR { ?x <q> ?y } }

Binary keywords: ``AND`` (or ``.``), ``UNION``, ``OPT``, ``MINUS``, ``DIFF``,
``EXCEPT``, ``EXCEPTSTAR`` (also written ``EXCEPT*``).
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass, fields
from functools import lru_cache
from typing import Union

from . import algebra as alg
from .rdf import Iri, Literal, Term, Var


def _node(cls):
    cls = dataclass(frozen=True)(cls)
    names = tuple(f.name for f in fields(cls))
    tag = cls.__name__

    def __hash__(self):
        try:
            return self.__dict__["_h"]
        except KeyError:
            h = hash((tag,) + tuple(getattr(self, n) for n in names))
            object.__setattr__(self, "_h", h)
            return h

    cls.__hash__ = __hash__
    return cls


# -- filter constraints ------------------------------------------------------

@_node
class CEq:
    var: Var
    term: Term


@_node
class CEqVar:
    left: Var
    right: Var


@_node
class CBound:
    var: Var


@_node
class CNot:
    operand: "Constraint"


@_node
class COr:
    left: "Constraint"
    right: "Constraint"


@_node
class CAnd:
    left: "Constraint"
    right: "Constraint"


Constraint = Union[CEq, CEqVar, CBound, CNot, COr, CAnd]
ATOMS = (CEq, CEqVar, CBound)


def constraint_vars(c: Constraint) -> frozenset[Var]:
    if isinstance(c, CEq):
        return frozenset({c.var})
    if isinstance(c, CEqVar):
        return frozenset({c.left, c.right})
    if isinstance(c, CBound):
        return frozenset({c.var})
    if isinstance(c, CNot):
        return constraint_vars(c.operand)
    return constraint_vars(c.left) | constraint_vars(c.right)


def is_literal_constraint(c: Constraint) -> bool:
    """An atom or a negated atom."""
    if isinstance(c, CNot):
        c = c.operand
    return isinstance(c, ATOMS)


def f_of(c: Constraint) -> alg.Formula:
    if isinstance(c, CEq):
        return alg.Eq(c.var, c.term)
    if isinstance(c, CEqVar):
        return alg.EqVar(c.left, c.right)
    if isinstance(c, CBound):
        return alg.Bound(c.var)
    if isinstance(c, CNot):
        return alg.Not(f_of(c.operand))
    if isinstance(c, COr):
        return alg.Or(f_of(c.left), f_of(c.right))
    if isinstance(c, CAnd):
        return alg.And(f_of(c.left), f_of(c.right))
    raise TypeError(f"not a filter constraint: {c!r}")


def conjunction(parts) -> Constraint:
    parts = list(parts)
    out = parts[0]
    for part in parts[1:]:
        out = CAnd(out, part)
    return out


def disjunction(parts) -> Constraint:
    parts = list(parts)
    out = parts[0]
    for part in parts[1:]:
        out = COr(out, part)
    return out


# -- graph patterns ----------------------------------------------------------

PatternTerm = Union[Iri, Literal, Var]


@_node
class TriplePattern:
    subject: PatternTerm
    predicate: PatternTerm
    object: PatternTerm

    def __iter__(self):
        return iter((self.subject, self.predicate, self.object))


@_node
class And:
    left: "Pattern"
    right: "Pattern"


@_node
class Union_:
    left: "Pattern"
    right: "Pattern"


@_node
class Opt:
    left: "Pattern"
    right: "Pattern"


@_node
class Minus:
    left: "Pattern"
    right: "Pattern"


@_node
class Diff:
    left: "Pattern"
    right: "Pattern"


@_node
class Except:
    left: "Pattern"
    right: "Pattern"


@_node
class ExceptStar:
    left: "Pattern"
    right: "Pattern"


@_node
class Filter:
    pattern: "Pattern"
    constraint: Constraint


@_node
class Select:
    variables: frozenset
    pattern: "Pattern"

    def __post_init__(self):
        object.__setattr__(self, "variables", frozenset(self.variables))


Pattern = Union[TriplePattern, And, Union_, Opt, Minus, Diff, Except, ExceptStar, Filter, Select]
BINARY = (And, Union_, Opt, Minus, Diff, Except, ExceptStar)
KEYWORD = {
    And: "AND",
    Union_: "UNION",
    Opt: "OPT",
    Minus: "MINUS",
    Diff: "DIFF",
    Except: "EXCEPT",
    ExceptStar: "EXCEPTSTAR",
}
CORE_KINDS = (TriplePattern, And, Union_, Except, Filter, Select)


def children(p: Pattern) -> tuple:
    if isinstance(p, BINARY):
        return (p.left, p.right)
    if isinstance(p, (Filter, Select)):
        return (p.pattern,)
    return ()


@lru_cache(maxsize=65536)
def dom(p: Pattern) -> frozenset[Var]:
    if isinstance(p, TriplePattern):
        return frozenset(t for t in p if isinstance(t, Var))
    if isinstance(p, (And, Union_, Opt)):
        return dom(p.left) | dom(p.right)
    if isinstance(p, (Minus, Diff, Except, ExceptStar)):
        return dom(p.left)
    if isinstance(p, Filter):
        return dom(p.pattern)
    if isinstance(p, Select):
        return p.variables
    raise TypeError(f"not a graph pattern: {p!r}")


def var_order(p: Pattern) -> tuple[Var, ...]:
    return tuple(sorted(dom(p), key=lambda v: v.name))


def pattern_vars(p: Pattern) -> frozenset[Var]:
    """Every variable occurring anywhere in ``p`` (including projected-away ones)."""
    if isinstance(p, TriplePattern):
        return dom(p)
    out = set()
    if isinstance(p, Filter):
        out |= constraint_vars(p.constraint)
    if isinstance(p, Select):
        out |= p.variables
    for child in children(p):
        out |= pattern_vars(child)
    return frozenset(out)


def is_core(p: Pattern) -> bool:
    if not isinstance(p, CORE_KINDS):
        return False
    if isinstance(p, Filter) and not is_literal_constraint(p.constraint):
        return False
    return all(is_core(c) for c in children(p))


# -- well-formedness ---------------------------------------------------------

class PatternError(ValueError):
    pass


class PatternSyntaxError(PatternError):
    def __init__(self, message: str, text: str = "", pos: int | None = None):
        self.pos = pos
        if pos is not None:
            line = text.count("\n", 0, pos) + 1
            col = pos - (text.rfind("\n", 0, pos) + 1) + 1
            message = f"line {line}, column {col}: {message}"
        super().__init__(message)


class WellFormednessError(PatternError):
    def __init__(self, invariant: str, node: Pattern, detail: str = ""):
        self.invariant = invariant
        self.node = node
        msg = f"{invariant} violated at {render_pattern(node)}"
        if detail:
            msg += f" ({detail})"
        super().__init__(msg)


def _names(vs) -> str:
    return " ".join(sorted(str(v) for v in vs))


def check_well_formed(p: Pattern) -> None:
    stack = [p]
    seen = set()
    while stack:
        node = stack.pop()
        if id(node) in seen:
            continue
        seen.add(id(node))
        if isinstance(node, TriplePattern):
            s, pr, o = node
            if not isinstance(s, (Iri, Literal, Var)) or not isinstance(o, (Iri, Literal, Var)):
                raise WellFormednessError("triple-terms", node)
            if not isinstance(pr, (Iri, Var)):
                raise WellFormednessError("triple-predicate", node, "predicate must be an IRI or variable")
            if not dom(node):
                raise WellFormednessError("triple-has-variable", node, "no variable in triple pattern")
        elif isinstance(node, Filter):
            missing = constraint_vars(node.constraint) - dom(node.pattern)
            if missing:
                raise WellFormednessError("filter-vars", node, f"var(C) not in dom(P1): {_names(missing)}")
        elif isinstance(node, Select):
            missing = node.variables - dom(node.pattern)
            if missing:
                raise WellFormednessError("select-vars", node, f"W not in dom(P1): {_names(missing)}")
        elif isinstance(node, Except):
            if dom(node.left) != dom(node.right):
                raise WellFormednessError(
                    "except-domains", node,
                    f"dom(P1)={{{_names(dom(node.left))}}} dom(P2)={{{_names(dom(node.right))}}}",
                )
        elif not isinstance(node, BINARY):
            raise TypeError(f"not a graph pattern: {node!r}")
        stack.extend(children(node))


def is_well_formed(p: Pattern) -> bool:
    try:
        check_well_formed(p)
    except PatternError:
        return False
    return True


# -- rendering ---------------------------------------------------------------

def render_term(t: PatternTerm) -> str:
    return str(t)


def render_constraint(c: Constraint) -> str:
    if isinstance(c, CEq):
        return f"({c.var} = {c.term})"
    if isinstance(c, CEqVar):
        return f"({c.left} = {c.right})"
    if isinstance(c, CBound):
        return f"bound({c.var})"
    if isinstance(c, CNot):
        return "!" + render_constraint(c.operand)
    if isinstance(c, COr):
        return f"({render_constraint(c.left)} || {render_constraint(c.right)})"
    if isinstance(c, CAnd):
        return f"({render_constraint(c.left)} && {render_constraint(c.right)})"
    raise TypeError(f"not a filter constraint: {c!r}")


def render_pattern(p: Pattern) -> str:
    if isinstance(p, TriplePattern):
        return "{ " + " ".join(render_term(t) for t in p) + " }"
    if isinstance(p, BINARY):
        return f"({render_pattern(p.left)} {KEYWORD[type(p)]} {render_pattern(p.right)})"
    if isinstance(p, Filter):
        c = render_constraint(p.constraint)
        if not isinstance(p.constraint, (CEq, CEqVar, COr, CAnd)):
            c = f"({c})"
        return f"({render_pattern(p.pattern)} FILTER{c})"
    if isinstance(p, Select):
        head = " ".join(str(v) for v in sorted(p.variables, key=lambda v: v.name))
        head = f"SELECT {head} " if head else "SELECT "
        return head + "{ " + render_pattern(p.pattern) + " }"
    raise TypeError(f"not a graph pattern: {p!r}")


# -- parsing -----------------------------------------------------------------

_TOKEN = re.compile(
    r"""
    (?P<ws>\s+|\#[^\n]*)
  | (?P<var>\?[A-Za-z_][A-Za-z0-9_]*)
  | (?P<iri><[^<>"\s]*>)
  | (?P<str>"(?:[^"\\]|\\.)*")
  | (?P<word>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>\|\||&&|!=|[{}().=!*])
    """,
    re.VERBOSE,
)

_BINARY_WORDS = {
    "AND": And,
    "UNION": Union_,
    "OPT": Opt,
    "OPTIONAL": Opt,
    "MINUS": Minus,
    "DIFF": Diff,
    "EXCEPTSTAR": ExceptStar,
}


def _tokenize(text: str):
    pos = 0
    out = []
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise PatternSyntaxError(f"unexpected character {text[pos]!r}", text, pos)
        kind = m.lastgroup
        if kind != "ws":
            out.append((kind, m.group(), pos))
        pos = m.end()
    out.append(("eof", "", len(text)))
    return out


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self, offset=0):
        return self.tokens[min(self.i + offset, len(self.tokens) - 1)]

    def next(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def error(self, message, tok=None):
        tok = tok or self.peek()
        return PatternSyntaxError(message, self.text, tok[2])

    def expect(self, value):
        tok = self.next()
        if tok[1] != value:
            raise self.error(f"expected {value!r}, found {tok[1] or 'end of input'!r}", tok)
        return tok

    def at(self, value):
        return self.peek()[1] == value

    def word(self):
        kind, value, _ = self.peek()
        return value.upper() if kind == "word" else None

    # patterns
    def pattern(self):
        left = self.primary()
        while True:
            w = self.word()
            if w == "FILTER":
                self.next()
                left = Filter(left, self.filter_constraint())
            elif w == "EXCEPT":
                self.next()
                if self.at("*"):
                    self.next()
                    left = ExceptStar(left, self.primary())
                else:
                    left = Except(left, self.primary())
            elif w in _BINARY_WORDS:
                self.next()
                left = _BINARY_WORDS[w](left, self.primary())
            elif self.at(".") and self.peek(1)[1] not in ("}", ")", ""):
                self.next()
                left = And(left, self.primary())
            else:
                return left

    def group_body(self, closer):
        p = self.pattern()
        if self.at("."):
            self.next()
        self.expect(closer)
        return p

    def primary(self):
        kind, value, _ = self.peek()
        if value == "{":
            self.next()
            return self.group_body("}")
        if value == "(":
            self.next()
            return self.group_body(")")
        if kind == "word" and value.upper() == "SELECT":
            self.next()
            variables = []
            while self.peek()[0] == "var":
                variables.append(Var(self.next()[1][1:]))
            if self.word() == "WHERE":
                self.next()
            if not (self.at("{") or self.at("(")):
                raise self.error("expected '{' after SELECT variables")
            return Select(frozenset(variables), self.primary())
        if kind in ("var", "iri", "str"):
            return TriplePattern(self.term(), self.term(), self.term())
        raise self.error(f"expected a graph pattern, found {value or 'end of input'!r}")

    def term(self):
        kind, value, pos = self.next()
        try:
            if kind == "var":
                return Var(value[1:])
            if kind == "iri":
                return Iri(value[1:-1])
            if kind == "str":
                return Literal(json.loads(value))
        except ValueError as exc:
            raise PatternSyntaxError(str(exc), self.text, pos) from None
        raise PatternSyntaxError(f"expected a term, found {value or 'end of input'!r}", self.text, pos)

    # constraints
    def filter_constraint(self):
        if self.word() == "BOUND":
            return self.c_unary()
        self.expect("(")
        c = self.c_or()
        self.expect(")")
        return c

    def c_or(self):
        c = self.c_and()
        while self.at("||"):
            self.next()
            c = COr(c, self.c_and())
        return c

    def c_and(self):
        c = self.c_unary()
        while self.at("&&"):
            self.next()
            c = CAnd(c, self.c_unary())
        return c

    def c_unary(self):
        kind, value, pos = self.peek()
        if value == "!":
            self.next()
            return CNot(self.c_unary())
        if value == "(":
            self.next()
            c = self.c_or()
            self.expect(")")
            return c
        if kind == "word" and value.lower() == "bound":
            self.next()
            self.expect("(")
            tok = self.next()
            if tok[0] != "var":
                raise self.error("bound() takes a variable", tok)
            self.expect(")")
            return CBound(Var(tok[1][1:]))
        left = self.term()
        op = self.next()
        if op[1] not in ("=", "!="):
            raise self.error("expected '=' or '!='", op)
        right = self.term()
        if not isinstance(left, Var):
            left, right = right, left
        if not isinstance(left, Var):
            raise PatternSyntaxError("comparison needs a variable", self.text, pos)
        atom = CEqVar(left, right) if isinstance(right, Var) else CEq(left, right)
        return CNot(atom) if op[1] == "!=" else atom


def parse_pattern(text: str, validate: bool = True) -> Pattern:
    parser = _Parser(text)
    p = parser.pattern()
    if parser.peek()[0] != "eof":
        raise parser.error(f"unexpected {parser.peek()[1]!r}")
    if validate:
        check_well_formed(p)
    return p


def parse_constraint(text: str) -> Constraint:
    parser = _Parser(text)
    c = parser.c_or()
    if parser.peek()[0] != "eof":
        raise parser.error(f"unexpected {parser.peek()[1]!r}")
    return c
