"""Multiset relational algebra: schema-tagged relations with counts, five
operators, expression trees and their text formats.

Database file::

    R(A, B)
    a, b * 3
    a, c

Expression text: ``project[A](join(R, select[A=B && B!=c](S)))``.
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass
from typing import Union

from .datalog.program import Const

_ATTR_RE = re.compile(r"[A-Z_][A-Za-z0-9_]*")


class MraError(ValueError):
    pass


class SchemaError(MraError):
    pass


def _check_schema(schema) -> tuple:
    schema = tuple(schema)
    for a in schema:
        if not isinstance(a, str) or not _ATTR_RE.fullmatch(a):
            raise SchemaError(f"illegal attribute name {a!r}")
    if len(set(schema)) != len(schema):
        raise SchemaError(f"duplicate attribute in schema {schema}")
    return schema


class Relation:
    """A multiset of tuples over an ordered schema."""

    __slots__ = ("schema", "_rows")

    def __init__(self, schema, rows=()):
        self.schema = _check_schema(schema)
        if isinstance(rows, dict):
            rows = rows.items()
        out: dict[tuple, int] = {}
        for row, count in rows:
            row = tuple(row)
            if len(row) != len(self.schema):
                raise SchemaError(f"row {row} does not fit schema {self.schema}")
            if not isinstance(count, int) or count < 0:
                raise MraError(f"invalid count {count!r}")
            if count:
                out[row] = out.get(row, 0) + count
        self._rows = out

    def rows(self):
        return self._rows.items()

    def count(self, row) -> int:
        return self._rows.get(tuple(row), 0)

    def __contains__(self, row):
        return tuple(row) in self._rows

    def __len__(self):
        return len(self._rows)

    def total(self) -> int:
        return sum(self._rows.values())

    def reorder(self, schema) -> "Relation":
        schema = tuple(schema)
        if set(schema) != set(self.schema):
            raise SchemaError(f"cannot reorder {self.schema} to {schema}")
        idx = [self.schema.index(a) for a in schema]
        return Relation(schema, ((tuple(r[i] for i in idx), c) for r, c in self.rows()))

    def canonical(self):
        rel = self.reorder(sorted(self.schema))
        return rel.schema, frozenset(rel._rows.items())

    def __eq__(self, other):
        if not isinstance(other, Relation):
            return NotImplemented
        if set(self.schema) != set(other.schema):
            return False
        return self.canonical() == other.canonical()

    __hash__ = None

    def sorted_rows(self):
        return sorted(self._rows.items())

    def __repr__(self):
        body = ", ".join(f"{row}:{c}" for row, c in self.sorted_rows())
        return f"Relation({list(self.schema)}, {{{body}}})"


# -- conditions ----------------------------------------------------------------

@dataclass(frozen=True)
class Attr:
    name: str


Operand = Union[Attr, str]


@dataclass(frozen=True)
class CondEq:
    attr: str
    other: Operand


@dataclass(frozen=True)
class CondNeq:
    attr: str
    other: Operand


@dataclass(frozen=True)
class CondAnd:
    left: "Condition"
    right: "Condition"


@dataclass(frozen=True)
class CondOr:
    left: "Condition"
    right: "Condition"


@dataclass(frozen=True)
class CondNot:
    operand: "Condition"


Condition = Union[CondEq, CondNeq, CondAnd, CondOr, CondNot]


def condition_attrs(c: Condition) -> set[str]:
    if isinstance(c, (CondEq, CondNeq)):
        out = {c.attr}
        if isinstance(c.other, Attr):
            out.add(c.other.name)
        return out
    if isinstance(c, CondNot):
        return condition_attrs(c.operand)
    return condition_attrs(c.left) | condition_attrs(c.right)


def eval_condition(c: Condition, row: dict) -> bool:
    if isinstance(c, (CondEq, CondNeq)):
        other = row[c.other.name] if isinstance(c.other, Attr) else c.other
        return (row[c.attr] == other) == isinstance(c, CondEq)
    if isinstance(c, CondNot):
        return not eval_condition(c.operand, row)
    if isinstance(c, CondAnd):
        return eval_condition(c.left, row) and eval_condition(c.right, row)
    return eval_condition(c.left, row) or eval_condition(c.right, row)


# -- operators -------------------------------------------------------------------

def mra_select(r: Relation, c: Condition) -> Relation:
    missing = condition_attrs(c) - set(r.schema)
    if missing:
        raise SchemaError(f"unknown attributes {sorted(missing)} in selection")
    return Relation(r.schema, ((row, n) for row, n in r.rows() if eval_condition(c, dict(zip(r.schema, row)))))


def mra_join(r: Relation, s: Relation) -> Relation:
    shared = [a for a in r.schema if a in s.schema]
    extra = [a for a in s.schema if a not in r.schema]
    ri = [r.schema.index(a) for a in shared]
    si = [s.schema.index(a) for a in shared]
    ei = [s.schema.index(a) for a in extra]
    index: dict = {}
    for row, n in s.rows():
        index.setdefault(tuple(row[i] for i in si), []).append((row, n))
    out = []
    for row, n in r.rows():
        for other, m in index.get(tuple(row[i] for i in ri), ()):
            out.append((row + tuple(other[i] for i in ei), n * m))
    return Relation(r.schema + tuple(extra), out)


def mra_project(r: Relation, attrs) -> Relation:
    attrs = _check_schema(attrs)
    missing = set(attrs) - set(r.schema)
    if missing:
        raise SchemaError(f"unknown attributes {sorted(missing)} in projection")
    idx = [r.schema.index(a) for a in attrs]
    return Relation(attrs, ((tuple(row[i] for i in idx), n) for row, n in r.rows()))


def _aligned(r: Relation, s: Relation, op: str) -> Relation:
    if set(r.schema) != set(s.schema):
        raise SchemaError(f"{op} of relations with schemas {r.schema} and {s.schema}")
    return s.reorder(r.schema)


def mra_union(r: Relation, s: Relation) -> Relation:
    s = _aligned(r, s, "union")
    return Relation(r.schema, list(r.rows()) + list(s.rows()))


def mra_except(r: Relation, s: Relation) -> Relation:
    s = _aligned(r, s, "except")
    return Relation(r.schema, ((row, n) for row, n in r.rows() if row not in s))


# -- expressions -----------------------------------------------------------------

@dataclass(frozen=True)
class BaseRelation:
    name: str


@dataclass(frozen=True)
class Select:
    condition: Condition
    expr: "Expr"


@dataclass(frozen=True)
class Join:
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Project:
    attrs: tuple
    expr: "Expr"

    def __post_init__(self):
        object.__setattr__(self, "attrs", tuple(self.attrs))


@dataclass(frozen=True)
class Union_:
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Except:
    left: "Expr"
    right: "Expr"


Expr = Union[BaseRelation, Select, Join, Project, Union_, Except]


def schema_of(e: Expr, schemas: dict) -> tuple:
    """Output schema of ``e`` given base schemas; raises on violations."""
    if isinstance(e, BaseRelation):
        if e.name not in schemas:
            raise MraError(f"unknown relation {e.name}")
        return tuple(schemas[e.name])
    if isinstance(e, Select):
        s = schema_of(e.expr, schemas)
        missing = condition_attrs(e.condition) - set(s)
        if missing:
            raise SchemaError(f"unknown attributes {sorted(missing)} in selection")
        return s
    if isinstance(e, Join):
        left, right = schema_of(e.left, schemas), schema_of(e.right, schemas)
        return left + tuple(a for a in right if a not in left)
    if isinstance(e, Project):
        s = schema_of(e.expr, schemas)
        if not set(e.attrs) <= set(s):
            raise SchemaError(f"projection onto {e.attrs} outside schema {s}")
        return _check_schema(e.attrs)
    left, right = schema_of(e.left, schemas), schema_of(e.right, schemas)
    if set(left) != set(right):
        raise SchemaError(f"schemas {left} and {right} differ")
    return left


def eval_expr(e: Expr, db: dict) -> Relation:
    schema_of(e, {k: r.schema for k, r in db.items()})
    return _eval(e, db)


def _eval(e: Expr, db: dict) -> Relation:
    if isinstance(e, BaseRelation):
        return db[e.name]
    if isinstance(e, Select):
        return mra_select(_eval(e.expr, db), e.condition)
    if isinstance(e, Project):
        return mra_project(_eval(e.expr, db), e.attrs)
    left, right = _eval(e.left, db), _eval(e.right, db)
    if isinstance(e, Join):
        return mra_join(left, right)
    if isinstance(e, Union_):
        return mra_union(left, right)
    if isinstance(e, Except):
        return mra_except(left, right)
    raise TypeError(f"not an MRA expression: {e!r}")


def expr_relations(e: Expr) -> set[str]:
    if isinstance(e, BaseRelation):
        return {e.name}
    if isinstance(e, (Select, Project)):
        return expr_relations(e.expr)
    return expr_relations(e.left) | expr_relations(e.right)


# -- text formats ------------------------------------------------------------------

def render_value(v: str) -> str:
    return str(Const(v))


def render_condition(c: Condition) -> str:
    if isinstance(c, (CondEq, CondNeq)):
        other = c.other.name if isinstance(c.other, Attr) else render_value(c.other)
        return f"{c.attr}{'=' if isinstance(c, CondEq) else '!='}{other}"
    if isinstance(c, CondNot):
        return f"!({render_condition(c.operand)})"
    op = "&&" if isinstance(c, CondAnd) else "||"
    return f"({render_condition(c.left)} {op} {render_condition(c.right)})"


def render_expr(e: Expr) -> str:
    if isinstance(e, BaseRelation):
        return e.name
    if isinstance(e, Select):
        return f"select[{render_condition(e.condition)}]({render_expr(e.expr)})"
    if isinstance(e, Project):
        return f"project[{','.join(e.attrs)}]({render_expr(e.expr)})"
    name = {Join: "join", Union_: "union", Except: "except"}[type(e)]
    return f"{name}({render_expr(e.left)}, {render_expr(e.right)})"


def render_relation(name: str, r: Relation) -> str:
    lines = [f"{name}({', '.join(r.schema)})"]
    for row, n in r.sorted_rows():
        cells = ", ".join(render_value(v) for v in row) if row else "()"
        lines.append(cells if n == 1 else f"{cells} * {n}")
    return "\n".join(lines) + "\n"


def render_database(db: dict) -> str:
    return "\n".join(render_relation(name, db[name]) for name in sorted(db))


_TOKEN = re.compile(
    r"""
    (?P<ws>\s+|\#[^\n]*)
  | (?P<str>"(?:[^"\\]|\\.)*")
  | (?P<iri><[^<>"\s]*>)
  | (?P<int>[0-9]+)
  | (?P<name>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>&&|\|\||!=|[()\[\],=!*])
    """,
    re.VERBOSE,
)


def _tokens(text: str):
    out, pos = [], 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise MraError(f"unexpected character {text[pos]!r} at offset {pos}")
        if m.lastgroup != "ws":
            out.append((m.lastgroup, m.group()))
        pos = m.end()
    out.append(("eof", ""))
    return out


def _value(kind: str, text: str) -> str:
    if kind == "str":
        return json.loads(text)
    if kind in ("iri", "int"):
        return text
    if kind == "name" and not _ATTR_RE.fullmatch(text):
        return text
    raise MraError(f"expected a constant, found {text!r}")


class _ExprParser:
    def __init__(self, text: str):
        self.toks = _tokens(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def take(self, value=None):
        tok = self.toks[self.i]
        if value is not None and tok[1] != value:
            raise MraError(f"expected {value!r}, found {tok[1] or 'end of input'!r}")
        self.i += 1
        return tok

    def expr(self) -> Expr:
        kind, word = self.take()
        if kind != "name":
            raise MraError(f"expected an expression, found {word or 'end of input'!r}")
        if word in ("select", "project") and self.peek()[1] == "[":
            self.take("[")
            if word == "select":
                cond = self.cond()
                self.take("]")
                self.take("(")
                inner = self.expr()
                self.take(")")
                return Select(cond, inner)
            attrs = []
            if self.peek()[1] != "]":
                attrs.append(self.attr())
                while self.peek()[1] == ",":
                    self.take(",")
                    attrs.append(self.attr())
            self.take("]")
            self.take("(")
            inner = self.expr()
            self.take(")")
            return Project(tuple(attrs), inner)
        if word in ("join", "union", "except") and self.peek()[1] == "(":
            self.take("(")
            left = self.expr()
            self.take(",")
            right = self.expr()
            self.take(")")
            return {"join": Join, "union": Union_, "except": Except}[word](left, right)
        return BaseRelation(word)

    def attr(self) -> str:
        kind, text = self.take()
        if kind != "name" or not _ATTR_RE.fullmatch(text):
            raise MraError(f"expected an attribute name, found {text!r}")
        return text

    def cond(self) -> Condition:
        left = self.conj()
        while self.peek()[1] == "||":
            self.take()
            left = CondOr(left, self.conj())
        return left

    def conj(self) -> Condition:
        left = self.unary()
        while self.peek()[1] == "&&":
            self.take()
            left = CondAnd(left, self.unary())
        return left

    def unary(self) -> Condition:
        if self.peek()[1] == "!":
            self.take()
            return CondNot(self.unary())
        if self.peek()[1] == "(":
            self.take()
            c = self.cond()
            self.take(")")
            return c
        attr = self.attr()
        op = self.take()[1]
        if op not in ("=", "!="):
            raise MraError(f"expected = or !=, found {op!r}")
        kind, text = self.take()
        other = Attr(text) if kind == "name" and _ATTR_RE.fullmatch(text) else _value(kind, text)
        return CondEq(attr, other) if op == "=" else CondNeq(attr, other)


def parse_expr(text: str) -> Expr:
    p = _ExprParser(text)
    e = p.expr()
    if p.peek()[0] != "eof":
        raise MraError(f"unexpected {p.peek()[1]!r} after expression")
    return e


def parse_condition(text: str) -> Condition:
    p = _ExprParser(text)
    c = p.cond()
    if p.peek()[0] != "eof":
        raise MraError(f"unexpected {p.peek()[1]!r} after condition")
    return c


def _is_header(toks) -> bool:
    words = [t[1] for t in toks]
    if len(words) < 3 or toks[0][0] != "name" or words[1] != "(" or words[-1] != ")":
        return False
    inner = toks[2:-1]
    return all(t[0] == "name" for t in inner[0::2]) and all(t[1] == "," for t in inner[1::2])


def parse_database(text: str) -> dict[str, Relation]:
    db: dict[str, tuple] = {}
    current = None
    for lineno, line in enumerate(text.splitlines(), 1):
        try:
            toks = _tokens(line)[:-1]
        except MraError as exc:
            raise MraError(f"line {lineno}: {exc}") from None
        if not toks:
            continue
        if _is_header(toks):
            name = toks[0][1]
            if name in db:
                raise MraError(f"line {lineno}: relation {name} declared twice")
            db[name] = ([t[1] for t in toks[2:-1:2]], [])
            current = name
            continue
        if current is None:
            raise MraError(f"line {lineno}: row before any relation header")
        count = 1
        if len(toks) >= 2 and toks[-2][1] == "*":
            if toks[-1][0] != "int" or int(toks[-1][1]) < 1:
                raise MraError(f"line {lineno}: bad multiplicity")
            count = int(toks[-1][1])
            toks = toks[:-2]
        if [t[1] for t in toks] == ["(", ")"]:
            row = ()
        else:
            if any(t[1] != "," for t in toks[1::2]) or len(toks) % 2 == 0:
                raise MraError(f"line {lineno}: values must be separated by commas")
            try:
                row = tuple(_value(k, t) for k, t in toks[0::2])
            except MraError as exc:
                raise MraError(f"line {lineno}: {exc}") from None
        db[current][1].append((row, count))
    return {name: Relation(attrs, rows) for name, (attrs, rows) in db.items()}
