"""Datalog programs: terms, literals, rules, facts with multiplicities, and
the clause-per-line text format::

    % comment
    p(a, b) * 3.
    q(X) :- p(X, Y), not r(Y), X != Y.
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from typing import Iterable, Union

_VAR_RE = re.compile(r"[A-Z_][A-Za-z0-9_]*")
_BARE_RE = re.compile(r"[a-z][A-Za-z0-9_]*")
_IRI_RE = re.compile(r"<[^<>\"\s]*>")
_INT_RE = re.compile(r"[0-9]+")


class DatalogError(ValueError):
    pass


class DatalogSyntaxError(DatalogError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


@dataclass(frozen=True, order=True)
class Var:
    name: str

    def __post_init__(self):
        if not _VAR_RE.fullmatch(self.name or ""):
            raise ValueError(f"illegal Datalog variable name {self.name!r}")

    def __str__(self):
        return self.name


@dataclass(frozen=True, order=True)
class Const:
    value: str

    def __post_init__(self):
        if not isinstance(self.value, str) or not self.value:
            raise ValueError(f"constants are nonempty strings, got {self.value!r}")

    def __str__(self):
        v = self.value
        if (_BARE_RE.fullmatch(v) and v != "not") or _IRI_RE.fullmatch(v) or _INT_RE.fullmatch(v):
            return v
        return json.dumps(v, ensure_ascii=False)


DTerm = Union[Var, Const]


def _term_key(t: DTerm):
    return (0, t.name) if isinstance(t, Var) else (1, t.value)


@dataclass(frozen=True)
class Atom:
    pred: str
    args: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "args", tuple(self.args))

    @property
    def arity(self) -> int:
        return len(self.args)

    def vars(self) -> list[Var]:
        """Distinct variables in order of first occurrence."""
        return list(dict.fromkeys(a for a in self.args if isinstance(a, Var)))

    def is_ground(self) -> bool:
        return all(isinstance(a, Const) for a in self.args)

    def is_pure(self) -> bool:
        """All arguments are pairwise distinct variables."""
        return all(isinstance(a, Var) for a in self.args) and len(set(self.args)) == len(self.args)

    @property
    def sort_key(self):
        return (self.pred, tuple(_term_key(a) for a in self.args))

    def __str__(self):
        return f"{self.pred}({', '.join(str(a) for a in self.args)})"


@dataclass(frozen=True)
class Negated:
    atom: Atom

    def __str__(self):
        return f"not {self.atom}"


@dataclass(frozen=True)
class Eq:
    left: DTerm
    right: DTerm

    def __str__(self):
        return f"{self.left} = {self.right}"


@dataclass(frozen=True)
class Neq:
    left: DTerm
    right: DTerm

    def __str__(self):
        return f"{self.left} != {self.right}"


BodyLiteral = Union[Atom, Negated, Eq, Neq]


def literal_vars(lit: BodyLiteral) -> list[Var]:
    if isinstance(lit, Atom):
        return lit.vars()
    if isinstance(lit, Negated):
        return lit.atom.vars()
    return [t for t in (lit.left, lit.right) if isinstance(t, Var)]


@dataclass(frozen=True)
class Rule:
    head: Atom
    body: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "body", tuple(self.body))
        if not isinstance(self.head, Atom):
            raise TypeError("rule head must be a predicate atom")

    def vars(self) -> list[Var]:
        out = dict.fromkeys(self.head.vars())
        for lit in self.body:
            out.update(dict.fromkeys(literal_vars(lit)))
        return list(out)

    def positives(self) -> list[Atom]:
        return [lit for lit in self.body if isinstance(lit, Atom)]

    def negatives(self) -> list[Atom]:
        return [lit.atom for lit in self.body if isinstance(lit, Negated)]

    def comparisons(self) -> list:
        return [lit for lit in self.body if isinstance(lit, (Eq, Neq))]

    def constants(self) -> set[str]:
        terms = list(self.head.args)
        for lit in self.body:
            if isinstance(lit, Atom):
                terms.extend(lit.args)
            elif isinstance(lit, Negated):
                terms.extend(lit.atom.args)
            else:
                terms.extend((lit.left, lit.right))
        return {t.value for t in terms if isinstance(t, Const)}

    def __str__(self):
        if not self.body:
            return f"{self.head}."
        return f"{self.head} :- {', '.join(str(lit) for lit in self.body)}."


@dataclass(frozen=True)
class Program:
    """A finite set of rules plus a multiset of ground facts."""

    rules: tuple = ()
    facts: tuple = field(default=())

    def __post_init__(self):
        rules = tuple(dict.fromkeys(self.rules))
        facts = self.facts.items() if isinstance(self.facts, dict) else self.facts
        counts: dict[Atom, int] = {}
        for atom, count in facts:
            if not atom.is_ground():
                raise DatalogError(f"fact {atom} is not ground")
            if not isinstance(count, int) or count < 1:
                raise DatalogError(f"fact {atom} has invalid multiplicity {count!r}")
            counts[atom] = counts.get(atom, 0) + count
        object.__setattr__(self, "rules", rules)
        object.__setattr__(self, "facts", tuple(sorted(counts.items(), key=lambda kv: kv[0].sort_key)))

    def fact_counts(self) -> dict[Atom, int]:
        return dict(self.facts)

    def idb_predicates(self) -> set[str]:
        return {r.head.pred for r in self.rules}

    def edb_predicates(self) -> set[str]:
        return {a.pred for a, _ in self.facts}

    def predicates(self) -> set[str]:
        preds = self.idb_predicates() | self.edb_predicates()
        for rule in self.rules:
            preds.update(a.pred for a in rule.positives())
            preds.update(a.pred for a in rule.negatives())
        return preds

    def arities(self) -> dict[str, int]:
        """Arity per predicate; raises on inconsistent use."""
        out: dict[str, int] = {}

        def see(atom: Atom):
            known = out.setdefault(atom.pred, atom.arity)
            if known != atom.arity:
                raise DatalogError(f"predicate {atom.pred} used with arities {known} and {atom.arity}")

        for atom, _ in self.facts:
            see(atom)
        for rule in self.rules:
            see(rule.head)
            for atom in rule.positives() + rule.negatives():
                see(atom)
        return out

    def constants(self) -> set[str]:
        out = {a.value for atom, _ in self.facts for a in atom.args}
        for rule in self.rules:
            out |= rule.constants()
        return out

    def rules_for(self, pred: str) -> list[Rule]:
        return [r for r in self.rules if r.head.pred == pred]

    def with_rules(self, rules: Iterable[Rule]) -> "Program":
        return Program(tuple(rules), self.facts)


# -- substitutions -----------------------------------------------------------

class Substitution:
    """Immutable map from variable names to constant values."""

    __slots__ = ("_items", "_hash")

    def __init__(self, bindings=()):
        d = dict(bindings)
        self._items = tuple(sorted((str(k), str(v) if not isinstance(v, Const) else v.value) for k, v in d.items()))
        self._hash = hash(self._items)

    def as_dict(self) -> dict[str, str]:
        return dict(self._items)

    def items(self):
        return self._items

    def __eq__(self, other):
        return isinstance(other, Substitution) and self._items == other._items

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return "{" + ", ".join(f"{k}/{v}" for k, v in self._items) + "}"


class SubstitutionMultiset:
    __slots__ = ("_counts",)

    def __init__(self, entries=()):
        counts: dict[Substitution, int] = {}
        if isinstance(entries, dict):
            entries = entries.items()
        for sub, count in entries:
            if not isinstance(sub, Substitution):
                sub = Substitution(sub)
            if count:
                counts[sub] = counts.get(sub, 0) + count
        self._counts = counts

    def count(self, sub) -> int:
        if not isinstance(sub, Substitution):
            sub = Substitution(sub)
        return self._counts.get(sub, 0)

    def items(self):
        return self._counts.items()

    def __len__(self):
        return len(self._counts)

    def __iter__(self):
        return iter(self._counts)

    def __eq__(self, other):
        if not isinstance(other, SubstitutionMultiset):
            return NotImplemented
        return self._counts == other._counts

    __hash__ = None

    def sorted_items(self):
        return sorted(self._counts.items(), key=lambda kv: kv[0].items())

    def __repr__(self):
        return "{" + ", ".join(f"({s!r}:{c})" for s, c in self.sorted_items()) + "}"


# -- text format -------------------------------------------------------------

_TOKEN = re.compile(
    r"""
    (?P<ws>\s+|%[^\n]*)
  | (?P<str>"(?:[^"\\]|\\.)*")
  | (?P<iri><[^<>"\s]*>)
  | (?P<int>[0-9]+)
  | (?P<name>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>:-|!=|[(),.=*])
    """,
    re.VERBOSE,
)


def _tokenize(text: str):
    out = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            line = text.count("\n", 0, pos) + 1
            raise DatalogSyntaxError(f"unexpected character {text[pos]!r}", line)
        if m.lastgroup != "ws":
            out.append((m.lastgroup, m.group(), text.count("\n", 0, pos) + 1))
        pos = m.end()
    out.append(("eof", "", text.count("\n") + 1))
    return out


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self, k=0):
        return self.tokens[min(self.i + k, len(self.tokens) - 1)]

    def next(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value):
        tok = self.next()
        if tok[1] != value:
            raise DatalogSyntaxError(f"expected {value!r}, found {tok[1] or 'end of input'!r}", tok[2])
        return tok

    def term(self) -> DTerm:
        kind, value, line = self.next()
        if kind == "name":
            if _VAR_RE.fullmatch(value):
                return Var(value)
            return Const(value)
        if kind == "str":
            return Const(json.loads(value))
        if kind in ("iri", "int"):
            return Const(value)
        raise DatalogSyntaxError(f"expected a term, found {value or 'end of input'!r}", line)

    def atom(self) -> Atom:
        kind, value, line = self.next()
        if kind != "name":
            raise DatalogSyntaxError(f"expected a predicate name, found {value!r}", line)
        args = []
        if self.peek()[1] == "(":
            self.next()
            if self.peek()[1] != ")":
                args.append(self.term())
                while self.peek()[1] == ",":
                    self.next()
                    args.append(self.term())
            self.expect(")")
        return Atom(value, tuple(args))

    def literal(self) -> BodyLiteral:
        kind, value, _ = self.peek()
        if kind == "name" and value == "not" and self.peek(1)[1] not in ("=", "!=", ",", "."):
            self.next()
            lit = self.literal()
            if isinstance(lit, Atom):
                return Negated(lit)
            if isinstance(lit, Eq):
                return Neq(lit.left, lit.right)
            if isinstance(lit, Neq):
                return Eq(lit.left, lit.right)
            raise DatalogSyntaxError("double negation", self.peek()[2])
        if self.peek(1)[1] in ("=", "!="):
            left = self.term()
            op = self.next()[1]
            right = self.term()
            return Eq(left, right) if op == "=" else Neq(left, right)
        return self.atom()

    def clause(self):
        head = self.atom()
        body = []
        count = None
        if self.peek()[1] == ":-":
            self.next()
            body.append(self.literal())
            while self.peek()[1] == ",":
                self.next()
                body.append(self.literal())
        elif self.peek()[1] == "*":
            self.next()
            tok = self.next()
            if tok[0] != "int" or int(tok[1]) < 1:
                raise DatalogSyntaxError("fact multiplicity must be a positive integer", tok[2])
            count = int(tok[1])
        self.expect(".")
        return head, body, count


def parse_program(text: str) -> Program:
    parser = _Parser(text)
    rules, facts = [], []
    while parser.peek()[0] != "eof":
        line = parser.peek()[2]
        head, body, count = parser.clause()
        if not body:
            if not head.is_ground():
                raise DatalogSyntaxError(f"fact {head} contains variables", line)
            facts.append((head, count or 1))
        else:
            rules.append(Rule(head, tuple(body)))
    return Program(tuple(rules), tuple(facts))


def parse_atom(text: str) -> Atom:
    parser = _Parser(text)
    atom = parser.atom()
    if parser.peek()[0] != "eof":
        raise DatalogSyntaxError(f"unexpected {parser.peek()[1]!r}", parser.peek()[2])
    return atom


def render_fact(atom: Atom, count: int) -> str:
    return f"{atom}." if count == 1 else f"{atom} * {count}."


def render_program(prog: Program) -> str:
    lines = [str(rule) for rule in prog.rules]
    lines += [render_fact(atom, count) for atom, count in prog.facts]
    return "\n".join(lines) + ("\n" if lines else "")
