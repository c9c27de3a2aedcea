"""Ground RDF vocabulary: IRIs, literals, triples and graphs.

The text format is line oriented::

    <a> <p> <b> .
    <a> <p> "some literal" .
    # comment

Blank nodes and typed literals are not supported.
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass
from typing import Iterable, Iterator, Union

NULL = "null"


class GraphSyntaxError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class BlankNodeError(GraphSyntaxError):
    pass


def _check_name(kind: str, value: str) -> None:
    if not isinstance(value, str) or not value:
        raise ValueError(f"{kind} must be a nonempty string, got {value!r}")
    if value == NULL:
        raise ValueError(f"'{NULL}' is reserved and cannot be used as {kind}")


@dataclass(frozen=True, order=True)
class Iri:
    name: str

    def __post_init__(self):
        _check_name("an IRI name", self.name)
        if re.search(r'[\s<>"]', self.name):
            raise ValueError(f"illegal character in IRI {self.name!r}")

    @property
    def sort_key(self):
        return (0, self.name)

    def __str__(self):
        return f"<{self.name}>"


@dataclass(frozen=True, order=True)
class Literal:
    value: str

    def __post_init__(self):
        _check_name("a literal value", self.value)

    @property
    def sort_key(self):
        return (1, self.value)

    def __str__(self):
        return json.dumps(self.value, ensure_ascii=False)


Term = Union[Iri, Literal]


@dataclass(frozen=True, order=True)
class Var:
    """A query variable; ``name`` excludes the leading ``?``."""

    name: str

    def __post_init__(self):
        if not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*", self.name or ""):
            raise ValueError(f"illegal variable name {self.name!r}")

    def __str__(self):
        return f"?{self.name}"


@dataclass(frozen=True)
class Triple:
    subject: Iri
    predicate: Iri
    object: Term

    def __post_init__(self):
        if not isinstance(self.subject, Iri):
            raise TypeError("triple subject must be an IRI")
        if not isinstance(self.predicate, Iri):
            raise TypeError("triple predicate must be an IRI")
        if not isinstance(self.object, (Iri, Literal)):
            raise TypeError("triple object must be an RDF term")

    @property
    def sort_key(self):
        return (self.subject.sort_key, self.predicate.sort_key, self.object.sort_key)

    def __iter__(self):
        return iter((self.subject, self.predicate, self.object))

    def __str__(self):
        return f"{self.subject} {self.predicate} {self.object} ."


class Graph:
    """An immutable set of triples."""

    __slots__ = ("_triples",)

    def __init__(self, triples: Iterable[Triple] = ()):
        self._triples = frozenset(triples)

    @property
    def triples(self) -> frozenset[Triple]:
        return self._triples

    def __iter__(self) -> Iterator[Triple]:
        return iter(sorted(self._triples, key=lambda t: t.sort_key))

    def __len__(self):
        return len(self._triples)

    def __contains__(self, triple):
        return triple in self._triples

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return self._triples == other._triples

    def __hash__(self):
        return hash(self._triples)

    def __repr__(self):
        return f"Graph({sorted(self._triples, key=lambda t: t.sort_key)!r})"

    def terms(self) -> set[Term]:
        return {term for triple in self._triples for term in triple}


def graph_union(g1: Graph, g2: Graph) -> Graph:
    return Graph(g1.triples | g2.triples)


_IRI = r"<[^<>\"\s]*>"
_LIT = r'"(?:[^"\\]|\\.)*"'
_TERM = rf"({_IRI}|{_LIT}|_:\S+|\S+)"
_LINE = re.compile(rf"^\s*{_TERM}\s+{_TERM}\s+{_TERM}\s*\.\s*$")


def _parse_term(token: str, line: int) -> Term:
    if token.startswith("_:"):
        raise BlankNodeError(f"blank nodes are not supported: {token}", line)
    try:
        if re.fullmatch(_IRI, token):
            return Iri(token[1:-1])
        if re.fullmatch(_LIT, token):
            return Literal(json.loads(token))
    except ValueError as exc:
        raise GraphSyntaxError(str(exc), line) from None
    raise GraphSyntaxError(f"cannot parse term {token!r}", line)


def parse_graph(text: str) -> Graph:
    triples = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.strip()
        if not stripped or stripped.startswith("#"):
            continue
        match = _LINE.match(raw)
        if not match:
            raise GraphSyntaxError(f"expected '<s> <p> <o> .', got {stripped!r}", lineno)
        s, p, o = (_parse_term(tok, lineno) for tok in match.groups())
        if not isinstance(s, Iri):
            raise GraphSyntaxError("literal in subject position", lineno)
        if not isinstance(p, Iri):
            raise GraphSyntaxError("literal in predicate position", lineno)
        triples.append(Triple(s, p, o))
    return Graph(triples)


def serialize_graph(g: Graph) -> str:
    return "".join(f"{triple}\n" for triple in g)
