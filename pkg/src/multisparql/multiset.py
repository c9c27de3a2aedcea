"""Solution mappings and multisets of mappings."""
from __future__ import annotations

import json
from collections.abc import Mapping as _AbcMapping
from typing import Iterable, Iterator

from .rdf import Iri, Literal, Term, Var


class IncompatibleMappingsError(ValueError):
    pass


class Mapping(_AbcMapping):
    """Immutable partial function from variables to RDF terms."""

    __slots__ = ("_d", "_key", "_hash")

    def __init__(self, bindings=()):
        d = dict(bindings)
        for var, term in d.items():
            if not isinstance(var, Var):
                raise TypeError(f"mapping key must be a Var, got {var!r}")
            if not isinstance(term, (Iri, Literal)):
                raise TypeError(f"mapping value must be an RDF term, got {term!r}")
        self._d = d
        self._key = tuple(sorted(d.items(), key=lambda kv: kv[0].name))
        self._hash = hash(self._key)

    def __getitem__(self, var: Var) -> Term:
        return self._d[var]

    def __iter__(self) -> Iterator[Var]:
        return (var for var, _ in self._key)

    def __len__(self):
        return len(self._d)

    def __contains__(self, var):
        return var in self._d

    def __eq__(self, other):
        if isinstance(other, Mapping):
            return self._key == other._key
        return NotImplemented

    def __hash__(self):
        return self._hash

    def __repr__(self):
        inner = ", ".join(f"{v}->{t}" for v, t in self._key)
        return "{" + inner + "}"

    @property
    def domain(self) -> frozenset[Var]:
        return frozenset(self._d)

    @property
    def sort_key(self):
        return (
            tuple(v.name for v, _ in self._key),
            tuple(t.sort_key for _, t in self._key),
        )


EMPTY_MAPPING = Mapping()


def compatible(m1: Mapping, m2: Mapping) -> bool:
    if len(m1) > len(m2):
        m1, m2 = m2, m1
    for var, term in m1.items():
        other = m2._d.get(var)
        if other is not None and other != term:
            return False
    return True


def merge(m1: Mapping, m2: Mapping) -> Mapping:
    if not compatible(m1, m2):
        raise IncompatibleMappingsError(f"{m1!r} and {m2!r} are not compatible")
    if not m2:
        return m1
    if not m1:
        return m2
    d = dict(m1._d)
    d.update(m2._d)
    return Mapping(d)


def restrict(m: Mapping, variables: Iterable[Var]) -> Mapping:
    keep = set(variables)
    return Mapping((v, t) for v, t in m.items() if v in keep)


class MappingMultiset:
    """A finite multiset of mappings with exact (unbounded) integer counts.

    Entries with the same mapping are consolidated; zero counts are dropped.
    """

    __slots__ = ("_counts",)

    def __init__(self, entries=()):
        counts: dict[Mapping, int] = {}
        if isinstance(entries, dict):
            entries = entries.items()
        for mapping, count in entries:
            if not isinstance(mapping, Mapping):
                mapping = Mapping(mapping)
            if not isinstance(count, int) or count < 0:
                raise ValueError(f"multiplicity must be a nonnegative integer, got {count!r}")
            if count:
                counts[mapping] = counts.get(mapping, 0) + count
        self._counts = counts

    @classmethod
    def of(cls, *mappings: Mapping) -> "MappingMultiset":
        """One copy per argument; repeated arguments accumulate."""
        return cls((m, 1) for m in mappings)

    def count(self, mapping: Mapping) -> int:
        return self._counts.get(mapping, 0)

    def items(self):
        return self._counts.items()

    def mappings(self):
        return self._counts.keys()

    def __iter__(self):
        return iter(self._counts)

    def __contains__(self, mapping):
        return mapping in self._counts

    def __len__(self):
        return len(self._counts)

    def __bool__(self):
        return bool(self._counts)

    def total(self) -> int:
        return sum(self._counts.values())

    def domain(self) -> frozenset[Var]:
        out: set[Var] = set()
        for mapping in self._counts:
            out.update(mapping.domain)
        return frozenset(out)

    def __eq__(self, other):
        if not isinstance(other, MappingMultiset):
            return NotImplemented
        return self._counts == other._counts

    __hash__ = None

    def sorted_items(self):
        return sorted(self._counts.items(), key=lambda kv: kv[0].sort_key)

    def __repr__(self):
        inner = ", ".join(f"({m!r}:{c})" for m, c in self.sorted_items())
        return "{" + inner + "}"


def multiset_equal(o1: MappingMultiset, o2: MappingMultiset) -> bool:
    return o1._counts == o2._counts


def term_to_json(term: Term) -> dict:
    if isinstance(term, Iri):
        return {"iri": term.name}
    return {"literal": term.value}


def term_from_json(obj: dict) -> Term:
    if "iri" in obj:
        return Iri(obj["iri"])
    return Literal(obj["literal"])


def multiset_to_json(omega: MappingMultiset) -> list:
    return [
        {
            "bindings": {str(v): term_to_json(t) for v, t in m.items()},
            "count": c,
        }
        for m, c in omega.sorted_items()
    ]


def multiset_from_json(data: list) -> MappingMultiset:
    entries = []
    for entry in data:
        bindings = {
            Var(name.lstrip("?")): term_from_json(term)
            for name, term in entry["bindings"].items()
        }
        entries.append((Mapping(bindings), entry["count"]))
    return MappingMultiset(entries)


def dumps(omega: MappingMultiset) -> str:
    return json.dumps(multiset_to_json(omega), indent=2, ensure_ascii=False)
