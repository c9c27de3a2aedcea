import json

import pytest
from hypothesis import given, strategies as st

from multisparql.multiset import (
    IncompatibleMappingsError,
    Mapping,
    MappingMultiset,
    compatible,
    dumps,
    merge,
    multiset_equal,
    multiset_from_json,
    multiset_to_json,
    restrict,
)
from multisparql.rdf import Iri, Literal, Var

from helpers import bag, mu

X, Y, Z = Var("X"), Var("Y"), Var("Z")
mu0 = Mapping()


def test_compatible_examples():
    assert compatible(mu(X="a"), mu(X="a"))
    assert compatible(mu(X="a"), mu(Y="b"))
    assert not compatible(mu(X="a"), mu(X="b"))


def test_merge_examples():
    assert merge(mu(X="a"), mu(Y="b")) == mu(X="a", Y="b")
    assert merge(mu(X="a"), mu0) == mu(X="a")
    assert merge(mu(X="a", Y="b"), mu(Y="b")) == mu(X="a", Y="b")


def test_merge_rejects_incompatible():
    with pytest.raises(IncompatibleMappingsError):
        merge(mu(X="a"), mu(X="b"))


def test_restrict_examples():
    assert restrict(mu(X="a", Y="b"), {X}) == mu(X="a")
    assert restrict(mu(X="a"), set()) == mu0
    assert restrict(mu(X="a"), {Z}) == mu0


def test_multiset_equal_examples():
    assert multiset_equal(bag((mu0, 2)), bag((mu0, 2)))
    assert not multiset_equal(bag((mu0, 2)), bag((mu0, 1)))
    assert multiset_equal(bag(), bag())


def test_consolidation():
    omega = MappingMultiset([(mu(X="a"), 1), (mu(X="a"), 2), (mu(X="b"), 1)])
    assert len(omega) == 2
    assert omega.count(mu(X="a")) == 3
    assert omega.total() == 4


def test_zero_counts_vanish_negative_counts_rejected():
    assert MappingMultiset([(mu(X="a"), 0)]) == bag()
    assert mu(X="a") not in MappingMultiset([(mu(X="a"), 0)])
    with pytest.raises(ValueError):
        MappingMultiset([(mu(X="a"), -1)])


def test_domain_is_union_of_member_domains():
    assert bag(mu(X="a"), mu(Y="b"), mu0).domain() == {X, Y}


def test_json_shape_and_round_trip():
    omega = bag((mu(X="a", Y=Literal("v")), 3), mu0)
    data = multiset_to_json(omega)
    assert data == [
        {"bindings": {}, "count": 1},
        {"bindings": {"?X": {"iri": "a"}, "?Y": {"literal": "v"}}, "count": 3},
    ]
    assert multiset_from_json(json.loads(dumps(omega))) == omega


values = st.sampled_from([Iri("a"), Iri("b"), Literal("a")])
mappings = st.dictionaries(st.sampled_from([X, Y, Z]), values, max_size=3).map(Mapping)
var_sets = st.frozensets(st.sampled_from([X, Y, Z]))


@given(mappings, var_sets, var_sets)
def test_restrict_composes(m, w1, w2):
    assert restrict(restrict(m, w1), w2) == restrict(m, w1 & w2)


@given(mappings, mappings, mappings)
def test_compatible_symmetric_merge_laws(m1, m2, m3):
    assert compatible(m1, m2) == compatible(m2, m1)
    if compatible(m1, m2):
        assert merge(m1, m2) == merge(m2, m1)
    if compatible(m1, m2) and compatible(m2, m3) and compatible(m1, m3):
        assert merge(merge(m1, m2), m3) == merge(m1, merge(m2, m3))
