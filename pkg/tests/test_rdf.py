import random

import pytest
from hypothesis import given, strategies as st

from multisparql.harness import FuzzConfig, gen_graph
from multisparql.rdf import (
    BlankNodeError,
    Graph,
    GraphSyntaxError,
    Iri,
    Literal,
    Triple,
    graph_union,
    parse_graph,
    serialize_graph,
)

a, b, c, p = Iri("a"), Iri("b"), Iri("c"), Iri("p")


def test_single_triple():
    assert parse_graph("<a> <p> <b> .") == Graph([Triple(a, p, b)])


def test_duplicate_lines_collapse():
    g = parse_graph("<a> <p> <b> .\n<a> <p> <b> .")
    assert len(g) == 1


def test_literal_object():
    assert parse_graph('<a> <p> "lit" .') == Graph([Triple(a, p, Literal("lit"))])


def test_comments_and_blank_lines():
    assert parse_graph("# header\n\n<a> <p> <b> .\n") == Graph([Triple(a, p, b)])


@pytest.mark.parametrize(
    "text",
    ['"x" <p> <b> .', '<a> "p" <b> .', "<a> <p> <b>", "<a> <p> .", "<a> <p> <b> <c> ."],
)
def test_syntax_errors_carry_line(text):
    with pytest.raises(GraphSyntaxError) as info:
        parse_graph("<a> <p> <b> .\n" + text)
    assert info.value.line == 2


def test_blank_nodes_rejected():
    with pytest.raises(BlankNodeError):
        parse_graph("_:b1 <p> <b> .")


@pytest.mark.parametrize("text", ["<null> <p> <b> .", '<a> <p> "null" .'])
def test_reserved_null_token(text):
    with pytest.raises(GraphSyntaxError):
        parse_graph(text)


def test_iri_never_equals_literal():
    assert Iri("a") != Literal("a")


def test_union_examples():
    g1 = Graph([Triple(a, p, b)])
    g2 = Graph([Triple(a, p, c)])
    assert graph_union(g1, Graph()) == g1
    assert graph_union(g1, g1) == g1
    assert graph_union(g1, g2) == Graph([Triple(a, p, b), Triple(a, p, c)])


def test_serialization_is_canonical():
    g = Graph([Triple(b, p, a), Triple(a, p, Literal("z")), Triple(a, p, b)])
    assert serialize_graph(g) == '<a> <p> <b> .\n<a> <p> "z" .\n<b> <p> <a> .\n'


graphs = st.integers(0, 10**6).map(lambda s: gen_graph(FuzzConfig(max_triples=10), random.Random(s)))


@given(graphs)
def test_round_trip(g):
    assert parse_graph(serialize_graph(g)) == g


@given(graphs, graphs, graphs)
def test_union_laws(g1, g2, g3):
    assert graph_union(g1, g2) == graph_union(g2, g1)
    assert graph_union(graph_union(g1, g2), g3) == graph_union(g1, graph_union(g2, g3))
    assert graph_union(g1, g1) == g1


def test_escaped_literal_round_trip():
    g = Graph([Triple(a, p, Literal('say "hi"\n'))])
    assert parse_graph(serialize_graph(g)) == g
