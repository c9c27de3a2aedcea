import random

import pytest
from hypothesis import given, strategies as st

from multisparql import algebra as alg
from multisparql.evaluation import evaluate
from multisparql.harness import FuzzConfig, gen_graph, gen_pattern
from multisparql.patterns import (
    CAnd,
    CBound,
    CEq,
    CEqVar,
    CNot,
    COr,
    Except,
    PatternSyntaxError,
    Select,
    TriplePattern,
    Union_,
    WellFormednessError,
    check_well_formed,
    dom,
    f_of,
    parse_constraint,
    parse_pattern,
    render_pattern,
    var_order,
)
from multisparql.rdf import Iri, Var

x, y, z = Var("x"), Var("y"), Var("z")
p, q, a, b = Iri("p"), Iri("q"), Iri("a"), Iri("b")
t_xpy = TriplePattern(x, p, y)


def test_parse_triple():
    assert parse_pattern("{ ?x <p> ?y }") == t_xpy


def test_filter_outside_domain_rejected():
    with pytest.raises(WellFormednessError) as info:
        parse_pattern("{ ?x <p> ?y } FILTER(?z = <a>)")
    assert info.value.invariant == "filter-vars"


def test_except_domain_mismatch_rejected():
    with pytest.raises(WellFormednessError) as info:
        parse_pattern("{ ?x <p> ?y } EXCEPT { ?x <q> ?z }")
    assert info.value.invariant == "except-domains"


def test_exceptstar_has_no_domain_restriction():
    parse_pattern("{ ?x <p> ?y } EXCEPTSTAR { ?x <q> ?z }")
    parse_pattern("{ ?x <p> ?y } EXCEPT* { ?x <q> ?z }")


@pytest.mark.parametrize(
    "text, invariant",
    [
        ("{ <a> <p> <b> }", "triple-has-variable"),
        ("SELECT ?z { ?x <p> ?y }", "select-vars"),
    ],
)
def test_other_invariants(text, invariant):
    with pytest.raises(WellFormednessError) as info:
        parse_pattern(text)
    assert info.value.invariant == invariant


@pytest.mark.parametrize("text", ["{ ?x <p> }", "{ ?x <p> ?y } UNION", "{ ?x <p> ?y } FILTER ?x = <a>", "( ?x <p> ?y"])
def test_syntax_errors(text):
    with pytest.raises(PatternSyntaxError):
        parse_pattern(text)


def test_dot_is_and_inside_braces():
    assert parse_pattern("{ ?x <p> ?y . ?y <q> ?z }") == parse_pattern("{ ?x <p> ?y } AND { ?y <q> ?z }")


def test_binary_operators_associate_left():
    got = parse_pattern("{ ?x <p> ?y } UNION { ?x <q> ?y } UNION { ?y <p> ?x }")
    assert isinstance(got, Union_) and isinstance(got.left, Union_)


def test_dom_examples():
    assert dom(t_xpy) == {x, y}
    assert dom(Select(frozenset({x}), t_xpy)) == {x}
    assert dom(Union_(t_xpy, TriplePattern(x, q, z))) == {x, y, z}


def test_dom_of_difference_operators_is_left_domain():
    for op in ("MINUS", "DIFF", "EXCEPTSTAR"):
        assert dom(parse_pattern(f"{{ ?x <p> ?y }} {op} {{ ?z <q> ?x }}")) == {x, y}


def test_var_order_is_lexicographic():
    assert var_order(parse_pattern("{ ?z <p> ?x } AND { ?y <q> ?x }")) == (x, y, z)


def test_f_of_examples():
    assert f_of(parse_constraint("!bound(?x)")) == alg.Not(alg.Bound(x))
    assert f_of(parse_constraint("(?x = <a>) && (?x = ?y)")) == alg.And(alg.Eq(x, a), alg.EqVar(x, y))
    assert f_of(parse_constraint("((?x = <a>) || !(?y = <b>))")) == alg.Or(alg.Eq(x, a), alg.Not(alg.Eq(y, b)))


def test_constraint_parser_precedence():
    assert parse_constraint("bound(?x) || bound(?y) && ?x != <a>") == COr(
        CBound(x), CAnd(CBound(y), CNot(CEq(x, a)))
    )
    assert parse_constraint("?x = ?y") == CEqVar(x, y)


seeds = st.integers(0, 10**6)


@given(seeds, st.sampled_from(["core", "w3c"]))
def test_render_parse_round_trip(seed, target):
    pat = gen_pattern(FuzzConfig(max_pattern_depth=4), random.Random(seed), target)
    assert parse_pattern(render_pattern(pat)) == pat


@given(seeds)
def test_evaluated_domain_within_schema(seed):
    rng = random.Random(seed)
    cfg = FuzzConfig(max_pattern_depth=4)
    pat, g = gen_pattern(cfg, rng, "w3c"), gen_graph(cfg, rng)
    assert evaluate(pat, g).domain() <= dom(pat)


def test_generated_patterns_are_well_formed():
    cfg = FuzzConfig(max_pattern_depth=4)
    for seed in range(2000):
        check_well_formed(gen_pattern(cfg, random.Random(seed), "w3c" if seed % 2 else "core"))
