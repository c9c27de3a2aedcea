import itertools
import random
from collections import Counter

import pytest
from hypothesis import given, strategies as st

from multisparql.harness import FuzzConfig, gen_condition, gen_database, gen_expr
from multisparql.mra import (
    Attr,
    BaseRelation,
    CondAnd,
    CondEq,
    CondNeq,
    CondNot,
    CondOr,
    Except,
    Join,
    MraError,
    Project,
    Relation,
    SchemaError,
    Select,
    eval_condition,
    eval_expr,
    mra_except,
    mra_join,
    mra_project,
    mra_select,
    mra_union,
    parse_condition,
    parse_database,
    parse_expr,
    render_database,
    render_expr,
    schema_of,
)


def rel(schema, **rows):
    return Relation(tuple(schema), [((k,) if len(schema) == 1 else tuple(k), n) for k, n in rows.items()])


def unary(counts):
    return Relation(("A",), [((k,), n) for k, n in counts.items()])


A = unary({"a": 3, "b": 2, "d": 2})
B = unary({"a": 1, "b": 2, "c": 1})


def test_worked_multisets():
    assert mra_union(A, B) == unary({"a": 4, "b": 4, "c": 1, "d": 2})
    assert mra_except(A, B) == unary({"d": 2})


def test_select_examples():
    r = Relation(("A1", "A2"), [(("a", "b"), 2)])
    assert mra_select(r, CondEq("A1", "a")) == r
    assert mra_select(r, CondEq("A1", "z")) == Relation(("A1", "A2"))
    r2 = Relation(("A1", "A2"), [(("a", "a"), 1), (("a", "b"), 3)])
    assert mra_select(r2, CondEq("A1", Attr("A2"))) == Relation(("A1", "A2"), [(("a", "a"), 1)])


def test_join_examples():
    assert mra_join(unary({"a": 2}), Relation(("B",), [(("b",), 3)])) == Relation(("A", "B"), [(("a", "b"), 6)])
    assert mra_join(unary({"a": 1}), unary({"b": 1})) == Relation(("A",))
    r = Relation(("A", "B"), [(("a", "b"), 2)])
    s = Relation(("B", "C"), [(("b", "c"), 1), (("b", "d"), 1)])
    out = mra_join(r, s)
    assert out.schema == ("A", "B", "C")
    assert out == Relation(("A", "B", "C"), [(("a", "b", "c"), 2), (("a", "b", "d"), 2)])
    assert eval_expr(Project(("A",), Join(BaseRelation("r"), BaseRelation("s"))), {"r": r, "s": s}) == unary({"a": 4})


def test_project_examples():
    r = Relation(("A", "B"), [(("a", "b"), 1), (("a", "c"), 2)])
    assert mra_project(r, ("A",)) == unary({"a": 3})
    assert mra_project(r, ("A", "B")) == r
    assert mra_project(r, ()) == Relation((), [((), 3)])
    assert mra_project(Relation(("A", "B")), ()) == Relation(())


def test_union_except_examples():
    x1 = unary({"x": 1})
    assert mra_union(A, Relation(("A",))) == A
    assert mra_union(x1, x1) == unary({"x": 2})
    assert mra_except(A, Relation(("A",))) == A
    assert mra_except(unary({"a": 5}), unary({"a": 1})) == Relation(("A",))
    assert eval_expr(Except(BaseRelation("r"), BaseRelation("r")), {"r": A}) == Relation(("A",))


def test_union_aligns_columns_by_name():
    r = Relation(("A", "B"), [(("a", "b"), 1)])
    s = Relation(("B", "A"), [(("b", "a"), 2)])
    assert mra_union(r, s) == Relation(("A", "B"), [(("a", "b"), 3)])
    assert mra_except(r, s) == Relation(("A", "B"))


def test_schema_errors():
    r = Relation(("A", "B"), [(("a", "b"), 2)])
    with pytest.raises(SchemaError):
        mra_union(r, unary({}))
    with pytest.raises(SchemaError):
        mra_except(r, unary({}))
    with pytest.raises(SchemaError):
        mra_select(r, CondEq("Z", "a"))
    with pytest.raises(SchemaError):
        mra_project(r, ("Z",))
    with pytest.raises(MraError):
        eval_expr(BaseRelation("Q"), {})
    with pytest.raises(SchemaError):
        Relation(("A", "A"))
    with pytest.raises(SchemaError):
        Relation(("A",), [(("a", "b"), 1)])


def test_equality_ignores_column_order():
    assert Relation(("A", "B"), [(("a", "b"), 1)]) == Relation(("B", "A"), [(("b", "a"), 1)])
    assert Relation(("A", "B"), [(("a", "b"), 1)]) != Relation(("A", "B"), [(("a", "b"), 2)])


def test_text_formats():
    db = parse_database("# comment\nR(A, B)\na, b * 3\nc, \"d e\"\n\nU()\n()\n")
    assert db["R"] == Relation(("A", "B"), [(("a", "b"), 3), (("c", "d e"), 1)])
    assert db["U"] == Relation((), [((), 1)])
    assert parse_database(render_database(db)) == db
    e = parse_expr("project[A](join(R, select[A=B](S)))")
    assert e == Project(("A",), Join(BaseRelation("R"), Select(CondEq("A", Attr("B")), BaseRelation("S"))))
    assert parse_expr(render_expr(e)) == e
    c = CondOr(CondAnd(CondEq("A", "a"), CondNeq("A", Attr("B"))), CondNot(CondEq("B", "x y")))
    assert parse_condition("((A=a && A!=B) || !(B=\"x y\"))") == c


def test_condition_evaluation():
    row = {"A": "a", "B": "b"}
    assert eval_condition(CondNeq("A", Attr("B")), row)
    assert not eval_condition(CondNot(CondEq("A", "a")), row)


# -- expanded-copy oracle ----------------------------------------------------------------

def copies(r):
    """Set of labelled copies, each row as a dict."""
    return [(dict(zip(r.schema, row)), (row, i)) for row, n in r.rows() for i in range(n)]


def recount(schema, rows):
    counts = Counter(tuple(d[a] for a in schema) for d in rows)
    return Relation(schema, counts.items())


def oracle_select(r, c):
    return recount(r.schema, [d for d, _ in copies(r) if eval_condition(c, d)])


def oracle_join(r, s):
    schema = r.schema + tuple(a for a in s.schema if a not in r.schema)
    out = []
    for (d1, _), (d2, _) in itertools.product(copies(r), copies(s)):
        if all(d1[a] == d2[a] for a in set(r.schema) & set(s.schema)):
            out.append({**d1, **d2})
    return recount(schema, out)


def oracle_project(r, attrs):
    return recount(tuple(attrs), [d for d, _ in copies(r)])


def oracle_union(r, s):
    return recount(r.schema, [d for d, _ in copies(r)] + [d for d, _ in copies(s)])


def oracle_except(r, s):
    present = {tuple(d[a] for a in r.schema) for d, _ in copies(s)}
    return recount(r.schema, [d for d, _ in copies(r) if tuple(d[a] for a in r.schema) not in present])


def relations(schema, max_total=25):
    rows = st.lists(st.tuples(st.tuples(*[st.sampled_from("abc")] * len(schema)), st.integers(1, 4)), max_size=6)
    return rows.map(lambda rs: Relation(schema, rs)).filter(lambda r: r.total() <= max_total)


@given(relations(("A", "B")), relations(("A", "B")), relations(("B", "C")))
def test_operators_match_expanded_copies(r, r2, s):
    assert mra_union(r, r2) == oracle_union(r, r2)
    assert mra_except(r, r2) == oracle_except(r, r2)
    assert mra_join(r, s) == oracle_join(r, s)
    assert mra_project(r, ("B",)) == oracle_project(r, ("B",))
    assert mra_project(s, ()) == (oracle_project(s, ()) if s.total() else Relation(()))


@given(relations(("A", "B")), st.integers(0, 10**6))
def test_selection_matches_expanded_copies(r, seed):
    c = gen_condition(FuzzConfig(), random.Random(seed), ("A", "B"))
    assert mra_select(r, c) == oracle_select(r, c)


@given(relations(("A", "B")), relations(("A", "B")), relations(("A", "B")), st.integers(0, 10**6))
def test_algebraic_laws(r, s, t, seed):
    assert mra_union(r, s) == mra_union(s, r)
    assert mra_union(mra_union(r, s), t) == mra_union(r, mra_union(s, t))
    assert mra_project(mra_union(r, s), ("A",)) == mra_union(mra_project(r, ("A",)), mra_project(s, ("A",)))
    c = gen_condition(FuzzConfig(), random.Random(seed), ("A", "B"))
    assert mra_select(mra_union(r, s), c) == mra_union(mra_select(r, c), mra_select(s, c))
    out = mra_except(r, s)
    assert all(n == r.count(row) for row, n in out.rows())


@given(relations(("A", "B")), relations(("B", "C")))
def test_join_commutes_up_to_column_order(r, s):
    assert mra_join(r, s) == mra_join(s, r)


@given(st.integers(0, 10**6))
def test_generated_expressions_schema_check(seed):
    rng = random.Random(seed)
    cfg = FuzzConfig()
    db = gen_database(cfg, rng)
    assert sum(r.total() for r in db.values()) <= 50
    e = gen_expr(cfg, rng, db)
    out = eval_expr(e, db)
    assert set(out.schema) == set(schema_of(e, {k: r.schema for k, r in db.items()}))
