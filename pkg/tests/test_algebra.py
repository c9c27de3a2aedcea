import itertools
from collections import Counter

from hypothesis import given, strategies as st

from multisparql.algebra import (
    TRUE,
    TV,
    And,
    Bound,
    Eq,
    EqVar,
    Not,
    Or,
    diff_f,
    eval_formula,
    join,
    left_join,
    minus,
    project,
    select_sigma,
    union,
)
from multisparql.multiset import Mapping, MappingMultiset, compatible, merge
from multisparql.rdf import Iri, Var

from helpers import bag, mu, unary

X, Y = Var("X"), Var("Y")
a, b, c = Iri("a"), Iri("b"), Iri("c")
mu0 = Mapping()
T, F, E = TV.TRUE, TV.FALSE, TV.ERROR


# -- three-valued formulas -------------------------------------------------------

def test_formula_atoms():
    assert eval_formula(mu(X="a"), Eq(X, a)) is T
    assert eval_formula(mu0, Eq(X, a)) is E
    assert eval_formula(mu0, Bound(X)) is F
    assert eval_formula(mu(X="a"), EqVar(X, Y)) is E
    assert eval_formula(mu(X="a", Y="a"), EqVar(X, Y)) is T
    assert eval_formula(mu0, TRUE) is T


def test_connective_tables():
    atoms = {T: Bound(X), F: Bound(Y), E: Eq(Y, a)}
    m = mu(X="a")
    assert eval_formula(m, Not(atoms[E])) is E
    assert eval_formula(m, Not(atoms[T])) is F
    expected_and = {(T, T): T, (T, F): F, (T, E): E, (F, E): F, (E, F): F, (E, E): E, (F, F): F}
    expected_or = {(T, T): T, (T, F): T, (T, E): T, (F, E): E, (E, T): T, (E, E): E, (F, F): F}
    for (l, r), want in expected_and.items():
        assert eval_formula(m, And(atoms[l], atoms[r])) is want, (l, r)
    for (l, r), want in expected_or.items():
        assert eval_formula(m, Or(atoms[l], atoms[r])) is want, (l, r)


# -- operator examples ---------------------------------------------------------------

def test_project_examples():
    assert project(bag(mu(X="a", Y="b"), (mu(X="a", Y="c"), 2)), {X}) == bag((mu(X="a"), 3))
    m = mu(X="a", Y="b")
    assert project(bag((m, 5)), {X, Y}) == bag((m, 5))
    assert project(bag(mu(X="a"), mu(X="b")), set()) == bag((mu0, 2))


def test_select_examples():
    assert select_sigma(bag((mu(X="a"), 2)), Eq(X, a)) == bag((mu(X="a"), 2))
    assert select_sigma(bag((mu(X="a"), 2)), Eq(X, b)) == bag()
    assert select_sigma(bag((mu0, 3)), Eq(X, a)) == bag()


def test_join_examples():
    assert join(bag((mu(X="a"), 2)), bag((mu(Y="b"), 3))) == bag((mu(X="a", Y="b"), 6))
    assert join(bag(mu(X="a")), bag(mu(X="b"))) == bag()
    assert join(bag(mu(X="a"), mu0), bag(mu(X="a"))) == bag((mu(X="a"), 2))


def test_union_examples():
    m = mu(X="a")
    assert union(bag((m, 2)), bag((m, 3))) == bag((m, 5))
    assert union(bag((m, 2)), bag()) == bag((m, 2))
    assert union(unary({"a": 3, "b": 2, "d": 2}), unary({"a": 1, "b": 2, "c": 1})) == unary(
        {"a": 4, "b": 4, "c": 1, "d": 2}
    )


def test_minus_examples():
    assert minus(bag((mu(X="a"), 2)), bag(mu(X="a"))) == bag()
    assert minus(bag((mu(X="a"), 2)), bag(mu(Y="b"))) == bag((mu(X="a"), 2))
    assert minus(bag((mu(X="a"), 2)), bag()) == bag((mu(X="a"), 2))


def test_diff_examples():
    assert diff_f(bag((mu(X="a"), 2)), bag(mu(Y="b")), TRUE) == bag()
    assert diff_f(bag((mu(X="a"), 2)), bag(mu(X="b")), TRUE) == bag((mu(X="a"), 2))
    assert diff_f(bag(mu(X="a")), bag(mu(Y="b")), Eq(Y, c)) == bag(mu(X="a"))


def test_left_join_examples():
    assert left_join(bag(mu(X="a")), bag(), TRUE) == bag(mu(X="a"))
    assert left_join(bag(mu(X="a")), bag(mu(Y="b")), TRUE) == bag(mu(X="a", Y="b"))
    assert left_join(bag((mu(X="a"), 2)), bag(mu(X="a"), mu(X="b")), TRUE) == bag((mu(X="a"), 2))


# -- properties against brute-force oracles ------------------------------------------

def copies(omega):
    """Expand counts into individually labelled copies."""
    return [(m, i) for m, n in omega.items() for i in range(n)]


def join_oracle(o1, o2):
    out = Counter()
    for (m1, _), (m2, _) in itertools.product(copies(o1), copies(o2)):
        if compatible(m1, m2):
            out[merge(m1, m2)] += 1
    return MappingMultiset(out.items())


values = st.sampled_from([a, b])
mappings = st.dictionaries(st.sampled_from([X, Y]), values, max_size=2).map(Mapping)
multisets = st.lists(st.tuples(mappings, st.integers(1, 3)), max_size=6).map(MappingMultiset)
formulas = st.recursive(
    st.one_of(
        st.builds(Eq, st.sampled_from([X, Y]), values),
        st.builds(EqVar, st.just(X), st.just(Y)),
        st.builds(Bound, st.sampled_from([X, Y])),
    ),
    lambda inner: st.one_of(st.builds(And, inner, inner), st.builds(Or, inner, inner), st.builds(Not, inner)),
    max_leaves=4,
)


@given(multisets, multisets)
def test_join_sum_of_products(o1, o2):
    assert join(o1, o2) == join_oracle(o1, o2)


@given(multisets, multisets)
def test_union_additive(o1, o2):
    u = union(o1, o2)
    for m in set(o1) | set(o2):
        assert u.count(m) == o1.count(m) + o2.count(m)


@given(multisets, multisets, formulas)
def test_filters_never_alter_surviving_counts(o1, o2, f):
    for out in (select_sigma(o1, f), minus(o1, o2), diff_f(o1, o2, f)):
        for m, n in out.items():
            assert n == o1.count(m)


@given(multisets, multisets, formulas)
def test_left_join_decomposition(o1, o2, f):
    assert left_join(o1, o2, f) == union(select_sigma(join(o1, o2), f), diff_f(o1, o2, f))


@given(multisets, multisets)
def test_diff_true_drops_every_compatible_left_mapping(o1, o2):
    out = diff_f(o1, o2, TRUE)
    for m in o1:
        assert (m in out) == (not any(compatible(m, m2) for m2 in o2))


def test_selection_is_total_over_absent_variables():
    # the domain restriction lives in the pattern checker, not in sigma
    omega = bag((mu(x="a"), 2), mu(x="b", z="c"))
    z = Var("z")
    assert select_sigma(omega, Not(Bound(z))) == bag((mu(x="a"), 2))
    assert select_sigma(omega, Eq(z, Iri("c"))) == bag(mu(x="b", z="c"))
