"""Small constructors shared by the test modules."""
from multisparql.multiset import Mapping, MappingMultiset
from multisparql.rdf import Iri, Literal, Var


def term(value):
    if isinstance(value, (Iri, Literal)):
        return value
    return Iri(value)


def mu(**bindings):
    return Mapping({Var(k): term(v) for k, v in bindings.items()})


def bag(*entries):
    """bag((mu(x="a"), 2), mu(y="b")) -- a bare mapping counts once."""
    pairs = [e if isinstance(e, tuple) else (e, 1) for e in entries]
    return MappingMultiset(pairs)


def unary(counts: dict, var="x"):
    return bag(*[(mu(**{var: k}), n) for k, n in counts.items()])
