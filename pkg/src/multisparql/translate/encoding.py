"""Conversions between RDF terms / mappings and Datalog constants /
substitutions. Unbound SPARQL variables become the constant ``null``."""
from __future__ import annotations

import json

from ..datalog.program import Const, Substitution, SubstitutionMultiset
from ..datalog.program import Var as DVar
from ..multiset import Mapping, MappingMultiset
from ..rdf import NULL, Iri, Literal, Term, Var


class EncodingError(ValueError):
    pass


def term_to_const(term: Term) -> str:
    if isinstance(term, Iri):
        return f"<{term.name}>"
    if isinstance(term, Literal):
        return json.dumps(term.value, ensure_ascii=False)
    raise TypeError(f"not an RDF term: {term!r}")


def const_to_term(value: str) -> Term:
    if value.startswith("<") and value.endswith(">"):
        return Iri(value[1:-1])
    if value.startswith('"'):
        return Literal(json.loads(value))
    raise EncodingError(f"constant {value!r} does not encode an RDF term")


def term_const(term: Term) -> Const:
    return Const(term_to_const(term))


def datalog_var(v: Var) -> DVar:
    return DVar("V" + v.name)


def mapping_to_substitution(mu: Mapping, var_order) -> Substitution:
    extra = set(mu.domain) - set(var_order)
    if extra:
        raise EncodingError(f"mapping binds {sorted(v.name for v in extra)} outside the variable order")
    return Substitution(
        (datalog_var(v).name, term_to_const(mu[v]) if v in mu else NULL) for v in var_order
    )


def substitution_to_mapping(theta: Substitution, var_order) -> Mapping:
    names = {datalog_var(v).name: v for v in var_order}
    out = {}
    for name, value in theta.items():
        if name not in names:
            raise EncodingError(f"substitution binds {name} outside the variable order")
        if value != NULL:
            out[names[name]] = const_to_term(value)
    return Mapping(out)


def multiset_to_answers(omega: MappingMultiset, var_order) -> SubstitutionMultiset:
    return SubstitutionMultiset((mapping_to_substitution(mu, var_order), c) for mu, c in omega.items())


def answers_to_multiset(answers: SubstitutionMultiset, var_order) -> MappingMultiset:
    return MappingMultiset((substitution_to_mapping(th, var_order), c) for th, c in answers.items())
