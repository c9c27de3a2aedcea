"""Translations between graph patterns, Datalog programs and relational
algebra expressions."""
from .datalog_sparql import datalog_to_sparql, facts_to_graph, sparql_answers
from .encoding import (
    answers_to_multiset,
    mapping_to_substitution,
    multiset_to_answers,
    substitution_to_mapping,
)
from .mra_datalog import answers_to_relation, datalog_to_mra, mra_to_datalog, relation_to_answers
from .sparql_datalog import (
    TranslationBundle,
    TranslationError,
    comp_rules,
    graph_to_facts,
    sparql_to_datalog,
)

__all__ = [
    "TranslationBundle", "TranslationError", "answers_to_multiset", "answers_to_relation",
    "comp_rules", "datalog_to_mra", "datalog_to_sparql", "facts_to_graph", "graph_to_facts",
    "mapping_to_substitution", "mra_to_datalog", "multiset_to_answers", "relation_to_answers",
    "sparql_answers", "sparql_to_datalog", "substitution_to_mapping",
]
