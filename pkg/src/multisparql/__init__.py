"""Bag-semantics SPARQL, non-recursive Datalog and multiset relational
algebra, with translations between them and a differential tester."""
from .evaluation import evaluate
from .patterns import parse_pattern, render_pattern
from .rdf import Graph, Iri, Literal, Var, parse_graph
from .rewrite import to_core

__version__ = "0.1.0"

__all__ = ["Graph", "Iri", "Literal", "Var", "evaluate", "parse_graph", "parse_pattern", "render_pattern", "to_core"]
