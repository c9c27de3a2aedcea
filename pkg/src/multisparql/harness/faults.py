"""Deliberate bugs used to check that campaigns notice broken components.

Each fault patches one module-level function for the duration of a ``with``
block and names the pipeline expected to expose it."""
from __future__ import annotations

import contextlib
from dataclasses import dataclass
from typing import Callable
from unittest import mock

from .. import evaluation, mra
from ..datalog import normalform
from ..datalog.program import Neq, Rule
from ..multiset import MappingMultiset, compatible, merge
from ..translate import sparql_datalog


@dataclass(frozen=True)
class Fault:
    name: str
    pipeline: str
    description: str
    target: object
    attribute: str
    make: Callable  # original -> replacement


def _drop_comp_rule(original):
    def comp_rules():
        rules = original()
        return rules[:2] + rules[3:]  # loses comp(null, X, X)
    return comp_rules


def _swap_null_padding(original):
    def union_rules(head, p, left, right):
        order = sparql_datalog.var_order(p)
        pad = sparql_datalog.null_padding
        return [
            Rule(head, (left,) + tuple(pad(order, sparql_datalog.dom(p.right)))),
            Rule(head, (right,) + tuple(pad(order, sparql_datalog.dom(p.left)))),
        ]
    return union_rules


def _break_join_product(original):
    def join(o1, o2):
        out = []
        for mu1, c1 in o1.items():
            for mu2, _c2 in o2.items():
                if compatible(mu1, mu2):
                    out.append((merge(mu1, mu2), c1))  # right factor forgotten
        return MappingMultiset(out)
    return join


def _drop_inequality_case(original):
    def rule(self, r):
        return original(self, Rule(r.head, tuple(l for l in r.body if not isinstance(l, Neq))))
    return rule


def _off_by_one_union(original):
    def mra_union(r, s):
        out = original(r, s)
        bumped = [(row, n + 1) if row in r and row in s else (row, n) for row, n in out.rows()]
        return mra.Relation(out.schema, bumped)
    return mra_union


FAULTS = {
    f.name: f
    for f in (
        Fault("drop-comp-rule", "sparql-datalog", "omit comp(null, X, X) from the compatibility rules",
              sparql_datalog, "comp_rules", _drop_comp_rule),
        Fault("swap-null-padding", "sparql-datalog", "pad each UNION branch with the other branch's missing variables",
              sparql_datalog, "_union_rules", _swap_null_padding),
        Fault("break-join-count", "sparql-datalog", "join multiplicities ignore the right operand's count",
              evaluation, "join", _break_join_product),
        Fault("drop-normalization-case", "datalog-normalize", "normalization ignores inequality literals",
              normalform._Normalizer, "rule", _drop_inequality_case),
        Fault("off-by-one-union", "datalog-roundtrip", "relation union adds one to rows present on both sides",
              mra, "mra_union", _off_by_one_union),
    )
}


@contextlib.contextmanager
def inject(name: str):
    fault = FAULTS[name]
    original = getattr(fault.target, fault.attribute)
    with mock.patch.object(fault.target, fault.attribute, fault.make(original)):
        yield fault
