"""Multiset operators over mappings and three-valued selection formulas."""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, Union

from .multiset import (
    Mapping,
    MappingMultiset,
    compatible,
    merge,
    restrict,
)
from .rdf import Term, Var


class TV(enum.Enum):
    TRUE = "true"
    FALSE = "false"
    ERROR = "error"


@dataclass(frozen=True)
class Eq:
    var: Var
    term: Term


@dataclass(frozen=True)
class EqVar:
    left: Var
    right: Var


@dataclass(frozen=True)
class Bound:
    var: Var


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Not:
    operand: "Formula"


@dataclass(frozen=True)
class TrueFormula:
    pass


TRUE = TrueFormula()

Formula = Union[Eq, EqVar, Bound, And, Or, Not, TrueFormula]


def tv_not(a: TV) -> TV:
    if a is TV.ERROR:
        return TV.ERROR
    return TV.FALSE if a is TV.TRUE else TV.TRUE


def tv_and(a: TV, b: TV) -> TV:
    if a is TV.FALSE or b is TV.FALSE:
        return TV.FALSE
    if a is TV.ERROR or b is TV.ERROR:
        return TV.ERROR
    return TV.TRUE


def tv_or(a: TV, b: TV) -> TV:
    if a is TV.TRUE or b is TV.TRUE:
        return TV.TRUE
    if a is TV.ERROR or b is TV.ERROR:
        return TV.ERROR
    return TV.FALSE


def eval_formula(mu: Mapping, f: Formula) -> TV:
    if isinstance(f, Eq):
        if f.var not in mu:
            return TV.ERROR
        return TV.TRUE if mu[f.var] == f.term else TV.FALSE
    if isinstance(f, EqVar):
        if f.left not in mu or f.right not in mu:
            return TV.ERROR
        return TV.TRUE if mu[f.left] == mu[f.right] else TV.FALSE
    if isinstance(f, Bound):
        return TV.TRUE if f.var in mu else TV.FALSE
    if isinstance(f, Not):
        return tv_not(eval_formula(mu, f.operand))
    if isinstance(f, And):
        return tv_and(eval_formula(mu, f.left), eval_formula(mu, f.right))
    if isinstance(f, Or):
        return tv_or(eval_formula(mu, f.left), eval_formula(mu, f.right))
    if isinstance(f, TrueFormula):
        return TV.TRUE
    raise TypeError(f"not a selection formula: {f!r}")


def formula_vars(f: Formula) -> frozenset[Var]:
    if isinstance(f, Eq):
        return frozenset({f.var})
    if isinstance(f, EqVar):
        return frozenset({f.left, f.right})
    if isinstance(f, Bound):
        return frozenset({f.var})
    if isinstance(f, Not):
        return formula_vars(f.operand)
    if isinstance(f, (And, Or)):
        return formula_vars(f.left) | formula_vars(f.right)
    return frozenset()


def project(omega: MappingMultiset, w: Iterable[Var]) -> MappingMultiset:
    w = frozenset(w)
    return MappingMultiset((restrict(mu, w), c) for mu, c in omega.items())


def select_sigma(omega: MappingMultiset, f: Formula) -> MappingMultiset:
    return MappingMultiset(
        (mu, c) for mu, c in omega.items() if eval_formula(mu, f) is TV.TRUE
    )


def join(o1: MappingMultiset, o2: MappingMultiset) -> MappingMultiset:
    out = []
    for mu1, c1 in o1.items():
        for mu2, c2 in o2.items():
            if compatible(mu1, mu2):
                out.append((merge(mu1, mu2), c1 * c2))
    return MappingMultiset(out)


def union(o1: MappingMultiset, o2: MappingMultiset) -> MappingMultiset:
    return MappingMultiset(list(o1.items()) + list(o2.items()))


def minus(o1: MappingMultiset, o2: MappingMultiset) -> MappingMultiset:
    def survives(mu1):
        return all(
            not compatible(mu1, mu2) or not (mu1.domain & mu2.domain)
            for mu2 in o2.mappings()
        )

    return MappingMultiset((mu, c) for mu, c in o1.items() if survives(mu))


def diff_f(o1: MappingMultiset, o2: MappingMultiset, f: Formula) -> MappingMultiset:
    def survives(mu1):
        for mu2 in o2.mappings():
            if compatible(mu1, mu2) and eval_formula(merge(mu1, mu2), f) is TV.TRUE:
                return False
        return True

    return MappingMultiset((mu, c) for mu, c in o1.items() if survives(mu))


def left_join(o1: MappingMultiset, o2: MappingMultiset, f: Formula) -> MappingMultiset:
    return union(select_sigma(join(o1, o2), f), diff_f(o1, o2, f))


def weak_diff(o1: MappingMultiset, o2: MappingMultiset) -> MappingMultiset:
    """Keep mappings of ``o1`` compatible with no mapping of ``o2``."""
    return MappingMultiset(
        (mu, c) for mu, c in o1.items()
        if not any(compatible(mu, mu2) for mu2 in o2.mappings())
    )


def except_diff(o1: MappingMultiset, o2: MappingMultiset) -> MappingMultiset:
    """Keep mappings of ``o1`` that do not occur in ``o2`` (counts from ``o1``)."""
    return MappingMultiset((mu, c) for mu, c in o1.items() if mu not in o2)
