"""Reference evaluator for graph patterns over RDF graphs."""
from __future__ import annotations

from dataclasses import dataclass

from . import algebra as alg
from .algebra import diff_f, join, left_join, minus, project, select_sigma, union
from .multiset import Mapping, MappingMultiset, compatible, merge
from .patterns import (
    And,
    Diff,
    Except,
    ExceptStar,
    Filter,
    Minus,
    Opt,
    Pattern,
    Select,
    TriplePattern,
    Union_,
    check_well_formed,
    f_of,
)
from .rdf import Graph, Var


def match_triple(tp: TriplePattern, g: Graph) -> MappingMultiset:
    out = []
    for triple in g.triples:
        binding: dict = {}
        for pat, term in zip(tp, triple):
            if isinstance(pat, Var):
                bound = binding.get(pat)
                if bound is None:
                    binding[pat] = term
                elif bound != term:
                    break
            elif pat != term:
                break
        else:
            out.append((Mapping(binding), 1))
    return MappingMultiset(out)


def evaluate(p: Pattern, g: Graph, memo: bool = False) -> MappingMultiset:
    check_well_formed(p)
    cache: dict | None = {} if memo else None
    return _eval(p, g, cache)


def _eval(p: Pattern, g: Graph, cache: dict | None) -> MappingMultiset:
    if cache is not None:
        hit = cache.get(p)
        if hit is not None:
            return hit
    if isinstance(p, TriplePattern):
        out = match_triple(p, g)
    elif isinstance(p, And):
        out = join(_eval(p.left, g, cache), _eval(p.right, g, cache))
    elif isinstance(p, Opt):
        left = _eval(p.left, g, cache)
        if isinstance(p.right, Filter):
            out = left_join(left, _eval(p.right.pattern, g, cache), f_of(p.right.constraint))
        else:
            out = left_join(left, _eval(p.right, g, cache), alg.TRUE)
    elif isinstance(p, Minus):
        out = minus(_eval(p.left, g, cache), _eval(p.right, g, cache))
    elif isinstance(p, Union_):
        out = union(_eval(p.left, g, cache), _eval(p.right, g, cache))
    elif isinstance(p, Filter):
        out = select_sigma(_eval(p.pattern, g, cache), f_of(p.constraint))
    elif isinstance(p, Select):
        out = project(_eval(p.pattern, g, cache), p.variables)
    elif isinstance(p, Diff):
        out = alg.weak_diff(_eval(p.left, g, cache), _eval(p.right, g, cache))
    elif isinstance(p, (Except, ExceptStar)):
        out = alg.except_diff(_eval(p.left, g, cache), _eval(p.right, g, cache))
    else:
        raise TypeError(f"not a graph pattern: {p!r}")
    if cache is not None:
        cache[p] = out
    return out


@dataclass(frozen=True)
class Derivation:
    """One contribution of ``count`` copies of ``mapping`` to an operator's output."""

    operator: str
    mapping: Mapping
    count: int
    inputs: tuple = ()


def evaluate_with_trace(p: Pattern, g: Graph) -> tuple[MappingMultiset, list[Derivation]]:
    """Evaluate ``p`` and log, for the root operator, every derivation that
    contributed to the output. Counts of derivations of a mapping sum to its
    multiplicity."""
    check_well_formed(p)
    return _trace(p, g)


def _join_trace(name, o1, o2, formula=None):
    trace = []
    for mu1, c1 in o1.items():
        for mu2, c2 in o2.items():
            if compatible(mu1, mu2):
                mu = merge(mu1, mu2)
                if formula is None or alg.eval_formula(mu, formula) is alg.TV.TRUE:
                    trace.append(Derivation(name, mu, c1 * c2, (mu1, mu2)))
    return trace


def _trace(p: Pattern, g: Graph):
    if isinstance(p, TriplePattern):
        omega = match_triple(p, g)
        return omega, [Derivation("triple", mu, 1) for mu in omega.mappings()]
    if isinstance(p, And):
        o1, o2 = evaluate(p.left, g), evaluate(p.right, g)
        trace = _join_trace("join", o1, o2)
    elif isinstance(p, Opt):
        o1 = evaluate(p.left, g)
        if isinstance(p.right, Filter):
            o2, f = evaluate(p.right.pattern, g), f_of(p.right.constraint)
        else:
            o2, f = evaluate(p.right, g), alg.TRUE
        trace = _join_trace("leftjoin", o1, o2, f)
        kept = diff_f(o1, o2, f)
        trace += [Derivation("leftjoin-diff", mu, c, (mu,)) for mu, c in kept.items()]
    elif isinstance(p, Union_):
        o1, o2 = evaluate(p.left, g), evaluate(p.right, g)
        trace = [Derivation("union-left", mu, c, (mu,)) for mu, c in o1.items()]
        trace += [Derivation("union-right", mu, c, (mu,)) for mu, c in o2.items()]
    elif isinstance(p, Select):
        o1 = evaluate(p.pattern, g)
        trace = [
            Derivation("project", Mapping((v, t) for v, t in mu.items() if v in p.variables), c, (mu,))
            for mu, c in o1.items()
        ]
    else:
        omega = evaluate(p, g)
        name = type(p).__name__.lower().rstrip("_")
        return omega, [Derivation(name, mu, c, (mu,)) for mu, c in omega.items()]
    return MappingMultiset((d.mapping, d.count) for d in trace), trace


def render_table(omega: MappingMultiset, variables=None) -> str:
    """Plain-text table: one column per variable, unbound cells as ``-``."""
    if variables is None:
        variables = sorted(omega.domain(), key=lambda v: v.name)
    header = [str(v) for v in variables] + ["count"]
    rows = []
    for mu, c in omega.sorted_items():
        rows.append([str(mu[v]) if v in mu else "-" for v in variables] + [str(c)])
    widths = [max(len(r[i]) for r in [header] + rows) for i in range(len(header))]
    lines = [" | ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip() for row in [header] + rows]
    lines.insert(1, "-+-".join("-" * w for w in widths))
    return "\n".join(lines) + "\n"
