"""Acceptance criteria. Each test prints one PASS/FAIL line, repeated in the
terminal summary."""
import random

import pytest

from multisparql import algebra as alg
from multisparql import mra
from multisparql.evaluation import evaluate
from multisparql.harness import FAULTS, FuzzConfig, gen_constraint, gen_graph, gen_normalized_program, gen_pattern
from multisparql.harness import inject, run_equivalence_campaign
from multisparql.harness.campaign import DatalogInstance, _run, check_datalog_sparql, iteration_rng
from multisparql.patterns import Diff, Filter, Minus, disjunction, dom, f_of, parse_pattern
from multisparql.rdf import parse_graph
from multisparql.rewrite import atomize_filters, cnf_clauses, disjunction_branches

from helpers import bag, mu


@pytest.fixture
def report(request):
    lines = request.config.__dict__.setdefault("acceptance_lines", [])

    def emit(n: int, ok: bool, detail: str):
        line = f"{'PASS' if ok else 'FAIL'} criterion {n}: {detail}"
        lines.append(line)
        print(line)
        assert ok, line

    return emit


def campaign(pipeline: str, iterations: int, **kw):
    cfg = FuzzConfig(seed=0, iterations=iterations, pipeline=pipeline, max_pattern_depth=4, **kw)
    return run_equivalence_campaign(cfg)


def summary(r) -> str:
    counts = ", ".join(f"{k}={v}" for k, v in sorted(r.per_check.items()))
    first = ""
    if r.discrepancies:
        d = r.discrepancies[0]
        first = f"; first witness [{d.check}] {d.witness}"
    return f"{counts}, discrepancies={len(r.discrepancies)}{first}"


def test_criterion_1_union_and_except(report):
    def rel(counts):
        return mra.Relation(("A",), [((k,), n) for k, n in counts.items()])

    a, b = rel({"a": 3, "b": 2, "d": 2}), rel({"a": 1, "b": 2, "c": 1})
    union, diff = mra.mra_union(a, b), mra.mra_except(a, b)
    ok = union == rel({"a": 4, "b": 4, "c": 1, "d": 2}) and diff == rel({"d": 2})
    report(1, ok, f"union={union.sorted_rows()} except={diff.sorted_rows()}")


def test_criterion_2_sparql_datalog(report):
    r = campaign("sparql-datalog", 1000, max_triples=20)
    ok = r.clean and r.per_check.get("sparql-datalog", 0) >= 1000
    report(2, ok, summary(r))


def test_criterion_3_datalog_and_mra(report):
    r = campaign("datalog-roundtrip", 1000, max_triples=20)
    ok = r.clean and r.per_check.get("datalog-mra", 0) >= 1000 and r.per_check.get("mra-datalog", 0) >= 1000
    report(3, ok, summary(r))


def test_criterion_4_to_core(report):
    r = campaign("w3c-core", 1000, max_triples=20)
    ok = r.clean and r.per_check.get("w3c-core", 0) >= 1000
    report(4, ok, summary(r))


def _holds(m, chain):
    return all(alg.eval_formula(m, f_of(c)) is alg.TV.TRUE for c in chain)


def test_criterion_5_atomization(report):
    cfg = FuzzConfig(max_pattern_depth=3, max_disjuncts=3)
    done = inexact = overlapping = 0
    i = 0
    while done < 500:
        rng = iteration_rng(5, i)
        i += 1
        g, p = gen_graph(cfg, rng), gen_pattern(cfg, rng, "w3c")
        if not dom(p):
            continue
        c = gen_constraint(cfg, rng, dom(p))
        original = Filter(p, c)
        if evaluate(atomize_filters(original), g) != evaluate(original, g):
            inexact += 1
        for m in evaluate(p, g):
            for clause in cnf_clauses(c):
                hits = sum(_holds(m, b) for b in disjunction_branches(clause))
                truth = alg.eval_formula(m, f_of(disjunction(clause)))
                if hits != (1 if truth is alg.TV.TRUE else 0):
                    overlapping += 1
        done += 1
    report(5, inexact == 0 and overlapping == 0,
           f"constraints={done}, inexact={inexact}, non-exclusive branch hits={overlapping}")


def test_criterion_6_normalize(report):
    r = campaign("datalog-normalize", 600)
    bad = [d for d in r.discrepancies if d.check == "normalize"]
    ok = not bad and r.per_check.get("normalize", 0) >= 500
    report(6, ok, summary(r))


def test_criterion_7_derivation_trees(report):
    r = campaign("datalog-normalize", 600)
    bad = [d for d in r.discrepancies if d.check == "derivation-trees"]
    ok = not bad and r.per_check.get("derivation-trees", 0) >= 500
    report(7, ok, summary(r) + " (tree budget 10^4)")


def test_criterion_8_datalog_sparql(report):
    cfg = FuzzConfig()
    checked = with_copies = failures = 0
    for i in range(400):
        prog, goal = gen_normalized_program(cfg, iteration_rng(8, i))
        checked += 1
        with_copies += any(n > 1 for _, n in prog.facts)
        failures += _run(check_datalog_sparql, DatalogInstance(prog, goal))[0]
    ok = failures == 0 and checked >= 300 and with_copies > 0
    report(8, ok, f"programs={checked}, with multiplicity>1 facts={with_copies}, failures={failures}")


def test_criterion_9_minus_vs_diff(report):
    g = parse_graph("<a> <p> <b> .\n<c> <q> <d> .\n")
    p1, p2 = parse_pattern("{?x <p> ?y}"), parse_pattern("{?u <q> ?v}")
    minus, diff = evaluate(Minus(p1, p2), g), evaluate(Diff(p1, p2), g)
    ok = minus == bag(mu(x="a", y="b")) and diff == bag()
    report(9, ok, f"MINUS={len(minus)} mapping(s), DIFF={len(diff)} mapping(s)")


def test_criterion_10_fault_detection(report):
    found = {}
    for name, fault in sorted(FAULTS.items()):
        cfg = FuzzConfig(seed=0, iterations=500, pipeline=fault.pipeline, max_pattern_depth=4)
        with inject(name):
            r = run_equivalence_campaign(cfg, stop_after=1)
        found[name] = r.discrepancies[0].iteration if r.discrepancies else None
    ok = len(found) == 5 and all(v is not None for v in found.values())
    report(10, ok, ", ".join(f"{k}@{v}" for k, v in found.items()))
