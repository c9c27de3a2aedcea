"""Differential equivalence campaigns across the three formalisms.

Each pipeline draws a random instance per iteration and runs one or more
checks. A check computes an expected and an actual answer; any mismatch, or
an exception on the actual side, is a discrepancy. Discrepancies are shrunk
greedily before being reported."""
from __future__ import annotations

import dataclasses
import json
import random
from dataclasses import dataclass, field
from typing import Callable

from .. import mra
from ..datalog import engine, normalform as dl_normalize
from ..datalog.derivations import TreeBudgetExceeded, enumerate_derivation_trees
from ..datalog.program import Atom, Program, render_program
from .. import evaluation as sparql_eval
from ..multiset import multiset_to_json
from ..patterns import children, is_core, is_well_formed, render_pattern
from ..rdf import Graph, serialize_graph
from ..rewrite import to_core
from ..translate import datalog_sparql, mra_datalog, sparql_datalog
from ..translate.encoding import answers_to_multiset
from . import generators as gen

PIPELINES = ("sparql-datalog", "sparql-mra", "w3c-core", "datalog-roundtrip", "datalog-normalize")
MAX_REPLAYS = 500


class InvalidInstance(Exception):
    """The expected side rejected the instance (used while shrinking)."""


# -- instances -----------------------------------------------------------------------

@dataclass(frozen=True)
class SparqlInstance:
    graph: Graph
    pattern: object

    def describe(self) -> dict:
        return {"graph": serialize_graph(self.graph), "pattern": render_pattern(self.pattern)}

    def shrink_candidates(self):
        triples = sorted(self.graph.triples, key=lambda t: t.sort_key)
        for i in range(len(triples)):
            yield SparqlInstance(Graph(triples[:i] + triples[i + 1:]), self.pattern)
        for sub in _subpatterns(self.pattern):
            yield SparqlInstance(self.graph, sub)


def _subpatterns(p):
    """Patterns obtained by replacing one node by one of its children."""
    for child in children(p):
        yield child
    for i, child in enumerate(children(p)):
        for smaller in _subpatterns(child):
            yield _replace_child(p, i, smaller)


def _replace_child(p, index, new):
    fields = [f.name for f in dataclasses.fields(p)]
    values = {name: getattr(p, name) for name in fields}
    kids = [name for name in fields if name in ("left", "right", "pattern")]
    values[kids[index]] = new
    return type(p)(**values)


@dataclass(frozen=True)
class DatalogInstance:
    program: Program
    goal: Atom

    def describe(self) -> dict:
        return {"program": render_program(self.program), "goal": str(self.goal)}

    def shrink_candidates(self):
        rules, facts = list(self.program.rules), list(self.program.facts)
        for i in range(len(rules)):
            yield DatalogInstance(Program(tuple(rules[:i] + rules[i + 1:]), tuple(facts)), self.goal)
        for i in range(len(facts)):
            yield DatalogInstance(Program(tuple(rules), tuple(facts[:i] + facts[i + 1:])), self.goal)
        for i, (atom, n) in enumerate(facts):
            if n > 1:
                smaller = facts[:i] + [(atom, n - 1)] + facts[i + 1:]
                yield DatalogInstance(Program(tuple(rules), tuple(smaller)), self.goal)


@dataclass(frozen=True)
class MraInstance:
    expr: object
    db: tuple  # sorted (name, Relation) pairs

    @property
    def database(self) -> dict:
        return dict(self.db)

    def describe(self) -> dict:
        return {"expr": mra.render_expr(self.expr), "db": mra.render_database(self.database)}

    def shrink_candidates(self):
        for sub in _subexprs(self.expr):
            yield MraInstance(sub, self.db)
        for k, (name, rel) in enumerate(self.db):
            rows = list(rel.sorted_rows())
            for i, (row, n) in enumerate(rows):
                for smaller in ([] if n == 1 else [(row, n - 1)], []):
                    new_rows = rows[:i] + smaller + rows[i + 1:]
                    db = self.db[:k] + ((name, mra.Relation(rel.schema, new_rows)),) + self.db[k + 1:]
                    yield MraInstance(self.expr, db)


def _subexprs(e):
    kids = [getattr(e, f) for f in ("expr", "left", "right") if hasattr(e, f)]
    yield from kids
    for name in ("expr", "left", "right"):
        if hasattr(e, name):
            for smaller in _subexprs(getattr(e, name)):
                yield dataclasses.replace(e, **{name: smaller})


# -- checks ---------------------------------------------------------------------------

def _sparql_expected(inst: SparqlInstance, core_only: bool):
    if not is_well_formed(inst.pattern) or (core_only and not is_core(inst.pattern)):
        raise InvalidInstance("pattern outside the pipeline's input language")
    return sparql_eval.evaluate(inst.pattern, inst.graph)


def check_sparql_datalog(inst: SparqlInstance):
    expected = _sparql_expected(inst, core_only=True)
    bundle = sparql_datalog.sparql_to_datalog(inst.pattern, inst.graph)
    answers = engine.eval_program(bundle.program, bundle.goal)
    return expected, answers_to_multiset(answers, bundle.var_order)


def check_sparql_mra(inst: SparqlInstance):
    expected = _sparql_expected(inst, core_only=True)
    bundle = sparql_datalog.sparql_to_datalog(inst.pattern, inst.graph)
    normal = dl_normalize.normalize(bundle.program)
    expr, db = mra_datalog.datalog_to_mra(normal, bundle.goal)
    answers = mra_datalog.relation_to_answers(mra.eval_expr(expr, db))
    return expected, answers_to_multiset(answers, bundle.var_order)


def check_w3c_core(inst: SparqlInstance):
    expected = _sparql_expected(inst, core_only=False)
    core = to_core(inst.pattern)
    if not is_core(core):
        raise AssertionError("to_core produced a non-core pattern")
    return expected, sparql_eval.evaluate(core, inst.graph, memo=True)


def _datalog_expected(inst: DatalogInstance, normalized: bool):
    try:
        if normalized and dl_normalize.check_normal_form(inst.program):
            raise InvalidInstance("program not normalized")
        return engine.eval_program(inst.program, inst.goal)
    except InvalidInstance:
        raise
    except Exception as exc:
        raise InvalidInstance(str(exc)) from exc


def check_datalog_sparql(inst: DatalogInstance):
    expected = _datalog_expected(inst, normalized=True)
    pattern, graph = datalog_sparql.datalog_to_sparql(inst.program, inst.goal)
    return expected, datalog_sparql.sparql_answers(sparql_eval.evaluate(pattern, graph, memo=True))


def check_datalog_mra(inst: DatalogInstance):
    expected = _datalog_expected(inst, normalized=True)
    expr, db = mra_datalog.datalog_to_mra(inst.program, inst.goal)
    return expected, mra_datalog.relation_to_answers(mra.eval_expr(expr, db))


def check_normalize(inst: DatalogInstance):
    expected = _datalog_expected(inst, normalized=False)
    normal = dl_normalize.normalize(inst.program)
    problems = dl_normalize.check_normal_form(normal)
    if problems:
        raise AssertionError("normalize output not in normal form: " + problems[0])
    return expected, engine.eval_program(normal, inst.goal)


def check_derivation_trees(inst: DatalogInstance):
    expected = _datalog_expected(inst, normalized=False)
    try:
        trees = enumerate_derivation_trees(inst.program, inst.goal)
    except TreeBudgetExceeded as exc:
        raise InvalidInstance(str(exc)) from exc
    return trees, expected


def check_mra_datalog(inst: MraInstance):
    try:
        expected = mra.eval_expr(inst.expr, inst.database)
    except mra.MraError as exc:
        raise InvalidInstance(str(exc)) from exc
    prog, goal = mra_datalog.mra_to_datalog(inst.expr, inst.database)
    actual = engine.eval_program(prog, goal)
    return mra_datalog.relation_to_answers(expected), actual


def _to_json(value):
    if isinstance(value, mra.Relation):
        return {"schema": list(value.schema), "rows": [[list(r), n] for r, n in value.sorted_rows()]}
    if hasattr(value, "sorted_items") and hasattr(value, "domain"):
        return multiset_to_json(value)
    if hasattr(value, "sorted_items"):
        return [[dict(s.items()), n] for s, n in value.sorted_items()]
    return repr(value)


# -- campaign -------------------------------------------------------------------------------

@dataclass
class Discrepancy:
    pipeline: str
    check: str
    iteration: int
    instance: dict
    expected: object
    actual: object
    error: str | None
    witness: dict
    replays: int

    def to_json(self) -> dict:
        return dataclasses.asdict(self)


@dataclass
class CampaignReport:
    config: dict
    checks_run: int = 0
    skipped: int = 0
    per_check: dict = field(default_factory=dict)  # check name -> checks run
    discrepancies: list = field(default_factory=list)

    @property
    def clean(self) -> bool:
        return not self.discrepancies

    def to_json(self) -> dict:
        return {
            "config": self.config,
            "checks_run": self.checks_run,
            "skipped": self.skipped,
            "per_check": dict(sorted(self.per_check.items())),
            "discrepancies": [d.to_json() for d in self.discrepancies],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=True, ensure_ascii=False)


def _run(check: Callable, inst):
    """(differs, expected, actual, error); raises InvalidInstance."""
    expected = actual = None
    try:
        expected, actual = check(inst)
    except InvalidInstance:
        raise
    except Exception as exc:  # translation bugs surface as exceptions
        return True, expected, actual, f"{type(exc).__name__}: {exc}"
    return expected != actual, expected, actual, None


def shrink(check: Callable, inst, max_replays: int = MAX_REPLAYS):
    """Greedy reduction; returns (smallest failing instance, replays used)."""
    replays = 0
    improved = True
    while improved and replays < max_replays:
        improved = False
        for cand in inst.shrink_candidates():
            if replays >= max_replays:
                break
            replays += 1
            try:
                differs = _run(check, cand)[0]
            except InvalidInstance:
                continue
            if differs:
                inst = cand
                improved = True
                break
    return inst, replays


def _instances(pipeline: str, cfg: gen.FuzzConfig, rng: random.Random):
    """(check name, check function, instance) triples for one iteration."""
    if pipeline in ("sparql-datalog", "sparql-mra"):
        inst = SparqlInstance(gen.gen_graph(cfg, rng), gen.gen_pattern(cfg, rng, "core"))
        fn = check_sparql_datalog if pipeline == "sparql-datalog" else check_sparql_mra
        return [(pipeline, fn, inst)]
    if pipeline == "w3c-core":
        return [(pipeline, check_w3c_core, SparqlInstance(gen.gen_graph(cfg, rng), gen.gen_pattern(cfg, rng, "w3c")))]
    if pipeline == "datalog-roundtrip":
        prog, goal = gen.gen_normalized_program(cfg, rng)
        inst = DatalogInstance(prog, goal)
        db = gen.gen_database(cfg, rng)
        expr = gen.gen_expr(cfg, rng, db)
        return [
            ("datalog-sparql", check_datalog_sparql, inst),
            ("datalog-mra", check_datalog_mra, inst),
            ("mra-datalog", check_mra_datalog, MraInstance(expr, tuple(sorted(db.items())))),
        ]
    if pipeline == "datalog-normalize":
        inst = DatalogInstance(*gen.gen_program(cfg, rng))
        return [("normalize", check_normalize, inst), ("derivation-trees", check_derivation_trees, inst)]
    raise ValueError(f"unknown pipeline {pipeline!r}")


def iteration_rng(seed: int, i: int) -> random.Random:
    return random.Random(seed * 1_000_003 + i)


def run_equivalence_campaign(cfg: gen.FuzzConfig, stop_after: int | None = None) -> CampaignReport:
    pipelines = PIPELINES if cfg.pipeline == "all" else (cfg.pipeline,)
    for p in pipelines:
        if p not in PIPELINES:
            raise ValueError(f"unknown pipeline {p!r}")
    config = dataclasses.asdict(cfg)
    config["predicates"] = list(cfg.predicates)
    report = CampaignReport(config=config)
    for i in range(cfg.iterations):
        for pipeline in pipelines:
            rng = iteration_rng(cfg.seed, i * len(PIPELINES) + PIPELINES.index(pipeline))
            for name, check, inst in _instances(pipeline, cfg, rng):
                try:
                    differs, expected, actual, error = _run(check, inst)
                except InvalidInstance:
                    report.skipped += 1
                    continue
                report.checks_run += 1
                report.per_check[name] = report.per_check.get(name, 0) + 1
                if differs:
                    witness, replays = shrink(check, inst)
                    report.discrepancies.append(Discrepancy(
                        pipeline=pipeline, check=name, iteration=i, instance=inst.describe(),
                        expected=_to_json(expected), actual=_to_json(actual), error=error,
                        witness=witness.describe(), replays=replays,
                    ))
                    if stop_after is not None and len(report.discrepancies) >= stop_after:
                        return report
    return report
