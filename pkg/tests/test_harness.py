import random

import pytest

from multisparql.datalog import parse_atom, parse_program
from multisparql.harness import (
    FAULTS,
    FuzzConfig,
    gen_graph,
    gen_normalized_program,
    gen_pattern,
    gen_program,
    inject,
    run_equivalence_campaign,
    shrink,
)
from multisparql.harness import campaign
from multisparql.harness.campaign import (
    DatalogInstance,
    MraInstance,
    SparqlInstance,
    check_sparql_datalog,
    check_w3c_core,
    iteration_rng,
)
from multisparql import mra
from multisparql.datalog import check_normal_form
from multisparql.patterns import Opt, Union_, children, is_core, is_well_formed, parse_pattern
from multisparql.rdf import parse_graph
from multisparql.translate import sparql_datalog

CHECKS = {
    "sparql-datalog": campaign.check_sparql_datalog,
    "sparql-mra": campaign.check_sparql_mra,
    "w3c-core": campaign.check_w3c_core,
    "datalog-sparql": campaign.check_datalog_sparql,
    "datalog-mra": campaign.check_datalog_mra,
    "mra-datalog": campaign.check_mra_datalog,
    "normalize": campaign.check_normalize,
    "derivation-trees": campaign.check_derivation_trees,
}


def walk(p):
    yield p
    for q in children(p):
        yield from walk(q)


def rebuild(witness: dict):
    """Instance back from its textual description."""
    if "pattern" in witness:
        return SparqlInstance(parse_graph(witness["graph"]), parse_pattern(witness["pattern"]))
    if "program" in witness:
        return DatalogInstance(parse_program(witness["program"]), parse_atom(witness["goal"]))
    db = mra.parse_database(witness["db"])
    return MraInstance(mra.parse_expr(witness["expr"]), tuple(sorted(db.items())))


def test_config_rejects_bad_bounds():
    with pytest.raises(ValueError):
        FuzzConfig(iterations=0)
    with pytest.raises(ValueError):
        FuzzConfig(max_triples=-1)


def test_generators_are_deterministic():
    cfg = FuzzConfig(max_pattern_depth=4)
    a, b = random.Random(7), random.Random(7)
    assert gen_graph(cfg, a) == gen_graph(cfg, b)
    assert gen_pattern(cfg, a, "w3c") == gen_pattern(cfg, b, "w3c")
    assert gen_program(cfg, a) == gen_program(cfg, b)


def test_iteration_rng_depends_only_on_seed_and_index():
    assert iteration_rng(3, 5).random() == iteration_rng(3, 5).random()
    assert iteration_rng(3, 5).random() != iteration_rng(3, 6).random()


def test_graph_respects_size_bound():
    cfg = FuzzConfig(max_triples=5)
    rng = random.Random(0)
    assert all(len(gen_graph(cfg, rng)) <= 5 for _ in range(200))


def test_core_patterns_are_core_and_well_formed():
    cfg = FuzzConfig(max_pattern_depth=4)
    rng = random.Random(1)
    for _ in range(300):
        p = gen_pattern(cfg, rng, "core")
        assert is_core(p) and is_well_formed(p)


def test_zero_weight_disables_an_operator():
    cfg = FuzzConfig(max_pattern_depth=4)
    cfg.weights["union"] = 0
    cfg.weights["opt"] = 0
    rng = random.Random(2)
    for _ in range(300):
        p = gen_pattern(cfg, rng, "w3c")
        assert not any(isinstance(q, (Union_, Opt)) for q in walk(p))


def test_normalized_programs_respect_bounds():
    cfg = FuzzConfig()
    rng = random.Random(4)
    for _ in range(200):
        prog, goal = gen_normalized_program(cfg, rng)
        assert not check_normal_form(prog)
        assert len(prog.rules) <= cfg.max_rules
        assert sum(n for _, n in prog.facts) <= cfg.max_fact_copies
        assert goal.is_pure()


def test_campaign_is_byte_identical_for_a_seed():
    cfg = FuzzConfig(seed=11, iterations=15, pipeline="all")
    assert run_equivalence_campaign(cfg).dumps() == run_equivalence_campaign(cfg).dumps()


def test_clean_campaign_over_all_pipelines():
    report = run_equivalence_campaign(FuzzConfig(seed=5, iterations=40, pipeline="all", max_pattern_depth=4))
    assert report.clean, report.discrepancies[:1]
    assert report.checks_run > 200


def test_unknown_pipeline():
    with pytest.raises(ValueError):
        run_equivalence_campaign(FuzzConfig(pipeline="nope"))


def test_inject_restores_the_original():
    before = sparql_datalog.comp_rules
    with inject("drop-comp-rule"):
        assert sparql_datalog.comp_rules is not before
        assert len(sparql_datalog.comp_rules()) == 3
    assert sparql_datalog.comp_rules is before


def test_shrink_reaches_a_small_witness():
    g = parse_graph("<a> <p> <b> .\n<c> <p> <d> .\n<a> <q> <b> .\n<e> <q> <e> .\n")
    p = parse_pattern("({?x <p> ?y} UNION {?z <q> ?w}) AND {?x <q> ?y}")
    with inject("swap-null-padding"):
        inst = SparqlInstance(g, p)
        assert campaign._run(check_sparql_datalog, inst)[0]
        small, replays = shrink(check_sparql_datalog, inst)
        assert replays <= 500
        assert len(small.graph) < len(g)
        assert campaign._run(check_sparql_datalog, small)[0]


@pytest.mark.parametrize("name", ["drop-comp-rule", "swap-null-padding", "drop-normalization-case", "off-by-one-union"])
def test_fault_is_detected_with_replayable_witness(name):
    fault = FAULTS[name]
    cfg = FuzzConfig(seed=0, iterations=500, pipeline=fault.pipeline, max_pattern_depth=4)
    with inject(name):
        report = run_equivalence_campaign(cfg, stop_after=1)
    assert not report.clean
    d = report.discrepancies[0]
    assert d.replays <= 500
    inst = rebuild(d.witness)
    with inject(name):
        assert campaign._run(CHECKS[d.check], inst)[0]
    # a clean run of the same campaign finds nothing
    assert run_equivalence_campaign(FuzzConfig(seed=0, iterations=d.iteration + 1, pipeline=fault.pipeline,
                                               max_pattern_depth=4)).clean


def test_to_core_check_passes_on_opt():
    g = parse_graph("<a> <p> <b> .\n<b> <q> <c> .\n")
    p = parse_pattern("{?x <p> ?y} OPT ({?y <q> ?z} FILTER (?z = <c>))")
    expected, actual = check_w3c_core(SparqlInstance(g, p))
    assert expected == actual
