"""Random generators and the differential equivalence campaign."""
from .campaign import PIPELINES, CampaignReport, Discrepancy, run_equivalence_campaign, shrink
from .faults import FAULTS, inject
from .generators import (
    FuzzConfig,
    gen_condition,
    gen_constraint,
    gen_database,
    gen_expr,
    gen_graph,
    gen_normalized_program,
    gen_pattern,
    gen_program,
)

__all__ = [
    "FAULTS", "PIPELINES", "CampaignReport", "Discrepancy", "FuzzConfig", "gen_condition", "gen_constraint", "gen_database",
    "gen_expr", "gen_graph", "gen_normalized_program", "gen_pattern", "gen_program",
    "inject", "run_equivalence_campaign", "shrink",
]
