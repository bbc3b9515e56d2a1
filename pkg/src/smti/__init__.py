"""Stable matching with incomplete lists and bounded ties.

Two-stage approximate solver for the maximum-cardinality weakly stable
matching problem when preference ties have at most L members, plus an
exact oracle, a stability verifier, and an audit module that checks the
cost accounting behind the (2L-1)/(3L-2) cardinality guarantee on every
concrete run.
"""
from .audit import (
    AuditReport,
    CheckResult,
    Classification,
    Component,
    CostVector,
    EdgeTokens,
    check_all,
    classify,
    costs,
    decompose,
)
from .engine import ManState, Policy, ProposalGraph, Trace, TraceEvent, run_stage1
from .extract import extract_matching, saturation_set
from .instance import (
    Instance,
    Matching,
    ParseError,
    PersonId,
    Preference,
    build_matching,
    build_rank_tables,
    compare,
    gen_random,
    gen_tight,
    group_index,
    instance_key,
    observed_max_tie,
    parse_instance,
    parse_matching,
    serialize_instance,
    serialize_matching,
    tight_optimum,
    validate_instance,
)
from .matcher import SolveResult, StableMatcher, solve
from .oracle import brute_force_opt
from .stability import find_blocking_pairs, is_stable

__version__ = "0.1.0"

__all__ = [
    "AuditReport",
    "CheckResult",
    "Classification",
    "Component",
    "CostVector",
    "EdgeTokens",
    "Instance",
    "ManState",
    "Matching",
    "ParseError",
    "PersonId",
    "Policy",
    "Preference",
    "ProposalGraph",
    "SolveResult",
    "StableMatcher",
    "Trace",
    "TraceEvent",
    "brute_force_opt",
    "build_matching",
    "build_rank_tables",
    "check_all",
    "classify",
    "compare",
    "costs",
    "decompose",
    "extract_matching",
    "find_blocking_pairs",
    "gen_random",
    "gen_tight",
    "group_index",
    "instance_key",
    "is_stable",
    "observed_max_tie",
    "parse_instance",
    "parse_matching",
    "run_stage1",
    "saturation_set",
    "serialize_instance",
    "serialize_matching",
    "solve",
    "tight_optimum",
    "validate_instance",
    "__version__",
]
