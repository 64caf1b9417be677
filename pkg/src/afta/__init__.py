"""Pareto analysis of attack-fault trees.

The package computes two Pareto fronts for systems whose compromise
condition mixes random component failures with deliberate attacker steps:
compromise probability against worst-case attacker cost, and against
expected attacker cost.  Analysis runs over a reduced ordered binary
decision diagram of the structure function; a brute-force strategy
enumerator provides an independent cross-check on small instances.
"""

from .bdd import (
    DecisionDiagram,
    Fobdd,
    Robdd,
    TERM0,
    TERM1,
    build_robdd,
    expand_fobdd,
    isomorphic,
    reduce_fobdd,
    robdd_eval,
    to_dot,
)
from .errors import ModelError, OrderConflictError, ResourceLimitError
from .mdp import MdpModel, MdpTransition, policy_reach_prob, serialize_mdp, to_mdp
from .model import (
    Assignment,
    AttackFaultTree,
    GateKind,
    Node,
    QuantifiedScenario,
    check_order,
    eval_structure,
    linearize,
    parse_model,
    precedes,
    serialize_model,
)
from .oracle import (
    PureStrategy,
    ScenarioView,
    compose_at_failure,
    enumerate_strategies,
    lift_attack,
    metric_points_expected,
    metric_points_max,
    oracle_pec,
    oracle_pmc,
    restrict_attack,
    restrict_failure,
    strategy_count,
    strategy_exp_cost,
    strategy_from_witness,
    strategy_max_cost,
    strategy_metrics,
    strategy_prob,
    view_of,
)
from .pareto import (
    AnnotatedFront,
    ParetoPoint,
    WitnessStrategy,
    dominates,
    extract_witness,
    front_to_csv,
    front_to_jsonable,
    pec,
    pf,
    pmc,
    prune_front,
    scpf,
)

__version__ = "0.1.0"

__all__ = [
    "AnnotatedFront",
    "Assignment",
    "AttackFaultTree",
    "DecisionDiagram",
    "Fobdd",
    "GateKind",
    "MdpModel",
    "MdpTransition",
    "ModelError",
    "Node",
    "OrderConflictError",
    "ParetoPoint",
    "PureStrategy",
    "QuantifiedScenario",
    "ResourceLimitError",
    "Robdd",
    "ScenarioView",
    "TERM0",
    "TERM1",
    "WitnessStrategy",
    "build_robdd",
    "check_order",
    "compose_at_failure",
    "dominates",
    "enumerate_strategies",
    "eval_structure",
    "expand_fobdd",
    "extract_witness",
    "front_to_csv",
    "front_to_jsonable",
    "isomorphic",
    "lift_attack",
    "linearize",
    "metric_points_expected",
    "metric_points_max",
    "oracle_pec",
    "oracle_pmc",
    "parse_model",
    "pec",
    "pf",
    "pmc",
    "policy_reach_prob",
    "precedes",
    "prune_front",
    "reduce_fobdd",
    "restrict_attack",
    "restrict_failure",
    "robdd_eval",
    "scpf",
    "serialize_mdp",
    "serialize_model",
    "strategy_count",
    "strategy_exp_cost",
    "strategy_from_witness",
    "strategy_max_cost",
    "strategy_metrics",
    "strategy_prob",
    "to_dot",
    "to_mdp",
    "view_of",
]
