"""Markov decision process export of a scenario's decision diagram.

Read as an MDP, the diagram has one state per node: failure nodes are chance
states with a single action that branches to the children with the failure's
probability, attack nodes are choice states with two deterministic actions
(skip to the 0-child, or fire and pay the attack's cost moving to the
1-child), and the terminals are absorbing endpoints with the 1-terminal as
the reachability target. The graph is acyclic by construction.

This is an interoperability view only: the package never solves the MDP
itself (the front computation lives in :mod:`afta.pareto`). Costs are kept
nonnegative internally and negated into rewards at serialization time.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from types import MappingProxyType
from typing import Mapping

from .bdd import DecisionDiagram, TERM0, TERM1
from .model import QuantifiedScenario

__all__ = [
    "MdpTransition",
    "MdpModel",
    "to_mdp",
    "serialize_mdp",
    "policy_reach_prob",
]


@dataclass(frozen=True)
class MdpTransition:
    source: int
    action: int
    target: int
    probability: float
    cost: float


@dataclass(frozen=True)
class MdpModel:
    """States indexed by diagram refs; deterministic construction order."""

    states: tuple[int, ...]
    labels: Mapping[int, str]
    init: int
    target: int | None
    actions: Mapping[int, tuple[int, ...]]
    transitions: tuple[MdpTransition, ...]

    def state_name(self, ref: int) -> str:
        if ref == TERM0:
            return "T0"
        if ref == TERM1:
            return "T1"
        return f"{self.labels[ref]}_{ref}"


def to_mdp(diagram: DecisionDiagram, scenario: QuantifiedScenario) -> MdpModel:
    """Build the MDP view of a diagram representing ``scenario``."""
    refs = diagram.reachable_refs()
    fail_set = scenario.failure_set
    labels: dict[int, str] = {TERM0: "0", TERM1: "1"}
    actions: dict[int, tuple[int, ...]] = {}
    transitions: list[MdpTransition] = []
    for ref in refs:
        if ref <= 1:
            actions[ref] = ()
            continue
        node = diagram.nodes[ref]
        var = diagram.order[node.pos]  # type: ignore[union-attr]
        labels[ref] = var
        if var in fail_set:
            p = scenario.fail_prob[var]
            actions[ref] = (0,)
            transitions.append(MdpTransition(ref, 0, node.lo, 1.0 - p, 0.0))  # type: ignore[union-attr]
            transitions.append(MdpTransition(ref, 0, node.hi, p, 0.0))  # type: ignore[union-attr]
        else:
            cost = scenario.attack_cost[var]
            actions[ref] = (0, 1)
            transitions.append(MdpTransition(ref, 0, node.lo, 1.0, 0.0))  # type: ignore[union-attr]
            transitions.append(MdpTransition(ref, 1, node.hi, 1.0, cost))  # type: ignore[union-attr]
    totals: dict[tuple[int, int], float] = {}
    for t in transitions:
        key = (t.source, t.action)
        totals[key] = totals.get(key, 0.0) + t.probability
    for key, total in totals.items():
        # (1-p) + p is exact in binary64, so demand strict stochasticity.
        if total != 1.0:
            raise AssertionError(f"action {key} has outgoing probability {total!r}")
    return MdpModel(
        states=tuple(refs),
        labels=MappingProxyType(labels),
        init=diagram.root,
        target=TERM1 if TERM1 in actions else None,
        actions=MappingProxyType(actions),
        transitions=tuple(transitions),
    )


def _num(value: float) -> str:
    if value == math.inf:
        return "inf"
    if value == int(value) and abs(value) < 1e16:
        return str(int(value))
    return repr(value)


def _serialize_native(m: MdpModel) -> str:
    lines = [
        "mdp-native 1",
        f"states {len(m.states)}",
        f"init {m.state_name(m.init)}",
        f"target {m.state_name(m.target) if m.target is not None else 'none'}",
    ]
    for t in m.transitions:
        reward = "0" if t.cost == 0 else f"-{_num(t.cost)}"
        lines.append(
            f"{m.state_name(t.source)} {t.action} {m.state_name(t.target)} "
            f"{_num(t.probability)} {reward}"
        )
    return "\n".join(lines) + "\n"


def _serialize_checker(m: MdpModel) -> str:
    dense = {ref: i for i, ref in enumerate(m.states)}
    lines = ["mdp", ""]
    lines.append("// states: " + ", ".join(f"s={dense[r]}: {m.state_name(r)}" for r in m.states))
    lines.append("")
    lines.append("module main")
    lines.append(f"  s : [0..{len(m.states) - 1}] init {dense[m.init]};")
    lines.append("")
    by_source: dict[tuple[int, int], list[MdpTransition]] = {}
    for t in m.transitions:
        by_source.setdefault((t.source, t.action), []).append(t)
    fire_rewards: list[tuple[str, int, float]] = []
    for ref in m.states:
        for action in m.actions[ref]:
            group = by_source[(ref, action)]
            terms = " + ".join(f"{_num(t.probability)}:(s'={dense[t.target]})" for t in group)
            if len(m.actions[ref]) == 1:
                lines.append(f"  [] s={dense[ref]} -> {terms};")
            else:
                name = ("fire" if action == 1 else "skip") + f"_{dense[ref]}"
                lines.append(f"  [{name}] s={dense[ref]} -> {terms};")
                if action == 1:
                    fire_rewards.append((name, dense[ref], group[0].cost))
    lines.append("endmodule")
    lines.append("")
    if m.target is not None:
        lines.append(f'label "target" = s={dense[m.target]};')
    else:
        lines.append('label "target" = false;')
    lines.append("")
    lines.append('rewards "cost"')
    for name, state, cost in fire_rewards:
        lines.append(f"  [{name}] s={state} : {_num(cost)};")
    lines.append("endrewards")
    return "\n".join(lines) + "\n"


def serialize_mdp(m: MdpModel, format: str = "native") -> str:
    """Render the MDP as text.

    ``native``: header then one line per transition,
    ``source action target probability reward``, rewards being negated
    costs. ``checker``: a guarded-command module dialect understood by
    common probabilistic model checkers, with a labeled target state and a
    positive "cost" reward structure. Both renderings are byte-deterministic.
    """
    if format == "native":
        return _serialize_native(m)
    if format == "checker":
        return _serialize_checker(m)
    raise ValueError(f"unknown MDP format {format!r}")


def policy_reach_prob(
    diagram: DecisionDiagram, scenario: QuantifiedScenario, decisions: Mapping[int, int]
) -> float:
    """Probability of reaching the 1-terminal under a memoryless policy.

    ``decisions`` maps attack-node refs to bits (missing refs skip). Direct
    backward induction over the acyclic state graph; used to cross-check
    witness strategies against the MDP reading of the diagram.
    """
    value: dict[int, float] = {TERM0: 0.0, TERM1: 1.0}
    fail_set = scenario.failure_set
    for ref in diagram.reachable_refs():
        if ref <= 1:
            continue
        node = diagram.nodes[ref]
        var = diagram.order[node.pos]  # type: ignore[union-attr]
        if var in fail_set:
            p = scenario.fail_prob[var]
            value[ref] = (1.0 - p) * value[node.lo] + p * value[node.hi]  # type: ignore[union-attr]
        else:
            value[ref] = value[node.hi] if decisions.get(ref, 0) else value[node.lo]  # type: ignore[union-attr]
    return value[diagram.root]
