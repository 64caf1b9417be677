"""Pareto fronts over (compromise probability, attacker cost).

Analysis values live in [0,1] x [0,inf]: the first coordinate is the
probability that the top event is compromised, the second the attacker's
cost (worst-case or expected, depending on the analysis mode). A point
dominates another when it is at least as likely to compromise and at most
as expensive.

Two front filters are used:

* ``pf`` keeps the points not strictly dominated by any other (the plain
  Pareto front, used for the worst-case-cost analysis);
* ``scpf`` additionally drops points on or below a segment between two kept
  points (the strictly convex front, used for the expected-cost analysis,
  whose interior points are realizable as mixtures of the vertices).

The bottom-up computation walks a decision diagram of the scenario's
structure function in reverse topological order. At a chance node (a
component failure) child fronts are combined pointwise with the branch
weights; at a choice node (an attack step) the skip-branch front is united
with the attack-branch front shifted by the attack cost. Every kept point
carries a back-pointer into its children, which is what witness extraction
follows.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from types import MappingProxyType
from typing import Iterable, Mapping, NamedTuple, Sequence

from . import model as _model
from .bdd import TERM0, TERM1, DecisionDiagram
from .model import QuantifiedScenario

__all__ = [
    "ParetoPoint",
    "Front",
    "dominates",
    "pf",
    "scpf",
    "chance_mix_max",
    "chance_mix_expected",
    "chance_combine_max",
    "chance_combine_expected",
    "choice_combine",
    "NodeFront",
    "ChanceBack",
    "ChoiceBack",
    "AnnotatedFront",
    "WitnessStrategy",
    "pmc",
    "pec",
    "extract_witness",
    "prune_front",
    "front_to_jsonable",
    "front_to_csv",
]

_HULL_TOL = 1e-12


class ParetoPoint(NamedTuple):
    prob: float
    cost: float


#: A front: cost-ascending tuple of pairwise incomparable points.
Front = tuple[ParetoPoint, ...]


def dominates(a: ParetoPoint, b: ParetoPoint) -> bool:
    """True iff ``a`` is at least as good as ``b`` in both coordinates."""
    return a.cost <= b.cost and a.prob >= b.prob


def _pf_indexed(points: Sequence[ParetoPoint]) -> tuple[list[ParetoPoint], list[int]]:
    ranked = sorted(range(len(points)), key=lambda i: (points[i].cost, -points[i].prob, i))
    kept: list[ParetoPoint] = []
    kept_at: list[int] = []
    best = -1.0
    for i in ranked:
        d = points[i]
        if d.prob > best:
            kept.append(d)
            kept_at.append(i)
            best = d.prob
    return kept, kept_at


def pf(points: Iterable[ParetoPoint]) -> Front:
    """Undominated points, duplicates collapsed, sorted by ascending cost."""
    pts = [ParetoPoint(*p) for p in points]
    kept, _ = _pf_indexed(pts)
    return tuple(kept)


def _cross(o: ParetoPoint, a: ParetoPoint, b: ParetoPoint, cost_scale: float) -> float:
    # Orientation of o -> a -> b in the (cost, prob) plane, costs normalized.
    return ((a.cost - o.cost) / cost_scale) * (b.prob - o.prob) - (a.prob - o.prob) * (
        (b.cost - o.cost) / cost_scale
    )


def _scpf_indexed(points: Sequence[ParetoPoint]) -> tuple[list[ParetoPoint], list[int]]:
    pts, kept_at = _pf_indexed(points)
    n_finite = sum(1 for d in pts if math.isfinite(d.cost))  # pf is cost-ascending: a prefix
    cost_scale = max((pts[k].cost for k in range(n_finite)), default=0.0)
    if cost_scale <= 0.0:
        cost_scale = 1.0
    stack: list[int] = []
    for k in range(n_finite):
        d = pts[k]
        while len(stack) >= 2 and _cross(pts[stack[-2]], pts[stack[-1]], d, cost_scale) >= -_HULL_TOL:
            stack.pop()
        stack.append(k)
    stack.extend(range(n_finite, len(pts)))  # at most one infinite-cost survivor
    return [pts[k] for k in stack], [kept_at[k] for k in stack]


def scpf(points: Iterable[ParetoPoint]) -> Front:
    """Vertices of the lower-right convex hull of the undominated points.

    Points lying on the segment between two kept points are dropped: they are
    matched by a mixture of the endpoints, so they are not strictly better
    than what the kept set already offers.
    """
    pts = [ParetoPoint(*p) for p in points]
    kept, _ = _scpf_indexed(pts)
    return tuple(kept)


def _weighted(weight: float, cost: float) -> float:
    # A probability-zero branch contributes nothing, even at infinite cost.
    return 0.0 if weight == 0.0 else weight * cost


def chance_mix_max(lo: ParetoPoint, hi: ParetoPoint, p: float) -> ParetoPoint:
    """Combine branch outcomes of a failure: mix probabilities, keep the worst cost.

    ``lo`` is the no-failure branch (weight 1-p), ``hi`` the failure branch
    (weight p).
    """
    return ParetoPoint((1.0 - p) * lo.prob + p * hi.prob, max(lo.cost, hi.cost))


def chance_mix_expected(lo: ParetoPoint, hi: ParetoPoint, p: float) -> ParetoPoint:
    """Like :func:`chance_mix_max` but cost averages with the branch weights."""
    return ParetoPoint(
        (1.0 - p) * lo.prob + p * hi.prob,
        _weighted(1.0 - p, lo.cost) + _weighted(p, hi.cost),
    )


def chance_combine_max(lo_front: Sequence[ParetoPoint], hi_front: Sequence[ParetoPoint], p: float) -> list[ParetoPoint]:
    """All pairwise worst-case combinations of two branch fronts (pre-filter)."""
    return [chance_mix_max(d0, d1, p) for d0 in lo_front for d1 in hi_front]


def chance_combine_expected(lo_front: Sequence[ParetoPoint], hi_front: Sequence[ParetoPoint], p: float) -> list[ParetoPoint]:
    """All pairwise expected-cost combinations of two branch fronts (pre-filter)."""
    return [chance_mix_expected(d0, d1, p) for d0 in lo_front for d1 in hi_front]


def choice_combine(skip_front: Sequence[ParetoPoint], attack_front: Sequence[ParetoPoint], cost: float) -> list[ParetoPoint]:
    """Outcomes available at an attack step: skip, or attack and pay ``cost``."""
    shifted = [ParetoPoint(d.prob, d.cost + cost) for d in attack_front]
    return list(skip_front) + shifted


class ChanceBack(NamedTuple):
    """Back-pointer at a failure node: which child points produced this one."""

    lo_index: int
    hi_index: int


class ChoiceBack(NamedTuple):
    """Back-pointer at an attack node: the decision bit and the child point."""

    bit: int
    index: int


@dataclass(frozen=True)
class NodeFront:
    """Per-node analysis record.

    ``candidates`` is the combined (pre-filter) point set in deterministic
    generation order with exact duplicates collapsed; ``points`` the kept
    front; ``back`` one back-pointer per kept point (``None`` on terminals).
    """

    candidates: Front
    points: Front
    back: tuple[ChanceBack | ChoiceBack | None, ...]


@dataclass(frozen=True)
class AnnotatedFront:
    """Result of a bottom-up front computation over a decision diagram."""

    mode: str  # "max" or "expected"
    diagram: DecisionDiagram
    scenario: QuantifiedScenario
    table: Mapping[int, NodeFront]

    @property
    def front(self) -> Front:
        return self.table[self.diagram.root].points

    @property
    def root_candidates(self) -> Front:
        return self.table[self.diagram.root].candidates

    def max_front_size(self) -> int:
        return max(len(nf.points) for nf in self.table.values())


def _dedup(
    points: Sequence[ParetoPoint], provenance: Sequence[ChanceBack | ChoiceBack]
) -> tuple[list[ParetoPoint], list[ChanceBack | ChoiceBack]]:
    seen: set[ParetoPoint] = set()
    pts: list[ParetoPoint] = []
    prov: list[ChanceBack | ChoiceBack] = []
    for d, b in zip(points, provenance):
        if d in seen:
            continue
        seen.add(d)
        pts.append(d)
        prov.append(b)
    return pts, prov


_TERMINAL_FRONTS = {
    TERM0: NodeFront((ParetoPoint(0.0, 0.0),), (ParetoPoint(0.0, 0.0),), (None,)),
    TERM1: NodeFront((ParetoPoint(1.0, 0.0),), (ParetoPoint(1.0, 0.0),), (None,)),
}


def _annotate(
    diagram: DecisionDiagram,
    scenario: QuantifiedScenario,
    mode: str,
    epsilon: float = 0.0,
) -> AnnotatedFront:
    _model.check_order(scenario, diagram.order)
    fail_set = scenario.failure_set
    combine = chance_combine_max if mode == "max" else chance_combine_expected
    select = _pf_indexed if mode == "max" else _scpf_indexed
    table: dict[int, NodeFront] = {}
    for ref in diagram.reachable_refs():
        if ref in (TERM0, TERM1):
            table[ref] = _TERMINAL_FRONTS[ref]
            continue
        node = diagram.nodes[ref]
        var = diagram.order[node.pos]
        lo_pts = table[node.lo].points
        hi_pts = table[node.hi].points
        prov: list[ChanceBack | ChoiceBack]
        if var in fail_set:
            raw = combine(lo_pts, hi_pts, scenario.fail_prob[var])
            prov = [ChanceBack(i, j) for i in range(len(lo_pts)) for j in range(len(hi_pts))]
        else:
            raw = choice_combine(lo_pts, hi_pts, scenario.attack_cost[var])
            prov = [ChoiceBack(0, i) for i in range(len(lo_pts))]
            prov += [ChoiceBack(1, j) for j in range(len(hi_pts))]
        cands, cprov = _dedup(raw, prov)
        pts, kept = select(cands)
        if epsilon > 0.0:
            pts, kept_local = _prune_indexed(pts, epsilon)
            kept = [kept[k] for k in kept_local]
        table[ref] = NodeFront(tuple(cands), tuple(pts), tuple(cprov[k] for k in kept))
    return AnnotatedFront(mode, diagram, scenario, MappingProxyType(table))


def pmc(diagram: DecisionDiagram, scenario: QuantifiedScenario, epsilon: float = 0.0) -> AnnotatedFront:
    """Pareto front of (compromise probability, worst-case attacker cost).

    Bottom-up over the diagram, one front per node, shared nodes computed
    once. The root front is exact for ``epsilon == 0``.
    """
    return _annotate(diagram, scenario, "max", epsilon)


def pec(diagram: DecisionDiagram, scenario: QuantifiedScenario, epsilon: float = 0.0) -> AnnotatedFront:
    """Strictly convex front of (compromise probability, expected attacker cost).

    Same recursion as :func:`pmc` with expectation in the cost coordinate and
    the convex filter at every node. Points between adjacent vertices are
    realizable by mixing the vertex strategies.
    """
    return _annotate(diagram, scenario, "expected", epsilon)


def _close(a: float, b: float, eps: float) -> bool:
    if a == b:
        return True
    if math.isinf(a) or math.isinf(b):
        return False
    return abs(a - b) <= eps * max(1.0, abs(a), abs(b))


def _prune_indexed(points: Sequence[ParetoPoint], eps: float) -> tuple[list[ParetoPoint], list[int]]:
    if len(points) <= 1:
        return list(points), list(range(len(points)))
    kept = [points[0]]
    kept_at = [0]
    for k in range(1, len(points)):
        d = points[k]
        last = kept[-1]
        if _close(d.prob, last.prob, eps) and _close(d.cost, last.cost, eps):
            continue
        kept.append(d)
        kept_at.append(k)
    return kept, kept_at


def prune_front(front: Sequence[ParetoPoint], eps: float) -> Front:
    """Opt-in approximation: drop points within relative ``eps`` of the
    previously kept one in both coordinates."""
    if eps <= 0.0:
        return tuple(ParetoPoint(*d) for d in front)
    kept, _ = _prune_indexed([ParetoPoint(*d) for d in front], eps)
    return tuple(kept)


@dataclass(frozen=True)
class WitnessStrategy:
    """A strategy realizing one point of an annotated front.

    ``decisions`` maps each attack-labeled diagram node reached under the
    witness to its bit (1 = attack). ``attacks`` lists the attack steps fired
    on at least one branch. ``table``, present when the scenario has at most
    16 failures, spells the induced behavior out: one row per failure vector
    (bits follow the diagram's variable order restricted to failures) with
    the set of attacks fired on that outcome.

    For expected-cost fronts only the vertices are realizable by a single
    strategy; interior points of the front correspond to randomized mixtures
    of adjacent vertex witnesses.
    """

    point: ParetoPoint
    mode: str
    decisions: Mapping[int, int]
    attacks: frozenset[str]
    table: tuple[tuple[tuple[int, ...], frozenset[str]], ...] | None


_TABLE_LIMIT = 16


def _decompositions(
    annotated: AnnotatedFront, ref: int, k: int
) -> list[ChanceBack | ChoiceBack]:
    """Every way to realize kept point ``k`` of node ``ref`` from kept child
    points, recorded back-pointer first.

    Re-combining child points repeats the exact float operations that
    generated the candidates, so value comparison is reliable.
    """
    diagram = annotated.diagram
    scenario = annotated.scenario
    node = diagram.nodes[ref]
    var = diagram.order[node.pos]
    target = annotated.table[ref].points[k]
    recorded = annotated.table[ref].back[k]
    lo_pts = annotated.table[node.lo].points
    hi_pts = annotated.table[node.hi].points
    out: list[ChanceBack | ChoiceBack] = [recorded]
    if var in scenario.failure_set:
        mix = chance_mix_max if annotated.mode == "max" else chance_mix_expected
        p = scenario.fail_prob[var]
        for i, lo in enumerate(lo_pts):
            for j, hi in enumerate(hi_pts):
                if ChanceBack(i, j) != recorded and mix(lo, hi, p) == target:
                    out.append(ChanceBack(i, j))
    else:
        cost = scenario.attack_cost[var]
        for i, d in enumerate(lo_pts):
            if ChoiceBack(0, i) != recorded and d == target:
                out.append(ChoiceBack(0, i))
        for j, d in enumerate(hi_pts):
            shifted = ParetoPoint(d.prob, d.cost + cost)
            if ChoiceBack(1, j) != recorded and shifted == target:
                out.append(ChoiceBack(1, j))
    return out


def _assign_points(annotated: AnnotatedFront, point_index: int) -> dict[int, ChanceBack | ChoiceBack]:
    """Choose one realization per reached node, consistent across shared nodes.

    A node reachable along several paths must realize the same point on all
    of them for a per-node decision map to exist. The recorded back-pointers
    usually already agree; when equal-valued alternatives were recorded
    divergently, backtrack over the other decompositions of the same values.
    """
    diagram = annotated.diagram
    chosen: dict[int, int] = {}
    selected: dict[int, ChanceBack | ChoiceBack] = {}

    def assign(ref: int, k: int) -> bool:
        if ref in (TERM0, TERM1):
            return True
        prior = chosen.get(ref)
        if prior is not None:
            return prior == k
        node = diagram.nodes[ref]
        chosen[ref] = k
        for back in _decompositions(annotated, ref, k):
            selected[ref] = back
            undo_chosen = dict(chosen)
            undo_selected = dict(selected)
            if isinstance(back, ChanceBack):
                ok = assign(node.lo, back.lo_index) and assign(node.hi, back.hi_index)
            else:
                ok = assign(node.hi if back.bit else node.lo, back.index)
            if ok:
                return True
            chosen.clear()
            chosen.update(undo_chosen)
            selected.clear()
            selected.update(undo_selected)
            del selected[ref]
        del chosen[ref]
        return False

    if not assign(diagram.root, point_index):
        raise RuntimeError(
            f"no history-independent realization found for front point {point_index}"
        )
    return selected


def extract_witness(annotated: AnnotatedFront, point_index: int) -> WitnessStrategy:
    """Realize one root front point as a per-node decision map.

    Follows back-pointers from the root point down to the terminals; every
    reached choice node contributes a decision bit. Shared nodes reached
    along several paths are resolved to a single point, backtracking across
    equal-valued decompositions where necessary.
    """
    diagram = annotated.diagram
    scenario = annotated.scenario
    root_front = annotated.front
    if not 0 <= point_index < len(root_front):
        raise IndexError(
            f"point index {point_index} out of range for a front of {len(root_front)} points"
        )
    decisions = {
        ref: back.bit
        for ref, back in _assign_points(annotated, point_index).items()
        if isinstance(back, ChoiceBack)
    }

    attacks = frozenset(
        diagram.order[diagram.nodes[ref].pos] for ref, bit in decisions.items() if bit == 1
    )
    table = None
    ordered_failures = [v for v in diagram.order if v in scenario.failure_set]
    if len(ordered_failures) <= _TABLE_LIMIT:
        rows = []
        for mask in range(1 << len(ordered_failures)):
            bits = tuple(
                (mask >> (len(ordered_failures) - 1 - i)) & 1 for i in range(len(ordered_failures))
            )
            valuation = dict(zip(ordered_failures, bits))
            fired: set[str] = set()
            ref = diagram.root
            while ref not in (TERM0, TERM1):
                node = diagram.nodes[ref]
                var = diagram.order[node.pos]
                if var in scenario.failure_set:
                    bit = valuation[var]
                else:
                    bit = decisions.get(ref, 0)
                    if bit:
                        fired.add(var)
                ref = node.hi if bit else node.lo
            rows.append((bits, frozenset(fired)))
        table = tuple(rows)
    return WitnessStrategy(
        point=root_front[point_index],
        mode=annotated.mode,
        decisions=MappingProxyType(decisions),
        attacks=attacks,
        table=table,
    )


def front_to_jsonable(front: Sequence[ParetoPoint]) -> list[dict[str, object]]:
    """JSON-ready form: cost ``inf`` becomes the string ``"inf"``."""
    return [
        {"prob": d.prob, "cost": "inf" if d.cost == math.inf else d.cost} for d in front
    ]


def front_to_csv(front: Sequence[ParetoPoint]) -> str:
    """CSV with a ``prob,cost`` header, one point per line."""
    lines = ["prob,cost"]
    for d in front:
        cost = "inf" if d.cost == math.inf else repr(d.cost)
        lines.append(f"{d.prob!r},{cost}")
    return "\n".join(lines) + "\n"
