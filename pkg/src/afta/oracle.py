"""Brute-force reference semantics: enumerate strategies, evaluate them by
exhaustive summation, and compute fronts by definition.

This module is the ground truth the analytic pipeline is tested against. A
pure strategy fixes, for every attack step, one decision bit per observable
failure outcome; its compromise probability and costs are computed by
summing over all failure vectors. Front computation here is nothing but
"evaluate every strategy, then filter", which is exponential and guarded by
an explicit limit: an incomplete oracle would be worse than none.

The module also hosts the strategy composition maps used to cut a scenario
at a minimal leaf (fixing a failure's outcome or an attack's decision) and
to stitch strategies of the two reduced scenarios back together; the
decomposition identities they satisfy are part of the property-test suite.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Callable, Iterator, Mapping

from . import model as _model
from .bdd import DecisionDiagram, TERM0, TERM1
from .errors import ResourceLimitError
from .model import QuantifiedScenario
from .pareto import Front, ParetoPoint, WitnessStrategy, pf, scpf

__all__ = [
    "DEFAULT_STRATEGY_LIMIT",
    "PureStrategy",
    "ScenarioView",
    "view_of",
    "restrict_failure",
    "restrict_attack",
    "strategy_count",
    "enumerate_strategies",
    "strategy_prob",
    "strategy_max_cost",
    "strategy_exp_cost",
    "strategy_metrics",
    "metric_points_max",
    "metric_points_expected",
    "oracle_pmc",
    "oracle_pec",
    "compose_at_failure",
    "lift_attack",
    "strategy_from_witness",
]

DEFAULT_STRATEGY_LIMIT = 1 << 24


@dataclass(frozen=True)
class PureStrategy:
    """One decision table per attack step.

    The table for attack ``a`` has one bit per valuation of the failures
    ``a`` observes, indexed with the observed failures sorted in
    linearization order, first failure as the most significant bit.
    """

    tables: Mapping[str, tuple[int, ...]]


@dataclass(frozen=True)
class ScenarioView:
    """A scenario reduced to what the oracle needs.

    Unlike :class:`~afta.model.QuantifiedScenario`, a view's structure
    function is an opaque callable, so views stay closed under fixing a leaf:
    restriction wraps the callable instead of rewriting the tree.
    """

    failures: tuple[str, ...]  # linearization order
    attacks: tuple[str, ...]  # linearization order
    observed: Mapping[str, frozenset[str]]
    fail_prob: Mapping[str, float]
    attack_cost: Mapping[str, float]
    evaluate: Callable[[Mapping[str, bool]], bool]


def view_of(scenario: QuantifiedScenario) -> ScenarioView:
    lin = _model.linearize(scenario)
    aft = scenario.aft
    return ScenarioView(
        failures=tuple(v for v in lin if v in scenario.failure_set),
        attacks=tuple(v for v in lin if v in scenario.attack_set),
        observed=dict(scenario.observed),
        fail_prob=dict(scenario.fail_prob),
        attack_cost=dict(scenario.attack_cost),
        evaluate=lambda valuation: _model.eval_structure(aft, valuation),
    )


def _as_view(obj: QuantifiedScenario | ScenarioView) -> ScenarioView:
    return obj if isinstance(obj, ScenarioView) else view_of(obj)


def restrict_failure(view: ScenarioView, f: str, bit: int) -> ScenarioView:
    """The scenario with failure ``f`` pinned to ``bit`` and removed."""
    if f not in view.fail_prob:
        raise ValueError(f"unknown failure {f!r}")
    base = view.evaluate
    return ScenarioView(
        failures=tuple(g for g in view.failures if g != f),
        attacks=view.attacks,
        observed={a: q - {f} for a, q in view.observed.items()},
        fail_prob={g: p for g, p in view.fail_prob.items() if g != f},
        attack_cost=view.attack_cost,
        evaluate=lambda valuation, _f=f, _b=bool(bit): base({**valuation, _f: _b}),
    )


def restrict_attack(view: ScenarioView, a: str, bit: int) -> ScenarioView:
    """The scenario with attack ``a`` pinned to ``bit`` and removed."""
    if a not in view.attack_cost:
        raise ValueError(f"unknown attack {a!r}")
    base = view.evaluate
    return ScenarioView(
        failures=view.failures,
        attacks=tuple(b for b in view.attacks if b != a),
        observed={b: q for b, q in view.observed.items() if b != a},
        fail_prob=view.fail_prob,
        attack_cost={b: c for b, c in view.attack_cost.items() if b != a},
        evaluate=lambda valuation, _a=a, _b=bool(bit): base({**valuation, _a: _b}),
    )


def _observed_vars(view: ScenarioView, a: str) -> list[str]:
    q = view.observed[a]
    return [f for f in view.failures if f in q]


def strategy_count(view: QuantifiedScenario | ScenarioView) -> int:
    view = _as_view(view)
    return 1 << sum(1 << len(view.observed[a]) for a in view.attacks)


def enumerate_strategies(
    view: QuantifiedScenario | ScenarioView, limit: int = DEFAULT_STRATEGY_LIMIT
) -> Iterator[PureStrategy]:
    """Yield every pure strategy exactly once, lexicographically (first
    attack's table changes slowest). Raises
    :class:`~afta.errors.ResourceLimitError` up front when the count exceeds
    ``limit``."""
    view = _as_view(view)
    count = strategy_count(view)
    if count > limit:
        raise ResourceLimitError(
            f"{count} strategies exceed the enumeration limit of {limit}", count=count
        )
    per_attack = [
        list(itertools.product((0, 1), repeat=1 << len(view.observed[a])))
        for a in view.attacks
    ]
    for combo in itertools.product(*per_attack):
        yield PureStrategy(tables=dict(zip(view.attacks, combo)))


class _Grid:
    """Precomputed per-failure-vector data shared by the metric loops."""

    MAX_FAILURES = 20

    def __init__(self, view: ScenarioView):
        self.view = view
        n = len(view.failures)
        if n > self.MAX_FAILURES:
            raise ResourceLimitError(
                f"exhaustive evaluation over {n} failure variables needs "
                f"2^{n} outcome rows",
                count=1 << n,
            )
        self.rows: list[tuple[float, dict[str, bool], tuple[int, ...]]] = []
        obs_positions = [
            [i for i, f in enumerate(view.failures) if f in view.observed[a]]
            for a in view.attacks
        ]
        for mask in range(1 << n):
            bits = [(mask >> (n - 1 - i)) & 1 for i in range(n)]
            prob = 1.0
            for f, bit in zip(view.failures, bits):
                p = view.fail_prob[f]
                prob *= p if bit else 1.0 - p
            valuation = {f: bool(bit) for f, bit in zip(view.failures, bits)}
            indices = tuple(
                _bits_to_index([bits[i] for i in positions]) for positions in obs_positions
            )
            self.rows.append((prob, valuation, indices))
        self.phi_cache: dict[tuple[int, tuple[int, ...]], bool] = {}

    def compromised(self, row: int, fired: tuple[int, ...]) -> bool:
        key = (row, fired)
        hit = self.phi_cache.get(key)
        if hit is None:
            _, valuation, _ = self.rows[row]
            full = dict(valuation)
            for a, bit in zip(self.view.attacks, fired):
                full[a] = bool(bit)
            hit = self.view.evaluate(full)
            self.phi_cache[key] = hit
        return hit


def _bits_to_index(bits: list[int]) -> int:
    idx = 0
    for b in bits:
        idx = (idx << 1) | b
    return idx


def _metrics_on_grid(grid: _Grid, strategy: PureStrategy) -> tuple[float, float, float]:
    view = grid.view
    tables = [strategy.tables[a] for a in view.attacks]
    costs = [view.attack_cost[a] for a in view.attacks]
    prob_terms: list[float] = []
    exp_terms: list[float] = []
    max_cost = 0.0
    for row, (p, _valuation, indices) in enumerate(grid.rows):
        fired = tuple(table[idx] for table, idx in zip(tables, indices))
        cost = 0.0
        for c, bit in zip(costs, fired):
            if bit:
                cost += c
        if cost > max_cost:
            # Worst-case cost counts every outcome, probability-zero ones included.
            max_cost = cost
        if p == 0.0:
            continue
        exp_terms.append(p * cost)
        if grid.compromised(row, fired):
            prob_terms.append(p)
    return math.fsum(prob_terms), max_cost, math.fsum(exp_terms)


def strategy_metrics(
    view: QuantifiedScenario | ScenarioView, strategy: PureStrategy
) -> tuple[float, float, float]:
    """(compromise probability, worst-case cost, expected cost) of a strategy."""
    return _metrics_on_grid(_Grid(_as_view(view)), strategy)


def strategy_prob(view: QuantifiedScenario | ScenarioView, strategy: PureStrategy) -> float:
    return strategy_metrics(view, strategy)[0]


def strategy_max_cost(view: QuantifiedScenario | ScenarioView, strategy: PureStrategy) -> float:
    return strategy_metrics(view, strategy)[1]


def strategy_exp_cost(view: QuantifiedScenario | ScenarioView, strategy: PureStrategy) -> float:
    return strategy_metrics(view, strategy)[2]


def metric_points_max(
    view: QuantifiedScenario | ScenarioView, limit: int = DEFAULT_STRATEGY_LIMIT
) -> list[ParetoPoint]:
    """The multiset of (probability, worst-case cost) over all strategies."""
    view = _as_view(view)
    grid = _Grid(view)
    out = []
    for strategy in enumerate_strategies(view, limit):
        prob, worst, _ = _metrics_on_grid(grid, strategy)
        out.append(ParetoPoint(prob, worst))
    return out


def metric_points_expected(
    view: QuantifiedScenario | ScenarioView, limit: int = DEFAULT_STRATEGY_LIMIT
) -> list[ParetoPoint]:
    """The multiset of (probability, expected cost) over all strategies."""
    view = _as_view(view)
    grid = _Grid(view)
    out = []
    for strategy in enumerate_strategies(view, limit):
        prob, _, expected = _metrics_on_grid(grid, strategy)
        out.append(ParetoPoint(prob, expected))
    return out


def oracle_pmc(
    view: QuantifiedScenario | ScenarioView, limit: int = DEFAULT_STRATEGY_LIMIT
) -> Front:
    """Front of (probability, worst-case cost), by definition."""
    return pf(metric_points_max(view, limit))


def oracle_pec(
    view: QuantifiedScenario | ScenarioView, limit: int = DEFAULT_STRATEGY_LIMIT
) -> Front:
    """Strictly convex front of (probability, expected cost), by definition."""
    return scpf(metric_points_expected(view, limit))


def compose_at_failure(
    view: QuantifiedScenario | ScenarioView,
    f: str,
    if_absent: PureStrategy,
    if_present: PureStrategy,
) -> PureStrategy:
    """Stitch strategies of the two restrictions of a minimal failure ``f``.

    ``f`` is minimal when every attack observes it; the combined strategy
    plays ``if_absent`` on outcomes where ``f`` did not occur and
    ``if_present`` where it did.
    """
    view = _as_view(view)
    if f not in view.fail_prob:
        raise ValueError(f"unknown failure {f!r}")
    not_observing = [a for a in view.attacks if f not in view.observed[a]]
    if not_observing:
        raise ValueError(f"failure {f!r} is not minimal: not observed by {not_observing}")
    tables: dict[str, tuple[int, ...]] = {}
    for a in view.attacks:
        obs = _observed_vars(view, a)
        width = len(obs)
        f_at = obs.index(f)
        table = []
        for idx in range(1 << width):
            bits = [(idx >> (width - 1 - k)) & 1 for k in range(width)]
            f_bit = bits.pop(f_at)
            reduced = _bits_to_index(bits)
            source = if_present if f_bit else if_absent
            table.append(source.tables[a][reduced])
        tables[a] = tuple(table)
    return PureStrategy(tables=tables)


def lift_attack(
    view: QuantifiedScenario | ScenarioView, strategy: PureStrategy, a: str, bit: int
) -> PureStrategy:
    """Extend a strategy of the restriction at a minimal attack ``a``.

    ``a`` is minimal when it observes nothing; the lifted strategy plays
    ``bit`` for ``a`` unconditionally and is otherwise unchanged.
    """
    view = _as_view(view)
    if a not in view.attack_cost:
        raise ValueError(f"unknown attack {a!r}")
    if view.observed[a]:
        raise ValueError(f"attack {a!r} is not minimal: it observes {sorted(view.observed[a])}")
    tables = dict(strategy.tables)
    tables[a] = (1 if bit else 0,)
    return PureStrategy(tables=tables)


def strategy_from_witness(
    view: QuantifiedScenario | ScenarioView,
    diagram: DecisionDiagram,
    witness: WitnessStrategy,
) -> PureStrategy:
    """Read a witness's per-node decisions back as a full decision table.

    For each attack ``a`` and each valuation of its observed failures, walk
    the diagram: failure branches follow the valuation (every failure met
    before ``a``'s level is observable by ``a``), attack branches follow the
    witness decisions (absent nodes skip). The bit for ``a`` is the decision
    at the node where the walk crosses ``a``'s level, or 0 when the walk
    resolves without meeting it.
    """
    view = _as_view(view)
    fail_set = set(view.failures)
    tables: dict[str, tuple[int, ...]] = {}
    for a in view.attacks:
        obs = _observed_vars(view, a)
        width = len(obs)
        a_pos = diagram.order.index(a)
        table = []
        for idx in range(1 << width):
            valuation = {
                f: (idx >> (width - 1 - k)) & 1 for k, f in enumerate(obs)
            }
            ref = diagram.root
            bit_for_a = 0
            while ref not in (TERM0, TERM1):
                node = diagram.nodes[ref]
                if node.pos >= a_pos:
                    # Reduced diagrams skip don't-care levels; a walk that
                    # jumps past ``a`` never tests it, so the bit stays 0.
                    if node.pos == a_pos:
                        bit_for_a = witness.decisions.get(ref, 0)
                    break
                var = diagram.order[node.pos]
                if var in fail_set:
                    branch = valuation[var]
                else:
                    branch = witness.decisions.get(ref, 0)
                ref = node.hi if branch else node.lo
            table.append(bit_for_a)
        tables[a] = tuple(table)
    return PureStrategy(tables=tables)
