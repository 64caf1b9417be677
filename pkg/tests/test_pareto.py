import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from afta.bdd import build_robdd
from afta.model import eval_structure
from afta.pareto import (
    ParetoPoint,
    chance_combine_expected,
    chance_combine_max,
    chance_mix_expected,
    chance_mix_max,
    choice_combine,
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

from scenario_gen import random_scenario

P = ParetoPoint


def random_points(rng, max_len=40, denom=16):
    costs = [float(c) for c in range(11)] + [math.inf]
    return [
        P(rng.randrange(denom + 1) / denom, rng.choice(costs))
        for _ in range(rng.randrange(max_len + 1))
    ]


# ------------------------------------------------------------- dominance


def test_dominates():
    assert dominates(P(0.5, 5.0), P(0.5, 10.0))
    assert dominates(P(0.8, 10.0), P(0.5, 10.0))
    assert dominates(P(0.5, 10.0), P(0.5, 10.0))
    assert not dominates(P(0.5, 10.0), P(0.8, 10.0))
    assert not dominates(P(0.4, 5.0), P(0.5, 4.0))
    assert dominates(P(0.4, 5.0), P(0.4, math.inf))


# ------------------------------------------------------------------- pf


def test_pf_collapses_dominated_points():
    pts = [P(0.0, 0.0), P(0.25, 10.0), P(0.5, 10.0), P(0.75, 10.0)]
    assert pf(pts) == (P(0.0, 0.0), P(0.75, 10.0))


def test_pf_empty_and_antichain():
    assert pf([]) == ()
    chain = (P(0.2, 1.0), P(0.5, 3.0), P(0.9, 7.0))
    assert pf(chain) == chain
    assert pf(reversed(chain)) == chain


def test_pf_collapses_duplicates():
    assert pf([P(0.5, 2.0), P(0.5, 2.0)]) == (P(0.5, 2.0),)


def test_pf_keeps_useful_infinite_cost():
    pts = [P(0.5, 3.0), P(1.0, math.inf)]
    assert pf(pts) == (P(0.5, 3.0), P(1.0, math.inf))
    # but an infinite-cost point with no probability advantage is dropped
    assert pf([P(0.5, 3.0), P(0.5, math.inf)]) == (P(0.5, 3.0),)


@given(st.integers(min_value=0, max_value=100_000))
@settings(max_examples=200, deadline=None)
def test_pf_is_sound_and_idempotent(seed):
    pts = random_points(random.Random(seed))
    front = pf(pts)
    assert pf(front) == front
    # strictly increasing in both coordinates
    for a, b in zip(front, front[1:]):
        assert a.cost < b.cost and a.prob < b.prob
    # nothing kept is dominated by anything in the input (except itself)
    for d in front:
        assert not any(dominates(other, d) and other != d for other in pts)
    # everything dropped is dominated by something kept
    for d in pts:
        assert any(dominates(k, d) for k in front)


# ------------------------------------------------------------------ scpf


def test_scpf_drops_collinear_interior():
    assert scpf([P(0.0, 0.0), P(0.5, 5.0), P(1.0, 10.0)]) == (P(0.0, 0.0), P(1.0, 10.0))


def test_scpf_keeps_strictly_concave_points():
    pts = (P(0.0, 0.0), P(0.6, 5.0), P(1.0, 10.0))
    assert scpf(pts) == pts


def test_scpf_drops_points_under_the_hull():
    # the middle point is strictly worse than mixing the endpoints
    assert scpf([P(0.0, 0.0), P(0.4, 5.0), P(1.0, 10.0)]) == (P(0.0, 0.0), P(1.0, 10.0))


def test_scpf_oil_pipeline_extremes():
    pts = [P(0.0021, 0.0), P(0.004, 346.0), P(0.0538, 541.0), P(1.0, 546.0)]
    assert scpf(pts) == (P(0.0021, 0.0), P(1.0, 546.0))


def test_scpf_singleton_and_infinite_tail():
    assert scpf([P(0.5, 2.0)]) == (P(0.5, 2.0),)
    pts = [P(0.0, 0.0), P(0.6, 5.0), P(1.0, math.inf)]
    assert scpf(pts) == tuple(pts)


@given(st.integers(min_value=0, max_value=100_000))
@settings(max_examples=200, deadline=None)
def test_scpf_subset_of_pf_and_concave(seed):
    pts = random_points(random.Random(seed))
    hull = scpf(pts)
    front = pf(pts)
    assert set(hull) <= set(front)
    assert scpf(hull) == hull
    if front:
        assert hull[0] == front[0] and hull[-1] == front[-1]
    finite = [d for d in hull if math.isfinite(d.cost)]
    slopes = [
        (b.prob - a.prob) / (b.cost - a.cost) for a, b in zip(finite, finite[1:])
    ]
    for s1, s2 in zip(slopes, slopes[1:]):
        assert s1 > s2, "hull slopes must strictly decrease"


# ------------------------------------------------------------- combining


def test_chance_mix_max():
    assert chance_mix_max(P(0.0, 0.0), P(1.0, 10.0), 0.5) == P(0.5, 10.0)
    assert chance_mix_max(P(0.5, 10.0), P(1.0, 10.0), 0.5) == P(0.75, 10.0)
    assert chance_mix_max(P(0.2, 3.0), P(0.9, 1.0), 0.25) == P(0.375, 3.0)


def test_chance_mix_expected():
    assert chance_mix_expected(P(0.0, 0.0), P(1.0, 10.0), 0.5) == P(0.5, 5.0)
    # a probability-zero branch contributes nothing even at infinite cost
    assert chance_mix_expected(P(0.3, 2.0), P(1.0, math.inf), 0.0) == P(0.3, 2.0)
    assert chance_mix_expected(P(0.3, math.inf), P(1.0, 4.0), 1.0) == P(1.0, 4.0)


def test_chance_combine_enumerates_all_pairs():
    lo = [P(0.0, 0.0), P(0.5, 10.0)]
    hi = [P(0.0, 0.0), P(0.5, 10.0), P(1.0, 10.0)]
    raw = chance_combine_max(lo, hi, 0.5)
    assert raw == [
        P(0.0, 0.0), P(0.25, 10.0), P(0.5, 10.0),
        P(0.25, 10.0), P(0.5, 10.0), P(0.75, 10.0),
    ]
    exp = chance_combine_expected([P(0.0, 0.0)], [P(1.0, 10.0)], 0.5)
    assert exp == [P(0.5, 5.0)]


def test_choice_combine():
    assert choice_combine([P(0.0, 0.0)], [P(1.0, 0.0)], 10.0) == [P(0.0, 0.0), P(1.0, 10.0)]
    assert choice_combine([P(0.2, 1.0)], [P(0.9, 2.0)], 0.0) == [P(0.2, 1.0), P(0.9, 2.0)]
    shifted = choice_combine([P(0.0, 0.0)], [P(1.0, 0.0)], math.inf)
    assert shifted == [P(0.0, 0.0), P(1.0, math.inf)]
    assert pf(shifted) == (P(0.0, 0.0), P(1.0, math.inf))


@given(st.integers(min_value=0, max_value=100_000))
@settings(max_examples=150, deadline=None)
def test_combine_commutes_with_filtering(seed):
    """Filtering child fronts before combining loses no undominated point."""
    rng = random.Random(seed)
    lo = random_points(rng, max_len=12)
    hi = random_points(rng, max_len=12)
    if not lo or not hi:
        return
    p = rng.randrange(17) / 16
    cost = rng.choice([0.0, 1.0, 5.0, math.inf])

    assert pf(chance_combine_max(lo, hi, p)) == pf(chance_combine_max(pf(lo), pf(hi), p))
    assert pf(choice_combine(lo, hi, cost)) == pf(choice_combine(pf(lo), pf(hi), cost))
    assert scpf(chance_combine_expected(lo, hi, p)) == scpf(
        chance_combine_expected(scpf(lo), scpf(hi), p)
    )
    assert scpf(choice_combine(lo, hi, cost)) == scpf(choice_combine(scpf(lo), scpf(hi), cost))


@given(st.integers(min_value=0, max_value=100_000))
@settings(max_examples=150, deadline=None)
def test_staged_filtering_agrees(seed):
    """Filtering a union in stages agrees with filtering it in one go, and
    filters only ever discard points, never invent them."""
    rng = random.Random(seed)
    big = random_points(rng, max_len=25)
    sub = [d for d in big if rng.random() < 0.5]
    for select in (pf, scpf):
        kept = select(big)
        assert set(d for d in kept if d in sub) <= set(select(sub))
        other = random_points(rng, max_len=10)
        assert select(list(big) + list(other)) == select(list(select(big)) + list(other))


# ---------------------------------------------------------- full analyses


def test_pmc_two_component(observed_scenario):
    d = build_robdd(observed_scenario)
    assert pmc(d, observed_scenario).front == (P(0.0, 0.0), P(0.75, 10.0))


def test_pec_two_component(observed_scenario):
    d = build_robdd(observed_scenario)
    assert pec(d, observed_scenario).front == (P(0.0, 0.0), P(0.75, 7.5))


def test_pmc_attack_first(attack_first_scenario):
    d = build_robdd(attack_first_scenario)
    front = pmc(d, attack_first_scenario).front
    assert front == (P(0.0, 0.0), P(0.5, 10.0), P(0.75, 20.0))


def test_shared_nodes_checked_once(observed_scenario):
    d = build_robdd(observed_scenario)
    ann = pmc(d, observed_scenario)
    assert set(ann.table) == set(d.reachable_refs())
    assert ann.max_front_size() >= 2
    assert ann.table[0].points == (P(0.0, 0.0),)
    assert ann.table[1].points == (P(1.0, 0.0),)


def test_tiny_epsilon_keeps_exact_fronts(observed_scenario, attack_first_scenario):
    for sc in (observed_scenario, attack_first_scenario):
        d = build_robdd(sc)
        assert pmc(d, sc, epsilon=1e-9).front == pmc(d, sc).front
        assert pec(d, sc, epsilon=1e-9).front == pec(d, sc).front


def test_prune_front():
    front = (P(0.0, 0.0), P(0.5, 10.0), P(0.5000001, 10.0000001), P(0.75, 20.0))
    assert prune_front(front, 0.0) == front
    assert prune_front(front, 1e-3) == (P(0.0, 0.0), P(0.5, 10.0), P(0.75, 20.0))
    assert prune_front((), 0.1) == ()


# -------------------------------------------------------------- witnesses


def replay_table(scenario, order, table, mode):
    """Recompute a witness point from its outcome table, straight from the
    definitions: enumerate failure vectors, look up the fired set, evaluate."""
    failures = [v for v in order if v in scenario.failure_set]
    prob = 0.0
    worst = 0.0
    expected = 0.0
    for bits, fired in table:
        p_row = 1.0
        for f, bit in zip(failures, bits):
            p_row *= scenario.fail_prob[f] if bit else 1.0 - scenario.fail_prob[f]
        cost = sum(scenario.attack_cost[a] for a in fired)
        asg = dict(zip(failures, (bool(b) for b in bits)))
        asg.update({a: a in fired for a in scenario.attacks})
        if eval_structure(scenario.aft, asg):
            prob += p_row
        if p_row > 0.0:
            worst = max(worst, cost)
            expected += p_row * cost
    return prob, worst, expected


def test_witness_two_component_max(observed_scenario):
    d = build_robdd(observed_scenario)
    ann = pmc(d, observed_scenario)
    top = extract_witness(ann, 1)
    assert top.point == P(0.75, 10.0)
    assert top.attacks == {"a1", "a2"}
    by_bits = dict(top.table)
    assert by_bits[(0, 0)] == frozenset()
    assert by_bits[(1, 0)] == {"a1"}
    # on 01 and 11 either single attack is optimal; it must be one of them
    assert by_bits[(0, 1)] in ({"a1"}, {"a2"}) and len(by_bits[(1, 1)]) == 1
    prob, worst, _ = replay_table(observed_scenario, d.order, top.table, "max")
    assert (prob, worst) == (0.75, 10.0)

    idle = extract_witness(ann, 0)
    assert idle.point == P(0.0, 0.0)
    assert idle.attacks == frozenset()
    assert all(fired == frozenset() for _, fired in idle.table)


def test_witness_two_component_expected(observed_scenario):
    d = build_robdd(observed_scenario)
    ann = pec(d, observed_scenario)
    top = extract_witness(ann, 1)
    assert top.point == P(0.75, 7.5)
    prob, _, expected = replay_table(observed_scenario, d.order, top.table, "expected")
    assert (prob, expected) == (0.75, 7.5)


def test_witness_index_out_of_range(observed_scenario):
    d = build_robdd(observed_scenario)
    ann = pmc(d, observed_scenario)
    with pytest.raises(IndexError):
        extract_witness(ann, 2)
    with pytest.raises(IndexError):
        extract_witness(ann, -1)


@given(st.integers(min_value=0, max_value=100_000))
@settings(max_examples=100, deadline=None)
def test_witness_replay_matches_front(seed):
    sc = random_scenario(random.Random(seed), max_failures=3, max_attacks=3)
    d = build_robdd(sc)
    for mode, analyze in (("max", pmc), ("expected", pec)):
        ann = analyze(d, sc)
        for k, point in enumerate(ann.front):
            w = extract_witness(ann, k)
            prob, worst, expected = replay_table(sc, d.order, w.table, mode)
            assert prob == point.prob
            assert (worst if mode == "max" else expected) == point.cost


# ------------------------------------------------------------- rendering


def test_front_to_jsonable():
    out = front_to_jsonable((P(0.0, 0.0), P(1.0, math.inf)))
    assert out == [{"prob": 0.0, "cost": 0.0}, {"prob": 1.0, "cost": "inf"}]


def test_front_to_csv():
    text = front_to_csv((P(0.75, 10.0), P(1.0, math.inf)))
    assert text == "prob,cost\n0.75,10.0\n1.0,inf\n"
