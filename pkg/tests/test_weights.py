"""Election weight: component extraction and the combined metric, checked
against an independent exact-rational oracle."""

import random
from fractions import Fraction

from hypothesis import given, strategies as st

from cbrsim.geometry import Position
from cbrsim.node import NeighborEntry
from cbrsim.weights import (WeightComponents, WeightFactors, average_speed,
                            combined_weight, degree_difference)

from conftest import add_node, bare_sim

PAPER_FACTORS = WeightFactors(0.7, 0.2, 0.05, 0.05)


def oracle_weight(components, factors):
    """Independent evaluation in exact rational arithmetic, rounded once."""
    total = (Fraction(factors.w1) * Fraction(components.degree_diff)
             + Fraction(factors.w2) * Fraction(components.dist_sum)
             + Fraction(factors.w3) * Fraction(components.mobility)
             + Fraction(factors.w4) * Fraction(components.head_time))
    return float(total)


def _entry(sim, node_id, x, y, weight=None):
    return NeighborEntry(node_id, "member", None, weight, Position(x, y),
                         None, (), sim.now)


# -- degree -----------------------------------------------------------------

def test_isolated_node_has_degree_zero():
    sim = bare_sim()
    node = add_node(sim, 0, 0.0, 0.0)
    assert len(node.current_degree_entries()) == 0


def test_degree_counts_only_in_range_neighbors():
    sim = bare_sim()
    node = add_node(sim, 0, 0.0, 0.0)
    node.neighbors = {1: _entry(sim, 1, 30.0, 0.0),
                      2: _entry(sim, 2, 79.0, 0.0),
                      3: _entry(sim, 3, 81.0, 0.0)}   # out of range
    assert len(node.current_degree_entries()) == 2


def test_clique_degree():
    sim = bare_sim()
    node = add_node(sim, 0, 0.0, 0.0)
    node.neighbors = {i: _entry(sim, i, 5.0 * i, 0.0) for i in range(1, 5)}
    assert len(node.current_degree_entries()) == 4


def test_degree_difference_is_absolute():
    assert degree_difference(5, 2) == 3
    assert degree_difference(0, 2) == 2
    assert degree_difference(2, 2) == 0


# -- components -------------------------------------------------------------

def test_isolated_stationary_node_has_all_zero_components():
    sim = bare_sim(ideal_degree=0)
    node = add_node(sim, 0, 0.0, 0.0)
    sim.schedule(5.0, "advance", lambda: None)
    sim.run_until(5.0)
    c = node.weight_components()
    assert (c.degree_diff, c.dist_sum, c.mobility, c.head_time) == (0, 0, 0, 0)


def test_two_neighbor_component_vector():
    sim = bare_sim()  # ideal_degree defaults to 2
    node = add_node(sim, 0, 0.0, 0.0)
    node.neighbors = {1: _entry(sim, 1, 30.0, 0.0),
                      2: _entry(sim, 2, 0.0, 40.0)}
    c = node.weight_components()
    assert (c.degree_diff, c.dist_sum, c.mobility, c.head_time) == (0, 70.0, 0, 0)


def test_average_speed_is_distance_over_time():
    assert average_speed(200.0, 10.0) == 20.0
    assert average_speed(0.0, 10.0) == 0.0
    assert average_speed(50.0, 0.0) == 0.0  # before the clock starts


def test_head_time_accumulates_while_heading():
    sim = bare_sim()
    node = add_node(sim, 0, 0.0, 0.0)
    node.become_head()
    sim.schedule(7.0, "advance", lambda: None)
    sim.run_until(7.0)
    assert node.weight_components().head_time == 7.0


def test_energy_consumed_mode_tracks_battery():
    sim = bare_sim(p_v_mode="energy_consumed")
    node = add_node(sim, 0, 0.0, 0.0)
    sim.broadcast(0, object())
    sim.broadcast(0, object())
    assert node.weight_components().head_time == 2.0


# -- combined metric --------------------------------------------------------

def test_hand_value_distance_only():
    assert combined_weight(WeightComponents(0, 70, 0, 0), PAPER_FACTORS) == 14.0


def test_hand_value_degree_only():
    assert combined_weight(WeightComponents(1, 0, 0, 0), PAPER_FACTORS) == 0.7


def test_all_zero_components_give_zero():
    assert combined_weight(WeightComponents(0, 0, 0, 0), PAPER_FACTORS) == 0.0


def test_thousand_tuples_match_exact_oracle():
    rng = random.Random(20260823)
    for _ in range(1000):
        c = WeightComponents(rng.uniform(0, 10), rng.uniform(0, 500),
                             rng.uniform(0, 30), rng.uniform(0, 300))
        f = WeightFactors(rng.uniform(0, 1), rng.uniform(0, 1),
                          rng.uniform(0, 1), rng.uniform(0, 1))
        got = combined_weight(c, f)
        want = oracle_weight(c, f)
        assert abs(got - want) <= 1e-12 * max(1.0, abs(want))


finite = st.floats(min_value=0.0, max_value=1e6,
                   allow_nan=False, allow_infinity=False)


@given(c=st.tuples(finite, finite, finite, finite),
       f=st.tuples(finite, finite, finite, finite),
       bump=st.floats(min_value=0.0, max_value=1e6, allow_nan=False))
def test_weight_is_monotone_in_each_component(c, f, bump):
    factors = WeightFactors(*f)
    base = combined_weight(WeightComponents(*c), factors)
    assert base >= 0.0
    for i in range(4):
        raised = list(c)
        raised[i] += bump
        assert combined_weight(WeightComponents(*raised), factors) >= base


@given(c=st.tuples(finite, finite, finite, finite),
       scale=st.floats(min_value=1e-3, max_value=1e3, allow_nan=False))
def test_scaling_all_factors_preserves_ranking(c, scale):
    a = WeightComponents(*c)
    b = WeightComponents(c[0] + 1.0, c[1], c[2], c[3])
    f = PAPER_FACTORS
    g = WeightFactors(f.w1 * scale, f.w2 * scale, f.w3 * scale, f.w4 * scale)
    assert combined_weight(a, f) < combined_weight(b, f)
    assert combined_weight(a, g) < combined_weight(b, g)
