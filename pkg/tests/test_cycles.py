import math
import random
from fractions import Fraction as Fr

import pytest
from hypothesis import given, strategies as st

from sigmarot.cycles import (
    closed_walk_means, closed_walk_with_mean, cycle_mean_range, edges_restricted,
    extreme_means, karp_min_mean, merge_intervals, simple_cycle_means, strongly_connected,
    walk_weight,
)


@st.composite
def graphs(draw, max_n=6, max_w=3):
    n = draw(st.integers(1, max_n))
    edges = draw(st.lists(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1),
                                    st.integers(-max_w, max_w)), max_size=3 * n, unique=True))
    return n, edges


def _is_closed(edges, walk):
    return all(edges[a][1] == edges[b][0] for a, b in zip(walk, walk[1:] + walk[:1]))


def test_self_loop():
    ranges, union = cycle_mean_range(1, [(0, 0, 3)])
    assert union == [(3, 3)] and ranges[0].lo_cycle == ranges[0].hi_cycle == (0,)


def test_two_loop_graph():
    edges = [(0, 0, 0), (0, 1, 1), (1, 0, 0)]
    _, union = cycle_mean_range(2, edges)
    assert union == [(0, Fr(1, 2))]


def test_acyclic_and_disjoint_components():
    assert cycle_mean_range(3, [(0, 1, 1), (1, 2, 1)]) == ([], [])
    ranges, union = cycle_mean_range(3, [(0, 0, 0), (1, 2, 3), (2, 1, 3), (0, 1, 5)])
    assert [(r.lo, r.hi) for r in ranges] == [(0, 0), (3, 3)]
    assert union == [(0, 0), (3, 3)]


def test_restricted_nodes():
    edges = [(0, 0, 0), (0, 1, 1), (1, 0, 0), (1, 1, 2)]
    assert cycle_mean_range(2, edges)[1] == [(0, 2)]
    assert cycle_mean_range(2, edges, nodes=[1])[1] == [(2, 2)]


def test_merge_intervals():
    assert merge_intervals([(Fr(1, 2), 1), (0, Fr(1, 2)), (3, 4)]) == [(0, 1), (3, 4)]
    assert merge_intervals([]) == []


def test_karp_example():
    edges = [(0, 1, 4), (1, 0, 0), (1, 2, 1), (2, 1, 1), (0, 0, 3)]
    mean, cyc = karp_min_mean([0, 1, 2], edges)
    assert mean == 1 and Fr(*walk_weight(edges, cyc)) == 1 and _is_closed(edges, cyc)
    lo, _, hi, hc = extreme_means([0, 1, 2], edges)
    assert (lo, hi) == (1, 3) and Fr(*walk_weight(edges, hc)) == 3


@given(graphs())
def test_karp_matches_enumeration(g):
    n, edges = g
    ranges, union = cycle_mean_range(n, edges)
    assert len(ranges) == len(strongly_connected(n, edges))
    for rg in ranges:
        sub = edges_restricted(edges, rg.nodes)
        means = simple_cycle_means(n, sub)
        assert (min(means), max(means)) == (rg.lo, rg.hi)
        for cyc, target in ((rg.lo_cycle, rg.lo), (rg.hi_cycle, rg.hi)):
            assert _is_closed(edges, list(cyc)) and Fr(*walk_weight(edges, cyc)) == target
    walks = closed_walk_means(n, edges, 6)
    assert all(any(lo <= r <= hi for lo, hi in union) for r in walks)
    assert {r for lo, hi in union for r in (lo, hi)} <= walks | simple_cycle_means(n, edges)


@given(graphs(max_n=5), st.integers(1, 7), st.data())
def test_closed_walk_with_mean(g, q, data):
    n, edges = g
    _, union = cycle_mean_range(n, edges)
    if not union:
        assert closed_walk_with_mean(n, edges, 0) is None
        return
    lo, hi = data.draw(st.sampled_from(union))
    ps = range(math.ceil(lo * q), math.floor(hi * q) + 1)
    if not ps:
        return
    r = Fr(data.draw(st.sampled_from(list(ps))), q)
    walk = closed_walk_with_mean(n, edges, r, max_len=4)
    assert walk is not None and _is_closed(edges, walk)
    assert Fr(*walk_weight(edges, walk)) == r


def test_closed_walk_outside_range():
    assert closed_walk_with_mean(2, [(0, 0, 0), (0, 1, 1), (1, 0, 0)], Fr(2, 3)) is None


def test_splice_long_walk():
    # mean 1/17 needs a walk longer than the exhaustive search bound
    edges = [(0, 0, 0), (0, 1, 1), (1, 0, 0)]
    walk = closed_walk_with_mean(2, edges, Fr(1, 17), max_len=4)
    assert _is_closed(edges, walk) and Fr(*walk_weight(edges, walk)) == Fr(1, 17)


@pytest.mark.parametrize("seed", range(10))
def test_random_graphs_up_to_twelve_vertices(seed):
    rng = random.Random(seed)
    n = rng.randint(1, 12)
    edges = list({(rng.randrange(n), rng.randrange(n), rng.randint(-2, 2)) for _ in range(2 * n)})
    _, union = cycle_mean_range(n, edges)
    means = simple_cycle_means(n, edges)
    if means:
        assert union[0][0] == min(means) and union[-1][1] == max(means)
    else:
        assert union == []
