import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from edpc.belief import OUTLIER, MassFunction, combine_neighbor_evidence, full_set, singleton
from edpc.density import CenterSet, node_stats
from edpc.dissimilarity import graph_dissimilarity
from edpc.graph_io import Graph, load_edge_list
from edpc.propagation import (
    PropagationParams,
    detect,
    diffuse,
    expand_one_round,
    expansion_weight,
    gamma_scale_auto,
    initialize,
    labeled_rate,
    overlap_weight,
)

W1, W2 = singleton(0), singleton(1)


def _idx(g, *names):
    return [g.index_of(n) for n in names]


def _expanded(g, centers, params=PropagationParams()):
    d = graph_dissimilarity(g, params.t_steps)
    part = initialize(g, CenterSet(tuple(centers)), node_stats(g, d))
    return d, expand_one_round(g, d, part, params)


def test_initialize_eleven(eleven):
    c5, c10 = _idx(eleven, "5", "10")
    part = initialize(eleven, CenterSet((c5, c10)))
    assert part.masses[c5] == MassFunction.categorical(W1, 2)
    assert part.masses[c10] == MassFunction.categorical(W2, 2)
    others = [i for i in range(11) if i not in (c5, c10)]
    assert all(part.masses[i].is_vacuous for i in others)


def test_initialize_extremes(p3):
    every = initialize(p3, CenterSet((0, 1, 2)))
    assert not any(m.is_vacuous for m in every.masses)
    one = initialize(p3, CenterSet((1,)))
    assert sum(m.is_vacuous for m in one.masses) == 2


def test_gamma_constant_distances():
    g = load_edge_list("0 1\n1 2\n2 0")
    d = np.full((3, 3), 3.0)
    np.fill_diagonal(d, 0)
    assert gamma_scale_auto(g, d, beta=2) == pytest.approx(1 / 9)


def test_gamma_p3(p3):
    # true one-step neighbour distances are 1
    assert gamma_scale_auto(p3, graph_dissimilarity(p3, 1), 2.0) == 1.0
    s = math.sqrt(2)
    d = np.array([[0, s, 2], [s, 0, s], [2, s, 0]])
    assert gamma_scale_auto(p3, d, 2.0) == pytest.approx(0.5)


def test_gamma_even_median():
    g = load_edge_list("0 1\n1 2\n2 3\n3 4")
    d = np.zeros((5, 5))
    for k, v in enumerate([1.0, 2.0, 3.0, 4.0]):
        d[k, k + 1] = d[k + 1, k] = v
    assert gamma_scale_auto(g, d, beta=1.0) == pytest.approx(1 / 2.5)


def test_gamma_edgeless():
    with pytest.raises(ValueError):
        gamma_scale_auto(Graph.from_edges(3, []), np.zeros((3, 3)))


def test_expansion_eleven(eleven):
    c5, c10 = _idx(eleven, "5", "10")
    d, part = _expanded(eleven, (c5, c10))
    gamma = gamma_scale_auto(eleven, d, 2.0)
    for name, t, center in [("1", 0, c5), ("3", 0, c5), ("7", 1, c10), ("9", 1, c10)]:
        i = eleven.index_of(name)
        alpha = math.exp(-gamma * d.values[i, center] ** 2)
        assert part.masses[i][singleton(t)] == pytest.approx(alpha, abs=1e-15)
        assert part.masses[i][OUTLIER] == pytest.approx(1 - alpha, abs=1e-15)
    assert part.masses[eleven.index_of("11")].is_vacuous


def test_expansion_equidistant_two_centers():
    g = load_edge_list("0 1\n1 2")
    _, part = _expanded(g, (0, 2))
    assert part.masses[1] == MassFunction.categorical(full_set(2), 2)


def test_expansion_two_centers_same_community():
    g = load_edge_list("0 1\n1 2\n2 3\n1 4")
    d = graph_dissimilarity(g, 3)
    part = initialize(g, CenterSet((0, 2)))
    part = part.with_masses([MassFunction.categorical(W1, 2) if i in (0, 2) else m for i, m in enumerate(part.masses)])
    part = expand_one_round(g, d, part)
    gamma = gamma_scale_auto(g, d, 2.0)
    nearest = min(d.values[1, 0], d.values[1, 2])
    assert part.masses[1][W1] == pytest.approx(math.exp(-gamma * nearest**2))
    assert set(part.masses[1].masses) <= {W1, OUTLIER}


def test_expansion_rejects_non_categorical_center(p3):
    part = initialize(p3, CenterSet((0,)))
    part = part.with_masses([MassFunction.vacuous(1)] * 3)
    with pytest.raises(ValueError):
        expand_one_round(p3, graph_dissimilarity(p3, 1), part)


def test_labeled_rate(eleven):
    c5, c10 = _idx(eleven, "5", "10")
    _, part = _expanded(eleven, (c5, c10))
    assert labeled_rate(eleven, part, eleven.index_of("11")) == 1.0
    # node 3 touches 2, 4, 5 and the still vacuous bridge 11
    assert labeled_rate(eleven, part, eleven.index_of("3")) == 0.75
    fresh = initialize(eleven, CenterSet((c5, c10)))
    assert labeled_rate(eleven, fresh, eleven.index_of("11")) == 0.0
    lone = Graph.from_edges(2, [])
    assert labeled_rate(lone, initialize(lone, CenterSet((0,))), 1) == 0.0


def test_diffusion_eleven_bridge(eleven):
    c5, c10 = _idx(eleven, "5", "10")
    d, part = _expanded(eleven, (c5, c10))
    final = diffuse(eleven, d, part)
    n3, n6, n11 = _idx(eleven, "3", "6", "11")
    expected = combine_neighbor_evidence([part.masses[n3], part.masses[n6]])
    assert final.masses[n11].isclose(expected, 1e-15)
    # the bridge gets equal singleton support and mass on the imprecise pair
    m = final.masses[n11]
    assert m[W1] == pytest.approx(m[W2])
    assert m[full_set(2)] > 0 and m[OUTLIER] > 0


def test_diffusion_leaves_isolated_node_vacuous():
    g = load_edge_list("0 1\n1 2", n=4)
    part = detect(g, communities=1)
    assert part.masses[3].is_vacuous
    assert all(not part.masses[i].is_vacuous for i in range(3))


def test_chain_inherits_single_neighbour():
    g = load_edge_list("0 1\n1 2")
    d, part = _expanded(g, (0,))
    final = diffuse(g, d, part)
    assert final.masses[2] == part.masses[1]


def test_diffusion_order_prefers_labeled_rate():
    # 3 and 4 both touch labeled node 1; 4 has no other neighbour so goes first
    g = load_edge_list("0 1\n1 3\n1 4\n3 5\n5 6")
    d, part = _expanded(g, (0,), PropagationParams(t_steps=1))
    final = diffuse(g, d, part)
    assert all(not m.is_vacuous for m in final.masses[:2] + final.masses[3:])


def test_k3_single_center():
    g = load_edge_list("0 1\n1 2\n0 2")
    part = detect(g, communities=1)
    for m in part.masses:
        assert m[W1] > 0


def test_detect_eleven_end_to_end(eleven):
    part = detect(eleven, communities=2)
    assert {eleven.node_names[c] for c in part.centers} == {"5", "10"}
    labels = part.hard_labels("singletons_only")
    w_a = labels[eleven.index_of("5")]
    w_b = labels[eleven.index_of("10")]
    assert all(labels[eleven.index_of(s)] == w_a for s in "1234")
    assert all(labels[eleven.index_of(s)] == w_b for s in "6789")


def test_detect_manual_centers(eleven):
    c5, c10 = _idx(eleven, "5", "10")
    part = detect(eleven, centers=[c10, c5])
    assert part.centers.centers == (c10, c5)
    assert part.masses[c10] == MassFunction.categorical(W1, 2)


def test_params_validation():
    with pytest.raises(ValueError):
        PropagationParams(beta=0)
    with pytest.raises(ValueError):
        PropagationParams(gamma=-1.0)
    with pytest.raises(ValueError):
        PropagationParams(t_steps=0)
    with pytest.raises(ValueError):
        PropagationParams(reliability="mean")


def test_expansion_weight_monotone_on_grid():
    grid = np.linspace(0.0, 5.0, 501)
    for gamma in (0.1, 0.5, 1.0):
        for beta in (1.0, 2.0, 3.0):
            vals = [expansion_weight(x, gamma, beta) for x in grid]
            assert vals[0] == 1.0
            assert all(0 < v <= 1 for v in vals)
            assert all(a > b for a, b in zip(vals, vals[1:]))


def test_overlap_weight():
    assert overlap_weight([2.5, 2.5]) == 1.0
    assert overlap_weight([1.0, 1.0, 1.0]) == 1.0
    w = overlap_weight([1.0, 3.0])
    assert w == pytest.approx(math.exp(-1.0))
    assert 0 < overlap_weight([0.0, 10.0]) <= 1


@st.composite
def connected_graphs(draw, max_n=25):
    n = draw(st.integers(2, max_n))
    edges = [(i, draw(st.integers(0, i - 1))) for i in range(1, n)]
    extra = st.tuples(st.integers(0, n - 1), st.integers(0, n - 1))
    edges += draw(st.lists(extra, max_size=2 * n))
    return Graph.from_edges(n, edges)


@settings(max_examples=60, deadline=None)
@given(connected_graphs(), st.integers(1, 4), st.integers(1, 3))
def test_connected_graph_fully_labeled(g, c, t):
    c = min(c, g.n)
    part = detect(g, PropagationParams(t_steps=t), communities=c)
    assert all(part.labeled)
    for k, center in enumerate(part.centers):
        assert part.masses[center] == MassFunction.categorical(singleton(k), c)
    again = detect(g, PropagationParams(t_steps=t), communities=c)
    assert again.masses == part.masses and again.centers == part.centers
