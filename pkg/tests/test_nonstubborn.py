import numpy as np
import pytest

from fjmedia import (AugmentedInstance, Graph, MediaConfig,
                     augment_with_source, gen_barabasi_albert,
                     gen_random_regular, nonstubborn_equilibrium)
from oracles import fj_matrix
from oracles import solve as dense_solve


def single_node_graph():
    z = np.empty(0, dtype=np.int64)
    return Graph(1, z, z, np.empty(0))


def complete_graph(n):
    return Graph.from_edges(
        n, [(i, j, 1.0) for i in range(n) for j in range(i + 1, n)])


# ---------------------------------------------------------------------------
# instance construction


def test_augmented_weights_follow_degree():
    g = Graph.from_edges(3, [(0, 1, 1.0), (1, 2, 1.0)])
    inst = augment_with_source(g, beta=0.5, s_M=0.7)
    assert np.allclose(inst.media_edge_weights, [1.0, 1.5, 1.0])
    aug = inst.build_graph()
    assert aug.n == 4
    assert aug.m == g.m + 3
    # source is node 3, attached to everyone
    assert [v for v, _ in aug.neighbors(3)] == [0, 1, 2]


def test_isolated_node_still_hears_the_source():
    # degree 0: media edge weight beta * (1 + 0) = beta, not dropped
    g = single_node_graph()
    inst = augment_with_source(g, beta=1.0, s_M=0.55)
    assert np.allclose(inst.media_edge_weights, [1.0])
    assert inst.build_graph().m == 1


def test_beta_zero_detaches_the_source():
    g = Graph.from_edges(3, [(0, 1, 1.0), (1, 2, 1.0)])
    inst = augment_with_source(g, beta=0.0, s_M=0.5)
    aug = inst.build_graph()
    assert aug.n == 4
    assert aug.m == g.m  # no media edges at all
    s = np.array([0.2, 0.5, 0.8])
    z, z_M = nonstubborn_equilibrium(g, s, MediaConfig(1.0, 0.0, 0.1))
    # detached source keeps its innate opinion, nodes solve plain FJ
    assert z_M == pytest.approx(1.1 * 0.5, rel=1e-12)
    want = dense_solve(fj_matrix(g), s)
    assert np.max(np.abs(z - want)) <= 1e-9


def test_instance_validation():
    g = Graph.from_edges(3, [(0, 1, 1.0), (1, 2, 1.0)])
    with pytest.raises(ValueError):
        AugmentedInstance(base=g, media_edge_weights=np.ones(2), s_M=0.5)
    with pytest.raises(ValueError):
        AugmentedInstance(base=g, media_edge_weights=-np.ones(3), s_M=0.5)
    with pytest.raises(ValueError):
        augment_with_source(g, beta=-1.0, s_M=0.5)
    with pytest.raises(ValueError):
        augment_with_source(g, beta=0.5, s_M=1.5)


# ---------------------------------------------------------------------------
# equilibrium


def test_two_node_frozen_value():
    # one node at s = 0.5, gamma = 0.1, beta = 1: source innate 0.55, edge
    # weight 1, so z = (I+L)^{-1} (0.5, 0.55) on a single edge
    z, z_M = nonstubborn_equilibrium(single_node_graph(), np.array([0.5]),
                                     MediaConfig(1.0, 1.0, 0.1), tol=1e-13)
    assert z[0] == pytest.approx(0.5166666666666666, abs=1e-10)
    assert z_M == pytest.approx(0.5333333333333333, abs=1e-10)
    assert z[0] + z_M == pytest.approx(1.05, abs=1e-10)


def test_consensus_with_tiny_gamma():
    g = gen_random_regular(20, 4, seed=1)
    s = np.full(20, 0.4)
    z, z_M = nonstubborn_equilibrium(g, s, MediaConfig(1.0, 0.8, 1e-9))
    assert np.allclose(z, 0.4, atol=1e-8)
    assert z_M == pytest.approx(0.4, abs=1e-8)


def test_sum_conservation_and_bound():
    # augmented FJ conserves: sum(z) + z_M = sum(s) + s_M, and since
    # s_M <= (1+gamma) * mean(s), sum(z) <= (1 + (1+gamma)/n) * sum(s)
    rng = np.random.default_rng(8)
    for seed in range(6):
        g = gen_barabasi_albert(50, 2, seed=seed)
        s = rng.uniform(0.05, 0.9, g.n)
        config = MediaConfig(alpha=1.0, beta=float(rng.uniform(0.1, 1.0)),
                             gamma=float(rng.uniform(0.0, 0.2)))
        z, z_M = nonstubborn_equilibrium(g, s, config, tol=1e-12)
        s_M = min((1.0 + config.gamma) * s.mean(), 1.0)
        assert z.sum() + z_M == pytest.approx(s.sum() + s_M, abs=1e-8)
        assert z.sum() <= (1.0 + (1.0 + config.gamma) / g.n) * s.sum() + 1e-8


def test_influence_cap_on_complete_graph():
    # 45 nodes at 0.5, gamma = 0.01: the persuadable source cannot push the
    # sum past (1 + 1.01/45) * 22.5
    g = complete_graph(45)
    s = np.full(45, 0.5)
    z, z_M = nonstubborn_equilibrium(g, s, MediaConfig(1.0, 0.025, 0.01),
                                     tol=1e-12)
    cap = (1.0 + 1.01 / 45.0) * 22.5
    assert z.sum() <= cap + 1e-10
    assert z.sum() >= 22.5  # source starts above the mean, pull is upward


def test_matches_dense_oracle_on_augmented_graph():
    rng = np.random.default_rng(12)
    for seed in range(5):
        g = gen_barabasi_albert(30, 2, seed=seed)
        s = rng.uniform(0.0, 0.8, g.n)
        config = MediaConfig(1.0, 0.4, 0.05)
        z, z_M = nonstubborn_equilibrium(g, s, config, tol=1e-12)
        s_M = min((1.0 + config.gamma) * s.mean(), 1.0)
        aug = augment_with_source(g, config.beta, s_M).build_graph()
        want = dense_solve(fj_matrix(aug), np.concatenate([s, [s_M]]))
        assert np.max(np.abs(np.concatenate([z, [z_M]]) - want)) <= 1e-8


def test_source_innate_caps_at_one():
    g = gen_random_regular(10, 4, seed=3)
    s = np.full(10, 0.999)
    z, z_M = nonstubborn_equilibrium(g, s, MediaConfig(1.0, 0.5, 0.5))
    # s_M capped at 1, everything stays in the box
    assert z.max() <= 1.0 + 1e-12
    assert z_M <= 1.0 + 1e-12
    assert z.sum() + z_M == pytest.approx(10 * 0.999 + 1.0, abs=1e-8)


def test_alpha_below_one_rejected():
    g = single_node_graph()
    with pytest.raises(ValueError, match="alpha"):
        nonstubborn_equilibrium(g, np.array([0.5]), MediaConfig(0.9, 0.5, 0.1))
