"""Network generation and edge-set tests."""

import numpy as np
import pytest

from sdploc import (ConnectivityReport, EdgeSets, Network, build_edge_sets,
                    connectivity_report, generate_network, load_network,
                    save_network)
from sdploc.network import anchored_mask


def test_shapes_and_bounds():
    net = generate_network(1, (30.0, 30.0), 50, 10)
    assert net.blind.shape == (50, 2)
    assert net.anchors.shape == (10, 2)
    assert net.m == 50 and net.n_anchors == 10
    for pts in (net.blind, net.anchors):
        assert np.all(pts >= 0.0) and np.all(pts <= 30.0)


def test_determinism_bit_identical():
    a = generate_network(7, (30.0, 30.0), 40, 8)
    b = generate_network(7, (30.0, 30.0), 40, 8)
    assert np.array_equal(a.blind, b.blind)
    assert np.array_equal(a.anchors, b.anchors)
    c = generate_network(8, (30.0, 30.0), 40, 8)
    assert not np.array_equal(a.blind, c.blind)


def test_uniformity_binomial():
    # each quadrant of the box should hold ~25% of points, within 4 sigma
    net = generate_network(3, (30.0, 30.0), 4000, 0)
    n = net.m
    p = 0.25
    sigma = np.sqrt(n * p * (1 - p))
    for qx in (0, 1):
        for qy in (0, 1):
            count = np.count_nonzero(
                (net.blind[:, 0] >= 15.0 * qx) & (net.blind[:, 0] < 15.0 * (qx + 1))
                & (net.blind[:, 1] >= 15.0 * qy) & (net.blind[:, 1] < 15.0 * (qy + 1)))
            assert abs(count - n * p) < 4 * sigma


def test_invalid_arguments():
    with pytest.raises(ValueError):
        generate_network(0, (0.0, 30.0), 5, 2)
    with pytest.raises(ValueError):
        generate_network(0, (30.0, 30.0), -1, 2)
    net = generate_network(0, (30.0, 30.0), 5, 2)
    with pytest.raises(ValueError):
        build_edge_sets(net, 0.0)


@pytest.mark.parametrize("seed,m,n_anchors,rho", [
    (0, 30, 5, 10.0), (1, 50, 10, 15.0), (2, 80, 12, 8.0), (3, 200, 20, 5.0),
])
def test_edge_sets_match_brute_force(seed, m, n_anchors, rho):
    net = generate_network(seed, (30.0, 30.0), m, n_anchors)
    edges = build_edge_sets(net, rho)
    bb = {(i, j) for i in range(m) for j in range(i + 1, m)
          if np.linalg.norm(net.blind[i] - net.blind[j]) <= rho}
    ba = {(i, r) for i in range(m) for r in range(n_anchors)
          if np.linalg.norm(net.blind[i] - net.anchors[r]) <= rho}
    assert {tuple(e) for e in edges.blind_blind} == bb
    assert {tuple(e) for e in edges.blind_anchor} == ba
    assert all(i < j for i, j in edges.blind_blind)


def test_edge_count_monotone_in_rho():
    net = generate_network(5, (30.0, 30.0), 60, 10)
    counts = [build_edge_sets(net, rho).n_edges for rho in (5, 10, 15, 20, 25)]
    assert counts == sorted(counts)
    # at rho covering the whole box every pair is connected
    full = build_edge_sets(net, 30.0 * np.sqrt(2))
    assert len(full.blind_blind) == 60 * 59 // 2
    assert len(full.blind_anchor) == 60 * 10


def test_boundary_inclusive():
    net = Network(blind=np.array([[0.0, 0.0], [3.0, 0.0]]),
                  anchors=np.array([[0.0, 4.0]]), box=(10.0, 10.0))
    edges = build_edge_sets(net, 3.0)
    assert [tuple(e) for e in edges.blind_blind] == [(0, 1)]
    edges = build_edge_sets(net, 4.0)
    assert (0, 0) in {tuple(e) for e in edges.blind_anchor}


def test_connectivity_report_and_mask():
    # nodes 0-1 linked to each other and an anchor; node 2 isolated
    net = Network(blind=np.array([[0.0, 0.0], [1.0, 0.0], [20.0, 20.0]]),
                  anchors=np.array([[0.0, 1.0]]), box=(30.0, 30.0))
    edges = build_edge_sets(net, 2.0)
    rep = connectivity_report(net, edges)
    assert isinstance(rep, ConnectivityReport)
    assert list(rep.degrees) == [2, 2, 0]
    assert list(rep.anchor_degrees) == [1, 1, 0]
    assert rep.n_isolated == 1
    assert not rep.connected
    assert list(anchored_mask(edges, 3)) == [True, True, False]


def test_indirectly_anchored_node():
    # chain: node 1 has no anchor link but reaches one through node 0
    net = Network(blind=np.array([[0.0, 0.0], [2.0, 0.0]]),
                  anchors=np.array([[0.0, 2.0]]), box=(30.0, 30.0))
    edges = build_edge_sets(net, 2.5)
    assert len(edges.blind_anchor) == 1  # only node 0 in anchor range
    assert connectivity_report(net, edges).connected


def test_save_load_roundtrip(tmp_path):
    net = generate_network(11, (30.0, 30.0), 25, 6)
    path = tmp_path / "net.txt"
    save_network(net, path)
    back = load_network(path)
    assert back.box == net.box
    assert back.seed == net.seed
    np.testing.assert_allclose(back.blind, net.blind, atol=5e-7)
    np.testing.assert_allclose(back.anchors, net.anchors, atol=5e-7)
    # saved precision keeps edge sets identical away from knife-edge distances
    e1 = build_edge_sets(net, 15.0)
    e2 = build_edge_sets(back, 15.0)
    assert np.array_equal(e1.blind_blind, e2.blind_blind)


def test_empty_network_edges():
    net = generate_network(1, (30.0, 30.0), 0, 0)
    assert net.m == 0 and net.n_anchors == 0
    net = generate_network(0, (30.0, 30.0), 0, 3)
    edges = build_edge_sets(net, 10.0)
    assert isinstance(edges, EdgeSets)
    assert edges.n_edges == 0
    assert connectivity_report(net, edges).connected


def test_degrees_match_brute_force_recount():
    net = generate_network(9, (30.0, 30.0), 60, 8)
    edges = build_edge_sets(net, 12.0)
    rep = connectivity_report(net, edges)
    for i in range(net.m):
        deg = sum(np.linalg.norm(net.blind[i] - net.blind[j]) <= 12.0
                  for j in range(net.m) if j != i)
        adeg = sum(np.linalg.norm(net.blind[i] - a) <= 12.0
                   for a in net.anchors)
        assert rep.degrees[i] == deg + adeg
        assert rep.anchor_degrees[i] == adeg


def test_triangle_degrees():
    net = Network(blind=np.array([[0.0, 0.0], [1.0, 0.0], [0.5, 1.0]]),
                  anchors=np.empty((0, 2)), box=(2.0, 2.0))
    rep = connectivity_report(net, build_edge_sets(net, 2.0))
    assert list(rep.degrees) == [2, 2, 2]
    assert rep.n_isolated == 0
