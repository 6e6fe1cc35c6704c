"""Relaxation builder and interior-point solver tests."""

import numpy as np
import pytest

from sdploc import (ChannelKind, ChannelModel, EmptyProblem, SolveOptions,
                    SolveStatus, build_edge_sets, build_relaxation,
                    extract_positions, generate_network, measure_ranges,
                    solve_sdp)
from sdploc.channel import Propagation, RangeMeasurements
from sdploc.network import Network

OPTS = SolveOptions(init_scale=1800.0)


def _measurements(kind, i, j, d):
    n = len(d)
    return RangeMeasurements(
        kind=np.asarray(kind), i=np.asarray(i), j=np.asarray(j),
        true_m=np.asarray(d, dtype=float),
        label=np.full(n, int(Propagation.NONE)),
        measured_m=np.asarray(d, dtype=float))


def _ideal_instance(seed, m, n_anchors, rho=15.0, box=(30.0, 30.0)):
    net = generate_network(seed, box, m, n_anchors)
    edges = build_edge_sets(net, rho)
    meas = measure_ranges(net, edges, None,
                          ChannelModel(enabled=ChannelKind.IDEAL))
    return net, meas


def test_builder_dimensions_and_rows():
    net, meas = _ideal_instance(1, 20, 5)
    prob = build_relaxation(meas, net.anchors, 20)
    assert prob.k == 22
    assert prob.n_meas == len(meas)
    assert prob.A.shape == (len(meas) + 3, 22 * 22)
    # pin rows: Z00 = 1, Z11 = 1, Z01 + Z10 = 0
    np.testing.assert_allclose(prob.rhs[-3:], [1.0, 1.0, 0.0])
    # every constraint matrix is symmetric
    for r in range(prob.A.shape[0]):
        Ar = prob.A[r].toarray().reshape(22, 22)
        np.testing.assert_allclose(Ar, Ar.T)


def test_builder_rows_evaluate_truth():
    # <A_r, Z*> + const = rhs at the rank-1 ground-truth lift
    net, meas = _ideal_instance(2, 15, 4)
    prob = build_relaxation(meas, net.anchors, 15)
    X = net.blind.T
    Z = np.block([[np.eye(2), X], [X.T, X.T @ X]])
    vals = prob.A @ Z.ravel() + prob.const
    np.testing.assert_allclose(vals, prob.rhs, atol=1e-9)


def test_builder_empty_raises():
    with pytest.raises(EmptyProblem):
        build_relaxation(_measurements([], [], [], []), np.empty((0, 2)), 3)


def test_builder_synthetic_row_counts():
    # m=50 with 180 blind-blind and 95 blind-anchor measurements
    rng = np.random.default_rng(0)
    bb = rng.integers(0, 50, size=(180, 2))
    bb[:, 1] = (bb[:, 0] + 1 + bb[:, 1] % 49) % 50  # ensure i != j
    ba = np.column_stack([rng.integers(0, 50, 95), rng.integers(0, 10, 95)])
    anchors = rng.uniform(0, 30, size=(10, 2))
    meas = _measurements(["bb"] * 180 + ["ba"] * 95,
                         np.concatenate([bb[:, 0], ba[:, 0]]),
                         np.concatenate([bb[:, 1], ba[:, 1]]),
                         np.full(275, 5.0))
    prob = build_relaxation(meas, anchors, 50)
    assert prob.n_meas == 275
    assert prob.k == 52
    assert prob.A.shape == (278, 52 * 52)


def test_trilateration_oracle():
    # one node, three anchors: the unique intersection point is recovered
    anchors = np.array([[0.0, 0.0], [10.0, 0.0], [0.0, 10.0]])
    truth = np.array([[3.0, 4.0]])
    d = np.linalg.norm(anchors - truth[0], axis=1)
    meas = _measurements(["ba"] * 3, [0, 0, 0], [0, 1, 2], d)
    prob = build_relaxation(meas, anchors, 1)
    assert prob.k == 3
    assert prob.A.shape[0] == 6  # 3 measurement rows + 3 pin rows
    sol = solve_sdp(prob, OPTS)
    assert sol.stats.status is SolveStatus.OPTIMAL
    np.testing.assert_allclose(sol.estimated_positions, truth, atol=1e-4)
    pos, trace_ind = extract_positions(sol)
    assert trace_ind[0] < 1e-6
    # recompute the indicator by direct arithmetic on the matrix blocks
    direct = sol.matrix[2, 2] - sol.matrix[0, 2] ** 2 - sol.matrix[1, 2] ** 2
    assert trace_ind[0] == pytest.approx(direct, abs=1e-12)


def test_under_determined_still_feasible():
    # a single anchor edge: any point on the circle is feasible, slack ~0,
    # and the spread mass makes the rank indicator strictly positive
    anchors = np.array([[0.0, 0.0]])
    meas = _measurements(["ba"], [0], [0], [5.0])
    sol = solve_sdp(build_relaxation(meas, anchors, 1), OPTS)
    assert sol.stats.status is SolveStatus.OPTIMAL
    assert sol.slack_l1 < 1e-6
    _pos, trace_ind = extract_positions(sol)
    assert trace_ind[0] > 1.0


def test_two_anchor_edges_feasible():
    # two anchors only: the point is not unique, but slacks stay ~0
    anchors = np.array([[0.0, 0.0], [10.0, 0.0]])
    truth = np.array([3.0, 4.0])
    d = np.linalg.norm(anchors - truth, axis=1)
    meas = _measurements(["ba", "ba"], [0, 0], [0, 1], d)
    sol = solve_sdp(build_relaxation(meas, anchors, 1), OPTS)
    assert sol.stats.status is SolveStatus.OPTIMAL
    assert sol.slack_l1 < 1e-6


def test_exact_recovery_ideal_network():
    net, meas = _ideal_instance(3, 25, 8)
    prob = build_relaxation(meas, net.anchors, 25)
    sol = solve_sdp(prob, OPTS)
    assert sol.stats.status is SolveStatus.OPTIMAL
    err = np.linalg.norm(sol.estimated_positions - net.blind, axis=1)
    assert err.max() < 1e-4
    assert sol.slack_l1 < 1e-6
    # rank indicators vanish when the relaxation is exact
    _pos, trace_ind = extract_positions(sol)
    assert np.abs(trace_ind).max() < 1e-4


def test_psd_certificate_every_solve():
    for seed in range(5):
        net, meas = _ideal_instance(seed, 15, 5)
        sol = solve_sdp(build_relaxation(meas, net.anchors, 15), OPTS)
        w = np.linalg.eigvalsh(sol.matrix)
        assert w.min() >= -1e-7 * max(1.0, w.max())
        # top-left block pinned to the identity
        np.testing.assert_allclose(sol.matrix[:2, :2], np.eye(2), atol=1e-6)


def test_gram_consistency():
    net, meas = _ideal_instance(4, 12, 5)
    sol = solve_sdp(build_relaxation(meas, net.anchors, 12), OPTS)
    np.testing.assert_allclose(sol.gram, sol.matrix[2:, 2:])
    np.testing.assert_allclose(sol.estimated_positions, sol.matrix[:2, 2:].T)


def test_translation_covariance():
    net, meas = _ideal_instance(7, 10, 6)
    shift = np.array([4.0, -2.0])
    shifted = Network(blind=net.blind + shift, anchors=net.anchors + shift,
                      box=net.box)
    sol_a = solve_sdp(build_relaxation(meas, net.anchors, 10), OPTS)
    sol_b = solve_sdp(build_relaxation(meas, shifted.anchors, 10), OPTS)
    np.testing.assert_allclose(sol_b.estimated_positions,
                               sol_a.estimated_positions + shift, atol=1e-5)


def test_scale_covariance():
    net, meas = _ideal_instance(8, 10, 6)
    s = 2.0
    meas_s = _measurements(meas.kind, meas.i, meas.j, s * meas.measured_m)
    sol_a = solve_sdp(build_relaxation(meas, net.anchors, 10), OPTS)
    sol_b = solve_sdp(build_relaxation(meas_s, s * net.anchors, 10), OPTS)
    np.testing.assert_allclose(sol_b.estimated_positions,
                               s * sol_a.estimated_positions, atol=2e-5)


def test_unanchored_component_reduction():
    # nodes 0-1 anchored; nodes 2-3 form a component with no anchor path
    anchors = np.array([[0.0, 0.0], [10.0, 0.0], [5.0, 8.0]])
    blind = np.array([[4.0, 3.0], [6.0, 3.0], [40.0, 40.0], [41.0, 40.0]])
    kinds, ii, jj, dd = [], [], [], []
    for i in (0, 1):
        for r in range(3):
            kinds.append("ba")
            ii.append(i)
            jj.append(r)
            dd.append(np.linalg.norm(blind[i] - anchors[r]))
    for i, j in ((0, 1), (2, 3)):
        kinds.append("bb")
        ii.append(i)
        jj.append(j)
        dd.append(np.linalg.norm(blind[i] - blind[j]))
    meas = _measurements(kinds, ii, jj, dd)
    sol = solve_sdp(build_relaxation(meas, anchors, 4), OPTS)
    assert sol.stats.status is SolveStatus.OPTIMAL
    np.testing.assert_allclose(sol.estimated_positions[:2], blind[:2], atol=1e-4)
    centroid = anchors.mean(axis=0)
    np.testing.assert_allclose(sol.estimated_positions[2:],
                               [centroid, centroid], atol=1e-9)
    # the extended matrix still certifies PSD
    w = np.linalg.eigvalsh(sol.matrix)
    assert w.min() >= -1e-7 * max(1.0, w.max())
    assert sol.matrix.shape == (6, 6)


def test_noisy_solve_reaches_optimal():
    net = generate_network(7, (30.0, 30.0), 30, 8)
    edges = build_edge_sets(net, 15.0)
    meas = measure_ranges(net, edges, None,
                          ChannelModel(enabled=ChannelKind.NOISE_ONLY),
                          rng=np.random.default_rng(7))
    sol = solve_sdp(build_relaxation(meas, net.anchors, 30), OPTS)
    assert sol.stats.status is SolveStatus.OPTIMAL
    assert sol.stats.gap <= 1e-6
    # noisy data needs nonzero slack and lands within a few meters
    assert sol.slack_l1 > 0.1
    err = np.linalg.norm(sol.estimated_positions - net.blind, axis=1).mean()
    assert err < 3.0


def test_dump_roundtrip(tmp_path):
    net, meas = _ideal_instance(8, 5, 3)
    prob = build_relaxation(meas, net.anchors, 5)
    prob.dump(tmp_path / "prob.txt")
    sol = solve_sdp(prob, OPTS)
    sol.dump(tmp_path / "sol.txt")
    text = (tmp_path / "sol.txt").read_text()
    assert text.startswith("status=optimal")
    arr = np.loadtxt((tmp_path / "sol.txt").open().readlines()[1:])
    np.testing.assert_allclose(arr, sol.matrix, atol=1e-8)
