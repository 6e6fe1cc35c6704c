"""Local refinement of the squared-residual objective.

The conic stage minimizes absolute slacks; this module minimizes the exact
objective

    f(s) = sum_edges (dhat^2 - ||difference||^2)^2

starting from the SDP estimate. A Gauss-Newton step with Levenberg damping
and Armijo backtracking gives fast local convergence while preserving the
only contracts that matter here: the objective never increases, and on
convergence the gradient norm is below tolerance. Blind nodes with no
incident measurement have identically zero gradient and stay put.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import RangeMeasurements


@dataclass(frozen=True)
class RefineOptions:
    max_iter: int = 500
    grad_tol: float = 1e-9        # relative: ||grad|| <= grad_tol * max(1, f)
    backtrack_shrink: float = 0.5
    armijo: float = 1e-4

    def __post_init__(self):
        if self.max_iter < 1:
            raise ValueError("max_iter must be at least 1")
        if self.grad_tol <= 0:
            raise ValueError("grad_tol must be positive")


@dataclass(frozen=True)
class RefineResult:
    positions: np.ndarray
    objective: float
    iterations: int
    converged: bool


def _edge_arrays(meas: RangeMeasurements, anchors: np.ndarray):
    bb = meas.kind == "bb"
    ba = ~bb
    return (meas.i[bb].astype(int), meas.j[bb].astype(int),
            meas.measured_m[bb] ** 2,
            meas.i[ba].astype(int), meas.j[ba].astype(int),
            meas.measured_m[ba] ** 2)


def _residuals(P, bb_i, bb_j, bb_q, ba_i, ba_j, ba_q, anchors):
    parts = []
    if len(bb_i):
        d = P[bb_i] - P[bb_j]
        parts.append(bb_q - (d ** 2).sum(axis=1))
    if len(ba_i):
        d = P[ba_i] - anchors[ba_j]
        parts.append(ba_q - (d ** 2).sum(axis=1))
    if not parts:
        return np.empty(0)
    return np.concatenate(parts)


def objective(positions: np.ndarray, measurements: RangeMeasurements,
              anchors: np.ndarray) -> float:
    """Sum of squared differences of squared distances, over all edges."""
    anchors = np.asarray(anchors, dtype=float).reshape(-1, 2)
    P = np.asarray(positions, dtype=float).reshape(-1, 2)
    r = _residuals(P, *_edge_arrays(measurements, anchors), anchors)
    return float((r ** 2).sum())


def gradient(positions: np.ndarray, measurements: RangeMeasurements,
             anchors: np.ndarray) -> np.ndarray:
    """Analytic gradient, shape (m, 2).

    Each incident edge contributes -4 * (dhat^2 - ||delta||^2) * delta to the
    node on the i side (and the opposite sign on the j side for blind-blind
    edges).
    """
    anchors = np.asarray(anchors, dtype=float).reshape(-1, 2)
    P = np.asarray(positions, dtype=float).reshape(-1, 2)
    bb_i, bb_j, bb_q, ba_i, ba_j, ba_q = _edge_arrays(measurements, anchors)
    g = np.zeros_like(P)
    if len(bb_i):
        d = P[bb_i] - P[bb_j]
        r = bb_q - (d ** 2).sum(axis=1)
        contrib = -4.0 * r[:, None] * d
        np.add.at(g, bb_i, contrib)
        np.add.at(g, bb_j, -contrib)
    if len(ba_i):
        d = P[ba_i] - anchors[ba_j]
        r = ba_q - (d ** 2).sum(axis=1)
        np.add.at(g, ba_i, -4.0 * r[:, None] * d)
    return g


def refine(initial: np.ndarray, measurements: RangeMeasurements,
           anchors: np.ndarray,
           opts: RefineOptions | None = None) -> RefineResult:
    """Descend from ``initial`` to a stationary point of the objective.

    Monotone: the returned objective is never above the starting one.
    """
    opts = opts or RefineOptions()
    anchors = np.asarray(anchors, dtype=float).reshape(-1, 2)
    P = np.array(initial, dtype=float).reshape(-1, 2).copy()
    m = len(P)
    bb_i, bb_j, bb_q, ba_i, ba_j, ba_q = _edge_arrays(measurements, anchors)
    n_edges = len(bb_i) + len(ba_i)

    def f_of(Q):
        r = _residuals(Q, bb_i, bb_j, bb_q, ba_i, ba_j, ba_q, anchors)
        return float((r ** 2).sum()), r

    f, r = f_of(P)
    it = 0
    converged = False
    for it in range(1, opts.max_iter + 1):
        g = gradient(P, measurements, anchors).ravel()
        gnorm = np.linalg.norm(g)
        if gnorm <= opts.grad_tol * max(1.0, f):
            converged = True
            break

        # Jacobian of residuals wrt flattened positions
        J = np.zeros((n_edges, 2 * m))
        if len(bb_i):
            d = P[bb_i] - P[bb_j]
            rows = np.arange(len(bb_i))
            for c in range(2):
                J[rows, 2 * bb_i + c] = -2.0 * d[:, c]
                J[rows, 2 * bb_j + c] = 2.0 * d[:, c]
        if len(ba_i):
            d = P[ba_i] - anchors[ba_j]
            rows = len(bb_i) + np.arange(len(ba_i))
            for c in range(2):
                J[rows, 2 * ba_i + c] = -2.0 * d[:, c]

        JtJ = J.T @ J
        lam = 1e-10 * (np.trace(JtJ) / max(1, 2 * m) + 1.0)
        try:
            step = np.linalg.solve(JtJ + lam * np.eye(2 * m), -J.T @ r)
        except np.linalg.LinAlgError:
            step = -g
        if g @ step >= 0:  # not a descent direction, fall back to steepest descent
            step = -g

        alpha = 1.0
        slope = g @ step
        accepted = False
        for _ in range(60):
            cand = P + alpha * step.reshape(m, 2)
            f_new, r_new = f_of(cand)
            if f_new <= f + opts.armijo * alpha * slope:
                P, f, r = cand, f_new, r_new
                accepted = True
                break
            alpha *= opts.backtrack_shrink
        if not accepted:
            break  # no further progress possible at machine precision

    return RefineResult(positions=P, objective=f, iterations=it,
                        converged=converged)
