"""Dense primal-dual interior-point solver for the localization SDP.

Solves

    min  sum(u) + sum(v)
    s.t. <A_r, Z> + u_r - v_r = b_r   (measurement rows)
         <P_j, Z> = p_j               (identity-pinning rows)
         Z >= 0 (psd),  u, v >= 0

with a Mehrotra-style predictor-corrector using Nesterov-Todd scaling for
the semidefinite block. The Schur complement has one row per constraint, so
the per-iteration cost is one dense Cholesky of that system plus a handful
of k x k matrix products; desk-scale problems (k <= ~100, a few hundred to
a couple thousand rows) need no sparsity machinery beyond the sparse
constraint rows themselves.

Blind nodes with no path of measurements to any anchor leave the optimal
face unbounded (their Gram entries can drift freely), which stalls the
interior point method. Those nodes are detected up front, removed from the
matrix variable, placed at the anchor centroid, and spliced back into the
returned solution as a rank-one-consistent extension (which preserves
positive semidefiniteness of the full matrix).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from ..channel import RangeMeasurements
from .builder import SdpProblem, build_relaxation


class SolveStatus(enum.Enum):
    OPTIMAL = "optimal"
    MAX_ITER = "max_iter"
    NUMERICAL_TROUBLE = "numerical_trouble"


@dataclass(frozen=True)
class SolveOptions:
    max_iter: int = 100
    gap_tol: float = 1e-7     # relative duality gap
    feas_tol: float = 1e-8    # relative primal/dual residual
    init_scale: float | None = None  # Z0 = init_scale * I; defaults to max(1, max|b|)
    step_damping: float = 0.98
    verbose: bool = False


@dataclass(frozen=True)
class SolverStats:
    iterations: int
    gap: float
    pinfeas: float
    dinfeas: float
    status: SolveStatus


@dataclass(frozen=True)
class SdpSolution:
    estimated_positions: np.ndarray  # (m, 2)
    gram: np.ndarray                 # (m, m) Y block
    matrix: np.ndarray               # full (2+m, 2+m) psd solution
    slack_l1: float
    objective_value: float           # squared-residual objective at the extracted positions
    stats: SolverStats

    def dump(self, path) -> None:
        with open(path, "w") as f:
            f.write(f"status={self.stats.status.value} iters={self.stats.iterations} "
                    f"gap={self.stats.gap:.3e} slack_l1={self.slack_l1:.6e} "
                    f"objective={self.objective_value:.6e}\n")
            np.savetxt(f, self.matrix, fmt="%.9e")


def solve_sdp(problem: SdpProblem, opts: SolveOptions | None = None) -> SdpSolution:
    opts = opts or SolveOptions()
    keep = _anchored_nodes(problem)
    if keep.all():
        return _solve_reduced(problem, opts)
    return _solve_with_reduction(problem, keep, opts)


def extract_positions(solution: SdpSolution) -> tuple[np.ndarray, np.ndarray]:
    """X-block positions and per-node rank indicators Y_ii - ||x_i||^2.

    A zero indicator means the relaxation localized that node exactly; a
    positive one means its mass is spread over a feasible region.
    """
    pos = solution.estimated_positions
    trace_ind = np.diag(solution.gram) - (pos ** 2).sum(axis=1)
    return pos, trace_ind


# ---------------------------------------------------------------------------
# reduction of unanchored components


def _anchored_nodes(problem: SdpProblem) -> np.ndarray:
    m = problem.m
    parent = np.arange(m)

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    bb = problem.edge_kind == "bb"
    for i, j in zip(problem.edge_i[bb], problem.edge_j[bb]):
        ri, rj = find(int(i)), find(int(j))
        if ri != rj:
            parent[ri] = rj
    roots = {find(int(i)) for i in problem.edge_i[~bb]}
    return np.array([find(i) in roots for i in range(m)], dtype=bool)


def _fallback_point(anchors: np.ndarray) -> np.ndarray:
    if len(anchors):
        return anchors.mean(axis=0)
    return np.zeros(2)


def _solve_with_reduction(problem: SdpProblem, keep: np.ndarray,
                          opts: SolveOptions) -> SdpSolution:
    m = problem.m
    kept_idx = np.nonzero(keep)[0]
    new_index = -np.ones(m, dtype=int)
    new_index[kept_idx] = np.arange(len(kept_idx))
    fallback = _fallback_point(problem.anchors)

    row_kept = np.array([
        keep[problem.edge_i[r]] and
        (problem.edge_kind[r] == "ba" or keep[problem.edge_j[r]])
        for r in range(problem.n_meas)
    ])
    if len(kept_idx) and row_kept.any():
        kind_k = problem.edge_kind[row_kept]
        j_k = problem.edge_j[row_kept].copy()
        bbm = kind_k == "bb"
        j_k[bbm] = new_index[j_k[bbm]]
        sub = RangeMeasurements(
            kind=kind_k,
            i=new_index[problem.edge_i[row_kept]],
            j=j_k,
            true_m=np.zeros(int(row_kept.sum())),
            label=np.zeros(int(row_kept.sum()), dtype=int),
            measured_m=np.sqrt(problem.rhs[:problem.n_meas][row_kept]),
        )
        red_problem = build_relaxation(sub, problem.anchors, len(kept_idx))
        red = _solve_reduced(red_problem, opts)
        red_pos = red.estimated_positions
        stats = red.stats
        slack = red.slack_l1
    else:
        red_pos = np.empty((0, 2))
        stats = SolverStats(0, 0.0, 0.0, 0.0, SolveStatus.OPTIMAL)
        slack = 0.0

    positions = np.tile(fallback, (m, 1))
    positions[kept_idx] = red_pos
    Z = _rank_consistent_matrix(positions)
    if len(kept_idx):
        # keep the solved Gram entries for the anchored sub-block
        sub_ix = 2 + new_index[kept_idx]
        full_ix = 2 + kept_idx
        Z[np.ix_(full_ix, full_ix)] = red.matrix[np.ix_(sub_ix, sub_ix)]
        Z[np.ix_([0, 1], full_ix)] = red.matrix[np.ix_([0, 1], sub_ix)]
        Z[np.ix_(full_ix, [0, 1])] = red.matrix[np.ix_(sub_ix, [0, 1])]
    # dropped rows: account their residual as slack
    dropped = ~row_kept
    if dropped.any():
        resid = problem.b[:problem.n_meas][dropped] - \
            (problem.A[:problem.n_meas][dropped] @ Z.ravel())
        slack += float(np.abs(resid).sum())
    gram = Z[2:, 2:]
    obj = _squared_residual_objective(problem, positions)
    return SdpSolution(estimated_positions=positions, gram=gram, matrix=Z,
                       slack_l1=slack, objective_value=obj, stats=stats)


def _rank_consistent_matrix(positions: np.ndarray) -> np.ndarray:
    m = len(positions)
    Z = np.empty((2 + m, 2 + m))
    Z[:2, :2] = np.eye(2)
    Z[:2, 2:] = positions.T
    Z[2:, :2] = positions
    Z[2:, 2:] = positions @ positions.T
    return Z


def _squared_residual_objective(problem: SdpProblem, positions: np.ndarray) -> float:
    Z1 = _rank_consistent_matrix(positions)
    resid = problem.b[:problem.n_meas] - problem.A[:problem.n_meas] @ Z1.ravel()
    return float((resid ** 2).sum())


# ---------------------------------------------------------------------------
# interior-point core


def _solve_reduced(problem: SdpProblem, opts: SolveOptions) -> SdpSolution:
    k = problem.k
    m = problem.m
    M = problem.n_meas
    n_rows = M + 3
    A = problem.A
    A_stack = A.reshape(n_rows * k, k).tocsr()
    b = problem.b
    nu = k + 2 * M  # barrier parameter count

    def Aop(Mat):
        return A @ Mat.ravel()

    def Aadj(y):
        out = (A.T @ y).reshape(k, k)
        return out

    beta = opts.init_scale if opts.init_scale is not None else max(1.0, float(np.abs(b).max()))
    tau = max(1.0, float(np.abs(problem.anchors).max()) if len(problem.anchors) else 1.0)
    Z = beta * np.eye(k)
    S = tau * np.eye(k)
    y = np.zeros(n_rows)
    resid0 = b[:M] - (A[:M] @ Z.ravel())
    u = np.maximum(1.0, np.abs(resid0))
    v = u.copy()
    su = np.ones(M)
    sv = np.ones(M)

    norm_b = 1.0 + np.linalg.norm(b)
    norm_c = 1.0 + np.sqrt(2.0 * M)
    gamma = opts.step_damping
    status = SolveStatus.MAX_ITER
    it = 0
    relgap = np.inf
    pres = dres = np.inf

    for it in range(1, opts.max_iter + 1):
        gap = float(np.vdot(Z, S) + u @ su + v @ sv)
        mu = gap / nu

        r_p = b - Aop(Z)
        r_p[:M] -= u - v
        r_dz = -Aadj(y) - S
        r_du = 1.0 - y[:M] - su
        r_dv = 1.0 + y[:M] - sv
        pres = np.linalg.norm(r_p) / norm_b
        dres = np.sqrt(np.linalg.norm(r_dz) ** 2 + r_du @ r_du + r_dv @ r_dv) / norm_c

        # termination is checked on the shrunk slack readout: subtracting
        # min(u, v) per row preserves u - v (hence feasibility) and can only
        # lower the objective and the gap
        shrink = np.minimum(u, v)
        u_r = u - shrink
        v_r = v - shrink
        gap_r = float(np.vdot(Z, S) + u_r @ su + v_r @ sv)
        pobj = float(u_r.sum() + v_r.sum())
        dobj = float(b @ y)
        relgap = gap_r / (1.0 + abs(pobj) + abs(dobj))

        if relgap <= opts.gap_tol and pres <= opts.feas_tol and dres <= opts.feas_tol:
            u, v = u_r, v_r
            status = SolveStatus.OPTIMAL
            break

        # Degenerate problems (flat optimal faces, e.g. under-determined
        # nodes) can halt the iteration just shy of the strict tolerances:
        # steps collapse or a factorization fails while the residuals are
        # already at noise level. Such iterates are kept as optimal at a
        # slightly relaxed feasibility level rather than discarded.
        near_opt = (relgap <= 10.0 * opts.gap_tol
                    and pres <= 1e3 * opts.feas_tol
                    and dres <= 1e3 * opts.feas_tol)

        def halt():
            nonlocal u, v, status
            if near_opt:
                u, v = u_r, v_r
                status = SolveStatus.OPTIMAL
            else:
                status = SolveStatus.NUMERICAL_TROUBLE

        try:
            Lz = np.linalg.cholesky(Z)
            Ls = np.linalg.cholesky(S)
        except np.linalg.LinAlgError:
            halt()
            break

        # Nesterov-Todd scaling: W = R R', R'SR = R^-1 Z R^-T = diag(lam)
        Usv, lam, Vt = np.linalg.svd(Ls.T @ Lz)
        lam = np.maximum(lam, 1e-300)
        R = Lz @ (Vt.T * lam ** -0.5)
        Rinv = (lam ** -0.5)[:, None] * (Usv.T @ Ls.T)
        W = R @ R.T

        Du = u / su
        Dv = v / sv

        H = _schur(A, A_stack, W, n_rows, k)
        H[np.arange(M), np.arange(M)] += Du + Dv
        try:
            Hf = sla.cho_factor(H, lower=True, check_finite=False)
        except np.linalg.LinAlgError:
            Hf = _regularized_cho(H)
            if Hf is None:
                halt()
                break

        WrdW = W @ r_dz @ W

        def solve_direction(Ks, gu, gv):
            # Ks is the semidefinite-block target in the scaled space:
            # the direction satisfies dZs + dSs = Ks with dZs = Rinv dZ Rinv',
            # dSs = R' dS R. Recovering dZ through R (rather than W) keeps
            # the cancellation error at sqrt(||W||) scale.
            Gz = R @ Ks @ R.T
            rhs_y = r_p - Aop(Gz) + Aop(WrdW)
            rhs_y[:M] -= gu - gv - Du * r_du + Dv * r_dv
            dy = sla.cho_solve(Hf, rhs_y, check_finite=False)
            for _ in range(2):  # iterative refinement keeps endgame steps long
                dy += sla.cho_solve(Hf, rhs_y - H @ dy, check_finite=False)
            dS = r_dz - Aadj(dy)
            dS = 0.5 * (dS + dS.T)
            dsu = r_du - dy[:M]
            dsv = r_dv + dy[:M]
            dSs = R.T @ dS @ R
            dZs = Ks - dSs
            dZs = 0.5 * (dZs + dZs.T)
            dZ = R @ dZs @ R.T
            dZ = 0.5 * (dZ + dZ.T)
            du = gu - Du * dsu
            dv = gv - Dv * dsv
            return dZ, du, dv, dy, dS, dsu, dsv, dZs, dSs

        lam_isqrt = lam ** -0.5

        def psd_step_scaled(dXs):
            # max t with diag(lam) + t*dXs psd
            B = lam_isqrt[:, None] * dXs * lam_isqrt[None, :]
            w = float(np.linalg.eigvalsh(0.5 * (B + B.T))[0])
            return np.inf if w >= 0.0 else -1.0 / w

        # predictor (affine direction)
        Ks_aff = -np.diag(lam)
        dZ, du, dv, dy, dS, dsu, dsv, dZs, dSs = solve_direction(Ks_aff, -u, -v)
        ap = min(psd_step_scaled(dZs), _pos_step(u, du), _pos_step(v, dv))
        ad = min(psd_step_scaled(dSs), _pos_step(su, dsu), _pos_step(sv, dsv))
        a_p = min(1.0, ap)
        a_d = min(1.0, ad)
        mu_aff = (np.vdot(Z + a_p * dZ, S + a_d * dS)
                  + (u + a_p * du) @ (su + a_d * dsu)
                  + (v + a_p * dv) @ (sv + a_d * dsv)) / nu
        mu_aff = max(mu_aff, 0.0)
        sigma = min(1.0, max((mu_aff / mu) ** 3, 1e-10)) if mu > 0 else 0.1

        # corrector (Mehrotra second-order term in the scaled space)
        Hm = 0.5 * (dZs @ dSs + dSs @ dZs)
        rhs_s = sigma * mu * np.eye(k) - np.diag(lam ** 2) - Hm
        Kmat = 2.0 * rhs_s / (lam[:, None] + lam[None, :])
        gu = (sigma * mu - du * dsu) / su - u
        gv = (sigma * mu - dv * dsv) / sv - v

        dZ, du, dv, dy, dS, dsu, dsv, dZs, dSs = solve_direction(Kmat, gu, gv)
        ap = min(psd_step_scaled(dZs), _pos_step(u, du), _pos_step(v, dv))
        ad = min(psd_step_scaled(dSs), _pos_step(su, dsu), _pos_step(sv, dsv))
        a_p = min(1.0, gamma * ap)
        a_d = min(1.0, gamma * ad)
        if opts.verbose:
            print(f"it={it} mu={mu:.3e} relgap={relgap:.3e} pres={pres:.3e} "
                  f"dres={dres:.3e} sigma={sigma:.2e} ap={a_p:.3f} ad={a_d:.3f}")
        if a_p < 1e-8 and a_d < 1e-8:
            halt()
            break

        # reconstruct through the scaling so the iterates stay numerically psd
        Z = R @ (np.diag(lam) + a_p * dZs) @ R.T
        Z = 0.5 * (Z + Z.T)
        S = Rinv.T @ (np.diag(lam) + a_d * dSs) @ Rinv
        S = 0.5 * (S + S.T)
        u += a_p * du
        v += a_p * dv
        y += a_d * dy
        su += a_d * dsu
        sv += a_d * dsv

    positions = Z[:2, 2:].T.copy()
    gram = Z[2:, 2:].copy()
    slack = float(u.sum() + v.sum())
    obj = _squared_residual_objective(problem, positions)
    stats = SolverStats(iterations=it, gap=relgap, pinfeas=pres, dinfeas=dres,
                        status=status)
    return SdpSolution(estimated_positions=positions, gram=gram, matrix=Z,
                       slack_l1=slack, objective_value=obj, stats=stats)


def _schur(A, A_stack, W, n_rows, k):
    """H[e, f] = <A_e, W A_f W>, plus exact symmetrization."""
    T1 = A_stack @ W                        # rows f*k..f*k+k-1 hold A_f W
    T1 = np.asarray(T1).reshape(n_rows, k, k)
    tmp = T1.transpose(1, 0, 2).reshape(k, n_rows * k)
    U = (W @ tmp).reshape(k, n_rows, k).transpose(1, 0, 2)  # U[f] = W A_f W
    H = A @ U.reshape(n_rows, k * k).T
    H = np.asarray(H)
    return 0.5 * (H + H.T)


def _regularized_cho(H):
    n = H.shape[0]
    reg = 1e-12 * (np.trace(H) / n + 1.0)
    for _ in range(6):
        try:
            return sla.cho_factor(H + reg * np.eye(n), lower=True,
                                  check_finite=False)
        except np.linalg.LinAlgError:
            reg *= 100.0
    return None


def _pos_step(x, dx):
    neg = dx < 0
    if not neg.any():
        return np.inf
    return float((-x[neg] / dx[neg]).min())
