"""Semidefinite relaxation of the squared-distance system.

The nonconvex system || s_i - s_j ||^2 = dhat_ij^2 is lifted to a matrix
variable

    Z = [[I_2, X], [X^T, Y]],  Z >= 0  (positive semidefinite)

where column i of X is the position of blind node i and Y relaxes X^T X.
Each measurement becomes one linear equality on Z plus a pair of nonnegative
slacks (u, v) absorbing measurement error:

    blind-blind (i, j):  Y_ii - 2 Y_ij + Y_jj + u - v = dhat^2
    blind-anchor (i, r): ||a_r||^2 - 2 a_r . x_i + Y_ii + u - v = dhat^2

Three more equality rows pin the top-left 2x2 block to the identity. The
conic stage minimizes the total absolute slack sum(u + v); the exact
squared-residual objective is handled afterwards by local refinement.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from ..channel import RangeMeasurements


class EmptyProblem(ValueError):
    """Raised when there are no range measurements to constrain the SDP."""


@dataclass(frozen=True)
class SdpProblem:
    m: int                    # blind-node count
    anchors: np.ndarray       # (n_anchors, 2)
    k: int                    # matrix dimension, 2 + m
    n_meas: int               # measurement rows (pins excluded)
    A: sp.csr_matrix          # (n_meas + 3, k*k), row r is vec of the r-th constraint matrix
    rhs: np.ndarray           # (n_meas + 3,) squared measured distances; pins 1, 1, 0
    const: np.ndarray         # per-row constant term (||a_r||^2 for anchor rows)
    edge_kind: np.ndarray     # (n_meas,) 'bb'/'ba'
    edge_i: np.ndarray        # (n_meas,)
    edge_j: np.ndarray        # (n_meas,)

    @property
    def b(self) -> np.ndarray:
        """Right-hand side with row constants folded in (what the solver uses)."""
        return self.rhs - self.const

    def dump(self, path) -> None:
        """Human-readable constraint listing for debugging."""
        with open(path, "w") as f:
            f.write(f"sdp problem: m={self.m} k={self.k} rows={self.n_meas}+3\n")
            coo = self.A.tocoo()
            entries: dict[int, list[str]] = {}
            for r, c, v in zip(coo.row, coo.col, coo.data):
                entries.setdefault(int(r), []).append(
                    f"Z[{c // self.k},{c % self.k}]*{v:.6g}")
            for r in range(self.A.shape[0]):
                kind = (f"{self.edge_kind[r]}({self.edge_i[r]},{self.edge_j[r]})"
                        if r < self.n_meas else "pin")
                f.write(f"row {r} [{kind}] " + " + ".join(entries.get(r, []))
                        + f" + {self.const[r]:.6g} = {self.rhs[r]:.6g}\n")


def build_relaxation(measurements: RangeMeasurements, anchors: np.ndarray,
                     m: int) -> SdpProblem:
    """One constraint row per measurement plus the three identity-pinning rows."""
    anchors = np.asarray(anchors, dtype=float).reshape(-1, 2)
    n_meas = len(measurements)
    if n_meas == 0:
        raise EmptyProblem("no range measurements")
    k = 2 + m
    rows: list[int] = []
    cols: list[int] = []
    vals: list[float] = []
    rhs = np.zeros(n_meas + 3)
    const = np.zeros(n_meas + 3)

    def put(r, p, q, v):
        rows.append(r)
        cols.append(p * k + q)
        vals.append(v)

    for r in range(n_meas):
        i = int(measurements.i[r])
        j = int(measurements.j[r])
        d = float(measurements.measured_m[r])
        rhs[r] = d * d
        if measurements.kind[r] == "bb":
            if not (0 <= i < m and 0 <= j < m):
                raise ValueError(f"blind index out of range in row {r}")
            put(r, 2 + i, 2 + i, 1.0)
            put(r, 2 + j, 2 + j, 1.0)
            put(r, 2 + i, 2 + j, -1.0)
            put(r, 2 + j, 2 + i, -1.0)
        else:
            if not (0 <= i < m and 0 <= j < len(anchors)):
                raise ValueError(f"index out of range in anchor row {r}")
            ax, ay = anchors[j]
            put(r, 0, 2 + i, -ax)
            put(r, 2 + i, 0, -ax)
            put(r, 1, 2 + i, -ay)
            put(r, 2 + i, 1, -ay)
            put(r, 2 + i, 2 + i, 1.0)
            const[r] = ax * ax + ay * ay

    # pin rows: Z00 = 1, Z11 = 1, Z01 = 0
    put(n_meas, 0, 0, 1.0)
    rhs[n_meas] = 1.0
    put(n_meas + 1, 1, 1, 1.0)
    rhs[n_meas + 1] = 1.0
    put(n_meas + 2, 0, 1, 1.0)
    put(n_meas + 2, 1, 0, 1.0)
    rhs[n_meas + 2] = 0.0

    A = sp.csr_matrix((vals, (rows, cols)), shape=(n_meas + 3, k * k))
    return SdpProblem(m=m, anchors=anchors, k=k, n_meas=n_meas, A=A,
                      rhs=rhs, const=const,
                      edge_kind=np.asarray(measurements.kind),
                      edge_i=np.asarray(measurements.i, dtype=int),
                      edge_j=np.asarray(measurements.j, dtype=int))
