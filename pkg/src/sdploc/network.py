"""Random 2-D network generation and radio-range edge sets.

Nodes live in a rectangular box. Blind nodes (unknown position) and anchors
(known position) are placed independently and uniformly. Two nodes are
connected when their Euclidean distance is at most the radio range ``rho``
(boundary inclusive), which yields the blind-blind and blind-anchor edge
sets everything downstream works on.

Indices are 0-based throughout: blind nodes are ``0..m-1``, anchors are
``0..n_anchors-1`` in their own list.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Network:
    """Ground-truth node positions inside a bounded box."""

    blind: np.ndarray        # (m, 2) meters
    anchors: np.ndarray      # (n_anchors, 2) meters
    box: tuple[float, float]  # (width, height) meters
    seed: int | None = None

    @property
    def m(self) -> int:
        return self.blind.shape[0]

    @property
    def n_anchors(self) -> int:
        return self.anchors.shape[0]


@dataclass(frozen=True)
class EdgeSets:
    """Radio-range-limited node pairs.

    ``blind_blind`` holds (i, j) with i < j over blind indices;
    ``blind_anchor`` holds (i, r) with i a blind index and r an anchor index.
    """

    blind_blind: np.ndarray   # (Ns, 2) int
    blind_anchor: np.ndarray  # (Na, 2) int
    rho: float

    @property
    def n_edges(self) -> int:
        return len(self.blind_blind) + len(self.blind_anchor)


@dataclass(frozen=True)
class ConnectivityReport:
    degrees: np.ndarray        # per blind node, blind+anchor links
    anchor_degrees: np.ndarray  # per blind node, anchor links only
    n_isolated: int            # blind nodes with no links at all
    connected: bool            # every blind node reaches an anchor through the graph


def generate_network(seed: int, box: tuple[float, float], m: int,
                     n_anchors: int) -> Network:
    """Draw ``m`` blind nodes then ``n_anchors`` anchors uniformly over the box.

    The same seed always produces bit-identical positions (blind nodes are
    drawn first, then anchors, from a single ``default_rng(seed)`` stream).
    """
    w, h = float(box[0]), float(box[1])
    if w <= 0 or h <= 0:
        raise ValueError(f"box dimensions must be positive, got {box}")
    if m < 0 or n_anchors < 0:
        raise ValueError("node counts must be non-negative")
    rng = np.random.default_rng(seed)
    blind = rng.uniform((0.0, 0.0), (w, h), size=(m, 2))
    anchors = rng.uniform((0.0, 0.0), (w, h), size=(n_anchors, 2))
    return Network(blind=blind, anchors=anchors, box=(w, h), seed=seed)


def build_edge_sets(net: Network, rho: float) -> EdgeSets:
    """All node pairs within radio range ``rho`` (boundary inclusive)."""
    if rho <= 0:
        raise ValueError(f"rho must be positive, got {rho}")
    m = net.m
    bb = np.empty((0, 2), dtype=int)
    if m >= 2:
        diff = net.blind[:, None, :] - net.blind[None, :, :]
        dist = np.sqrt((diff ** 2).sum(axis=2))
        iu, ju = np.triu_indices(m, k=1)
        keep = dist[iu, ju] <= rho
        bb = np.column_stack([iu[keep], ju[keep]])
    ba = np.empty((0, 2), dtype=int)
    if m >= 1 and net.n_anchors >= 1:
        diff = net.blind[:, None, :] - net.anchors[None, :, :]
        dist = np.sqrt((diff ** 2).sum(axis=2))
        ii, rr = np.nonzero(dist <= rho)
        ba = np.column_stack([ii, rr])
    return EdgeSets(blind_blind=bb, blind_anchor=ba, rho=float(rho))


def connectivity_report(net: Network, edges: EdgeSets) -> ConnectivityReport:
    """Per-blind-node degrees and reachability of the anchor set.

    ``connected`` is True when every blind node is joined to at least one
    anchor through some path of in-range links; degenerate draws are kept
    and merely flagged here, never regenerated.
    """
    m = net.m
    degrees = np.zeros(m, dtype=int)
    anchor_degrees = np.zeros(m, dtype=int)
    for i, j in edges.blind_blind:
        degrees[i] += 1
        degrees[j] += 1
    for i, _r in edges.blind_anchor:
        degrees[i] += 1
        anchor_degrees[i] += 1
    n_isolated = int(np.count_nonzero(degrees == 0))
    return ConnectivityReport(
        degrees=degrees,
        anchor_degrees=anchor_degrees,
        n_isolated=n_isolated,
        connected=bool(np.all(anchored_mask(edges, m))) if m > 0 else True,
    )


def anchored_mask(edges: EdgeSets, m: int) -> np.ndarray:
    """Boolean mask of blind nodes connected (possibly indirectly) to an anchor.

    Union-find over the blind-blind edges, then a component is anchored when
    any of its members has a direct anchor link.
    """
    parent = np.arange(m)

    def find(a: int) -> int:
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for i, j in edges.blind_blind:
        ri, rj = find(int(i)), find(int(j))
        if ri != rj:
            parent[ri] = rj
    anchored_roots = {find(int(i)) for i, _r in edges.blind_anchor}
    return np.array([find(i) in anchored_roots for i in range(m)], dtype=bool)


def save_network(net: Network, path) -> None:
    """Write positions as text (6 decimal places, meters) for exact re-runs."""
    with open(path, "w") as f:
        f.write(f"# box {net.box[0]:.6f} {net.box[1]:.6f}\n")
        f.write(f"# seed {net.seed if net.seed is not None else 'none'}\n")
        for x, y in net.blind:
            f.write(f"blind {x:.6f} {y:.6f}\n")
        for x, y in net.anchors:
            f.write(f"anchor {x:.6f} {y:.6f}\n")


def load_network(path) -> Network:
    box = (0.0, 0.0)
    seed: int | None = None
    blind: list[list[float]] = []
    anchors: list[list[float]] = []
    with open(path) as f:
        for line in f:
            parts = line.split()
            if not parts:
                continue
            if parts[0] == "#":
                if parts[1] == "box":
                    box = (float(parts[2]), float(parts[3]))
                elif parts[1] == "seed" and parts[2] != "none":
                    seed = int(parts[2])
            elif parts[0] == "blind":
                blind.append([float(parts[1]), float(parts[2])])
            elif parts[0] == "anchor":
                anchors.append([float(parts[1]), float(parts[2])])
    return Network(
        blind=np.array(blind, dtype=float).reshape(-1, 2),
        anchors=np.array(anchors, dtype=float).reshape(-1, 2),
        box=box,
        seed=seed,
    )
