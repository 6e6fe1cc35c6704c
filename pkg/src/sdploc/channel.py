"""Empirical TOA ranging-error model.

Measured range = true range + zero-mean AWGN + a propagation bias drawn from
a normal distribution whose mean/variance differ between line-of-sight and
non-line-of-sight links. The default constants come from indoor WiFi (20 MHz)
measurement campaigns: LOS bias Normal(6.98 m, 1.87 m^2), NLOS bias
Normal(16.06 m, 0.68 m^2), AWGN variance 0.3 m^2.

NLOS can be assigned per blind node (a fraction of nodes is in NLOS and every
link touching one of them is NLOS) or per measurement (a fraction of links is
NLOS, independent of topology).
"""

from __future__ import annotations

import csv
import enum
from dataclasses import dataclass, field

import numpy as np

from .network import EdgeSets, Network


class ChannelKind(enum.Enum):
    IDEAL = "ideal"
    NOISE_ONLY = "noise"
    NOISE_PLUS_MULTIPATH = "multipath"


class NlosMode(enum.Enum):
    PER_NODE = "per_node"
    PER_MEASUREMENT = "per_measurement"


class Propagation(enum.IntEnum):
    NONE = 0
    LOS = 1
    NLOS = 2


@dataclass(frozen=True)
class BiasModel:
    mean: float      # meters
    variance: float  # m^2

    def __post_init__(self):
        if self.variance < 0:
            raise ValueError("variance must be non-negative")


@dataclass(frozen=True)
class ChannelModel:
    enabled: ChannelKind = ChannelKind.NOISE_PLUS_MULTIPATH
    awgn_variance: float = 0.3                      # m^2
    los_bias: BiasModel = field(default_factory=lambda: BiasModel(6.98, 1.87))
    nlos_bias: BiasModel = field(default_factory=lambda: BiasModel(16.06, 0.68))
    nlos_fraction: float = 0.5
    nlos_mode: NlosMode = NlosMode.PER_NODE

    def __post_init__(self):
        if self.awgn_variance < 0:
            raise ValueError("awgn_variance must be non-negative")
        if not 0.0 <= self.nlos_fraction <= 1.0:
            raise ValueError("nlos_fraction must lie in [0, 1]")


@dataclass(frozen=True)
class RangeMeasurements:
    """Per-edge true distance, propagation label and measured distance.

    Edges are ordered blind-blind first, then blind-anchor, matching the
    EdgeSets they were built from. ``j`` is a blind index for 'bb' rows and
    an anchor index for 'ba' rows.
    """

    kind: np.ndarray       # (M,) '<U2', 'bb' or 'ba'
    i: np.ndarray          # (M,) int
    j: np.ndarray          # (M,) int
    true_m: np.ndarray     # (M,) meters
    label: np.ndarray      # (M,) Propagation values as int
    measured_m: np.ndarray  # (M,) meters, clamped at 0
    n_clamped: int = 0

    def __len__(self) -> int:
        return len(self.measured_m)


def true_distances(net: Network, edges: EdgeSets) -> np.ndarray:
    """Euclidean distances for every edge, blind-blind rows first."""
    out = []
    if len(edges.blind_blind):
        d = net.blind[edges.blind_blind[:, 0]] - net.blind[edges.blind_blind[:, 1]]
        out.append(np.sqrt((d ** 2).sum(axis=1)))
    if len(edges.blind_anchor):
        d = net.blind[edges.blind_anchor[:, 0]] - net.anchors[edges.blind_anchor[:, 1]]
        out.append(np.sqrt((d ** 2).sum(axis=1)))
    if not out:
        return np.empty(0)
    return np.concatenate(out)


def assign_nlos(net: Network, edges: EdgeSets, model: ChannelModel,
                rng: np.random.Generator) -> np.ndarray:
    """Label every edge LOS or NLOS.

    PER_NODE: exactly round(fraction * m) blind nodes are NLOS, chosen
    uniformly without replacement; every edge incident to an NLOS blind node
    is NLOS. PER_MEASUREMENT: exactly round(fraction * n_edges) edges are
    NLOS, chosen uniformly without replacement.
    """
    if model.enabled is not ChannelKind.NOISE_PLUS_MULTIPATH:
        raise ValueError("NLOS assignment requires the multipath channel")
    n_edges = edges.n_edges
    labels = np.full(n_edges, int(Propagation.LOS), dtype=int)
    if model.nlos_mode is NlosMode.PER_NODE:
        k = int(round(model.nlos_fraction * net.m))
        nlos_nodes = rng.choice(net.m, size=k, replace=False) if k else np.empty(0, int)
        mask = np.zeros(net.m, dtype=bool)
        mask[nlos_nodes] = True
        pos = 0
        for i, j in edges.blind_blind:
            if mask[i] or mask[j]:
                labels[pos] = int(Propagation.NLOS)
            pos += 1
        for i, _r in edges.blind_anchor:
            if mask[i]:
                labels[pos] = int(Propagation.NLOS)
            pos += 1
    else:
        k = int(round(model.nlos_fraction * n_edges))
        chosen = rng.choice(n_edges, size=k, replace=False) if k else np.empty(0, int)
        labels[chosen] = int(Propagation.NLOS)
    return labels


def measure_ranges(net: Network, edges: EdgeSets, labels: np.ndarray | None,
                   model: ChannelModel,
                   rng: np.random.Generator | None = None) -> RangeMeasurements:
    """Draw one noisy distance estimate per edge.

    Ideal channel reproduces the true distances exactly. Otherwise each edge
    gets an independent AWGN draw, and under the multipath channel an
    additional independent bias draw from its label's model. Negative results
    are clamped to 0 (counted in ``n_clamped``).
    """
    true = true_distances(net, edges)
    n = len(true)
    kind = np.concatenate([
        np.full(len(edges.blind_blind), "bb"),
        np.full(len(edges.blind_anchor), "ba"),
    ]) if n else np.empty(0, dtype="<U2")
    idx = (np.concatenate([edges.blind_blind, edges.blind_anchor])
           if n else np.empty((0, 2), dtype=int))

    if model.enabled is ChannelKind.IDEAL:
        lab = np.full(n, int(Propagation.NONE), dtype=int)
        return RangeMeasurements(kind=kind, i=idx[:, 0], j=idx[:, 1],
                                 true_m=true, label=lab,
                                 measured_m=true.copy(), n_clamped=0)

    if rng is None:
        raise ValueError("a random generator is required for noisy channels")
    measured = true + rng.normal(0.0, np.sqrt(model.awgn_variance), size=n)

    if model.enabled is ChannelKind.NOISE_PLUS_MULTIPATH:
        if labels is None or len(labels) != n:
            raise ValueError("labels must cover every edge for the multipath channel")
        lab = np.asarray(labels, dtype=int)
        for prop, bias in ((Propagation.LOS, model.los_bias),
                           (Propagation.NLOS, model.nlos_bias)):
            mask = lab == int(prop)
            if mask.any():
                measured[mask] += rng.normal(bias.mean, np.sqrt(bias.variance),
                                             size=int(mask.sum()))
    else:
        lab = np.full(n, int(Propagation.NONE), dtype=int)

    n_clamped = int(np.count_nonzero(measured < 0))
    measured = np.maximum(measured, 0.0)
    return RangeMeasurements(kind=kind, i=idx[:, 0], j=idx[:, 1],
                             true_m=true, label=lab,
                             measured_m=measured, n_clamped=n_clamped)


_LABEL_NAMES = {0: "none", 1: "los", 2: "nlos"}


def save_measurements_csv(meas: RangeMeasurements, path) -> None:
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["edge_kind", "i", "j", "true_m", "label", "measured_m"])
        for k in range(len(meas)):
            w.writerow([meas.kind[k], int(meas.i[k]), int(meas.j[k]),
                        f"{meas.true_m[k]:.9f}",
                        _LABEL_NAMES[int(meas.label[k])],
                        f"{meas.measured_m[k]:.9f}"])
