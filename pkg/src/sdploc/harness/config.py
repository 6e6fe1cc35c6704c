"""Experiment configuration and deterministic per-trial seeding.

Defaults follow the WiFi-scale setup: a 30 m x 30 m box, radio range 15 m,
AWGN variance 0.3 m^2, 100 trials per sweep point.

Per-trial seeds are derived as the first 8 bytes of
SHA-256("base_seed|sweep_value|trial_index"), so adding or removing sweep
points never perturbs the trials of other points, and any single trial can
be reproduced from the aggregate CSV alone.
"""

from __future__ import annotations

import enum
import hashlib
import json
from dataclasses import dataclass, field, replace

from ..channel import BiasModel, ChannelKind, ChannelModel, NlosMode
from ..refine import RefineOptions
from ..sdp import SolveOptions


class SweepKind(enum.Enum):
    ANCHORS = "anchors"
    DENSITY = "density"
    NLOS_FRACTION = "nlos"


@dataclass(frozen=True)
class ScenarioConfig:
    scenario: ChannelKind = ChannelKind.NOISE_ONLY
    box: tuple[float, float] = (30.0, 30.0)
    m: int = 50
    n_anchors: int = 10
    rho: float = 15.0
    channel: ChannelModel = field(default_factory=ChannelModel)
    L: int = 100
    base_seed: int = 0
    solver: SolveOptions = field(default_factory=SolveOptions)
    refine: RefineOptions = field(default_factory=RefineOptions)


@dataclass(frozen=True)
class SweepSpec:
    kind: SweepKind
    values: tuple
    config: ScenarioConfig


def make_config(scenario: ChannelKind | str = ChannelKind.NOISE_ONLY,
                **overrides) -> ScenarioConfig:
    """Scenario config with the channel's ``enabled`` kind kept in sync."""
    if isinstance(scenario, str):
        scenario = _SCENARIO_ALIASES[scenario.lower()]
    channel = overrides.pop("channel", ChannelModel())
    channel = replace(channel, enabled=scenario)
    cfg = ScenarioConfig(scenario=scenario, channel=channel)
    if overrides:
        cfg = replace(cfg, **overrides)
    # keep the solver's initial scale tied to the box diagonal
    if cfg.solver.init_scale is None:
        diag2 = cfg.box[0] ** 2 + cfg.box[1] ** 2
        cfg = replace(cfg, solver=replace(cfg.solver, init_scale=diag2))
    return cfg


_SCENARIO_ALIASES = {
    "ideal": ChannelKind.IDEAL,
    "noise": ChannelKind.NOISE_ONLY,
    "multipath": ChannelKind.NOISE_PLUS_MULTIPATH,
    "nlos": ChannelKind.NOISE_PLUS_MULTIPATH,
}


def derive_seed(base_seed: int, sweep_value, trial_index: int) -> int:
    key = f"{base_seed}|{sweep_value}|{trial_index}".encode()
    return int.from_bytes(hashlib.sha256(key).digest()[:8], "big")


def anchors_sweep(scenario, values=tuple(range(3, 26)), **overrides) -> SweepSpec:
    """Anchor-count sweep: m fixed at 50, anchors from 3 up to half of m."""
    cfg = make_config(scenario, m=overrides.pop("m", 50), **overrides)
    return SweepSpec(kind=SweepKind.ANCHORS, values=tuple(values), config=cfg)


def density_sweep(scenario, values=(10, 20, 30, 40, 50, 60),
                  **overrides) -> SweepSpec:
    """Blind-node-count sweep with anchors at 30% of the blind count."""
    cfg = make_config(scenario, **overrides)
    return SweepSpec(kind=SweepKind.DENSITY, values=tuple(values), config=cfg)


def nlos_sweep(rho: float, values=tuple(round(0.1 * i, 1) for i in range(11)),
               **overrides) -> SweepSpec:
    """NLOS-percentage sweep at a fixed radio range, 3 anchors.

    NLOS is assigned per range measurement; the non-NLOS measurements carry
    only AWGN (zero LOS bias), so the 0% point is a pure-noise experiment.
    """
    channel = overrides.pop("channel", ChannelModel(
        los_bias=BiasModel(0.0, 0.0),
        nlos_mode=NlosMode.PER_MEASUREMENT,
    ))
    cfg = make_config(ChannelKind.NOISE_PLUS_MULTIPATH, channel=channel,
                      n_anchors=overrides.pop("n_anchors", 3),
                      rho=rho, **overrides)
    return SweepSpec(kind=SweepKind.NLOS_FRACTION, values=tuple(values),
                     config=cfg)


def load_config(path, scenario: str | None = None, **overrides) -> ScenarioConfig:
    """Read a JSON config mirroring ScenarioConfig/ChannelModel field names."""
    with open(path) as f:
        data = json.load(f)
    chan_data = data.pop("channel", {})
    channel = ChannelModel(
        awgn_variance=chan_data.get("awgn_variance", 0.3),
        los_bias=BiasModel(**chan_data.get("los_bias", {"mean": 6.98, "variance": 1.87})),
        nlos_bias=BiasModel(**chan_data.get("nlos_bias", {"mean": 16.06, "variance": 0.68})),
        nlos_fraction=chan_data.get("nlos_fraction", 0.5),
        nlos_mode=NlosMode(chan_data.get("nlos_mode", "per_node")),
    )
    name = scenario or data.pop("scenario", "noise")
    data.pop("scenario", None)
    if "box" in data:
        data["box"] = tuple(data["box"])
    return make_config(name, channel=channel, **{**data, **overrides})
