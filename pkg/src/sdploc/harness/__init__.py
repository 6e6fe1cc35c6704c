from .config import (ScenarioConfig, SweepKind, SweepSpec, anchors_sweep,
                     density_sweep, derive_seed, load_config, make_config,
                     nlos_sweep)
from .runner import (SweepPoint, TrialResult, run_sweep, run_trial,
                     write_aggregate_csv, write_trials_csv)
from .svg import render_scatter

__all__ = [
    "ScenarioConfig", "SweepKind", "SweepSpec", "anchors_sweep",
    "density_sweep", "derive_seed", "load_config", "make_config", "nlos_sweep",
    "SweepPoint", "TrialResult", "run_sweep", "run_trial",
    "write_aggregate_csv", "write_trials_csv", "render_scatter",
]
