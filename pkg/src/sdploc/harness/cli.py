"""Command-line front end.

Subcommands:
  gen    write a random network to a text file
  trial  run one trial, write its CSV row and scatter SVG
  sweep  run one of the three parameter sweeps, write per-trial + aggregate CSV
  plot   re-render the scatter SVG for a (deterministic) trial

Exit codes: 0 success, 1 bad arguments, 2 I/O failure. Solver failures
inside a sweep do not fail the run; they are counted in the CSV.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from ..network import generate_network, save_network
from .config import (ScenarioConfig, anchors_sweep, density_sweep,
                     load_config, make_config, nlos_sweep)
from .runner import run_sweep, run_trial, write_aggregate_csv, write_trials_csv
from .svg import render_scatter


class _ArgumentError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _ArgumentError(message)


def _build_parser() -> _Parser:
    p = _Parser(prog="sdploc", description=__doc__,
                formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--config", help="JSON config file")
        sp.add_argument("--seed", type=int, help="base seed")
        sp.add_argument("--m", type=int, help="blind-node count")
        sp.add_argument("--anchors", type=int, help="anchor count")
        sp.add_argument("--rho", type=float, help="radio range, meters")
        sp.add_argument("--scenario", choices=["ideal", "noise", "multipath"])
        sp.add_argument("--nlos", type=float, help="NLOS fraction in [0,1]")
        sp.add_argument("--trials", type=int, help="trials per sweep point")
        sp.add_argument("--out", help="output directory "
                        "(default: $SDPLOC_OUT or current directory)")

    g = sub.add_parser("gen", help="generate and save a network")
    common(g)

    t = sub.add_parser("trial", help="run a single trial")
    common(t)
    t.add_argument("--trial-index", type=int, default=0)

    s = sub.add_parser("sweep", help="run a parameter sweep")
    s.add_argument("kind", choices=["anchors", "density", "nlos"])
    common(s)

    pl = sub.add_parser("plot", help="render the scatter SVG for a trial")
    common(pl)
    pl.add_argument("--trial-index", type=int, default=0)
    return p


def _config_from(args) -> ScenarioConfig:
    overrides = {}
    if args.seed is not None:
        overrides["base_seed"] = args.seed
    if args.m is not None:
        overrides["m"] = args.m
    if args.anchors is not None:
        overrides["n_anchors"] = args.anchors
    if args.rho is not None:
        overrides["rho"] = args.rho
    if args.trials is not None:
        overrides["L"] = args.trials
    if args.config:
        cfg = load_config(args.config, scenario=args.scenario, **overrides)
    else:
        cfg = make_config(args.scenario or "noise", **overrides)
    if args.nlos is not None:
        from dataclasses import replace
        cfg = replace(cfg, channel=replace(cfg.channel, nlos_fraction=args.nlos))
    return cfg


def _outdir(args) -> Path:
    out = Path(args.out or os.environ.get("SDPLOC_OUT", "."))
    out.mkdir(parents=True, exist_ok=True)
    return out


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except _ArgumentError as exc:
        print(f"error: {exc}", file=sys.stderr)
        parser.print_usage(sys.stderr)
        return 1

    try:
        cfg = _config_from(args)
        out = _outdir(args)
        if args.command == "gen":
            net = generate_network(cfg.base_seed, cfg.box, cfg.m, cfg.n_anchors)
            path = out / f"network_seed{cfg.base_seed}.txt"
            save_network(net, path)
            print(path)
        elif args.command in ("trial", "plot"):
            trial = run_trial(cfg, args.trial_index)
            svg_path = out / f"trial_{cfg.scenario.value}_seed{cfg.base_seed}.svg"
            svg_path.write_text(render_scatter(trial))
            print(svg_path)
            if args.command == "trial":
                csv_path = out / f"trial_{cfg.scenario.value}_seed{cfg.base_seed}.csv"
                write_trials_csv(csv_path, [trial])
                print(csv_path)
        elif args.command == "sweep":
            if args.kind == "anchors":
                spec = anchors_sweep(cfg.scenario, m=cfg.m, L=cfg.L,
                                     base_seed=cfg.base_seed, rho=cfg.rho,
                                     box=cfg.box)
            elif args.kind == "density":
                spec = density_sweep(cfg.scenario, L=cfg.L,
                                     base_seed=cfg.base_seed, rho=cfg.rho,
                                     box=cfg.box)
            else:
                spec = nlos_sweep(rho=cfg.rho, L=cfg.L, m=cfg.m,
                                  base_seed=cfg.base_seed, box=cfg.box)
            points = run_sweep(spec)
            trials = [t for p in points for t in p.trials]
            prefix = f"sweep_{args.kind}_{spec.config.scenario.value}"
            write_trials_csv(out / f"{prefix}_trials.csv", trials)
            write_aggregate_csv(out / f"{prefix}_agg.csv", points)
            print(out / f"{prefix}_agg.csv")
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
