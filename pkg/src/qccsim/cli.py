"""Command-line entry point: ``qccsim {simulate,sweep,regimes}``.

Exit status is 0 on success, 1 for usage or configuration errors and 2
when a simulation fails at runtime. The output directory defaults to
``--out`` and can be overridden with ``QCCSIM_OUTPUT_DIR``.
"""
from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import os
import sys
from pathlib import Path

from .config import ConfigError, SimConfig, from_mapping, load_config, validate
from .output import (
    emit_heatmap,
    emit_phase_portrait,
    write_classical_csv,
    write_config_snapshot,
    write_json,
    write_manifest,
    write_rms_csv,
    write_sweep_csv,
    write_trajectories_csv,
)
from .potentials import PARAM_KEYS, make_potential
from .regimes import RegimeInputs, classify, uncertainty_lhs, wavelike_lhs, SingularCriterion
from .simulation import SimulationError, run_ensemble
from .sweep import SweepSpec, run_sweep

OUTPUT_ENV = "QCCSIM_OUTPUT_DIR"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


# flag -> config key
_FLAG_KEYS = {
    "hbar": "hbar", "dt": "dt_meas", "N": "ensemble_size", "seed": "base_seed",
    "t_max": "t_max", "mode": "divergence_mode", "threshold": "divergence_threshold",
    "x0": "x0", "p0": "p0", "potential": "potential", "grid_points": "grid_points",
}


def _add_config_flags(p):
    p.add_argument("--config", help="key=value config file")
    p.add_argument("--hbar", type=str)
    p.add_argument("--dt", type=str, help="time between measurements")
    p.add_argument("--N", type=str, help="ensemble size")
    p.add_argument("--seed", type=str)
    p.add_argument("--t-max", dest="t_max", type=str)
    p.add_argument("--mode", choices=["ensemble", "per_run"])
    p.add_argument("--threshold", type=str)
    p.add_argument("--x0", type=str)
    p.add_argument("--p0", type=str)
    p.add_argument("--potential", type=str)
    p.add_argument("--grid-points", dest="grid_points", type=str)
    p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                   help="any config key, repeatable")
    p.add_argument("--out", default="qccsim-out", help="output directory")


def _config_from_args(args) -> SimConfig:
    cfg = load_config(args.config) if args.config else SimConfig()
    overrides = {}
    for item in args.set:
        if "=" not in item:
            raise ConfigError([f"--set expects KEY=VALUE, got {item!r}"])
        key, val = item.split("=", 1)
        overrides[key.strip()] = val.strip()
    for flag, key in _FLAG_KEYS.items():
        val = getattr(args, flag, None)
        if val is not None:
            overrides[key] = str(val)
    return validate(from_mapping(overrides, cfg))


def _outdir(args) -> Path:
    out = Path(os.environ.get(OUTPUT_ENV) or args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_simulate(args) -> int:
    cfg = _config_from_args(args)
    out = _outdir(args)
    ens = run_ensemble(cfg)
    longest = max(ens.runs, key=lambda r: len(r.times))
    files = [
        write_config_snapshot(cfg, out / "config.cfg"),
        write_trajectories_csv(ens.runs, out / "trajectories.csv"),
        write_classical_csv(longest.classical, out / "classical.csv"),
        write_rms_csv(out / "rms.csv", pooled=ens.series, runs=ens.runs),
    ]
    svg = out / "phase_portrait.svg"
    svg.write_text(emit_phase_portrait(ens.runs[0], title=f"hbar={cfg.hbar:g}, dt={cfg.dt_meas:g}"))
    files.append(svg)
    summary = {
        "mode": ens.mode,
        "mean_divergence_time": ens.mean_divergence_time,
        "n_censored": ens.n_censored,
        "censoring_floor": cfg.t_max,
        "divergence_times": [r.divergence_time for r in ens.runs],
        "pooled_divergence_time": ens.series.divergence_time if ens.series else None,
        "max_rms": ens.series.max() if ens.series else max(r.rms_series.max() for r in ens.runs),
    }
    files.append(write_json(out / "result.json", summary))
    write_manifest(out, files, cfg)
    print(json.dumps(summary, indent=2))
    return 0


def cmd_sweep(args) -> int:
    cfg = _config_from_args(args)
    if args.mode is None and not any(s.startswith("divergence_mode") for s in args.set):
        cfg = validate(dataclasses.replace(cfg, divergence_mode="per_run"))
    spec = SweepSpec(hbar_min=args.hbar_min, hbar_max=args.hbar_max, hbar_count=args.hbar_count,
                     dt_min=args.dt_min, dt_max=args.dt_max, dt_count=args.dt_count,
                     base=cfg, workers=args.workers, regime_tolerance=args.tolerance)
    out = _outdir(args)
    total = spec.hbar_count * spec.dt_count

    def progress(cell):
        print(f"cell ({cell.i},{cell.j}) hbar={cell.hbar:.3g} dt={cell.dt:.3g} "
              f"t_div={cell.divergence_time:.4g} [{total} cells]", file=sys.stderr)

    result = run_sweep(spec, checkpoint=out / "cells.jsonl", progress=progress)
    files = [
        write_config_snapshot(cfg, out / "config.cfg"),
        write_sweep_csv(result, out / "sweep.csv"),
    ]
    svg = out / "heatmap.svg"
    svg.write_text(emit_heatmap(result))
    files.append(svg)
    files.append(write_json(out / "sweep.json", {
        "hbar_values": result.hbar_values, "dt_values": result.dt_values,
        "seed": cfg.base_seed, "t_max": cfg.t_max, "regime_tolerance": spec.regime_tolerance,
        "config": dataclasses.asdict(cfg),
    }))
    write_manifest(out, files, cfg)
    failed = sum(c.failed for c in result.cells.values())
    print(f"{len(result.cells)} cells written to {out} ({failed} failed)")
    return 0


def _regime_row(inputs, tolerance):
    try:
        unc = uncertainty_lhs(inputs)
    except SingularCriterion:
        unc = float("nan")
    try:
        wav = wavelike_lhs(inputs)
    except SingularCriterion:
        wav = float("nan")
    return unc, wav, str(classify(inputs, tolerance))


def cmd_regimes(args) -> int:
    params = {k: v for k, v in (item.split("=", 1) for item in args.param)} if args.param else {}
    unknown = set(params) - set(PARAM_KEYS)
    if unknown:
        raise ConfigError([f"unknown potential parameter {k!r}" for k in sorted(unknown)])
    potential = make_potential(args.potential, **params)

    def inputs_for(hbar, dt):
        return RegimeInputs.at(hbar=hbar, dt_meas=dt, p=args.p, x=args.x, potential=potential,
                               m=args.m, omega=args.omega, delta_x=args.dx, delta_p=args.dp)

    if args.batch:
        reader = csv.DictReader(open(args.batch, newline=""))
        writer = csv.writer(sys.stdout)
        writer.writerow(["hbar", "dt", "uncertainty_lhs", "wavelike_lhs", "regime"])
        for row in reader:
            h, d = float(row["hbar"]), float(row["dt"])
            writer.writerow([repr(h), repr(d), *_regime_row(inputs_for(h, d), args.tolerance)])
        return 0
    if args.hbar is None or args.dt is None:
        raise UsageError("regimes needs --hbar and --dt (or --batch)")
    unc, wav, label = _regime_row(inputs_for(args.hbar, args.dt), args.tolerance)
    print(f"uncertainty_lhs = {unc!r}")
    print(f"wavelike_lhs = {wav!r}")
    print(f"regime = {label}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="qccsim", description="Measured quantum vs classical trajectories.")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    sim = sub.add_parser("simulate", help="run one ensemble, write trajectories and a phase portrait")
    _add_config_flags(sim)
    sim.set_defaults(func=cmd_simulate)

    sw = sub.add_parser("sweep", help="divergence-time heatmap over log-spaced (hbar, dt)")
    _add_config_flags(sw)
    sw.add_argument("--hbar-min", type=float, default=3.0e-6)
    sw.add_argument("--hbar-max", type=float, default=1.0e-2)
    sw.add_argument("--hbar-count", type=int, default=25)
    sw.add_argument("--dt-min", type=float, default=0.01)
    sw.add_argument("--dt-max", type=float, default=0.3)
    sw.add_argument("--dt-count", type=int, default=25)
    sw.add_argument("--workers", type=int, default=1)
    sw.add_argument("--tolerance", type=float, default=0.1)
    sw.set_defaults(func=cmd_sweep)

    rg = sub.add_parser("regimes", help="evaluate both regime criteria")
    rg.add_argument("--hbar", type=float)
    rg.add_argument("--dt", type=float)
    rg.add_argument("--p", type=float, default=1.0)
    rg.add_argument("--x", type=float, default=0.0)
    rg.add_argument("--m", type=float, default=1.0)
    rg.add_argument("--omega", type=float, default=1.0)
    rg.add_argument("--dx", type=float, help="position displacement (default sigma_x)")
    rg.add_argument("--dp", type=float, help="momentum displacement (default sigma_p)")
    rg.add_argument("--potential", default="harmonic")
    rg.add_argument("--param", action="append", default=[], metavar="KEY=VALUE",
                    help="potential parameter, e.g. k=5")
    rg.add_argument("--tolerance", type=float, default=0.1)
    rg.add_argument("--batch", help="CSV with hbar and dt columns; prints one labelled row each")
    rg.set_defaults(func=cmd_regimes)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if not getattr(args, "command", None):
            parser.print_help(sys.stderr)
            return 1
        return args.func(args)
    except UsageError as exc:
        print(f"qccsim: error: {exc}", file=sys.stderr)
        return 1
    except (ConfigError, ValueError) as exc:
        print(f"qccsim: config error: {exc}", file=sys.stderr)
        return 1
    except SimulationError as exc:
        print(f"qccsim: simulation error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
