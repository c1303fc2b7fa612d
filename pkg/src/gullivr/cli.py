"""Command-line entry point: ``gullivr simulate | targeting | compare``."""
from __future__ import annotations

import argparse
import csv
import json
import statistics
import sys
from pathlib import Path

from gullivr import telemetry
from gullivr.config import POLICIES, load_config
from gullivr.errors import ConfigError, ScenarioError
from gullivr.tracking_sim import run_scenario, targeting_trial

EXIT_OK, EXIT_CONFIG, EXIT_SCENARIO = 0, 2, 3


def _fmt(x) -> str:
    return "nan" if x is None else telemetry.fmt(float(x))


def _write_rows(path: Path, header, rows) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def _write_json(path: Path, doc) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(doc, indent=1, sort_keys=True) + "\n", encoding="utf-8")


def cmd_simulate(config_path, seed: int, policy: str | None, out_dir, ticks_cap: int | None = None) -> int:
    config = load_config(config_path)
    log = run_scenario(config, seed, policy, ticks_cap)
    out = Path(out_dir)
    telemetry._write(out / "telemetry.csv", telemetry.frames_csv(log))
    telemetry._write(out / "summary.json", telemetry.document_text(log))
    s = telemetry.summarize(log)
    print(f"{config.id} policy={log.meta['policy']} seed={seed}: "
          f"walked {s['physical_distance']:.2f} m, virtual {s['virtual_distance']:.1f} m, "
          f"{_fmt(s['meters_per_minute'])} m/min")
    return EXIT_OK


def cmd_targeting(config_path, seed: int, sigma: float | None, out_dir) -> int:
    config = load_config(config_path)
    sigma = config.agent.aim_noise_sigma if sigma is None else sigma
    if sigma < 0:
        raise ConfigError("--sigma must be >= 0")
    if not config.targets:
        raise ConfigError("targeting.targets: no targets configured")
    tr = config.transition
    records = targeting_trial(config.targets, config.targeting_gm_scale, sigma, seed,
                              field=config.field, dt=config.dt, eye_height=config.agent.eye_height,
                              duration=0.0 if tr.instant else tr.duration, max_pitch=tr.max_pitch,
                              foot_smooth_coeff=config.foot_smooth_coeff)
    out = Path(out_dir)
    _write_rows(out / "targeting.csv", ["target_id", "attempt", "landing_x", "landing_z", "miss", "zone"],
                [[r.target_id, r.attempt, _fmt(r.landing[0]), _fmt(r.landing[1]), _fmt(r.miss), r.zone]
                 for r in records])
    misses = [r.miss for r in records]
    zones = {z: sum(r.zone == z for r in records) for z in ("inner", "outer", "miss")}
    summary = {
        "schema_version": telemetry.SCHEMA_VERSION,
        "scenario": config.id, "seed": seed, "sigma": sigma, "gm_scale": config.targeting_gm_scale,
        "attempts": len(records),
        "mean_miss": float(telemetry.fmt(statistics.fmean(misses))),
        "std_miss": float(telemetry.fmt(statistics.stdev(misses))) if len(misses) > 1 else 0.0,
        "zones": zones,
    }
    _write_json(out / "targeting_summary.json", summary)
    print(f"{len(records)} landings, mean miss {summary['mean_miss']:.4f} m (sd {summary['std_miss']:.4f})")
    return EXIT_OK


COMPARE_HEADER = ["policy", "runs", "mean_physical_m_per_min", "mean_physical_distance",
                  "mean_virtual_distance", "mean_duration", "mean_transitions", "mean_teleports",
                  "mean_resets"]


def compare_runs(config, seeds, ticks_cap=None) -> list[dict]:
    runs = []
    for policy in POLICIES:
        for seed in seeds:
            log = run_scenario(config, seed, policy, ticks_cap)
            s = telemetry.summarize(log)
            runs.append({"policy": policy, "seed": seed, **s})
    return runs


def cmd_compare(config_path, seeds, out_dir, ticks_cap: int | None = None) -> int:
    if not seeds:
        raise ConfigError("--seeds: at least one seed is required")
    config = load_config(config_path)
    runs = compare_runs(config, seeds, ticks_cap)
    out = Path(out_dir)
    _write_rows(out / "compare_runs.csv",
                ["policy", "seed", "physical_m_per_min", "physical_distance", "virtual_distance",
                 "duration", "transitions", "teleports", "resets"],
                [[r["policy"], r["seed"], _fmt(r["meters_per_minute"]), _fmt(r["physical_distance"]),
                  _fmt(r["virtual_distance"]), _fmt(r["duration"]),
                  r["event_counts"]["transition_begin"], r["event_counts"]["teleport"],
                  r["event_counts"]["reset"]] for r in runs])
    rows = []
    for policy in POLICIES:
        rs = [r for r in runs if r["policy"] == policy]
        mpm = [r["meters_per_minute"] for r in rs if r["meters_per_minute"] is not None]
        rows.append([
            policy, len(rs), _fmt(statistics.fmean(mpm) if mpm else None),
            _fmt(statistics.fmean(r["physical_distance"] for r in rs)),
            _fmt(statistics.fmean(r["virtual_distance"] for r in rs)),
            _fmt(statistics.fmean(r["duration"] for r in rs)),
            _fmt(statistics.fmean(r["event_counts"]["transition_begin"] for r in rs)),
            _fmt(statistics.fmean(r["event_counts"]["teleport"] for r in rs)),
            _fmt(statistics.fmean(r["event_counts"]["reset"] for r in rs)),
        ])
    _write_rows(out / "compare.csv", COMPARE_HEADER, rows)
    for r in rows:
        print(f"{r[0]:>9}: {r[2]} m/min walked over {r[1]} run(s)")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gullivr", description="Headless giant-mode locomotion simulator")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run the scripted agent through a scenario")
    p.add_argument("config")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--policy", choices=POLICIES, default=None)
    p.add_argument("--out", default="out")
    p.add_argument("--ticks-cap", type=int, default=None)

    p = sub.add_parser("targeting", help="run the giant-mode landing task")
    p.add_argument("config")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--sigma", type=float, default=None, help="aim noise per axis, meters")
    p.add_argument("--out", default="out")

    p = sub.add_parser("compare", help="run both policies over several seeds")
    p.add_argument("config")
    p.add_argument("--seeds", type=int, nargs="*", default=[0])
    p.add_argument("--out", default="out")
    p.add_argument("--ticks-cap", type=int, default=None)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "simulate":
            return cmd_simulate(args.config, args.seed, args.policy, args.out, args.ticks_cap)
        if args.command == "targeting":
            return cmd_targeting(args.config, args.seed, args.sigma, args.out)
        return cmd_compare(args.config, args.seeds, args.out, args.ticks_cap)
    except ConfigError as exc:
        print(f"invalid configuration: {exc}", file=sys.stderr)
        for v in exc.violations:
            print(f"  - {v}", file=sys.stderr)
        return EXIT_CONFIG
    except ScenarioError as exc:
        print(f"scenario failed: {exc}", file=sys.stderr)
        return EXIT_SCENARIO
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_SCENARIO


if __name__ == "__main__":
    sys.exit(main())
