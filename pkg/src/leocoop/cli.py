"""Command-line front end: ``leocoop <subcommand> [options]``."""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import logging
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .experiment import (
    ScenarioConfig,
    ScenarioError,
    build_scenario,
    density_stats,
    hpbw_sweep,
    inclination_sweep,
    load_scenario,
    oracle_study,
    ratios,
    run,
    scheme_summary,
    write_results,
)
from .geometry import ConstellationConfig, generate_walker, propagate

logger = logging.getLogger("leocoop")

OUT_ENV = "LEOCOOP_OUT"


def _write_rows(path: Path, rows: list[dict]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        if not rows:
            return
        w = csv.DictWriter(fh, fieldnames=list(rows[0]), lineterminator="\n")
        w.writeheader()
        w.writerows(rows)


def _write_json(path: Path, obj) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _config(args) -> ScenarioConfig:
    cfg = load_scenario(args.scenario)
    changes = {}
    if args.seed is not None:
        changes["seed"] = args.seed
    if getattr(args, "samples", None) is not None:
        changes["samples"] = args.samples
    return dataclasses.replace(cfg, **changes) if changes else cfg


def cmd_constellation(args) -> int:
    cc = ConstellationConfig.from_notation(args.walker, args.inclination, args.altitude)
    rows = []
    for k in range(args.samples):
        t = k * args.spacing
        for el in generate_walker(cc):
            st = propagate(el, t)
            x, y, z = st.position
            r = float(np.linalg.norm(st.position))
            rows.append({"time_s": repr(float(t)), "sat_id": el.sat_id, "plane": el.plane,
                         "x_km": repr(float(x)), "y_km": repr(float(y)), "z_km": repr(float(z)),
                         "lat_deg": repr(float(np.degrees(np.arcsin(z / r)))),
                         "lon_deg": repr(float(np.degrees(np.arctan2(y, x))))})
    path = args.out / "ephemeris.csv"
    _write_rows(path, rows)
    print(f"{cc.notation} at {cc.inclination_deg} deg, {cc.altitude_km} km: {len(rows)} rows -> {path}")
    return 0


def cmd_run(args) -> int:
    cfg = _config(args)
    scenario = build_scenario(cfg)
    result = run(scenario, threads=args.threads)
    paths = write_results(result, args.out)
    for row in scheme_summary(result):
        cov, srv = ratios(result, row["scheme"])
        print(f"{row['scheme']:>6}: mean total SE {row['mean_total_se']:.3f} bit/s/Hz, "
              f"coverage {cov:.4f}, service {srv:.4f}")
    if args.density_km:
        stats = density_stats(result, scenario.gus, args.density_km, cfg.schemes[-1])
        _write_json(args.out / "density.json", {"distance_km": args.density_km, "scheme": cfg.schemes[-1],
                                                "classes": stats})
    print(f"seed {cfg.seed}; wrote {', '.join(str(p) for p in paths.values())}")
    return 0


def cmd_compare(args) -> int:
    cfg = _config(args)
    result = run(build_scenario(cfg), threads=args.threads)
    rows = scheme_summary(result)
    _write_rows(args.out / "schemes.csv", rows)
    _write_json(args.out / "schemes.json", {"seed": cfg.seed, "samples": cfg.samples, "schemes": rows})
    for row in rows:
        gain = row["gain_over_au"]
        extra = "" if gain is None else f" ({gain:+.1%} vs AU)"
        print(f"{row['scheme']:>6}: {row['mean_total_se']:.3f}{extra}")
    return 0


def cmd_sweep_inclination(args) -> int:
    cfg = _config(args)
    incs = args.inclinations or list(range(30, 61, 5))
    rows = inclination_sweep(cfg, incs, threads=args.threads)
    _write_rows(args.out / "inclination_sweep.csv", rows)
    _write_json(args.out / "inclination_sweep.json", {"seed": cfg.seed, "rows": rows})
    for r in rows:
        print(f"{r['inclination_deg']:5.1f} {r['scheme']:>6} SE {r['mean_total_se']:.3f} "
              f"coverage {r['coverage_ratio']:.4f} service {r['service_ratio']:.4f}")
    return 0


def cmd_sweep_hpbw(args) -> int:
    cfg = _config(args)
    rows = hpbw_sweep(cfg, args.hpbw or (2.0, 8.0, 32.0, 128.0), args.constellations, threads=args.threads)
    _write_rows(args.out / "hpbw_sweep.csv", rows)
    _write_json(args.out / "hpbw_sweep.json", {"seed": cfg.seed, "rows": rows})
    for r in rows:
        print(f"{r['constellation']:>9} HPBW {r['hpbw_deg']:6.1f} deg: M-JHU over S-JHU {r['improvement']:+.2%}")
    return 0


def cmd_oracle_check(args) -> int:
    cfg = _config(args)
    seed = cfg.seed
    study = oracle_study(args.instances, args.max_sats, args.max_gus, seed, args.beams, cfg.link, cfg.fading)
    pct = study.percentiles()
    _write_json(args.out / "oracle_check.json", {
        "seed": seed, "instances": args.instances, "max_sats": args.max_sats, "max_gus": args.max_gus,
        "n_beams": args.beams, "dominated": study.dominated,
        "percentiles": {str(k): v for k, v in pct.items()}, "ratios": study.ratios.tolist()})
    print(f"heuristic / optimum over {args.instances} instances (seed {seed}):")
    for q, v in pct.items():
        print(f"  p{q:<3} {v:.4f}")
    if not study.dominated:
        print("error: heuristic exceeded the exhaustive optimum", file=sys.stderr)
        return 3
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", type=Path, default=Path(os.environ.get(OUT_ENV, "results")),
                        help=f"output directory (default: ${OUT_ENV} or ./results)")
    common.add_argument("-v", "--verbose", action="count", default=0)
    common.add_argument("--threads", type=int, default=1, help="worker threads for time samples")

    scen = argparse.ArgumentParser(add_help=False)
    scen.add_argument("--scenario", type=Path, required=True, help="scenario TOML file")
    scen.add_argument("--seed", type=int, default=None, help="override the scenario seed")
    scen.add_argument("--samples", type=int, default=None, help="override the number of time samples")

    p = argparse.ArgumentParser(prog="leocoop", description="Cooperative multi-LEO downlink simulator")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("constellation", parents=[common], help="write a Walker constellation ephemeris")
    c.add_argument("--walker", required=True, help="T/P/F, e.g. 48/6/1")
    c.add_argument("--inclination", type=float, required=True, help="degrees")
    c.add_argument("--altitude", type=float, default=1200.0, help="km")
    c.add_argument("--samples", type=int, default=1)
    c.add_argument("--spacing", type=float, default=3600.0, help="seconds between samples")
    c.set_defaults(func=cmd_constellation)

    r = sub.add_parser("run", parents=[common, scen], help="run every scheme over all time samples")
    r.add_argument("--density-km", type=float, default=None,
                   help="also write dense/sparse GU statistics for this distance threshold")
    r.set_defaults(func=cmd_run)

    cs = sub.add_parser("compare-schemes", parents=[common, scen], help="mean total SE per scheme")
    cs.set_defaults(func=cmd_compare)

    si = sub.add_parser("sweep-inclination", parents=[common, scen], help="sweep constellation inclination")
    si.add_argument("--inclinations", type=float, nargs="+", default=None)
    si.set_defaults(func=cmd_sweep_inclination)

    sh = sub.add_parser("sweep-hpbw", parents=[common, scen], help="sweep GU antenna HPBW")
    sh.add_argument("--hpbw", type=float, nargs="+", default=None)
    sh.add_argument("--constellations", nargs="+", default=None, help="T/P/F notations")
    sh.set_defaults(func=cmd_sweep_hpbw)

    o = sub.add_parser("oracle-check", parents=[common, scen], help="heuristic vs exhaustive search")
    o.add_argument("--instances", type=int, default=100)
    o.add_argument("--max-sats", type=int, default=3)
    o.add_argument("--max-gus", type=int, default=4)
    o.add_argument("--beams", type=int, default=2, help="beam budget per satellite")
    o.set_defaults(func=cmd_oracle_check)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2),
                        format="%(levelname)s %(name)s: %(message)s")
    scenario = getattr(args, "scenario", None)
    if scenario is not None and not scenario.is_file():
        print(f"error: scenario file not found: {scenario}", file=sys.stderr)
        return 2
    if args.threads < 1:
        print("error: --threads must be >= 1", file=sys.stderr)
        return 2
    try:
        return args.func(args)
    except (ScenarioError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
