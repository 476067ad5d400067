"""Command-line entry points: deterministic runs and artifact export."""
from __future__ import annotations

import argparse
import dataclasses
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

import qcs_sim
from qcs_sim.analysis import figures_of_merit, precision_shadow, sweep
from qcs_sim.channel import LinkDirection, link_budget
from qcs_sim.errors import NoPathError, NoSyncSignalError, NotVisibleError, ScenarioError
from qcs_sim.geodesy import ECI, Vec3
from qcs_sim.linkgeom import LinkGeometry
from qcs_sim.qcsprotocol import (
    C_LIGHT,
    cross_correlate,
    extract_offset,
    simulate_streams,
    t_bin,
)
from qcs_sim.scenario import Scenario, load_scenario
from qcs_sim.syncnet import (
    ClockModel,
    SyncEngine,
    SyncMode,
    master_clock_availability,
)

_MODES = {
    "single": SyncMode.SINGLE_SATELLITE,
    "intra": SyncMode.INTRA_ORBIT,
    "full": SyncMode.FULL,
}

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_RUNTIME = 3


def _threads(args) -> int:
    if args.threads is not None:
        return max(1, args.threads)
    env = os.environ.get("QCS_SIM_THREADS")
    return max(1, int(env)) if env else 1


def _ordered_parallel(fn, items, n_threads: int):
    """Map preserving input order; results identical for any thread count."""
    if n_threads <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n_threads) as pool:
        return list(pool.map(fn, items))

def _header(scenario: Scenario, seed: int) -> tuple[str, ...]:
    return (
        f"qcs-sim v{qcs_sim.__version__}",
        f"scenario_hash={scenario.hash()}",
        f"seed={seed}",
    )


def _load(args) -> Scenario:
    if not args.scenario:
        raise ScenarioError("--scenario PATH is required for this command")
    sc = load_scenario(args.scenario)
    if args.seed is not None:
        sc = sc.with_sim(rng_seed=args.seed)
    if args.holdover is not None:
        sc = sc.with_clock(holdover_s=args.holdover)
    if args.target_precision is not None:
        sc = sc.with_clock(precision_s=args.target_precision)
    return sc


def _outdir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write_json(path: Path, payload: dict) -> None:
    with open(path, "w") as f:
        json.dump(payload, f, indent=2, sort_keys=True)
        f.write("\n")


def _print_banner(scenario: Scenario) -> None:
    print(f"qcs-sim v{qcs_sim.__version__}  scenario_hash={scenario.hash()}  seed={scenario.sim.rng_seed}")


def cmd_trace(args) -> int:
    sc = _load(args)
    _print_banner(sc)
    if not args.pair:
        raise ScenarioError("--pair A,B is required for trace")
    a, b = [s.strip() for s in args.pair.split(",")]
    sc.station(a), sc.station(b)
    mode = _MODES[args.mode]
    eng = SyncEngine(sc)
    trace = eng.pair_trace(a, b, mode, sc.clock.holdover_s)
    trace.scenario_hash = sc.hash()
    out = _outdir(args)
    tag = f"{a}_{b}_{mode.value}_tau{int(sc.clock.holdover_s)}"
    path = out / f"trace_{tag}.csv"
    trace.write_csv(path, _header(sc, sc.sim.rng_seed))
    fom = figures_of_merit(trace, sc.clock.precision_s)
    _write_json(
        out / f"trace_{tag}.json",
        {
            "scenario_hash": sc.hash(),
            "seed": sc.sim.rng_seed,
            "version": qcs_sim.__version__,
            "pair": [a, b],
            "mode": mode.value,
            "holdover_s": sc.clock.holdover_s,
            "fom": fom.to_json_dict(),
        },
    )
    print(f"wrote {path}")
    print(
        f"status={fom.status} connected={fom.connected_fraction_pct} "
        f"avg={fom.average_precision} gap_min={fom.largest_gap_min}"
    )
    return EXIT_OK


def cmd_shadow(args) -> int:
    sc = _load(args)
    _print_banner(sc)
    epoch = args.epoch if args.epoch is not None else sc.sim.t_start_s
    sat_rows = None
    if args.orbit is not None:
        eng_rows = []
        row = 0
        for k, orbit in enumerate(sc.constellation.orbits):
            if k == args.orbit:
                eng_rows = list(range(row, row + orbit.num_sats))
            row += orbit.num_sats
        sat_rows = eng_rows
    grid = precision_shadow(
        sc,
        t=epoch,
        clock=sc.clock,
        target_precision_s=sc.clock.precision_s,
        resolution_deg=args.resolution,
        sat_rows=sat_rows,
    )
    out = _outdir(args)
    path = out / f"shadow_t{int(epoch)}_tau{int(sc.clock.holdover_s)}.csv"
    grid.write_csv(path, _header(sc, sc.sim.rng_seed))
    print(f"wrote {path}")
    print(f"cells_in_shadow={int(grid.in_shadow.sum())}")
    return EXIT_OK


def cmd_fom(args) -> int:
    sc = _load(args)
    _print_banner(sc)
    names = [s.name for s in sc.stations]
    if args.pairs:
        pairs = []
        for chunk in args.pairs.split(";"):
            a, b = [s.strip() for s in chunk.split(",")]
            pairs.append((a, b))
    else:
        pairs = [(names[i], names[j]) for i in range(len(names)) for j in range(i + 1, len(names))]
    holdovers = [float(h) for h in args.holdovers.split(",")] if args.holdovers else [sc.clock.holdover_s]
    modes = [_MODES[m.strip()] for m in args.modes.split(",")] if args.modes else [SyncMode.FULL]

    eng = SyncEngine(sc)
    for a, b in pairs:  # warm caches serially so parallel cells only read
        eng.station_grid(a)
        eng.station_grid(b)
    eng.rings_connected()
    if any(m is SyncMode.FULL for m in modes) and len(sc.constellation.orbits) > 1:
        for p in range(len(sc.constellation.orbits) - 1):
            eng.intersat_series(p)

    combos = [(pair, tau, mode) for pair in pairs for tau in holdovers for mode in modes]

    def run_cell(c):
        (a, b), tau, mode = c
        return sweep(sc, [(a, b)], [tau], [mode], sc.clock.precision_s, engine=eng)[0]

    cells = _ordered_parallel(run_cell, combos, _threads(args))
    out = _outdir(args)
    payload = {
        "scenario_hash": sc.hash(),
        "seed": sc.sim.rng_seed,
        "version": qcs_sim.__version__,
        "threshold_s": sc.clock.precision_s,
        "cells": [c.to_json_dict() for c in cells],
    }
    path = out / "fom.json"
    _write_json(path, payload)
    print(f"wrote {path}")
    for c in cells:
        fom = c.fom
        desc = (
            f"{fom.status} conn={fom.connected_fraction_pct} avg={fom.average_precision}"
            if fom
            else f"error={c.error}"
        )
        print(f"{c.station_a}-{c.station_b} mode={c.mode.value} tau={c.holdover_s}: {desc}")
    return EXIT_OK


def cmd_masterclock(args) -> int:
    sc = _load(args)
    _print_banner(sc)
    eng = SyncEngine(sc)
    out = _outdir(args)
    n_pairs = len(sc.constellation.orbits) - 1
    if n_pairs < 1:
        raise NoPathError("master clock needs at least two orbits")
    path = out / "masterclock_trace.csv"
    with open(path, "w") as f:
        for line in _header(sc, sc.sim.rng_seed):
            f.write(f"# {line}\n")
        f.write("t_s,orbit_pair,t_bin_s,best_conjugate\n")
        for p in range(n_pairs):
            series = eng.intersat_series(p)
            tb_day = series.tbin_best[eng.day]
            bk_day = series.best_k[eng.day]
            for i in range(eng.day_times.size):
                tb_str = f"{float(tb_day[i])!r}" if np.isfinite(tb_day[i]) else ""
                f.write(f"{float(eng.day_times[i])!r},{p}-{p + 1},{tb_str},{int(bk_day[i])}\n")
    times, avail = master_clock_availability(sc, sc.clock, engine=eng)
    per_pair = []
    for p in range(n_pairs):
        ev = eng.conjugate_sync_events(p, sc.clock.precision_s)
        gaps = np.diff(ev) if ev.size > 1 else np.array([])
        per_pair.append(
            {
                "orbit_pair": f"{p}-{p + 1}",
                "n_events": int(ev.size),
                "median_gap_s": float(np.median(gaps)) if gaps.size else None,
                "max_gap_s": float(gaps.max()) if gaps.size else None,
            }
        )
    report = {
        "scenario_hash": sc.hash(),
        "seed": sc.sim.rng_seed,
        "version": qcs_sim.__version__,
        "holdover_s": sc.clock.holdover_s,
        "target_precision_s": sc.clock.precision_s,
        "always_available": bool(avail.all()),
        "available_fraction_pct": float(100.0 * avail.mean()),
        "per_pair_events": per_pair,
    }
    _write_json(out / "masterclock_report.json", report)
    print(f"wrote {path}")
    print(
        f"always_available={report['always_available']} "
        f"fraction={report['available_fraction_pct']:.2f}%"
    )
    return EXIT_OK


def cmd_correlate(args) -> int:
    sc = _load(args)
    _print_banner(sc)
    seed = args.seed if args.seed is not None else sc.sim.rng_seed
    distance_m = args.distance_km * 1e3
    one_way = distance_m / C_LIGHT
    geom = LinkGeometry(visible=True, range_m=distance_m, v_rel_rad_m_s=0.0, elevation_deg=90.0)
    down = link_budget(geom, LinkDirection.DOWNLINK, sc.channel)
    a, b = simulate_streams(
        true_delta_s=args.delta,
        one_way_time_s=one_way,
        p=sc.precision,
        eta_each_way=down.eta_total,
        background_rate_hz=args.background,
        rng_seed=seed,
    )
    bin_width = args.bin_width
    search = args.search_window
    c_ab = cross_correlate(a, b, bin_width, (one_way - search, one_way + search))
    c_ba = cross_correlate(b, a, bin_width, (one_way - search, one_way + search))
    est = extract_offset(c_ab, c_ba)
    theory = t_bin(0.0, down.eta_total, sc.precision)
    tol = bin_width + sc.precision.timestamp_jitter_s
    report = {
        "scenario_hash": sc.hash(),
        "seed": seed,
        "version": qcs_sim.__version__,
        "injected_delta_s": args.delta,
        "recovered_delta_s": est.delta_s,
        "error_s": est.delta_s - args.delta,
        "round_trip_s": est.round_trip_s,
        "true_round_trip_s": 2 * one_way,
        "peak_significance": est.peak_significance,
        "eta_each_way": down.eta_total,
        "bin_width_s": bin_width,
        "theory_t_bin_s": theory,
        "tolerance_s": tol,
        "within_tolerance": bool(abs(est.delta_s - args.delta) <= tol),
    }
    out = _outdir(args)
    path = out / "correlate_report.json"
    _write_json(path, report)
    print(f"wrote {path}")
    print(
        f"recovered_delta={est.delta_s:.3e} error={report['error_s']:.3e} "
        f"sig={est.peak_significance:.1f} ok={report['within_tolerance']}"
    )
    return EXIT_OK


def cmd_explain_channel(args) -> int:
    sc = _load(args)
    _print_banner(sc)
    zenith_deg = args.zenith_deg
    geom = LinkGeometry(
        visible=True,
        range_m=args.range_km * 1e3,
        v_rel_rad_m_s=args.v_rel,
        elevation_deg=90.0 - zenith_deg,
    )
    budgets = {}
    for direction in (LinkDirection.UPLINK, LinkDirection.DOWNLINK, LinkDirection.INTERSAT):
        b = link_budget(geom, direction, sc.channel)
        budgets[direction.value] = {
            "eta_fs": b.eta_fs,
            "eta_atm": b.eta_atm,
            "eta_total": b.eta_total,
        }
    eta_two_way = math.sqrt(
        budgets["uplink"]["eta_total"] * budgets["downlink"]["eta_total"]
    )
    report = {
        "scenario_hash": sc.hash(),
        "version": qcs_sim.__version__,
        "channel_params": dataclasses.asdict(sc.channel),
        "precision_params": dataclasses.asdict(sc.precision),
        "range_km": args.range_km,
        "zenith_deg": zenith_deg,
        "budgets": budgets,
        "eta_two_way_ground": eta_two_way,
        "t_bin_at_v_rel": t_bin(args.v_rel, eta_two_way, sc.precision) if args.v_rel else None,
    }
    print(json.dumps(report, indent=2, sort_keys=True))
    if args.out:
        out = _outdir(args)
        _write_json(out / "channel_budget.json", report)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="qcs-sim",
        description="Deterministic satellite quantum-clock-sync network simulator",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--scenario", type=str, help="scenario JSON path")
    common.add_argument("--out", type=str, default="out", help="output directory")
    common.add_argument("--seed", type=int, default=None, help="override sim.rng_seed")
    common.add_argument("--threads", type=int, default=None, help="worker threads (env QCS_SIM_THREADS)")
    common.add_argument("--holdover", type=float, default=None, help="override clock holdover seconds")
    common.add_argument(
        "--target-precision", type=float, default=None, help="override clock precision seconds"
    )
    sub = p.add_subparsers(dest="cmd", required=True)

    t = sub.add_parser("trace", parents=[common], help="pair precision trace CSV")
    t.add_argument("--pair", type=str, required=True, help="stationA,stationB")
    t.add_argument("--mode", choices=sorted(_MODES), default="full")
    t.set_defaults(fn=cmd_trace)

    s = sub.add_parser("shadow", parents=[common], help="precision shadow grid CSV")
    s.add_argument("--epoch", type=float, default=None, help="epoch seconds (default t_start)")
    s.add_argument("--resolution", type=float, default=1.0, help="grid step in degrees")
    s.add_argument("--orbit", type=int, default=None, help="restrict to one orbit index")
    s.set_defaults(fn=cmd_shadow)

    f = sub.add_parser("fom", parents=[common], help="figures-of-merit sweep JSON")
    f.add_argument("--pairs", type=str, default=None, help="A,B;C,D (default: all pairs)")
    f.add_argument("--holdovers", type=str, default=None, help="comma-separated seconds")
    f.add_argument("--modes", type=str, default=None, help="comma-separated single,intra,full")
    f.set_defaults(fn=cmd_fom)

    m = sub.add_parser("masterclock", parents=[common], help="inter-orbit trace and availability")
    m.set_defaults(fn=cmd_masterclock)

    c = sub.add_parser("correlate", parents=[common], help="desk-scale protocol Monte-Carlo")
    c.add_argument("--delta", type=float, default=250e-9, help="injected clock offset seconds")
    c.add_argument("--distance-km", type=float, default=500.0)
    c.add_argument("--background", type=float, default=1e5, help="background rate Hz per side")
    c.add_argument("--bin-width", type=float, default=1e-12)
    c.add_argument("--search-window", type=float, default=5e-6, help="half-width around one-way time")
    c.set_defaults(fn=cmd_correlate)

    e = sub.add_parser("explain-channel", parents=[common], help="budget breakdown at a geometry")
    e.add_argument("--range-km", type=float, default=500.0)
    e.add_argument("--zenith-deg", type=float, default=0.0)
    e.add_argument("--v-rel", type=float, default=0.0, help="relative radial velocity m/s")
    e.set_defaults(fn=cmd_explain_channel)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except ScenarioError as e:
        json.dump({"error": "config", "message": str(e)}, sys.stderr)
        sys.stderr.write("\n")
        return EXIT_CONFIG
    except (NotVisibleError, NoPathError, NoSyncSignalError, ValueError) as e:
        json.dump({"error": "runtime", "message": str(e)}, sys.stderr)
        sys.stderr.write("\n")
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
