"""Command line interface.

    fhnet simulate  --config cfg.yaml --out outdir [--strict] [--no-plots]
    fhnet constants --config cfg.yaml
    fhnet sweep     --config cfg.yaml --param model.p --values 0,1,10
    fhnet verify    [--filter name]

simulate writes timeseries.csv, summary.json, optional field snapshots,
and (by default) PNG figures next to the CSV.  --strict exits nonzero when
a gating estimate check fails.  verify runs the built-in acceptance
scenarios and exits nonzero if any fail.
"""
from __future__ import annotations

import argparse
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from .config import (RunConfig, config_from_dict, load_config_dict,
                     set_config_value)
from .errors import FhnetError
from .geometry import build_mesh
from .reporting import (build_summary, run_checks, tail_rates,
                        write_field_snapshots, write_summary,
                        write_sweep_csv, write_timeseries_csv)
from .simulation import derive_run_constants, run_simulation

_NOT_DETERMINED = "not numerically determined (supply constants.estimates)"


def _load(path: str) -> tuple[dict, RunConfig]:
    raw = load_config_dict(path)
    return raw, config_from_dict(raw)


def _print_constants(constants) -> None:
    from .reporting import constants_table
    width = max(len(r["name"]) for r in constants_table(constants))
    for row in constants_table(constants):
        name, value, formula = row["name"], row["value"], row["formula"]
        if value is None:
            print(f"{name:<{width}} = {_NOT_DETERMINED}")
        else:
            print(f"{name:<{width}} = {value:.10g}")
        print(f"{'':<{width}}   [{formula}]")


def _print_checks(checks) -> None:
    for c in checks:
        tag = "PASS" if c.passed else "FAIL"
        kind = "" if c.gating else " (monitor)"
        extra = ""
        if c.name == "sync_threshold_monitor":
            d = c.details
            state = "satisfied" if d["satisfied"] else "unsatisfied"
            extra = (f": {state}, p*tail-min(S) = {d['p_tail_min_signal']:.6g}"
                     f" vs threshold {d['threshold']:.6g}")
        else:
            extra = (f": worst margin {c.worst_margin:.3e}"
                     f" at t = {c.worst_time:.6g}")
        print(f"{tag} {c.name}{kind}{extra}")


def cmd_simulate(args) -> int:
    _, config = _load(args.config)
    out_dir = Path(args.out) if args.out else Path(config.outputs.directory)
    out_dir.mkdir(parents=True, exist_ok=True)
    store = config.outputs.snapshots or args.snapshots
    traj = run_simulation(config, store_states=store)
    checks = run_checks(traj, config)

    write_timeseries_csv(out_dir / "timeseries.csv", traj)
    write_summary(out_dir / "summary.json",
                  build_summary(config, traj, checks))
    if store:
        write_field_snapshots(out_dir / "snapshots", traj)
    if config.outputs.plots and not args.no_plots:
        from .figures import render_run_figures
        render_run_figures(out_dir, traj)

    _print_checks(checks)
    rates = tail_rates(traj, config.checks.tail_fraction)
    rate = rates.get("pair_sum_decay_rate")
    rate_txt = "undefined" if rate is None else f"{rate:.6g}"
    print(f"tail sync degree = {rates['sync_degree_tail']:.6g}; "
          f"fitted P decay rate = {rate_txt} "
          f"(sync rate bound {traj.constants.sync_rate:.6g})")
    print(f"wrote {out_dir / 'timeseries.csv'}")

    if args.strict and any(c.gating and not c.passed for c in checks):
        return 2
    return 0


def cmd_constants(args) -> int:
    _, config = _load(args.config)
    mesh = build_mesh(config.domain)
    constants = derive_run_constants(config, mesh)
    _print_constants(constants)
    return 0


def _sweep_worker(job: tuple[dict, str, float]) -> dict:
    raw, param, value = job
    config = config_from_dict(set_config_value(raw, param, value))
    traj = run_simulation(config)
    rates = tail_rates(traj, config.checks.tail_fraction)
    from .diagnostics import check_threshold_condition
    monitor = check_threshold_condition(traj.samples, traj.constants,
                                        config.model.p,
                                        config.checks.tail_fraction)
    return {"param": param, "value": value,
            "sync_degree_tail": rates["sync_degree_tail"],
            "pair_sum_decay_rate": rates["pair_sum_decay_rate"],
            "p_tail_min_signal": monitor.details["p_tail_min_signal"],
            "sync_threshold": traj.constants.sync_threshold}


def cmd_sweep(args) -> int:
    raw, config = _load(args.config)
    try:
        values = [float(v) for v in args.values.split(",") if v.strip()]
    except ValueError:
        print(f"error: --values must be a comma-separated list of numbers, "
              f"got '{args.values}'", file=sys.stderr)
        return 1
    if not values:
        print("error: --values is empty", file=sys.stderr)
        return 1
    out_dir = Path(args.out) if args.out else Path(config.outputs.directory)
    out_dir.mkdir(parents=True, exist_ok=True)

    jobs = [(raw, args.param, v) for v in values]
    rows: list[dict] = []
    if args.serial or len(jobs) == 1:
        rows = [_sweep_worker(job) for job in jobs]
    else:
        try:
            with ProcessPoolExecutor(max_workers=min(len(jobs), 4)) as pool:
                rows = list(pool.map(_sweep_worker, jobs))
        except (OSError, PermissionError):
            # restricted environments may forbid subprocess pools
            rows = [_sweep_worker(job) for job in jobs]

    write_sweep_csv(out_dir / "sweep_summary.csv", rows)
    if config.outputs.plots and not args.no_plots:
        from .figures import render_sweep_figure
        render_sweep_figure(out_dir, args.param, rows)
    for row in rows:
        rate = row["pair_sum_decay_rate"]
        rate_txt = "undefined" if rate is None else f"{rate:.6g}"
        print(f"{args.param} = {row['value']:g}: "
              f"sync degree {row['sync_degree_tail']:.6g}, "
              f"P decay rate {rate_txt}, "
              f"p*tail-min(S) {row['p_tail_min_signal']:.6g}, "
              f"threshold {row['sync_threshold']:.6g}")
    print(f"wrote {out_dir / 'sweep_summary.csv'}")
    return 0


def cmd_verify(args) -> int:
    from .acceptance import run_scenarios
    results = run_scenarios(name_filter=args.filter)
    if not results:
        print(f"no scenario matches filter '{args.filter}'", file=sys.stderr)
        return 1
    failed = 0
    for res in results:
        tag = "PASS" if res.passed else "FAIL"
        print(f"{tag} {res.name}: {res.detail}")
        if res.note:
            print(f"     note: {res.note}")
        if not res.passed:
            failed += 1
    total = len(results)
    print(f"{total - failed}/{total} scenarios passed")
    return 0 if failed == 0 else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fhnet",
        description="Simulate and verify boundary-coupled FitzHugh-Nagumo "
                    "neuron networks.")
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run one simulation")
    sim.add_argument("--config", required=True)
    sim.add_argument("--out", default=None,
                     help="output directory (default: outputs.directory)")
    sim.add_argument("--strict", action="store_true",
                     help="exit nonzero when a gating check fails")
    sim.add_argument("--no-plots", action="store_true")
    sim.add_argument("--snapshots", action="store_true",
                     help="also dump per-field snapshots")
    sim.set_defaults(func=cmd_simulate)

    con = sub.add_parser("constants", help="print the derived constants")
    con.add_argument("--config", required=True)
    con.set_defaults(func=cmd_constants)

    swp = sub.add_parser("sweep", help="sweep one parameter")
    swp.add_argument("--config", required=True)
    swp.add_argument("--param", required=True,
                     help="dotted config path, e.g. model.p")
    swp.add_argument("--values", required=True,
                     help="comma-separated values")
    swp.add_argument("--out", default=None)
    swp.add_argument("--no-plots", action="store_true")
    swp.add_argument("--serial", action="store_true",
                     help="run sweep points sequentially")
    swp.set_defaults(func=cmd_sweep)

    ver = sub.add_parser("verify", help="run built-in acceptance scenarios")
    ver.add_argument("--filter", default=None,
                     help="only scenarios whose name contains this")
    ver.set_defaults(func=cmd_verify)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except FhnetError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
