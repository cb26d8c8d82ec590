"""File outputs: timeseries CSV, summary JSON, field snapshots, sweep CSV.

The timeseries column set is a stable contract (tests pin it): `t`, the
per-neuron norms, the per-pair mismatch norms, then the four aggregates.
Floats are written with repr-faithful %.17g so identical runs produce
byte-identical files.
"""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .config import RunConfig
from .constants import FORMULAS, DerivedConstants
from .diagnostics import (CheckResult, check_dissipative_bound,
                          check_gronwall_structure, check_l4_bound,
                          check_threshold_condition, fit_decay_rate,
                          pair_indices, sync_degree_estimate)
from .simulation import Trajectory

_FMT = "%.17g"


def _fmt(x: float) -> str:
    return _FMT % x


def timeseries_header(m: int) -> list[str]:
    cols = ["t"]
    cols += [f"u_norm_sq_{i + 1}" for i in range(m)]
    cols += [f"w_norm_sq_{i + 1}" for i in range(m)]
    cols += [f"u_l4_pow4_{i + 1}" for i in range(m)]
    cols += [f"grad_u_norm_sq_{i + 1}" for i in range(m)]
    pairs = pair_indices(m)
    cols += [f"U_norm_sq_{i + 1}_{j + 1}" for i, j in pairs]
    cols += [f"W_norm_sq_{i + 1}_{j + 1}" for i, j in pairs]
    cols += [f"U_h1_semi_sq_{i + 1}_{j + 1}" for i, j in pairs]
    cols += [f"U_boundary_sq_{i + 1}_{j + 1}" for i, j in pairs]
    cols += ["energy_total", "energy_weighted", "pair_sum", "boundary_signal"]
    return cols


def write_timeseries_csv(path: str | Path, traj: Trajectory) -> Path:
    path = Path(path)
    m = traj.partition.m
    lines = [",".join(timeseries_header(m))]
    for s in traj.samples:
        row = [s.t]
        row += list(s.u_norm_sq) + list(s.w_norm_sq)
        row += list(s.u_l4_pow4) + list(s.grad_u_norm_sq)
        row += list(s.pair_u_norm_sq) + list(s.pair_w_norm_sq)
        row += list(s.pair_grad_norm_sq) + list(s.pair_boundary_sq)
        row += [s.energy_total, s.energy_weighted, s.pair_sum,
                s.boundary_signal]
        lines.append(",".join(_fmt(v) for v in row))
    path.write_text("\n".join(lines) + "\n")
    return path


def run_checks(traj: Trajectory, config: RunConfig,
               gronwall_dt_term: float = 0.0) -> list[CheckResult]:
    """The standard check set for one run."""
    opts = config.checks
    results = check_dissipative_bound(traj.samples, traj.constants,
                                      slack=opts.dissipative_slack,
                                      tail_fraction=opts.tail_fraction)
    results.append(check_l4_bound(traj.samples, traj.constants,
                                  slack=opts.l4_slack,
                                  tail_fraction=opts.tail_fraction))
    if len(traj.samples) >= 3:
        results.append(check_gronwall_structure(
            traj.samples, traj.constants,
            slack_fraction=opts.gronwall_slack_fraction,
            dt_term=gronwall_dt_term))
    results.append(check_threshold_condition(
        traj.samples, traj.constants, config.model.p,
        tail_fraction=opts.tail_fraction))
    return results


def constants_table(constants: DerivedConstants) -> list[dict]:
    """Name / value / defining formula rows, stable order."""
    rows = []
    for name in ("energy_u_weight", "energy_source_coeff",
                 "energy_decay_rate", "absorbing_radius_sq", "l4_w_weight",
                 "l4_decay_rate", "l4_radius", "poincare_lower",
                 "poincare_mean_weight", "sync_threshold", "sync_rate",
                 "reaction_lipschitz_bound", "h1_gap_bound",
                 "trace_gap_bound"):
        rows.append({"name": name, "value": getattr(constants, name),
                     "formula": FORMULAS[name]})
    return rows


def tail_rates(traj: Trajectory, tail_fraction: float) -> dict:
    """Tail sync degree and fitted decay rate of the pair sum."""
    times = traj.times
    pair = np.array([s.pair_sum for s in traj.samples])
    t0 = times[0] + (times[-1] - times[0]) * (1.0 - tail_fraction)
    out = {"sync_degree_tail": sync_degree_estimate(traj.samples,
                                                    tail_fraction)}
    try:
        out["pair_sum_decay_rate"] = fit_decay_rate(times, pair,
                                                    window=(t0, times[-1]))
    except ValueError as exc:
        out["pair_sum_decay_rate"] = None
        out["pair_sum_decay_rate_note"] = str(exc)
    return out


def build_summary(config: RunConfig, traj: Trajectory,
                  checks: list[CheckResult]) -> dict:
    rates = tail_rates(traj, config.checks.tail_fraction)
    threshold_entry = next((c for c in checks
                            if c.name == "sync_threshold_monitor"), None)
    return {
        "model": {k: getattr(config.model, k)
                  for k in ("d", "sigma", "J", "epsilon", "a", "b", "p", "m")},
        "run": {k: getattr(config.run, k)
                for k in ("dt", "t_end", "output_stride", "coupling_mode",
                          "scheme")},
        "domain": {"kind": config.domain.kind,
                   "lengths": list(config.domain.lengths),
                   "resolution": list(config.domain.resolution)},
        "constants": constants_table(traj.constants),
        "checks": [{"name": c.name, "passed": c.passed, "gating": c.gating,
                    "worst_margin": c.worst_margin,
                    "worst_time": c.worst_time, "details": c.details}
                   for c in checks],
        "rates": {**rates, "sync_rate_bound": traj.constants.sync_rate},
        "threshold_monitor": (threshold_entry.details
                              if threshold_entry else None),
        "solver_iterations": traj.solver_iterations,
        "samples": len(traj.samples),
    }


def write_summary(path: str | Path, summary: dict) -> Path:
    path = Path(path)
    path.write_text(json.dumps(summary, indent=2, sort_keys=True,
                               default=_json_default) + "\n")
    return path


def _json_default(obj):
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"not JSON serializable: {type(obj)}")


def write_field_snapshots(directory: str | Path, traj: Trajectory) -> list[Path]:
    """One plain-text file per stored state, neuron, and component.

    Header is three comment lines (time, mesh dims, neuron index); data is
    one row per mesh row (x index), columns along y.
    """
    if traj.states is None:
        raise ValueError("trajectory was run without stored states")
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    shape = traj.mesh.shape
    written = []
    for k, state in enumerate(traj.states):
        for i in range(traj.partition.m):
            for comp in ("u", "w"):
                fieldvals = getattr(state, comp)[i].reshape(shape)
                if fieldvals.ndim == 1:
                    fieldvals = fieldvals[None, :]
                path = directory / f"{comp}_{i + 1}_{k:05d}.txt"
                header = (f"t = {_fmt(state.t)}\n"
                          f"shape = {' '.join(str(s) for s in shape)}\n"
                          f"neuron = {i + 1} component = {comp}")
                np.savetxt(path, fieldvals, fmt=_FMT, header=header)
                written.append(path)
    return written


SWEEP_COLUMNS = ["param", "value", "sync_degree_tail", "pair_sum_decay_rate",
                 "p_tail_min_signal", "sync_threshold"]


def write_sweep_csv(path: str | Path, rows: list[dict]) -> Path:
    path = Path(path)
    lines = [",".join(SWEEP_COLUMNS)]
    for row in rows:
        out = []
        for col in SWEEP_COLUMNS:
            val = row[col]
            if val is None:
                out.append("nan")
            elif isinstance(val, str):
                out.append(val)
            else:
                out.append(_fmt(val))
        lines.append(",".join(out))
    path.write_text("\n".join(lines) + "\n")
    return path
