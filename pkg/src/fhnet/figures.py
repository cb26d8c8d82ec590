"""Figure rendering for run and sweep reports (headless, files only)."""
from __future__ import annotations

from pathlib import Path

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from .simulation import Trajectory


def _positive(times, values):
    mask = values > 0.0
    return times[mask], values[mask]


def render_run_figures(directory: str | Path, traj: Trajectory) -> list[Path]:
    """energy.png (E, E_w vs bound) and synchronization.png (P, S)."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    times = traj.times
    c = traj.constants
    energy = np.array([s.energy_total for s in traj.samples])
    weighted = np.array([s.energy_weighted for s in traj.samples])
    pair = np.array([s.pair_sum for s in traj.samples])
    signal = np.array([s.boundary_signal for s in traj.samples])
    written = []

    fig, ax = plt.subplots(figsize=(7.0, 4.2))
    ratio = max(c.energy_u_weight, 1.0) / min(c.energy_u_weight, 1.0)
    bound = ratio * np.exp(-c.energy_decay_rate * (times - times[0])) \
        * energy[0] + (c.absorbing_radius_sq - 1.0)
    ax.semilogy(times, energy, label="E(t)")
    ax.semilogy(times, weighted, label="E_w(t)")
    ax.semilogy(times, bound, "k--", lw=1.0, label="exponential bound")
    ax.axhline(c.absorbing_radius_sq, color="gray", lw=0.8, ls=":",
               label="absorbing radius^2")
    ax.set_xlabel("t")
    ax.set_ylabel("energy")
    ax.legend(loc="best", fontsize=8)
    ax.set_title("network energy vs dissipative bound")
    fig.tight_layout()
    path = directory / "energy.png"
    fig.savefig(path, dpi=150)
    plt.close(fig)
    written.append(path)

    fig, ax = plt.subplots(figsize=(7.0, 4.2))
    tp, vp = _positive(times, pair)
    ts, vs = _positive(times, signal)
    if tp.size:
        ax.semilogy(tp, vp, label="pair sum P(t)")
    if ts.size:
        ax.semilogy(ts, vs, label="boundary signal S(t)")
    ax.set_xlabel("t")
    ax.set_ylabel("pair mismatch")
    ax.legend(loc="best", fontsize=8)
    ax.set_title("synchronization diagnostics")
    fig.tight_layout()
    path = directory / "synchronization.png"
    fig.savefig(path, dpi=150)
    plt.close(fig)
    written.append(path)
    return written


def render_sweep_figure(directory: str | Path, param: str,
                        rows: list[dict]) -> Path:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    values = np.array([row["value"] for row in rows], dtype=float)
    rates = np.array([np.nan if row["pair_sum_decay_rate"] is None
                      else row["pair_sum_decay_rate"] for row in rows])
    degrees = np.array([row["sync_degree_tail"] for row in rows], dtype=float)

    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9.5, 4.0))
    ax1.plot(values, rates, "o-")
    ax1.set_xlabel(param)
    ax1.set_ylabel("fitted decay rate of P(t)")
    ax1.set_title("pair-sum decay rate")
    ax2.semilogy(values, np.maximum(degrees, 1e-300), "s-")
    ax2.set_xlabel(param)
    ax2.set_ylabel("tail sync degree")
    ax2.set_title("synchronization degree")
    fig.tight_layout()
    path = directory / "sweep.png"
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
