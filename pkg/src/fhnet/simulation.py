"""Simulation driver: from a RunConfig to a sampled Trajectory."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import RunConfig, build_initial_state
from .constants import (DerivedConstants, analytic_poincare_constants,
                        compute_derived_constants,
                        estimate_poincare_constants)
from .diagnostics import SampleDiagnostics, sample_diagnostics
from .errors import BlowUpError
from .geometry import (BoundaryPartition, Mesh, build_boundary_partition,
                       build_mesh)
from .integrator import NetworkState, TimeStepper
from .kinetics import extract_bounds


@dataclass
class Trajectory:
    """Sampled diagnostics (and optionally states) of one simulation run."""

    times: np.ndarray
    samples: list[SampleDiagnostics]
    final_state: NetworkState
    constants: DerivedConstants
    mesh: Mesh
    partition: BoundaryPartition
    states: list[NetworkState] | None = None
    solver_iterations: int = 0

    def __post_init__(self):
        if np.any(np.diff(self.times) <= 0.0):
            raise ValueError("sample times must be strictly increasing")


def derive_run_constants(config: RunConfig, mesh: Mesh) -> DerivedConstants:
    """Constant chain for a configured run (analytic or discrete eta)."""
    bounds = extract_bounds(config.kinetics)
    if config.eta_source == "discrete":
        eta1, eta2 = estimate_poincare_constants(mesh)
    else:
        eta1, eta2 = analytic_poincare_constants(mesh)
    return compute_derived_constants(config.model, bounds,
                                     mesh.domain_measure, eta1, eta2,
                                     config.estimates)


def run_simulation(config: RunConfig,
                   store_states: bool | None = None) -> Trajectory:
    """Advance the configured network to t_end, sampling diagnostics.

    Samples are taken at step 0, every output_stride steps, and at the
    final step.  Raises BlowUpError when a field stops being finite or
    max|u| exceeds the amplitude guard; SolverError propagates from the
    linear solver.
    """
    mesh = build_mesh(config.domain)
    partition = build_boundary_partition(mesh, config.partition)
    constants = derive_run_constants(config, mesh)
    stepper = TimeStepper(mesh, partition, config.model, config.run,
                          config.kinetics)
    state = build_initial_state(config, mesh)

    run = config.run
    n_steps = int(round(run.t_end / run.dt))
    if n_steps < 1:
        n_steps = 1
    keep = config.outputs.snapshots if store_states is None else store_states

    samples = [sample_diagnostics(state, mesh, partition, constants)]
    states = [state.copy()] if keep else None
    guard = run.amplitude_guard

    for k in range(1, n_steps + 1):
        state = stepper.advance(state)
        if not (np.all(np.isfinite(state.u)) and np.all(np.isfinite(state.w))):
            raise BlowUpError(
                f"non-finite state at step {k} (t = {state.t:.6g})",
                step=k, time=state.t)
        peak = float(np.max(np.abs(state.u)))
        if peak > guard:
            raise BlowUpError(
                f"max|u| = {peak:.3e} exceeded the amplitude guard "
                f"{guard:.3e} at step {k} (t = {state.t:.6g})",
                step=k, time=state.t)
        if k % run.output_stride == 0 or k == n_steps:
            samples.append(sample_diagnostics(state, mesh, partition,
                                              constants))
            if keep:
                states.append(state.copy())

    times = np.array([s.t for s in samples])
    return Trajectory(times=times, samples=samples, final_state=state,
                      constants=constants, mesh=mesh, partition=partition,
                      states=states,
                      solver_iterations=stepper.total_solver_iterations)
