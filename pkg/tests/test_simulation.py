"""Tests for the simulation driver: sampling, state storage, guards."""
from __future__ import annotations

import numpy as np
import pytest

from fhnet.config import config_from_dict
from fhnet.constants import analytic_poincare_constants, compute_derived_constants
from fhnet.errors import BlowUpError
from fhnet.geometry import build_mesh
from fhnet.kinetics import extract_bounds
from fhnet.simulation import Trajectory, derive_run_constants, run_simulation


def base_config_dict(**overrides) -> dict:
    """A small, fast two-neuron run; overrides patch top-level sections."""
    data = {
        "model": {"p": 1.0, "m": 2},
        "domain": {"kind": "rectangle", "lengths": [1.0, 1.0],
                   "resolution": [9, 9]},
        "partition": {"default": "all_to_all"},
        "run": {"dt": 0.02, "t_end": 0.2, "output_stride": 3},
        "initial_conditions": {
            "seed": 11,
            "neurons": [
                {"u": {"kind": "bump", "amplitude": 1.0, "width": 0.2}},
                {"u": {"kind": "constant", "value": 0.3},
                 "w": {"kind": "constant", "value": 0.1}},
            ],
        },
        "outputs": {"plots": False},
    }
    for key, section in overrides.items():
        if isinstance(section, dict) and isinstance(data.get(key), dict):
            data[key] = {**data[key], **section}
        else:
            data[key] = section
    return data


def run(**overrides) -> Trajectory:
    return run_simulation(config_from_dict(base_config_dict(**overrides)))


# ---------------------------------------------------------------------------
# sampling cadence


def test_samples_cover_initial_stride_and_final_step():
    # 10 steps, stride 3: sampled at steps 0, 3, 6, 9 and the final step 10
    traj = run()
    assert traj.times == pytest.approx([0.0, 0.06, 0.12, 0.18, 0.2])
    assert len(traj.samples) == len(traj.times)
    assert traj.samples[0].t == 0.0
    assert traj.final_state.t == pytest.approx(0.2)


def test_no_duplicate_sample_when_stride_divides_step_count():
    traj = run(run={"dt": 0.02, "t_end": 0.2, "output_stride": 5})
    assert traj.times == pytest.approx([0.0, 0.1, 0.2])


def test_step_count_rounds_to_nearest():
    # t_end = 1.05 dt rounds down to a single step
    traj = run(run={"dt": 0.02, "t_end": 0.021, "output_stride": 3})
    assert traj.final_state.t == pytest.approx(0.02)
    assert traj.times[-1] == pytest.approx(0.02)


def test_sample_times_must_increase():
    traj = run()
    with pytest.raises(ValueError, match="strictly increasing"):
        Trajectory(times=np.array([0.0, 0.0]), samples=traj.samples[:2],
                   final_state=traj.final_state, constants=traj.constants,
                   mesh=traj.mesh, partition=traj.partition)


def test_final_sample_matches_final_state_time():
    traj = run(run={"dt": 0.02, "t_end": 0.17, "output_stride": 4})
    # round(0.17 / 0.02) = 8 steps; sampled at 0, 4, 8
    assert traj.times == pytest.approx([0.0, 0.08, 0.16])
    assert traj.samples[-1].t == pytest.approx(traj.final_state.t)


# ---------------------------------------------------------------------------
# state storage


def test_states_not_kept_by_default():
    assert run().states is None


def test_outputs_snapshots_enables_state_storage():
    traj = run(outputs={"plots": False, "snapshots": True})
    assert traj.states is not None
    assert len(traj.states) == len(traj.samples)
    assert traj.states[0].t == 0.0
    assert traj.states[-1].t == pytest.approx(traj.final_state.t)


def test_store_states_argument_overrides_config():
    config = config_from_dict(
        base_config_dict(outputs={"plots": False, "snapshots": True}))
    assert run_simulation(config, store_states=False).states is None
    config = config_from_dict(base_config_dict())
    traj = run_simulation(config, store_states=True)
    assert traj.states is not None and len(traj.states) == len(traj.samples)


def test_stored_initial_state_is_a_copy():
    traj = run_simulation(config_from_dict(base_config_dict()),
                          store_states=True)
    assert traj.states[0].u is not traj.final_state.u
    assert not np.array_equal(traj.states[0].u, traj.final_state.u)


def test_solver_iterations_accumulate():
    assert run().solver_iterations > 0


# ---------------------------------------------------------------------------
# blow-up guards


def test_amplitude_guard_aborts_with_step_and_time():
    with pytest.raises(BlowUpError, match="amplitude guard") as excinfo:
        run(run={"dt": 0.02, "t_end": 0.2, "output_stride": 3,
                 "amplitude_guard": 0.5})
    assert excinfo.value.step == 1
    assert excinfo.value.time == pytest.approx(0.02)


@pytest.mark.filterwarnings("ignore:overflow encountered")
def test_reaction_overflow_surfaces_as_solver_error():
    # a huge explicit step on the cubic reaction overflows to infinity in a
    # few iterations; the solver refuses the non-finite right-hand side
    # (the guard is set high so the amplitude check cannot fire first)
    from fhnet.errors import SolverError
    with pytest.raises(SolverError, match="non-finite"):
        run(initial_conditions={
                "seed": 11,
                "neurons": [
                    {"u": {"kind": "constant", "value": 5.0}},
                    {"u": {"kind": "constant", "value": -5.0}},
                ],
            },
            run={"dt": 10.0, "t_end": 1000.0, "output_stride": 1,
                 "amplitude_guard": 1e305})


def test_nonfinite_state_aborts(monkeypatch):
    # defense in depth: if a stepper ever hands back a non-finite state the
    # driver aborts with the step index and time attached
    import fhnet.simulation as sim

    class _NaNStepper:
        total_solver_iterations = 0

        def __init__(self, *args, **kwargs):
            pass

        def advance(self, state):
            u = state.u.copy()
            u[0, 0] = np.nan
            return sim.NetworkState(t=state.t + 0.02, u=u, w=state.w.copy())

    monkeypatch.setattr(sim, "TimeStepper", _NaNStepper)
    with pytest.raises(BlowUpError, match="non-finite state at step 1") as ei:
        run()
    assert ei.value.step == 1
    assert ei.value.time == pytest.approx(0.02)


# ---------------------------------------------------------------------------
# constant derivation per run


def test_derived_constants_match_direct_chain():
    config = config_from_dict(base_config_dict())
    mesh = build_mesh(config.domain)
    got = derive_run_constants(config, mesh)
    eta1, eta2 = analytic_poincare_constants(mesh)
    want = compute_derived_constants(config.model,
                                     extract_bounds(config.kinetics),
                                     mesh.domain_measure, eta1, eta2)
    assert got == want


def test_discrete_eta_shifts_threshold_slightly_below_analytic():
    base = base_config_dict(domain={"kind": "rectangle",
                                    "lengths": [1.0, 1.0],
                                    "resolution": [17, 17]})
    config_a = config_from_dict(base)
    config_d = config_from_dict({**base,
                                 "constants": {"eta_source": "discrete"}})
    mesh = build_mesh(config_a.domain)
    analytic = derive_run_constants(config_a, mesh)
    discrete = derive_run_constants(config_d, mesh)
    gap = (analytic.sync_threshold - discrete.sync_threshold)
    assert 0.0 < gap / analytic.sync_threshold < 0.01
    # the recovery term, not the Poincare term, sets the rate here
    assert discrete.sync_rate == analytic.sync_rate == pytest.approx(0.128)
