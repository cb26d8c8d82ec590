"""Scalar model and run parameters with eager validation.

The network couples m neuron fields (u_i, w_i) on a shared domain:

    du_i/dt = d * lap(u_i) + f(u_i) - sigma * w_i + J
    dw_i/dt = epsilon * (u_i + a - b * w_i)

with flux exchange between neurons only through boundary pieces.  The
dataclasses here are plain containers; `validate_*` enforce the admissible
ranges and report the first violated constraint by field name.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ValidationError

COUPLING_MODES = ("lagged", "monolithic")
SCHEMES = ("imex_euler", "imex_bdf2")


@dataclass(frozen=True)
class ModelParams:
    """Physical parameters of the coupled FitzHugh-Nagumo network.

    d: diffusivity of the voltage fields.
    sigma: recovery feedback gain in the voltage equation.
    J: applied current (any sign; enters estimates through |J| or J^2).
    epsilon: recovery time-scale separation.
    a, b: recovery kinetics offsets.
    p: boundary exchange coefficient (0 switches coupling off).
    m: number of neuron fields in the network.
    """

    d: float
    sigma: float
    J: float
    epsilon: float
    a: float
    b: float
    p: float
    m: int


#: Classic excitable-regime parameter set used throughout the tests and docs.
DEFAULT_MODEL = ModelParams(d=1.0, sigma=1.0, J=0.5, epsilon=0.08,
                            a=0.7, b=0.8, p=1.0, m=2)


def validate_params(params: ModelParams) -> ModelParams:
    """Check admissibility of model parameters.

    Returns the instance unchanged when valid (idempotent), otherwise raises
    ValidationError naming the first violated constraint.
    """
    # field order matters: the first violated constraint is the one reported
    for name in ("d", "sigma", "J", "epsilon", "a", "b", "p"):
        value = getattr(params, name)
        if not (isinstance(value, (int, float)) and math.isfinite(value)):
            raise ValidationError(f"{name} must be a finite number")
        if name == "J":
            continue  # applied current may take any sign
        if name == "p":
            if value < 0:
                raise ValidationError("p must be >= 0")
        elif value <= 0:
            raise ValidationError(f"{name} must be > 0")
    if not isinstance(params.m, int) or isinstance(params.m, bool):
        raise ValidationError("m must be an integer")
    if params.m < 2:
        raise ValidationError("m must be >= 2")
    return params


@dataclass(frozen=True)
class RunParams:
    """Numerical run controls.

    coupling_mode "lagged" solves each neuron against its neighbours' previous
    step; "monolithic" solves the full network implicitly.  scheme selects the
    first-order IMEX step or the second-order IMEX-BDF2 variant.
    amplitude_guard aborts the run when max|u| exceeds it (blow-up guard).
    """

    dt: float
    t_end: float
    output_stride: int = 10
    solver_tol: float = 1e-10
    solver_max_iter: int = 500
    coupling_mode: str = "monolithic"
    scheme: str = "imex_euler"
    amplitude_guard: float = 1e6


def validate_run_params(run: RunParams) -> RunParams:
    """Check run controls; returns the instance unchanged when valid."""
    if not (math.isfinite(run.dt) and run.dt > 0):
        raise ValidationError("dt must be > 0")
    if not (math.isfinite(run.t_end) and run.t_end > run.dt):
        raise ValidationError("t_end must be > dt")
    if not isinstance(run.output_stride, int) or run.output_stride < 1:
        raise ValidationError("output_stride must be an integer >= 1")
    if not (0 < run.solver_tol < 1):
        raise ValidationError("solver_tol must lie in (0, 1)")
    if not isinstance(run.solver_max_iter, int) or run.solver_max_iter < 1:
        raise ValidationError("solver_max_iter must be an integer >= 1")
    if run.coupling_mode not in COUPLING_MODES:
        raise ValidationError(
            f"coupling_mode must be one of {COUPLING_MODES}")
    if run.scheme not in SCHEMES:
        raise ValidationError(f"scheme must be one of {SCHEMES}")
    if not (math.isfinite(run.amplitude_guard) and run.amplitude_guard > 0):
        raise ValidationError("amplitude_guard must be > 0")
    return run
