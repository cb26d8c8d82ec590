"""Validation behavior of the scalar parameter containers."""
from __future__ import annotations

import math
from dataclasses import replace

import pytest

from fhnet.errors import ValidationError
from fhnet.params import (DEFAULT_MODEL, ModelParams, RunParams,
                          validate_params, validate_run_params)


def test_default_model_is_valid():
    assert validate_params(DEFAULT_MODEL) is DEFAULT_MODEL


def test_default_values():
    assert DEFAULT_MODEL == ModelParams(d=1.0, sigma=1.0, J=0.5, epsilon=0.08,
                                        a=0.7, b=0.8, p=1.0, m=2)


@pytest.mark.parametrize("name", ["d", "sigma", "epsilon", "a", "b"])
@pytest.mark.parametrize("bad", [0.0, -1.0])
def test_positive_fields_rejected(name, bad):
    params = replace(DEFAULT_MODEL, **{name: bad})
    with pytest.raises(ValidationError, match=f"{name} must be > 0"):
        validate_params(params)


@pytest.mark.parametrize("name", ["d", "sigma", "J", "epsilon", "a", "b", "p"])
@pytest.mark.parametrize("bad", [math.nan, math.inf, -math.inf])
def test_non_finite_fields_rejected(name, bad):
    params = replace(DEFAULT_MODEL, **{name: bad})
    with pytest.raises(ValidationError, match=f"{name} must be a finite"):
        validate_params(params)


def test_applied_current_may_take_any_sign():
    for J in (-2.5, 0.0, 3.0):
        validate_params(replace(DEFAULT_MODEL, J=J))


def test_exchange_coefficient_zero_switches_coupling_off():
    validate_params(replace(DEFAULT_MODEL, p=0.0))


def test_exchange_coefficient_negative_rejected():
    with pytest.raises(ValidationError, match="p must be >= 0"):
        validate_params(replace(DEFAULT_MODEL, p=-0.5))


def test_first_violated_constraint_wins():
    # several fields invalid at once: the earliest in field order is reported
    params = replace(DEFAULT_MODEL, d=-1.0, b=-1.0, p=-1.0)
    with pytest.raises(ValidationError, match="d must be > 0"):
        validate_params(params)


def test_network_size_must_be_at_least_two():
    with pytest.raises(ValidationError, match="m must be >= 2"):
        validate_params(replace(DEFAULT_MODEL, m=1))


@pytest.mark.parametrize("bad", [2.0, "2", True])
def test_network_size_must_be_an_integer(bad):
    with pytest.raises(ValidationError, match="m must be an integer"):
        validate_params(replace(DEFAULT_MODEL, m=bad))


def test_default_run_params_are_valid():
    run = RunParams(dt=0.01, t_end=1.0)
    assert validate_run_params(run) is run
    assert run.output_stride == 10
    assert run.coupling_mode == "monolithic"
    assert run.scheme == "imex_euler"


@pytest.mark.parametrize("kwargs,message", [
    (dict(dt=0.0), "dt must be > 0"),
    (dict(dt=-0.1), "dt must be > 0"),
    (dict(dt=math.nan), "dt must be > 0"),
    (dict(dt=0.5, t_end=0.5), "t_end must be > dt"),
    (dict(output_stride=0), "output_stride must be an integer >= 1"),
    (dict(output_stride=2.0), "output_stride must be an integer >= 1"),
    (dict(solver_tol=0.0), r"solver_tol must lie in \(0, 1\)"),
    (dict(solver_tol=1.0), r"solver_tol must lie in \(0, 1\)"),
    (dict(solver_max_iter=0), "solver_max_iter must be an integer >= 1"),
    (dict(coupling_mode="implicit"), "coupling_mode must be one of"),
    (dict(scheme="rk4"), "scheme must be one of"),
    (dict(amplitude_guard=0.0), "amplitude_guard must be > 0"),
])
def test_run_param_violations(kwargs, message):
    base = dict(dt=0.01, t_end=1.0)
    base.update(kwargs)
    with pytest.raises(ValidationError, match=message):
        validate_run_params(RunParams(**base))
