"""Run configuration: YAML schema, validation, and initial conditions.

A config file has sections model / domain / partition / run /
initial_conditions (required) and kinetics / outputs / constants / checks
(optional).  Validation is eager and error messages carry the offending
key path.  See the README for the full schema.
"""
from __future__ import annotations

import copy
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import yaml

from .errors import ValidationError
from .geometry import (DomainSpec, EdgeRule, Mesh, PartitionSpec,
                       validate_domain)
from .integrator import NetworkState
from .kinetics import Kinetics, classic_cubic, custom_cubic, general_cubic
from .params import (ModelParams, RunParams, validate_params,
                     validate_run_params)
from .constants import SpectralEstimates

_IC_KINDS = ("constant", "bump", "random_uniform")


@dataclass(frozen=True)
class FieldIC:
    """Initial condition for one scalar field of one neuron."""

    kind: str
    value: float = 0.0                      # constant
    amplitude: float = 1.0                  # bump / random_uniform
    center: tuple[float, ...] | None = None  # bump; domain center if None
    width: float = 0.1                      # bump


@dataclass(frozen=True)
class NeuronIC:
    u: FieldIC
    w: FieldIC


@dataclass(frozen=True)
class InitialConditions:
    seed: int
    neurons: tuple[NeuronIC, ...]


@dataclass(frozen=True)
class OutputOptions:
    directory: str = "out"
    snapshots: bool = False
    plots: bool = True


@dataclass(frozen=True)
class CheckOptions:
    dissipative_slack: float = 1.05
    l4_slack: float = 1.05
    gronwall_slack_fraction: float = 0.05
    tail_fraction: float = 0.2


@dataclass(frozen=True)
class RunConfig:
    model: ModelParams
    run: RunParams
    domain: DomainSpec
    partition: PartitionSpec
    kinetics: Kinetics
    initial: InitialConditions
    outputs: OutputOptions
    checks: CheckOptions
    eta_source: str = "analytic"            # analytic | discrete
    estimates: SpectralEstimates | None = None


# ---------------------------------------------------------------------------
# parsing helpers


def _require(data: dict, key: str, where: str):
    if key not in data:
        raise ValidationError(f"{where}: missing required key '{key}'")
    return data[key]


def _reject_unknown(data: dict, allowed: tuple[str, ...], where: str):
    for key in data:
        if key not in allowed:
            raise ValidationError(f"{where}: unknown key '{key}'")


def _number(value, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ValidationError(f"{where}: expected a number, got {value!r}")
    return float(value)


def _integer(value, where: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ValidationError(f"{where}: expected an integer, got {value!r}")
    return value


def _parse_model(data: dict) -> ModelParams:
    _reject_unknown(data, ("d", "sigma", "J", "epsilon", "a", "b", "p", "m"),
                    "model")
    defaults = dict(d=1.0, sigma=1.0, J=0.5, epsilon=0.08, a=0.7, b=0.8,
                    p=1.0, m=2)
    merged = {**defaults, **data}
    params = ModelParams(
        d=_number(merged["d"], "model.d"),
        sigma=_number(merged["sigma"], "model.sigma"),
        J=_number(merged["J"], "model.J"),
        epsilon=_number(merged["epsilon"], "model.epsilon"),
        a=_number(merged["a"], "model.a"),
        b=_number(merged["b"], "model.b"),
        p=_number(merged["p"], "model.p"),
        m=_integer(merged["m"], "model.m"))
    try:
        return validate_params(params)
    except ValidationError as exc:
        raise ValidationError(f"model: {exc}") from None


def _parse_domain(data: dict) -> DomainSpec:
    _reject_unknown(data, ("kind", "lengths", "resolution"), "domain")
    kind = _require(data, "kind", "domain")
    lengths = _require(data, "lengths", "domain")
    resolution = _require(data, "resolution", "domain")
    if not isinstance(lengths, (list, tuple)):
        raise ValidationError("domain.lengths: expected a list")
    if not isinstance(resolution, (list, tuple)):
        raise ValidationError("domain.resolution: expected a list")
    spec = DomainSpec(kind=str(kind),
                      lengths=tuple(_number(v, "domain.lengths")
                                    for v in lengths),
                      resolution=tuple(_integer(v, "domain.resolution")
                                       for v in resolution))
    try:
        return validate_domain(spec)
    except ValidationError as exc:
        raise ValidationError(f"domain: {exc}") from None


def _parse_partition(data: dict, m: int) -> PartitionSpec:
    _reject_unknown(data, ("default", "edges"), "partition")
    default = data.get("default", "zero_flux")
    if default in ("none", None):
        default = None
    elif default not in ("zero_flux", "all_to_all"):
        raise ValidationError(
            f"partition: unknown partition default '{default}'")
    rules = []
    for k, entry in enumerate(data.get("edges", []) or []):
        where = f"partition.edges[{k}]"
        if not isinstance(entry, dict):
            raise ValidationError(f"{where}: expected a mapping")
        _reject_unknown(entry, ("edge", "span", "map"), where)
        edge = _require(entry, "edge", where)
        table = _require(entry, "map", where)
        if not isinstance(table, (list, tuple)) or len(table) != m:
            raise ValidationError(
                f"{where}.map: expected {m} partner entries (1-based)")
        span = entry.get("span")
        if span is not None:
            if not isinstance(span, (list, tuple)) or len(span) != 2:
                raise ValidationError(f"{where}.span: expected [lo, hi]")
            span = (_number(span[0], f"{where}.span"),
                    _number(span[1], f"{where}.span"))
        rules.append(EdgeRule(
            edge=str(edge),
            table=tuple(_integer(v, f"{where}.map") for v in table),
            span=span))
    return PartitionSpec(m=m, default=default, rules=tuple(rules))


def _parse_kinetics(data: dict) -> Kinetics:
    _reject_unknown(data, ("family", "kappa", "c", "coefficients"), "kinetics")
    family = data.get("family", "classic_cubic")
    try:
        if family == "classic_cubic":
            return classic_cubic()
        if family == "general_cubic":
            return general_cubic(_number(_require(data, "kappa", "kinetics"),
                                         "kinetics.kappa"),
                                 _number(_require(data, "c", "kinetics"),
                                         "kinetics.c"))
        if family == "custom_cubic":
            coeffs = _require(data, "coefficients", "kinetics")
            if not isinstance(coeffs, (list, tuple)) or len(coeffs) != 4:
                raise ValidationError(
                    "kinetics.coefficients: expected 4 values (descending)")
            return custom_cubic(*(_number(v, "kinetics.coefficients")
                                  for v in coeffs))
    except ValidationError as exc:
        raise ValidationError(f"kinetics: {exc}") from None
    raise ValidationError(f"kinetics.family: unknown family '{family}'")


def _parse_run(data: dict, m: int) -> RunParams:
    _reject_unknown(data, ("dt", "t_end", "output_stride", "solver_tol",
                           "solver_max_iter", "coupling_mode", "scheme",
                           "amplitude_guard"), "run")
    mode = data.get("coupling_mode", "auto")
    if mode == "auto":
        # monolithic stays cheap for small networks; larger ones lag
        mode = "monolithic" if m <= 8 else "lagged"
    run = RunParams(
        dt=_number(_require(data, "dt", "run"), "run.dt"),
        t_end=_number(_require(data, "t_end", "run"), "run.t_end"),
        output_stride=_integer(data.get("output_stride", 10),
                               "run.output_stride"),
        solver_tol=_number(data.get("solver_tol", 1e-10), "run.solver_tol"),
        solver_max_iter=_integer(data.get("solver_max_iter", 500),
                                 "run.solver_max_iter"),
        coupling_mode=str(mode),
        scheme=str(data.get("scheme", "imex_euler")),
        amplitude_guard=_number(data.get("amplitude_guard", 1e6),
                                "run.amplitude_guard"))
    try:
        return validate_run_params(run)
    except ValidationError as exc:
        raise ValidationError(f"run: {exc}") from None


def _parse_field_ic(data: dict, where: str) -> FieldIC:
    if not isinstance(data, dict):
        raise ValidationError(f"{where}: expected a mapping")
    _reject_unknown(data, ("kind", "value", "amplitude", "center", "width"),
                    where)
    kind = _require(data, "kind", where)
    if kind not in _IC_KINDS:
        raise ValidationError(
            f"{where}.kind: unknown kind '{kind}' (choose from {_IC_KINDS})")
    center = data.get("center")
    if center is not None:
        if isinstance(center, (int, float)):
            center = (float(center),)
        elif isinstance(center, (list, tuple)):
            center = tuple(_number(v, f"{where}.center") for v in center)
        else:
            raise ValidationError(f"{where}.center: expected number or list")
    return FieldIC(kind=str(kind),
                   value=_number(data.get("value", 0.0), f"{where}.value"),
                   amplitude=_number(data.get("amplitude", 1.0),
                                     f"{where}.amplitude"),
                   center=center,
                   width=_number(data.get("width", 0.1), f"{where}.width"))


def _parse_initial(data: dict, m: int) -> InitialConditions:
    _reject_unknown(data, ("seed", "neurons"), "initial_conditions")
    seed = _integer(data.get("seed", 0), "initial_conditions.seed")
    neurons_raw = _require(data, "neurons", "initial_conditions")
    if not isinstance(neurons_raw, (list, tuple)):
        raise ValidationError("initial_conditions.neurons: expected a list")
    if len(neurons_raw) != m:
        raise ValidationError(
            f"initial_conditions: expected {m} neuron entries, "
            f"got {len(neurons_raw)}")
    neurons = []
    for k, entry in enumerate(neurons_raw):
        where = f"initial_conditions.neurons[{k}]"
        if not isinstance(entry, dict):
            raise ValidationError(f"{where}: expected a mapping")
        _reject_unknown(entry, ("u", "w"), where)
        u_ic = _parse_field_ic(_require(entry, "u", where), f"{where}.u")
        w_spec = entry.get("w", {"kind": "constant", "value": 0.0})
        w_ic = _parse_field_ic(w_spec, f"{where}.w")
        neurons.append(NeuronIC(u=u_ic, w=w_ic))
    return InitialConditions(seed=seed, neurons=tuple(neurons))


def _parse_outputs(data: dict) -> OutputOptions:
    _reject_unknown(data, ("directory", "snapshots", "plots"), "outputs")
    return OutputOptions(
        directory=str(data.get("directory", "out")),
        snapshots=bool(data.get("snapshots", False)),
        plots=bool(data.get("plots", True)))


def _parse_checks(data: dict) -> CheckOptions:
    _reject_unknown(data, ("dissipative_slack", "l4_slack",
                           "gronwall_slack_fraction", "tail_fraction"),
                    "checks")
    opts = CheckOptions(
        dissipative_slack=_number(data.get("dissipative_slack", 1.05),
                                  "checks.dissipative_slack"),
        l4_slack=_number(data.get("l4_slack", 1.05), "checks.l4_slack"),
        gronwall_slack_fraction=_number(
            data.get("gronwall_slack_fraction", 0.05),
            "checks.gronwall_slack_fraction"),
        tail_fraction=_number(data.get("tail_fraction", 0.2),
                              "checks.tail_fraction"))
    if not 0.0 < opts.tail_fraction <= 1.0:
        raise ValidationError("checks.tail_fraction must lie in (0, 1]")
    return opts


def _parse_constants(data: dict) -> tuple[str, SpectralEstimates | None]:
    _reject_unknown(data, ("eta_source", "estimates"), "constants")
    eta_source = str(data.get("eta_source", "analytic"))
    if eta_source not in ("analytic", "discrete"):
        raise ValidationError(
            "constants.eta_source must be 'analytic' or 'discrete'")
    estimates = None
    est = data.get("estimates")
    if est is not None:
        if not isinstance(est, dict):
            raise ValidationError("constants.estimates: expected a mapping")
        _reject_unknown(est, ("semigroup_gain", "spectral_gap",
                              "reaction_lipschitz", "trace_embedding"),
                        "constants.estimates")
        def _opt(key):
            return (_number(est[key], f"constants.estimates.{key}")
                    if key in est else None)
        estimates = SpectralEstimates(
            semigroup_gain=_opt("semigroup_gain"),
            spectral_gap=_opt("spectral_gap"),
            reaction_lipschitz=_opt("reaction_lipschitz"),
            trace_embedding=_opt("trace_embedding"))
    return eta_source, estimates


def config_from_dict(data: dict) -> RunConfig:
    """Build and validate a RunConfig from a parsed YAML mapping."""
    if not isinstance(data, dict):
        raise ValidationError("config root must be a mapping")
    _reject_unknown(data, ("model", "domain", "partition", "run", "kinetics",
                           "initial_conditions", "outputs", "constants",
                           "checks"), "config")
    model = _parse_model(data.get("model", {}) or {})
    domain = _parse_domain(_require(data, "domain", "config"))
    partition = _parse_partition(_require(data, "partition", "config"),
                                 model.m)
    run = _parse_run(_require(data, "run", "config"), model.m)
    kin = _parse_kinetics(data.get("kinetics", {}) or {})
    initial = _parse_initial(_require(data, "initial_conditions", "config"),
                             model.m)
    outputs = _parse_outputs(data.get("outputs", {}) or {})
    checks = _parse_checks(data.get("checks", {}) or {})
    eta_source, estimates = _parse_constants(data.get("constants", {}) or {})
    return RunConfig(model=model, run=run, domain=domain, partition=partition,
                     kinetics=kin, initial=initial, outputs=outputs,
                     checks=checks, eta_source=eta_source,
                     estimates=estimates)


def load_config_dict(path: str | Path) -> dict:
    """Read and parse the YAML file, reporting syntax errors with location."""
    text = Path(path).read_text()
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        loc = f" (line {mark.line + 1}, column {mark.column + 1})" if mark else ""
        raise ValidationError(f"config parse error{loc}: {exc}") from None
    if data is None:
        raise ValidationError("config file is empty")
    return data


def load_config(path: str | Path) -> RunConfig:
    return config_from_dict(load_config_dict(path))


def set_config_value(data: dict, dotted: str, value) -> dict:
    """Return a deep copy of the raw config with data[dotted path] = value."""
    out = copy.deepcopy(data)
    keys = dotted.split(".")
    node = out
    for key in keys[:-1]:
        if not isinstance(node.get(key), dict):
            node[key] = {}
        node = node[key]
    node[keys[-1]] = value
    return out


# ---------------------------------------------------------------------------
# initial conditions


def _build_field(ic: FieldIC, mesh: Mesh, seed: int, neuron: int,
                 component: int) -> np.ndarray:
    if ic.kind == "constant":
        return np.full(mesh.n_nodes, ic.value)
    if ic.kind == "bump":
        center = ic.center
        if center is None:
            center = tuple(L / 2.0 for L in mesh.lengths)
        if len(center) != mesh.dim:
            raise ValidationError(
                f"bump center has {len(center)} coordinate(s), "
                f"domain is {mesh.dim}D")
        if not ic.width > 0:
            raise ValidationError("bump width must be > 0")
        r_sq = np.sum((mesh.coords - np.asarray(center)) ** 2, axis=1)
        return ic.amplitude * np.exp(-r_sq / (2.0 * ic.width ** 2))
    if ic.kind == "random_uniform":
        rng = np.random.default_rng([seed, neuron, component])
        return rng.uniform(-ic.amplitude, ic.amplitude, mesh.n_nodes)
    raise ValidationError(f"unknown initial condition kind '{ic.kind}'")


def build_initial_state(config: RunConfig, mesh: Mesh) -> NetworkState:
    """Realize the configured initial conditions on the mesh."""
    m = config.model.m
    u = np.empty((m, mesh.n_nodes))
    w = np.empty((m, mesh.n_nodes))
    for i, neuron in enumerate(config.initial.neurons):
        u[i] = _build_field(neuron.u, mesh, config.initial.seed, i, 0)
        w[i] = _build_field(neuron.w, mesh, config.initial.seed, i, 1)
    return NetworkState(t=0.0, u=u, w=w)
