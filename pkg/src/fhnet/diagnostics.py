"""Per-sample energy diagnostics and the estimate checks built on them.

For state g_i = (u_i, w_i) the monitored aggregates are

    E(t)   = sum_i (||u_i||^2 + ||w_i||^2)          total energy
    E_w(t) = c1*sum_i ||u_i||^2 + sum_i ||w_i||^2    weighted energy
    P(t)   = sum_{i<j} (||U_ij||^2 + ||W_ij||^2)     pair mismatch
    S(t)   = sum_{i<j} int_Gamma U_ij^2              boundary mismatch

with U_ij = u_i - u_j, W_ij = w_i - w_j and c1 the energy u-weight.
Asymptotic statements (liminf/limsup) are approximated by min/max over a
tail window, by default the final 20% of samples.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .constants import DerivedConstants
from .geometry import BoundaryPartition, Mesh
from .integrator import NetworkState
from .operators import boundary_integral_sq, grad_norm_sq, volume_integral

DEFAULT_TAIL_FRACTION = 0.2


def pair_indices(m: int) -> list[tuple[int, int]]:
    """Unordered pairs (i, j), i < j, in lexicographic order."""
    return [(i, j) for i in range(m) for j in range(i + 1, m)]


@dataclass(frozen=True)
class SampleDiagnostics:
    """Quadrature functionals of one sampled state."""

    t: float
    u_norm_sq: np.ndarray           # (m,)
    w_norm_sq: np.ndarray
    u_l4_pow4: np.ndarray
    grad_u_norm_sq: np.ndarray
    pair_u_norm_sq: np.ndarray      # (n_pairs,) ordered like pair_indices
    pair_w_norm_sq: np.ndarray
    pair_grad_norm_sq: np.ndarray
    pair_boundary_sq: np.ndarray
    energy_total: float
    energy_weighted: float
    pair_sum: float
    boundary_signal: float


def sample_diagnostics(state: NetworkState, mesh: Mesh,
                       partition: BoundaryPartition,
                       constants: DerivedConstants) -> SampleDiagnostics:
    """Evaluate all monitored functionals for one state."""
    m = state.u.shape[0]
    if partition.m != m:
        raise ValueError("partition and state disagree on m")
    u_sq = np.array([volume_integral(mesh, state.u[i], 2) for i in range(m)])
    w_sq = np.array([volume_integral(mesh, state.w[i], 2) for i in range(m)])
    u_l4 = np.array([volume_integral(mesh, state.u[i], 4) for i in range(m)])
    grads = np.array([grad_norm_sq(mesh, state.u[i]) for i in range(m)])

    pairs = pair_indices(m)
    pu = np.empty(len(pairs))
    pw = np.empty(len(pairs))
    pg = np.empty(len(pairs))
    pb = np.empty(len(pairs))
    for k, (i, j) in enumerate(pairs):
        du = state.u[i] - state.u[j]
        dw = state.w[i] - state.w[j]
        pu[k] = volume_integral(mesh, du, 2)
        pw[k] = volume_integral(mesh, dw, 2)
        pg[k] = grad_norm_sq(mesh, du)
        pb[k] = boundary_integral_sq(mesh, du)

    c1 = constants.energy_u_weight
    return SampleDiagnostics(
        t=state.t, u_norm_sq=u_sq, w_norm_sq=w_sq, u_l4_pow4=u_l4,
        grad_u_norm_sq=grads, pair_u_norm_sq=pu, pair_w_norm_sq=pw,
        pair_grad_norm_sq=pg, pair_boundary_sq=pb,
        energy_total=float(np.sum(u_sq) + np.sum(w_sq)),
        energy_weighted=float(c1 * np.sum(u_sq) + np.sum(w_sq)),
        pair_sum=float(np.sum(pu) + np.sum(pw)),
        boundary_signal=float(np.sum(pb)))


# ---------------------------------------------------------------------------
# boundary pairing sums (coupling bilinear identity material)


def boundary_pairing_sums(u: np.ndarray, mesh: Mesh,
                          partition: BoundaryPartition) -> dict[str, float]:
    """Quadrature sums around the coupling bilinear forms G_ij.

    With chi_i(x) = u_i(x) - u_{partner of i at x}(x) on the boundary and
    G_ij = int_Gamma (chi_i - chi_j)(u_i - u_j):

      double_sum          = sum over all ordered pairs (i,j) of G_ij
      all_pairs_boundary  = sum over all ordered pairs of int_Gamma (u_i-u_j)^2
      paired_pieces       = 2*m * sum_{i<j} int_{Gamma_ij} (u_i-u_j)^2

    double_sum == paired_pieces holds identically; all_pairs_boundary is a
    different quantity in general.
    """
    m = partition.m
    # chi is a per-face quantity: corner nodes may carry different partners
    # on each adjacent face, so accumulate face by face
    double_sum = 0.0
    for f in mesh.faces:
        part = partition.partners[f.index]
        for node, wt in zip(f.nodes, f.node_weights):
            chi = np.array([u[i, node] - u[part[i], node] for i in range(m)])
            uv = u[:, node]
            for i in range(m):
                for j in range(m):
                    if i != j:
                        double_sum += wt * (chi[i] - chi[j]) * (uv[i] - uv[j])

    all_pairs = 0.0
    for i in range(m):
        for j in range(m):
            if i != j:
                all_pairs += boundary_integral_sq(mesh, u[i] - u[j])

    paired = 0.0
    for i, j in pair_indices(m):
        paired += boundary_integral_sq(mesh, u[i] - u[j], partition,
                                       neuron=i, partner=j)
    paired *= 2.0 * m
    return {"double_sum": double_sum, "all_pairs_boundary": all_pairs,
            "paired_pieces": paired}


# ---------------------------------------------------------------------------
# estimate checks


@dataclass(frozen=True)
class CheckResult:
    """One entry of a check report.

    gating=False marks monitors whose outcome must not fail a run (the
    threshold condition depends on the solution itself).  worst_margin is
    relative: the smallest normalized slack left before violation.
    """

    name: str
    passed: bool
    gating: bool
    worst_margin: float
    worst_time: float | None
    details: dict = field(default_factory=dict)


def _series(samples: list[SampleDiagnostics], attr: str) -> np.ndarray:
    return np.array([getattr(s, attr) for s in samples])


def _tail_slice(n: int, tail_fraction: float) -> slice:
    start = min(n - 1, int(np.ceil(n * (1.0 - tail_fraction))))
    return slice(start, n)


def check_dissipative_bound(samples: list[SampleDiagnostics],
                            constants: DerivedConstants,
                            slack: float = 1.05,
                            tail_fraction: float = DEFAULT_TAIL_FRACTION
                            ) -> list[CheckResult]:
    """Exponential energy bound at every sample + absorbing-ball entry.

    The bound is ratio*exp(-rate*(t-t0))*E(0) + (Q - 1) with
    ratio = max(c1,1)/min(c1,1); the tail must additionally sit inside the
    absorbing ball E <= Q.
    """
    times = _series(samples, "t")
    energy = _series(samples, "energy_total")
    c1 = constants.energy_u_weight
    rate = constants.energy_decay_rate
    q = constants.absorbing_radius_sq
    ratio = max(c1, 1.0) / min(c1, 1.0)
    bound = ratio * np.exp(-rate * (times - times[0])) * energy[0] + (q - 1.0)

    margins = (slack * bound - energy) / bound
    worst = int(np.argmin(margins))
    results = [CheckResult(
        name="dissipative_bound", passed=bool(np.all(margins >= 0.0)),
        gating=True, worst_margin=float(margins[worst]),
        worst_time=float(times[worst]),
        details={"slack": slack, "E0": float(energy[0]),
                 "rate": rate, "asymptote": q - 1.0})]

    tail = _tail_slice(len(samples), tail_fraction)
    tail_margins = (q - energy[tail]) / q
    worst_tail = int(np.argmin(tail_margins))
    results.append(CheckResult(
        name="absorbing_ball", passed=bool(np.all(tail_margins >= 0.0)),
        gating=True, worst_margin=float(tail_margins[worst_tail]),
        worst_time=float(times[tail][worst_tail]),
        details={"radius_sq": q, "tail_fraction": tail_fraction,
                 "tail_max_energy": float(np.max(energy[tail]))}))
    return results


def check_l4_bound(samples: list[SampleDiagnostics],
                   constants: DerivedConstants, slack: float = 1.05,
                   tail_fraction: float = DEFAULT_TAIL_FRACTION
                   ) -> CheckResult:
    """Tail bound sum_i (||u_i||_L4^4 + ||w_i||^2) <= slack * l4_radius."""
    times = _series(samples, "t")
    value = np.array([float(np.sum(s.u_l4_pow4) + np.sum(s.w_norm_sq))
                      for s in samples])
    tail = _tail_slice(len(samples), tail_fraction)
    level = slack * constants.l4_radius
    margins = (level - value[tail]) / level
    worst = int(np.argmin(margins))
    return CheckResult(
        name="l4_bound", passed=bool(np.all(margins >= 0.0)), gating=True,
        worst_margin=float(margins[worst]),
        worst_time=float(times[tail][worst]),
        details={"radius": constants.l4_radius, "slack": slack,
                 "tail_max_value": float(np.max(value[tail]))})


def check_gronwall_structure(samples: list[SampleDiagnostics],
                             constants: DerivedConstants,
                             slack_fraction: float = 0.05,
                             dt_term: float = 0.0) -> CheckResult:
    """Centered-difference d/dt E_w + rate*E_w <= source + slack at every
    interior sample; dt_term absorbs the time-discretization error."""
    times = _series(samples, "t")
    ew = _series(samples, "energy_weighted")
    if len(samples) < 3:
        raise ValueError("need at least 3 samples for interior differences")
    rate = constants.energy_decay_rate
    m = constants.m
    source = (2.0 * constants.energy_u_weight * m
              * constants.decay_offset_norm_sq
              + 2.0 * constants.energy_source_coeff * m
              * constants.domain_measure)
    lhs = (ew[2:] - ew[:-2]) / (times[2:] - times[:-2]) + rate * ew[1:-1]
    allowed = source * (1.0 + slack_fraction) + dt_term
    margins = (allowed - lhs) / allowed
    worst = int(np.argmin(margins))
    return CheckResult(
        name="gronwall_structure", passed=bool(np.all(margins >= 0.0)),
        gating=True, worst_margin=float(margins[worst]),
        worst_time=float(times[1:-1][worst]),
        details={"source": source, "slack_fraction": slack_fraction,
                 "dt_term": dt_term, "max_lhs": float(np.max(lhs))})


def check_threshold_condition(samples: list[SampleDiagnostics],
                              constants: DerivedConstants, p: float,
                              tail_fraction: float = DEFAULT_TAIL_FRACTION
                              ) -> CheckResult:
    """MONITOR: compares p * tail-min S(t) with the synchronization
    threshold.  Never gates a run; the condition depends on the solution."""
    times = _series(samples, "t")
    signal = _series(samples, "boundary_signal")
    tail = _tail_slice(len(samples), tail_fraction)
    tail_min = float(np.min(signal[tail]))
    lhs = p * tail_min
    threshold = constants.sync_threshold
    return CheckResult(
        name="sync_threshold_monitor", passed=True, gating=False,
        worst_margin=float((lhs - threshold) / threshold),
        worst_time=float(times[tail][int(np.argmin(signal[tail]))]),
        details={"p_tail_min_signal": lhs, "threshold": threshold,
                 "satisfied": bool(lhs > threshold),
                 "tail_fraction": tail_fraction})


def sync_degree_estimate(samples: list[SampleDiagnostics],
                         tail_fraction: float = DEFAULT_TAIL_FRACTION
                         ) -> float:
    """Finite-horizon synchronization degree surrogate.

    sum_{i<j} max over the tail window of ||g_i - g_j||_H; an upper-window
    estimate of the limsup the asymptotic definition uses.
    """
    if not samples:
        raise ValueError("empty trajectory")
    tail = _tail_slice(len(samples), tail_fraction)
    tail_samples = samples[tail]
    if not tail_samples:
        raise ValueError("empty tail window")
    per_pair = np.array([np.sqrt(s.pair_u_norm_sq + s.pair_w_norm_sq)
                         for s in tail_samples])
    return float(np.sum(np.max(per_pair, axis=0)))


def fit_decay_rate(times: np.ndarray, values: np.ndarray,
                   window: tuple[float, float] | None = None) -> float:
    """Least-squares exponential decay rate of a positive series.

    Fits log(values) ~ a - rate*t over the window (or everything) and
    returns rate.  Requires at least 10 samples in the window and strictly
    positive values there.
    """
    times = np.asarray(times, dtype=float)
    values = np.asarray(values, dtype=float)
    if window is not None:
        mask = (times >= window[0]) & (times <= window[1])
        times, values = times[mask], values[mask]
    if times.size < 10:
        raise ValueError("need at least 10 samples to fit a rate")
    if np.any(values <= 0.0):
        raise ValueError("rate undefined: nonpositive values in window")
    slope = np.polyfit(times, np.log(values), 1)[0]
    return float(-slope)
