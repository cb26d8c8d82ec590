"""Closed-form constants of the energy and synchronization estimates.

Everything here is scalar arithmetic on the model parameters, the cubic
bound constants, the domain measure, and the two Neumann-Poincare
constants.  The network energy E(t) = sum_i (||u_i||^2 + ||w_i||^2)
satisfies

    E(t) <= ratio * exp(-energy_decay_rate * t) * E(0) + (absorbing_radius_sq - 1)

with ratio = max(energy_u_weight, 1)/min(energy_u_weight, 1), so every
trajectory eventually enters the ball E <= absorbing_radius_sq.  A second
functional bounds sum_i (||u_i||_L4^4 + ||w_i||^2) by l4_radius.  The
synchronization threshold compares p * inf_t S(t) (S the boundary mismatch
signal) against sync_threshold; above it, pairwise differences contract at
rate sync_rate.

Three constants depend on analytically-estimated embedding/semigroup
numbers the model cannot produce itself (semigroup gain, spectral gap,
reaction Lipschitz coefficient, trace embedding coefficient); they stay
None unless those estimates are supplied.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import ValidationError
from .geometry import Mesh
from .kinetics import CubicBounds
from .operators import scaled_stiffness
from .params import ModelParams


@dataclass(frozen=True)
class SpectralEstimates:
    """User-supplied analytic estimates; all optional.

    semigroup_gain: gain c of the linear semigroup trace estimate.
    spectral_gap: lower bound alpha0 on the relevant spectral gap.
    reaction_lipschitz: embedding coefficient turning the L4 radius into a
        Lipschitz bound for the reaction map.
    trace_embedding: boundary-trace embedding coefficient.
    """

    semigroup_gain: float | None = None
    spectral_gap: float | None = None
    reaction_lipschitz: float | None = None
    trace_embedding: float | None = None


@dataclass(frozen=True)
class DerivedConstants:
    """The full constant chain; optional members are None when the
    spectral estimates needed to evaluate them were not supplied."""

    # inputs echoed for downstream checks
    m: int
    domain_measure: float
    decay_offset_norm_sq: float     # ||decay_offset||^2 = decay_offset^2*|Omega|
    slope_offset_norm: float        # slope_offset*sqrt(|Omega|)
    poincare_lower: float
    poincare_mean_weight: float
    # energy estimate
    energy_u_weight: float
    energy_source_coeff: float
    energy_decay_rate: float
    absorbing_radius_sq: float
    # L4 estimate
    l4_w_weight: float
    l4_decay_rate: float
    l4_radius: float
    # synchronization estimate
    sync_threshold: float
    sync_rate: float
    # estimate-dependent tail
    reaction_lipschitz_bound: float | None = None
    h1_gap_bound: float | None = None
    trace_gap_bound: float | None = None


#: Defining formula of each constant, printed as provenance next to values.
FORMULAS: dict[str, str] = {
    "decay_offset_norm_sq": "decay_offset^2 * |Omega|",
    "slope_offset_norm": "slope_offset * sqrt(|Omega|)",
    "poincare_lower": "second Neumann eigenvalue of -lap on Omega",
    "poincare_mean_weight": "poincare_lower / |Omega|",
    "energy_u_weight": "eps*b*decay_coeff / (2*sigma^2)",
    "energy_source_coeff": ("energy_u_weight * (1 + decay_coeff/2 "
                            "+ J^2/(2*decay_coeff)) + eps*a^2/b "
                            "+ 4*eps*sigma^2/(decay_coeff^2*b^3)"),
    "energy_decay_rate": "min(4*sigma^2/(decay_coeff*b^2), eps*b/2)",
    "absorbing_radius_sq": ("1 + 2*m/(energy_decay_rate*min(energy_u_weight,1)) "
                            "* (energy_u_weight*decay_offset_norm_sq "
                            "+ energy_source_coeff*|Omega|)"),
    "l4_w_weight": "14*sigma^2 / (eps*b*decay_coeff)",
    "l4_decay_rate": "2*min(decay_coeff, sigma^2/(l4_w_weight*decay_coeff))",
    "l4_radius": ("m/(l4_decay_rate*min(1, 2*l4_w_weight)) * "
                  "[24/decay_coeff*(1 + decay_offset_norm_sq) "
                  "+ (24*J^2/decay_coeff + 4*l4_w_weight*eps*a^2/b "
                  "+ decay_coeff/2*(1 + 2*l4_w_weight*eps/(b*decay_coeff))^2)"
                  "*|Omega|]"),
    "sync_threshold": ("m*(m-1) * (poincare_mean_weight*d*|Omega| "
                       "+ slope_max + 3*|eps - sigma|) "
                       "* absorbing_radius_sq"),
    "sync_rate": "2*min(poincare_lower*d, eps*b)",
    "reaction_lipschitz_bound": ("reaction_lipschitz * (2*sqrt(l4_radius) "
                                 "+ slope_offset_norm) + eps + sigma"),
    "h1_gap_bound": ("2*semigroup_gain*absorbing_radius_sq "
                     "+ 2*semigroup_gain^2*reaction_lipschitz_bound"
                     "*absorbing_radius_sq*pi"
                     "*exp(semigroup_gain^2*reaction_lipschitz_bound^2"
                     "/spectral_gap)"),
    "trace_gap_bound": "trace_embedding * h1_gap_bound^2",
}


def compute_derived_constants(params: ModelParams, bounds: CubicBounds,
                              domain_measure: float, eta1: float, eta2: float,
                              estimates: SpectralEstimates | None = None
                              ) -> DerivedConstants:
    """Evaluate the whole constant chain.

    eta1/eta2 are the Poincare constants of the domain (see
    `analytic_poincare_constants` / `estimate_poincare_constants`).
    """
    if not (domain_measure > 0 and math.isfinite(domain_measure)):
        raise ValidationError("domain_measure must be positive and finite")
    for name, val in (("eta1", eta1), ("eta2", eta2)):
        if not (val > 0 and math.isfinite(val)):
            raise ValidationError(f"{name} must be positive and finite")

    eps, a, b, sigma, d, J, m = (params.epsilon, params.a, params.b,
                                 params.sigma, params.d, params.J, params.m)
    lam = bounds.decay_coeff
    phi_sq = bounds.decay_offset ** 2 * domain_measure
    xi_norm = bounds.slope_offset * math.sqrt(domain_measure)

    c1 = eps * b * lam / (2.0 * sigma ** 2)
    c2 = (c1 + c1 * lam / 2.0 + c1 * J ** 2 / (2.0 * lam)
          + eps * a ** 2 / b + 4.0 * eps * sigma ** 2 / (lam ** 2 * b ** 3))
    rate = min(4.0 * sigma ** 2 / (lam * b ** 2), eps * b / 2.0)
    q = 1.0 + (2.0 * m / (rate * min(c1, 1.0))) \
        * (c1 * phi_sq + c2 * domain_measure)

    c3 = 14.0 * sigma ** 2 / (eps * b * lam)
    delta = 2.0 * min(lam, sigma ** 2 / (c3 * lam))
    l4 = (m / (delta * min(1.0, 2.0 * c3))) * (
        24.0 / lam * (1.0 + phi_sq)
        + (24.0 * J ** 2 / lam + 4.0 * c3 * eps * a ** 2 / b
           + lam / 2.0 * (1.0 + 2.0 * c3 * eps / (b * lam)) ** 2)
        * domain_measure)

    threshold = m * (m - 1) * (eta2 * d * domain_measure + bounds.slope_max
                               + 3.0 * abs(eps - sigma)) * q
    mu = 2.0 * min(eta1 * d, eps * b)

    m_bound = k_bound = pi_bound = None
    est = estimates or SpectralEstimates()
    if est.reaction_lipschitz is not None:
        m_bound = est.reaction_lipschitz * (2.0 * math.sqrt(l4) + xi_norm) \
            + eps + sigma
        if est.semigroup_gain is not None and est.spectral_gap is not None:
            c = est.semigroup_gain
            # the exponential factor easily exceeds float range for realistic
            # radii; saturate to inf instead of raising (the bound is real,
            # just astronomically large)
            exponent = c ** 2 * m_bound ** 2 / est.spectral_gap
            grow = math.exp(exponent) if exponent < 700.0 else math.inf
            k_bound = 2.0 * c * q + 2.0 * c ** 2 * m_bound * q * math.pi * grow
            if est.trace_embedding is not None:
                pi_bound = est.trace_embedding * k_bound ** 2

    return DerivedConstants(
        m=m, domain_measure=domain_measure, decay_offset_norm_sq=phi_sq,
        slope_offset_norm=xi_norm, poincare_lower=eta1,
        poincare_mean_weight=eta2, energy_u_weight=c1,
        energy_source_coeff=c2, energy_decay_rate=rate,
        absorbing_radius_sq=q, l4_w_weight=c3, l4_decay_rate=delta,
        l4_radius=l4, sync_threshold=threshold, sync_rate=mu,
        reaction_lipschitz_bound=m_bound, h1_gap_bound=k_bound,
        trace_gap_bound=pi_bound)


def compute_sync_threshold(params: ModelParams, bounds: CubicBounds,
                           domain_measure: float, eta2: float) -> float:
    """Standalone evaluation of the synchronization threshold.

    Intentionally re-derives the absorbing radius in one expression rather
    than reusing compute_derived_constants, so the two paths cross-check
    each other in the diagnostics.
    """
    eps, b, sigma = params.epsilon, params.b, params.sigma
    lam = bounds.decay_coeff
    c1 = eps * b * lam / (2.0 * sigma ** 2)
    q = 1.0 + (2.0 * params.m
               / (min(4.0 * sigma ** 2 / (lam * b ** 2), eps * b / 2.0)
                  * min(c1, 1.0))) \
        * (c1 * bounds.decay_offset ** 2 * domain_measure
           + (c1 + c1 * lam / 2.0 + c1 * params.J ** 2 / (2.0 * lam)
              + eps * params.a ** 2 / b
              + 4.0 * eps * sigma ** 2 / (lam ** 2 * b ** 3))
           * domain_measure)
    return params.m * (params.m - 1) \
        * (eta2 * params.d * domain_measure + bounds.slope_max
           + 3.0 * abs(eps - sigma)) * q


# ---------------------------------------------------------------------------
# Poincare constants


def analytic_poincare_constants(mesh: Mesh) -> tuple[float, float]:
    """Exact Neumann gap for intervals/rectangles: (pi/L_max)^2."""
    eta1 = (math.pi / max(mesh.lengths)) ** 2
    return eta1, eta1 / mesh.domain_measure


def estimate_poincare_constants(mesh: Mesh) -> tuple[float, float]:
    """Discrete Neumann gap from the generalized eigenproblem B x = t W x.

    B is the mass-scaled stiffness (diffusivity 1), W the volume weights;
    the symmetrized problem D^{-1/2} B D^{-1/2} shares its spectrum.  The
    smallest eigenvalue is 0 (constants); the second smallest converges to
    the Neumann gap from below at second order.
    """
    b_mat = scaled_stiffness(mesh, 1.0)
    inv_sqrt = 1.0 / np.sqrt(mesh.weights)
    sym = sp.diags(inv_sqrt) @ b_mat @ sp.diags(inv_sqrt)
    n = mesh.n_nodes
    if n <= 2000:
        vals = np.linalg.eigvalsh(sym.toarray())
        eta1 = float(vals[1])
    else:
        vals = spla.eigsh(sym.tocsc(), k=2, sigma=-1e-8, which="LM",
                          return_eigenvectors=False)
        eta1 = float(np.sort(vals)[1])
    return eta1, eta1 / mesh.domain_measure
