"""Cubic reaction kinetics and the polynomial bound constants they admit.

Every supported nonlinearity is a cubic with negative leading coefficient,

    f(s) = c3*s^3 + c2*s^2 + c1*s + c0,   c3 < 0,

which guarantees the four structural bounds used by the energy estimates:

    s*f(s)  <= -decay_coeff*s^4 + decay_offset
    |f(s)|  <=  growth_coeff*|s|^3 + growth_offset
    |f'(s)| <=  slope_coeff*s^2 + slope_offset
    f'(s)   <=  slope_max

`extract_bounds` produces admissible (not necessarily minimal) constants in
closed form from the coefficients.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError

# any positive upper bound on f' is admissible; keep slope_max well-defined
# for downstream rate formulas when the true supremum is nonpositive
_SLOPE_MAX_FLOOR = 1e-12


@dataclass(frozen=True)
class Kinetics:
    """A cubic nonlinearity, stored by descending coefficients."""

    family: str
    coeffs: tuple[float, float, float, float]  # (c3, c2, c1, c0)


@dataclass(frozen=True)
class CubicBounds:
    """Constants realizing the four structural bounds for a cubic."""

    decay_coeff: float    # quartic decay rate in s*f(s)
    decay_offset: float   # additive slack in the quartic decay bound
    growth_coeff: float   # cubic growth rate of |f|
    growth_offset: float
    slope_coeff: float    # quadratic growth rate of |f'|
    slope_offset: float
    slope_max: float      # global upper bound on f'


def classic_cubic() -> Kinetics:
    """The textbook excitable nonlinearity f(s) = s - s^3/3."""
    return Kinetics(family="classic_cubic", coeffs=(-1.0 / 3.0, 0.0, 1.0, 0.0))


def general_cubic(kappa: float, c: float) -> Kinetics:
    """f(s) = kappa * s * (s - c) * (1 - s) with kappa > 0 and 0 < c < 1."""
    if not kappa > 0:
        raise ValidationError("kappa must be > 0")
    if not 0 < c < 1:
        raise ValidationError("c must lie in (0, 1)")
    return Kinetics(family="general_cubic",
                    coeffs=(-kappa, kappa * (1.0 + c), -kappa * c, 0.0))


def custom_cubic(c3: float, c2: float, c1: float, c0: float) -> Kinetics:
    """A cubic given by raw coefficients; the leading one must be negative."""
    if not c3 < 0:
        raise ValidationError("leading coefficient must be negative")
    return Kinetics(family="custom_cubic",
                    coeffs=(float(c3), float(c2), float(c1), float(c0)))


def eval_f(kinetics: Kinetics, s):
    """Evaluate f pointwise; accepts scalars or numpy arrays."""
    c3, c2, c1, c0 = kinetics.coeffs
    return ((c3 * s + c2) * s + c1) * s + c0


def eval_f_prime(kinetics: Kinetics, s):
    """Evaluate f' pointwise; accepts scalars or numpy arrays."""
    c3, c2, c1, c0 = kinetics.coeffs
    return (3.0 * c3 * s + 2.0 * c2) * s + c1


def extract_bounds(kinetics: Kinetics) -> CubicBounds:
    """Closed-form admissible bound constants for a cubic nonlinearity.

    decay_coeff is half the leading-coefficient magnitude, which leaves
    s*f(s) + decay_coeff*s^4 a quartic with negative leading part whose
    maximum over the critical points gives decay_offset.  The growth and
    slope constants come from |s| <= |s|^3 + 1 and s^2 <= |s|^3 + 1; the
    slope maximum is the vertex value of the concave parabola f'.
    """
    c3, c2, c1, c0 = kinetics.coeffs
    lam = abs(c3) / 2.0

    # q(s) = s f(s) + lam s^4 has leading coefficient c3 + lam = c3/2 < 0,
    # so its supremum sits at a real root of q'(s) = 2 c3 s^3 + 3 c2 s^2
    # + 2 c1 s + c0 (q(0) = 0 keeps the offset nonnegative)
    roots = np.roots([2.0 * c3, 3.0 * c2, 2.0 * c1, c0])
    # generous imag tolerance: extra candidate points never overshoot the
    # supremum, but dropping the true argmax would undershoot it
    candidates = [0.0] + [float(r.real) for r in roots
                          if abs(r.imag) <= 1e-6 * max(1.0, abs(r))]
    qvals = [s * eval_f(kinetics, s) + lam * s ** 4 for s in candidates]
    phi = max(qvals)

    growth_coeff = abs(c3) + abs(c2) + abs(c1)
    growth_offset = abs(c2) + abs(c1) + abs(c0)
    slope_coeff = 3.0 * abs(c3) + abs(c2)
    slope_offset = abs(c2) + abs(c1)
    slope_max = max(c1 - c2 ** 2 / (3.0 * c3), _SLOPE_MAX_FLOOR)

    return CubicBounds(decay_coeff=lam, decay_offset=phi,
                       growth_coeff=growth_coeff, growth_offset=growth_offset,
                       slope_coeff=slope_coeff, slope_offset=slope_offset,
                       slope_max=slope_max)


def count_bound_violations(kinetics: Kinetics, bounds: CubicBounds,
                           lo: float = -100.0, hi: float = 100.0,
                           n: int = 10 ** 6) -> dict[str, int]:
    """Count strict violations of the four bounds on a uniform grid."""
    s = np.linspace(lo, hi, n)
    f = eval_f(kinetics, s)
    fp = eval_f_prime(kinetics, s)
    return {
        "decay": int(np.sum(s * f > -bounds.decay_coeff * s ** 4
                            + bounds.decay_offset)),
        "growth": int(np.sum(np.abs(f) > bounds.growth_coeff * np.abs(s) ** 3
                             + bounds.growth_offset)),
        "slope": int(np.sum(np.abs(fp) > bounds.slope_coeff * s ** 2
                            + bounds.slope_offset)),
        "slope_max": int(np.sum(fp > bounds.slope_max)),
    }
