"""Continuous-spontaneous-localization effect on the interferometer.

Off-diagonal decay rate of the center-of-mass master equation, the
closed-form visibility reduction, an independent quadrature oracle that
re-derives it from the two-path separation history, and the critical-mass
solver for the exclusion boundary.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import simpson

from .errors import DomainError
from .params import ClusterSpecies, CslParams, GratingConfig
from .specfun import erf


@dataclass(frozen=True)
class CslReduction:
    """Visibility ratio V_CSL / V = exp(-exponent) and its pieces."""

    ratio: float
    exponent: float
    geometry_factor: float


def csl_decay_rate(separation: float, csl: CslParams, mass: float) -> float:
    """Off-diagonal decay rate at path separation Delta x.

    lambda0 (m/m0)^2 [1 - exp(-Dx^2 / 4 r_c^2)]: zero on the diagonal,
    saturating at the full effective rate for separations >> r_c.
    """
    if separation < 0.0 or not math.isfinite(separation):
        raise DomainError(f"separation must be >= 0, got {separation}")
    x = separation / (2.0 * csl.r_c)
    return csl.effective_rate(mass) * (-math.expm1(-x * x))


def geometry_factor(grating: GratingConfig, csl: CslParams) -> float:
    """Fraction of the saturated rate effective at path separation N d.

    1 - sqrt(pi) r_c / (N d) * erf(N d / 2 r_c); tends to 0 when the
    separation is small on the localization scale and to 1 when large.
    """
    nd = grating.talbot_order * grating.period
    a = nd / (2.0 * csl.r_c)
    if a < 1e-8:
        # erf expansion: 1 - erf(a) sqrt(pi)/(2a) = a^2/3 + O(a^4)
        return a * a / 3.0
    return 1.0 - math.sqrt(math.pi) * csl.r_c / nd * erf(a)


def csl_exponent(species: ClusterSpecies, grating: GratingConfig,
                 csl: CslParams) -> float:
    """Exponent 2 lambda0 T0 N (m/m0)^3 * geometry_factor."""
    t0 = grating.talbot_time_for_mass(csl.m0)
    mass_ratio = species.mass / csl.m0
    return (2.0 * csl.lambda0 * t0 * grating.talbot_order
            * mass_ratio ** 3 * geometry_factor(grating, csl))


def csl_visibility_ratio(species: ClusterSpecies, grating: GratingConfig,
                         csl: CslParams) -> CslReduction:
    """Closed-form visibility reduction V_CSL / V."""
    exponent = csl_exponent(species, grating, csl)
    return CslReduction(ratio=math.exp(-exponent), exponent=exponent,
                        geometry_factor=geometry_factor(grating, csl))


def csl_exponent_oracle(species: ClusterSpecies, grating: GratingConfig,
                        csl: CslParams, time_steps: int = 100_000) -> float:
    """Quadrature re-derivation of the visibility-reduction exponent.

    The two interferometer paths separate linearly from 0 to N d over the
    first N Talbot times and close again over the second; the exponent is
    the integral of the decay rate along that history.  Agreement with the
    closed form validates the reconstructed path history.
    """
    if time_steps < 1000:
        raise DomainError(f"time_steps must be >= 1000, got {time_steps}")
    n = grating.talbot_order
    t_half = n * grating.talbot_time_for_mass(species.mass)
    nd = n * grating.period
    # Simpson on the opening half; the closing half is its mirror image.
    t = np.linspace(0.0, t_half, time_steps + 1)
    sep = nd * t / t_half
    rate = csl.effective_rate(species.mass) * (-np.expm1(-(sep / (2.0 * csl.r_c)) ** 2))
    return 2.0 * float(simpson(rate, x=t))


def csl_visibility_ratio_oracle(species: ClusterSpecies, grating: GratingConfig,
                                csl: CslParams, time_steps: int = 100_000) -> float:
    """exp(-exponent) with the exponent from the quadrature oracle."""
    return math.exp(-csl_exponent_oracle(species, grating, csl, time_steps))


def critical_mass(csl: CslParams, grating: GratingConfig,
                  threshold: float = 0.5) -> float:
    """Mass at which the CSL visibility ratio drops to the threshold.

    Closed-form cube-root inversion of the exponent; `critical_mass_bisect`
    provides an independent fallback used for verification.
    """
    if not (0.0 < threshold < 1.0):
        raise DomainError(f"threshold must lie in (0, 1), got {threshold}")
    if csl.lambda0 <= 0.0:
        raise DomainError("critical mass requires lambda0 > 0")
    g = geometry_factor(grating, csl)
    if g <= 0.0:
        raise DomainError("degenerate geometry: separation N d vanishes on the "
                          "localization scale")
    t0 = grating.talbot_time_for_mass(csl.m0)
    denom = 2.0 * csl.lambda0 * t0 * grating.talbot_order * g
    return csl.m0 * (math.log(1.0 / threshold) / denom) ** (1.0 / 3.0)


def critical_mass_bisect(csl: CslParams, grating: GratingConfig,
                         threshold: float = 0.5,
                         species_template: ClusterSpecies | None = None) -> float:
    """Bisection fallback for the critical mass (verification path)."""
    if not (0.0 < threshold < 1.0):
        raise DomainError(f"threshold must lie in (0, 1), got {threshold}")
    if csl.lambda0 <= 0.0:
        raise DomainError("critical mass requires lambda0 > 0")
    target = math.log(1.0 / threshold)

    def exponent_at(mass_kg: float) -> float:
        species = (species_template.with_mass(mass_kg) if species_template
                   else ClusterSpecies(mass_kg, 1.0, 1.0 + 0.0j, "probe"))
        return csl_exponent(species, grating, csl)

    lo, hi = 1e-30, 1e-30
    while exponent_at(hi) < target:
        hi *= 2.0
        if hi > 1e10:
            raise DomainError("no critical mass below 1e10 kg")
    for _ in range(200):
        mid = math.sqrt(lo * hi)  # geometric bisection over many decades
        if exponent_at(mid) < target:
            lo = mid
        else:
            hi = mid
        if hi / lo < 1.0 + 1e-14:
            break
    return math.sqrt(lo * hi)


def exclusion_boundary(grating: GratingConfig, csl_template: CslParams,
                       lambda0_grid) -> list[tuple[float, float]]:
    """Critical mass along a grid of localization rates.

    Returns (lambda0, m_c) pairs in grid order; in log-log coordinates the
    boundary is a straight line of slope -1/3.
    """
    out = []
    for lam in lambda0_grid:
        if not (lam > 0.0 and math.isfinite(lam)):
            raise DomainError(f"lambda0 grid values must be > 0, got {lam}")
        csl = CslParams(r_c=csl_template.r_c, lambda0=lam, m0=csl_template.m0)
        out.append((lam, critical_mass(csl, grating)))
    return out
