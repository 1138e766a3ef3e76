"""Fringe observables of the three-pulse interferometer.

Sinusoidal visibility and three-grating transmissivity from the absorbed
photon parameters (n0, n1), plus the inverse problem of picking the pulse
flux that realizes a target visibility.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError, UnachievableTargetError
from .mie import AbsorptionProfile, absorption_profile
from .params import ClusterSpecies, GratingConfig
from .specfun import bessel_I_scaled, log_bessel_I0

# The visibility is inverted only on its first monotone branch; the
# experiment operates far below the upper end of this bracket.
_N1_BRACKET_MAX = 20.0
_ROOT_TOL = 1e-10


@dataclass(frozen=True)
class FringeObservables:
    """Visibility, transmissivity, and the absorption parameters behind them."""

    visibility: float
    transmissivity: float
    n0: float
    n1: float


def visibility(n1: float) -> float:
    """Sinusoidal fringe visibility 2 I_1^2(n1) I_2(n1) / I_0^3(n1).

    Independent of the Talbot order.  Evaluated with exponentially scaled
    Bessels so the ratio stays finite for any physical n1.
    """
    if not (n1 >= 0.0 and math.isfinite(n1)):
        raise DomainError(f"n1 must be >= 0, got {n1}")
    i0 = bessel_I_scaled(0, n1)
    i1 = bessel_I_scaled(1, n1)
    i2 = bessel_I_scaled(2, n1)
    return 2.0 * i1 * i1 * i2 / (i0 * i0 * i0)


def transmissivity(n0: float, n1: float) -> float:
    """Neutral-cluster fraction exp(-3 n0) I_0^3(n1) after three pulses."""
    if not (n0 >= 0.0 and math.isfinite(n0)):
        raise DomainError(f"n0 must be >= 0, got {n0}")
    if not (n1 >= 0.0 and math.isfinite(n1)):
        raise DomainError(f"n1 must be >= 0, got {n1}")
    if n1 > n0 * (1.0 + 1e-12):
        raise DomainError(f"n1={n1} > n0={n0} violates n(x) >= 0")
    # log-space: ln T = -3 n0 + 3 ln I0(n1); finite up to n0 ~ 300.
    return math.exp(-3.0 * n0 + 3.0 * log_bessel_I0(min(n1, n0)))


def observables(species: ClusterSpecies, grating: GratingConfig,
                flux: float | None = None) -> FringeObservables:
    """Fringe observables for a species in a given grating at a given flux."""
    profile = absorption_profile(species, grating, flux)
    return observables_from_profile(profile)


def observables_from_profile(profile: AbsorptionProfile) -> FringeObservables:
    return FringeObservables(
        visibility=visibility(max(profile.n1, 0.0)),
        transmissivity=transmissivity(profile.n0, max(profile.n1, 0.0)),
        n0=profile.n0,
        n1=profile.n1,
    )


def solve_modulation_for_visibility(v_target: float) -> float:
    """Invert the visibility for n1 on its first monotone branch.

    Bracketed bisection refined by secant steps; robustness over speed.
    """
    if not (0.0 < v_target < 2.0):
        raise UnachievableTargetError(
            f"target visibility must lie in (0, 2), got {v_target}")
    lo, hi = 0.0, _N1_BRACKET_MAX
    v_hi = visibility(hi)
    if v_target >= v_hi:
        raise UnachievableTargetError(
            f"target visibility {v_target} is beyond the monotone branch "
            f"maximum V({hi}) = {v_hi:.6f}")
    f_lo = -v_target
    f_hi = v_hi - v_target
    while hi - lo > _ROOT_TOL:
        # secant candidate, clamped into the bracket interior
        mid = lo + (hi - lo) * 0.5
        sec = lo - f_lo * (hi - lo) / (f_hi - f_lo)
        if lo + 0.1 * (hi - lo) < sec < hi - 0.1 * (hi - lo):
            mid = sec
        f_mid = visibility(mid) - v_target
        if f_mid == 0.0:
            return mid
        if (f_lo < 0.0) == (f_mid < 0.0):
            lo, f_lo = mid, f_mid
        else:
            hi, f_hi = mid, f_mid
    return 0.5 * (lo + hi)


def flux_for_target_visibility(species: ClusterSpecies, grating: GratingConfig,
                               v_target: float) -> float:
    """Pulse flux that realizes the target visibility for this species.

    n1 is exactly linear in the flux, so one profile evaluation at a
    reference flux fixes the slope and the solve reduces to a 1-D root
    find for n1 followed by a division.
    """
    n1_target = solve_modulation_for_visibility(v_target)
    reference = absorption_profile(species, grating, flux=1.0)
    if reference.n1 <= 0.0:
        raise DomainError(
            f"species {species.label!r} has no absorption modulation; "
            "cannot reach a nonzero visibility")
    return n1_target / reference.n1
