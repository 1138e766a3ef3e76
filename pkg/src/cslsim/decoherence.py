"""Environmental decoherence budget: residual-gas collisions and thermal
blackbody photons (absorption, emission, Rayleigh scattering).

The underlying models and their constants are collected in one documented
configuration block (`DecoherenceModel`); the contour results are meaningful
at the order-of-magnitude level only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, asdict

import numpy as np
from scipy.integrate import quad

from .errors import DomainError, NonConvergenceError
from .params import (
    BOHR_RADIUS,
    BOLTZMANN_KB,
    HARTREE_ENERGY,
    HBAR,
    SPEED_OF_LIGHT,
    VACUUM_PERMITTIVITY,
    ClusterSpecies,
    EnvironmentConfig,
    GratingConfig,
    cluster_radius,
    total_interference_time,
)


@dataclass(frozen=True)
class DecoherenceModel:
    """All model constants behind the environmental channels.

    Every number here is recorded in output manifests.  Defaults are
    standard literature values; they are never tuned to reproduce any
    particular figure.
    """

    # Total cross section sigma(v) = c6_prefactor * (C6 / hbar v)^(2/5)
    # for a London-van der Waals 1/r^6 potential.
    c6_prefactor: float = 7.57
    # Slater-Kirkwood effective electron numbers entering C6.
    gas_electron_count: float = 10.0          # N2
    cluster_electrons_per_amu: float = 11.0 / 196.96657  # gold valence
    # Every gas collision fully resolves the paths (thermal de Broglie
    # wavelength << N d at all relevant temperatures).
    collision_effectiveness: float = 1.0
    # Drude low-frequency absorptive response: Im[(eps-1)/(eps+2)] ~
    # 3 eps0 omega / dc_conductivity.  Bulk gold conductivity.
    dc_conductivity: float = 4.1e7            # S/m
    # Fringe-resolving effectiveness of a photon event at wavelength
    # lambda: (2 pi N d / lambda)^2, capped at 1.
    photon_effectiveness_cap: float = 1.0
    # Planck-spectrum integration window in x = hbar omega / kB T.
    planck_x_min: float = 1e-3
    planck_x_max: float = 50.0
    # Maxwell-Boltzmann speed quadrature (Gauss-Legendre nodes on [0, u_max]
    # in units of the most probable speed).
    speed_quad_points: int = 32
    speed_u_max: float = 6.0


DEFAULT_MODEL = DecoherenceModel()


@dataclass(frozen=True)
class DecoherenceBudget:
    """Effective (fringe-weighted) rates and the combined visibility factor."""

    rate_collision: float
    rate_bb_absorption: float
    rate_bb_emission: float
    rate_bb_scattering: float
    exposure_time: float
    visibility_factor: float

    @property
    def total_rate(self) -> float:
        return (self.rate_collision + self.rate_bb_absorption
                + self.rate_bb_emission + self.rate_bb_scattering)


def dispersion_coefficient(species: ClusterSpecies, env: EnvironmentConfig,
                           model: DecoherenceModel = DEFAULT_MODEL) -> float:
    """Slater-Kirkwood C6 between the cluster and one gas molecule, in J m^6.

    The cluster static polarizability volume is taken as R^3 (conducting
    sphere limit of Clausius-Mossotti).
    """
    a0_cubed = BOHR_RADIUS ** 3
    alpha_cluster = cluster_radius(species) ** 3 / a0_cubed   # atomic units
    alpha_gas = env.gas_polarizability_volume / a0_cubed
    n_cluster = species.mass_amu * model.cluster_electrons_per_amu
    n_gas = model.gas_electron_count
    c6_au = 1.5 * alpha_cluster * alpha_gas / (
        math.sqrt(alpha_cluster / n_cluster) + math.sqrt(alpha_gas / n_gas))
    return c6_au * HARTREE_ENERGY * BOHR_RADIUS ** 6


def collision_cross_section(speed: float, c6: float,
                            model: DecoherenceModel = DEFAULT_MODEL) -> float:
    """Total London-van der Waals cross section at one relative speed."""
    if speed <= 0.0:
        raise DomainError(f"speed must be > 0, got {speed}")
    return model.c6_prefactor * (c6 / (HBAR * speed)) ** 0.4


def collision_rate(species: ClusterSpecies, env: EnvironmentConfig,
                   model: DecoherenceModel = DEFAULT_MODEL) -> float:
    """Residual-gas collision rate n_gas <sigma_tot v>, linear in pressure."""
    if env.gas_pressure == 0.0:
        return 0.0
    n_gas = env.gas_pressure / (BOLTZMANN_KB * env.gas_temperature)
    c6 = dispersion_coefficient(species, env, model)
    v_p = math.sqrt(2.0 * BOLTZMANN_KB * env.gas_temperature / env.gas_mass)
    # <sigma v> over the Maxwell-Boltzmann speed distribution:
    # (4/sqrt(pi)) integral u^3 exp(-u^2) sigma(v_p u) v_p du
    nodes, weights = np.polynomial.legendre.leggauss(model.speed_quad_points)
    u = 0.5 * model.speed_u_max * (nodes + 1.0)
    w = 0.5 * model.speed_u_max * weights
    sigma = model.c6_prefactor * (c6 / (HBAR * v_p * u)) ** 0.4
    mean_sigma_v = (4.0 / math.sqrt(math.pi)) * v_p * np.sum(
        w * u ** 3 * np.exp(-u * u) * sigma)
    return n_gas * float(mean_sigma_v) * model.collision_effectiveness


def _photon_effectiveness(omega: float, nd: float,
                          model: DecoherenceModel) -> float:
    # (2 pi N d / lambda)^2 = (N d omega / c)^2, capped.
    eff = (nd * omega / SPEED_OF_LIGHT) ** 2
    return min(eff, model.photon_effectiveness_cap)


def _planck_integral(integrand, temperature: float,
                     model: DecoherenceModel) -> float:
    kt = BOLTZMANN_KB * temperature

    def f(x):
        omega = x * kt / HBAR
        return integrand(omega) / math.expm1(x)

    value, abserr = quad(f, model.planck_x_min, model.planck_x_max,
                         epsabs=0.0, epsrel=1e-10, limit=500)
    if not math.isfinite(value) or (value != 0.0 and abserr > 1e-4 * abs(value)):
        raise NonConvergenceError(
            f"Planck integral did not converge (value={value}, err={abserr})")
    # transform d omega = (kT/hbar) dx
    return value * kt / HBAR


def blackbody_rates(species: ClusterSpecies, env: EnvironmentConfig,
                    grating: GratingConfig,
                    model: DecoherenceModel = DEFAULT_MODEL
                    ) -> tuple[float, float, float]:
    """Fringe-weighted thermal photon rates (absorption, emission, scattering).

    All three are spectral integrals of cross section x photon flux x
    effectiveness over the Planck distribution.  The absorptive response
    comes from the Drude low-frequency limit of bulk gold; Rayleigh
    scattering uses the conducting-sphere static polarizability R^3.
    Emission balances absorption at the cluster temperature (equilibrium
    assumption), evaluated at its own temperature so an overridden cluster
    temperature is honored.
    """
    radius = cluster_radius(species)
    nd = grating.talbot_order * grating.period
    r3 = radius ** 3
    c = SPEED_OF_LIGHT

    def abs_integrand(omega):
        # sigma_abs(omega) = 4 pi (omega/c) R^3 * 3 eps0 omega / sigma_dc,
        # times photon number density omega^2/(pi^2 c^3), times c.
        sigma_abs = (4.0 * math.pi * (omega / c) * r3
                     * 3.0 * VACUUM_PERMITTIVITY * omega / model.dc_conductivity)
        flux_density = omega * omega / (math.pi ** 2 * c * c)
        return sigma_abs * flux_density * _photon_effectiveness(omega, nd, model)

    def sca_integrand(omega):
        k = omega / c
        sigma_sca = (8.0 * math.pi / 3.0) * k ** 4 * r3 * r3
        flux_density = omega * omega / (math.pi ** 2 * c * c)
        return sigma_sca * flux_density * _photon_effectiveness(omega, nd, model)

    t_env = env.radiation_temperature
    t_cluster = env.internal_temperature
    rate_abs = _planck_integral(abs_integrand, t_env, model)
    rate_em = _planck_integral(abs_integrand, t_cluster, model)
    rate_sca = _planck_integral(sca_integrand, t_env, model)
    return rate_abs, rate_em, rate_sca


def decoherence_budget(species: ClusterSpecies, grating: GratingConfig,
                       env: EnvironmentConfig,
                       model: DecoherenceModel = DEFAULT_MODEL
                       ) -> DecoherenceBudget:
    """All channel rates plus the combined visibility factor."""
    t_total = total_interference_time(species, grating)
    rate_coll = collision_rate(species, env, model)
    rate_abs, rate_em, rate_sca = blackbody_rates(species, env, grating, model)
    total = rate_coll + rate_abs + rate_em + rate_sca
    return DecoherenceBudget(
        rate_collision=rate_coll,
        rate_bb_absorption=rate_abs,
        rate_bb_emission=rate_em,
        rate_bb_scattering=rate_sca,
        exposure_time=t_total,
        visibility_factor=math.exp(-total * t_total),
    )


def visibility_factor_env(species: ClusterSpecies, grating: GratingConfig,
                          env: EnvironmentConfig,
                          model: DecoherenceModel = DEFAULT_MODEL) -> float:
    """Environmental visibility factor exp(-total exposure over 2 N T_T)."""
    return decoherence_budget(species, grating, env, model).visibility_factor


def model_constants_dict(model: DecoherenceModel = DEFAULT_MODEL) -> dict:
    return asdict(model)


# -- critical contour -------------------------------------------------------

def critical_contour(species: ClusterSpecies, grating: GratingConfig,
                     pressure_grid, temperature_grid,
                     env_template: EnvironmentConfig | None = None,
                     level: float = 0.5,
                     model: DecoherenceModel = DEFAULT_MODEL
                     ) -> list[list[tuple[float, float]]]:
    """Trace the visibility_factor = level set over a (pressure, T) grid.

    The temperature axis is the radiation (ambient) temperature; the gas
    temperature stays at the template value so the two knobs remain the
    independently variable ones.  Marching squares on the log10(p) x T
    grid with edge bisection; returns ordered polylines of (pressure_Pa,
    temperature_K).  An empty list is a valid result (no crossing on the
    grid).
    """
    pressures = np.asarray(list(pressure_grid), dtype=float)
    temperatures = np.asarray(list(temperature_grid), dtype=float)
    if pressures.size < 2 or temperatures.size < 2:
        raise DomainError("contour tracing needs at least a 2 x 2 grid")
    if np.any(pressures <= 0.0) or np.any(temperatures <= 0.0):
        raise DomainError("grid values must be positive")
    base_env = env_template if env_template is not None else EnvironmentConfig()

    t_total = total_interference_time(species, grating)

    # ln(factor) = -(coll_coeff * p + bb(T)) * t_total; cache both pieces.
    unit_env = _env_with(base_env, pressure=1.0, radiation=base_env.radiation_temperature)
    coll_coeff = collision_rate(species, unit_env, model)  # rate per Pa

    bb_cache: dict[float, float] = {}

    def bb_rate(temperature: float) -> float:
        if temperature not in bb_cache:
            env = _env_with(base_env, pressure=0.0, radiation=temperature)
            a, e, s = blackbody_rates(species, env, grating, model)
            bb_cache[temperature] = a + e + s
        return bb_cache[temperature]

    log_level = math.log(level)

    def field(log10_p: float, temperature: float) -> float:
        # ln(visibility factor) - ln(level); sign change marks the contour.
        p = 10.0 ** log10_p
        return -(coll_coeff * p + bb_rate(temperature)) * t_total - log_level

    lp = np.log10(pressures)
    values = np.array([[field(x, t) for t in temperatures] for x in lp])

    segments = _marching_squares(lp, temperatures, values, field)
    polylines = _chain_segments(segments)
    return [[(10.0 ** x, t) for x, t in line] for line in polylines]


def _env_with(env: EnvironmentConfig, pressure: float,
              radiation: float) -> EnvironmentConfig:
    return EnvironmentConfig(
        gas_pressure=pressure,
        gas_temperature=env.gas_temperature,
        gas_mass=env.gas_mass,
        gas_polarizability_volume=env.gas_polarizability_volume,
        environment_temperature=radiation,
        cluster_temperature=env.cluster_temperature,
    )


def _edge_crossing(field, p0, v0, p1, v1, rel_tol=1e-3):
    """Bisect the field along a grid edge until the crossing coordinate is
    located to rel_tol of the edge length."""
    (x0, y0), (x1, y1) = p0, p1
    lo, hi = 0.0, 1.0
    f_lo = v0
    while hi - lo > rel_tol:
        mid = 0.5 * (lo + hi)
        f_mid = field(x0 + mid * (x1 - x0), y0 + mid * (y1 - y0))
        if f_mid == 0.0:
            lo = hi = mid
            break
        if (f_lo < 0.0) == (f_mid < 0.0):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
    s = 0.5 * (lo + hi)
    return (x0 + s * (x1 - x0), y0 + s * (y1 - y0))


def _marching_squares(xs, ys, values, field):
    """Per-cell contour segments of the zero level set."""
    nx, ny = values.shape
    # crossing points shared between neighbouring cells, keyed by edge
    crossings = {}

    def crossing(i0, j0, i1, j1):
        key = (i0, j0, i1, j1)
        if key not in crossings:
            crossings[key] = _edge_crossing(
                field, (xs[i0], ys[j0]), values[i0, j0],
                (xs[i1], ys[j1]), values[i1, j1])
        return crossings[key]

    segments = []
    for i in range(nx - 1):
        for j in range(ny - 1):
            corners = [(i, j), (i + 1, j), (i + 1, j + 1), (i, j + 1)]
            signs = [values[a, b] >= 0.0 for a, b in corners]
            if all(signs) or not any(signs):
                continue
            edges = [(corners[k], corners[(k + 1) % 4]) for k in range(4)]
            pts = []
            for (a, b) in edges:
                if (values[a] >= 0.0) != (values[b] >= 0.0):
                    pts.append(crossing(*a, *b))
            if len(pts) == 2:
                segments.append((pts[0], pts[1]))
            elif len(pts) == 4:
                # saddle: split by the cell-center sign
                xc = 0.5 * (xs[i] + xs[i + 1])
                yc = 0.5 * (ys[j] + ys[j + 1])
                center_positive = field(xc, yc) >= 0.0
                if (values[corners[0]] >= 0.0) == center_positive:
                    segments.append((pts[0], pts[3]))
                    segments.append((pts[1], pts[2]))
                else:
                    segments.append((pts[0], pts[1]))
                    segments.append((pts[2], pts[3]))
    return segments


def _chain_segments(segments, tol=1e-9):
    """Merge unordered segments into ordered polylines."""
    def key(point):
        return (round(point[0] / tol), round(point[1] / tol))

    by_endpoint: dict[tuple, list[int]] = {}
    for idx, (a, b) in enumerate(segments):
        by_endpoint.setdefault(key(a), []).append(idx)
        by_endpoint.setdefault(key(b), []).append(idx)

    used = set()
    polylines = []
    for idx, seg in enumerate(segments):
        if idx in used:
            continue
        used.add(idx)
        line = [seg[0], seg[1]]
        for grow_tail in (True, False):
            while True:
                tip = line[-1] if grow_tail else line[0]
                next_idx = next((i for i in by_endpoint.get(key(tip), [])
                                 if i not in used), None)
                if next_idx is None:
                    break
                used.add(next_idx)
                a, b = segments[next_idx]
                nxt = b if key(a) == key(tip) else a
                if grow_tail:
                    line.append(nxt)
                else:
                    line.insert(0, nxt)
        polylines.append(line)
    return polylines
