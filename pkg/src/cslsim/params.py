"""Physical constants, unit conversions, and the shared domain types.

Everything internal is SI.  amu, nm, and mbar exist only at the
constructors / config boundary and are converted exactly once.
"""

from __future__ import annotations

import cmath
import configparser
import dataclasses
import math
from dataclasses import dataclass

from .errors import ConfigError, DomainError


@dataclass(frozen=True)
class PhysicalConstants:
    """SI defining constants (2019 redefinition) plus CODATA-2018 values."""

    planck_h: float = 6.62607015e-34           # J s (exact)
    boltzmann_kB: float = 1.380649e-23         # J/K (exact)
    speed_of_light_c: float = 299792458.0      # m/s (exact)
    atomic_mass_unit: float = 1.66053906660e-27  # kg
    vacuum_permittivity: float = 8.8541878128e-12  # F/m

    @property
    def hbar(self) -> float:
        return self.planck_h / (2.0 * math.pi)


CONSTANTS = PhysicalConstants()

# Convenience aliases used throughout the numerics.
PLANCK_H = CONSTANTS.planck_h
BOLTZMANN_KB = CONSTANTS.boltzmann_kB
SPEED_OF_LIGHT = CONSTANTS.speed_of_light_c
ATOMIC_MASS_UNIT = CONSTANTS.atomic_mass_unit
VACUUM_PERMITTIVITY = CONSTANTS.vacuum_permittivity
HBAR = CONSTANTS.hbar

# CODATA-2018, needed for the Slater-Kirkwood dispersion coefficient.
BOHR_RADIUS = 5.29177210903e-11    # m
HARTREE_ENERGY = 4.3597447222071e-18  # J

# Bulk gold at the 157 nm grating wavelength; density is a configurable
# default recorded in every output manifest.
GOLD_DENSITY = 19300.0             # kg/m^3
GOLD_PERMITTIVITY_157NM = 0.9 + 3.2j
GOLD_ATOM_MASS_AMU = 196.96657

MBAR_TO_PA = 100.0


def amu_to_kg(mass_amu: float) -> float:
    return mass_amu * ATOMIC_MASS_UNIT


def kg_to_amu(mass_kg: float) -> float:
    return mass_kg / ATOMIC_MASS_UNIT


def mbar_to_pa(p_mbar: float) -> float:
    return p_mbar * MBAR_TO_PA


def pa_to_mbar(p_pa: float) -> float:
    return p_pa / MBAR_TO_PA


@dataclass(frozen=True)
class ClusterSpecies:
    """A spherical dielectric cluster: mass, bulk density, permittivity."""

    mass: float                    # kg
    bulk_density: float            # kg/m^3
    permittivity: complex          # relative epsilon at the grating wavelength
    label: str = "cluster"

    def __post_init__(self):
        if not (self.mass > 0.0 and math.isfinite(self.mass)):
            raise DomainError(f"mass must be positive and finite, got {self.mass}")
        if not (self.bulk_density > 0.0 and math.isfinite(self.bulk_density)):
            raise DomainError(f"bulk_density must be positive, got {self.bulk_density}")
        eps = complex(self.permittivity)
        if not (math.isfinite(eps.real) and math.isfinite(eps.imag)):
            raise DomainError("permittivity must be finite")
        if eps.imag < 0.0:
            raise DomainError("Im(eps) must be >= 0 for a passive medium")

    @classmethod
    def from_amu(cls, mass_amu: float, bulk_density: float,
                 permittivity: complex, label: str = "cluster") -> "ClusterSpecies":
        return cls(amu_to_kg(mass_amu), bulk_density, permittivity, label)

    @property
    def mass_amu(self) -> float:
        return kg_to_amu(self.mass)

    @property
    def radius(self) -> float:
        return cluster_radius(self)

    def with_mass(self, mass_kg: float) -> "ClusterSpecies":
        return dataclasses.replace(self, mass=mass_kg)


def gold_cluster(mass_amu: float, density: float = GOLD_DENSITY) -> ClusterSpecies:
    return ClusterSpecies.from_amu(mass_amu, density, GOLD_PERMITTIVITY_157NM, "gold")


@dataclass(frozen=True)
class GratingConfig:
    """Pulsed standing-wave grating: wavelength, Talbot order, pulse flux."""

    laser_wavelength: float        # m
    talbot_order: int = 2
    laser_flux: float = 1.0        # J/m^2 per pulse

    def __post_init__(self):
        if not (self.laser_wavelength > 0.0 and math.isfinite(self.laser_wavelength)):
            raise DomainError("laser_wavelength must be positive")
        if not (isinstance(self.talbot_order, int) and self.talbot_order >= 1):
            raise DomainError("talbot_order must be a positive integer")
        if not (self.laser_flux >= 0.0 and math.isfinite(self.laser_flux)):
            raise DomainError("laser_flux must be >= 0")

    @property
    def period(self) -> float:
        """Grating period d = lambda_L / 2 (standing-wave antinode spacing)."""
        return self.laser_wavelength / 2.0

    @property
    def laser_frequency(self) -> float:
        return SPEED_OF_LIGHT / self.laser_wavelength

    @property
    def wavenumber(self) -> float:
        return 2.0 * math.pi / self.laser_wavelength

    @property
    def talbot_time_per_amu(self) -> float:
        """T0 = d^2 * (1 amu) / h."""
        return ATOMIC_MASS_UNIT * self.period ** 2 / PLANCK_H

    def talbot_time_for_mass(self, mass_kg: float) -> float:
        return mass_kg * self.period ** 2 / PLANCK_H

    def with_flux(self, flux: float) -> "GratingConfig":
        return dataclasses.replace(self, laser_flux=flux)


def default_grating(talbot_order: int = 2, laser_flux: float = 1.0) -> GratingConfig:
    """157 nm fluorine-laser grating, second Talbot order."""
    return GratingConfig(157e-9, talbot_order, laser_flux)


@dataclass(frozen=True)
class CslParams:
    """Localization length, rate at the reference mass, and reference mass."""

    r_c: float = 100e-9            # m
    lambda0: float = 0.0           # Hz
    m0: float = ATOMIC_MASS_UNIT   # kg

    def __post_init__(self):
        if not (self.r_c > 0.0 and math.isfinite(self.r_c)):
            raise DomainError("r_c must be positive")
        if not (self.lambda0 >= 0.0 and math.isfinite(self.lambda0)):
            raise DomainError("lambda0 must be >= 0")
        if not (self.m0 > 0.0 and math.isfinite(self.m0)):
            raise DomainError("m0 must be positive")

    def effective_rate(self, mass_kg: float) -> float:
        """Saturated localization rate lambda0 * (m/m0)^2."""
        return self.lambda0 * (mass_kg / self.m0) ** 2


@dataclass(frozen=True)
class EnvironmentConfig:
    """Residual gas plus thermal radiation field around the interferometer."""

    gas_pressure: float = 0.0          # Pa
    gas_temperature: float = 300.0     # K
    gas_mass: float = 28.0 * ATOMIC_MASS_UNIT  # kg, N2 default
    gas_polarizability_volume: float = 1.74e-30  # m^3 (alpha/4 pi eps0), N2
    environment_temperature: float | None = None  # K; None -> gas temperature
    cluster_temperature: float | None = None      # K; None -> environment

    def __post_init__(self):
        if not (self.gas_pressure >= 0.0 and math.isfinite(self.gas_pressure)):
            raise DomainError("gas_pressure must be >= 0")
        for name in ("gas_temperature", "environment_temperature", "cluster_temperature"):
            value = getattr(self, name)
            if value is not None and not (value > 0.0 and math.isfinite(value)):
                raise DomainError(f"{name} must be positive")
        if self.gas_mass <= 0.0 or self.gas_polarizability_volume <= 0.0:
            raise DomainError("gas_mass and gas_polarizability_volume must be positive")

    @property
    def radiation_temperature(self) -> float:
        return self.environment_temperature if self.environment_temperature is not None \
            else self.gas_temperature

    @property
    def internal_temperature(self) -> float:
        # Cluster in equilibrium with the radiation field unless overridden.
        return self.cluster_temperature if self.cluster_temperature is not None \
            else self.radiation_temperature


# -- derived quantities -------------------------------------------------------

def cluster_radius(species: ClusterSpecies) -> float:
    """Sphere radius (3 m / 4 pi rho)^(1/3) from mass and bulk density."""
    return (3.0 * species.mass / (4.0 * math.pi * species.bulk_density)) ** (1.0 / 3.0)


def talbot_time(species: ClusterSpecies, grating: GratingConfig) -> float:
    """Near-field self-imaging time m d^2 / h."""
    return grating.talbot_time_for_mass(species.mass)


def total_interference_time(species: ClusterSpecies, grating: GratingConfig) -> float:
    """Total two-arm evolution time 2 N T_T."""
    return 2.0 * grating.talbot_order * talbot_time(species, grating)


# -- config files -----------------------------------------------------------

_SPECIES_KEYS = {"label", "mass_amu", "density_kg_m3", "eps_re", "eps_im"}
_GRATING_KEYS = {"wavelength_nm", "talbot_order", "flux_J_m2"}
_CSL_KEYS = {"rc_nm", "lambda0_hz", "m0_amu"}
_ENV_KEYS = {"pressure_mbar", "gas_temperature_K", "environment_temperature_K",
             "cluster_temperature_K", "gas_mass_amu", "gas_polarizability_A3"}
_KNOWN_SECTIONS = {"species": _SPECIES_KEYS, "grating": _GRATING_KEYS,
                   "csl": _CSL_KEYS, "environment": _ENV_KEYS}


@dataclass(frozen=True)
class RunConfig:
    """Everything a CLI run can take from a config file."""

    species: ClusterSpecies | None = None
    grating: GratingConfig | None = None
    csl: CslParams | None = None
    environment: EnvironmentConfig | None = None


def _float(section, key, raw):
    try:
        return float(raw)
    except ValueError as exc:
        raise ConfigError(f"[{section}] {key}: not a number: {raw!r}") from exc


def load_config(path: str) -> RunConfig:
    """Parse a sectioned key=value config file.

    Unknown sections or keys are hard errors so that a misspelled physics
    constant can never silently fall back to a default.
    """
    parser = configparser.ConfigParser()
    parser.optionxform = str  # keys are case-sensitive (units live in the name)
    read = parser.read(path)
    if not read:
        raise ConfigError(f"cannot read config file: {path}")

    for section in parser.sections():
        if section not in _KNOWN_SECTIONS:
            raise ConfigError(f"unknown config section [{section}]")
        for key in parser[section]:
            if key not in _KNOWN_SECTIONS[section]:
                raise ConfigError(f"unknown key {key!r} in section [{section}]")

    species = grating = csl = env = None

    if parser.has_section("species"):
        sec = parser["species"]
        required = {"mass_amu", "density_kg_m3", "eps_re", "eps_im"}
        missing = required - set(sec)
        if missing:
            raise ConfigError(f"[species] missing keys: {sorted(missing)}")
        species = ClusterSpecies.from_amu(
            _float("species", "mass_amu", sec["mass_amu"]),
            _float("species", "density_kg_m3", sec["density_kg_m3"]),
            complex(_float("species", "eps_re", sec["eps_re"]),
                    _float("species", "eps_im", sec["eps_im"])),
            sec.get("label", "cluster"),
        )

    if parser.has_section("grating"):
        sec = parser["grating"]
        if "wavelength_nm" not in sec:
            raise ConfigError("[grating] missing key wavelength_nm")
        try:
            order = int(sec.get("talbot_order", "2"))
        except ValueError as exc:
            raise ConfigError("[grating] talbot_order must be an integer") from exc
        grating = GratingConfig(
            _float("grating", "wavelength_nm", sec["wavelength_nm"]) * 1e-9,
            order,
            _float("grating", "flux_J_m2", sec.get("flux_J_m2", "1.0")),
        )

    if parser.has_section("csl"):
        sec = parser["csl"]
        csl = CslParams(
            r_c=_float("csl", "rc_nm", sec.get("rc_nm", "100")) * 1e-9,
            lambda0=_float("csl", "lambda0_hz", sec.get("lambda0_hz", "0")),
            m0=amu_to_kg(_float("csl", "m0_amu", sec.get("m0_amu", "1"))),
        )

    if parser.has_section("environment"):
        sec = parser["environment"]

        def opt(key):
            return _float("environment", key, sec[key]) if key in sec else None

        env = EnvironmentConfig(
            gas_pressure=mbar_to_pa(_float("environment", "pressure_mbar",
                                           sec.get("pressure_mbar", "0"))),
            gas_temperature=_float("environment", "gas_temperature_K",
                                   sec.get("gas_temperature_K", "300")),
            gas_mass=amu_to_kg(_float("environment", "gas_mass_amu",
                                      sec.get("gas_mass_amu", "28"))),
            gas_polarizability_volume=_float("environment", "gas_polarizability_A3",
                                             sec.get("gas_polarizability_A3", "1.74")) * 1e-30,
            environment_temperature=opt("environment_temperature_K"),
            cluster_temperature=opt("cluster_temperature_K"),
        )

    return RunConfig(species=species, grating=grating, csl=csl, environment=env)
