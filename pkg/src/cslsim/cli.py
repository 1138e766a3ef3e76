"""Command-line interface: sweep drivers, reports, and provenance manifests.

Curves go to CSV (LF line endings, 17 significant digits), scalars and
manifests to JSON.  Every run writes a manifest holding all resolved
parameters; `cslsim rerun --manifest <file>` reproduces the output
byte-for-byte from the manifest alone.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import sys
from datetime import datetime, timezone
from pathlib import Path

from . import __version__
from .csl import (
    critical_mass,
    csl_visibility_ratio,
    csl_visibility_ratio_oracle,
    exclusion_boundary,
)
from .decoherence import (
    DEFAULT_MODEL,
    critical_contour,
    decoherence_budget,
    model_constants_dict,
)
from .errors import (
    ConfigError,
    CslSimError,
    DomainError,
    GeometryError,
    NonConvergenceError,
    UnachievableTargetError,
)
from .interferometer import flux_for_target_visibility, observables, visibility
from .mie import absorption_profile
from .params import (
    CONSTANTS,
    ClusterSpecies,
    CslParams,
    EnvironmentConfig,
    GratingConfig,
    amu_to_kg,
    cluster_radius,
    default_grating,
    gold_cluster,
    load_config,
    mbar_to_pa,
    pa_to_mbar,
)
from .specfun import bessel_I, erf, spherical_bessel_j, spherical_hankel_h1
from .interferometer import transmissivity

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NONCONVERGENCE = 3
EXIT_GEOMETRY = 4

# CSV schema versions, pinned by golden-file tests.
FIG1_HEADER = "lambda0_Hz,m_c_amu,geometry_factor"
FIG2_HEADER = "mass_amu,radius_nm,flux_J_m2,n0,n1,transmissivity,status"
FIG3_HEADER = "segment,pressure_mbar,temperature_K"
SCHEMAS = {"fig1": "fig1.v1", "fig2": "fig2.v1", "fig3": "fig3.v1"}


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def _parse_range(text: str, name: str) -> tuple[float, float, int]:
    parts = text.split(":")
    if len(parts) != 3:
        raise ConfigError(f"--{name} must be lo:hi:steps, got {text!r}")
    try:
        lo, hi, steps = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError as exc:
        raise ConfigError(f"--{name}: {exc}") from exc
    if steps < 1:
        raise ConfigError(f"--{name}: steps must be >= 1")
    if steps > 1 and not lo < hi:
        raise ConfigError(f"--{name}: lo must be < hi for steps > 1")
    return lo, hi, steps


def _log_grid(lo_log10: float, hi_log10: float, steps: int) -> list[float]:
    if steps == 1:
        return [10.0 ** lo_log10]
    step = (hi_log10 - lo_log10) / (steps - 1)
    return [10.0 ** (lo_log10 + i * step) for i in range(steps)]


def _lin_grid(lo: float, hi: float, steps: int) -> list[float]:
    if steps == 1:
        return [lo]
    step = (hi - lo) / (steps - 1)
    return [lo + i * step for i in range(steps)]


def _species_dict(species: ClusterSpecies) -> dict:
    return {
        "label": species.label,
        "mass_kg": species.mass,
        "mass_amu": species.mass_amu,
        "bulk_density_kg_m3": species.bulk_density,
        "eps_re": species.permittivity.real,
        "eps_im": species.permittivity.imag,
    }


def _grating_dict(grating: GratingConfig) -> dict:
    return {
        "laser_wavelength_m": grating.laser_wavelength,
        "period_m": grating.period,
        "talbot_order": grating.talbot_order,
        "laser_flux_J_m2": grating.laser_flux,
        "talbot_time_per_amu_s": grating.talbot_time_per_amu,
    }


def _manifest(command: str, args_dict: dict, argv: list[str]) -> dict:
    return {
        "tool": "cslsim",
        "version": __version__,
        "schema": SCHEMAS.get(command),
        "timestamp": datetime.now(timezone.utc).isoformat(),
        "command": command,
        "command_line": argv,
        "args": args_dict,
        "constants": dataclasses.asdict(CONSTANTS),
        "decoherence_model": model_constants_dict(DEFAULT_MODEL),
    }


def _write_text(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_bytes(text.encode("utf-8"))


def _write_manifest(out_path: str | None, manifest: dict) -> None:
    text = json.dumps(manifest, indent=2, sort_keys=True) + "\n"
    if out_path is None or out_path == "-":
        sys.stderr.write(text)
    else:
        Path(str(out_path) + ".manifest.json").write_text(text, encoding="utf-8")


def _resolve_species(ns, config) -> ClusterSpecies:
    if getattr(ns, "species", None):
        cfg = load_config(ns.species)
        if cfg.species is None:
            raise ConfigError(f"{ns.species}: no [species] section")
        return cfg.species
    if config and config.species is not None:
        return config.species
    return gold_cluster(getattr(ns, "mass_amu", None) or 1.9697e5)


def _resolve_grating(ns, config) -> GratingConfig:
    if getattr(ns, "grating", None):
        cfg = load_config(ns.grating)
        if cfg.grating is None:
            raise ConfigError(f"{ns.grating}: no [grating] section")
        grating = cfg.grating
    elif config and config.grating is not None:
        grating = config.grating
    else:
        grating = default_grating()
    order = getattr(ns, "talbot_order", None)
    if order is not None:
        grating = dataclasses.replace(grating, talbot_order=order)
    return grating


# -- fig1 --------------------------------------------------------------------

def _fig1_rows(args: dict) -> list[str]:
    grating = GratingConfig(args["wavelength_m"], args["talbot_order"])
    csl = CslParams(r_c=args["rc_m"], lambda0=1.0, m0=amu_to_kg(args["m0_amu"]))
    grid = _log_grid(args["lo_log10"], args["hi_log10"], args["steps"])
    markers = [m for m in args["markers"] if m not in grid]
    from .csl import geometry_factor
    g = geometry_factor(grating, csl)
    rows = [FIG1_HEADER]
    for lam in sorted(grid + markers, reverse=True):
        point = CslParams(r_c=args["rc_m"], lambda0=lam, m0=amu_to_kg(args["m0_amu"]))
        mc = critical_mass(point, grating, args["threshold"])
        rows.append(",".join([_fmt(lam), _fmt(mc / amu_to_kg(1.0)), _fmt(g)]))
    return rows


def cmd_fig1(ns, config, argv) -> int:
    lo, hi, steps = _parse_range(ns.lambda0_range, "lambda0-range")
    csl = config.csl if (config and config.csl) else CslParams()
    grating = _resolve_grating(ns, config)
    args = {
        "wavelength_m": grating.laser_wavelength,
        "talbot_order": grating.talbot_order,
        "rc_m": ns.rc_nm * 1e-9 if ns.rc_nm is not None else csl.r_c,
        "m0_amu": 1.0,
        "lo_log10": lo, "hi_log10": hi, "steps": steps,
        "threshold": ns.threshold,
        "markers": [1e-10, 1e-16],
    }
    rows = _fig1_rows(args)
    _write_text(ns.out, "\n".join(rows) + "\n")
    _write_manifest(ns.out, _manifest("fig1", args, argv))
    return EXIT_OK


# -- fig2 --------------------------------------------------------------------

def _fig2_rows(args: dict) -> list[str]:
    species = ClusterSpecies.from_amu(
        1.0, args["density_kg_m3"],
        complex(args["eps_re"], args["eps_im"]), args["label"])
    grating = GratingConfig(args["wavelength_m"], args["talbot_order"])
    rows = [FIG2_HEADER]
    for mass_amu in _log_grid(args["lo_log10"], args["hi_log10"], args["steps"]):
        sp = species.with_mass(amu_to_kg(mass_amu))
        radius_nm = cluster_radius(sp) * 1e9
        try:
            flux = flux_for_target_visibility(sp, grating, args["target_v"])
            profile = absorption_profile(sp, grating, flux)
            trans = transmissivity(profile.n0, max(profile.n1, 0.0))
            rows.append(",".join([
                _fmt(mass_amu), _fmt(radius_nm), _fmt(flux),
                _fmt(profile.n0), _fmt(profile.n1), _fmt(trans), "ok"]))
        except GeometryError:
            rows.append(",".join([
                _fmt(mass_amu), _fmt(radius_nm), "nan", "nan", "nan", "nan",
                "geometry_error"]))
        except (DomainError, UnachievableTargetError):
            # n1 <= 0 at this sphere size: no flux reaches the target V
            rows.append(",".join([
                _fmt(mass_amu), _fmt(radius_nm), "nan", "nan", "nan", "nan",
                "unreachable"]))
    return rows


def cmd_fig2(ns, config, argv) -> int:
    lo, hi, steps = _parse_range(ns.mass_range, "mass-range")
    species = _resolve_species(ns, config)
    grating = _resolve_grating(ns, config)
    args = {
        "label": species.label,
        "density_kg_m3": species.bulk_density,
        "eps_re": species.permittivity.real,
        "eps_im": species.permittivity.imag,
        "wavelength_m": grating.laser_wavelength,
        "talbot_order": grating.talbot_order,
        "lo_log10": lo, "hi_log10": hi, "steps": steps,
        "target_v": ns.target_V,
    }
    rows = _fig2_rows(args)
    _write_text(ns.out, "\n".join(rows) + "\n")
    _write_manifest(ns.out, _manifest("fig2", args, argv))
    return EXIT_OK


# -- fig3 --------------------------------------------------------------------

def _fig3_rows(args: dict, mass_amu: float) -> list[str]:
    species = ClusterSpecies.from_amu(
        mass_amu, args["density_kg_m3"],
        complex(args["eps_re"], args["eps_im"]), args["label"])
    grating = GratingConfig(args["wavelength_m"], args["talbot_order"])
    env = EnvironmentConfig(
        gas_pressure=0.0,
        gas_temperature=args["gas_temperature_K"],
        gas_mass=amu_to_kg(args["gas_mass_amu"]),
        gas_polarizability_volume=args["gas_polarizability_A3"] * 1e-30,
    )
    pressures = [mbar_to_pa(p) for p in
                 _log_grid(args["p_lo_log10"], args["p_hi_log10"], args["p_steps"])]
    temperatures = _lin_grid(args["t_lo"], args["t_hi"], args["t_steps"])
    contours = critical_contour(species, grating, pressures, temperatures,
                                env_template=env, level=args["level"])
    rows = [FIG3_HEADER]
    for seg_idx, line in enumerate(contours):
        for p_pa, t_k in line:
            rows.append(",".join([str(seg_idx), _fmt(pa_to_mbar(p_pa)), _fmt(t_k)]))
    return rows


def cmd_fig3(ns, config, argv) -> int:
    p_lo, p_hi, p_steps = _parse_range(ns.p_range, "p-range")
    t_lo, t_hi, t_steps = _parse_range(ns.T_range, "T-range")
    if p_steps < 2 or t_steps < 2:
        raise ConfigError("fig3 needs at least 2 grid points on each axis")
    try:
        masses = [float(m) for m in ns.masses.split(",") if m]
    except ValueError as exc:
        raise ConfigError(f"--masses: {exc}") from exc
    if not masses:
        raise ConfigError("--masses must list at least one mass in amu")
    species = _resolve_species(ns, config)
    grating = _resolve_grating(ns, config)
    env = config.environment if (config and config.environment) else EnvironmentConfig()
    args = {
        "label": species.label,
        "density_kg_m3": species.bulk_density,
        "eps_re": species.permittivity.real,
        "eps_im": species.permittivity.imag,
        "wavelength_m": grating.laser_wavelength,
        "talbot_order": grating.talbot_order,
        "gas_temperature_K": env.gas_temperature,
        "gas_mass_amu": env.gas_mass / amu_to_kg(1.0),
        "gas_polarizability_A3": env.gas_polarizability_volume * 1e30,
        "p_lo_log10": p_lo, "p_hi_log10": p_hi, "p_steps": p_steps,
        "t_lo": t_lo, "t_hi": t_hi, "t_steps": t_steps,
        "level": 0.5,
        "masses_amu": masses,
    }
    out_base = ns.out or "fig3.csv"
    written = []
    for mass_amu in masses:
        rows = _fig3_rows(args, mass_amu)
        stem = Path(out_base)
        path = stem.with_name(f"{stem.stem}_m{mass_amu:g}{stem.suffix or '.csv'}")
        _write_text(str(path), "\n".join(rows) + "\n")
        written.append(str(path))
    manifest = _manifest("fig3", args, argv)
    manifest["outputs"] = written
    _write_manifest(out_base, manifest)
    sidecar = {"decoherence_model": model_constants_dict(DEFAULT_MODEL),
               "gas": {"temperature_K": env.gas_temperature,
                       "mass_amu": args["gas_mass_amu"],
                       "polarizability_A3": args["gas_polarizability_A3"]}}
    Path(str(out_base) + ".model.json").write_text(
        json.dumps(sidecar, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return EXIT_OK


# -- scalar reports ----------------------------------------------------------

def cmd_budget(ns, config, argv) -> int:
    species = _resolve_species(ns, config)
    if ns.mass_amu is not None:
        species = species.with_mass(amu_to_kg(ns.mass_amu))
    grating = _resolve_grating(ns, config)
    csl_base = config.csl if (config and config.csl) else CslParams()
    csl = CslParams(r_c=csl_base.r_c, lambda0=ns.lambda0, m0=csl_base.m0)
    env_base = config.environment if (config and config.environment) else EnvironmentConfig()
    env = dataclasses.replace(
        env_base,
        gas_pressure=mbar_to_pa(ns.pressure_mbar) if ns.pressure_mbar is not None
        else env_base.gas_pressure,
        gas_temperature=ns.temperature_K if ns.temperature_K is not None
        else env_base.gas_temperature,
        environment_temperature=ns.temperature_K if ns.temperature_K is not None
        else env_base.environment_temperature,
    )
    reduction = csl_visibility_ratio(species, grating, csl)
    budget = decoherence_budget(species, grating, env)
    report = {
        "species": _species_dict(species),
        "grating": _grating_dict(grating),
        "csl": {"r_c_m": csl.r_c, "lambda0_Hz": csl.lambda0,
                "m0_kg": csl.m0},
        "environment": {
            "pressure_mbar": pa_to_mbar(env.gas_pressure),
            "gas_temperature_K": env.gas_temperature,
            "radiation_temperature_K": env.radiation_temperature,
        },
        "csl_visibility_ratio": reduction.ratio,
        "csl_exponent": reduction.exponent,
        "geometry_factor": reduction.geometry_factor,
        "env_visibility_factor": budget.visibility_factor,
        "combined_factor": reduction.ratio * budget.visibility_factor,
        "exposures": {
            "collision": budget.rate_collision * budget.exposure_time,
            "bb_absorption": budget.rate_bb_absorption * budget.exposure_time,
            "bb_emission": budget.rate_bb_emission * budget.exposure_time,
            "bb_scattering": budget.rate_bb_scattering * budget.exposure_time,
        },
        "interference_time_s": budget.exposure_time,
    }
    _write_text(ns.out, json.dumps(report, indent=2, sort_keys=True) + "\n")
    return EXIT_OK


def cmd_observables(ns, config, argv) -> int:
    species = _resolve_species(ns, config)
    grating = _resolve_grating(ns, config)
    if ns.flux is not None:
        grating = grating.with_flux(ns.flux)
    obs = observables(species, grating)
    report = {
        "species": _species_dict(species),
        "grating": _grating_dict(grating),
        "n0": obs.n0, "n1": obs.n1,
        "V": obs.visibility, "T": obs.transmissivity,
    }
    _write_text(ns.out, json.dumps(report, indent=2, sort_keys=True) + "\n")
    return EXIT_OK


def cmd_absorption(ns, config, argv) -> int:
    species = _resolve_species(ns, config)
    grating = _resolve_grating(ns, config)
    profile = absorption_profile(species, grating, ns.flux)
    report = {
        "species": _species_dict(species),
        "flux_J_m2": profile.flux,
        "n0": profile.n0, "n1": profile.n1,
        "l_max": profile.truncation_order,
        "converged": profile.converged,
    }
    _write_text(ns.out, json.dumps(report, indent=2, sort_keys=True) + "\n")
    return EXIT_OK


def cmd_csl_ratio(ns, config, argv) -> int:
    species = _resolve_species(ns, config).with_mass(amu_to_kg(ns.mass_amu))
    grating = _resolve_grating(ns, config)
    base = config.csl if (config and config.csl) else CslParams()
    csl = CslParams(
        r_c=ns.rc_nm * 1e-9 if ns.rc_nm is not None else base.r_c,
        lambda0=ns.lambda0, m0=base.m0)
    reduction = csl_visibility_ratio(species, grating, csl)
    oracle = csl_visibility_ratio_oracle(species, grating, csl, ns.time_steps)
    report = {
        "mass_amu": ns.mass_amu,
        "lambda0_Hz": ns.lambda0,
        "r_c_m": csl.r_c,
        "talbot_order": grating.talbot_order,
        "ratio": reduction.ratio,
        "exponent": reduction.exponent,
        "geometry_factor": reduction.geometry_factor,
        "oracle_ratio": oracle,
    }
    _write_text(ns.out, json.dumps(report, indent=2, sort_keys=True) + "\n")
    return EXIT_OK


def cmd_specfun_eval(ns, config, argv) -> int:
    fn = ns.function
    if fn == "jl":
        value = spherical_bessel_j(ns.ell, complex(ns.re, ns.im))
        text = f"{_fmt(value.real)} {_fmt(value.imag)}"
    elif fn == "h1":
        value = spherical_hankel_h1(ns.ell, ns.re)
        text = f"{_fmt(value.real)} {_fmt(value.imag)}"
    elif fn == "besseli":
        text = _fmt(bessel_I(ns.ell, ns.re))
    elif fn == "erf":
        text = _fmt(erf(ns.re))
    elif fn == "visibility":
        text = _fmt(visibility(ns.re))
    else:
        raise ConfigError(f"unknown function {fn!r}")
    _write_text(ns.out, text + "\n")
    return EXIT_OK


# -- rerun -------------------------------------------------------------------

def cmd_rerun(ns, config, argv) -> int:
    manifest = json.loads(Path(ns.manifest).read_text(encoding="utf-8"))
    command = manifest.get("command")
    args = manifest.get("args")
    if command not in ("fig1", "fig2", "fig3") or args is None:
        raise ConfigError(f"manifest does not describe a re-runnable sweep: {ns.manifest}")
    if command == "fig1":
        rows = _fig1_rows(args)
        _write_text(ns.out, "\n".join(rows) + "\n")
    elif command == "fig2":
        rows = _fig2_rows(args)
        _write_text(ns.out, "\n".join(rows) + "\n")
    else:
        out_base = ns.out or "fig3_rerun.csv"
        for mass_amu in args["masses_amu"]:
            rows = _fig3_rows(args, mass_amu)
            stem = Path(out_base)
            path = stem.with_name(f"{stem.stem}_m{mass_amu:g}{stem.suffix or '.csv'}")
            _write_text(str(path), "\n".join(rows) + "\n")
    return EXIT_OK


# -- parser ------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cslsim",
        description="Collapse-model feasibility numerics for a pulsed "
                    "optical Talbot-Lau interferometer.")
    parser.add_argument("--config", help="sectioned key=value config file")
    parser.add_argument("--jobs", type=int, default=1,
                        help="reserved; sweeps are evaluated in grid order")
    parser.add_argument("--format", choices=["csv", "json"], default="csv",
                        help="output format for sweep commands")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fig1", help="critical-mass exclusion boundary sweep")
    p.add_argument("--lambda0-range", default="-18:-6:25",
                   help="lo:hi:steps in log10(Hz)")
    p.add_argument("--talbot-order", type=int, default=None)
    p.add_argument("--rc-nm", type=float, default=None)
    p.add_argument("--threshold", type=float, default=0.5)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_fig1)

    p = sub.add_parser("fig2", help="fixed-visibility transmissivity vs mass")
    p.add_argument("--mass-range", default="5:8.5:60",
                   help="lo:hi:steps in log10(amu)")
    p.add_argument("--target-V", type=float, default=0.85)
    p.add_argument("--species", help="species config file")
    p.add_argument("--grating", help="grating config file")
    p.add_argument("--talbot-order", type=int, default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_fig2)

    p = sub.add_parser("fig3", help="critical pressure/temperature contours")
    p.add_argument("--masses", default="1e6,1e7,1e8", help="comma list, amu")
    p.add_argument("--p-range", default="-14:-6:60", help="lo:hi:steps in log10(mbar)")
    p.add_argument("--T-range", default="4:400:60", help="lo:hi:steps in K")
    p.add_argument("--species", help="species config file")
    p.add_argument("--grating", help="grating config file")
    p.add_argument("--talbot-order", type=int, default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_fig3)

    p = sub.add_parser("budget", help="combined CSL vs environment report")
    p.add_argument("--mass-amu", type=float, default=None)
    p.add_argument("--lambda0", type=float, default=0.0, help="Hz")
    p.add_argument("--pressure-mbar", type=float, default=None)
    p.add_argument("--temperature-K", type=float, default=None)
    p.add_argument("--species", help="species config file")
    p.add_argument("--talbot-order", type=int, default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_budget)

    p = sub.add_parser("observables", help="n0, n1, visibility, transmissivity")
    p.add_argument("--species", help="species config file")
    p.add_argument("--grating", help="grating config file")
    p.add_argument("--talbot-order", type=int, default=None)
    p.add_argument("--flux", type=float, default=None, help="J/m^2")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_observables)

    p = sub.add_parser("absorption", help="absorbed-photon parameters n0, n1")
    p.add_argument("--species", help="species config file")
    p.add_argument("--grating", help="grating config file")
    p.add_argument("--talbot-order", type=int, default=None)
    p.add_argument("--flux", type=float, default=None, help="J/m^2")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_absorption)

    p = sub.add_parser("csl-ratio", help="closed-form vs oracle visibility ratio")
    p.add_argument("--mass-amu", type=float, required=True)
    p.add_argument("--lambda0", type=float, required=True, help="Hz")
    p.add_argument("--rc-nm", type=float, default=None)
    p.add_argument("--talbot-order", type=int, default=None)
    p.add_argument("--time-steps", type=int, default=100_000)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_csl_ratio)

    p = sub.add_parser("specfun-eval", help=argparse.SUPPRESS)
    p.add_argument("--function", required=True,
                   choices=["jl", "h1", "besseli", "erf", "visibility"])
    p.add_argument("--ell", type=int, default=0)
    p.add_argument("--re", type=float, default=0.0)
    p.add_argument("--im", type=float, default=0.0)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_specfun_eval)

    p = sub.add_parser("rerun", help="re-execute a sweep from its manifest")
    p.add_argument("--manifest", required=True)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_rerun)

    return parser


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else 0
    try:
        config = load_config(ns.config) if ns.config else None
        return ns.func(ns, config, argv)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except GeometryError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_GEOMETRY
    except (NonConvergenceError, UnachievableTargetError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NONCONVERGENCE
    except CslSimError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    raise SystemExit(main())
