"""Line-oriented scenario configuration: parsing, validation, canonical printing.

Format: `[section]` headers with `key = value` lines, `#` comments, UTF-8.
Sections and keys are fixed (unknown ones are errors); every tolerance knob
used anywhere in the library lives in [tolerances] so any run can override
it. Validation reports every error it finds, each with its line number,
rather than stopping at the first.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .materials import CoefficientFunction, ConstantCoefficient, MaterialLaw, ReferenceState

__all__ = [
    "ConfigError",
    "ScenarioConfig",
    "default_tolerances",
    "parse_config",
    "format_config",
    "apply_overrides",
    "material_law",
    "reference_state",
]


class ConfigError(ValueError):
    """Carries the full list of (line, message) problems found in a config."""

    def __init__(self, errors: list[tuple[int, str]]):
        self.errors = errors
        lines = "\n".join(f"  line {ln}: {msg}" if ln else f"  {msg}" for ln, msg in errors)
        super().__init__(f"invalid configuration:\n{lines}")


def default_tolerances() -> dict[str, float]:
    return {
        "rho_floor_frac": 1e-12,     # density below this fraction of rho_bar is invalid
        "grad_factor": 1e3,          # breakdown when max_grad exceeds factor * initial scale
        "dt_floor": 1e-12,           # breakdown when the CFL step collapses below this
        "front_tol": 1e-8,           # relative deviation allowed outside the front
        "front_slack_cells": 2.0,    # cells of slack beyond R + c_v t
        "check_front": 1.0,          # 0 disables the finite-propagation check
        "eig_cond_cap": 1e8,         # eigenvector condition limit for strong hyperbolicity
        "marginal_band": 1e-9,       # |Re x| below this is marginal, not stable
        "fit_tolerance": 0.02,       # dispersion-vs-simulation relative mismatch
        "speeds_rel_tol": 1e-10,     # closed-form vs numeric speed agreement
        "det_rel_tol": 1e-10,        # determinant closed-form agreement
        "dm_tol": 1e-8,              # relative-mass conservation drift
        "g_law_tol": 0.01,           # stress-integral exponential-law mismatch
        "ns_limit_tol": 0.05,        # |Pi + zeta div v| fraction in the stiff limit
        "growth_margin_frac": 0.05,  # margin tolerance as a fraction of the growth bound
    }


@dataclass
class ScenarioConfig:
    # [scenario]
    system: str = "bulk"            # bulk | shear
    geometry: str = "planar"        # planar | spherical
    bc: str = "fixed"               # fixed | periodic (planar only)
    # [material]
    A: float = 1.0
    gamma: float = 2.0
    zeta: str = "1.0"               # constant or "powerlaw:coeff,exponent"
    eta: str = "1.0"
    tau: str = "1.0"
    # [reference]
    rho_bar: float = 1.0
    R: float = 1.0
    Pi_bar: float = 0.0
    v_bar: float = 0.0              # x-component; used by planar boost runs
    # [profile]
    a: float = 0.0                  # density bump amplitude
    b: float = 0.0                  # radial/axial velocity bump amplitude
    c: float = 0.0                  # stress bump amplitude
    b_from_f0: float | None = None  # if set, rescale b so F(0) hits this value
    # [grid]
    n_cells: int = 256
    x_min: float = 0.0
    x_max: float = 4.0
    cfl: float = 0.4
    # [run]
    t_end: float = 1.0
    integrator: str = "ssprk2"      # ssprk2 | ssprk3
    series_cadence: int = 1
    snapshot_times: tuple[float, ...] = ()
    # [tolerances]
    tolerances: dict[str, float] = field(default_factory=default_tolerances)


_SCHEMA: dict[str, dict[str, type]] = {
    "scenario": {"system": str, "geometry": str, "bc": str},
    "material": {"A": float, "gamma": float, "zeta": str, "eta": str, "tau": str},
    "reference": {"rho_bar": float, "R": float, "Pi_bar": float, "v_bar": float},
    "profile": {"a": float, "b": float, "c": float, "b_from_f0": float},
    "grid": {"n_cells": int, "x_min": float, "x_max": float, "cfl": float},
    "run": {"t_end": float, "integrator": str, "series_cadence": int,
            "snapshot_times": tuple},
}


def _parse_law_spec(spec: str):
    """A coefficient law from its config string: a constant or powerlaw:c,p."""
    spec = spec.strip()
    if spec.startswith("powerlaw:"):
        parts = spec[len("powerlaw:"):].split(",")
        if len(parts) != 2:
            raise ValueError(f"powerlaw needs two parameters, got {spec!r}")
        coeff, expo = float(parts[0]), float(parts[1])
        if coeff <= 0.0:
            raise ValueError("powerlaw coefficient must be positive")
        return CoefficientFunction(lambda rho, pi=0.0, pi2=0.0, _c=coeff, _p=expo: _c * rho**_p)
    value = float(spec)
    return ConstantCoefficient(value)


def material_law(cfg: ScenarioConfig) -> MaterialLaw:
    return MaterialLaw(A=cfg.A, gamma=cfg.gamma,
                       zeta=_parse_law_spec(cfg.zeta),
                       eta=_parse_law_spec(cfg.eta),
                       tau=_parse_law_spec(cfg.tau))


def reference_state(cfg: ScenarioConfig) -> ReferenceState:
    return ReferenceState(rho_bar=cfg.rho_bar, R=cfg.R, Pi_bar=cfg.Pi_bar,
                          v_bar=(cfg.v_bar, 0.0, 0.0))


def _convert(key: str, raw: str, kind: type):
    if kind is float:
        return float(raw)
    if kind is int:
        value = int(raw)
        return value
    if kind is tuple:
        raw = raw.strip()
        if not raw:
            return ()
        return tuple(float(part) for part in raw.split(","))
    return raw


def parse_config(text: str) -> ScenarioConfig:
    """Parse and fully validate; raises ConfigError listing all problems."""
    cfg = ScenarioConfig()
    errors: list[tuple[int, str]] = []
    seen: set[tuple[str, str]] = set()
    section = None

    for lineno, rawline in enumerate(text.splitlines(), start=1):
        line = rawline.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            section = line[1:-1].strip()
            if section not in _SCHEMA and section != "tolerances":
                errors.append((lineno, f"unknown section [{section}]"))
                section = None
            continue
        if "=" not in line:
            errors.append((lineno, f"expected key = value, got {line!r}"))
            continue
        if section is None:
            errors.append((lineno, "key outside any [section]"))
            continue
        key, _, raw = line.partition("=")
        key = key.strip()
        raw = raw.strip()
        if (section, key) in seen:
            errors.append((lineno, f"duplicate key {key!r} in [{section}]"))
            continue
        seen.add((section, key))

        if section == "tolerances":
            if key not in cfg.tolerances:
                errors.append((lineno, f"unknown tolerance {key!r}"))
                continue
            try:
                cfg.tolerances[key] = float(raw)
            except ValueError:
                errors.append((lineno, f"tolerance {key!r} must be a number, got {raw!r}"))
            continue

        schema = _SCHEMA[section]
        if key not in schema:
            errors.append((lineno, f"unknown key {key!r} in [{section}]"))
            continue
        try:
            setattr(cfg, key, _convert(key, raw, schema[key]))
        except ValueError:
            errors.append((lineno, f"{key!r} must be of type {schema[key].__name__}, got {raw!r}"))

    errors.extend((0, msg) for msg in validate(cfg))
    if errors:
        raise ConfigError(errors)
    return cfg


def validate(cfg: ScenarioConfig) -> list[str]:
    """Constraint checks shared by the parser and programmatic construction."""
    errors: list[str] = []
    if cfg.system not in ("bulk", "shear"):
        errors.append(f"system must be bulk or shear, got {cfg.system!r}")
    if cfg.geometry not in ("planar", "spherical"):
        errors.append(f"geometry must be planar or spherical, got {cfg.geometry!r}")
    if cfg.bc not in ("fixed", "periodic"):
        errors.append(f"bc must be fixed or periodic, got {cfg.bc!r}")
    if cfg.system == "shear" and cfg.geometry == "spherical":
        errors.append("unsupported combination: shear system with spherical geometry")
    if cfg.geometry == "spherical":
        if cfg.bc == "periodic":
            errors.append("spherical geometry cannot be periodic")
        if cfg.x_min != 0.0:
            errors.append("spherical geometry requires x_min = 0")
    if not cfg.A > 0.0:
        errors.append(f"A must be positive, got {cfg.A}")
    if not cfg.gamma > 1.0:
        errors.append(f"gamma must exceed 1, got {cfg.gamma}")
    if not cfg.rho_bar > 0.0:
        errors.append(f"rho_bar must be positive, got {cfg.rho_bar}")
    if not cfg.R > 0.0:
        errors.append(f"R must be positive, got {cfg.R}")
    if cfg.rho_bar + cfg.a <= 0.0:
        errors.append("density bump amplitude drives rho non-positive")
    if cfg.n_cells < 8:
        errors.append(f"n_cells must be at least 8, got {cfg.n_cells}")
    if not cfg.x_max > cfg.x_min:
        errors.append("x_max must exceed x_min")
    if not 0.0 < cfg.cfl <= 1.0:
        errors.append(f"cfl must lie in (0, 1], got {cfg.cfl}")
    if cfg.t_end < 0.0:
        errors.append(f"t_end must be non-negative, got {cfg.t_end}")
    if cfg.integrator not in ("ssprk2", "ssprk3"):
        errors.append(f"integrator must be ssprk2 or ssprk3, got {cfg.integrator}")
    if cfg.series_cadence < 1:
        errors.append("series_cadence must be at least 1")
    if any(t < 0.0 for t in cfg.snapshot_times):
        errors.append("snapshot_times must be non-negative")
    for name, value in cfg.tolerances.items():
        if name == "check_front":
            continue
        if not (np.isfinite(value) and value > 0.0):
            errors.append(f"tolerance {name} must be positive, got {value}")

    # law specs and front containment need the material law; skip if the
    # basics above already failed
    if not errors:
        try:
            law = material_law(cfg)
        except ValueError as exc:
            errors.append(str(exc))
        else:
            from .materials import eval_transport, sound_speed
            from .quasilinear import bulk_signal_speed, shear_signal_speeds
            try:
                zeta, eta, tau = eval_transport(law, cfg.rho_bar, cfg.Pi_bar,
                                                3.0 * cfg.Pi_bar**2)
            except ValueError as exc:
                errors.append(str(exc))
            else:
                cs2 = sound_speed(law, cfg.rho_bar) ** 2
                if cfg.system == "bulk":
                    cv = bulk_signal_speed(cs2, zeta, cfg.rho_bar, tau)
                else:
                    cv = shear_signal_speeds(cs2, zeta, eta, cfg.rho_bar, tau)[1]
                if cfg.bc == "fixed" and cfg.R + cv * cfg.t_end >= cfg.x_max:
                    errors.append(
                        f"front not contained: R + c_v t_end = "
                        f"{cfg.R + cv * cfg.t_end:.6g} must stay below x_max = {cfg.x_max}")
    return errors


def _fmt(value) -> str:
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, tuple):
        return ", ".join(repr(float(t)) for t in value)
    return str(value)


def format_config(cfg: ScenarioConfig) -> str:
    """Canonical text form; parse_config(format_config(cfg)) == cfg."""
    out = []
    for section, keys in _SCHEMA.items():
        out.append(f"[{section}]")
        for key in keys:
            value = getattr(cfg, key)
            if value is None:
                continue
            out.append(f"{key} = {_fmt(value)}")
        out.append("")
    out.append("[tolerances]")
    for key, value in cfg.tolerances.items():
        out.append(f"{key} = {_fmt(value)}")
    out.append("")
    return "\n".join(out)


def apply_overrides(cfg: ScenarioConfig, overrides: list[str]) -> ScenarioConfig:
    """Apply `section.key=value` strings, then re-validate."""
    errors: list[tuple[int, str]] = []
    cfg = replace(cfg, tolerances=dict(cfg.tolerances))
    for item in overrides:
        if "=" not in item or "." not in item.split("=", 1)[0]:
            errors.append((0, f"override must look like section.key=value, got {item!r}"))
            continue
        target, _, raw = item.partition("=")
        section, _, key = target.strip().partition(".")
        raw = raw.strip()
        if section == "tolerances":
            if key not in cfg.tolerances:
                errors.append((0, f"unknown tolerance {key!r}"))
                continue
            try:
                cfg.tolerances[key] = float(raw)
            except ValueError:
                errors.append((0, f"tolerance {key!r} must be a number, got {raw!r}"))
            continue
        if section not in _SCHEMA or key not in _SCHEMA[section]:
            errors.append((0, f"unknown override target {target!r}"))
            continue
        try:
            setattr(cfg, key, _convert(key, raw, _SCHEMA[section][key]))
        except ValueError:
            errors.append((0, f"{key!r} must be of type {_SCHEMA[section][key].__name__}"))
    errors.extend((0, msg) for msg in validate(cfg))
    if errors:
        raise ConfigError(errors)
    return cfg
