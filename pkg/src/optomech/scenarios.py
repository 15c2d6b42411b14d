"""Deterministic scenario engine: validated configs, sweeps, and CSV emission.

A scenario is a named, fully parameterized computation (a single solve or a
parameter sweep) whose result is a rectangular numeric table.  The engine has
three layers:

* :func:`validate_config` turns raw YAML text plus ``key=value`` overrides
  into a :class:`RunConfig`, applying per-scenario schemas with strict key
  checking (unknown keys get a nearest-key suggestion) and collecting *all*
  errors instead of failing on the first one.
* :func:`run_scenario` dispatches a validated config to its runner and wraps
  the numbers in a :class:`ResultTable` carrying column names, units, and a
  metadata block (config echo, code version, wall time).
* :meth:`ResultTable.write` emits ``<name>.csv`` plus a ``<name>.meta.json``
  sidecar.  The CSV embeds the config echo as comment lines and is
  byte-identical across runs of the same config; volatile fields (wall time,
  creation timestamp) live only in the sidecar.

Sweep points are independent pure function evaluations; they are distributed
over a process pool sized to the machine (serial on a single-core host) and
reassembled in sweep order, so parallelism never changes the output.

Figure presets (``fig2a`` ... ``fig5c``) are canned sweeps with pinned
geometry whose CSV columns match the corresponding result figures; only
resolution-style knobs (point counts, grid sizes) can be overridden.
All computations are deterministic — nothing here draws random numbers.
"""

from __future__ import annotations

import dataclasses
import difflib
import json
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from types import MappingProxyType
from typing import Callable, Mapping, Sequence

import numpy as np
import yaml

from . import __version__
from .core import (
    SIN,
    ApodizedThickness,
    BathParams,
    DiskGeometry,
    GaussianBeam,
    MaterialParams,
    OpticalParams,
    PlaneWave,
    TetherGeometry,
    UniformThickness,
)
from .errors import ConfigValidationError, InvalidInputError
from . import cavity as _cavity
from . import coupling as _coupling
from . import plate as _plate
from . import spring as _spring
from . import tether as _tether
from . import thermo as _thermo

__all__ = [
    "FIGURE_IDS",
    "SCENARIOS",
    "RunConfig",
    "ResultTable",
    "validate_config",
    "run_scenario",
    "describe_defaults",
]

# Reference disk for the spring preset: a = 10 um, d = 50 nm.
_CM_MASS = SIN.density * math.pi * (10e-6) ** 2 * 50e-9

FIGURE_IDS = (
    "fig2a",
    "fig2b",
    "fig3a",
    "fig3b",
    "fig3c",
    "fig4a",
    "fig4b",
    "fig5a",
    "fig5b",
    "fig5c",
)


# --------------------------------------------------------------------------
# Config schemas


@dataclass(frozen=True)
class _Field:
    """One config key: default value, unit, type, and domain checks."""

    default: object
    unit: str
    kind: str  # float | int | bool | str | float_list | float_map
    help: str
    positive: bool = False
    nonnegative: bool = False
    minimum: float | None = None
    maximum: float | None = None
    choices: tuple | None = None
    optional: bool = False  # None allowed (meaning: use the preset's value)


def _f(default, unit, help, **kw) -> _Field:
    return _Field(default, unit, "float", help, **kw)


def _i(default, help, **kw) -> _Field:
    return _Field(default, "1", "int", help, **kw)


def _b(default, help) -> _Field:
    return _Field(default, "1", "bool", help)


def _s(default, help, choices=None) -> _Field:
    return _Field(default, "-", "str", help, choices=choices)


_MATERIAL_FIELDS = tuple(f.name for f in dataclasses.fields(MaterialParams))

_COMMON_MATERIAL = {
    "material": _s("sin", "material preset", choices=("sin",)),
    "material_overrides": _Field(
        {}, "-", "float_map",
        "override individual material constants, e.g. {youngs_modulus: 2.5e11}",
    ),
}

_PLATE_GRID = {
    "n_basis": _i(_plate.DEFAULT_N_BASIS, "radial basis functions per azimuthal order",
                  minimum=4),
    "quad_points": _i(_plate.DEFAULT_N_POINTS, "radial quadrature points (>= 2*n_basis)",
                      minimum=8),
}

_DISK_TRAP = {
    "radius": _f(10e-6, "m", "disk radius", positive=True),
    "thickness": _f(50e-9, "m", "disk thickness (peak value when apodized)", positive=True),
    "apodized": _b(False, "use the smooth-edge thickness profile d0*(1-(r/a)^2)^2"),
    "beam": _s("plane", "trap intensity profile", choices=("plane", "gaussian")),
    "i0": _f(0.0, "W/m^2", "peak trap intensity", nonnegative=True),
    "waist": _f(35e-6, "m", "Gaussian beam waist (beam=gaussian)", positive=True),
    "wavelength": _f(1e-6, "m", "trap laser wavelength", positive=True),
}

SCENARIOS: dict[str, dict[str, _Field]] = {
    "modes-disk": {
        **_DISK_TRAP,
        "m_max": _i(3, "highest azimuthal order to solve", minimum=0),
        "n_modes": _i(2, "modes per azimuthal order", minimum=1),
        **_PLATE_GRID,
        **_COMMON_MATERIAL,
    },
    "thermo": {
        **_DISK_TRAP,
        "mode_m": _i(0, "azimuthal order of the analyzed mode", minimum=0),
        "mode_n": _i(1, "radial index of the analyzed mode", minimum=0),
        "temperature": _f(300.0, "K", "bath temperature", positive=True),
        **_PLATE_GRID,
        **_COMMON_MATERIAL,
    },
    "tether": {
        "radius": _f(10e-6, "m", "membrane radius (sets the suspended mass)", positive=True),
        "thickness": _f(50e-9, "m", "membrane thickness", positive=True),
        "tether_length": _f(50e-6, "m", "tether length", positive=True),
        "tether_width": _f(50e-9, "m", "tether width (square cross-section)", positive=True),
        "f_opt": _f(0.0, "Hz", "optical trap frequency on the membrane", nonnegative=True),
        "f_max": _f(3e6, "Hz", "upper edge of the root search", positive=True),
        **_COMMON_MATERIAL,
    },
    "spring": {
        "cavity_length": _f(1e-2, "m", "cavity length", positive=True),
        "finesse": _f(1e5, "1", "cavity finesse", positive=True),
        "detuning": _f(2.96e9, "rad/s", "pump detuning from resonance", positive=True),
        "input_power": _f(2.4e3, "W", "pump input power", nonnegative=True),
        "effective_mass": _f(_CM_MASS, "kg", "oscillator effective mass", positive=True),
        "natural_f": _f(1.4e3, "Hz", "bare mechanical frequency", positive=True),
        "wavelength": _f(1e-6, "m", "pump wavelength", positive=True),
        "target_n_osc": _f(1e3, "1", "coherence target for the power estimate", positive=True),
        "target_f_eff": _f(1e6, "Hz", "effective-frequency target for the power estimate",
                           positive=True),
    },
    "coupling": {
        "radius": _f(25e-6, "m", "disk radius", positive=True),
        "thickness": _f(30e-9, "m", "disk thickness (peak value when apodized)", positive=True),
        "apodized": _b(False, "use the smooth-edge thickness profile"),
        "waist": _f(15e-6, "m", "trap and readout beam waist", positive=True),
        "wavelength": _f(1e-6, "m", "laser wavelength", positive=True),
        "f_min": _f(30e3, "Hz", "lowest trap frequency in the sweep", positive=True),
        "f_max": _f(300e3, "Hz", "highest trap frequency in the sweep", positive=True),
        "points": _i(10, "sweep points", minimum=1),
        **_PLATE_GRID,
        **_COMMON_MATERIAL,
    },
    "cavity": {
        "length": _f(1.99e-2, "m", "mirror-to-mirror length", positive=True),
        "mirror_curvature": _f(1e-2, "m", "mirror radius of curvature", positive=True),
        "mirror_aperture": _f(0.95e-3, "m", "mirror aperture radius", positive=True),
        "mirror_reflectance": _f(1.0, "1", "mirror power reflectance", positive=True,
                                 maximum=1.0),
        "membrane": _s("none", "membrane at the cavity midplane",
                       choices=("none", "flat", "apodized")),
        "radius": _f(15e-6, "m", "membrane radius", positive=True),
        "thickness": _f(30e-9, "m", "membrane thickness (peak value when apodized)",
                        positive=True),
        "wavelength": _f(1e-6, "m", "cavity wavelength", positive=True),
        "trial_waist": _f(15e-6, "m", "waist of the Gaussian launch field", positive=True),
        "family": _s("symmetric", "longitudinal symmetry family",
                     choices=("symmetric", "antisymmetric")),
        "n_points": _i(_cavity.DEFAULT_N_POINTS, "radial transform points", minimum=16),
        "aperture_factor": _f(_cavity.DEFAULT_APERTURE_FACTOR, "1",
                              "grid radius / mirror aperture", positive=True),
        "krylov_dim": _i(80, "Krylov subspace dimension", minimum=2),
        "max_matvecs": _i(4000, "round-trip evaluation budget", minimum=1),
        "n_planes": _i(64, "axial planes for the intensity envelope", minimum=2),
        **_COMMON_MATERIAL,
    },
    "budget": {
        "radii": _Field([5e-6, 6e-6, 7e-6, 8e-6, 9e-6, 10e-6, 12e-6, 15e-6, 18e-6, 21e-6],
                        "m", "float_list", "disk radii to sweep"),
        "f_m": _f(0.5e6, "Hz", "target center-of-mass frequency", positive=True),
        "thickness": _f(30e-9, "m", "peak thickness of the apodized disk", positive=True),
        "wavelength": _f(1e-6, "m", "cavity wavelength", positive=True),
        "temperature": _f(300.0, "K", "bath temperature", positive=True),
        "n_points": _i(_cavity.DEFAULT_N_POINTS, "radial transform points", minimum=16),
        "trial_waist": _f(15e-6, "m", "waist of the Gaussian launch field", positive=True),
        "max_matvecs": _i(4000, "round-trip evaluation budget", minimum=1),
        **_COMMON_MATERIAL,
    },
    "figure": {
        "id": _s(None, "preset id, one of " + ", ".join(FIGURE_IDS), choices=FIGURE_IDS),
        "points": _i(None, "sweep points (preset default when omitted)", minimum=2,
                     optional=True),
        "n_points": _i(None, "radial transform points for cavity presets", minimum=16,
                       optional=True),
        "n_basis": _i(None, "radial basis size for plate presets", minimum=4, optional=True),
        "quad_points": _i(None, "radial quadrature points for plate presets", minimum=8,
                          optional=True),
        "max_matvecs": _i(None, "round-trip evaluation budget for cavity presets", minimum=1,
                          optional=True),
    },
}


def _as_number(value: object) -> float | None:
    """Read a float, also accepting strings like "1e6" (YAML calls them str)."""
    if isinstance(value, bool):
        return None
    if isinstance(value, (int, float)):
        return float(value)
    if isinstance(value, str):
        try:
            return float(value)
        except ValueError:
            return None
    return None


def _coerce(key: str, spec: _Field, value: object, errors: list[str]):
    """Type-check one value against its field spec; None signals an error."""
    if value is None:
        if spec.optional:
            return None
        errors.append(f"{key}: value is required and may not be null")
        return None
    if spec.kind == "float":
        number = _as_number(value)
        if number is None:
            errors.append(f"{key}: expected a number, got {value!r}")
            return None
        value = number
        if not math.isfinite(value):
            errors.append(f"{key}: must be finite, got {value!r}")
            return None
        if spec.positive and value <= 0:
            errors.append(f"{key}: must be > 0, got {value!r}")
            return None
        if spec.nonnegative and value < 0:
            errors.append(f"{key}: must be >= 0, got {value!r}")
            return None
        if spec.maximum is not None and value > spec.maximum:
            errors.append(f"{key}: must be <= {spec.maximum}, got {value!r}")
            return None
        return value
    if spec.kind == "int":
        if isinstance(value, bool) or not isinstance(value, int):
            errors.append(f"{key}: expected an integer, got {value!r}")
            return None
        if spec.minimum is not None and value < spec.minimum:
            errors.append(f"{key}: must be >= {int(spec.minimum)}, got {value!r}")
            return None
        return int(value)
    if spec.kind == "bool":
        if not isinstance(value, bool):
            errors.append(f"{key}: expected true/false, got {value!r}")
            return None
        return bool(value)
    if spec.kind == "str":
        if not isinstance(value, str):
            errors.append(f"{key}: expected a string, got {value!r}")
            return None
        if spec.choices and value not in spec.choices:
            hint = difflib.get_close_matches(value, spec.choices, n=1)
            suffix = f" (did you mean {hint[0]!r}?)" if hint else ""
            errors.append(
                f"{key}: {value!r} is not one of {', '.join(spec.choices)}{suffix}"
            )
            return None
        return value
    if spec.kind == "float_list":
        if not isinstance(value, (list, tuple)):
            errors.append(f"{key}: expected a list of numbers, got {value!r}")
            return None
        if len(value) == 0:
            errors.append(f"{key}: sweep range must be nonempty")
            return None
        out = []
        for i, raw in enumerate(value):
            item = _as_number(raw)
            if item is None:
                errors.append(f"{key}[{i}]: expected a number, got {raw!r}")
                return None
            if not math.isfinite(item) or item <= 0:
                errors.append(f"{key}[{i}]: must be finite and > 0, got {item!r}")
                return None
            out.append(item)
        return out
    if spec.kind == "float_map":
        if not isinstance(value, dict):
            errors.append(f"{key}: expected a mapping of names to numbers, got {value!r}")
            return None
        out = {}
        for name, item in value.items():
            if name not in _MATERIAL_FIELDS:
                hint = difflib.get_close_matches(str(name), _MATERIAL_FIELDS, n=1)
                suffix = f" (did you mean {hint[0]!r}?)" if hint else ""
                errors.append(f"{key}: unknown material constant {name!r}{suffix}")
                continue
            number = _as_number(item)
            if number is None:
                errors.append(f"{key}.{name}: expected a number, got {item!r}")
                continue
            out[name] = number
        return out
    raise AssertionError(f"unhandled field kind {spec.kind}")  # pragma: no cover


def _cross_checks(scenario: str, params: dict, errors: list[str]) -> None:
    """Constraints spanning more than one key, collected like field errors."""
    get = params.get
    if scenario in ("modes-disk", "thermo", "coupling"):
        nb, nq = get("n_basis"), get("quad_points")
        if nb is not None and nq is not None and nq < 2 * nb:
            errors.append(f"quad_points: must be >= 2*n_basis = {2 * nb}, got {nq}")
    if scenario == "figure":
        nb, nq = get("n_basis"), get("quad_points")
        if nb is not None and nq is not None and nq < 2 * nb:
            errors.append(f"quad_points: must be >= 2*n_basis = {2 * nb}, got {nq}")
    if scenario == "coupling":
        if get("f_min") and get("f_max") and params["f_min"] > params["f_max"]:
            errors.append("f_min: must not exceed f_max")
    if scenario == "cavity":
        rc, ap = get("mirror_curvature"), get("mirror_aperture")
        if rc is not None and ap is not None and ap > rc:
            errors.append("mirror_aperture: must not exceed mirror_curvature")


@dataclass(frozen=True)
class RunConfig:
    """A validated scenario request: every key resolved, defaults applied."""

    scenario: str
    params: Mapping[str, object]

    def as_dict(self) -> dict:
        return {k: v for k, v in self.params.items()}


def _parse_yaml(raw_text: str, errors: list[str]) -> dict:
    try:
        data = yaml.safe_load(raw_text) if raw_text.strip() else {}
    except yaml.YAMLError as exc:
        errors.append(f"config is not valid YAML: {exc}")
        return {}
    if data is None:
        return {}
    if not isinstance(data, dict):
        errors.append(f"config must be a mapping of keys to values, got {type(data).__name__}")
        return {}
    return data


def _apply_overrides(data: dict, overrides: Sequence[str], errors: list[str]) -> dict:
    merged = dict(data)
    for item in overrides:
        key, sep, text = item.partition("=")
        key = key.strip()
        if not sep or not key:
            errors.append(f"override {item!r}: expected key=value")
            continue
        try:
            merged[key] = yaml.safe_load(text) if text.strip() else None
        except yaml.YAMLError as exc:
            errors.append(f"override {key}: value is not valid YAML: {exc}")
    return merged


def validate_config(
    scenario: str, raw_text: str = "", overrides: Sequence[str] = ()
) -> RunConfig:
    """Parse and validate a scenario config, collecting every error.

    ``raw_text`` is YAML (a mapping, possibly empty); ``overrides`` are
    ``key=value`` strings whose values are parsed as YAML scalars and take
    precedence over the file.  Unknown keys are rejected with a nearest-key
    suggestion.  On failure raises :class:`ConfigValidationError` whose
    ``errors`` attribute lists every problem found.
    """
    errors: list[str] = []
    if scenario not in SCENARIOS:
        hint = difflib.get_close_matches(scenario, SCENARIOS, n=1)
        suffix = f" (did you mean {hint[0]!r}?)" if hint else ""
        raise ConfigValidationError(
            [f"unknown scenario {scenario!r}{suffix}; valid: {', '.join(SCENARIOS)}"]
        )
    schema = SCENARIOS[scenario]
    data = _apply_overrides(_parse_yaml(raw_text, errors), overrides, errors)

    params: dict[str, object] = {}
    for key, value in data.items():
        if key not in schema:
            hint = difflib.get_close_matches(str(key), schema, n=1)
            suffix = f" (did you mean {hint[0]!r}?)" if hint else ""
            errors.append(f"unknown key {key!r}{suffix}")
            continue
        coerced = _coerce(key, schema[key], value, errors)
        if coerced is not None or schema[key].optional:
            params[key] = coerced
    for key, spec in schema.items():
        if key in params:
            continue
        if spec.default is None and not spec.optional:
            errors.append(f"{key}: required key is missing")
        else:
            params[key] = spec.default if not isinstance(spec.default, (list, dict)) \
                else type(spec.default)(spec.default)
    if not errors:
        _cross_checks(scenario, params, errors)
    if errors:
        raise ConfigValidationError(errors)
    return RunConfig(scenario=scenario, params=MappingProxyType(params))


def describe_defaults() -> str:
    """Human-readable listing of every scenario's keys, units, and defaults."""
    lines = []
    for scenario, schema in SCENARIOS.items():
        lines.append(f"{scenario}:")
        for key, spec in schema.items():
            default = "<required>" if spec.default is None and not spec.optional \
                else "<preset>" if spec.default is None else repr(spec.default)
            unit = f" [{spec.unit}]" if spec.unit not in ("-",) else ""
            lines.append(f"  {key}{unit} = {default}  # {spec.help}")
    return "\n".join(lines)


# --------------------------------------------------------------------------
# Result tables


def _fmt(value: float) -> str:
    return format(float(value), ".12g")


@dataclass(frozen=True)
class ResultTable:
    """Rectangular numeric result with per-column units and run metadata."""

    columns: tuple[str, ...]
    units: tuple[str, ...]
    rows: tuple[tuple[float, ...], ...]
    metadata: dict

    def __post_init__(self):
        if not self.columns:
            raise InvalidInputError("result table must have at least one column")
        if len(self.units) != len(self.columns) or any(not u for u in self.units):
            raise InvalidInputError("every column needs a unit")
        for row in self.rows:
            if len(row) != len(self.columns):
                raise InvalidInputError("result rows must be rectangular")

    @property
    def header(self) -> str:
        return ",".join(f"{c}[{u}]" for c, u in zip(self.columns, self.units))

    def csv_text(self) -> str:
        """Deterministic CSV: comment metadata block, units header, rows.

        Volatile metadata (wall time, timestamps) is excluded so identical
        configs yield byte-identical files.
        """
        meta = self.metadata
        lines = [
            f"# scenario: {meta['scenario']}",
            f"# config: {json.dumps(meta['config'], sort_keys=True)}",
            f"# code_version: {meta['code_version']}",
        ]
        for key in sorted(meta.get("derived", {})):
            lines.append(f"# {key}: {_fmt(meta['derived'][key])}")
        lines.append(self.header)
        lines.extend(",".join(_fmt(v) for v in row) for row in self.rows)
        return "\n".join(lines) + "\n"

    def write(self, out_dir: str | Path, basename: str) -> tuple[Path, Path]:
        """Write ``<basename>.csv`` and its ``<basename>.meta.json`` sidecar."""
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        csv_path = out / f"{basename}.csv"
        csv_path.write_bytes(self.csv_text().encode("utf-8"))
        sidecar = dict(self.metadata)
        sidecar["csv"] = csv_path.name
        sidecar["columns"] = [f"{c}[{u}]" for c, u in zip(self.columns, self.units)]
        sidecar["n_rows"] = len(self.rows)
        sidecar["created_utc"] = datetime.now(timezone.utc).isoformat()
        meta_path = out / f"{basename}.meta.json"
        meta_path.write_bytes(
            (json.dumps(sidecar, sort_keys=True, indent=2) + "\n").encode("utf-8")
        )
        return csv_path, meta_path


# --------------------------------------------------------------------------
# Shared builders


def _material_from(params: Mapping) -> MaterialParams:
    overrides = params.get("material_overrides") or {}
    return dataclasses.replace(SIN, **overrides) if overrides else SIN


def _disk_from(params: Mapping) -> DiskGeometry:
    profile = (
        ApodizedThickness(params["thickness"])
        if params.get("apodized")
        else UniformThickness(params["thickness"])
    )
    return DiskGeometry(params["radius"], profile)


def _intensity_from(params: Mapping, i0: float):
    if params["beam"] == "plane":
        return PlaneWave(i0)
    return GaussianBeam(i0, params["waist"])


def _pool_map(fn: Callable, items: Sequence) -> list:
    """Ordered map over sweep points, parallel when the host has the cores.

    Results always come back in input order (``ProcessPoolExecutor.map``
    preserves it), so the worker count never affects the output.
    """
    items = list(items)
    workers = min(os.cpu_count() or 1, len(items))
    if workers <= 1:
        return [fn(item) for item in items]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


# --------------------------------------------------------------------------
# Scenario runners.  Each returns (columns, units, rows, derived-metadata).


def _run_modes_disk(p: dict):
    disk = _disk_from(p)
    material = _material_from(p)
    optics = OpticalParams(p["wavelength"])
    intensity = _intensity_from(p, p["i0"])
    rows = []
    for m in range(p["m_max"] + 1):
        grid = _plate.RadialGrid.build(disk.radius, m, p["quad_points"], p["n_basis"])
        op = _plate.assemble_plate_operator(disk, material, optics, intensity, m, grid)
        for mode in _plate.solve_modes(op, p["n_modes"]):
            rows.append((float(m), float(mode.n), mode.omega / (2 * math.pi),
                         mode.u_opt, mode.u_mech, _plate.energy_ratio(mode)))
    rows.sort(key=lambda r: (r[2], r[0]))
    return (
        ("m", "n", "f", "u_opt", "u_mech", "energy_ratio"),
        ("1", "1", "Hz", "J", "J", "1"),
        rows,
        {},
    )


def _run_thermo(p: dict):
    disk = _disk_from(p)
    material = _material_from(p)
    optics = OpticalParams(p["wavelength"])
    intensity = _intensity_from(p, p["i0"])
    bath = BathParams(p["temperature"])
    m, n = p["mode_m"], p["mode_n"]
    grid = _plate.RadialGrid.build(disk.radius, m, p["quad_points"], p["n_basis"])
    op = _plate.assemble_plate_operator(disk, material, optics, intensity, m, grid)
    mode = _plate.solve_modes(op, n + 1)[n]
    summary = _thermo.thermo_summary(mode, disk, material, bath)
    ratio = _plate.energy_ratio(mode)
    closed = _thermo.qf_product_limit(material, p["thickness"], bath, min(ratio, 1e300))
    row = (
        float(m), float(n), mode.omega / (2 * math.pi), ratio,
        summary.delta_w, summary.q_factor, summary.qf_product, closed,
        summary.n_osc_th, _thermo.ground_state_threshold(bath), summary.diffusion_rate,
    )
    return (
        ("mode_m", "mode_n", "f", "energy_ratio", "delta_w", "q_factor",
         "qf_product", "qf_closed_form", "n_osc_th", "ground_state_threshold",
         "diffusion_rate"),
        ("1", "1", "Hz", "1", "J", "1", "Hz", "Hz", "1", "Hz", "1/s"),
        [row],
        {},
    )


def _tether_system(p: Mapping, f_opt: float) -> "_tether.RigidTetherSystem":
    material = _material_from(p)
    mass = material.density * math.pi * p["radius"] ** 2 * p["thickness"]
    tether = TetherGeometry(p["tether_length"], p["tether_width"])
    return _tether.RigidTetherSystem(mass, tether, material, 2 * math.pi * f_opt)


def _run_tether(p: dict):
    sys_ = _tether_system(p, p["f_opt"])
    modes = _tether.solve_tether_spectrum(sys_, 2 * math.pi * p["f_max"])
    rows = [
        (mode.omega / (2 * math.pi),
         1.0 if mode.kind == "CM" else 0.0,
         float(mode.tether_index or 0),
         _tether.tether_energy_ratio(mode, sys_))
        for mode in modes
    ]
    derived = {"mass_ratio": sys_.mass_ratio,
               "f_pendulum": sys_.pendulum_omega / (2 * math.pi)}
    return (
        ("f", "is_cm", "tether_index", "energy_ratio"),
        ("Hz", "1", "1", "1"),
        rows,
        derived,
    )


def _run_spring(p: dict):
    cfg = _spring.SpringConfig(
        cavity_length=p["cavity_length"],
        finesse=p["finesse"],
        detuning=p["detuning"],
        input_power=p["input_power"],
        effective_mass=p["effective_mass"],
        natural_omega=2 * math.pi * p["natural_f"],
        wavelength=p["wavelength"],
    )
    omega_eff, gamma_eff = _spring.effective_frequency_and_damping(cfg)
    ratio = _spring.decoherence_ratio(cfg)
    power = _spring.required_input_power(
        p["target_n_osc"], 2 * math.pi * p["target_f_eff"], cfg
    )
    row = (
        omega_eff / (2 * math.pi), gamma_eff, cfg.kappa / (2 * math.pi),
        ratio.exact, ratio.asymptote, _spring.coherent_oscillations(cfg), power,
    )
    return (
        ("f_eff", "gamma_eff", "f_kappa", "decoherence_exact",
         "decoherence_asymptote", "n_osc", "input_power_required"),
        ("Hz", "1/s", "Hz", "1", "1", "1", "W"),
        [row],
        {},
    )


def _coupling_point(args) -> tuple:
    p, f_cm = args
    disk = _disk_from(p)
    material = _material_from(p)
    optics = OpticalParams(p["wavelength"])
    grid = _plate.RadialGrid.build(disk.radius, 0, p["quad_points"], p["n_basis"])
    i0, mode = _plate.intensity_for_cm_frequency(
        disk, material, optics,
        lambda i: GaussianBeam(i, p["waist"]),
        2 * math.pi * f_cm, grid,
    )
    return (f_cm, i0, _coupling.coupling_ratio(mode, p["waist"], disk))


def _run_coupling(p: dict):
    sweep = np.linspace(p["f_min"], p["f_max"], p["points"])
    rows = _pool_map(_coupling_point, [(p, float(f)) for f in sweep])
    return (
        ("f_cm", "i0", "g_ratio"),
        ("Hz", "W/m^2", "1"),
        rows,
        {},
    )


def _cavity_setup_from(p: Mapping) -> "_cavity.CavitySetup":
    membrane = None
    material = None
    if p["membrane"] != "none":
        profile = (
            ApodizedThickness(p["thickness"]) if p["membrane"] == "apodized"
            else UniformThickness(p["thickness"])
        )
        membrane = DiskGeometry(p["radius"], profile)
        material = _material_from(p)
    return _cavity.CavitySetup(
        length=p["length"],
        mirror_curvature=p["mirror_curvature"],
        mirror_reflectance=p["mirror_reflectance"],
        mirror_aperture=p["mirror_aperture"],
        membrane=membrane,
        material=material,
    )


def _fitted_waist(result: "_cavity.CavityModeResult") -> float:
    """1/e^2 intensity radius from the second moment of the membrane-plane field."""
    grid = result.mode.grid
    weight = np.abs(result.mode.values) ** 2 * grid.weights
    return math.sqrt(2.0 * float(weight @ grid.radii**2) / float(weight.sum()))


def _run_cavity(p: dict):
    setup = _cavity_setup_from(p)
    grid = _cavity.build_grid(setup, p["n_points"], p["aperture_factor"])
    trial = _cavity.gaussian_field(grid, p["trial_waist"], p["wavelength"])
    result = _cavity.solve_cavity_mode(
        setup, trial, family=p["family"], krylov_dim=p["krylov_dim"],
        max_matvecs=p["max_matvecs"], n_planes=p["n_planes"],
    )
    row = (
        result.finesse, result.round_trip_loss, result.kappa / (2 * math.pi),
        result.mode_volume, result.i_max,
        result.i_max_location[0], result.i_max_location[1],
        result.resonance_offset / (2 * math.pi),
        1.0 if result.degenerate else 0.0,
        float(result.matvec_count), _fitted_waist(result),
    )
    return (
        ("finesse", "round_trip_loss", "f_kappa", "mode_volume", "i_max",
         "peak_r", "peak_z", "resonance_offset_f", "degenerate",
         "matvec_count", "fitted_waist"),
        ("1", "1", "Hz", "m^3", "1", "m", "m", "Hz", "1", "1", "m"),
        [row],
        {},
    )


def _run_budget(p: dict):
    points = _cavity.coherence_budget(
        p["radii"], 2 * math.pi * p["f_m"],
        thickness_peak=p["thickness"],
        material=_material_from(p),
        optics=OpticalParams(p["wavelength"]),
        bath=BathParams(p["temperature"]),
        n_points=p["n_points"],
        trial_waist=p["trial_waist"],
        max_matvecs=p["max_matvecs"],
    )
    rows = [
        (pt.radius, pt.n_th, pt.n_sc, pt.n_tot, pt.finesse,
         pt.kappa / (2 * math.pi), pt.mode_volume, pt.peak_intensity)
        for pt in points
    ]
    return (
        ("radius", "n_th", "n_sc", "n_tot", "finesse", "f_kappa",
         "mode_volume", "peak_intensity"),
        ("m", "1", "1", "1", "1", "Hz", "m^3", "W/m^2"),
        rows,
        {},
    )


# --------------------------------------------------------------------------
# Figure presets


def _fig_plate_defaults(p: Mapping) -> tuple[int, int]:
    n_basis = p.get("n_basis") or _plate.DEFAULT_N_BASIS
    quad = p.get("quad_points") or max(_plate.DEFAULT_N_POINTS, 2 * n_basis)
    return n_basis, quad


def _fig2a_point(args) -> tuple:
    p, i0 = args
    disk = DiskGeometry(10e-6, UniformThickness(50e-9))
    optics = OpticalParams()
    n_basis, quad = _fig_plate_defaults(p)
    values = [i0]
    for m in range(4):
        grid = _plate.RadialGrid.build(disk.radius, m, quad, n_basis)
        op = _plate.assemble_plate_operator(disk, SIN, optics, PlaneWave(i0), m, grid)
        values.extend(mode.omega / (2 * math.pi) for mode in _plate.solve_modes(op, 2))
    return tuple(values)


def _run_fig2a(p: dict):
    sweep = np.linspace(0.0, 2e11, p.get("points") or 21)
    rows = _pool_map(_fig2a_point, [(p, float(i0)) for i0 in sweep])
    names = ["i0"] + [f"f_m{m}_n{n}" for m in range(4) for n in range(2)]
    units = ["W/m^2"] + ["Hz"] * 8
    return tuple(names), tuple(units), rows, {}


_FIG_TETHER_PRESET = {
    "radius": 10e-6, "thickness": 50e-9,
    "tether_length": 50e-6, "tether_width": 50e-9,
    "material_overrides": {},
}


def _fig2b_point(args) -> list:
    p, f_opt = args
    sys_ = _tether_system(_FIG_TETHER_PRESET, f_opt)
    modes = _tether.solve_tether_spectrum(sys_, 2 * math.pi * 3e6)
    return [f_opt] + [mode.omega / (2 * math.pi) for mode in modes]


def _run_fig2b(p: dict):
    sweep = np.linspace(0.0, 2e6, p.get("points") or 81)
    raw = _pool_map(_fig2b_point, [(p, float(f)) for f in sweep])
    width = max(len(row) for row in raw)
    rows = [tuple(row) + (math.nan,) * (width - len(row)) for row in raw]
    names = ["f_opt"] + [f"f_mode_{k:02d}" for k in range(1, width)]
    return tuple(names), ("Hz",) * width, rows, {}


def _fig3a_point(args) -> tuple:
    p, f_cm = args
    disk = DiskGeometry(10e-6, UniformThickness(50e-9))
    n_basis, quad = _fig_plate_defaults(p)
    grid = _plate.RadialGrid.build(disk.radius, 0, quad, n_basis)
    i0, mode = _plate.intensity_for_cm_frequency(
        disk, SIN, OpticalParams(), lambda i: GaussianBeam(i, 35e-6),
        2 * math.pi * f_cm, grid,
    )
    return (f_cm, i0, _plate.energy_ratio(mode))


def _run_fig3a(p: dict):
    sweep = np.linspace(2e5, 2e6, p.get("points") or 10)
    rows = _pool_map(_fig3a_point, [(p, float(f)) for f in sweep])
    return (
        ("f_cm", "i0", "energy_ratio"),
        ("Hz", "W/m^2", "1"),
        rows,
        {},
    )


def _fig3b_point(args) -> tuple:
    p, f_opt = args
    sys_ = _tether_system(_FIG_TETHER_PRESET, f_opt)
    modes = _tether.solve_tether_spectrum(sys_, 2 * math.pi * 3e6)
    cm = next(mode for mode in modes if mode.kind == "CM")
    return (f_opt, cm.omega / (2 * math.pi), _tether.tether_energy_ratio(cm, sys_))


def _run_fig3b(p: dict):
    sweep = np.linspace(5e4, 2e6, p.get("points") or 60)
    rows = _pool_map(_fig3b_point, [(p, float(f)) for f in sweep])
    return (
        ("f_opt", "f_cm", "energy_ratio"),
        ("Hz", "Hz", "1"),
        rows,
        {},
    )


def _fig3c_point(args) -> tuple:
    p, f_cm = args
    disk = DiskGeometry(10e-6, UniformThickness(50e-9))
    n_basis, quad = _fig_plate_defaults(p)
    grid = _plate.RadialGrid.build(disk.radius, 0, quad, n_basis)
    i0, mode = _plate.intensity_for_cm_frequency(
        disk, SIN, OpticalParams(), lambda i: GaussianBeam(i, 35e-6),
        2 * math.pi * f_cm, grid,
    )
    disk_ratio = _plate.energy_ratio(mode)
    sys_ = _tether_system(_FIG_TETHER_PRESET, f_cm)
    modes = _tether.solve_tether_spectrum(sys_, 2 * math.pi * max(3e6, 3 * f_cm))
    cm = next(m for m in modes if m.kind == "CM")
    tether_ratio = _tether.tether_energy_ratio(cm, sys_)
    composed = _tether.composed_energy_ratio(disk_ratio, tether_ratio)
    return (f_cm, i0, disk_ratio, tether_ratio, composed)


def _run_fig3c(p: dict):
    sweep = np.linspace(2e5, 2e6, p.get("points") or 10)
    rows = _pool_map(_fig3c_point, [(p, float(f)) for f in sweep])
    return (
        ("f_cm", "i0", "disk_ratio", "tether_ratio", "composed_ratio"),
        ("Hz", "W/m^2", "1", "1", "1"),
        rows,
        {},
    )


_FIG4_PRESET = {
    "radius": 25e-6, "thickness": 30e-9, "apodized": False,
    "waist": 15e-6, "wavelength": 1e-6, "material_overrides": {},
}


def _fig4a_point(args) -> tuple:
    p, f_cm = args
    n_basis, quad = _fig_plate_defaults(p)
    q = dict(_FIG4_PRESET, n_basis=n_basis, quad_points=quad)
    return _coupling_point((q, f_cm))


def _run_fig4a(p: dict):
    sweep = np.linspace(30e3, 300e3, p.get("points") or 10)
    rows = _pool_map(_fig4a_point, [(p, float(f)) for f in sweep])
    return (
        ("f_cm", "i0", "g_ratio"),
        ("Hz", "W/m^2", "1"),
        rows,
        {},
    )


def _run_fig4b(p: dict):
    f_cm = 300e3
    disk = DiskGeometry(25e-6, UniformThickness(30e-9))
    n_basis, quad = _fig_plate_defaults(p)
    grid = _plate.RadialGrid.build(disk.radius, 0, quad, n_basis)
    i0, mode = _plate.intensity_for_cm_frequency(
        disk, SIN, OpticalParams(), lambda i: GaussianBeam(i, 15e-6),
        2 * math.pi * f_cm, grid,
    )
    profile = _coupling.pinning_profile(mode, center_radius=15e-6)
    rows = list(zip(profile.radii.tolist(), profile.values.tolist()))
    derived = {
        "f_cm": f_cm, "i0": i0,
        "rim_center_ratio": profile.rim_center_ratio,
        "center_radius": profile.center_radius,
    }
    return (("r", "displacement"), ("m", "1"), rows, derived)


_FIG5_SETUP = dict(length=1.99e-2, mirror_curvature=1e-2,
                   mirror_reflectance=1.0, mirror_aperture=0.95e-3)
_FIG5_WAIST = 15e-6
_FIG5_THICKNESS = 30e-9


def _fig5_solve(membrane: DiskGeometry | None, n_points: int, max_matvecs: int):
    setup = _cavity.CavitySetup(
        membrane=membrane, material=SIN if membrane is not None else None,
        **_FIG5_SETUP,
    )
    grid = _cavity.build_grid(setup, n_points)
    trial = _cavity.gaussian_field(grid, _FIG5_WAIST, 1e-6)
    return _cavity.solve_cavity_mode(setup, trial, max_matvecs=max_matvecs)


def _fig5a_point(args) -> tuple:
    p, ratio = args
    n_points = p.get("n_points") or _cavity.DEFAULT_N_POINTS
    budget = p.get("max_matvecs") or 4000
    radius = _FIG5_WAIST / ratio
    flat = _fig5_solve(
        DiskGeometry(radius, UniformThickness(_FIG5_THICKNESS)), n_points, budget)
    apod = _fig5_solve(
        DiskGeometry(radius, ApodizedThickness(_FIG5_THICKNESS)), n_points, budget)
    return (ratio, radius, flat.finesse, apod.finesse)


def _run_fig5a(p: dict):
    sweep = np.linspace(0.4, 1.8, p.get("points") or 8)
    rows = _pool_map(_fig5a_point, [(p, float(x)) for x in sweep])
    return (
        ("w0_over_a", "radius", "finesse_flat", "finesse_apodized"),
        ("1", "m", "1", "1"),
        rows,
        {},
    )


def _run_fig5b(p: dict):
    n_points = p.get("n_points") or _cavity.DEFAULT_N_POINTS
    budget = p.get("max_matvecs") or 4000
    empty = _fig5_solve(None, n_points, budget)
    near = _fig5_solve(
        DiskGeometry(_FIG5_WAIST, ApodizedThickness(_FIG5_THICKNESS)), n_points, budget)
    wide = _fig5_solve(
        DiskGeometry(2.5 * _FIG5_WAIST, ApodizedThickness(_FIG5_THICKNESS)),
        n_points, budget)
    radii = empty.mode.grid.radii
    curves = [np.abs(res.mode.values) ** 2 for res in (empty, near, wide)]
    rows = list(zip(radii.tolist(), *[c.tolist() for c in curves]))
    return (
        ("r", "i_empty", "i_apodized_a_w0", "i_apodized_a_2p5w0"),
        ("m", "1", "1", "1"),
        rows,
        {},
    )


def _run_fig5c(p: dict):
    n = p.get("points") or 9
    radii = np.linspace(5e-6, 21e-6, n)
    points = _cavity.coherence_budget(
        [float(r) for r in radii], 2 * math.pi * 0.5e6,
        thickness_peak=_FIG5_THICKNESS,
        n_points=p.get("n_points") or _cavity.DEFAULT_N_POINTS,
        trial_waist=_FIG5_WAIST,
        max_matvecs=p.get("max_matvecs") or 4000,
    )
    rows = [
        (pt.radius, pt.n_th, pt.n_sc, pt.n_tot, pt.finesse, pt.peak_intensity)
        for pt in points
    ]
    return (
        ("radius", "n_th", "n_sc", "n_tot", "finesse", "peak_intensity"),
        ("m", "1", "1", "1", "1", "W/m^2"),
        rows,
        {},
    )


_FIGURES = {
    "fig2a": _run_fig2a,
    "fig2b": _run_fig2b,
    "fig3a": _run_fig3a,
    "fig3b": _run_fig3b,
    "fig3c": _run_fig3c,
    "fig4a": _run_fig4a,
    "fig4b": _run_fig4b,
    "fig5a": _run_fig5a,
    "fig5b": _run_fig5b,
    "fig5c": _run_fig5c,
}


def _run_figure(p: dict):
    return _FIGURES[p["id"]](p)


_RUNNERS = {
    "modes-disk": _run_modes_disk,
    "thermo": _run_thermo,
    "tether": _run_tether,
    "spring": _run_spring,
    "coupling": _run_coupling,
    "cavity": _run_cavity,
    "budget": _run_budget,
    "figure": _run_figure,
}


def run_scenario(config: RunConfig, out_dir: str | Path | None = None) -> ResultTable:
    """Execute a validated scenario; optionally write CSV + sidecar to ``out_dir``.

    The returned table's metadata carries the scenario name, the fully
    resolved config echo (sufficient to re-run), the code version, and the
    wall time.  Output on disk is named after the scenario (or the figure
    preset id for ``figure`` runs).
    """
    start = time.perf_counter()
    columns, units, rows, derived = _RUNNERS[config.scenario](config.as_dict())
    metadata = {
        "scenario": config.scenario,
        "config": config.as_dict(),
        "code_version": __version__,
        "derived": {k: float(v) for k, v in derived.items()},
        "wall_time_s": round(time.perf_counter() - start, 6),
    }
    table = ResultTable(
        columns=tuple(columns),
        units=tuple(units),
        rows=tuple(tuple(float(v) for v in row) for row in rows),
        metadata=metadata,
    )
    if out_dir is not None:
        basename = config.params["id"] if config.scenario == "figure" else config.scenario
        table.write(out_dir, str(basename))
    return table
