"""Run configuration: a single JSON document with unit-tagged quantities.

Quantities are given as ``{"value": x, "unit": "..."}`` or as a bare number
in the default unit.  Everything is converted once to the internal system
(energies and frequencies in eV, lengths in nm, c = hbar c in eV nm).

Example::

    {
      "material": {"preset": "gold"},
      "gap": {"value": 100, "unit": "nm"},
      "temperatures": {"values": [1, 5, 10], "unit": "K"},
      "frequency_grid": {"start": 1e-4, "stop": 10, "count": 64, "unit": "thouless"},
      "tolerance": 1e-9
    }
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .optics import GOLD, HBAR_C_EV_NM, HBAR_EV_S, K_B_EV_PER_K, Cavity, DrudeMaterial

__all__ = ["ConfigError", "RunConfig", "load_config", "parse_config"]

PRESETS = {"gold": GOLD}
FREQ_UNITS = {"eV": 1.0, "rad/s": HBAR_EV_S}
LENGTH_UNITS = {"nm": 1.0, "m": 1e9}
TEMP_UNITS = {"K": K_B_EV_PER_K, "natural": 1.0}
GRID_UNITS = ("thouless", "gamma", "eV", "rad/s")
FORMATS = ("csv", "json")

_TOP_KEYS = {"material", "gap", "temperature", "temperatures", "frequency_grid", "k_grid", "cut_grid",
             "sweep", "fit", "tolerance", "output", "threads"}


class ConfigError(ValueError):
    """Malformed or physically invalid configuration (CLI exit code 2)."""


def _reject_unknown(d: dict, allowed, where: str):
    extra = set(d) - set(allowed)
    if extra:
        raise ConfigError(f"unknown key(s) in {where}: {', '.join(sorted(extra))}")


def _positive(x, what):
    try:
        x = float(x)
    except (TypeError, ValueError):
        raise ConfigError(f"{what} must be a number") from None
    if not (math.isfinite(x) and x > 0):
        raise ConfigError(f"{what} must be positive and finite, got {x}")
    return x


def _quantity(node, units: dict, default: str, what: str) -> float:
    if isinstance(node, dict):
        _reject_unknown(node, {"value", "unit"}, what)
        if "value" not in node:
            raise ConfigError(f"{what} needs a 'value'")
        unit = node.get("unit", default)
        value = node["value"]
    else:
        unit, value = default, node
    if unit not in units:
        raise ConfigError(f"{what}: unit {unit!r} not one of {sorted(units)}")
    return _positive(value, what) * units[unit]


def _temperature_list(node, what) -> list[float]:
    if isinstance(node, dict) and ("values" in node or "start" in node):
        _reject_unknown(node, {"values", "unit", "start", "stop", "count", "spacing"}, what)
        unit = node.get("unit", "K")
        if unit not in TEMP_UNITS and unit != "thouless":
            raise ConfigError(f"{what}: unit {unit!r} not one of {sorted(TEMP_UNITS) + ['thouless']}")
        if "values" in node:
            vals = [_positive(v, what) for v in node["values"]]
        else:
            vals = list(_range(node, what))
        return [("thouless", v) if unit == "thouless" else ("eV", v * TEMP_UNITS[unit]) for v in vals]
    if isinstance(node, dict) and node.get("unit") == "thouless":
        return [("thouless", _positive(node.get("value"), what))]
    return [("eV", _quantity(node, TEMP_UNITS, "K", what))]


def _range(node, what):
    start = _positive(node.get("start"), f"{what}.start")
    stop = _positive(node.get("stop"), f"{what}.stop")
    try:
        count = int(node.get("count", 16))
    except (TypeError, ValueError):
        raise ConfigError(f"{what}.count must be an integer") from None
    if count < 1:
        raise ConfigError(f"{what}.count must be at least 1")
    if stop < start:
        raise ConfigError(f"{what}: stop must not be below start")
    spacing = node.get("spacing", "log")
    if spacing == "log":
        return np.geomspace(start, stop, count)
    if spacing == "linear":
        return np.linspace(start, stop, count)
    raise ConfigError(f"{what}.spacing must be 'log' or 'linear'")


@dataclass(frozen=True)
class GridSpec:
    start: float
    stop: float
    count: int
    unit: str
    spacing: str = "log"

    def values(self, cav: Cavity) -> np.ndarray:
        ref = {"thouless": cav.thouless, "gamma": cav.material.gamma, "eV": 1.0, "rad/s": HBAR_EV_S,
               "omega_p/c": 1.0 / cav.material.plasma_wavelength}[self.unit]
        return np.asarray(_range({"start": self.start, "stop": self.stop, "count": self.count,
                                  "spacing": self.spacing}, "grid")) * ref


def _grid(node, what, default: GridSpec, units=GRID_UNITS) -> GridSpec:
    if node is None:
        return default
    if not isinstance(node, dict):
        raise ConfigError(f"{what} must be an object")
    _reject_unknown(node, {"start", "stop", "count", "unit", "spacing"}, what)
    merged = {"start": default.start, "stop": default.stop, "count": default.count,
              "unit": default.unit, "spacing": default.spacing, **node}
    if merged["unit"] not in units:
        raise ConfigError(f"{what}: unit {merged['unit']!r} not one of {list(units)}")
    _range(merged, what)          # validates
    return GridSpec(float(merged["start"]), float(merged["stop"]), int(merged["count"]),
                    merged["unit"], merged["spacing"])


@dataclass(frozen=True)
class RunConfig:
    material: DrudeMaterial = GOLD
    preset: str | None = "gold"
    gap: float = 100.0                   # nm
    temperatures: tuple = (("thouless", 0.1), ("thouless", 0.5), ("thouless", 1.0))
    frequency_grid: GridSpec = GridSpec(1e-4, 10.0, 64, "thouless")
    k_grid: GridSpec = GridSpec(1e-3, 1e2, 64, "omega_p/c")
    cut_grid: GridSpec = GridSpec(1e-4, 0.9999, 64, "gamma", "linear")
    sweep_gaps: tuple = (100.0,)
    sweep_gammas: tuple = ()
    fit_count: int = 10
    tolerance: float = 1e-9
    output_dir: str = "."
    output_format: str | None = None
    threads: int = 1
    provenance: dict = field(default_factory=dict, compare=False)

    @property
    def cavity(self) -> Cavity:
        return Cavity(self.material, self.gap)

    def temperature_values(self, cav: Cavity | None = None) -> list[float]:
        cav = cav or self.cavity
        return [v * cav.thouless if kind == "thouless" else v for kind, v in self.temperatures]


def _material(node) -> tuple[DrudeMaterial, str | None]:
    if node is None:
        return GOLD, "gold"
    if not isinstance(node, dict):
        raise ConfigError("material must be an object")
    _reject_unknown(node, {"preset", "omega_p", "gamma"}, "material")
    preset = node.get("preset")
    if preset is not None and preset not in PRESETS:
        raise ConfigError(f"unknown material preset {preset!r}")
    base = PRESETS.get(preset, GOLD)
    omega_p = _quantity(node["omega_p"], FREQ_UNITS, "eV", "material.omega_p") if "omega_p" in node else base.omega_p
    gamma = _quantity(node["gamma"], FREQ_UNITS, "eV", "material.gamma") if "gamma" in node else base.gamma
    if preset is None and not ("omega_p" in node and "gamma" in node):
        raise ConfigError("material needs a preset or both omega_p and gamma")
    name = preset if ("omega_p" not in node and "gamma" not in node) else None
    try:
        return DrudeMaterial(omega_p, gamma, HBAR_C_EV_NM), name
    except ValueError as exc:
        raise ConfigError(f"invalid material: {exc}") from None


def parse_config(doc: dict) -> RunConfig:
    """Validate a configuration mapping and convert it to internal units."""
    if not isinstance(doc, dict):
        raise ConfigError("configuration must be a JSON object")
    _reject_unknown(doc, _TOP_KEYS, "configuration")
    mat, preset = _material(doc.get("material"))
    gap = _quantity(doc["gap"], LENGTH_UNITS, "nm", "gap") if "gap" in doc else 100.0
    kw = {}
    if "temperature" in doc and "temperatures" in doc:
        raise ConfigError("give either 'temperature' or 'temperatures', not both")
    if "temperature" in doc:
        kw["temperatures"] = tuple(_temperature_list(doc["temperature"], "temperature"))
    if "temperatures" in doc:
        kw["temperatures"] = tuple(_temperature_list(doc["temperatures"], "temperatures"))
    kw["frequency_grid"] = _grid(doc.get("frequency_grid"), "frequency_grid", RunConfig.frequency_grid)
    kw["k_grid"] = _grid(doc.get("k_grid"), "k_grid", RunConfig.k_grid, units=("omega_p/c",))
    kw["cut_grid"] = _grid(doc.get("cut_grid"), "cut_grid", RunConfig.cut_grid, units=("gamma",))
    if kw["cut_grid"].stop >= 1.0:
        raise ConfigError("cut_grid must stay below gamma (stop < 1)")
    if "sweep" in doc:
        sw = doc["sweep"]
        if not isinstance(sw, dict):
            raise ConfigError("sweep must be an object")
        _reject_unknown(sw, {"gaps", "gammas"}, "sweep")
        if "gaps" in sw:
            kw["sweep_gaps"] = tuple(_quantity(g, LENGTH_UNITS, "nm", "sweep.gaps") for g in sw["gaps"])
        if "gammas" in sw:
            kw["sweep_gammas"] = tuple(_quantity(g, FREQ_UNITS, "eV", "sweep.gammas") for g in sw["gammas"])
    if "fit" in doc:
        fit = doc["fit"]
        if not isinstance(fit, dict):
            raise ConfigError("fit must be an object")
        _reject_unknown(fit, {"count"}, "fit")
        kw["fit_count"] = int(_positive(fit.get("count", 10), "fit.count"))
        if kw["fit_count"] < 4:
            raise ConfigError("fit.count must be at least 4")
    if "tolerance" in doc:
        kw["tolerance"] = _positive(doc["tolerance"], "tolerance")
        if kw["tolerance"] >= 1e-2:
            raise ConfigError("tolerance must be below 1e-2")
    if "threads" in doc:
        kw["threads"] = int(_positive(doc["threads"], "threads"))
    if "output" in doc:
        out = doc["output"]
        if not isinstance(out, dict):
            raise ConfigError("output must be an object")
        _reject_unknown(out, {"path", "format"}, "output")
        if "path" in out:
            kw["output_dir"] = str(out["path"])
        if "format" in out:
            if out["format"] not in FORMATS:
                raise ConfigError(f"output.format must be one of {FORMATS}")
            kw["output_format"] = out["format"]
    prov = {"preset": preset, "omega_p_eV": mat.omega_p, "gamma_eV": mat.gamma, "gap_nm": gap,
            "hbar_c_eV_nm": HBAR_C_EV_NM}
    return RunConfig(material=mat, preset=preset, gap=gap, provenance=prov, **kw)


def load_config(path: str | Path | None) -> RunConfig:
    if path is None:
        return parse_config({})
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON in {path}: {exc}") from None
    return parse_config(doc)
