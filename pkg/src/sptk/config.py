"""JSON configuration files for the command line.

Example::

    {
      "system": {"builder": "heat1d", "modes": 32, "diffusion": 1.0,
                 "input_profile": "constant", "output_weight": "constant",
                 "A2": [[-2.0]], "B2": [[1.0]], "C1": [[1.0]]},
      "certificate": {"Q1": [[...]], "Q2": [[0.5]]},
      "simulation": {"eps": 0.25, "t_final": 20.0, "dt": 0.001,
                     "z0": [...], "w0": [1.0]},
      "sweep": {"eps_values": [0.1, 0.05, 0.025], "mode": "tikhonov_error",
                "ic_scale": 1.0}
    }

Only ``system`` is mandatory. Every matrix is a row-major nested list.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Optional

import numpy as np

from .errors import ConfigError, DimensionError
from .model import PROFILES, CoupledSystem, build_from_matrices, build_heat1d, build_scalar_exemplar
from .tikhonov import MODES

__all__ = ["Config", "SimulationSpec", "SweepSpec", "load_config", "parse_config"]


@dataclass(frozen=True)
class SimulationSpec:
    eps: float
    t_final: Optional[float] = None
    dt: Optional[float] = None
    z0: Optional[np.ndarray] = None
    w0: Optional[np.ndarray] = None


@dataclass(frozen=True)
class SweepSpec:
    eps_values: tuple
    mode: str
    ic_scale: float = 1.0
    t_final: Optional[float] = None


@dataclass(frozen=True)
class Config:
    system: CoupledSystem
    Q1: Optional[np.ndarray] = None
    Q2: Optional[np.ndarray] = None
    simulation: Optional[SimulationSpec] = None
    sweep: Optional[SweepSpec] = None


def _real(value: Any, where: str, positive: bool = False) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{where} must be a real number, got {value!r}")
    value = float(value)
    if not math.isfinite(value):
        raise ConfigError(f"{where} must be finite")
    if positive and value <= 0:
        raise ConfigError(f"{where} must be positive, got {value:g}")
    return value


def _matrix(value: Any, where: str) -> np.ndarray:
    if (not isinstance(value, list) or not value
            or not all(isinstance(row, list) and row for row in value)):
        raise ConfigError(f"{where} must be a non-empty list of rows")
    width = len(value[0])
    if any(len(row) != width for row in value):
        raise ConfigError(f"{where} has rows of unequal length")
    return np.array([[_real(x, where) for x in row] for row in value])


def _vector(value: Any, where: str, n: int) -> np.ndarray:
    if not isinstance(value, list):
        raise ConfigError(f"{where} must be a list of numbers")
    vec = np.array([_real(x, where) for x in value])
    if vec.shape != (n,):
        raise ConfigError(f"{where} has length {len(vec)}, expected {n}")
    return vec


def _get(spec: dict, key: str, default=None):
    """``spec[key]``, treating an explicit JSON null like an omitted key."""
    value = spec.get(key)
    return default if value is None else value


def _section(raw: dict, key: str) -> Optional[dict]:
    value = raw.get(key)
    if value is None:
        return None
    if not isinstance(value, dict):
        raise ConfigError(f"'{key}' must be an object")
    return value


def _profile(value: Any, where: str):
    if isinstance(value, list):
        return [_profile(v, where) for v in value]
    if value not in PROFILES:
        raise ConfigError(f"{where} must be one of {sorted(PROFILES)}, got {value!r}")
    return value


def _build_system(spec: dict) -> CoupledSystem:
    builder = spec.get("builder")
    try:
        if builder == "scalar":
            return build_scalar_exemplar()
        if builder == "heat1d":
            modes = spec.get("modes")
            if isinstance(modes, bool) or not isinstance(modes, int) or modes < 1:
                raise ConfigError(f"system.modes must be a positive integer, got {modes!r}")
            return build_heat1d(
                modes,
                _real(_get(spec, "diffusion", 1.0), "system.diffusion", positive=True),
                _profile(_get(spec, "input_profile", "constant"), "system.input_profile"),
                _profile(_get(spec, "output_weight", "constant"), "system.output_weight"),
                _matrix(_get(spec, "A2", [[-2.0]]), "system.A2"),
                _matrix(_get(spec, "B2", [[1.0]]), "system.B2"),
                _matrix(_get(spec, "C1", [[1.0]]), "system.C1"),
            )
        if builder == "explicit":
            names = ("A1", "B1", "C1", "A2", "B2", "C2")
            missing = [n for n in names if n not in spec]
            if missing:
                raise ConfigError(f"explicit system is missing {', '.join(missing)}")
            mats = {n: _matrix(spec[n], f"system.{n}") for n in names}
            return build_from_matrices(**mats, labels={"builder": "explicit"})
    except DimensionError as exc:
        raise ConfigError(f"system: {exc}") from exc
    raise ConfigError(
        f"system.builder must be 'scalar', 'heat1d' or 'explicit', got {builder!r}")


def _square_of(value, where: str, n: int) -> np.ndarray:
    mat = _matrix(value, where)
    if mat.shape != (n, n):
        raise ConfigError(f"{where} has shape {mat.shape}, expected ({n}, {n})")
    return mat


def parse_config(raw: Any) -> Config:
    """Validate a decoded JSON document and build the system it describes.

    Raises :class:`ConfigError` for malformed input and
    :class:`~sptk.errors.NotHurwitzError` when ``A1`` is not Hurwitz.
    """
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    system_spec = _section(raw, "system")
    if system_spec is None:
        raise ConfigError("config needs a 'system' section")
    system = _build_system(system_spec)

    Q1 = Q2 = None
    cert = _section(raw, "certificate")
    if cert is not None:
        if _get(cert, "Q1") is not None:
            Q1 = _square_of(cert["Q1"], "certificate.Q1", system.n_z)
        if _get(cert, "Q2") is not None:
            Q2 = _square_of(cert["Q2"], "certificate.Q2", system.n_w)

    simulation = None
    sim = _section(raw, "simulation")
    if sim is not None:
        if "eps" not in sim:
            raise ConfigError("simulation.eps is required")
        t_final = sim.get("t_final")
        dt = sim.get("dt")
        simulation = SimulationSpec(
            eps=_real(sim["eps"], "simulation.eps", positive=True),
            t_final=None if t_final is None else _real(t_final, "simulation.t_final", positive=True),
            dt=None if dt is None else _real(dt, "simulation.dt", positive=True),
            z0=None if _get(sim, "z0") is None else _vector(sim["z0"], "simulation.z0", system.n_z),
            w0=None if _get(sim, "w0") is None else _vector(sim["w0"], "simulation.w0", system.n_w),
        )
        if (simulation.t_final is not None and simulation.dt is not None
                and simulation.dt > simulation.t_final):
            raise ConfigError("simulation.dt must not exceed simulation.t_final")

    sweep = None
    sw = _section(raw, "sweep")
    if sw is not None:
        values = sw.get("eps_values")
        if not isinstance(values, list):
            raise ConfigError("sweep.eps_values must be a list")
        eps_values = tuple(_real(v, "sweep.eps_values", positive=True) for v in values)
        if len(eps_values) < 3:
            raise ConfigError("sweep.eps_values needs at least 3 values to fit a slope")
        if len(set(eps_values)) != len(eps_values):
            raise ConfigError("sweep.eps_values must be distinct")
        mode = _get(sw, "mode", "tikhonov_error")
        if mode not in MODES:
            raise ConfigError(f"sweep.mode must be one of {MODES}, got {mode!r}")
        t_final = sw.get("t_final")
        sweep = SweepSpec(
            eps_values=eps_values,
            mode=mode,
            ic_scale=_real(_get(sw, "ic_scale", 1.0), "sweep.ic_scale", positive=True),
            t_final=None if t_final is None else _real(t_final, "sweep.t_final", positive=True),
        )

    return Config(system=system, Q1=Q1, Q2=Q2, simulation=simulation, sweep=sweep)


def load_config(path) -> Config:
    """Read and validate a JSON config file."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path} is not valid JSON: {exc}") from exc
    return parse_config(raw)
