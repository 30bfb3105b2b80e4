"""Error variables, epsilon sweeps and the perturbed growth bound.

The approximation errors are

    z_err(t) = z(t) + A1^{-1} B1 C1 w(t) - zbar(t / eps)
    w_err(t) = w(t) - wbar(t)

where ``wbar`` follows the reduced-order flow from ``w0`` and ``zbar`` the
boundary-layer flow from ``z0 + A1^{-1} B1 C1 w0``. A sweep runs one
simulation per ``eps`` and fits the log-log slope of a sup-in-time norm.
"""
from __future__ import annotations

import csv
import io
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, NamedTuple, Optional, Sequence

import numpy as np

from .certificate import Certificate
from .decomposition import (
    Decomposition,
    boundary_layer_trajectory,
    reduced_trajectory,
)
from .errors import DimensionError, SptkError
from .model import CoupledSystem, full_generator
from .numerics import Trajectory, integrate_lti, n_steps_for, operator_norm, spectral_abscissa

__all__ = [
    "GrowthBound",
    "MODES",
    "SweepResult",
    "default_dt",
    "default_horizon",
    "error_trajectories",
    "epsilon_sweep",
    "fit_loglog",
    "fixed_ic",
    "perturbed_growth_bound",
    "scaled_ic",
    "simulate_full",
]

logger = logging.getLogger(__name__)

MODES = ("state_scaling", "tikhonov_error")
METRIC_FLOOR = 1e-14
HORIZON_TIME_CONSTANTS = 10.0

ICRule = Callable[[float], tuple]


def default_horizon(dec: Decomposition) -> float:
    """Ten slow time constants, ``10 / |Re lambda_max(A2_tilde)|``."""
    rate = abs(spectral_abscissa(dec.A2_tilde))
    if rate == 0:
        raise ValueError("A2_tilde has an eigenvalue on the imaginary axis; "
                         "give t_final explicitly")
    return HORIZON_TIME_CONSTANTS / rate


def default_dt(eps: float, t_final: float) -> float:
    """``min(eps / 20, t_final / 2000)``: at least 20 samples per layer."""
    return min(eps / 20.0, t_final / 2000.0)


def _split(sys: CoupledSystem, x0) -> tuple[np.ndarray, np.ndarray]:
    return x0[:sys.n_z], x0[sys.n_z:]


def _stack_ic(sys: CoupledSystem, z0, w0) -> np.ndarray:
    z0 = np.atleast_1d(np.asarray(z0, dtype=float))
    w0 = np.atleast_1d(np.asarray(w0, dtype=float))
    if z0.shape != (sys.n_z,) or w0.shape != (sys.n_w,):
        raise DimensionError(
            f"initial states have shapes {z0.shape}, {w0.shape}; expected "
            f"({sys.n_z},), ({sys.n_w},)")
    return np.concatenate([z0, w0])


def simulate_full(sys: CoupledSystem, eps: float, z0, w0, t_final: float,
                  dt: Optional[float] = None, n_steps: Optional[int] = None) -> Trajectory:
    """Trajectory of the full coupled system; states are ``[z, w]`` rows."""
    x0 = _stack_ic(sys, z0, w0)
    if dt is None:
        dt = default_dt(eps, t_final)
    return integrate_lti(full_generator(sys, eps), x0, t_final, dt, n_steps=n_steps)


def error_trajectories(sys: CoupledSystem, dec: Decomposition, eps: float, z0, w0,
                       t_final: float, dt: Optional[float] = None
                       ) -> tuple[Trajectory, Trajectory]:
    """Simulate full, reduced and boundary-layer flows and form the errors.

    All three flows share one grid: the boundary layer is stepped in the
    fast time with ``dtau = dt / eps`` for the same number of steps.
    """
    if not eps > 0:
        raise ValueError(f"eps must be positive, got {eps!r}")
    if dt is None:
        dt = default_dt(eps, t_final)
    if dt > eps / 20.0 * (1 + 1e-12):
        logger.warning("dt = %g does not resolve the boundary layer (eps/20 = %g)",
                       dt, eps / 20.0)
    n = n_steps_for(t_final, dt)
    full = simulate_full(sys, eps, z0, w0, t_final, n_steps=n)
    z0, w0 = _split(sys, full.states[0])
    reduced = reduced_trajectory(dec, w0, t_final, dt, n_steps=n)
    layer = boundary_layer_trajectory(sys, dec, z0, w0, t_final / eps, dt / eps,
                                      n_steps=n)
    if (len(layer) != len(full) or len(reduced) != len(full)
            or not np.allclose(layer.times * eps, full.times, rtol=1e-10, atol=1e-12)):
        raise SptkError("internal error: full, reduced and boundary-layer grids differ")
    z, w = full.states[:, :sys.n_z], full.states[:, sys.n_z:]
    z_err = z + w @ dec.inv_a1_b1_c1.T - layer.states
    w_err = w - reduced.states
    return Trajectory(full.times, z_err), Trajectory(full.times, w_err)


def scaled_ic(sys: CoupledSystem, scale: float = 1.0, z_dir=None, w_dir=None) -> ICRule:
    """Initial states proportional to ``eps``: ``eps * scale * (z_dir, w_dir)``.

    Directions default to all-ones vectors.
    """
    z_dir = np.ones(sys.n_z) if z_dir is None else np.asarray(z_dir, dtype=float)
    w_dir = np.ones(sys.n_w) if w_dir is None else np.asarray(w_dir, dtype=float)
    return lambda eps: (eps * scale * z_dir, eps * scale * w_dir)


def fixed_ic(sys: CoupledSystem, scale: float = 1.0, z_dir=None, w_dir=None) -> ICRule:
    """Initial states independent of ``eps``: ``scale * (z_dir, w_dir)``.

    The derived error-variable initial values are then exactly zero.
    """
    z_dir = np.ones(sys.n_z) if z_dir is None else np.asarray(z_dir, dtype=float)
    w_dir = np.ones(sys.n_w) if w_dir is None else np.asarray(w_dir, dtype=float)
    return lambda eps: (scale * z_dir, scale * w_dir)


def fit_loglog(eps_values, metrics) -> tuple[float, float]:
    """Least-squares ``(slope, intercept)`` of ``log metric`` against ``log eps``."""
    x = np.log(np.asarray(eps_values, dtype=float))
    y = np.log(np.maximum(np.asarray(metrics, dtype=float), METRIC_FLOOR))
    slope, intercept = np.polyfit(x, y, 1)
    return float(slope), float(intercept)


@dataclass(frozen=True)
class SweepResult:
    eps_values: np.ndarray
    metrics: np.ndarray
    slope: float
    intercept: float
    mode: str

    def passed(self, low: float = 0.75, high: float = 1.25) -> bool:
        return bool(low <= self.slope <= high)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["eps", "metric"])
        for eps, metric in zip(self.eps_values, self.metrics):
            writer.writerow([format(eps, ".17g"), format(metric, ".17g")])
        return buf.getvalue()

    def summary(self) -> dict:
        return {"slope": self.slope, "intercept": self.intercept,
                "mode": self.mode, "pass": self.passed()}


def _sweep_point(sys, dec, eps, ic_rule, t_final, mode) -> float:
    z0, w0 = ic_rule(eps)
    if mode == "state_scaling":
        traj = simulate_full(sys, eps, z0, w0, t_final)
        z, w = traj.states[:, :sys.n_z], traj.states[:, sys.n_z:]
        return float(np.max(np.linalg.norm(z, axis=1) + np.linalg.norm(w, axis=1)))
    z_err, w_err = error_trajectories(sys, dec, eps, z0, w0, t_final)
    return float(np.max(np.linalg.norm(z_err.states, axis=1)
                        + np.linalg.norm(w_err.states, axis=1)))


def epsilon_sweep(sys: CoupledSystem, dec: Decomposition, cert: Certificate,
                  eps_values: Sequence[float], ic_rule: ICRule,
                  t_final: Optional[float] = None, mode: str = "tikhonov_error",
                  max_workers: int = 1) -> SweepResult:
    """Measure how a sup-in-time norm scales with ``eps``.

    Parameters
    ----------
    eps_values : sequence of float
        At least three distinct values, all below ``cert.eps_star``. They
        are processed in decreasing order.
    ic_rule : callable
        Maps ``eps`` to the physical initial states ``(z0, w0)``; see
        :func:`scaled_ic` and :func:`fixed_ic`.
    t_final : float, optional
        Horizon; defaults to :func:`default_horizon`.
    mode : {'state_scaling', 'tikhonov_error'}
        ``state_scaling`` records ``sup_t |z| + |w|`` of the full system,
        ``tikhonov_error`` records ``sup_t |z_err| + |w_err|``.
    max_workers : int
        Thread count; results keep the order of ``eps_values``.
    """
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    eps = np.asarray(sorted((float(e) for e in eps_values), reverse=True))
    if len(eps) < 3:
        raise ValueError("a sweep needs at least 3 eps values to fit a slope")
    if np.any(np.diff(eps) >= 0):
        raise ValueError("eps values must be distinct")
    if np.any(eps <= 0):
        raise ValueError("eps values must be positive")
    if np.any(eps >= cert.eps_star):
        raise ValueError(
            f"every eps must lie below eps_star = {cert.eps_star:.6g}")
    if t_final is None:
        t_final = default_horizon(dec)

    def point(e):
        return _sweep_point(sys, dec, e, ic_rule, t_final, mode)

    workers = max(1, int(max_workers))
    if workers == 1:
        metrics = [point(e) for e in eps]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            metrics = list(pool.map(point, eps))
    slope, intercept = fit_loglog(eps, metrics)
    return SweepResult(eps, np.asarray(metrics), slope, intercept, mode)


class GrowthBound(NamedTuple):
    alpha: float
    eps_max: float
    K1: float
    omega1: float


def perturbed_growth_bound(sys: CoupledSystem, dec: Decomposition,
                           eps: float) -> GrowthBound:
    """Growth-rate bound for ``A1 + eps A1^{-1} B1 C1 B2 C2``.

    ``alpha = -omega1 + K1 eps |A1^{-1} B1 C1 B2 C2|`` with ``omega1`` the
    decay rate of ``A1``. ``K1`` is 1 for normal ``A1`` and the condition
    number of its eigenvector matrix otherwise. ``eps_max`` is the value
    at which ``alpha`` reaches zero (``inf`` when the perturbation is 0).
    """
    if eps < 0:
        raise ValueError(f"eps must be nonnegative, got {eps!r}")
    A1 = sys.A1
    omega1 = -spectral_abscissa(A1)
    commutator = operator_norm(A1 @ A1.T - A1.T @ A1)
    if commutator <= 1e-10 * max(1.0, operator_norm(A1) ** 2):
        K1 = 1.0
    else:
        _, vecs = np.linalg.eig(A1)
        K1 = float(np.linalg.cond(vecs))
    pert = operator_norm(dec.inv_a1_b1_c1 @ sys.B2 @ sys.C2)
    alpha = -omega1 + K1 * eps * pert
    if pert == 0:
        logger.info("perturbation A1^-1 B1 C1 B2 C2 vanishes: eps_max is infinite")
        eps_max = math.inf
    else:
        eps_max = omega1 / (K1 * pert)
    return GrowthBound(float(alpha), float(eps_max), K1, float(omega1))
