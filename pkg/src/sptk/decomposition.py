"""Reduced-order and boundary-layer decomposition.

Setting ``eps = 0`` in the fast equation gives the quasi-steady state
``z = -A1^{-1} B1 C1 w``. Substituting it into the slow equation yields
the reduced-order generator

    A2_tilde = A2 - B2 C2 A1^{-1} B1 C1 = A2 - M B1 C1,   M = B2 C2 A1^{-1}.

In the stretched time ``tau = t / eps`` with ``w`` frozen, the deviation
from the quasi-steady state follows the boundary-layer flow
``dz/dtau = A1 z``. Neither object depends on ``eps``.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import DimensionError, SingularMatrixError
from .model import CoupledSystem
from .numerics import Trajectory, integrate_lti, is_hurwitz

__all__ = [
    "COND_LIMIT",
    "Decomposition",
    "boundary_layer_initial",
    "boundary_layer_trajectory",
    "decompose",
    "reduced_trajectory",
]

logger = logging.getLogger(__name__)

COND_LIMIT = 1e12


@dataclass(frozen=True)
class Decomposition:
    """``M`` (n_w x n_z), ``A2_tilde`` (n_w x n_w) and the quasi-steady map.

    ``quasi_steady_map`` (n_z x n_w) equals ``-A1^{-1} B1 C1`` and sends a
    slow state to its fast equilibrium.
    """

    M: np.ndarray
    A2_tilde: np.ndarray
    quasi_steady_map: np.ndarray
    coupling: np.ndarray  # C2 A1^{-1} B1, shape (m2, m1)

    @property
    def inv_a1_b1_c1(self) -> np.ndarray:
        return -self.quasi_steady_map


def decompose(sys: CoupledSystem) -> Decomposition:
    """Compute ``M``, ``A2_tilde`` and the quasi-steady map of ``sys``.

    ``A1^{-1}`` is never formed; one LU factorization is reused for every
    solve.
    """
    cond = np.linalg.cond(sys.A1)
    if not np.isfinite(cond) or cond > COND_LIMIT:
        raise SingularMatrixError(
            f"A1 is singular or nearly so (condition number {cond:.3g})")
    lu = scipy.linalg.lu_factor(sys.A1)
    inv_a1_b1 = scipy.linalg.lu_solve(lu, sys.B1)
    # M = B2 C2 A1^{-1}  <=>  A1^T M^T = (B2 C2)^T
    M = scipy.linalg.lu_solve(lu, (sys.B2 @ sys.C2).T, trans=1).T
    quasi_steady_map = -inv_a1_b1 @ sys.C1
    A2_tilde = sys.A2 - M @ sys.B1 @ sys.C1
    coupling = sys.C2 @ inv_a1_b1
    return Decomposition(M=M, A2_tilde=A2_tilde,
                         quasi_steady_map=quasi_steady_map, coupling=coupling)


def _vector(x, n: int, name: str) -> np.ndarray:
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if x.shape != (n,):
        raise DimensionError(f"{name} has shape {x.shape}, expected ({n},)")
    return x


def reduced_trajectory(dec: Decomposition, w0, t_final: float, dt: float,
                       n_steps=None) -> Trajectory:
    """Flow of the reduced-order system ``w' = A2_tilde w`` from ``w0``."""
    w0 = _vector(w0, dec.A2_tilde.shape[0], "w0")
    if not is_hurwitz(dec.A2_tilde):
        logger.warning("A2_tilde is not Hurwitz: the reduced-order system "
                       "is not exponentially stable")
    return integrate_lti(dec.A2_tilde, w0, t_final, dt, n_steps=n_steps)


def boundary_layer_initial(sys: CoupledSystem, dec: Decomposition, z0, w0) -> np.ndarray:
    """``z0 + A1^{-1} B1 C1 w0``, the offset from the quasi-steady state."""
    z0 = _vector(z0, sys.n_z, "z0")
    w0 = _vector(w0, sys.n_w, "w0")
    return z0 - dec.quasi_steady_map @ w0


def boundary_layer_trajectory(sys: CoupledSystem, dec: Decomposition, z0, w0,
                              tau_final: float, dtau: float,
                              n_steps=None) -> Trajectory:
    """Boundary-layer flow ``dz/dtau = A1 z`` in the fast time ``tau``."""
    zbar0 = boundary_layer_initial(sys, dec, z0, w0)
    return integrate_lti(sys.A1, zbar0, tau_final, dtau, n_steps=n_steps)
