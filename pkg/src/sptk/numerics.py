"""Dense linear-algebra kernels and the trapezoidal LTI integrator.

Everything here works on small dense matrices (a few hundred states at
most), so eigenvalues and solves are computed directly with LAPACK.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.linalg

from .errors import DimensionError, NotHurwitzError, SingularMatrixError

__all__ = [
    "HURWITZ_MARGIN",
    "KRONECKER_MAX_N",
    "LyapunovSolution",
    "Trajectory",
    "integrate_lti",
    "is_hurwitz",
    "n_steps_for",
    "operator_norm",
    "solve_lyapunov",
    "spectral_abscissa",
    "step_matrix",
    "sym_eig_extrema",
]

HURWITZ_MARGIN = 1e-12
KRONECKER_MAX_N = 50


@dataclass(frozen=True)
class Trajectory:
    """Sampled trajectory of a linear flow.

    ``states[k]`` is the state at ``times[k]``. ``functional`` optionally
    holds one scalar per sample (e.g. a Lyapunov functional).
    """

    times: np.ndarray
    states: np.ndarray
    functional: Optional[np.ndarray] = None

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        states = np.asarray(self.states, dtype=float)
        if states.ndim == 1:
            states = states[:, None]
        if times.ndim != 1 or states.ndim != 2:
            raise DimensionError("times must be 1-D and states 2-D")
        if len(times) != len(states):
            raise DimensionError(
                f"{len(times)} time stamps but {len(states)} states")
        if np.any(times < 0) or np.any(np.diff(times) <= 0):
            raise ValueError("times must be nonnegative and strictly increasing")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "states", states)
        if self.functional is not None:
            functional = np.asarray(self.functional, dtype=float)
            if functional.shape != times.shape:
                raise DimensionError("functional needs one value per time stamp")
            object.__setattr__(self, "functional", functional)

    @property
    def dim(self) -> int:
        return self.states.shape[1]

    def __len__(self) -> int:
        return len(self.times)

    def with_functional(self, values) -> "Trajectory":
        return Trajectory(self.times, self.states, np.asarray(values, dtype=float))


@dataclass(frozen=True)
class LyapunovSolution:
    """Solution ``P`` of ``A^T P + P A = -Q`` and its Frobenius residual."""

    P: np.ndarray
    residual_norm: float


def _square(A, name="A") -> np.ndarray:
    A = np.atleast_2d(np.asarray(A, dtype=float))
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise DimensionError(f"{name} must be square, got shape {A.shape}")
    return A


def spectral_abscissa(A) -> float:
    """Largest real part among the eigenvalues of ``A``."""
    A = _square(A)
    try:
        eigvals = np.linalg.eigvals(A)
    except np.linalg.LinAlgError as exc:
        raise ArithmeticError(f"eigenvalue iteration failed: {exc}") from exc
    return float(np.max(eigvals.real))


def is_hurwitz(A, margin: float = HURWITZ_MARGIN) -> bool:
    return spectral_abscissa(A) < -margin


def operator_norm(A) -> float:
    """Induced 2-norm (largest singular value)."""
    A = np.atleast_2d(np.asarray(A, dtype=float))
    if A.size == 0:
        return 0.0
    return float(np.linalg.norm(A, 2))


def sym_eig_extrema(P, tol: float = 1e-10) -> tuple[float, float]:
    """Return ``(smallest, largest)`` eigenvalue of a symmetric matrix."""
    P = _square(P, "P")
    if np.linalg.norm(P - P.T) > tol * (1.0 + np.linalg.norm(P)):
        raise ValueError("matrix is not symmetric")
    eigvals = np.linalg.eigvalsh(0.5 * (P + P.T))
    return float(eigvals[0]), float(eigvals[-1])


def _check_spd(Q, name="Q") -> np.ndarray:
    Q = _square(Q, name)
    lo, _ = sym_eig_extrema(Q)
    if lo <= 0:
        raise ValueError(f"{name} must be positive definite (min eigenvalue {lo:g})")
    return 0.5 * (Q + Q.T)


def _lyap_kronecker(A: np.ndarray, Q: np.ndarray) -> np.ndarray:
    # column-major vec: vec(A^T P) = (I kron A^T) vec P, vec(P A) = (A^T kron I) vec P
    n = A.shape[0]
    eye = np.eye(n)
    K = np.kron(eye, A.T) + np.kron(A.T, eye)
    vec_p = np.linalg.solve(K, -Q.reshape(-1, order="F"))
    return vec_p.reshape((n, n), order="F")


def _lyap_schur(A: np.ndarray, Q: np.ndarray) -> np.ndarray:
    # scipy solves a X + X a^H = q with Bartels-Stewart
    return scipy.linalg.solve_continuous_lyapunov(A.T, -Q)


def solve_lyapunov(A, Q, method: str = "auto") -> LyapunovSolution:
    """Solve the continuous Lyapunov equation ``A^T P + P A = -Q``.

    Parameters
    ----------
    A : (n, n) array_like
        Hurwitz matrix.
    Q : (n, n) array_like
        Symmetric positive-definite right-hand side.
    method : {'auto', 'kronecker', 'schur'}
        ``'auto'`` uses the Kronecker linearization for ``n <= 50`` and the
        Schur (Bartels-Stewart) solver above that.

    Returns
    -------
    LyapunovSolution
        Symmetrized ``P`` together with ``||A^T P + P A + Q||_F``.

    Raises
    ------
    NotHurwitzError
        If ``A`` has an eigenvalue with nonnegative real part.
    SingularMatrixError
        If the linear system is numerically singular.
    """
    A = _square(A)
    Q = _check_spd(Q)
    if A.shape != Q.shape:
        raise DimensionError(f"A is {A.shape} but Q is {Q.shape}")
    if not is_hurwitz(A):
        raise NotHurwitzError(
            "A is not Hurwitz; no positive-definite Lyapunov solution exists")
    if method == "auto":
        method = "kronecker" if A.shape[0] <= KRONECKER_MAX_N else "schur"
    try:
        if method == "kronecker":
            P = _lyap_kronecker(A, Q)
        elif method == "schur":
            P = _lyap_schur(A, Q)
        else:
            raise ValueError(f"unknown method {method!r}")
    except (np.linalg.LinAlgError, scipy.linalg.LinAlgError) as exc:
        raise SingularMatrixError(f"Lyapunov solve failed: {exc}") from exc
    if not np.all(np.isfinite(P)):
        raise SingularMatrixError("Lyapunov solve produced non-finite entries")
    P = 0.5 * (P + P.T)
    residual = np.linalg.norm(A.T @ P + P @ A + Q, "fro")
    return LyapunovSolution(P=P, residual_norm=float(residual))


def step_matrix(A, dt: float) -> np.ndarray:
    """One-step trapezoidal propagator ``(I - dt/2 A)^{-1} (I + dt/2 A)``."""
    A = _square(A)
    if dt <= 0:
        raise ValueError("dt must be positive")
    n = A.shape[0]
    lhs = np.eye(n) - 0.5 * dt * A
    if np.linalg.cond(lhs) > 1e14:
        raise SingularMatrixError(
            "trapezoidal step matrix I - (dt/2)A is singular: dt*lambda = 2 "
            "for some eigenvalue lambda of A; change dt")
    return np.linalg.solve(lhs, np.eye(n) + 0.5 * dt * A)


def _march(phi: np.ndarray, x0: np.ndarray, n_steps: int) -> np.ndarray:
    states = np.empty((n_steps + 1, x0.size))
    states[0] = x0
    x = x0
    for k in range(n_steps):
        x = phi @ x
        states[k + 1] = x
    return states


def n_steps_for(t_final: float, dt: float) -> int:
    """Number of uniform steps of size at most ``dt`` covering ``[0, t_final]``."""
    ratio = t_final / dt
    n = int(np.ceil(ratio - 1e-9 * max(1.0, ratio)))
    return max(n, 1)


def integrate_lti(A, x0, t_final: float, dt: float,
                  n_steps: Optional[int] = None) -> Trajectory:
    """Integrate ``x' = A x`` with the trapezoidal rule on a uniform grid.

    The grid has ``n_steps`` steps (by default the smallest count whose
    step does not exceed ``dt``) ending exactly at ``t_final``. The
    scheme is A-stable, so stiff blocks never cause blow-up, but the
    step still has to resolve fast transients for accuracy.
    """
    A = _square(A)
    x0 = np.atleast_1d(np.asarray(x0, dtype=float))
    if x0.shape != (A.shape[0],):
        raise DimensionError(f"x0 has shape {x0.shape}, expected ({A.shape[0]},)")
    if not (t_final > 0 and dt > 0):
        raise ValueError("t_final and dt must be positive")
    if n_steps is None:
        if dt > t_final * (1 + 1e-12):
            raise ValueError("dt must not exceed t_final")
        n_steps = n_steps_for(t_final, dt)
    h = t_final / n_steps
    states = _march(step_matrix(A, h), x0, n_steps)
    times = np.linspace(0.0, t_final, n_steps + 1)
    return Trajectory(times, states)
