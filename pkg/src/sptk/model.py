"""Coupled fast/slow linear systems.

The system is

    eps * z' = A1 z + B1 C1 w
          w' = A2 w + B2 C2 z

with ``z`` the fast state (dimension ``n_z``) and ``w`` the slow state
(dimension ``n_w``). Two ready-made instances are provided: a 1x1 scalar
system and a spectral truncation of the 1-D heat equation on ``(0, 1)``
with Dirichlet boundary conditions.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence, Union

import numpy as np
from scipy.integrate import simpson

from .errors import DimensionError, NotHurwitzError
from .numerics import HURWITZ_MARGIN, Trajectory, spectral_abscissa

__all__ = [
    "CoupledSystem",
    "Trajectory",
    "PROFILES",
    "QUADRATURE_PANELS",
    "build_from_matrices",
    "build_heat1d",
    "build_scalar_exemplar",
    "full_generator",
    "profile_function",
    "sine_projection",
]

QUADRATURE_PANELS = 1024

ProfileSpec = Union[str, Callable[[np.ndarray], np.ndarray]]

PROFILES: dict[str, Callable[[np.ndarray], np.ndarray]] = {
    "constant": lambda x: np.ones_like(x),
    "bump": lambda x: np.exp(-100.0 * (x - 0.5) ** 2),
}


def _matrix(value, name: str) -> np.ndarray:
    arr = np.asarray(value, dtype=float)
    if arr.ndim == 0:
        arr = arr.reshape(1, 1)
    if arr.ndim != 2:
        raise DimensionError(f"{name} must be a matrix, got {arr.ndim}-D input")
    if arr.size == 0:
        raise DimensionError(f"{name} is empty")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} has non-finite entries")
    return arr


@dataclass(frozen=True)
class CoupledSystem:
    """The six matrices of a coupled fast/slow system.

    Construct through :func:`build_from_matrices`, which validates shapes
    and rejects a non-Hurwitz ``A1``.
    """

    A1: np.ndarray
    B1: np.ndarray
    C1: np.ndarray
    A2: np.ndarray
    B2: np.ndarray
    C2: np.ndarray
    labels: dict = field(default_factory=dict)
    a1_abscissa: float = float("nan")

    @property
    def n_z(self) -> int:
        return self.A1.shape[0]

    @property
    def n_w(self) -> int:
        return self.A2.shape[0]

    @property
    def m1(self) -> int:
        return self.B1.shape[1]

    @property
    def m2(self) -> int:
        return self.B2.shape[1]

    def replace(self, **changes) -> "CoupledSystem":
        """Return a validated copy with some matrices swapped out."""
        mats = {k: getattr(self, k) for k in ("A1", "B1", "C1", "A2", "B2", "C2")}
        labels = changes.pop("labels", self.labels)
        mats.update(changes)
        return build_from_matrices(**mats, labels=labels)


def build_from_matrices(A1, B1, C1, A2, B2, C2, labels=None) -> CoupledSystem:
    """Validate the six matrices and wrap them in a :class:`CoupledSystem`.

    Raises
    ------
    DimensionError
        If any shape is inconsistent.
    NotHurwitzError
        If ``A1`` has spectral abscissa ``>= -1e-12``.
    """
    A1, B1, C1 = _matrix(A1, "A1"), _matrix(B1, "B1"), _matrix(C1, "C1")
    A2, B2, C2 = _matrix(A2, "A2"), _matrix(B2, "B2"), _matrix(C2, "C2")
    n_z, n_w = A1.shape[0], A2.shape[0]
    if A1.shape != (n_z, n_z):
        raise DimensionError(f"A1 must be square, got {A1.shape}")
    if A2.shape != (n_w, n_w):
        raise DimensionError(f"A2 must be square, got {A2.shape}")
    m1, m2 = B1.shape[1], B2.shape[1]
    expected = {
        "B1": (B1, (n_z, m1)),
        "C1": (C1, (m1, n_w)),
        "B2": (B2, (n_w, m2)),
        "C2": (C2, (m2, n_z)),
    }
    for name, (mat, shape) in expected.items():
        if mat.shape != shape:
            raise DimensionError(f"{name} has shape {mat.shape}, expected {shape}")
    abscissa = spectral_abscissa(A1)
    if abscissa >= -HURWITZ_MARGIN:
        raise NotHurwitzError(
            f"A1 not Hurwitz (spectral abscissa {abscissa:.6g}); the fast "
            "subsystem must be exponentially stable and A1 invertible")
    return CoupledSystem(A1, B1, C1, A2, B2, C2,
                         labels=dict(labels or {}), a1_abscissa=abscissa)


def build_scalar_exemplar() -> CoupledSystem:
    """The 1x1 test system ``A1=-1, B1=C1=1, A2=-2, B2=C2=1``."""
    return build_from_matrices([[-1.0]], [[1.0]], [[1.0]],
                               [[-2.0]], [[1.0]], [[1.0]],
                               labels={"builder": "scalar"})


def profile_function(spec: ProfileSpec) -> Callable[[np.ndarray], np.ndarray]:
    if callable(spec):
        return spec
    try:
        return PROFILES[spec]
    except (KeyError, TypeError):
        raise ValueError(
            f"unknown profile {spec!r}; expected one of {sorted(PROFILES)} "
            "or a callable") from None


def sine_projection(profile: ProfileSpec, modes: int,
                    panels: int = QUADRATURE_PANELS) -> np.ndarray:
    """Coefficients ``<f, sqrt(2) sin(k pi x)>`` for ``k = 1..modes``.

    Uses composite Simpson quadrature on ``panels`` uniform panels.
    """
    f = profile_function(profile)
    x = np.linspace(0.0, 1.0, panels + 1)
    values = np.asarray(f(x), dtype=float)
    if values.shape != x.shape:
        values = np.broadcast_to(values, x.shape)
    if not np.all(np.isfinite(values)):
        raise ValueError("profile is not integrable on (0, 1): non-finite samples")
    k = np.arange(1, modes + 1)[:, None]
    basis = np.sqrt(2.0) * np.sin(k * np.pi * x[None, :])
    return simpson(basis * values[None, :], x=x, axis=1)


def _profiles(spec) -> list:
    if isinstance(spec, (list, tuple)):
        return list(spec)
    return [spec]


def build_heat1d(modes: int, diffusion: float,
                 input_profile: Union[ProfileSpec, Sequence[ProfileSpec]],
                 output_weight: Union[ProfileSpec, Sequence[ProfileSpec]],
                 A2, B2, C1, panels: int = QUADRATURE_PANELS) -> CoupledSystem:
    """Galerkin truncation of a heat equation driven by a slow ODE.

    The fast state holds the first ``modes`` coefficients of the
    temperature in the orthonormal basis ``sqrt(2) sin(k pi x)``, so
    ``A1 = diag(-diffusion * k^2 pi^2)``. Column ``j`` of ``B1`` projects
    the ``j``-th input profile; row ``i`` of ``C2`` projects the ``i``-th
    output weight. A single profile may be given instead of a list.
    """
    if isinstance(modes, bool) or not isinstance(modes, (int, np.integer)) or modes < 1:
        raise ValueError(f"modes must be a positive integer, got {modes!r}")
    if not diffusion > 0:
        raise ValueError(f"diffusion must be positive, got {diffusion!r}")
    k = np.arange(1, modes + 1)
    A1 = np.diag(-float(diffusion) * (k * np.pi) ** 2)
    B1 = np.column_stack([sine_projection(p, modes, panels)
                          for p in _profiles(input_profile)])
    C2 = np.vstack([sine_projection(c, modes, panels)
                    for c in _profiles(output_weight)])
    return build_from_matrices(A1, B1, C1, A2, B2, C2, labels={
        "builder": "heat1d", "modes": int(modes), "diffusion": float(diffusion)})


def full_generator(sys: CoupledSystem, eps: float) -> np.ndarray:
    """Closed-loop generator ``[[A1/eps, B1 C1/eps], [B2 C2, A2]]``."""
    if not eps > 0:
        raise ValueError(f"eps must be positive, got {eps!r}")
    top = np.hstack([sys.A1 / eps, sys.B1 @ sys.C1 / eps])
    bottom = np.hstack([sys.B2 @ sys.C2, sys.A2])
    return np.vstack([top, bottom])
