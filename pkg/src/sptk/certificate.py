"""Composite Lyapunov certificate for the coupled system.

The fast subsystem gets a quadratic ISS Lyapunov function
``V(z) = z^T P1 z`` with

    a1 |z|^2 <= V(z) <= a2 |z|^2
    2 <P1 (A1 z + B1 v), z> <= -a3 |z|^2 + a4 |v|^2,

and the reduced-order generator gets ``A2_tilde^T P2 + P2 A2_tilde = -Q2``.
They are combined into the forwarding functional

    W(z, w) = eps V(z) + (w - eps M z)^T P2 (w - eps M z),

which decreases along the full dynamics for every ``eps <= eps_star``,
``eps_star^2 = mu beta / (2 |P2 A2_tilde|^2)``, ``mu = a3 / (2 |M|^2)``,
provided ``beta = lambda_min(Q2) > 2 a4 |C1|^2``. All norms are induced
2-norms.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .decomposition import Decomposition
from .errors import DimensionError, NotHurwitzError, ThresholdError
from .model import CoupledSystem
from .numerics import (
    _check_spd,
    is_hurwitz,
    operator_norm,
    solve_lyapunov,
    sym_eig_extrema,
)

__all__ = [
    "Certificate",
    "FastCertificate",
    "SlowCertificate",
    "default_Q2",
    "dissipation_margin",
    "epsilon_star",
    "forwarding_functional",
    "forwarding_matrix",
    "sandwich_bounds",
    "synthesize_certificate",
    "synthesize_fast_certificate",
    "synthesize_slow_certificate",
]

logger = logging.getLogger(__name__)


class FastCertificate(NamedTuple):
    P1: np.ndarray
    a1: float
    a2: float
    a3: float
    a4: float


class SlowCertificate(NamedTuple):
    P2: np.ndarray
    beta: float
    lam: float


@dataclass(frozen=True)
class Certificate:
    """All constants of the composite certificate.

    ``lam`` is the smallest eigenvalue of ``P2`` and ``beta`` the smallest
    eigenvalue of ``Q2``.
    """

    P1: np.ndarray
    Q1: np.ndarray
    a1: float
    a2: float
    a3: float
    a4: float
    P2: np.ndarray
    Q2: np.ndarray
    beta: float
    lam: float
    mu: float
    eps_star: float
    M_norm: float
    C1_norm: float
    P2_A2_tilde_norm: float

    @property
    def P2_norm(self) -> float:
        return operator_norm(self.P2)

    @property
    def beta_threshold(self) -> float:
        return 2.0 * self.a4 * self.C1_norm ** 2

    def as_dict(self) -> dict:
        return {
            "Q1": self.Q1.tolist(),
            "P1": self.P1.tolist(),
            "a1": self.a1,
            "a2": self.a2,
            "a3": self.a3,
            "a4": self.a4,
            "Q2": self.Q2.tolist(),
            "P2": self.P2.tolist(),
            "beta": self.beta,
            "beta_threshold": self.beta_threshold,
            "lambda": self.lam,
            "mu": self.mu,
            "M_norm": self.M_norm,
            "C1_norm": self.C1_norm,
            "P2_A2_tilde_norm": self.P2_A2_tilde_norm,
            "eps_star": self.eps_star,
        }


def synthesize_fast_certificate(sys: CoupledSystem, Q1=None) -> FastCertificate:
    """Build ``P1`` from ``A1^T P1 + P1 A1 = -Q1`` and derive ``a1..a4``.

    The input cross term is split with Young's inequality using
    ``theta = lambda_min(Q1) / 2``::

        2 z^T P1 B1 v <= theta |z|^2 + |P1 B1|^2 |v|^2 / theta

    so ``a3 = lambda_min(Q1) - theta`` and ``a4 = |P1 B1|^2 / theta``.
    """
    Q1 = np.eye(sys.n_z) if Q1 is None else _check_spd(Q1, "Q1")
    if Q1.shape != sys.A1.shape:
        raise DimensionError(f"Q1 has shape {Q1.shape}, expected {sys.A1.shape}")
    P1 = solve_lyapunov(sys.A1, Q1).P
    a1, a2 = sym_eig_extrema(P1)
    q_min, _ = sym_eig_extrema(Q1)
    theta = 0.5 * q_min
    a3 = q_min - theta
    a4 = operator_norm(P1 @ sys.B1) ** 2 / theta
    return FastCertificate(P1, a1, a2, a3, a4)


def synthesize_slow_certificate(dec: Decomposition, Q2) -> SlowCertificate:
    """Solve ``A2_tilde^T P2 + P2 A2_tilde = -Q2``.

    Raises :class:`NotHurwitzError` when ``A2_tilde`` is not Hurwitz, i.e.
    the reduced-order system is not exponentially stable.
    """
    Q2 = _check_spd(Q2, "Q2")
    if Q2.shape != dec.A2_tilde.shape:
        raise DimensionError(
            f"Q2 has shape {Q2.shape}, expected {dec.A2_tilde.shape}")
    if not is_hurwitz(dec.A2_tilde):
        raise NotHurwitzError(
            "reduced-order system is not exponentially stable: A2_tilde is "
            "not Hurwitz, so no slow certificate exists")
    P2 = solve_lyapunov(dec.A2_tilde, Q2).P
    beta, _ = sym_eig_extrema(Q2)
    lam, _ = sym_eig_extrema(P2)
    return SlowCertificate(P2, beta, lam)


def default_Q2(sys: CoupledSystem, fast: FastCertificate) -> np.ndarray:
    """``4 a4 |C1|^2 I``: twice the smallest admissible ``beta``.

    Falls back to the identity when the threshold is zero (``B1 = 0``).
    """
    scale = 4.0 * fast.a4 * operator_norm(sys.C1) ** 2
    if scale <= 0:
        return np.eye(sys.n_w)
    return scale * np.eye(sys.n_w)


def _eps_star(a3, beta, M_norm, P2_A2_tilde_norm) -> float:
    if M_norm == 0.0:
        # M = 0 means B2 C2 = 0, which also makes the perturbation in the
        # growth bound vanish; neither constraint limits eps.
        logger.warning("M = 0: mu is unbounded and eps_star is infinite")
        return math.inf
    mu = a3 / (2.0 * M_norm ** 2)
    return math.sqrt(mu * beta / (2.0 * P2_A2_tilde_norm ** 2))


def epsilon_star(cert: Certificate, dec: Decomposition) -> float:
    """Largest ``eps`` for which the dissipation estimate is guaranteed.

    Raises :class:`ThresholdError` unless ``beta > 2 a4 |C1|^2`` strictly.
    """
    if not cert.beta > cert.beta_threshold:
        raise ThresholdError(
            f"beta = {cert.beta:.6g} must exceed 2 a4 |C1|^2 = "
            f"{cert.beta_threshold:.6g}; choose a larger Q2")
    return _eps_star(cert.a3, cert.beta, cert.M_norm,
                     operator_norm(cert.P2 @ dec.A2_tilde))


def synthesize_certificate(sys: CoupledSystem, dec: Decomposition,
                           Q1=None, Q2=None) -> Certificate:
    """Run the whole synthesis: fast certificate, ``Q2``, ``P2``, ``eps_star``.

    ``Q1`` defaults to the identity and ``Q2`` to :func:`default_Q2`.
    """
    fast = synthesize_fast_certificate(sys, Q1)
    Q1 = np.eye(sys.n_z) if Q1 is None else _check_spd(Q1, "Q1")
    Q2 = default_Q2(sys, fast) if Q2 is None else _check_spd(Q2, "Q2")
    slow = synthesize_slow_certificate(dec, Q2)
    M_norm = operator_norm(dec.M)
    C1_norm = operator_norm(sys.C1)
    pa_norm = operator_norm(slow.P2 @ dec.A2_tilde)
    threshold = 2.0 * fast.a4 * C1_norm ** 2
    if not slow.beta > threshold:
        raise ThresholdError(
            f"beta = {slow.beta:.6g} must exceed 2 a4 |C1|^2 = {threshold:.6g}; "
            "choose a larger Q2")
    mu = math.inf if M_norm == 0.0 else fast.a3 / (2.0 * M_norm ** 2)
    return Certificate(
        P1=fast.P1, Q1=Q1, a1=fast.a1, a2=fast.a2, a3=fast.a3, a4=fast.a4,
        P2=slow.P2, Q2=Q2, beta=slow.beta, lam=slow.lam, mu=mu,
        eps_star=_eps_star(fast.a3, slow.beta, M_norm, pa_norm),
        M_norm=M_norm, C1_norm=C1_norm, P2_A2_tilde_norm=pa_norm)


def forwarding_matrix(cert: Certificate, dec: Decomposition, eps: float) -> np.ndarray:
    """Symmetric ``S`` with ``W(z, w) = [z; w]^T S [z; w]``."""
    if not eps > 0:
        raise ValueError(f"eps must be positive, got {eps!r}")
    M, P2 = dec.M, cert.P2
    zz = eps * cert.P1 + eps ** 2 * M.T @ P2 @ M
    zw = -eps * M.T @ P2
    S = np.block([[zz, zw], [zw.T, P2]])
    return 0.5 * (S + S.T)


def forwarding_functional(cert: Certificate, dec: Decomposition, eps: float, z, w):
    """Evaluate ``eps z^T P1 z + (w - eps M z)^T P2 (w - eps M z)``.

    ``z`` and ``w`` may be single vectors or stacks of row vectors; a
    stack returns one value per row.
    """
    if not eps > 0:
        raise ValueError(f"eps must be positive, got {eps!r}")
    z = np.asarray(z, dtype=float)
    w = np.asarray(w, dtype=float)
    single = z.ndim == 1
    z2, w2 = np.atleast_2d(z), np.atleast_2d(w)
    n_z, n_w = cert.P1.shape[0], cert.P2.shape[0]
    if z2.shape[1] != n_z or w2.shape[1] != n_w or len(z2) != len(w2):
        raise DimensionError(
            f"states of shape {z.shape} and {w.shape} do not match "
            f"n_z={n_z}, n_w={n_w}")
    e = w2 - eps * z2 @ dec.M.T
    values = (eps * np.einsum("ij,jk,ik->i", z2, cert.P1, z2)
              + np.einsum("ij,jk,ik->i", e, cert.P2, e))
    return float(values[0]) if single else values


def sandwich_bounds(cert: Certificate, eps: float) -> tuple[float, float]:
    """Constants with ``nu_under |x|^2 <= W(z, w) <= nu_bar |x|^2``.

    With ``m = |M|`` and ``p = |P2|``::

        nu_bar   = max(eps a2 + 2 eps^2 m^2 p, 2 p)
        nu_under = min(a1 eps / 2, (lam / 2) a1 eps / (eps^2 lam m^2 + a1 eps))

    Both follow from Young's inequality applied to ``w - eps M z``.
    """
    if not eps > 0:
        raise ValueError(f"eps must be positive, got {eps!r}")
    m2 = cert.M_norm ** 2
    p = cert.P2_norm
    a1e = cert.a1 * eps
    nu_bar = max(eps * cert.a2 + 2.0 * eps ** 2 * m2 * p, 2.0 * p)
    nu_under = min(0.5 * a1e, 0.5 * cert.lam * a1e / (eps ** 2 * cert.lam * m2 + a1e))
    return nu_under, nu_bar


def dissipation_margin(cert: Certificate, eps: float) -> tuple[float, float]:
    """Coefficients ``(c_z, c_w)`` in ``dW/dt <= -c_z |z|^2 - c_w |w|^2``.

    ``c_z = a3 / 2`` and ``c_w = beta / 2 - a4 |C1|^2``; valid for
    ``0 < eps <= eps_star``.
    """
    if not eps > 0:
        raise ValueError(f"eps must be positive, got {eps!r}")
    if eps > cert.eps_star:
        raise ValueError(
            f"eps = {eps:g} exceeds eps_star = {cert.eps_star:g}; the "
            "dissipation margin is not guaranteed")
    return 0.5 * cert.a3, 0.5 * cert.beta - cert.a4 * cert.C1_norm ** 2

