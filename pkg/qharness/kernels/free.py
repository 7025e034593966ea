"""Closed forms for q = 0, where the recurrence has constant coefficients from n = 2 on."""

import cmath
import math
from functools import partial
from typing import List

import numpy as np
from loguru import logger
from pydantic import BaseModel, ConfigDict

from ..errors import DomainError, InconsistencyError
from .classical import ClassicalLawType, classify_classical
from .transition import Atom, ClosedFormKernel

# Matching x against the atom-bearing starting points
ATOM_MATCH_TOL = 1e-12
POLE_TOL = 1e-14


def _check(tau: float, s: float, t: float) -> None:
    if tau < 0:
        raise DomainError(f"tau must be >= 0, got {tau}")
    if not (0.0 <= s < t):
        raise DomainError(f"need 0 <= s < t, got s={s}, t={t}")


def support_interval(theta: float, tau: float, t: float) -> tuple:
    half = 2.0 * math.sqrt(t + tau)
    return theta - half, theta + half


def _denominator(theta: float, tau: float, x: float, s: float, t: float, y):
    return tau * (y - x) ** 2 + theta * (t - s) * (y - x) + t * x * x + s * y * y - (s + t) * x * y + (t - s) ** 2


def free_cauchy_transform(theta: float, tau: float, x: float, s: float, t: float, z: complex) -> complex:
    """Cauchy-Stieltjes transform of the q = 0 kernel mu_{x,s,t}.

    Rationalised form of G = 1 / (z - x - (t-s)/phi(z)) with
    phi(z) = (z - theta + R)/2 and R = sqrt((z-theta)^2 - 4(t+tau)).

    Args:
        theta, tau: Process parameters
        x, s, t: Kernel coordinates
        z: Point off the support interval and off the atoms

    Returns:
        G(z)
    """
    _check(tau, s, t)
    z = complex(z)
    lo, hi = support_interval(theta, tau, t)
    if z.imag == 0.0 and lo <= z.real <= hi:
        raise DomainError(f"z={z.real} lies on the support [{lo}, {hi}]")

    den = _denominator(theta, tau, x, s, t, z)
    scale = (t + tau + 1.0) * (1.0 + abs(z - x)) ** 2
    if abs(den) <= POLE_TOL * scale:
        raise DomainError(f"z={z} is a pole of the transform")

    w = z - theta
    root = w * cmath.sqrt(1.0 - 4.0 * (t + tau) / (w * w))
    g = 0.5 * ((t + s + 2.0 * tau) * (z - x) + (t - s) * (theta - x) - (t - s) * root) / den
    if z.imag * g.imag > 0.0:
        g = 0.5 * ((t + s + 2.0 * tau) * (z - x) + (t - s) * (theta - x) + (t - s) * root) / den
    return g


def free_continued_fraction(theta: float, tau: float, x: float, s: float, t: float, z: complex) -> complex:
    """G(z) = 1 / (z - x - (t-s)/phi(z)) evaluated directly."""
    _check(tau, s, t)
    w = complex(z) - theta
    phi = 0.5 * (w + w * cmath.sqrt(1.0 - 4.0 * (t + tau) / (w * w)))
    return 1.0 / (complex(z) - x - (t - s) / phi)


def free_density(theta: float, tau: float, x: float, s: float, t: float, y: float) -> float:
    """Absolutely continuous part of mu_{x,s,t} at q = 0; 0 outside the support."""
    _check(tau, s, t)
    edge = 4.0 * (t + tau) - (y - theta) ** 2
    if edge <= 0.0:
        return 0.0
    den = _denominator(theta, tau, x, s, t, y)
    if den <= 0.0:
        raise InconsistencyError(f"density denominator {den} <= 0 at y={y} for x={x}, s={s}, t={t}")
    return (t - s) * math.sqrt(edge) / (2.0 * math.pi * den)


def _atom_position(theta: float, tau: float, u: float) -> float:
    root = math.sqrt(theta * theta - 4.0 * tau)
    if theta > 0:
        return -u * (theta - root) / (2.0 * tau)
    return -u * (theta + root) / (2.0 * tau)


def free_atoms(theta: float, tau: float, x: float, s: float, t: float) -> List[Atom]:
    """Discrete part of mu_{x,s,t} at q = 0.

    Only two parameter regimes carry an atom, and only from one starting
    point x per time s. Starting points off the process path are accepted
    as given.
    """
    _check(tau, s, t)
    atoms: List[Atom] = []
    if tau == 0.0 and theta != 0.0:
        th2 = theta * theta
        if math.isclose(x, -s / theta, rel_tol=ATOM_MATCH_TOL, abs_tol=ATOM_MATCH_TOL) and t < th2:
            atoms.append(Atom(location=-t / theta, mass=(1.0 - t / th2) / (1.0 - s / th2)))
    elif tau > 0.0 and theta * theta > 4.0 * tau:
        root = math.sqrt(theta * theta - 4.0 * tau)
        ratio = (abs(theta) - root) / root / (2.0 * tau)
        if math.isclose(x, _atom_position(theta, tau, s), rel_tol=ATOM_MATCH_TOL, abs_tol=ATOM_MATCH_TOL):
            mass = max(1.0 - t * ratio, 0.0) / (1.0 - s * ratio)
            if mass > 0.0:
                atoms.append(Atom(location=_atom_position(theta, tau, t), mass=mass))
    if atoms:
        logger.debug(f"free kernel from x={x} at s={s} carries atoms {atoms}")
    return atoms


def free_kernel(theta: float, tau: float, x: float, s: float, t: float) -> ClosedFormKernel:
    """Closed-form q = 0 kernel: density on the support interval plus atoms."""
    _check(tau, s, t)
    return ClosedFormKernel(
        density=partial(_density_at, theta, tau, x, s, t),
        atoms=free_atoms(theta, tau, x, s, t),
        support=support_interval(theta, tau, t),
    )


def _density_at(theta: float, tau: float, x: float, s: float, t: float, y: float) -> float:
    return free_density(theta, tau, x, s, t, y)


class FreeMarginalLaw(BaseModel):
    """Law of X_t at q = 0 together with its regime."""
    model_config = ConfigDict(frozen=True)

    law: ClassicalLawType
    kernel: ClosedFormKernel


def free_marginal_law(theta: float, tau: float, t: float) -> FreeMarginalLaw:
    """One of the five free laws (Brownian, Poisson, Pascal, Gamma, Meixner type)."""
    if not t > 0:
        raise DomainError(f"marginal law needs t > 0, got {t}")
    return FreeMarginalLaw(law=classify_classical(theta, tau), kernel=free_kernel(theta, tau, 0.0, 0.0, t))


def free_r_transform(theta: float, tau: float, t: float, z: complex) -> complex:
    """R-series of X_t, rationalised as 2tz / ((1 - z theta) + sqrt((1 - z theta)^2 - 4 tau z^2)).

    Analytic at z = 0 with value 0 and valid for tau = 0 as well.
    """
    if tau < 0:
        raise DomainError(f"tau must be >= 0, got {tau}")
    z = complex(z)
    a = 1.0 - z * theta
    return 2.0 * t * z / (a + a * cmath.sqrt(1.0 - 4.0 * tau * z * z / (a * a)))


def stieltjes_inversion(theta: float, tau: float, x: float, s: float, t: float, y: np.ndarray,
                        eps: float = 1e-6) -> np.ndarray:
    """-Im G(y + i eps) / pi on a grid of real points."""
    return np.array([-free_cauchy_transform(theta, tau, x, s, t, complex(v, eps)).imag / math.pi for v in y])
