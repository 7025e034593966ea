"""Closed forms for the q-Brownian motion (theta = tau = 0)."""

import math
from functools import partial

import numpy as np

from ..errors import DomainError, UnsupportedModeError
from .transition import ClosedFormKernel, TwoPointKernel


def _check_times(s: float, t: float) -> None:
    if not (0.0 <= s < t):
        raise DomainError(f"q-Brownian kernel needs 0 <= s < t, got s={s}, t={t}")


def _check_open_q(q: float) -> None:
    if not -1.0 < q < 1.0:
        raise UnsupportedModeError(f"infinite-product density needs -1 < q < 1, got q={q}")


def qbrownian_density(q: float, x: float, s: float, t: float, y: float, k_terms: int = 200) -> float:
    """Density of P_{s,t}(x, dy) for -1 < q < 1, truncated at k_terms factors.

    The k = 0 factor carries 4t - (1-q)y^2 and is merged with the
    1/sqrt(4t - (1-q)y^2) prefactor so the edges stay finite.

    Args:
        q: Base, -1 < q < 1
        x: Value at time s
        s: Start time, 0 <= s
        t: End time, t > s
        y: Evaluation point
        k_terms: Product truncation

    Returns:
        Density value, 0 outside (1-q) y^2 < 4t
    """
    _check_open_q(q)
    _check_times(s, t)
    edge = 4.0 * t - (1.0 - q) * y * y
    if edge <= 0.0:
        return 0.0

    qk = q ** np.arange(k_terms)
    q2k = qk * qk
    num = (t - s * qk) * (1.0 - qk * q)
    num[1:] *= t * (1.0 + qk[1:]) ** 2 - (1.0 - q) * y * y * qk[1:]
    den = (t - s * q2k) ** 2 - (1.0 - q) * qk * (t + s * q2k) * x * y + (1.0 - q) * (s * y * y + t * x * x) * q2k
    value = math.sqrt(1.0 - q) * math.sqrt(edge) / (2.0 * math.pi) * float(np.prod(num / den))
    return max(value, 0.0)


def qbrownian_marginal_density(q: float, t: float, y: float, k_terms: int = 200) -> float:
    """Density of X_t started from 0; q = 1 is the Gaussian limit.

    q = -1 has no density: the law is the two atoms +-sqrt(t), see qbrownian_two_point.
    """
    if not t > 0:
        raise DomainError(f"marginal density needs t > 0, got {t}")
    if q == 1.0:
        return math.exp(-y * y / (2.0 * t)) / math.sqrt(2.0 * math.pi * t)
    if q == -1.0:
        raise UnsupportedModeError("q = -1 marginal is purely atomic: atoms at +-sqrt(t) with mass 1/2")
    return qbrownian_density(q, 0.0, 0.0, t, y, k_terms)


def qbrownian_two_point(x: float, s: float, t: float) -> TwoPointKernel:
    """q = -1 kernel: atoms at +-x sqrt(t/s) with masses (1 +- sqrt(s/t))/2.

    At s = 0 the process starts from x = 0 and the atoms are +-sqrt(t).
    """
    _check_times(s, t)
    if s == 0.0:
        if x != 0.0:
            raise DomainError(f"at s = 0 the process sits at 0, got x={x}")
        root = math.sqrt(t)
        return TwoPointKernel(node_minus=-root, node_plus=root, weight_minus=0.5, weight_plus=0.5)
    if x == 0.0:
        raise DomainError("x = 0 is not reachable at s > 0 when q = -1")
    ratio = math.sqrt(s / t)
    far = abs(x) / ratio
    same_sign = 0.5 * (1.0 + ratio)
    if x > 0:
        return TwoPointKernel(node_minus=-far, node_plus=far, weight_minus=1.0 - same_sign, weight_plus=same_sign)
    return TwoPointKernel(node_minus=-far, node_plus=far, weight_minus=same_sign, weight_plus=1.0 - same_sign)


def _density_at(q: float, x: float, s: float, t: float, k_terms: int, y: float) -> float:
    return qbrownian_density(q, x, s, t, y, k_terms)


def qbrownian_kernel(q: float, x: float, s: float, t: float, k_terms: int = 200) -> ClosedFormKernel:
    """ClosedFormKernel wrapping qbrownian_density for -1 < q < 1."""
    _check_open_q(q)
    _check_times(s, t)
    half_width = 2.0 * math.sqrt(t / (1.0 - q))
    return ClosedFormKernel(
        density=partial(_density_at, q, x, s, t, k_terms),
        atoms=[],
        support=(-half_width, half_width),
    )


def qwiener_conditional_variance(q: float, s: float, t: float, u: float, xs: float, xu: float) -> float:
    """Var(X_t | X_s = xs, X_u = xu) for the q-Brownian motion."""
    if not (0.0 <= s < t < u):
        raise DomainError(f"need 0 <= s < t < u, got ({s}, {t}, {u})")
    span = u - s
    bracket = (1.0 - q) * (xu - xs) * (s * xu - u * xs) / span ** 2 + 1.0
    return (t - s) * (u - t) / (u - q * s) * bracket

