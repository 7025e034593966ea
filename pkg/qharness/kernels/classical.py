"""q = 1: the five classical Levy laws and their characteristic functions."""

import math
from enum import Enum
from typing import Union

import numpy as np

from ..errors import DomainError

# Relative tolerance for theta^2 == 4 tau
GAMMA_BOUNDARY_TOL = 1e-12


class ClassicalLawType(str, Enum):
    WIENER = "wiener"
    POISSON = "poisson"
    PASCAL = "pascal"
    GAMMA = "gamma"
    MEIXNER = "meixner"


def classify_classical(theta: float, tau: float) -> ClassicalLawType:
    """Regime of (theta, tau).

    Args:
        theta: Asymmetry parameter
        tau: Dispersion parameter, >= 0

    Returns:
        The law type; theta^2 = 4 tau is matched to a relative 1e-12
    """
    if tau < 0:
        raise DomainError(f"tau must be >= 0, got {tau}")
    if tau == 0.0:
        return ClassicalLawType.WIENER if theta == 0.0 else ClassicalLawType.POISSON
    disc = theta * theta - 4.0 * tau
    if abs(disc) <= GAMMA_BOUNDARY_TOL * 4.0 * tau:
        return ClassicalLawType.GAMMA
    return ClassicalLawType.PASCAL if disc > 0 else ClassicalLawType.MEIXNER


def pascal_constants(theta: float, tau: float):
    """delta_+, delta_- and p of the Pascal-type law."""
    root = math.sqrt(theta * theta - 4.0 * tau)
    delta_plus = 0.5 * (theta + root)
    delta_minus = 0.5 * (theta - root)
    return delta_plus, delta_minus, delta_plus / (delta_plus - delta_minus)


def classical_char_fn(law: ClassicalLawType, theta: float, tau: float, t: float,
                      u: Union[float, np.ndarray]) -> Union[complex, np.ndarray]:
    """E exp(i u X_t) for the classical law of the given regime.

    Powers with non-integer exponents go through logarithms of bases whose
    real part stays positive, so the result is continuous in u.

    Args:
        law: Regime, must match classify_classical(theta, tau)
        theta, tau: Process parameters
        t: Time, > 0
        u: Scalar or array argument

    Returns:
        Characteristic function value(s)
    """
    if not t > 0:
        raise DomainError(f"characteristic function needs t > 0, got {t}")
    expected = classify_classical(theta, tau)
    if law != expected:
        raise DomainError(f"law {law.value} does not match (theta={theta}, tau={tau}), which is {expected.value}")

    u_arr = np.asarray(u, dtype=float)
    if law is ClassicalLawType.WIENER:
        value = np.exp(-t * u_arr ** 2 / 2.0)
    elif law is ClassicalLawType.POISSON:
        value = np.exp(t / theta ** 2 * (np.exp(1j * u_arr * theta) - 1.0) - 1j * u_arr * t / theta)
    elif law is ClassicalLawType.PASCAL:
        # reflected argument: third cumulant t theta, as in the Poisson and Gamma cases
        v = -u_arr
        d_plus, d_minus, p = pascal_constants(theta, tau)
        gap = d_plus - d_minus
        if abs(p) >= abs(1.0 - p):
            log_base = -1j * v * d_minus + np.log(p + (1.0 - p) * np.exp(-1j * v * gap))
        else:
            log_base = -1j * v * d_plus + np.log((1.0 - p) + p * np.exp(1j * v * gap))
        value = np.exp(-(t / tau) * log_base)
    elif law is ClassicalLawType.GAMMA:
        value = np.exp(-2j * u_arr * t / theta) * np.exp(-(4.0 * t / theta ** 2) * np.log(1.0 - 0.5j * u_arr * theta))
    else:
        v = -u_arr
        h = math.sqrt(4.0 * tau - theta * theta)
        base = np.cosh(h * v / 2.0) + 1j * theta / h * np.sinh(h * v / 2.0)
        value = np.exp(1j * v * theta * t / (2.0 * tau)) * np.exp(-(t / tau) * np.log(base))

    if np.ndim(value) == 0:
        return complex(value)
    return value
