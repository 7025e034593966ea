"""Evaluation of the polynomials Q_n(y|x,s,t) and p_n(y,t).

The algebraic identity checks return residuals; tolerance policy belongs to
the caller.
"""

from typing import Tuple, Union

import numpy as np
from loguru import logger
from pydantic import BaseModel, ConfigDict, Field

from .errors import DomainError, UnsupportedModeError
from .qcore import (
    KernelCoordinates,
    ProcessParams,
    RecurrenceCoeffs,
    q_binomial,
    q_factorial,
    recurrence_coefficients,
)

ArrayLike = Union[float, np.ndarray]


class PolynomialFamily(BaseModel):
    """Monic polynomials Q_0..Q_{n_max} in y for fixed (x, s, t).

    The coordinates are raw reals so that identities can evaluate the family
    at points that are not kernel coordinates. Use for_kernel/for_marginal for
    the validated constructors.
    """
    model_config = ConfigDict(frozen=True)

    params: ProcessParams
    x: float = 0.0
    s: float = 0.0
    t: float = 0.0
    n_max: int = Field(..., ge=0)
    marginal: bool = False

    @classmethod
    def for_kernel(cls, params: ProcessParams, coords: KernelCoordinates, n_max: int) -> "PolynomialFamily":
        return cls(params=params, x=coords.x, s=coords.s, t=coords.t, n_max=n_max)

    @classmethod
    def for_marginal(cls, params: ProcessParams, t: float, n_max: int) -> "PolynomialFamily":
        if not t > 0:
            raise DomainError(f"marginal polynomials need t > 0, got {t}")
        return cls(params=params, x=0.0, s=0.0, t=t, n_max=n_max, marginal=True)

    def coefficients(self) -> RecurrenceCoeffs:
        return recurrence_coefficients(self.params, self.x, self.s, self.t, self.n_max)


def evaluate_recurrence(coeffs: RecurrenceCoeffs, y: ArrayLike) -> np.ndarray:
    """Run Q_{n+1} = (y - alpha_n) Q_n - beta_n Q_{n-1} from Q_0 = 1.

    Args:
        coeffs: Recurrence coefficients up to order n_max
        y: Scalar or array of evaluation points

    Returns:
        Array of shape (n_max + 1,) + shape(y)
    """
    y = np.asarray(y, dtype=float)
    n_max = coeffs.order
    values = np.empty((n_max + 1,) + y.shape)
    values[0] = 1.0
    if n_max >= 1:
        values[1] = y - coeffs.alpha[0]
    for n in range(1, n_max):
        values[n + 1] = (y - coeffs.alpha[n]) * values[n] - coeffs.beta[n] * values[n - 1]
    return values


def eval_Q(family: PolynomialFamily, y: ArrayLike) -> np.ndarray:
    """Q_0(y) .. Q_{n_max}(y) for the family's coordinates."""
    return evaluate_recurrence(family.coefficients(), y)


def eval_p(params: ProcessParams, t: float, y: ArrayLike, n_max: int) -> np.ndarray:
    """Martingale polynomials p_0(y,t) .. p_{n_max}(y,t)."""
    return eval_Q(PolynomialFamily.for_marginal(params, t, n_max), y)


def q_poly(params: ProcessParams, n: int, y: ArrayLike, x: float, s: float, t: float) -> ArrayLike:
    """Single polynomial Q_n(y|x,s,t) at raw coordinates."""
    coeffs = recurrence_coefficients(params, x, s, t, n)
    return evaluate_recurrence(coeffs, y)[n]


def norm_squared(coeffs: RecurrenceCoeffs, n: int) -> float:
    """Squared norm of the monic Q_n under its orthogonality measure: beta_1 ... beta_n."""
    return float(np.prod(coeffs.beta[1:n + 1]))


def convolution_terms(params: ProcessParams, x: float, y: float, z: float,
                      s: float, t: float, u: float, n: int) -> Tuple[float, np.ndarray]:
    """Both sides of the convolution identity

        Q_n(z|x,s,u) = sum_k [n choose k]_q Q_{n-k}(y|x,s,t) Q_k(z|y,t,u)

    Returns:
        The left-hand side and the n + 1 summands of the right-hand side
    """
    lhs = float(q_poly(params, n, z, x, s, u))
    left = evaluate_recurrence(recurrence_coefficients(params, x, s, t, n), y)
    right = evaluate_recurrence(recurrence_coefficients(params, y, t, u, n), z)
    terms = np.array([q_binomial(n, k, params.q) * left[n - k] * right[k] for k in range(n + 1)])
    return lhs, terms


def check_convolution_identity(params: ProcessParams, x: float, y: float, z: float,
                               s: float, t: float, u: float, n: int) -> float:
    """Absolute residual of the convolution identity for Q_n."""
    lhs, terms = convolution_terms(params, x, y, z, s, t, u, n)
    return abs(lhs - float(np.sum(terms)))


def bms_cofactors(params: ProcessParams, x: float, s: float, n: int) -> np.ndarray:
    """Cofactors B_j = [n choose n-j]_q Q_j(0|x,s,0) for j = 0..n-1.

    They expand Q_n(z|x,s,u) over the martingale increments
    p_{n-j}(z,u) - p_{n-j}(x,s); B_0 = 1.
    """
    if n < 1:
        raise DomainError(f"cofactors need n >= 1, got {n}")
    at_zero = evaluate_recurrence(recurrence_coefficients(params, x, s, 0.0, n), 0.0)
    return np.array([q_binomial(n, n - j, params.q) * at_zero[j] for j in range(n)])


def bms_terms(params: ProcessParams, y: float, z: float, t: float, u: float,
              n: int) -> Tuple[float, np.ndarray]:
    """Both sides of the expansion of Q_n(z|y,t,u) over martingale increments.

    Returns:
        The left-hand side and the n summands (k = 1..n)
    """
    if n < 1:
        raise DomainError(f"expansion needs n >= 1, got {n}")
    lhs = float(q_poly(params, n, z, y, t, u))
    cofactors = bms_cofactors(params, y, t, n)
    p_u = evaluate_recurrence(recurrence_coefficients(params, 0.0, 0.0, u, n), z)
    p_t = evaluate_recurrence(recurrence_coefficients(params, 0.0, 0.0, t, n), y)
    terms = np.array([cofactors[n - k] * (p_u[k] - p_t[k]) for k in range(1, n + 1)])
    return lhs, terms


def check_bms_identity(params: ProcessParams, y: float, z: float, t: float, u: float, n: int) -> float:
    """Absolute residual of the martingale-increment expansion of Q_n(z|y,t,u)."""
    lhs, terms = bms_terms(params, y, z, t, u, n)
    return abs(lhs - float(np.sum(terms)))


def convergence_radius(params: ProcessParams, y: float, x: float, s: float, t: float) -> float:
    """Radius 1/C inside which the generating series of Q_n converges."""
    c = max(1.0, (abs(x) + abs(y) + abs(params.theta) + params.tau + t + s) / (1.0 - abs(params.q)) ** 2)
    return 1.0 / c


def generating_fn(params: ProcessParams, zeta: float, y: float, x: float, s: float, t: float,
                  k_terms: int = 200) -> float:
    """Infinite-product form of sum_n zeta^n Q_n(y|x,s,t) / [n]_q!, truncated at k_terms factors.

    Args:
        params: Process parameters, |q| < 1
        zeta: Expansion variable inside the convergence radius
        y, x, s, t: Raw coordinates of Q_n(y|x,s,t)
        k_terms: Number of factors kept

    Returns:
        The truncated product
    """
    theta, tau, q = params.theta, params.tau, params.q
    if abs(q) >= 1.0:
        raise UnsupportedModeError(f"generating function needs |q| < 1, got q={q}")
    radius = convergence_radius(params, y, x, s, t)
    if abs(zeta) >= radius:
        raise DomainError(f"|zeta|={abs(zeta)} outside the convergence radius {radius}")

    qk = np.array([q ** k for k in range(k_terms)])
    num = 1.0 + theta * zeta * qk - (1.0 - q) * x * zeta * qk + ((1.0 - q) * s + tau) * zeta ** 2 * qk ** 2
    den = 1.0 + theta * zeta * qk - (1.0 - q) * y * zeta * qk + ((1.0 - q) * t + tau) * zeta ** 2 * qk ** 2
    value = float(np.prod(num / den))
    logger.debug(f"generating product at zeta={zeta}: {value}")
    return value


def generating_series(params: ProcessParams, zeta: float, y: float, x: float, s: float, t: float,
                      n_terms: int = 30) -> float:
    """Truncated power series sum_{n <= n_terms} zeta^n Q_n(y|x,s,t) / [n]_q!."""
    values = evaluate_recurrence(recurrence_coefficients(params, x, s, t, n_terms), y)
    return float(sum(zeta ** n * values[n] / q_factorial(n, params.q) for n in range(n_terms + 1)))
