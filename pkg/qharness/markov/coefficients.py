"""Harness and quadratic-variance coefficients for times s < t < u."""

import numpy as np
from pydantic import BaseModel, ConfigDict

from ..errors import DomainError
from ..qcore import ProcessParams


class HarnessCoefficients(BaseModel):
    """E(X_t | X_s, X_u) = a X_s + b X_u."""
    model_config = ConfigDict(frozen=True)

    a: float
    b: float


class QuadraticVarianceCoefficients(BaseModel):
    """E(X_t^2 | X_s, X_u) = A X_s^2 + B X_s X_u + C X_u^2 + alpha X_s + beta X_u + D."""
    model_config = ConfigDict(frozen=True)

    A: float
    B: float
    C: float
    D: float
    alpha: float
    beta: float

    def as_array(self) -> np.ndarray:
        return np.array([self.A, self.B, self.C, self.D, self.alpha, self.beta])

    def evaluate(self, xs: float, xu: float) -> float:
        return (self.A * xs * xs + self.B * xs * xu + self.C * xu * xu
                + self.alpha * xs + self.beta * xu + self.D)


def _check_order(s: float, t: float, u: float) -> None:
    if not (0.0 <= s < t < u):
        raise DomainError(f"need 0 <= s < t < u, got ({s}, {t}, {u})")


def harness_coeffs(s: float, t: float, u: float) -> HarnessCoefficients:
    """Bridge weights a = (u-t)/(u-s), b = (t-s)/(u-s)."""
    _check_order(s, t, u)
    span = u - s
    return HarnessCoefficients(a=(u - t) / span, b=(t - s) / span)


def qv_coeffs(params: ProcessParams, s: float, t: float, u: float) -> QuadraticVarianceCoefficients:
    """Closed-form coefficients of the two-sided second moment.

    Args:
        params: Process parameters
        s, t, u: Times with 0 <= s < t < u

    Returns:
        QuadraticVarianceCoefficients
    """
    _check_order(s, t, u)
    theta, tau, q = params.theta, params.tau, params.q
    k = u + tau - q * s
    span = u - s
    D = (u - t) * (t - s) / k
    return QuadraticVarianceCoefficients(
        A=(u - t) * (u + tau - q * t) / (span * k),
        B=(1.0 + q) * (t - s) * (u - t) / (span * k),
        C=(t - s) * (t + tau - q * s) / (span * k),
        D=D,
        alpha=-theta * D / span,
        beta=theta * D / span,
    )


def solve_qv_system(params: ProcessParams, s: float, t: float, u: float) -> QuadraticVarianceCoefficients:
    """Solve the six linear relations for (A, B, C, D, alpha, beta) numerically.

    Rows: A+B+C = 1; As^2 + Bsu + Cu^2 - tau D = t^2; s alpha + u beta - theta D = 0;
    alpha + beta = 0; (u-s) B - (1+q) D = 0; As + Bs + Cu + D = t.
    """
    _check_order(s, t, u)
    theta, tau, q = params.theta, params.tau, params.q
    system = np.array([
        [1.0, 1.0, 1.0, 0.0, 0.0, 0.0],
        [s * s, s * u, u * u, -tau, 0.0, 0.0],
        [0.0, 0.0, 0.0, -theta, s, u],
        [0.0, 0.0, 0.0, 0.0, 1.0, 1.0],
        [0.0, u - s, 0.0, -(1.0 + q), 0.0, 0.0],
        [s, s, u, 1.0, 0.0, 0.0],
    ])
    rhs = np.array([1.0, t * t, 0.0, 0.0, 0.0, t])
    A, B, C, D, alpha, beta = np.linalg.solve(system, rhs)
    return QuadraticVarianceCoefficients(A=A, B=B, C=C, D=D, alpha=alpha, beta=beta)


def conditional_variance(params: ProcessParams, s: float, t: float, u: float, xs: float, xu: float) -> float:
    """Var(X_t | X_s = xs, X_u = xu)."""
    _check_order(s, t, u)
    theta, tau, q = params.theta, params.tau, params.q
    span = u - s
    inc = (xu - xs) / span
    bracket = ((1.0 - q) * (xu - xs) * (s * xu - u * xs) / span ** 2
               + tau * inc * inc + theta * inc + 1.0)
    return (u - t) * (t - s) / (u + tau - q * s) * bracket


def reverse_conditional_variance(params: ProcessParams, t: float, u: float, xu: float) -> float:
    """Var(X_t | X_u = xu) for 0 <= t < u, conditioning on the future only."""
    if not (0.0 <= t < u):
        raise DomainError(f"need 0 <= t < u, got ({t}, {u})")
    theta, tau = params.theta, params.tau
    return t * (u - t) / (u + tau) * (tau * xu * xu / (u * u) + theta * xu / u + 1.0)
