"""q-calculus primitives, process parameters and recurrence coefficients.

Every kernel and marginal in qharness is defined through the three-step
recurrence

    y Q_n = Q_{n+1} + alpha_n Q_n + beta_n Q_{n-1}

with alpha_n = theta [n]_q + x q^n and
beta_n = (t - s q^(n-1) + tau [n-1]_q) [n]_q.
"""

import math
from functools import lru_cache
from typing import List

import numpy as np
from loguru import logger
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from .errors import DomainError

# Below this degree [n]_q is summed term by term
_DIRECT_SUM_LIMIT = 64


class ProcessParams(BaseModel):
    """The triple (theta, tau, q) that selects a q-Meixner process."""
    model_config = ConfigDict(frozen=True)

    theta: float = 0.0
    tau: float = Field(0.0, ge=0.0)
    q: float = Field(0.0, ge=-1.0, le=1.0)

    @field_validator("theta", "tau", "q")
    @classmethod
    def _finite(cls, value: float) -> float:
        if not math.isfinite(value):
            raise ValueError("process parameters must be finite")
        return value

    @property
    def two_point(self) -> bool:
        """q = -1: kernels are supported on two points."""
        return self.q == -1.0

    @property
    def bounded_support(self) -> bool:
        return abs(self.q) < 1.0


class KernelCoordinates(BaseModel):
    """Conditioning value x = X_s and the pair of times s < t."""
    model_config = ConfigDict(frozen=True)

    x: float = 0.0
    s: float = Field(0.0, ge=0.0)
    t: float

    @model_validator(mode="after")
    def _ordered(self) -> "KernelCoordinates":
        if not all(math.isfinite(v) for v in (self.x, self.s, self.t)):
            raise ValueError("kernel coordinates must be finite")
        if not self.t > self.s:
            raise ValueError(f"kernel coordinates need s < t, got s={self.s}, t={self.t}")
        return self


class RecurrenceCoeffs(BaseModel):
    """Coefficients alpha_0..alpha_n and beta_1..beta_n of a monic recurrence.

    beta[0] is stored as 0 and never used.
    """
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    alpha: np.ndarray
    beta: np.ndarray

    @model_validator(mode="after")
    def _shapes(self) -> "RecurrenceCoeffs":
        if self.alpha.shape != self.beta.shape or self.alpha.ndim != 1:
            raise ValueError("alpha and beta must be 1-d arrays of equal length")
        self.alpha.setflags(write=False)
        self.beta.setflags(write=False)
        return self

    @property
    def order(self) -> int:
        return len(self.alpha) - 1

    def diag_at(self, n: int) -> float:
        return float(self.alpha[n])

    def sub_at(self, n: int) -> float:
        if n < 1:
            raise DomainError(f"beta_n is defined for n >= 1, got {n}")
        return float(self.beta[n])


def q_int(n: int, q: float) -> float:
    """q-integer [n]_q = 1 + q + ... + q^(n-1).

    Args:
        n: Non-negative integer
        q: Base

    Returns:
        [n]_q, with [0]_q = 0 and [n]_1 = n
    """
    if n < 0:
        raise DomainError(f"q-integer needs n >= 0, got {n}")
    if q == 1.0:
        return float(n)
    if n <= _DIRECT_SUM_LIMIT:
        return math.fsum(q ** j for j in range(n))
    return (1.0 - q ** n) / (1.0 - q)


def q_factorial(n: int, q: float) -> float:
    """[n]_q! = [1]_q [2]_q ... [n]_q."""
    if n < 0:
        raise DomainError(f"q-factorial needs n >= 0, got {n}")
    result = 1.0
    for k in range(1, n + 1):
        result *= q_int(k, q)
    return result


def q_binomial(n: int, k: int, q: float) -> float:
    """Gaussian binomial coefficient [n choose k]_q.

    Even q-integers vanish at q = -1, so numerator and denominator factors
    with even argument are paired and evaluated as [m/2]_{q^2} / [j/2]_{q^2};
    the common factor [2]_q cancels and no 0/0 appears anywhere in [-1, 1].

    Args:
        n: Upper index
        k: Lower index, 0 <= k <= n
        q: Base

    Returns:
        The q-binomial coefficient
    """
    if n < 0 or k < 0 or k > n:
        raise DomainError(f"q-binomial needs 0 <= k <= n, got n={n}, k={k}")
    k = min(k, n - k)
    numerators = list(range(n - k + 1, n + 1))
    denominators = list(range(1, k + 1))

    value = 1.0
    even_num: List[int] = []
    for m in numerators:
        if m % 2:
            value *= q_int(m, q)
        else:
            even_num.append(m)
    even_den: List[int] = []
    for j in denominators:
        if j % 2:
            value /= q_int(j, q)
        else:
            even_den.append(j)

    q2 = q * q
    # a window of k consecutive integers holds at least floor(k/2) evens
    for m, j in zip(even_num, even_den):
        value *= q_int(m // 2, q2) / q_int(j // 2, q2)
    for m in even_num[len(even_den):]:
        value *= q_int(m, q)
    return value


def q_int_table(n_max: int, q: float) -> np.ndarray:
    """[0]_q .. [n_max]_q as an array."""
    return np.array([q_int(n, q) for n in range(n_max + 1)], dtype=float)


def recurrence_coefficients(params: ProcessParams, x: float, s: float, t: float,
                            n_max: int) -> RecurrenceCoeffs:
    """Raw coefficients alpha_n, beta_n for arbitrary real (x, s, t).

    No ordering is enforced: the algebraic identities evaluate Q_n at
    coordinates such as (x=y, s=t, t=0).
    """
    if n_max < 0:
        raise DomainError(f"n_max must be >= 0, got {n_max}")
    theta, tau, q = params.theta, params.tau, params.q
    qi = q_int_table(n_max, q)
    qpow = np.array([q ** n for n in range(n_max + 1)], dtype=float)

    alpha = theta * qi + x * qpow
    beta = np.zeros(n_max + 1)
    for n in range(1, n_max + 1):
        beta[n] = (t - s * qpow[n - 1] + tau * qi[n - 1]) * qi[n]
    return RecurrenceCoeffs(alpha=alpha, beta=beta)


@lru_cache(maxsize=1024)
def kernel_recurrence(params: ProcessParams, coords: KernelCoordinates, n_max: int) -> RecurrenceCoeffs:
    """Recurrence coefficients of Q_n(y | x, s, t) for validated coordinates.

    Args:
        params: Process parameters
        coords: Kernel coordinates with 0 <= s < t
        n_max: Highest index needed

    Returns:
        RecurrenceCoeffs with alpha_0 = x
    """
    logger.debug(f"kernel recurrence for {params} at {coords}, n_max={n_max}")
    return recurrence_coefficients(params, coords.x, coords.s, coords.t, n_max)


def marginal_recurrence(params: ProcessParams, t: float, n_max: int) -> RecurrenceCoeffs:
    """Recurrence of the martingale polynomials p_n(y, t) (x = 0, s = 0)."""
    if not t > 0:
        raise DomainError(f"marginal recurrence needs t > 0, got {t}")
    return kernel_recurrence(params, KernelCoordinates(x=0.0, s=0.0, t=t), n_max)


def carleman_partial_sum(params: ProcessParams, coords: KernelCoordinates, n_terms: int) -> float:
    """Partial sum of beta_n^(-1/2) over n <= n_terms.

    Vanishing beta_n (q = -1, even n) are skipped: there the measure is finite.
    """
    coeffs = recurrence_coefficients(params, coords.x, coords.s, coords.t, n_terms)
    beta = coeffs.beta[1:]
    positive = beta[beta > 0.0]
    return float(np.sum(1.0 / np.sqrt(positive)))
