"""Finite Markov chain whose harness and variance coefficients do not depend on m.

Y_t counts successes among m independent trials, each succeeding once by
time t with probability pi(0, t) = int_0^t p. The chain satisfies the same
linear conditional-mean and quadratic conditional-variance structure as the
continuous processes, yet its laws are binomial.
"""

import math
from typing import Dict, Tuple

import numpy as np
from loguru import logger
from pydantic import BaseModel, ConfigDict, Field, model_validator

from .errors import DomainError

MAX_TRIALS = 12


class RateProfile(BaseModel):
    """Piecewise-constant rate: values[i] on [breakpoints[i], breakpoints[i+1])."""
    model_config = ConfigDict(frozen=True)

    breakpoints: Tuple[float, ...]
    values: Tuple[float, ...]

    @model_validator(mode="after")
    def _valid(self) -> "RateProfile":
        if len(self.breakpoints) != len(self.values) + 1 or not self.values:
            raise ValueError("need one more breakpoint than rate values")
        if self.breakpoints[0] != 0.0:
            raise ValueError("breakpoints must start at 0")
        if any(b <= a for a, b in zip(self.breakpoints, self.breakpoints[1:])):
            raise ValueError("breakpoints must be strictly increasing")
        if any(v < 0 for v in self.values):
            raise ValueError("rates must be non-negative")
        if self.cumulative(0.0, self.horizon) >= 1.0:
            raise ValueError("total rate mass must stay below 1")
        return self

    @classmethod
    def constant(cls, rate: float, horizon: float) -> "RateProfile":
        return cls(breakpoints=(0.0, horizon), values=(rate,))

    @property
    def horizon(self) -> float:
        return self.breakpoints[-1]

    def cumulative(self, s: float, t: float) -> float:
        """pi(s, t) = int_s^t p, exact for the piecewise-constant rate."""
        total = 0.0
        for lo, hi, rate in zip(self.breakpoints, self.breakpoints[1:], self.values):
            overlap = min(hi, t) - max(lo, s)
            if overlap > 0:
                total += rate * overlap
        return total


class BinomialChain(BaseModel):
    model_config = ConfigDict(frozen=True)

    m: int = Field(..., ge=1, le=MAX_TRIALS)
    rate: RateProfile

    def pi(self, s: float, t: float) -> float:
        return self.rate.cumulative(s, t)


def _check_times(chain: BinomialChain, *times: float) -> None:
    if times[0] < 0 or any(b <= a for a, b in zip(times, times[1:])) or times[-1] > chain.rate.horizon:
        raise DomainError(f"times {times} must increase within [0, {chain.rate.horizon}]")


def transition_matrix(chain: BinomialChain, s: float, t: float) -> np.ndarray:
    """P(Y_t = j | Y_s = i) as an upper-triangular (m+1) x (m+1) matrix.

    Args:
        chain: The chain
        s: Start time
        t: End time, s < t <= horizon

    Returns:
        Stochastic matrix
    """
    _check_times(chain, s, t)
    m = chain.m
    done_s = chain.pi(0.0, s)
    if done_s >= 1.0:
        raise DomainError(f"pi(0, s) = {done_s} >= 1")
    step, left_t, left_s = chain.pi(s, t), 1.0 - chain.pi(0.0, t), 1.0 - done_s

    P = np.zeros((m + 1, m + 1))
    for i in range(m + 1):
        for j in range(i, m + 1):
            P[i, j] = math.comb(m - i, j - i) * step ** (j - i) * left_t ** (m - j) / left_s ** (m - i)
    return P


def marginal_pmf(chain: BinomialChain, s: float) -> np.ndarray:
    """Binomial(m, pi(0, s)) law of Y_s."""
    p = chain.pi(0.0, s)
    return np.array([math.comb(chain.m, i) * p ** i * (1.0 - p) ** (chain.m - i) for i in range(chain.m + 1)])


def joint_law(chain: BinomialChain, s: float, t: float, u: float) -> np.ndarray:
    """P(Y_s = a, Y_t = b, Y_u = c) as an (m+1)^3 array, zero unless a <= b <= c."""
    _check_times(chain, s, t, u)
    m = chain.m
    cells = (chain.pi(0.0, s), chain.pi(s, t), chain.pi(t, u), 1.0 - chain.pi(0.0, u))
    law = np.zeros((m + 1, m + 1, m + 1))
    for i in range(m + 1):
        for j in range(m + 1 - i):
            for k in range(m + 1 - i - j):
                rest = m - i - j - k
                coeff = math.factorial(m) // (math.factorial(i) * math.factorial(j) * math.factorial(k) * math.factorial(rest))
                law[i, i + j, i + j + k] = coeff * cells[0] ** i * cells[1] ** j * cells[2] ** k * cells[3] ** rest
    return law


def _endpoint_moments(chain: BinomialChain, s: float, t: float, u: float) -> Dict[Tuple[int, int], Tuple[float, float]]:
    # (Y_s, Y_u) -> (E[Y_t | .], Var[Y_t | .]) over pairs of positive probability
    law = joint_law(chain, s, t, u)
    states = np.arange(chain.m + 1)
    moments = {}
    for a in range(chain.m + 1):
        for c in range(a, chain.m + 1):
            weights = law[a, :, c]
            total = weights.sum()
            if total <= 0.0:
                continue
            mean = float(weights @ states / total)
            var = float(weights @ (states - mean) ** 2 / total)
            moments[(a, c)] = (mean, var)
    return moments


class ChainResiduals(BaseModel):
    linear_regression: float
    quadratic_variance: float


def verify_chain_identities(chain: BinomialChain, s: float, t: float, u: float) -> ChainResiduals:
    """Max residuals of the two-sided conditional mean and variance by exhaustive enumeration.

    Mean: Y_s + (pi(s,t)/pi(s,u)) (Y_u - Y_s); variance: pi(s,t) pi(t,u) / pi(s,u)^2 (Y_u - Y_s).
    """
    span = chain.pi(s, u)
    if span <= 0.0:
        raise DomainError(f"pi(s, u) = {span}: the chain cannot move on [{s}, {u}]")
    ratio = chain.pi(s, t) / span
    kappa = chain.pi(s, t) * chain.pi(t, u) / span ** 2
    lr, qv = 0.0, 0.0
    for (a, c), (mean, var) in _endpoint_moments(chain, s, t, u).items():
        lr = max(lr, abs(mean - (a + ratio * (c - a))))
        qv = max(qv, abs(var - kappa * (c - a)))
    logger.debug(f"chain m={chain.m} at ({s}, {t}, {u}): lr={lr:.3e} qv={qv:.3e}")
    return ChainResiduals(linear_regression=lr, quadratic_variance=qv)


def conditional_pmf(chain: BinomialChain, s: float, t: float, u: float, i: int, n: int) -> np.ndarray:
    """Enumerated law of Y_t - Y_s given Y_s = i, Y_u = i + n, on 0..n."""
    law = joint_law(chain, s, t, u)
    if i < 0 or n < 0 or i + n > chain.m:
        raise DomainError(f"states i={i}, i+n={i + n} outside 0..{chain.m}")
    weights = law[i, i:i + n + 1, i + n]
    total = weights.sum()
    if total <= 0.0:
        raise DomainError(f"conditioning event Y_s={i}, Y_u={i + n} has probability 0")
    return weights / total


def chain_chapman_kolmogorov(chain: BinomialChain, s: float, t: float, u: float) -> float:
    """max |P(s,t) P(t,u) - P(s,u)|."""
    return float(np.max(np.abs(transition_matrix(chain, s, t) @ transition_matrix(chain, t, u)
                               - transition_matrix(chain, s, u))))


def fit_chain_coefficients(chain: BinomialChain, s: float, t: float, u: float) -> Tuple[float, float, float]:
    """Least-squares a, b, kappa with E[Y_t|Y_s,Y_u] = a Y_s + b Y_u and Var = kappa (Y_u - Y_s)."""
    moments = _endpoint_moments(chain, s, t, u)
    pairs = np.array(list(moments.keys()), dtype=float)
    means = np.array([v[0] for v in moments.values()])
    variances = np.array([v[1] for v in moments.values()])
    (a, b), *_ = np.linalg.lstsq(pairs, means, rcond=None)
    (kappa,), *_ = np.linalg.lstsq((pairs[:, 1] - pairs[:, 0])[:, None], variances, rcond=None)
    return float(a), float(b), float(kappa)


def chain_covariance(chain: BinomialChain, s: float, t: float) -> float:
    """Cov(Y_s, Y_t) = m pi(0,s) (1 - pi(0,t)) for s <= t."""
    if not 0.0 <= s <= t:
        raise DomainError(f"need 0 <= s <= t, got ({s}, {t})")
    return chain.m * chain.pi(0.0, s) * (1.0 - chain.pi(0.0, t))


def enumerated_covariance(chain: BinomialChain, s: float, t: float) -> float:
    """Cov(Y_s, Y_t) from the marginal law and the transition matrix."""
    states = np.arange(chain.m + 1, dtype=float)
    ps = marginal_pmf(chain, s)
    if s == t:
        mean = ps @ states
        return float(ps @ states ** 2 - mean ** 2)
    P = transition_matrix(chain, s, t)
    joint = ps[:, None] * P
    return float(states @ joint @ states - (ps @ states) * (marginal_pmf(chain, t) @ states))
