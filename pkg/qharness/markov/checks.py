"""Residual checks for the Markov structure and the moment identities.

Every check returns residuals; callers decide on tolerances. Joint moments
come from path_measure, which is exact for the polynomial degrees used here
as long as 2N - 1 covers the total degree.
"""

from typing import Tuple

import numpy as np
from loguru import logger

from ..errors import DomainError
from ..orthopoly import eval_p, evaluate_recurrence, norm_squared
from ..qcore import KernelCoordinates, ProcessParams, recurrence_coefficients
from ..quadrature import (
    absolute_moment,
    build_jacobi,
    gauss_measure,
    kernel_measure,
    marginal_measure,
    moment,
    oracle_moment,
)
from .coefficients import harness_coeffs, qv_coeffs, reverse_conditional_variance
from .paths import TimeGrid, path_measure, sample_paths, step_measure


def _warn_degree(N: int, degree: int) -> None:
    if 2 * N - 1 < degree:
        logger.warning(f"{N} nodes integrate exactly only up to degree {2 * N - 1}, need {degree}")


def _pair_index(degree_cap: int):
    for m in range(degree_cap + 1):
        for n in range(degree_cap + 1 - m):
            yield m, n


def check_chapman_kolmogorov(params: ProcessParams, x: float, s: float, t: float, u: float,
                             N: int, n_max: int) -> np.ndarray:
    """|E Q_n(X_u|x,s,u)| when X_u is reached from x through time t.

    The inner integral runs over mu_{y,t,u}, the outer over mu_{x,s,t}.

    Returns:
        Residuals for n = 1..n_max
    """
    if not (0.0 <= s < t < u):
        raise DomainError(f"need 0 <= s < t < u, got ({s}, {t}, {u})")
    _warn_degree(N, n_max)
    coeffs = recurrence_coefficients(params, x, s, u, n_max)
    outer = step_measure(params, x, s, t, N)
    total = np.zeros(n_max + 1)
    for y, w in zip(outer.nodes, outer.weights):
        inner = step_measure(params, float(y), t, u, N)
        total += w * (evaluate_recurrence(coeffs, inner.nodes) @ inner.weights)
    return np.abs(total[1:])


def ck_norms(params: ProcessParams, x: float, s: float, u: float, n_max: int) -> np.ndarray:
    """||Q_n|| under mu_{x,s,u} for n = 1..n_max."""
    coeffs = recurrence_coefficients(params, x, s, u, n_max)
    return np.sqrt(np.array([max(norm_squared(coeffs, n), 0.0) for n in range(1, n_max + 1)]))


def check_martingale_polynomials(params: ProcessParams, x: float, s: float, t: float,
                                 N: int, n_max: int) -> np.ndarray:
    """|int p_n(y,t) mu_{x,s,t}(dy) - p_n(x,s)| for n = 1..n_max."""
    if not (0.0 < s < t):
        raise DomainError(f"need 0 < s < t, got ({s}, {t})")
    _warn_degree(N, n_max)
    m = step_measure(params, x, s, t, N)
    projected = eval_p(params, t, m.nodes, n_max) @ m.weights
    current = eval_p(params, s, x, n_max)
    return np.abs(projected - current)[1:]


def check_harness_moments(params: ProcessParams, s: float, t: float, u: float,
                          N: int, degree_cap: int) -> np.ndarray:
    """Relative residuals of E[X_s^m X_t X_u^n] = a E[X_s^(m+1) X_u^n] + b E[X_s^m X_u^(n+1)].

    One entry per (m, n) with m + n <= degree_cap, ordered by m then n.
    """
    hc = harness_coeffs(s, t, u)
    _warn_degree(N, degree_cap + 1)
    pm = path_measure(params, (s, t, u), N)
    xs, xt, xu = pm.values[:, 0], pm.values[:, 1], pm.values[:, 2]

    def expect(f: np.ndarray) -> float:
        return float(pm.probs @ f)

    residuals = []
    for m, n in _pair_index(degree_cap):
        lhs = expect(xs ** m * xt * xu ** n)
        terms = (hc.a * expect(xs ** (m + 1) * xu ** n), hc.b * expect(xs ** m * xu ** (n + 1)))
        residuals.append(abs(lhs - sum(terms)) / (1.0 + abs(lhs) + sum(abs(v) for v in terms)))
    return np.array(residuals)


def check_quadratic_variance_moments(params: ProcessParams, s: float, t: float, u: float,
                                     N: int, degree_cap: int) -> np.ndarray:
    """Relative residuals of the two-sided second-moment identity in moment form.

    E[X_s^m X_t^2 X_u^n] against A, B, C, alpha, beta, D times the matching
    moments of (X_s, X_u), for m + n <= degree_cap.
    """
    c = qv_coeffs(params, s, t, u)
    _warn_degree(N, degree_cap + 2)
    pm = path_measure(params, (s, t, u), N)
    xs, xt, xu = pm.values[:, 0], pm.values[:, 1], pm.values[:, 2]

    def expect(f: np.ndarray) -> float:
        return float(pm.probs @ f)

    residuals = []
    for m, n in _pair_index(degree_cap):
        lhs = expect(xs ** m * xt ** 2 * xu ** n)
        terms = (
            c.A * expect(xs ** (m + 2) * xu ** n),
            c.B * expect(xs ** (m + 1) * xu ** (n + 1)),
            c.C * expect(xs ** m * xu ** (n + 2)),
            c.alpha * expect(xs ** (m + 1) * xu ** n),
            c.beta * expect(xs ** m * xu ** (n + 1)),
            c.D * expect(xs ** m * xu ** n),
        )
        residuals.append(abs(lhs - sum(terms)) / (1.0 + abs(lhs) + sum(abs(v) for v in terms)))
    return np.array(residuals)


def check_reverse_variance_moments(params: ProcessParams, t: float, u: float,
                                   N: int, degree_cap: int) -> np.ndarray:
    """Relative residuals of E[X_t^2 X_u^n] = E[(Var(X_t|X_u) + (t/u)^2 X_u^2) X_u^n]."""
    if not (0.0 < t < u):
        raise DomainError(f"need 0 < t < u, got ({t}, {u})")
    _warn_degree(N, degree_cap + 2)
    pm = path_measure(params, (t, u), N)
    xt, xu = pm.values[:, 0], pm.values[:, 1]
    second = np.array([reverse_conditional_variance(params, t, u, float(v)) for v in xu]) + (t / u * xu) ** 2
    residuals = []
    for n in range(degree_cap + 1):
        lhs = float(pm.probs @ (xt ** 2 * xu ** n))
        rhs = float(pm.probs @ (second * xu ** n))
        residuals.append(abs(lhs - rhs) / (1.0 + abs(lhs) + abs(rhs)))
    return np.array(residuals)


def increment_moments(params: ProcessParams, s: float, t: float, N: int) -> Tuple[float, float, float]:
    """E(X_t - X_s)^k for k = 2, 3, 4 from the joint law of (X_s, X_t)."""
    if not (0.0 <= s < t):
        raise DomainError(f"need 0 <= s < t, got ({s}, {t})")
    pm = path_measure(params, (s, t), N)
    d = pm.values[:, 1] - pm.values[:, 0]
    return tuple(float(pm.probs @ d ** k) for k in (2, 3, 4))


def increment_moment_formulas(params: ProcessParams, s: float, t: float) -> Tuple[float, float, float]:
    """Closed forms of the second, third and fourth increment moments."""
    theta, tau, q = params.theta, params.tau, params.q
    d = t - s
    m4 = d * (6.0 * s + theta ** 2 - tau + (2.0 + q) * (t + tau - 3.0 * s))
    return d, theta * d, m4


def increment_hankel(m2: float, m3: float, m4: float, d: float) -> float:
    """det [[1, 0, m2], [0, m2, m3], [m2, m3, m4]] / d^2."""
    return (m2 * m4 - m3 * m3 - m2 ** 3) / (d * d)


def hankel_value(params: ProcessParams, s: float, t: float) -> float:
    """Closed form q(t + tau - 3s) + s + t + tau of the normalised increment Hankel determinant."""
    q, tau = params.q, params.tau
    return q * (t + tau - 3.0 * s) + s + t + tau


def marginal_moment_formulas(params: ProcessParams, t: float) -> Tuple[float, float, float, float]:
    """E X_t^k for k = 1..4."""
    theta, tau, q = params.theta, params.tau, params.q
    return 0.0, t, t * theta, (1.0 + q) * t * (t + tau) + t * (t + theta ** 2)


def check_marginal_moments(params: ProcessParams, t: float, N: int) -> np.ndarray:
    """Relative residuals of the first four quadrature moments of X_t."""
    m = marginal_measure(params, t, N)
    expected = marginal_moment_formulas(params, t)
    return np.array([
        abs(moment(m, k) - expected[k - 1]) / (1.0 + absolute_moment(m, k)) for k in range(1, 5)
    ])


def check_gauss_exactness(params: ProcessParams, coords: KernelCoordinates, N: int) -> np.ndarray:
    """|moment - e_0^T J^k e_0| / sum w|y|^k for k = 0..2N-1 of the effective operator."""
    J = build_jacobi(params, coords, N)
    m = gauss_measure(J)
    residuals = []
    for k in range(2 * J.effective_size):
        scale = max(absolute_moment(m, k), np.finfo(float).tiny)
        residuals.append(abs(moment(m, k) - oracle_moment(J, k)) / scale)
    return np.array(residuals)


def check_orthogonality(params: ProcessParams, coords: KernelCoordinates, N: int, n_max: int) -> float:
    """max_{m != n} |int Q_m Q_n dmu| / max(||Q_m|| ||Q_n||, 1)."""
    coeffs = recurrence_coefficients(params, coords.x, coords.s, coords.t, n_max)
    m = kernel_measure(params, coords, N)
    values = evaluate_recurrence(coeffs, m.nodes)
    gram = (values * m.weights) @ values.T
    norms = np.sqrt(np.array([max(norm_squared(coeffs, n), 0.0) for n in range(n_max + 1)]))
    scale = np.maximum(np.outer(norms, norms), 1.0)
    off = np.abs(gram) / scale
    np.fill_diagonal(off, 0.0)
    return float(off.max())


def check_norm_recursion(params: ProcessParams, t: float, N: int, n_max: int) -> np.ndarray:
    """Relative residuals of E p_{n+1}^2 = beta_{n+1} E p_n^2 for n = 0..n_max-1."""
    m = marginal_measure(params, t, N)
    coeffs = recurrence_coefficients(params, 0.0, 0.0, t, n_max)
    squares = (eval_p(params, t, m.nodes, n_max) ** 2) @ m.weights
    lhs = squares[1:]
    rhs = coeffs.beta[1:] * squares[:-1]
    return np.abs(lhs - rhs) / (1.0 + np.abs(lhs) + np.abs(rhs))


def empirical_increment_char_fn(params: ProcessParams, s: float, t: float, u: np.ndarray,
                                n_paths: int, seed: int, N: int = 40) -> np.ndarray:
    """Sample mean of exp(i u (X_t - X_s)) over n_paths trajectories sampled on (s, t).

    Args:
        params: Process parameters
        s, t: Times with 0 <= s < t
        u: Arguments of the characteristic function
        n_paths: Ensemble size
        seed: Master seed of the ensemble
        N: Quadrature nodes per kernel

    Returns:
        Complex array shaped like u
    """
    if not (0.0 <= s < t):
        raise DomainError(f"need 0 <= s < t, got ({s}, {t})")
    ensemble = sample_paths(params, TimeGrid(times=(s, t)), seed, n_paths, N=N)
    increments = ensemble.values[:, 1] - ensemble.values[:, 0]
    u_arr = np.asarray(u, dtype=float)
    return np.exp(1j * np.multiply.outer(u_arr, increments)).mean(axis=-1)
