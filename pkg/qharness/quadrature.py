"""Jacobi operators and Gauss quadrature for the measures mu_{x,s,t}."""

from functools import lru_cache
from typing import Tuple

import numpy as np
from loguru import logger
from pydantic import BaseModel, ConfigDict, model_validator
from scipy.linalg import LinAlgError, eigh_tridiagonal

from .errors import InconsistencyError, NumericalError
from .qcore import KernelCoordinates, ProcessParams, RecurrenceCoeffs, kernel_recurrence

TRUNCATION_TOL = 1e-14
NEGATIVE_TOL = 1e-12
# Weights below this at both ends stop node escalation
NEGLIGIBLE_WEIGHT = 1e-14
WEIGHT_AGREEMENT = 1e-13
WEIGHT_SUM_TOL = 1e-12


class JacobiOperator(BaseModel):
    """Symmetric tridiagonal operator of a three-step recurrence.

    diag holds alpha_0..alpha_{N-1} and offdiag sqrt(beta_1)..sqrt(beta_{N-1});
    only the leading effective_size block defines the measure.
    """
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    diag: np.ndarray
    offdiag: np.ndarray
    effective_size: int

    @model_validator(mode="after")
    def _consistent(self) -> "JacobiOperator":
        if len(self.offdiag) != max(len(self.diag) - 1, 0):
            raise ValueError("offdiag must be one shorter than diag")
        if not 1 <= self.effective_size <= len(self.diag):
            raise ValueError(f"effective_size {self.effective_size} out of range")
        if np.any(self.offdiag < 0):
            raise ValueError("offdiag entries must be non-negative")
        self.diag.setflags(write=False)
        self.offdiag.setflags(write=False)
        return self

    @property
    def size(self) -> int:
        return len(self.diag)

    def active(self) -> Tuple[np.ndarray, np.ndarray]:
        """Diagonal and off-diagonal of the leading effective_size block."""
        n = self.effective_size
        return self.diag[:n], self.offdiag[:n - 1]

    def node_bounds(self) -> Tuple[float, float]:
        d, e = self.active()
        spread = 2.0 * float(e.max()) if len(e) else 0.0
        return float(d.min()) - spread, float(d.max()) + spread

    def dump(self) -> str:
        d, e = self.active()
        return (
            f"JacobiOperator(size={self.size}, effective_size={self.effective_size})\n"
            f"diag={np.array2string(d, precision=17)}\n"
            f"offdiag={np.array2string(e, precision=17)}"
        )


class DiscreteMeasure(BaseModel):
    """Probability measure on finitely many nodes, nodes ascending."""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    nodes: np.ndarray
    weights: np.ndarray

    @model_validator(mode="after")
    def _valid(self) -> "DiscreteMeasure":
        if self.nodes.shape != self.weights.shape or self.nodes.ndim != 1 or len(self.nodes) == 0:
            raise ValueError("nodes and weights must be non-empty 1-d arrays of equal length")
        if np.any(self.weights <= 0):
            raise ValueError("weights must be positive")
        if abs(float(np.sum(self.weights)) - 1.0) > 1e-12:
            raise ValueError(f"weights sum to {np.sum(self.weights)}, not 1")
        if np.any(np.diff(self.nodes) <= 0):
            raise ValueError("nodes must be strictly increasing")
        self.nodes.setflags(write=False)
        self.weights.setflags(write=False)
        return self

    @property
    def size(self) -> int:
        return len(self.nodes)


def jacobi_from_coefficients(coeffs: RecurrenceCoeffs, N: int, scale: float) -> JacobiOperator:
    """Symmetrize the first N rows of a recurrence, truncating at the first vanishing beta_n.

    Args:
        coeffs: Coefficients up to at least order N - 1
        N: Requested operator size
        scale: Size of the coefficients, used for the truncation tolerances

    Returns:
        JacobiOperator of size N
    """
    if N < 1:
        raise ValueError(f"N must be >= 1, got {N}")
    diag = np.array(coeffs.alpha[:N], dtype=float)
    beta = np.array(coeffs.beta[1:N], dtype=float)

    negative = np.nonzero(beta < -NEGATIVE_TOL * scale)[0]
    if len(negative):
        n = int(negative[0]) + 1
        raise InconsistencyError(f"beta_{n} = {beta[n - 1]} is negative")

    effective = N
    vanishing = np.nonzero(beta <= TRUNCATION_TOL * scale)[0]
    if len(vanishing):
        effective = int(vanishing[0]) + 1
    offdiag = np.sqrt(np.clip(beta, 0.0, None))
    return JacobiOperator(diag=diag, offdiag=offdiag, effective_size=effective)


def build_jacobi(params: ProcessParams, coords: KernelCoordinates, N: int) -> JacobiOperator:
    """Jacobi operator of mu_{x,s,t} with N rows."""
    coeffs = kernel_recurrence(params, coords, max(N - 1, 0))
    J = jacobi_from_coefficients(coeffs, N, coords.t + params.tau + 1.0)
    if J.effective_size < N:
        logger.debug(f"Jacobi operator truncated to {J.effective_size} rows for {params} at {coords}")
    return J


def _christoffel_weights(d: np.ndarray, e: np.ndarray, nodes: np.ndarray) -> np.ndarray:
    # w_i = 1 / sum_k phat_k(node_i)^2 with orthonormal phat_k; unstable at isolated nodes
    n = len(d)
    prev = np.zeros_like(nodes)
    cur = np.ones_like(nodes)
    total = np.ones_like(nodes)
    with np.errstate(over="ignore", invalid="ignore"):
        for k in range(n - 1):
            nxt = ((nodes - d[k]) * cur - (e[k - 1] * prev if k > 0 else 0.0)) / e[k]
            prev, cur = cur, nxt
            total = total + cur * cur
        return 1.0 / total


def gauss_measure(J: JacobiOperator) -> DiscreteMeasure:
    """Golub-Welsch: nodes are eigenvalues of J, weights the squared first
    eigenvector components.

    A Christoffel number replaces the eigenvector weight of a node only when the
    two agree to WEIGHT_AGREEMENT; tiny tail weights then keep relative accuracy.

    Args:
        J: Jacobi operator

    Returns:
        DiscreteMeasure with effective_size nodes

    Raises:
        NumericalError: the eigen-solver failed, or the weights are not a
            probability vector to WEIGHT_SUM_TOL
    """
    d, e = J.active()
    if len(d) == 1:
        return DiscreteMeasure(nodes=np.array([d[0]]), weights=np.array([1.0]))

    try:
        nodes, vectors = eigh_tridiagonal(d, e)
    except (LinAlgError, ValueError) as exc:
        logger.error(f"Eigen-solver failed on a {len(d)}-row operator: {str(exc)}")
        raise NumericalError(f"eigen-solver did not converge: {exc}", dump=J.dump()) from exc

    if not np.all(np.isfinite(nodes)):
        raise NumericalError("eigen-solver returned non-finite nodes", dump=J.dump())

    weights = vectors[0, :] ** 2
    christoffel = _christoffel_weights(d, e, nodes)
    trusted = np.isfinite(christoffel) & (christoffel > 0) & (np.abs(christoffel - weights) <= WEIGHT_AGREEMENT)
    weights = np.where(trusted, christoffel, weights)

    total = float(np.sum(weights))
    if np.any(weights <= 0) or abs(total - 1.0) > WEIGHT_SUM_TOL:
        logger.error(f"Gauss weights are not a probability vector: sum={total!r}, min={weights.min()!r}")
        raise NumericalError(f"Gauss weights sum to {total!r} with minimum {weights.min()!r}", dump=J.dump())

    order = np.argsort(nodes)
    nodes, weights = nodes[order], weights[order] / total
    return DiscreteMeasure(nodes=nodes, weights=weights)


def moment(m: DiscreteMeasure, k: int) -> float:
    """k-th moment sum w_i y_i^k."""
    if k < 0:
        raise ValueError(f"moment order must be >= 0, got {k}")
    return float(np.dot(m.weights, m.nodes ** k))


def absolute_moment(m: DiscreteMeasure, k: int) -> float:
    return float(np.dot(m.weights, np.abs(m.nodes) ** k))


def _tridiagonal_apply(d: np.ndarray, e: np.ndarray, v: np.ndarray) -> np.ndarray:
    out = d * v
    out[:-1] += e * v[1:]
    out[1:] += e * v[:-1]
    return out


def oracle_moment(J: JacobiOperator, k: int) -> float:
    """e_0^T J^k e_0 by repeated products, without any eigen-decomposition."""
    d, e = J.active()
    left = np.zeros(len(d))
    left[0] = 1.0
    right = left.copy()
    for _ in range(k // 2):
        left = _tridiagonal_apply(d, e, left)
    for _ in range(k - k // 2):
        right = _tridiagonal_apply(d, e, right)
    return float(np.dot(left, right))


def resolvent(m: DiscreteMeasure, z: complex) -> complex:
    """Cauchy transform sum w_i / (z - y_i) of a discrete measure."""
    return complex(np.sum(m.weights / (z - m.nodes)))


@lru_cache(maxsize=4096)
def kernel_measure(params: ProcessParams, coords: KernelCoordinates, N: int) -> DiscreteMeasure:
    """Gauss measure of mu_{x,s,t}; cached since every verification reuses kernels."""
    return gauss_measure(build_jacobi(params, coords, N))


def marginal_measure(params: ProcessParams, t: float, N: int) -> DiscreteMeasure:
    """Gauss measure of the law of X_t (x = 0, s = 0)."""
    return kernel_measure(params, KernelCoordinates(x=0.0, s=0.0, t=t), N)


def escalate_nodes(params: ProcessParams, coords: KernelCoordinates, N: int,
                   max_nodes: int) -> Tuple[DiscreteMeasure, int]:
    """Double N up to max_nodes while the outermost weights are not negligible.

    Only q = 1 has unbounded support; other q return the N-node measure.

    Returns:
        The measure and the node count used
    """
    m = kernel_measure(params, coords, N)
    if params.q != 1.0:
        return m, N
    while N < max_nodes and max(m.weights[0], m.weights[-1]) > NEGLIGIBLE_WEIGHT:
        N = min(2 * N, max_nodes)
        logger.warning(f"Escalating quadrature to {N} nodes for {params}")
        m = kernel_measure(params, coords, N)
    return m, N
