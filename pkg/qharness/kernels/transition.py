"""Transition kernels P_{s,t}(x, dy) = mu_{x,s,t}(dy)."""

import math
from typing import Callable, List, Literal, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from ..errors import DomainError
from ..qcore import KernelCoordinates, ProcessParams
from ..quadrature import DiscreteMeasure, kernel_measure, moment


class Atom(BaseModel):
    """Point mass of a closed-form kernel."""
    model_config = ConfigDict(frozen=True)

    location: float
    mass: float = Field(..., gt=0.0, le=1.0 + 1e-12)


class QuadratureKernel(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: Literal["quadrature"] = "quadrature"
    measure: DiscreteMeasure


class TwoPointKernel(BaseModel):
    """Kernel supported on node_minus < node_plus (q = -1)."""
    model_config = ConfigDict(frozen=True)

    kind: Literal["two_point"] = "two_point"
    node_minus: float
    node_plus: float
    weight_minus: float = Field(..., ge=0.0)
    weight_plus: float = Field(..., ge=0.0)

    def as_measure(self) -> DiscreteMeasure:
        nodes, weights = [], []
        for node, weight in ((self.node_minus, self.weight_minus), (self.node_plus, self.weight_plus)):
            if weight > 0:
                nodes.append(node)
                weights.append(weight)
        weights_arr = np.array(weights)
        return DiscreteMeasure(nodes=np.array(nodes), weights=weights_arr / weights_arr.sum())


class ClosedFormKernel(BaseModel):
    """Density on a support interval plus finitely many atoms."""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    kind: Literal["closed_form"] = "closed_form"
    density: Callable[[float], float]
    atoms: List[Atom] = []
    support: Tuple[float, float]

    def total_mass(self, n_points: int = 4000) -> float:
        return support_integral(self.density, *self.support, n_points=n_points) + sum(a.mass for a in self.atoms)


TransitionKernel = Union[QuadratureKernel, TwoPointKernel, ClosedFormKernel]


def support_integral(f: Callable[[float], float], lo: float, hi: float, n_points: int = 2000) -> float:
    """Integral of f over [lo, hi] for densities with square-root edges.

    Substitutes y = mid + half*cos(phi); the integrand becomes smooth and
    periodic in phi, so the trapezoid rule converges spectrally.
    """
    if not hi > lo:
        raise DomainError(f"empty support [{lo}, {hi}]")
    mid, half = 0.5 * (lo + hi), 0.5 * (hi - lo)
    phi = np.linspace(0.0, math.pi, n_points + 1)[1:-1]
    values = np.array([f(mid + half * c) for c in np.cos(phi)])
    return float(np.sum(values * np.sin(phi)) * half * math.pi / n_points)


def two_point_kernel(params: ProcessParams, coords: KernelCoordinates) -> TwoPointKernel:
    """Kernel at q = -1 from the 2x2 Jacobi block (beta_2 vanishes).

    alpha_0 = x, alpha_1 = theta - x and beta_1 = t - s; the weight of an
    eigenvalue lam is (lam - alpha_1)^2 / ((lam - alpha_1)^2 + beta_1).
    """
    x = coords.x
    a0, a1, b1 = x, params.theta - x, coords.t - coords.s
    center = 0.5 * (a0 + a1)
    radius = math.sqrt((0.5 * (a0 - a1)) ** 2 + b1)
    lo, hi = center - radius, center + radius

    def weight(lam: float) -> float:
        d2 = (lam - a1) ** 2
        return d2 / (d2 + b1)

    w_lo, w_hi = weight(lo), weight(hi)
    total = w_lo + w_hi
    return TwoPointKernel(node_minus=lo, node_plus=hi, weight_minus=w_lo / total, weight_plus=w_hi / total)


def kernel(params: ProcessParams, coords: KernelCoordinates, N: int = 80) -> TransitionKernel:
    """Transition kernel mu_{x,s,t}.

    Args:
        params: Process parameters
        coords: Kernel coordinates
        N: Quadrature nodes

    Returns:
        TwoPointKernel for q = -1, otherwise a QuadratureKernel
    """
    if params.two_point:
        return two_point_kernel(params, coords)
    return QuadratureKernel(measure=kernel_measure(params, coords, N))


def kernel_to_measure(k: TransitionKernel) -> DiscreteMeasure:
    """Discrete measure behind a sampling kernel."""
    if isinstance(k, QuadratureKernel):
        return k.measure
    if isinstance(k, TwoPointKernel):
        return k.as_measure()
    raise DomainError("closed-form kernels are not sampled")


def kernel_moment(k: TransitionKernel, order: int, n_points: int = 4000) -> float:
    """order-th moment of a kernel of any kind."""
    if isinstance(k, ClosedFormKernel):
        continuous = support_integral(lambda y: y ** order * k.density(y), *k.support, n_points=n_points)
        return continuous + sum(a.mass * a.location ** order for a in k.atoms)
    return moment(kernel_to_measure(k), order)
