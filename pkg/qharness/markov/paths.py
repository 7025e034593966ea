"""Finite-dimensional laws and sampled trajectories of the Markov process."""

from concurrent.futures import ThreadPoolExecutor
from functools import lru_cache
from typing import Dict, List, Sequence, Tuple

import numpy as np
from loguru import logger
from pydantic import BaseModel, ConfigDict, field_validator

from ..errors import DomainError
from ..kernels.transition import kernel, kernel_to_measure
from ..qcore import KernelCoordinates, ProcessParams
from ..quadrature import DiscreteMeasure


class TimeGrid(BaseModel):
    """Strictly increasing sampling times, the first one >= 0."""
    model_config = ConfigDict(frozen=True)

    times: Tuple[float, ...]

    @field_validator("times")
    @classmethod
    def _increasing(cls, times: Tuple[float, ...]) -> Tuple[float, ...]:
        if len(times) == 0:
            raise ValueError("time grid is empty")
        if times[0] < 0:
            raise ValueError(f"times must be >= 0, got {times[0]}")
        if any(b <= a for a, b in zip(times, times[1:])):
            raise ValueError("times must be strictly increasing")
        return times

    def __len__(self) -> int:
        return len(self.times)


class SamplePath(BaseModel):
    """One trajectory X at the grid times; (seed, index) fixes its random stream."""
    model_config = ConfigDict(frozen=True)

    grid: TimeGrid
    values: Tuple[float, ...]
    seed: int
    index: int = 0


class PathEnsemble(BaseModel):
    """n_paths trajectories as a (n_paths, len(grid)) array."""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    grid: TimeGrid
    values: np.ndarray
    seed: int

    def path(self, index: int) -> SamplePath:
        return SamplePath(grid=self.grid, values=tuple(float(v) for v in self.values[index]),
                          seed=self.seed, index=index)


class PathMeasure(BaseModel):
    """Discrete law of (X_{t_1}, ..., X_{t_k}): rows of values with probabilities."""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    times: Tuple[float, ...]
    values: np.ndarray
    probs: np.ndarray


def step_measure(params: ProcessParams, x: float, s: float, t: float, N: int) -> DiscreteMeasure:
    """Discrete kernel from X_s = x to time t."""
    return kernel_to_measure(kernel(params, KernelCoordinates(x=x, s=s, t=t), N))


@lru_cache(maxsize=256)
def path_measure(params: ProcessParams, times: Tuple[float, ...], N: int) -> PathMeasure:
    """Nested-quadrature law of X at the given times, started from X_0 = 0.

    Expectations of polynomials of total degree <= 2N - 1 are exact, since each
    conditional moment is a polynomial of the same degree in the previous value.

    Args:
        params: Process parameters
        times: Strictly increasing times, first >= 0
        N: Nodes per kernel

    Returns:
        PathMeasure with one row per node combination
    """
    grid = TimeGrid(times=tuple(float(t) for t in times))
    values = np.zeros((1, 0))
    probs = np.ones(1)
    previous = 0.0
    for t in grid.times:
        if t == 0.0:
            values = np.hstack([values, np.zeros((len(probs), 1))])
            continue
        last = values[:, -1] if values.shape[1] else np.zeros(len(probs))
        new_rows: List[np.ndarray] = []
        new_probs: List[np.ndarray] = []
        measures: Dict[float, DiscreteMeasure] = {}
        for row, (x, p) in enumerate(zip(last, probs)):
            key = float(x)
            if key not in measures:
                measures[key] = step_measure(params, key, previous, t, N)
            m = measures[key]
            block = np.repeat(values[row:row + 1], m.size, axis=0)
            new_rows.append(np.hstack([block, m.nodes[:, None]]))
            new_probs.append(p * m.weights)
        values = np.vstack(new_rows)
        probs = np.concatenate(new_probs)
        previous = t
    logger.debug(f"path measure at {grid.times} has {len(probs)} atoms")
    values.setflags(write=False)
    probs.setflags(write=False)
    return PathMeasure(times=grid.times, values=values, probs=probs)


def joint_moment(params: ProcessParams, times: Sequence[float], powers: Sequence[int], N: int) -> float:
    """E[prod_i X_{t_i}^{k_i}] under the nested-quadrature law."""
    if len(times) != len(powers):
        raise DomainError("times and powers must have the same length")
    pm = path_measure(params, tuple(float(t) for t in times), N)
    integrand = np.prod(pm.values ** np.asarray(powers, dtype=int), axis=1)
    return float(np.dot(pm.probs, integrand))


def path_uniforms(seed: int, index: int, n_steps: int) -> np.ndarray:
    """Uniform draws of path `index`; depends on (seed, index) only."""
    rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(index,)))
    return rng.random(n_steps)


def _inverse_cdf(m: DiscreteMeasure, u: np.ndarray) -> np.ndarray:
    # ties go to the lower node
    cumulative = np.cumsum(m.weights)
    idx = np.searchsorted(cumulative, u, side="left")
    return m.nodes[np.clip(idx, 0, m.size - 1)]


def sample_paths(params: ProcessParams, grid: TimeGrid, seed: int, n_paths: int,
                 N: int = 80, threads: int = 1) -> PathEnsemble:
    """Sample n_paths trajectories on the grid, started from X_0 = 0.

    Paths sharing a value share one kernel per step; kernels are built in a
    thread pool of `threads` workers. The output depends only on
    (params, grid, seed, N), never on the thread count.

    Args:
        params: Process parameters
        grid: Sampling times
        seed: Master seed
        n_paths: Number of paths
        N: Quadrature nodes per kernel
        threads: Worker cap for kernel construction

    Returns:
        PathEnsemble
    """
    if n_paths < 1:
        raise DomainError(f"n_paths must be >= 1, got {n_paths}")
    uniforms = np.vstack([path_uniforms(seed, i, len(grid)) for i in range(n_paths)])
    values = np.zeros((n_paths, len(grid)))
    current = np.zeros(n_paths)
    previous = 0.0

    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        for j, t in enumerate(grid.times):
            if t == 0.0:
                values[:, j] = 0.0
                continue
            starts, inverse = np.unique(current, return_inverse=True)
            s = previous
            measures = list(pool.map(lambda x: step_measure(params, float(x), s, t, N), starts))
            inverse = np.ravel(inverse)
            order = np.argsort(inverse, kind="stable")
            bounds = np.searchsorted(inverse[order], np.arange(len(starts) + 1))
            step = np.empty(n_paths)
            for k, m in enumerate(measures):
                members = order[bounds[k]:bounds[k + 1]]
                step[members] = _inverse_cdf(m, uniforms[members, j])
            values[:, j] = step
            current = step
            previous = t
            logger.debug(f"step to t={t}: {len(starts)} kernels for {n_paths} paths")

    return PathEnsemble(grid=grid, values=values, seed=seed)


def sample_path(params: ProcessParams, grid: TimeGrid, seed: int, N: int = 80) -> SamplePath:
    """Single trajectory: path 0 of the ensemble for `seed`."""
    return sample_paths(params, grid, seed, 1, N).path(0)
