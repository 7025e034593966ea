from typing import Any, Dict, Sequence

from loguru import logger

from .. import __version__
from ..markov.paths import TimeGrid, sample_paths
from ..qcore import ProcessParams
from . import error_result

# Path sampling tools


def sample_table(theta: float, tau: float, q: float, grid: Sequence[float], paths: int, seed: int,
                 nodes: int = 80, threads: int = 1) -> Dict[str, Any]:
    """Sampled trajectories, one row per path and one column per grid time.

    Args:
        theta, tau, q: Process parameters
        grid: Strictly increasing times
        paths: Number of paths
        seed: Master seed
        nodes: Quadrature nodes per kernel
        threads: Worker cap

    Returns:
        Dictionary with columns, rows and run metadata
    """
    try:
        params = ProcessParams(theta=theta, tau=tau, q=q)
        time_grid = TimeGrid(times=tuple(float(t) for t in grid))
        ensemble = sample_paths(params, time_grid, seed, paths, nodes, threads)

        columns = ["path"] + [f"t={t!r}" for t in time_grid.times]
        rows = [[i] + [float(v) for v in ensemble.values[i]] for i in range(paths)]
        logger.info(f"Sampled {paths} paths on {len(time_grid)} times with seed {seed}")
        return {
            "status": "success",
            "command": "sample",
            "metadata": {
                "version": __version__,
                "params": params.model_dump(),
                "grid": list(time_grid.times),
                "paths": paths,
                "seed": seed,
                "nodes": nodes,
            },
            "columns": columns,
            "rows": rows,
        }
    except Exception as e:
        return error_result("sampling paths", e)
