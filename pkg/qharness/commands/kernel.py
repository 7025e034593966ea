from typing import Any, Dict

from loguru import logger

from .. import __version__
from ..errors import DomainError
from ..kernels.free import free_atoms, free_density
from ..kernels.transition import TwoPointKernel, kernel, kernel_to_measure
from ..qcore import KernelCoordinates, ProcessParams
from . import error_result

# Transition kernel tools


def kernel_table(theta: float, tau: float, q: float, x: float, s: float, t: float,
                 nodes: int = 80, with_free_density: bool = False) -> Dict[str, Any]:
    """Nodes and weights of mu_{x,s,t}.

    With with_free_density (q = 0 only) each node row also carries the
    closed-form density, and the closed-form atoms are appended as rows
    flagged atom=true.

    Args:
        theta, tau, q: Process parameters
        x: Value at time s
        s: Start time
        t: End time
        nodes: Quadrature nodes
        with_free_density: Add the closed-form q = 0 columns

    Returns:
        Dictionary with columns, rows and run metadata
    """
    try:
        params = ProcessParams(theta=theta, tau=tau, q=q)
        coords = KernelCoordinates(x=x, s=s, t=t)
        if with_free_density and q != 0.0:
            raise DomainError(f"the free density column needs q = 0, got q={q}")

        k = kernel(params, coords, nodes)
        measure = kernel_to_measure(k)

        columns = ["y", "weight", "atom"]
        if with_free_density:
            columns.insert(2, "free_density")
        rows = []
        for y, w in zip(measure.nodes, measure.weights):
            row = [float(y), float(w)]
            if with_free_density:
                row.append(free_density(theta, tau, x, s, t, float(y)))
            row.append(False)
            rows.append(row)
        if with_free_density:
            for atom in free_atoms(theta, tau, x, s, t):
                rows.append([atom.location, atom.mass, None, True])

        logger.info(f"Kernel from x={x} at s={s} to t={t}: {measure.size} nodes")
        return {
            "status": "success",
            "command": "kernel",
            "metadata": {
                "version": __version__,
                "params": params.model_dump(),
                "x": x,
                "s": s,
                "t": t,
                "nodes": nodes,
                "kind": "two_point" if isinstance(k, TwoPointKernel) else "quadrature",
            },
            "columns": columns,
            "rows": rows,
        }
    except Exception as e:
        return error_result("building kernel table", e)
