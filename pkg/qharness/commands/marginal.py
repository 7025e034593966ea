from typing import Any, Dict

from loguru import logger

from .. import __version__
from ..kernels.qbrownian import qbrownian_marginal_density
from ..kernels.transition import kernel, kernel_to_measure
from ..qcore import KernelCoordinates, ProcessParams
from ..quadrature import escalate_nodes, moment
from . import error_result

# Marginal law tools


def marginal_table(theta: float, tau: float, q: float, t: float, nodes: int = 80,
                   k_terms: int = 200, max_nodes: int = 200) -> Dict[str, Any]:
    """Nodes and weights of the law of X_t started from X_0 = 0.

    Args:
        theta, tau, q: Process parameters
        t: Time, > 0
        nodes: Quadrature nodes
        k_terms: Product truncation for the closed-form density column
        max_nodes: Escalation cap for q = 1

    Returns:
        Dictionary with columns, rows, moments 1..4 and run metadata
    """
    try:
        params = ProcessParams(theta=theta, tau=tau, q=q)
        coords = KernelCoordinates(x=0.0, s=0.0, t=t)
        if params.q == 1.0:
            measure, used = escalate_nodes(params, coords, nodes, max(nodes, max_nodes))
        else:
            measure, used = kernel_to_measure(kernel(params, coords, nodes)), nodes

        with_density = abs(q) < 1.0 and theta == 0.0 and tau == 0.0
        columns = ["y", "weight"] + (["density"] if with_density else [])
        rows = []
        for y, w in zip(measure.nodes, measure.weights):
            row = [float(y), float(w)]
            if with_density:
                row.append(qbrownian_marginal_density(q, t, float(y), k_terms))
            rows.append(row)

        moments = {str(k): moment(measure, k) for k in range(1, 5)}
        logger.info(f"Marginal at t={t} for {params}: {measure.size} nodes")
        return {
            "status": "success",
            "command": "marginal",
            "metadata": {
                "version": __version__,
                "params": params.model_dump(),
                "t": t,
                "nodes": used,
                "effective_nodes": measure.size,
            },
            "columns": columns,
            "rows": rows,
            "moments": moments,
        }
    except Exception as e:
        return error_result("building marginal table", e)
