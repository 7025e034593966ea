from .classical import ClassicalLawType, classical_char_fn, classify_classical, pascal_constants
from .free import (
    FreeMarginalLaw,
    free_atoms,
    free_cauchy_transform,
    free_continued_fraction,
    free_density,
    free_kernel,
    free_marginal_law,
    free_r_transform,
    stieltjes_inversion,
    support_interval,
)
from .qbrownian import (
    qbrownian_density,
    qbrownian_kernel,
    qbrownian_marginal_density,
    qbrownian_two_point,
    qwiener_conditional_variance,
)
from .transition import (
    Atom,
    ClosedFormKernel,
    QuadratureKernel,
    TransitionKernel,
    TwoPointKernel,
    kernel,
    kernel_moment,
    kernel_to_measure,
    support_integral,
    two_point_kernel,
)
