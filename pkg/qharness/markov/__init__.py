from .checks import (
    check_chapman_kolmogorov,
    check_gauss_exactness,
    check_harness_moments,
    check_marginal_moments,
    check_martingale_polynomials,
    check_norm_recursion,
    check_orthogonality,
    check_quadratic_variance_moments,
    check_reverse_variance_moments,
    ck_norms,
    empirical_increment_char_fn,
    hankel_value,
    increment_hankel,
    increment_moment_formulas,
    increment_moments,
    marginal_moment_formulas,
)
from .coefficients import (
    HarnessCoefficients,
    QuadraticVarianceCoefficients,
    conditional_variance,
    harness_coeffs,
    qv_coeffs,
    reverse_conditional_variance,
    solve_qv_system,
)
from .paths import (
    PathEnsemble,
    PathMeasure,
    SamplePath,
    TimeGrid,
    joint_moment,
    path_measure,
    path_uniforms,
    sample_path,
    sample_paths,
    step_measure,
)
