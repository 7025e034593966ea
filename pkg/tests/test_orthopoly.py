import numpy as np
import pytest

from qharness.errors import DomainError, UnsupportedModeError
from qharness.orthopoly import (
    PolynomialFamily,
    bms_cofactors,
    bms_terms,
    check_bms_identity,
    check_convolution_identity,
    convergence_radius,
    convolution_terms,
    eval_p,
    eval_Q,
    evaluate_recurrence,
    generating_fn,
    generating_series,
    norm_squared,
    q_poly,
)
from qharness.qcore import KernelCoordinates, ProcessParams, recurrence_coefficients


def _scale(lhs, terms):
    return 1.0 + abs(lhs) + float(np.sum(np.abs(terms)))

# Test evaluation
def test_evaluate_recurrence_shape():
    """Test that evaluation stacks degrees in front of the point shape."""
    coeffs = recurrence_coefficients(ProcessParams(theta=0.3, tau=0.2, q=0.4), 0.1, 0.5, 1.0, 4)
    values = evaluate_recurrence(coeffs, np.array([-1.0, 0.0, 2.0]))
    assert values.shape == (5, 3)
    assert np.all(values[0] == 1.0)
    assert np.allclose(values[1], np.array([-1.0, 0.0, 2.0]) - 0.1)

def test_low_degree_closed_forms():
    """Test Q_1 and Q_2 against the recurrence written out by hand."""
    params = ProcessParams(theta=0.8, tau=0.5, q=0.3)
    x, s, t, y = 0.4, 0.5, 1.7, -0.9
    coeffs = recurrence_coefficients(params, x, s, t, 2)
    assert q_poly(params, 1, y, x, s, t) == pytest.approx(y - x)
    expected = (y - coeffs.alpha[1]) * (y - x) - coeffs.beta[1]
    assert q_poly(params, 2, y, x, s, t) == pytest.approx(expected)

def test_martingale_polynomials_hermite():
    """Test that q = 1, theta = tau = 0 gives the Hermite polynomials y^2 - t and y^3 - 3ty."""
    params = ProcessParams(q=1.0)
    t, y = 2.0, 1.5
    values = eval_p(params, t, y, 3)
    assert np.allclose(values, [1.0, y, y * y - t, y ** 3 - 3.0 * t * y])

def test_polynomial_family_constructors():
    """Test the validated constructors of PolynomialFamily."""
    params = ProcessParams(theta=0.2, q=0.5)
    family = PolynomialFamily.for_kernel(params, KernelCoordinates(x=0.3, s=0.5, t=1.0), 3)
    assert family.marginal is False
    assert eval_Q(family, 0.3)[1] == pytest.approx(0.0)
    with pytest.raises(DomainError):
        PolynomialFamily.for_marginal(params, 0.0, 3)

def test_norm_squared():
    """Test the monic norm recursion ||Q_n||^2 = beta_1 ... beta_n at q = 1."""
    coeffs = recurrence_coefficients(ProcessParams(q=1.0), 0.0, 0.0, 2.0, 4)
    assert norm_squared(coeffs, 0) == 1.0
    assert norm_squared(coeffs, 3) == pytest.approx(2.0 ** 3 * 6.0)

# Test the convolution identity
def test_convolution_identity_degree_one_and_two():
    """Test the identity in the two degrees where it can be expanded by hand."""
    params = ProcessParams(q=1.0)
    lhs, terms = convolution_terms(params, 0.2, -0.4, 1.1, 0.5, 1.0, 2.0, 1)
    assert lhs == pytest.approx(1.1 - 0.2)
    assert np.allclose(terms, [-0.4 - 0.2, 1.1 + 0.4])
    assert check_convolution_identity(params, 0.2, -0.4, 1.1, 0.5, 1.0, 2.0, 2) < 1e-12

def test_convolution_identity_sweep(param_sets, rng):
    """Test the identity for n <= 8 over random points, q = +-1 included."""
    sets = param_sets + [ProcessParams(theta=0.4, tau=0.6, q=-1.0)]
    for params in sets:
        for _ in range(5):
            x, y, z = rng.uniform(-2.0, 2.0, size=3)
            s, t, u = np.sort(rng.uniform(0.2, 3.0, size=3))
            for n in range(1, 9):
                lhs, terms = convolution_terms(params, x, y, z, s, t, u, n)
                assert abs(lhs - np.sum(terms)) <= 1e-9 * _scale(lhs, terms)

# Test the martingale-increment expansion
def test_bms_cofactors():
    """Test that the leading cofactor is 1 and that n < 1 is rejected."""
    cofactors = bms_cofactors(ProcessParams(theta=0.5, tau=0.3, q=0.2), 0.7, 1.0, 4)
    assert cofactors.shape == (4,)
    assert cofactors[0] == pytest.approx(1.0)
    with pytest.raises(DomainError):
        bms_cofactors(ProcessParams(), 0.0, 1.0, 0)

def test_bms_identity_sweep(param_sets, rng):
    """Test the expansion of Q_n over martingale increments for n <= 8."""
    sets = param_sets + [ProcessParams(theta=-0.5, tau=0.2, q=-1.0)]
    for params in sets:
        for _ in range(5):
            y, z = rng.uniform(-2.0, 2.0, size=2)
            t, u = np.sort(rng.uniform(0.2, 3.0, size=2))
            for n in range(1, 9):
                lhs, terms = bms_terms(params, y, z, t, u, n)
                assert abs(lhs - np.sum(terms)) <= 1e-9 * _scale(lhs, terms)
                assert check_bms_identity(params, y, z, t, u, n) <= 1e-9 * _scale(lhs, terms)

# Test the generating function
def test_generating_fn_semicircle():
    """Test q = 0, theta = tau = 0, x = s = 0 against 1 / (1 - y zeta + t zeta^2)."""
    params = ProcessParams()
    zeta = 0.05
    value = generating_fn(params, zeta, 0.7, 0.0, 0.0, 1.5)
    assert value == pytest.approx(1.0 / (1.0 - 0.7 * zeta + 1.5 * zeta * zeta))

def test_generating_fn_matches_series(rng):
    """Test the infinite product against the truncated power series for |q| <= 0.5."""
    for _ in range(20):
        params = ProcessParams(theta=rng.uniform(-1.0, 1.0), tau=rng.uniform(0.0, 1.0), q=rng.uniform(-0.5, 0.5))
        x, y = rng.uniform(-1.0, 1.0, size=2)
        s, t = np.sort(rng.uniform(0.2, 2.0, size=2))
        zeta = 0.1 * convergence_radius(params, y, x, s, t)
        product = generating_fn(params, zeta, y, x, s, t)
        series = generating_series(params, zeta, y, x, s, t)
        assert product == pytest.approx(series, rel=1e-9, abs=1e-9)

def test_generating_fn_errors():
    """Test that |q| = 1 and points outside the radius are rejected."""
    with pytest.raises(UnsupportedModeError):
        generating_fn(ProcessParams(q=1.0), 0.01, 0.0, 0.0, 0.0, 1.0)
    params = ProcessParams(q=0.5)
    radius = convergence_radius(params, 0.0, 0.0, 0.0, 1.0)
    with pytest.raises(DomainError):
        generating_fn(params, 2.0 * radius, 0.0, 0.0, 0.0, 1.0)
