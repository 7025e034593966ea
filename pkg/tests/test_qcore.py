import math

import numpy as np
import pytest
from pydantic import ValidationError

from qharness.errors import DomainError
from qharness.qcore import (
    KernelCoordinates,
    ProcessParams,
    carleman_partial_sum,
    kernel_recurrence,
    marginal_recurrence,
    q_binomial,
    q_factorial,
    q_int,
    q_int_table,
    recurrence_coefficients,
)

# Test q-integers
def test_q_int_values():
    """Test [n]_q on ordinary and boundary values of q."""
    assert q_int(0, 0.5) == 0.0
    assert q_int(3, 0.5) == pytest.approx(1.75)
    assert q_int(5, 1.0) == 5.0
    assert q_int(4, -1.0) == 0.0
    assert q_int(3, -1.0) == 1.0
    assert q_int(7, 0.0) == 1.0
    # closed form above the direct-sum limit
    assert q_int(100, 0.5) == pytest.approx(2.0 * (1.0 - 0.5 ** 100))

def test_q_int_rejects_negative_n():
    """Test that [n]_q needs n >= 0."""
    with pytest.raises(DomainError):
        q_int(-1, 0.5)

def test_q_int_table():
    """Test that the table agrees with single evaluations."""
    table = q_int_table(6, 0.3)
    assert table.shape == (7,)
    for n in range(7):
        assert table[n] == pytest.approx(q_int(n, 0.3))

# Test q-factorials and q-binomials
def test_q_factorial():
    """Test [n]_q! against the product of q-integers."""
    assert q_factorial(0, 0.5) == 1.0
    assert q_factorial(3, 0.5) == pytest.approx(1.0 * 1.5 * 1.75)
    assert q_factorial(5, 1.0) == 120.0
    assert q_factorial(2, -1.0) == 0.0

def test_q_binomial_values():
    """Test Gaussian binomials, including q = -1 where even q-integers vanish."""
    assert q_binomial(4, 2, 0.5) == pytest.approx(2.1875)
    assert q_binomial(4, 2, 1.0) == pytest.approx(6.0)
    assert q_binomial(4, 2, -1.0) == pytest.approx(2.0)
    assert q_binomial(5, 2, -1.0) == pytest.approx(2.0)
    assert q_binomial(6, 3, -1.0) == pytest.approx(0.0)
    assert q_binomial(7, 0, 0.3) == 1.0
    assert q_binomial(7, 7, 0.3) == 1.0

def test_q_binomial_symmetry_and_pascal_rule():
    """Test [n k] = [n n-k] and [n k] = [n-1 k-1] + q^k [n-1 k]."""
    for q in (-1.0, -0.4, 0.0, 0.7, 1.0):
        for n in range(1, 9):
            for k in range(1, n):
                assert q_binomial(n, k, q) == pytest.approx(q_binomial(n, n - k, q), abs=1e-12)
                rule = q_binomial(n - 1, k - 1, q) + q ** k * q_binomial(n - 1, k, q)
                assert q_binomial(n, k, q) == pytest.approx(rule, abs=1e-10)

def test_q_binomial_rejects_bad_indices():
    """Test that k outside 0..n is rejected."""
    with pytest.raises(DomainError):
        q_binomial(3, 4, 0.5)
    with pytest.raises(DomainError):
        q_binomial(3, -1, 0.5)

# Test parameter models
def test_process_params_validation():
    """Test that tau < 0, |q| > 1 and non-finite values are rejected."""
    with pytest.raises(ValidationError):
        ProcessParams(theta=0.0, tau=-0.1, q=0.0)
    with pytest.raises(ValidationError):
        ProcessParams(theta=0.0, tau=0.0, q=1.5)
    with pytest.raises(ValidationError):
        ProcessParams(theta=math.inf, tau=0.0, q=0.0)
    params = ProcessParams(theta=0.5, tau=0.2, q=-1.0)
    assert params.two_point
    assert params.bounded_support is False

def test_kernel_coordinates_validation():
    """Test that kernel coordinates need 0 <= s < t."""
    with pytest.raises(ValidationError):
        KernelCoordinates(x=0.0, s=1.0, t=1.0)
    with pytest.raises(ValidationError):
        KernelCoordinates(x=0.0, s=-0.5, t=1.0)
    with pytest.raises(ValidationError):
        KernelCoordinates(x=math.nan, s=0.0, t=1.0)
    coords = KernelCoordinates(x=0.3, s=1.0, t=2.0)
    assert coords.t == 2.0

# Test recurrence coefficients
def test_kernel_recurrence_example():
    """Test alpha and beta for theta=1, tau=2, q=0.5 at x=0.3, s=1, t=2."""
    params = ProcessParams(theta=1.0, tau=2.0, q=0.5)
    coeffs = kernel_recurrence(params, KernelCoordinates(x=0.3, s=1.0, t=2.0), 2)
    assert np.allclose(coeffs.alpha, [0.3, 1.15, 1.575])
    assert np.allclose(coeffs.beta, [0.0, 1.0, 5.25])
    assert coeffs.order == 2
    assert coeffs.diag_at(1) == pytest.approx(1.15)
    assert coeffs.sub_at(2) == pytest.approx(5.25)
    with pytest.raises(DomainError):
        coeffs.sub_at(0)

def test_recurrence_arrays_are_read_only():
    """Test that cached coefficients cannot be modified in place."""
    coeffs = recurrence_coefficients(ProcessParams(), 0.0, 0.0, 1.0, 3)
    with pytest.raises(ValueError):
        coeffs.alpha[0] = 1.0

def test_recurrence_q_one_is_hermite_like():
    """Test that q = 1, theta = tau = 0 gives alpha_n = x and beta_n = n (t - s)."""
    coeffs = recurrence_coefficients(ProcessParams(q=1.0), 0.4, 1.0, 3.0, 5)
    assert np.allclose(coeffs.alpha, 0.4)
    assert np.allclose(coeffs.beta[1:], [2.0 * n for n in range(1, 6)])

def test_recurrence_q_minus_one_vanishing_beta():
    """Test that beta_2 vanishes at q = -1."""
    coeffs = recurrence_coefficients(ProcessParams(theta=0.5, tau=0.7, q=-1.0), 0.2, 0.5, 1.5, 4)
    assert coeffs.beta[1] == pytest.approx(1.0)
    assert coeffs.beta[2] == 0.0
    assert coeffs.beta[4] == 0.0

def test_marginal_recurrence_needs_positive_time():
    """Test that the martingale-polynomial recurrence needs t > 0."""
    with pytest.raises(DomainError):
        marginal_recurrence(ProcessParams(), 0.0, 3)
    coeffs = marginal_recurrence(ProcessParams(q=0.5), 2.0, 3)
    assert coeffs.alpha[0] == 0.0
    assert coeffs.beta[1] == pytest.approx(2.0)

# Test the Carleman sum
def test_carleman_partial_sum():
    """Test divergence at q = 1 and the skipped zeros at q = -1."""
    coords = KernelCoordinates(x=0.0, s=0.0, t=1.0)
    gaussian = ProcessParams(q=1.0)
    assert carleman_partial_sum(gaussian, coords, 400) > carleman_partial_sum(gaussian, coords, 100) + 1.0
    # beta_n = 1 for odd n and 0 for even n
    assert carleman_partial_sum(ProcessParams(q=-1.0), coords, 10) == pytest.approx(5.0)
