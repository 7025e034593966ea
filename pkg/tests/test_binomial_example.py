import math

import numpy as np
import pytest
from pydantic import ValidationError

from qharness.binomial_example import (
    BinomialChain,
    RateProfile,
    chain_chapman_kolmogorov,
    chain_covariance,
    conditional_pmf,
    enumerated_covariance,
    fit_chain_coefficients,
    joint_law,
    marginal_pmf,
    transition_matrix,
    verify_chain_identities,
)
from qharness.errors import DomainError

STEPPED = RateProfile(breakpoints=(0.0, 1.0, 2.0, 3.0), values=(0.1, 0.3, 0.05))
TIMES = (0.3, 1.2, 2.5)


# Test rate profiles
def test_rate_profile_cumulative():
    """Test pi(s, t) on a piecewise-constant profile."""
    assert STEPPED.horizon == 3.0
    assert STEPPED.cumulative(0.5, 2.5) == pytest.approx(0.375)
    assert STEPPED.cumulative(0.0, 3.0) == pytest.approx(0.45)
    assert RateProfile.constant(0.2, 3.0).cumulative(1.0, 2.5) == pytest.approx(0.3)

def test_rate_profile_validation():
    """Test that total mass >= 1 and malformed breakpoints are rejected."""
    with pytest.raises(ValidationError):
        RateProfile.constant(0.5, 2.0)
    with pytest.raises(ValidationError):
        RateProfile(breakpoints=(0.5, 1.0), values=(0.1,))
    with pytest.raises(ValidationError):
        RateProfile(breakpoints=(0.0, 1.0, 1.0), values=(0.1, 0.1))
    with pytest.raises(ValidationError):
        RateProfile(breakpoints=(0.0, 1.0), values=(-0.1,))

def test_chain_trial_bounds():
    """Test that m must lie in 1..12."""
    with pytest.raises(ValidationError):
        BinomialChain(m=13, rate=STEPPED)
    with pytest.raises(ValidationError):
        BinomialChain(m=0, rate=STEPPED)

# Test the laws of the chain
def test_transition_and_marginal_laws():
    """Test that transition rows, marginals and the joint law are probability distributions."""
    chain = BinomialChain(m=5, rate=STEPPED)
    P = transition_matrix(chain, 0.3, 1.2)
    assert np.allclose(P.sum(axis=1), 1.0, atol=1e-12)
    assert np.allclose(np.tril(P, -1), 0.0)
    assert marginal_pmf(chain, 1.2).sum() == pytest.approx(1.0, abs=1e-12)
    assert joint_law(chain, *TIMES).sum() == pytest.approx(1.0, abs=1e-12)
    with pytest.raises(DomainError):
        transition_matrix(chain, 1.0, 3.5)

def test_chain_chapman_kolmogorov():
    """Test P(s,t) P(t,u) = P(s,u)."""
    for m in (1, 4, 12):
        chain = BinomialChain(m=m, rate=STEPPED)
        assert chain_chapman_kolmogorov(chain, *TIMES) <= 1e-12

# Test the regression structure
def test_chain_identities_hold_for_every_m():
    """Test the two-sided conditional mean and variance by enumeration for m = 1..6."""
    for profile in (RateProfile.constant(0.2, 3.0), STEPPED):
        for m in range(1, 7):
            residuals = verify_chain_identities(BinomialChain(m=m, rate=profile), *TIMES)
            assert residuals.linear_regression <= 1e-12
            assert residuals.quadratic_variance <= 1e-12

def test_fitted_coefficients_do_not_depend_on_m():
    """Test a = 1 - r, b = r, kappa = r (1 - r) with r = pi(s,t) / pi(s,u)."""
    s, t, u = TIMES
    ratio = STEPPED.cumulative(s, t) / STEPPED.cumulative(s, u)
    for m in (1, 3, 6):
        a, b, kappa = fit_chain_coefficients(BinomialChain(m=m, rate=STEPPED), s, t, u)
        assert a == pytest.approx(1.0 - ratio, abs=1e-10)
        assert b == pytest.approx(ratio, abs=1e-10)
        assert kappa == pytest.approx(ratio * (1.0 - ratio), abs=1e-10)

def test_conditional_pmf_is_binomial():
    """Test that Y_t - Y_s given Y_s = i, Y_u = i + n is Binomial(n, pi(s,t) / pi(s,u))."""
    s, t, u = TIMES
    chain = BinomialChain(m=6, rate=STEPPED)
    r = chain.pi(s, t) / chain.pi(s, u)
    pmf = conditional_pmf(chain, s, t, u, 1, 4)
    expected = [math.comb(4, k) * r ** k * (1.0 - r) ** (4 - k) for k in range(5)]
    assert np.allclose(pmf, expected, atol=1e-12)
    with pytest.raises(DomainError):
        conditional_pmf(chain, s, t, u, 3, 4)

def test_chain_covariance():
    """Test Cov(Y_s, Y_t) = m pi(0,s) (1 - pi(0,t)) against enumeration."""
    chain = BinomialChain(m=7, rate=STEPPED)
    for s, t in ((0.3, 1.2), (1.2, 2.5), (0.8, 0.8)):
        assert chain_covariance(chain, s, t) == pytest.approx(enumerated_covariance(chain, s, t), abs=1e-12)
    with pytest.raises(DomainError):
        chain_covariance(chain, 2.0, 1.0)
