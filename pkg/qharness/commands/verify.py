"""Verification battery behind `qharness verify`.

Each suite draws admissible parameters and coordinates from a seeded stream,
evaluates residuals of one family of identities and reports the worst one
per check against a fixed tolerance.
"""

import math
from collections import defaultdict
from typing import Any, Callable, Dict, List, Sequence

import numpy as np
from loguru import logger
from pydantic import BaseModel, Field

from .. import __version__
from ..binomial_example import (
    BinomialChain,
    RateProfile,
    chain_chapman_kolmogorov,
    chain_covariance,
    enumerated_covariance,
    fit_chain_coefficients,
    verify_chain_identities,
)
from ..errors import DomainError
from ..kernels.classical import classical_char_fn, classify_classical
from ..kernels.free import (
    free_atoms,
    free_cauchy_transform,
    free_continued_fraction,
    free_density,
    free_kernel,
    free_r_transform,
    stieltjes_inversion,
    support_interval,
)
from ..markov.checks import (
    check_chapman_kolmogorov,
    check_gauss_exactness,
    check_harness_moments,
    check_marginal_moments,
    check_martingale_polynomials,
    check_quadratic_variance_moments,
    check_reverse_variance_moments,
    ck_norms,
    empirical_increment_char_fn,
    hankel_value,
    increment_hankel,
    increment_moment_formulas,
    increment_moments,
)
from ..markov.coefficients import qv_coeffs, solve_qv_system
from ..markov.paths import step_measure
from ..orthopoly import (
    bms_terms,
    convergence_radius,
    convolution_terms,
    eval_p,
    generating_fn,
    generating_series,
)
from ..qcore import KernelCoordinates, ProcessParams
from ..quadrature import kernel_measure, resolvent
from . import error_result

REPORT_SCHEMA = "qharness.verify/1"
BOUNDARY_Q = (-1.0, -0.99, 0.0, 0.5, 0.99, 1.0)
IDENTITY_Q = (-1.0, 1.0)
MAX_DEGREE = 8
GAUSS_NODES = (10, 40, 80)

TOLERANCES: Dict[str, float] = {
    "chapman_kolmogorov": 1e-8,
    "martingale_polynomials": 1e-8,
    "harness_moments": 1e-7,
    "quadratic_variance_moments": 1e-7,
    "reverse_variance_moments": 1e-7,
    "qv_coefficient_invariants": 1e-12,
    "qv_closed_form_vs_solve": 1e-9,
    "convolution_identity": 1e-9,
    "bms_identity": 1e-9,
    "generating_product": 1e-8,
    "binomial_linear_regression": 1e-12,
    "binomial_quadratic_variance": 1e-12,
    "binomial_chapman_kolmogorov": 1e-12,
    "binomial_covariance": 1e-12,
    "binomial_m_independence": 1e-12,
    "marginal_moments": 1e-9,
    "gauss_exactness": 1e-10,
    "increment_moments": 1e-8,
    "hankel_formula": 1e-8,
    "hankel_positivity": 1e-10,
    "free_resolvent": 1e-8,
    "free_stieltjes_inversion": 1e-4,
    "free_total_mass": 1e-8,
    "free_r_consistency": 1e-8,
    "free_atoms": 1e-8,
    "classical_char_fn": 1e-8,
    "classical_increment_char_fn": 0.02,
    "classical_kurtosis": 1e-9,
}

RATE_PROFILES = (
    RateProfile.constant(0.2, 3.0),
    RateProfile(breakpoints=(0.0, 1.0, 2.0, 3.0), values=(0.1, 0.3, 0.05)),
    RateProfile(breakpoints=(0.0, 0.5, 3.0), values=(0.4, 0.1)),
)
CHAIN_TIMES = (0.3, 1.2, 2.5)

# one (theta, tau) per classical law: Wiener, Poisson, Pascal, Gamma, Meixner
CLASSICAL_REGIMES = ((0.0, 0.0), (1.0, 0.0), (2.0, 0.5), (2.0, 1.0), (1.0, 1.0))
CLASSICAL_PATHS = 40000
CLASSICAL_U = np.linspace(-1.0, 1.0, 20)

# (theta, tau, s, x, t) of the two atom-bearing free regimes and the expected atom
FREE_ATOM_CASES = (
    ((2.0, 0.0, 0.0, 0.0, 1.0), (-0.5, 0.75)),
    ((2.0, 0.5, 0.0, 0.0, 0.5),
     (-0.5 * (2.0 - math.sqrt(2.0)), 1.0 - 0.5 * (2.0 - math.sqrt(2.0)) / math.sqrt(2.0))),
)


class CheckResult(BaseModel):
    name: str
    max_residual: float
    tolerance: float
    passed: bool


class VerificationReport(BaseModel):
    """Versioned verification report; the layout is frozen per schema string."""
    schema_version: str = REPORT_SCHEMA
    version: str = __version__
    suite: str
    sweep: int
    seed: int
    nodes: int
    checks: List[CheckResult] = Field(default_factory=list)
    passed: bool = True


class SuiteContext(BaseModel):
    sweep: int
    nodes: int
    marginal_nodes: int = 80
    resolvent_nodes: int = 200


Residuals = Dict[str, List[float]]


# Random draws

def draw_params(rng: np.random.Generator, bounded: bool = False) -> ProcessParams:
    """Admissible (theta, tau, q); half of the unbounded draws sit on boundary values of q."""
    if bounded:
        return ProcessParams(theta=rng.uniform(-1.0, 1.0), tau=rng.uniform(0.0, 1.0), q=rng.uniform(-0.9, 0.9))
    if rng.random() < 0.5:
        q = float(rng.choice(BOUNDARY_Q))
    else:
        q = rng.uniform(-0.95, 1.0)
    return ProcessParams(theta=rng.uniform(-1.5, 1.5), tau=rng.uniform(0.0, 1.5), q=q)


def draw_times(rng: np.random.Generator, k: int, lo: float = 0.2, hi: float = 3.0,
               gap: float = 0.1) -> List[float]:
    """k sorted times in (lo, hi) at least `gap` apart."""
    if (k - 1) * gap >= hi - lo:
        raise DomainError(f"cannot fit {k} times {gap} apart into ({lo}, {hi})")
    while True:
        times = np.sort(rng.uniform(lo, hi, size=k))
        if k == 1 or np.min(np.diff(times)) >= gap:
            return [float(t) for t in times]


def _relative(lhs: float, terms: Sequence[float]) -> float:
    return abs(lhs - float(np.sum(terms))) / (1.0 + abs(lhs) + float(np.sum(np.abs(terms))))


# Suites

def _suite_ck(rng: np.random.Generator, ctx: SuiteContext, out: Residuals) -> None:
    for _ in range(ctx.sweep):
        params = draw_params(rng)
        s, t, u = draw_times(rng, 3)
        x = rng.uniform(-1.0, 1.0) * math.sqrt(s)
        residuals = check_chapman_kolmogorov(params, x, s, t, u, ctx.nodes, MAX_DEGREE)
        out["chapman_kolmogorov"].extend(residuals / np.maximum(ck_norms(params, x, s, u, MAX_DEGREE), 1.0))


def _suite_martingale(rng: np.random.Generator, ctx: SuiteContext, out: Residuals) -> None:
    for _ in range(ctx.sweep):
        params = draw_params(rng)
        s, t = draw_times(rng, 2)
        x = rng.uniform(-1.0, 1.0) * math.sqrt(s)
        residuals = check_martingale_polynomials(params, x, s, t, ctx.nodes, MAX_DEGREE)
        m = step_measure(params, x, s, t, ctx.nodes)
        spread = np.abs(eval_p(params, t, m.nodes, MAX_DEGREE)) @ m.weights
        scale = 1.0 + np.maximum(np.abs(eval_p(params, s, x, MAX_DEGREE)), spread)
        out["martingale_polynomials"].extend(residuals / scale[1:])


def _suite_harness(rng: np.random.Generator, ctx: SuiteContext, out: Residuals) -> None:
    for _ in range(ctx.sweep):
        params = draw_params(rng)
        s, t, u = draw_times(rng, 3)
        out["harness_moments"].extend(check_harness_moments(params, s, t, u, ctx.nodes, 6))


def _suite_qvar(rng: np.random.Generator, ctx: SuiteContext, out: Residuals) -> None:
    for _ in range(ctx.sweep):
        params = draw_params(rng)
        s, t, u = draw_times(rng, 3)
        out["quadratic_variance_moments"].extend(
            check_quadratic_variance_moments(params, s, t, u, ctx.nodes, 4))
        out["reverse_variance_moments"].extend(check_reverse_variance_moments(params, t, u, ctx.nodes, 4))

        c = qv_coeffs(params, s, t, u)
        out["qv_coefficient_invariants"].extend([
            abs(c.A + c.B + c.C - 1.0),
            abs(c.alpha + c.beta),
            abs((u - s) * c.B / c.D - (1.0 + params.q)),
        ])
        solved = solve_qv_system(params, s, t, u).as_array()
        closed = c.as_array()
        out["qv_closed_form_vs_solve"].extend(np.abs(closed - solved) / (1.0 + np.abs(closed)))


def _suite_identities(rng: np.random.Generator, ctx: SuiteContext, out: Residuals) -> None:
    for _ in range(2 * ctx.sweep):
        params = draw_params(rng)
        if rng.random() < 0.3:
            params = params.model_copy(update={"q": float(rng.choice(IDENTITY_Q))})
        x, y, z = rng.uniform(-2.0, 2.0, size=3)
        s, t, u = draw_times(rng, 3)
        for n in range(1, MAX_DEGREE + 1):
            out["convolution_identity"].append(_relative(*convolution_terms(params, x, y, z, s, t, u, n)))
            out["bms_identity"].append(_relative(*bms_terms(params, y, z, t, u, n)))

        if abs(params.q) <= 0.8:
            zeta = 0.1 * convergence_radius(params, y, x, s, t)
            series = generating_series(params, zeta, y, x, s, t)
            product = generating_fn(params, zeta, y, x, s, t)
            out["generating_product"].append(abs(product - series) / (1.0 + abs(series)))


def _suite_binomial(rng: np.random.Generator, ctx: SuiteContext, out: Residuals) -> None:
    s, t, u = CHAIN_TIMES
    for profile in RATE_PROFILES:
        reference = fit_chain_coefficients(BinomialChain(m=1, rate=profile), s, t, u)
        for m in range(1, 7):
            chain = BinomialChain(m=m, rate=profile)
            residuals = verify_chain_identities(chain, s, t, u)
            out["binomial_linear_regression"].append(residuals.linear_regression)
            out["binomial_quadratic_variance"].append(residuals.quadratic_variance)
            out["binomial_chapman_kolmogorov"].append(chain_chapman_kolmogorov(chain, s, t, u))
            for a, b in ((s, t), (t, u), (s, u)):
                out["binomial_covariance"].append(
                    abs(chain_covariance(chain, a, b) - enumerated_covariance(chain, a, b)))
            fitted = fit_chain_coefficients(chain, s, t, u)
            out["binomial_m_independence"].extend(abs(f - r) for f, r in zip(fitted, reference))


def _suite_moments(rng: np.random.Generator, ctx: SuiteContext, out: Residuals) -> None:
    for _ in range(ctx.sweep):
        params = draw_params(rng)
        t = rng.uniform(0.2, 3.0)
        out["marginal_moments"].extend(check_marginal_moments(params, t, ctx.marginal_nodes))


def _suite_gauss(rng: np.random.Generator, ctx: SuiteContext, out: Residuals) -> None:
    for N in GAUSS_NODES:
        for _ in range(max(1, ctx.sweep // 5)):
            params = draw_params(rng, bounded=True)
            s = rng.uniform(0.0, 0.4)
            t = rng.uniform(0.5, 2.0)
            coords = KernelCoordinates(x=rng.uniform(-1.0, 1.0) * math.sqrt(s), s=s, t=t)
            out["gauss_exactness"].extend(check_gauss_exactness(params, coords, N))


def _suite_increments(rng: np.random.Generator, ctx: SuiteContext, out: Residuals) -> None:
    for _ in range(ctx.sweep):
        params = draw_params(rng)
        s, t = draw_times(rng, 2)
        computed = increment_moments(params, s, t, ctx.nodes)
        expected = increment_moment_formulas(params, s, t)
        out["increment_moments"].extend(abs(c - e) / (1.0 + abs(e)) for c, e in zip(computed, expected))

        value = hankel_value(params, s, t)
        out["hankel_formula"].append(abs(increment_hankel(*computed, t - s) - value) / (1.0 + abs(value)))
        out["hankel_positivity"].append(max(0.0, -value))


def _suite_free(rng: np.random.Generator, ctx: SuiteContext, out: Residuals) -> None:
    for _ in range(ctx.sweep):
        theta, tau = rng.uniform(-1.5, 1.5), rng.uniform(0.0, 1.5)
        s, t = draw_times(rng, 2)
        # inside the time-s support, so the kernel has no atom
        x = theta + rng.uniform(-0.9, 0.9) * 2.0 * math.sqrt(s + tau)
        params = ProcessParams(theta=theta, tau=tau, q=0.0)
        lo, hi = support_interval(theta, tau, t)

        m = kernel_measure(params, KernelCoordinates(x=x, s=s, t=t), ctx.resolvent_nodes)
        for z in (lo - 1.0, lo - 2.5, hi + 1.0, hi + 2.5):
            exact = resolvent(m, z)
            for g in (free_cauchy_transform(theta, tau, x, s, t, z), free_continued_fraction(theta, tau, x, s, t, z)):
                out["free_resolvent"].append(abs(g - exact) / abs(exact))

        grid = np.linspace(lo, hi, 1002)[1:-1]
        inverted = stieltjes_inversion(theta, tau, x, s, t, grid)
        density = np.array([free_density(theta, tau, x, s, t, float(y)) for y in grid])
        out["free_stieltjes_inversion"].append(float(np.max(np.abs(inverted - density))))

        out["free_total_mass"].append(abs(free_kernel(theta, tau, x, s, t).total_mass() - 1.0))

        radius = 0.05 / (abs(theta) + 2.0 * math.sqrt(t + tau) + 1.0)
        for angle in (0.3, 1.4, 2.2, 4.0):
            w = radius * complex(math.cos(angle), math.sin(angle))
            g = free_continued_fraction(theta, tau, 0.0, 0.0, t, free_r_transform(theta, tau, t, w) + 1.0 / w)
            out["free_r_consistency"].append(abs(g - w) / abs(w))

    for (theta, tau, s, x, t), (location, mass) in FREE_ATOM_CASES:
        atoms = free_atoms(theta, tau, x, s, t)
        if len(atoms) != 1:
            out["free_atoms"].append(math.inf)
            continue
        atom = atoms[0]
        m = kernel_measure(ProcessParams(theta=theta, tau=tau, q=0.0), KernelCoordinates(x=x, s=s, t=t),
                           ctx.resolvent_nodes)
        nearest = int(np.argmin(np.abs(m.nodes - atom.location)))
        out["free_atoms"].extend([
            abs(atom.location - location),
            abs(atom.mass - mass),
            abs(float(m.nodes[nearest]) - location),
            abs(float(m.weights[nearest]) - mass),
            abs(free_kernel(theta, tau, x, s, t).total_mass() - 1.0),
        ])



def _suite_classical(rng: np.random.Generator, ctx: SuiteContext, out: Residuals) -> None:
    for theta, tau in CLASSICAL_REGIMES:
        law = classify_classical(theta, tau)
        params = ProcessParams(theta=theta, tau=tau, q=1.0)

        t = rng.uniform(0.5, 1.5)
        m = kernel_measure(params, KernelCoordinates(x=0.0, s=0.0, t=t), ctx.marginal_nodes)
        quad = np.exp(1j * np.outer(CLASSICAL_U, m.nodes)) @ m.weights
        out["classical_char_fn"].append(float(np.max(np.abs(quad - classical_char_fn(law, theta, tau, t, CLASSICAL_U)))))

        s = rng.uniform(0.2, 1.0)
        t = s + rng.uniform(0.5, 1.5)
        seed = int(rng.integers(2 ** 31))
        sampled = empirical_increment_char_fn(params, s, t, CLASSICAL_U, CLASSICAL_PATHS, seed)
        closed = classical_char_fn(law, theta, tau, t - s, CLASSICAL_U)
        out["classical_increment_char_fn"].append(float(np.max(np.abs(sampled - closed))))

    for _ in range(ctx.sweep):
        s, t = draw_times(rng, 2)
        m2, _, m4 = increment_moments(ProcessParams(q=1.0), s, t, ctx.nodes)
        out["classical_kurtosis"].append(abs(m4 / (m2 * m2) - 3.0))


SUITES: Dict[str, Callable[[np.random.Generator, SuiteContext, Residuals], None]] = {
    "ck": _suite_ck,
    "martingale": _suite_martingale,
    "harness": _suite_harness,
    "qvar": _suite_qvar,
    "identities": _suite_identities,
    "binomial": _suite_binomial,
    "moments": _suite_moments,
    "gauss": _suite_gauss,
    "increments": _suite_increments,
    "free": _suite_free,
    "classical": _suite_classical,
}
SUITE_CHOICES = ("all",) + tuple(SUITES)


def _summarize(residuals: Residuals) -> List[CheckResult]:
    results = []
    for name, values in residuals.items():
        worst = float(np.max(values)) if values else 0.0
        if not math.isfinite(worst):
            worst = math.inf
        tolerance = TOLERANCES[name]
        results.append(CheckResult(name=name, max_residual=worst, tolerance=tolerance, passed=worst <= tolerance))
    return results


def build_report(suite: str, sweep: int, seed: int, nodes: int,
                 marginal_nodes: int = 80, resolvent_nodes: int = 200) -> VerificationReport:
    """Run one suite (or all) and collect the worst residual per check.

    Every suite draws from its own stream spawned from `seed`, so a suite's
    residuals do not depend on which other suites ran.
    """
    if suite not in SUITE_CHOICES:
        raise DomainError(f"unknown suite '{suite}', expected one of {', '.join(SUITE_CHOICES)}")
    ctx = SuiteContext(sweep=sweep, nodes=nodes, marginal_nodes=marginal_nodes, resolvent_nodes=resolvent_nodes)
    names = list(SUITES) if suite == "all" else [suite]
    report = VerificationReport(suite=suite, sweep=sweep, seed=seed, nodes=nodes)
    for name in names:
        index = list(SUITES).index(name)
        rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(index,)))
        residuals: Residuals = defaultdict(list)
        logger.info(f"Running suite '{name}' over {sweep} draws")
        SUITES[name](rng, ctx, residuals)
        for check in _summarize(residuals):
            if not check.passed:
                logger.warning(f"Check {check.name} failed: {check.max_residual:.3e} > {check.tolerance:.1e}")
            report.checks.append(check)
    report.passed = all(c.passed for c in report.checks)
    return report


def run_verification(suite: str = "all", sweep: int = 50, seed: int = 20240601, nodes: int = 12,
                     marginal_nodes: int = 80, resolvent_nodes: int = 200) -> Dict[str, Any]:
    """Run the verification battery.

    Args:
        suite: Suite name or "all"
        sweep: Random draws per suite
        seed: Master seed
        nodes: Nodes per kernel in nested quadrature
        marginal_nodes: Nodes for marginal moment checks
        resolvent_nodes: Nodes for the free-case resolvent and atom checks

    Returns:
        Dictionary with the report and an overall pass flag
    """
    try:
        if sweep < 1:
            raise DomainError(f"sweep must be >= 1, got {sweep}")
        report = build_report(suite, sweep, seed, nodes, marginal_nodes, resolvent_nodes)
        logger.info(f"Verification '{suite}' finished: {'passed' if report.passed else 'FAILED'}")
        return {
            "status": "success",
            "command": "verify",
            "passed": report.passed,
            "report": report.model_dump(),
        }
    except Exception as e:
        return error_result("running verification", e)
