from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import quad

from trapmodes import (
    FIRST_THRESHOLD,
    M_of_a,
    RobinProblem,
    RootList,
    SampledFunction,
    SymmetryVariant,
    integer_expansion_defect,
    lemma_a1_lhs,
    lemma_left_lhs,
    lemma_right_residual,
    robin_eigenvalues,
    solve_minus_mu_cot,
    solve_mu_tan,
)


def _brute_force_roots(g, lo: float, hi: float, samples: int = 20000) -> list[float]:
    """Sign-change scan plus bisection; the independent root oracle."""
    xs = np.linspace(lo, hi, samples)
    values = np.array([g(x) for x in xs])
    roots = []
    for i in np.flatnonzero(np.sign(values[:-1]) * np.sign(values[1:]) < 0):
        a, b = xs[i], xs[i + 1]
        for _ in range(80):
            mid = 0.5 * (a + b)
            if g(a) * g(mid) <= 0:
                b = mid
            else:
                a = mid
        roots.append(0.5 * (a + b))
    return roots


# -- transcendental solvers ------------------------------------------------


def test_mu_tan_doc_value() -> None:
    r = solve_mu_tan(1.0, 1.0)
    assert r.roots[0] == pytest.approx(0.8603335890193798, abs=1e-12)


def test_mu_tan_input_validation() -> None:
    with pytest.raises(ValueError):
        solve_mu_tan(0.0, 1.0)
    with pytest.raises(ValueError):
        solve_mu_tan(1.0, -1.0)
    with pytest.raises(ValueError):
        solve_mu_tan(1.0, 1.0, count=0)


@settings(max_examples=30, deadline=None)
@given(
    st.floats(min_value=0.2, max_value=5.0),
    st.floats(min_value=0.01, max_value=50.0),
)
def test_mu_tan_against_sign_scan(a: float, c: float) -> None:
    got = solve_mu_tan(a, c, count=3)
    # continuous rewrite has the same zeros and no poles
    expected = _brute_force_roots(
        lambda mu: mu * math.sin(mu * a) - c * math.cos(mu * a), 1e-9, 3 * math.pi / a
    )
    assert len(expected) >= 3
    for mine, theirs in zip(got.roots, expected[:3]):
        assert mine == pytest.approx(theirs, abs=1e-7)
    for root, (lo, hi) in zip(got.roots, got.brackets):
        assert lo < root < hi
        assert abs(root * math.tan(root * a) - c) <= 1e-10 * max(1.0, c)


@settings(max_examples=30, deadline=None)
@given(
    st.floats(min_value=0.2, max_value=5.0),
    st.floats(min_value=0.0, max_value=50.0),
)
def test_minus_mu_cot_against_sign_scan(a: float, sigma: float) -> None:
    got = solve_minus_mu_cot(a, sigma, count=3)
    expected = _brute_force_roots(
        lambda mu: -mu * math.cos(mu * a) - sigma * math.sin(mu * a), 1e-9, 3.5 * math.pi / a
    )
    # the rewrite adds a spurious zero at mu a = 0 only when sigma = 0
    expected = [r for r in expected if r > 1e-6]
    for mine, theirs in zip(got.roots, expected[:3]):
        assert mine == pytest.approx(theirs, abs=1e-7)


def test_roots_ascend_one_per_bracket() -> None:
    r = solve_mu_tan(2.5, 0.5 * math.sqrt(M_of_a(2.5)), count=4)
    assert all(b > a for a, b in zip(r.roots, r.roots[1:]))
    for j, (lo, hi) in enumerate(r.brackets):
        assert lo == pytest.approx(max(0.0, (2 * j - 1) * math.pi / 5.0))
        assert hi == pytest.approx((2 * j + 1) * math.pi / 5.0)


def test_rootlist_rejects_unsorted() -> None:
    with pytest.raises(ValueError):
        RootList([2.0, 1.0], [0.0, 0.0], [(0.0, 3.0), (0.0, 3.0)])


# -- Robin segment eigenvalues --------------------------------------------


def test_robin_neumann_zero_coupling_closed_form() -> None:
    r = robin_eigenvalues(RobinProblem(0.5, 0.0), count=3)
    assert r.roots == pytest.approx([0.0, 2 * math.pi, 4 * math.pi])


def test_robin_threshold_identity_is_exact() -> None:
    # coupling sqrt(M(a))/2 puts the first eigenvalue exactly at pi^2/4
    for a in (0.25, 0.5, 0.75):
        sigma = 0.5 * math.sqrt(M_of_a(a))
        mu = robin_eigenvalues(RobinProblem(a, sigma)).roots[0]
        assert mu**2 == pytest.approx(FIRST_THRESHOLD, abs=1e-10)


def test_robin_dirichlet_at_zero_uses_cot_branch() -> None:
    problem = RobinProblem(1.0, 2.0, at_zero=SymmetryVariant.DIRICHLET_AT_CUT)
    mu = robin_eigenvalues(problem).roots[0]
    assert -mu / math.tan(mu) == pytest.approx(2.0, abs=1e-9)
    assert math.pi / 2 < mu < math.pi


def test_robin_rejects_bad_segment() -> None:
    with pytest.raises(ValueError):
        RobinProblem(-1.0, 1.0)
    with pytest.raises(ValueError):
        RobinProblem(1.0, -0.5)


# -- sampled profiles and quadrature --------------------------------------


def test_quadrature_matches_scipy() -> None:
    nodes = np.linspace(0.0, 2.0, 41)
    phi = SampledFunction.from_callable(lambda x: np.exp(-x) * np.sin(3.0 * x), nodes)
    mine = phi.quadrature(lambda x: phi.eval(x) ** 2)
    theirs, _ = quad(lambda x: (math.exp(-x) * math.sin(3.0 * x)) ** 2, 0.0, 2.0)
    assert mine == pytest.approx(theirs, abs=1e-10)


def test_spline_derivative_close_to_analytic() -> None:
    nodes = np.linspace(0.0, 1.0, 81)
    phi = SampledFunction.from_callable(lambda x: np.cos(2.0 * x), nodes)
    xs = np.linspace(0.05, 0.95, 17)
    assert np.max(np.abs(phi.eval_deriv(xs) + 2.0 * np.sin(2.0 * xs))) < 1e-6


def test_attached_derivative_wins_over_spline() -> None:
    nodes = np.linspace(0.0, 1.0, 9)
    phi = SampledFunction.from_callable(
        lambda x: np.exp(x), nodes, deriv=lambda x: np.exp(x)
    )
    assert phi.eval_deriv(np.array([0.5]))[0] == pytest.approx(math.exp(0.5), rel=1e-15)


# -- quadratic-form lemma checks ------------------------------------------


def _random_spline(rng: np.random.RandomState, length: float) -> SampledFunction:
    knots = np.linspace(0.0, length, 9)
    values = rng.uniform(-1.0, 1.0, size=9)
    from scipy.interpolate import CubicSpline

    spline = CubicSpline(knots, values)
    nodes = np.linspace(0.0, length, 129)
    return SampledFunction(nodes, spline(nodes))


def test_right_residual_zero_on_exponentials() -> None:
    for m in (0.5, 1.0, 2.0, 3.5):
        phi = SampledFunction.from_callable(
            lambda x, m=m: np.exp(-m * x),
            np.linspace(0.0, 12.0 / m, 241),
            deriv=lambda x, m=m: -m * np.exp(-m * x),
        )
        assert abs(lemma_right_residual(phi, m)) < 1e-10


def test_right_residual_nonnegative_on_random_profiles() -> None:
    rng = np.random.RandomState(7)
    for _ in range(100):
        phi = _random_spline(rng, rng.uniform(0.5, 4.0))
        assert lemma_right_residual(phi, rng.uniform(0.1, 3.0)) >= -1e-10


def test_right_residual_detects_wrong_rate() -> None:
    phi = SampledFunction.from_callable(
        lambda x: np.exp(-x), np.linspace(0.0, 10.0, 201), deriv=lambda x: -np.exp(-x)
    )
    assert lemma_right_residual(phi, 2.0) > 0.1


def test_left_form_zero_on_cosine() -> None:
    for a in (0.25, 0.5, 0.75):
        f = SampledFunction.from_callable(
            lambda x: np.cos(0.5 * math.pi * x),
            np.linspace(0.0, a, 161),
            deriv=lambda x: -0.5 * math.pi * np.sin(0.5 * math.pi * x),
        )
        assert abs(lemma_left_lhs(f, a)) < 1e-10


def test_left_form_constant_profile_value() -> None:
    # 0 - (pi^2/4)(1/2) + sqrt(M(1/2))/2 = pi/2 - pi^2/8
    f = SampledFunction.from_callable(
        lambda x: np.ones_like(x), np.linspace(0.0, 0.5, 65), deriv=lambda x: np.zeros_like(x)
    )
    value = lemma_left_lhs(f, 0.5)
    assert value == pytest.approx(math.pi / 2 - math.pi**2 / 8, abs=1e-12)
    assert value == pytest.approx(0.337095776659, abs=1e-9)


def test_left_form_nonnegative_on_random_profiles() -> None:
    rng = np.random.RandomState(11)
    for _ in range(50):
        a = rng.uniform(0.1, 0.95)
        f = _random_spline(rng, a)
        assert lemma_left_lhs(f, a) >= -1e-10


def test_a1_form_on_robin_eigenfunction_equals_defect() -> None:
    # with f = cos(mu_1 x) the form collapses to
    # (mu_1^2 - nu_1 + M d^(2/3) + c1 d^(4/3)) * integral f^2,
    # so at c1 = 0 it reproduces the two-term expansion defect
    for delta in (1e-2, 1e-3):
        sigma = 0.5 * math.sqrt(M_of_a(1.0)) / delta ** (2.0 / 3.0)
        mu = robin_eigenvalues(RobinProblem(1.0, sigma)).roots[0]
        f = SampledFunction.from_callable(
            lambda x, mu=mu: np.cos(mu * x),
            np.linspace(0.0, 1.0, 257),
            deriv=lambda x, mu=mu: -mu * np.sin(mu * x),
        )
        mass = 0.5 + math.sin(2.0 * mu) / (4.0 * mu)
        expected = integer_expansion_defect(delta) * mass
        assert lemma_a1_lhs(f, delta) == pytest.approx(expected, abs=1e-9)


def test_integer_defect_ratio_is_bounded() -> None:
    ratios = [
        integer_expansion_defect(d) / d ** (4.0 / 3.0) for d in (1e-2, 1e-3, 1e-4, 1e-5)
    ]
    assert ratios[0] == pytest.approx(6.206118, abs=1e-5)
    assert max(ratios) / min(ratios) < 1.05


def test_integer_defect_rejects_out_of_range() -> None:
    with pytest.raises(ValueError):
        integer_expansion_defect(0.0)
    with pytest.raises(ValueError):
        integer_expansion_defect(1.5)
