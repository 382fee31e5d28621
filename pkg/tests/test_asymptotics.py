from __future__ import annotations

import math

import pytest
from hypothesis import given, strategies as st

from trapmodes import (
    FIRST_THRESHOLD,
    M_of_a,
    decay_rate,
    eigen_count,
    make_geometry,
    predict,
)

NON_INTEGER = st.floats(min_value=0.05, max_value=6.0).filter(
    lambda a: abs(a - round(a)) > 1e-3
)


def test_constant_at_half_is_pi_squared() -> None:
    assert M_of_a(0.5) == pytest.approx(math.pi**2, rel=1e-14)


def test_constant_at_integers() -> None:
    assert M_of_a(1.0) == pytest.approx(math.pi ** (4.0 / 3.0), rel=1e-14)
    assert M_of_a(2.0) == pytest.approx((math.pi**2 / 2.0) ** (2.0 / 3.0), rel=1e-14)
    assert M_of_a(3.0) == pytest.approx((math.pi**2 / 3.0) ** (2.0 / 3.0), rel=1e-14)


@given(NON_INTEGER)
def test_constant_depends_only_on_fractional_part(a: float) -> None:
    assert M_of_a(a + 1.0) == pytest.approx(M_of_a(a), rel=1e-12)


@given(NON_INTEGER)
def test_constant_positive_off_integers(a: float) -> None:
    assert M_of_a(a) > 0.0


def test_constant_blows_up_near_odd_fractional_part() -> None:
    # tan(pi {a}/2) diverges as {a} -> 1-: the constant grows without bound
    assert M_of_a(0.999) > M_of_a(0.99) > M_of_a(0.9) > M_of_a(0.5)


def test_prediction_fractional_fields() -> None:
    prediction = predict(make_geometry(0.5, 0.1))
    assert prediction.exponent == 2.0
    assert prediction.constant == pytest.approx(math.pi**2, rel=1e-14)
    assert prediction.remainder_order == 3.0
    assert prediction.lambda_leading == pytest.approx(
        FIRST_THRESHOLD - math.pi**2 * 0.01, rel=1e-14
    )


def test_prediction_integer_fields() -> None:
    prediction = predict(make_geometry(1.0, 0.01))
    assert prediction.exponent == pytest.approx(2.0 / 3.0)
    assert prediction.constant == pytest.approx(math.pi ** (4.0 / 3.0), rel=1e-14)
    assert prediction.remainder_order == pytest.approx(4.0 / 3.0)
    assert prediction.lambda_leading == pytest.approx(
        FIRST_THRESHOLD - math.pi ** (4.0 / 3.0) * 0.01 ** (2.0 / 3.0), rel=1e-14
    )


@given(st.floats(min_value=0.05, max_value=6.0), st.floats(min_value=0.001, max_value=0.3))
def test_predicted_eigenvalue_below_threshold(a: float, delta: float) -> None:
    assert predict(make_geometry(a, delta)).lambda_leading < FIRST_THRESHOLD


def test_count_table() -> None:
    # (total, from N, from D, top is N) over the half-length grid
    table = {
        0.5: (1, 1, 0, True),
        1.0: (1, 1, 0, True),
        1.5: (2, 1, 1, False),
        2.0: (2, 1, 1, False),
        2.5: (3, 2, 1, True),
        3.0: (3, 2, 1, True),
        4.0: (4, 2, 2, False),
    }
    for a, expected in table.items():
        split = eigen_count(a)
        got = (split.total, split.from_neumann, split.from_dirichlet, split.top_is_neumann)
        assert got == expected, f"a={a}: {got} != {expected}"


def test_integer_count_uses_rounding_not_ceiling() -> None:
    # a ceiling of a float integer like 2.0000000001 must not jump to 3
    assert eigen_count(2.0 + 1e-12).total == 2
    assert eigen_count(3.0 - 1e-12).total == 3


@given(st.floats(min_value=0.05, max_value=12.0))
def test_count_split_is_consistent(a: float) -> None:
    split = eigen_count(a)
    assert split.total >= 1
    assert split.from_neumann + split.from_dirichlet == split.total
    assert split.from_neumann == math.ceil(split.total / 2)
    assert split.top_is_neumann == (split.total % 2 == 1)


@given(NON_INTEGER.filter(lambda a: a < 4.0), st.floats(min_value=0.005, max_value=0.2))
def test_decay_rate_matches_leading_gap(a: float, delta: float) -> None:
    geometry = make_geometry(a, delta)
    rate = decay_rate(geometry)
    assert rate > 0.0
    assert rate == pytest.approx(
        math.sqrt(FIRST_THRESHOLD - predict(geometry).lambda_leading), rel=1e-12
    )


def test_decay_rate_leading_order_in_delta() -> None:
    # sqrt(M) delta for fractional a; the a=0.5 constant is pi
    assert decay_rate(make_geometry(0.5, 0.01)) == pytest.approx(math.pi * 0.01, rel=1e-12)
