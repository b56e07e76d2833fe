import math

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from binentpy.alpha_solver import equality_point
from binentpy.scalar_core import (DomainError, Exponent, UnitPoint, defect,
                                  defect_v, entropy, entropy_deriv,
                                  finite_diff, log_mean, power, q, q_deriv,
                                  q_v, u_fn, u_recip_deriv, u_residual,
                                  u_residual_v)
from binentpy.tests.oracles import mp_entropy

PHI_INV = (math.sqrt(5.0) - 1.0) / 2.0
LOG2 = math.log(2.0)

# y in [1/2, 1] has an exact complement 1 - y
upper_half = st.floats(min_value=0.5, max_value=1.0)


def test_types_reject_out_of_range():
    assert UnitPoint(0.0) == 0.0 and UnitPoint(1.0) == 1.0
    for bad in (-1e-300, 1.0000000000000002, math.nan):
        with pytest.raises(DomainError):
            UnitPoint(bad)
    for bad in (1.0, 0.5, math.inf, math.nan):
        with pytest.raises(DomainError):
            Exponent(bad)
    assert Exponent(1.0000000000000002) > 1.0


def test_power_endpoints_exact():
    assert power(0.0, 2.5) == 0.0
    assert power(1.0, 7.0) == 1.0
    assert power(0.5, 2.0) == pytest.approx(0.25, rel=1e-15)
    with pytest.raises(DomainError):
        power(0.0, -1.0)


def test_entropy_examples():
    assert entropy(0.0) == 0.0
    assert entropy(1.0) == 0.0
    assert abs(entropy(0.5) - LOG2) <= 2 * math.ulp(LOG2)
    assert entropy(0.25) == entropy(0.75)


@given(upper_half)
def test_entropy_symmetric(y):
    assert entropy(1.0 - y) == entropy(y)


@given(st.floats(min_value=0.0, max_value=1.0))
def test_entropy_range_and_accuracy(x):
    value = entropy(x)
    assert 0.0 <= value <= LOG2 + 4e-16
    assert abs(value - float(mp_entropy(x))) <= 8 * math.ulp(max(value, 1e-300))


def test_entropy_deriv():
    assert abs(entropy_deriv(0.5)) <= 1e-15
    assert entropy_deriv(0.2) == pytest.approx(math.log(4.0), rel=1e-12)
    assert entropy_deriv(0.3) == pytest.approx(finite_diff(entropy, 0.3), abs=1e-6)
    mp_value = mpmath.log(1 - mpmath.mpf(0.2)) - mpmath.log(mpmath.mpf(0.2))
    assert entropy_deriv(0.2) == pytest.approx(float(mp_value), rel=1e-14)
    for x in (0.0, 1.0):
        with pytest.raises(DomainError):
            entropy_deriv(x)


def test_q_examples(alpha_of):
    assert q(2, 0.0) == 0.5
    assert q(2, 1.0) == 0.5
    assert q(2, PHI_INV) == pytest.approx(PHI_INV, abs=1e-12)
    assert q(2, PHI_INV) == pytest.approx(alpha_of(2.0).estimate, abs=1e-12)
    assert abs(q(3, 1e-4) - 1.0 / 3.0) <= 5e-2


@pytest.mark.parametrize("k", [2.0, 3.0, 7.0])
def test_q_tends_to_recip_k(k):
    gaps = [abs(q(k, 10.0**-j) - 1.0 / k) for j in range(2, 13)]
    assert all(b < a for a, b in zip(gaps, gaps[1:]))
    if k > 2.0:
        assert gaps[8] < 1e-2  # x = 1e-10


def test_q_gap_follows_log_asymptotics():
    # q(x) - 1/k ~ (1 - 1/k) / (k log(1/x) + 1) as x -> 0
    k, x = 2.0, 1e-10
    expected = (1.0 - 1.0 / k) / (k * math.log(1.0 / x) + 1.0)
    assert q(k, x) - 1.0 / k == pytest.approx(expected, rel=1e-6)


def test_q_deriv_examples():
    assert abs(q_deriv(2, PHI_INV)) <= 1e-9
    assert q_deriv(2.5, 0.4) == pytest.approx(
        finite_diff(lambda t: q(2.5, t), 0.4), abs=1e-5)
    assert q_deriv(3, 0.05) > 0.0
    for x in (0.0, 1.0):
        with pytest.raises(DomainError):
            q_deriv(2, x)


@pytest.mark.parametrize("k", [2.0, 3.0, 5.5])
def test_derivatives_match_finite_differences(k):
    for x in np.linspace(1e-3, 1.0 - 1e-3, 200)[1:-1]:
        numeric = finite_diff(lambda t: q(k, t), x)
        assert abs(q_deriv(k, x) - numeric) <= 1e-5 * max(1.0, abs(numeric))
    for x in np.linspace(1e-3, 1.0 - 1e-3, 200)[1:-1]:
        numeric = finite_diff(lambda t: 1.0 / u_fn(t), x)
        assert abs(u_recip_deriv(x) - numeric) <= 1e-5 * max(1.0, abs(numeric))


def test_u_fn_examples():
    assert u_fn(0.5) == pytest.approx(LOG2, rel=1e-15)
    assert u_fn(0.3) == pytest.approx(u_fn(0.7), rel=1e-14)
    for x in (0.0, 1.0):
        with pytest.raises(DomainError):
            u_fn(x)


def test_u_fn_tends_to_one():
    # U(x) ~ log(1/x) / (log(1/x) + 1) for small x
    big_l = math.log(1e8)
    assert u_fn(1e-8) == pytest.approx(big_l / (big_l + 1.0), abs=1e-6)
    values = [u_fn(10.0**-j) for j in range(2, 15)]
    assert all(b > a for a, b in zip(values, values[1:]))
    assert 1.0 - values[-1] < 0.04


@given(st.floats(min_value=0.5, max_value=1.0, exclude_max=True))
def test_u_fn_symmetric(y):
    assert u_fn(1.0 - y) == u_fn(y)
    assert u_fn(y) > 0.0


def test_u_residual_examples():
    assert abs(u_residual(2, PHI_INV)) <= 1e-9
    x_star = equality_point(3.0).midpoint
    assert x_star == pytest.approx(0.6823278038, abs=1e-10)
    assert abs(u_residual(3, x_star)) <= 1e-9
    assert abs(u_residual(2, 0.2)) > 1e-3


def test_underflowing_power_is_a_domain_error():
    # x is interior but x^3 = 1e-360 rounds to 0
    assert power(1e-120, 3) == 0.0
    with pytest.raises(DomainError, match=r"x\^k"):
        q_deriv(3, 1e-120)
    with pytest.raises(DomainError, match=r"x\^k"):
        u_residual(3, 1e-120)
    assert math.isfinite(q_deriv(3, 1e-100))


@pytest.mark.parametrize("k", [2.0, 3.0, 5.5])
def test_single_critical_point(k):
    grid = (np.arange(10_000) + 0.5) / 10_000
    x_star = equality_point(k)
    for values in (np.array([q_deriv(k, x) for x in grid]),
                   u_residual_v(k, grid)):
        signs = np.sign(values)
        changes = np.nonzero(np.diff(signs))[0]
        assert len(changes) == 1
        i = changes[0]
        assert grid[i] <= x_star.hi + 1e-6 and x_star.lo - 1e-6 <= grid[i + 1]


def test_log_mean_examples():
    assert log_mean(1.0, 1.0) == 1.0
    assert log_mean(4.0, 2.0) == pytest.approx(2.0 / LOG2, rel=1e-14)
    x = 0.3
    assert log_mean(1.0, x) + log_mean(1.0, 1.0 - x) == pytest.approx(
        1.0 / u_fn(x), abs=1e-12)
    for a, b in ((0.0, 1.0), (1.0, -2.0)):
        with pytest.raises(DomainError):
            log_mean(a, b)


positive = st.floats(min_value=1e-100, max_value=1e100)


@given(positive, positive)
def test_log_mean_symmetric_and_between(a, b):
    value = log_mean(a, b)
    assert value == log_mean(b, a)
    assert min(a, b) <= value <= max(a, b)


def test_reciprocal_identity_on_grid():
    grid = (np.arange(10_000) + 0.5) / 10_000
    worst = max(abs(1.0 / u_fn(x) - (log_mean(1.0, x) + log_mean(1.0, 1.0 - x)))
                for x in grid)
    assert worst <= 1e-12


def test_u_recip_deriv_examples():
    assert u_recip_deriv(0.5) == 0.0
    assert u_recip_deriv(0.25) > 0.0
    assert u_recip_deriv(0.75) < 0.0
    assert u_recip_deriv(0.4) == pytest.approx(
        finite_diff(lambda t: 1.0 / u_fn(t), 0.4), abs=1e-6)
    with pytest.raises(DomainError):
        u_recip_deriv(1.0)


def test_defect_examples(alpha_of):
    alpha = alpha_of(2.0).estimate
    assert defect(2, alpha, 0.0) == 0.0
    assert defect(2, alpha, 1.0) == 0.0
    assert defect(2, alpha, 0.3) > 0.0


def test_vectorized_versions_mark_missing_values():
    xs = np.array([0.0, 0.25, 0.5, 1.0])
    assert np.array_equal(q_v(2, xs), [q(2, x) for x in xs])
    assert np.array_equal(defect_v(2, PHI_INV, xs),
                          [defect(2, PHI_INV, x) for x in xs])
    residual = u_residual_v(2, xs)
    assert np.isnan(residual[0]) and np.isnan(residual[-1])
    assert residual[1] == u_residual(2, 0.25)
