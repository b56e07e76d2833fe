import math

import mpmath
import pytest

from binentpy.alpha_solver import (MIN_TOL, SolverError, alpha_defining_fn,
                                   alpha_table, equality_point,
                                   frequency_threshold, iv_alpha_defining_fn,
                                   solve_alpha)
from binentpy.interval_core import Interval
from binentpy.scalar_core import DomainError
from binentpy.tests.oracles import (mp_alpha, mp_alpha_fn,
                                    mp_equality_point)

PHI_INV = (math.sqrt(5.0) - 1.0) / 2.0


def test_golden_ratio_case():
    cert = solve_alpha(2.0, 1e-12)
    assert cert.converged
    assert cert.width <= 1e-12
    assert cert.enclosure.contains(PHI_INV)
    assert cert.residual_sign_lo == "-" and cert.residual_sign_hi == "+"
    assert cert.enclosure.lo <= cert.estimate <= cert.enclosure.hi
    assert cert.estimate == pytest.approx(PHI_INV, abs=1e-15)


@pytest.mark.parametrize("k", [1.01, 1.5, 2.0, 3.0, 7.5, 20.0, 100.0, 5000.0])
def test_enclosure_certified_by_oracle(k):
    cert = solve_alpha(k)
    lo, hi = cert.enclosure.lo, cert.enclosure.hi
    assert mp_alpha_fn(k, lo) < 0 < mp_alpha_fn(k, hi)
    assert mpmath.mpf(lo) <= mp_alpha(k) <= mpmath.mpf(hi)
    assert lo > 1.0 / k
    assert cert.width <= 1e-12


def test_k3_value():
    cert = solve_alpha(3.0)
    assert cert.enclosure.midpoint == pytest.approx(0.465571231876768, abs=1e-12)


def test_iteration_count_matches_width():
    cert = solve_alpha(2.0, 1e-6)
    assert cert.width <= 1e-6
    assert cert.iterations <= math.ceil(math.log2(0.5 / 1e-6)) + 1


def test_tolerance_and_exponent_checked():
    with pytest.raises(DomainError):
        solve_alpha(2.0, MIN_TOL / 10.0)
    with pytest.raises(DomainError):
        solve_alpha(1.0)
    with pytest.raises(DomainError):
        alpha_defining_fn(2.0, 0.0)


def test_defining_function():
    assert alpha_defining_fn(2.0, PHI_INV) == pytest.approx(0.0, abs=1e-15)
    assert alpha_defining_fn(3.0, 1.0) == pytest.approx(3.0)
    enclosure = iv_alpha_defining_fn(2.0, Interval(0.5, 0.7))
    assert enclosure.lo <= alpha_defining_fn(2.0, 0.5)
    assert alpha_defining_fn(2.0, 0.7) <= enclosure.hi


@pytest.mark.parametrize("k, expected", [(2.0, PHI_INV), (3.0, 0.6823278038280193)])
def test_equality_point(k, expected):
    x_star = equality_point(k)
    assert x_star.contains(expected) or x_star.midpoint == pytest.approx(expected, abs=1e-12)
    assert mpmath.mpf(x_star.lo) <= mp_equality_point(k) <= mpmath.mpf(x_star.hi)
    alpha = solve_alpha(k)
    assert x_star.intersects(1.0 / (1.0 + alpha.enclosure))


K_GRID = [1.01, 1.1, 1.5, 2.0, 3.0, 4.0, 5.0, 7.0, 10.0, 20.0, 100.0]


@pytest.mark.parametrize("k", K_GRID)
def test_equality_point_meets_alpha_over_grid(k):
    alpha = solve_alpha(k)
    x_star = equality_point(k, alpha=alpha)
    assert x_star.intersects(1.0 / (1.0 + alpha.enclosure))
    assert mpmath.mpf(x_star.lo) <= mp_equality_point(k) <= mpmath.mpf(x_star.hi)


@pytest.mark.parametrize("k", K_GRID)
def test_tighter_tolerance_refines_enclosure(k):
    previous = None
    for tol in (1e-3, 1e-6, 1e-9, 1e-12):
        enclosure = solve_alpha(k, tol).enclosure
        if previous is not None:
            assert enclosure.subset(previous)
        previous = enclosure


def test_equality_point_cross_check_fails_on_wrong_alpha():
    wrong = solve_alpha(3.0)
    with pytest.raises(SolverError):
        equality_point(2.0, alpha=wrong)


def test_frequency_threshold():
    threshold = frequency_threshold(2.0)
    assert threshold.contains((3.0 - math.sqrt(5.0)) / 2.0) or \
        threshold.midpoint == pytest.approx((3.0 - math.sqrt(5.0)) / 2.0, abs=1e-12)
    assert frequency_threshold(3.0).midpoint == pytest.approx(0.317672, abs=1e-6)


def test_alpha_table():
    table = alpha_table([1.5, 2.0, 3.0])
    assert list(table.columns) == ["k", "alpha_lo", "alpha_hi", "gap",
                                   "x_star_lo", "x_star_hi", "threshold_lo",
                                   "threshold_hi", "status"]
    assert len(table) == 3
    assert (table["gap"] > 0).all()
    assert (table["status"] == "converged").all()
    assert table["alpha_lo"].is_monotonic_decreasing
