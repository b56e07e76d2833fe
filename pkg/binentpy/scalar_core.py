# -*- coding: utf-8 -*-
"""
Point evaluations of the scalar functions around the binary entropy
inequality alpha_k * h(x^k) >= x^(k-1) * h(x), k > 1 real.

All functions work in 64 bit floating point with the natural logarithm.
Endpoint conventions are explicit: h(0) = h(1) = 0, q(0) = q(1) = 1/k,
derivatives and U are not defined at 0 and 1 (DomainError).
Some functions are also vectorized by hand (Name: "..._v"); these take
numpy arrays and return NaN where the scalar version has no value.

Rigorous bounds are not computed here, see interval_core.

(Part of binentpy.)
"""

import logging
import math

import numpy as np

logger = logging.getLogger(__name__)

FD_STEP = 1e-6  # step of the central differences used for validation


class DomainError(ValueError):
    """An argument lies outside the domain of the requested function."""


class UnitPoint(float):
    """A float x with 0 <= x <= 1."""

    def __new__(cls, x):
        value = float.__new__(cls, x)
        if not 0.0 <= value <= 1.0:
            raise DomainError(f"x = {x!r} is not in [0, 1]")
        return value


class Exponent(float):
    """A finite float k > 1."""

    def __new__(cls, k):
        value = float.__new__(cls, k)
        if not (value > 1.0 and math.isfinite(value)):
            raise DomainError(f"k = {k!r} must be a finite real > 1")
        return value


def _open_unit(x, name="x"):
    x = float(x)
    if not 0.0 < x < 1.0:
        raise DomainError(f"{name} = {x!r} must lie strictly inside (0, 1)")
    return x


def _small_side(x):
    # min(x, 1-x); exact for x >= 1/2 (Sterbenz), so h and U are
    # evaluated along the same path for x and 1-x
    return x if x <= 0.5 else 1.0 - x


def power(x, k):
    """
    x**k for 0 <= x <= 1, evaluated as exp(k log x)

    0 and 1 are returned exactly.

    Parameters
    ----------
    x : float
        base in [0, 1].
    k : float
        any real exponent (positive for x = 0).

    Returns
    -------
    float
        x**k.

    """
    x = UnitPoint(x)
    if x == 0.0:
        if k <= 0:
            raise DomainError("0 ** k needs k > 0")
        return 0.0
    if x == 1.0:
        return 1.0
    return math.exp(k * math.log(x))


def entropy(x):
    """
    Binary entropy h(x) = -x log x - (1-x) log(1-x), natural logarithm

    Parameters
    ----------
    x : float
        0 <= x <= 1.

    Returns
    -------
    float
        h(x) in [0, log 2], h(0) = h(1) = 0 exactly.

    """
    x = UnitPoint(x)
    if x == 0.0 or x == 1.0:
        return 0.0
    u = _small_side(x)
    return -u * math.log(u) - (1.0 - u) * math.log1p(-u)


def entropy_deriv(x):
    """
    h'(x) = log(1-x) - log(x) for 0 < x < 1.

    Parameters
    ----------
    x : float
        0 < x < 1, the derivative diverges at the endpoints.

    Returns
    -------
    float

    """
    x = _open_unit(x)
    return math.log1p(-x) - math.log(x)


def q(k, x):
    """
    q(x) = x^(k-1) h(x) / h(x^k), extended by its limits q(0) = q(1) = 1/k.

    The inequality is equivalent to q(x) <= alpha_k on [0, 1].
    Where x^k under- or overflows to 0 or 1 in floating point the limit
    value 1/k is returned as well.

    Parameters
    ----------
    k : float
        exponent > 1.
    x : float
        0 <= x <= 1.

    Returns
    -------
    float

    """
    k = Exponent(k)
    x = UnitPoint(x)
    if x == 0.0 or x == 1.0:
        return 1.0 / k
    h_k = entropy(power(x, k))
    if h_k == 0.0:
        return 1.0 / k
    return power(x, k - 1.0) * entropy(x) / h_k


def q_deriv(k, x):
    """
    q'(x) from the quotient rule, evaluated directly:

        ((k-1) x^(k-2) h(x) + x^(k-1) h'(x)) / h(x^k)
        - x^(k-1) h(x) h'(x^k) k x^(k-1) / h(x^k)^2

    Parameters
    ----------
    k : float
        exponent > 1.
    x : float
        0 < x < 1 (x^k must not round to 0 or 1).

    Returns
    -------
    float

    Raises
    ------
    DomainError
        if x^k rounds to 0 or 1, which happens for interior x too, e.g.
        q_deriv(3, 1e-120) where x^3 underflows.

    """
    k = Exponent(k)
    x = _open_unit(x)
    y = power(x, k)
    if not 0.0 < y < 1.0:
        raise DomainError(f"x^k = {y!r} is not representable inside (0, 1)")
    h_x = entropy(x)
    h_y = entropy(y)
    x_km1 = power(x, k - 1.0)
    first = ((k - 1.0) * power(x, k - 2.0) * h_x
             + x_km1 * entropy_deriv(x)) / h_y
    # split so that h(x^k)^2 cannot underflow
    second = (x_km1 * h_x / h_y) * (entropy_deriv(y) * k * x_km1 / h_y)
    return first - second


def u_fn(x):
    """
    U(x) = log(x) log(1-x) / h(x) on (0, 1)

    U is symmetric (U(x) = U(1-x)) and positive. It tends to 1 at both
    ends, but the endpoints themselves are a DomainError.

    Parameters
    ----------
    x : float
        0 < x < 1.

    Returns
    -------
    float

    """
    x = _open_unit(x)
    u = _small_side(x)
    return math.log(u) * math.log1p(-u) / entropy(u)


def u_residual(k, x):
    """
    U(x) - U(x^k); zero exactly at the critical point of q.

    Parameters
    ----------
    k : float
        exponent > 1.
    x : float
        0 < x < 1.

    Returns
    -------
    float

    Raises
    ------
    DomainError
        if x^k rounds to 0 or 1 (x^k underflows for small interior x,
        e.g. x = 1e-120 and k = 3).

    """
    k = Exponent(k)
    x = _open_unit(x)
    y = power(x, k)
    if not 0.0 < y < 1.0:
        raise DomainError(f"x^k = {y!r} is not representable inside (0, 1)")
    return u_fn(x) - u_fn(y)


def log_mean(a, b):
    """
    Logarithmic mean L(a, b) = (a - b) / (log a - log b), L(a, a) = a.

    The arguments are ordered first, so L is exactly symmetric, and the
    result is clamped to [min(a, b), max(a, b)] where it lies in exact
    arithmetic.

    Parameters
    ----------
    a : float
        > 0.
    b : float
        > 0.

    Returns
    -------
    float

    """
    a = float(a)
    b = float(b)
    if not (a > 0.0 and b > 0.0):
        raise DomainError(f"log_mean needs positive arguments, got {a!r}, {b!r}")
    if a == b:
        return a
    big, small = (a, b) if a > b else (b, a)
    diff = big - small
    value = diff / math.log1p(diff / small)
    return min(max(value, small), big)


def _f_prime(t, log_t, one_minus_t):
    # derivative of f(t) = L(1, t) = (t - 1) / log t
    return (t * log_t + one_minus_t) / (t * log_t**2)


def u_recip_deriv(x):
    """
    (1/U)'(x) = f'(x) - f'(1-x) with f(t) = L(1, t), where

        f'(t) = (t log t - t + 1) / (t log^2 t).

    Positive on (0, 1/2), zero at 1/2, negative on (1/2, 1).

    Parameters
    ----------
    x : float
        0 < x < 1.

    Returns
    -------
    float

    """
    x = _open_unit(x)
    if x == 0.5:
        return 0.0
    y = 1.0 - x
    return (_f_prime(x, math.log(x), y)
            - _f_prime(y, math.log1p(-x), x))


def defect(k, alpha, x):
    """
    D(x) = alpha h(x^k) - x^(k-1) h(x)

    The inequality states D >= 0 on [0, 1] for alpha = alpha_k.

    Parameters
    ----------
    k : float
        exponent > 1.
    alpha : float
        (estimate of) alpha_k.
    x : float
        0 <= x <= 1.

    Returns
    -------
    float

    """
    k = Exponent(k)
    x = UnitPoint(x)
    if x == 0.0 or x == 1.0:
        return 0.0
    return (float(alpha) * entropy(power(x, k))
            - power(x, k - 1.0) * entropy(x))


def finite_diff(fun, x, step=FD_STEP):
    """
    Central difference (f(x + step) - f(x - step)) / (2 step).

    Parameters
    ----------
    fun : callable
        scalar function of one float.
    x : float
        point of evaluation.
    step : float, optional
        The default is FD_STEP (1e-6).

    Returns
    -------
    float

    """
    return (fun(x + step) - fun(x - step)) / (2.0 * step)


def _vectorize(fun, k, x, *args):
    x = np.atleast_1d(np.asarray(x, dtype=float))
    out = np.empty_like(x)
    for i, xi in enumerate(x):
        try:
            out[i] = fun(k, *args, xi)
        except DomainError:
            out[i] = np.nan
    return out


def q_v(k, x):
    """q for an array of x."""
    return _vectorize(q, k, x)


def defect_v(k, alpha, x):
    """defect for an array of x."""
    return _vectorize(defect, k, x, alpha)


def u_residual_v(k, x):
    """u_residual for an array of x, NaN at 0, 1 and where x^k rounds off."""
    return _vectorize(u_residual, k, x)


if __name__ == "__main__":
    phi = (1 + math.sqrt(5)) / 2
    print("h(1/2) = %1.16f, log 2 = %1.16f" % (entropy(0.5), math.log(2)))
    print("q(2, 1/phi) = %1.16f, 1/phi = %1.16f" % (q(2, 1 / phi), 1 / phi))
    print("U(x) - U(x^2) at 1/phi: %2.3e" % u_residual(2, 1 / phi))
    for j in range(2, 13, 2):
        print("q(3, 1e-%i) - 1/3 = %2.4e" % (j, q(3, 10.0**-j) - 1 / 3))
