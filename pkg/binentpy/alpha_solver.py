# -*- coding: utf-8 -*-
"""
Certified computation of alpha_k, the unique positive root of

    x (1 + x)^(k-1) = 1,

together with the equality point 1/(1 + alpha_k) (the root of x^k = 1 - x)
and the frequency threshold alpha_k / (1 + alpha_k).

Bisection with interval sign tests: every bracket that is returned is
certified by interval_core, it does not rely on floating point signs.
The bracket starts at [1/k, 1]; f(1/k) < 0 because alpha_k > 1/k and
f(1) = 2^(k-1) - 1 > 0. For k > 64 the upper end is 4 log(k) / k instead
(2^(k-1) overflows for large k). Both signs are checked again at runtime.
A float estimate inside the bracket is polished with scipy (brentq), it
never replaces the bracket.

(Part of binentpy.)
"""

import logging
import math
from dataclasses import dataclass

import numpy as np
import pandas as pd
from scipy.optimize import brentq

from binentpy.interval_core import Interval, iv_exp, iv_log, iv_mul, iv_pow
from binentpy.scalar_core import DomainError, Exponent

logger = logging.getLogger(__name__)

DEFAULT_TOL = 1e-12
MIN_TOL = 1e-14
MAX_ITERATIONS = 200


class SolverError(RuntimeError):
    """A certified bracket could not be established or cross-checked."""


@dataclass(frozen=True)
class AlphaCertificate:
    """
    Certified enclosure of alpha_k.

    Attributes
    ----------
    k : float
        the exponent.
    enclosure : Interval
        contains alpha_k; f(lo) <= 0 <= f(hi) certified.
    width : float
        enclosure.hi - enclosure.lo.
    iterations : int
        bisection steps.
    residual_sign_lo, residual_sign_hi : str
        "-" and "+", the certified signs of f at the two ends.
    status : str
        "converged" if width <= tol, "stalled" if the sign test could
        not be decided any more before reaching tol.
    tol : float
        requested width.
    estimate : float
        polished float root inside the enclosure.
    """
    k: float
    enclosure: Interval
    width: float
    iterations: int
    residual_sign_lo: str
    residual_sign_hi: str
    status: str
    tol: float
    estimate: float

    @property
    def converged(self):
        return self.status == "converged"

    def to_dict(self):
        """JSON ready dict, reals as 17 significant digit strings."""
        return {"k": format(self.k, ".17g"),
                "lo": format(self.enclosure.lo, ".17g"),
                "hi": format(self.enclosure.hi, ".17g"),
                "width": format(self.width, ".17g"),
                "iterations": self.iterations,
                "status": self.status,
                "estimate": format(self.estimate, ".17g")}


def _check_tol(tol):
    tol = float(tol)
    if not tol >= MIN_TOL:
        raise DomainError(f"tol = {tol} is below the reachable {MIN_TOL}")
    return tol


def alpha_defining_fn(k, x):
    """
    f(x) = x (1 + x)^(k-1) - 1, strictly increasing on (0, inf).

    Parameters
    ----------
    k : float
        exponent > 1.
    x : float
        > 0.

    Returns
    -------
    float

    """
    k = Exponent(k)
    x = float(x)
    if not x > 0.0:
        raise DomainError(f"alpha_defining_fn needs x > 0, got {x}")
    return x * math.exp((k - 1.0) * math.log1p(x)) - 1.0


def iv_alpha_defining_fn(k, x):
    """Enclosure of f over the interval x (x.lo > 0)."""
    k = Exponent(k)
    one_plus = Interval(1.0, 1.0) + x
    return iv_mul(x, iv_exp(Interval(k - 1.0, k - 1.0) * iv_log(one_plus))) - 1.0


def iv_equality_fn(k, x):
    """Enclosure of g(t) = t^k + t - 1 over the interval x ⊆ [0, 1]."""
    return iv_pow(x, k) + x - 1.0


def _bisect(sign_of, lo, hi, tol, label):
    """
    Certified bisection of an increasing function.

    sign_of(t) returns -1, +1 or 0 (undecided) from an interval
    evaluation at the point t. Returns lo, hi, iterations, stalled.
    """
    if sign_of(lo) >= 0 or sign_of(hi) <= 0:
        raise SolverError(f"{label}: initial bracket [{lo!r}, {hi!r}] "
                          "is not certified")
    iterations = 0
    stalled = False
    while hi - lo > tol and iterations < MAX_ITERATIONS:
        mid = lo + (hi - lo) / 2.0
        if not lo < mid < hi:
            stalled = True
            break
        iterations += 1
        sign = sign_of(mid)
        if sign < 0:
            lo = mid
        elif sign > 0:
            hi = mid
        else:
            # mid is within rounding of the root: try to close around it
            step = max(tol / 4.0, 8.0 * math.ulp(mid))
            left, right = mid - step, mid + step
            if lo < left and right < hi and sign_of(left) < 0 < sign_of(right):
                lo, hi = left, right
            stalled = hi - lo > tol
            break
    logger.debug("%s: %i iterations, width %2.3e%s", label, iterations,
                 hi - lo, " (stalled)" if stalled else "")
    return lo, hi, iterations, stalled


def _sign_from(enclosure):
    if enclosure.hi < 0.0:
        return -1
    if enclosure.lo > 0.0:
        return 1
    return 0


def solve_alpha(k, tol=DEFAULT_TOL):
    """
    Certified enclosure of alpha_k by bisection, starting from [1/k, 1].

    Parameters
    ----------
    k : float
        exponent > 1.
    tol : float, optional
        wanted width, >= 1e-14. The default is DEFAULT_TOL (1e-12).

    Returns
    -------
    AlphaCertificate
        status "stalled" if tol could not be reached in double precision.

    """
    k = Exponent(k)
    tol = _check_tol(tol)

    def sign_of(t):
        return _sign_from(iv_alpha_defining_fn(k, Interval(t, t)))

    upper = 1.0 if k <= 64.0 else min(1.0, 4.0 * math.log(k) / k)
    lo, hi, iterations, stalled = _bisect(sign_of, 1.0 / k, upper, tol,
                                          f"alpha_{k:g}")
    try:
        estimate = brentq(lambda t: alpha_defining_fn(k, t), lo, hi,
                          xtol=1e-16, rtol=4 * np.finfo(float).eps)
    except ValueError:
        estimate = lo + (hi - lo) / 2.0
    estimate = min(max(estimate, lo), hi)
    return AlphaCertificate(k=float(k), enclosure=Interval(lo, hi),
                            width=hi - lo, iterations=iterations,
                            residual_sign_lo="-", residual_sign_hi="+",
                            status="stalled" if stalled else "converged",
                            tol=tol, estimate=estimate)


def equality_point(k, tol=DEFAULT_TOL, alpha=None):
    """
    Certified enclosure of the root of x^k = 1 - x in (0, 1).

    Bisection on g(x) = x^k + x - 1 (strictly increasing), starting from
    [1/2, 1]. The result must intersect 1/(1 + alpha) computed in
    interval arithmetic from the alpha certificate, otherwise SolverError.

    Parameters
    ----------
    k : float
        exponent > 1.
    tol : float, optional
        The default is DEFAULT_TOL.
    alpha : AlphaCertificate, optional
        reused for the cross-check, solved with tol if not given.

    Returns
    -------
    Interval

    """
    k = Exponent(k)
    tol = _check_tol(tol)

    def sign_of(t):
        return _sign_from(iv_equality_fn(k, Interval(t, t)))

    lo, hi, _, stalled = _bisect(sign_of, 0.5, 1.0, tol, f"x*_{k:g}")
    if stalled:
        logger.warning("equality point for k = %g stalled at width %2.3e",
                       k, hi - lo)
    enclosure = Interval(lo, hi)
    if alpha is None:
        alpha = solve_alpha(k, tol)
    from_alpha = 1.0 / (1.0 + alpha.enclosure)
    if not enclosure.intersects(from_alpha):
        raise SolverError(f"equality point {enclosure} and 1/(1+alpha) "
                          f"{from_alpha} do not intersect for k = {k}")
    return enclosure


def frequency_threshold(k, tol=DEFAULT_TOL, alpha=None):
    """
    Certified enclosure of alpha_k / (1 + alpha_k).

    The map a -> a / (1 + a) is increasing, so the two ends of the
    alpha enclosure are mapped separately.

    Parameters
    ----------
    k : float
        exponent > 1.
    tol : float, optional
        The default is DEFAULT_TOL.
    alpha : AlphaCertificate, optional
        reused if given.

    Returns
    -------
    Interval

    """
    if alpha is None:
        alpha = solve_alpha(k, tol)

    def ratio(a):
        a = Interval(a, a)
        return a / (1.0 + a)

    return Interval(ratio(alpha.enclosure.lo).lo, ratio(alpha.enclosure.hi).hi)


def alpha_table(ks, tol=DEFAULT_TOL):
    """
    Table of alpha_k, equality point and threshold for several k.

    Exploratory: monotonicity in k is visible here but is not claimed.

    Parameters
    ----------
    ks : iterable of float
        exponents > 1.
    tol : float, optional
        The default is DEFAULT_TOL.

    Returns
    -------
    pandas.DataFrame
        columns k, alpha_lo, alpha_hi, gap (alpha_lo - 1/k),
        x_star_lo, x_star_hi, threshold_lo, threshold_hi, status.

    """
    rows = []
    for k in ks:
        cert = solve_alpha(k, tol)
        x_star = equality_point(k, tol, alpha=cert)
        threshold = frequency_threshold(k, tol, alpha=cert)
        rows.append({"k": float(k),
                     "alpha_lo": cert.enclosure.lo,
                     "alpha_hi": cert.enclosure.hi,
                     "gap": cert.enclosure.lo - 1.0 / k,
                     "x_star_lo": x_star.lo, "x_star_hi": x_star.hi,
                     "threshold_lo": threshold.lo,
                     "threshold_hi": threshold.hi,
                     "status": cert.status})
    return pd.DataFrame(rows)


if __name__ == "__main__":
    for k in (1.5, 2, 3, 20):
        cert = solve_alpha(k)
        print(k, cert.enclosure, cert.iterations, cert.status)
    print(alpha_table([1.01, 1.1, 2, 5, 100]))
