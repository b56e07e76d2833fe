# -*- coding: utf-8 -*-
"""
Outward rounded interval arithmetic for the defect

    D(x) = alpha h(x^k) - x^(k-1) h(x).

Intervals are pairs of 64 bit floats [lo, hi]. Outward rounding is done by
stepping the faithfully rounded results to the next representable value
(math.nextafter), so no rounding mode of the processor is touched:
basic operations (+, -, *, /) are correctly rounded and moved one step,
log, log1p and exp are assumed to be accurate to one ulp and are moved
LIBM_ULPS steps.

The entropy extension uses the monotonicity of h (increasing on [0, 1/2],
decreasing on [1/2, 1]) instead of term wise evaluation, which widens
badly near 1/2.

No centered forms or Taylor models; the branch-and-bound depth of
inequality_verifier compensates.

(Part of binentpy.)
"""

import logging
import math
from dataclasses import dataclass

from binentpy.scalar_core import DomainError, Exponent

logger = logging.getLogger(__name__)

LIBM_ULPS = 2  # outward steps for log, log1p, exp


def _down(value, steps=1):
    for _ in range(steps):
        value = math.nextafter(value, -math.inf)
    return value


def _up(value, steps=1):
    for _ in range(steps):
        value = math.nextafter(value, math.inf)
    return value


def _mul_down(a, b):
    if a == 0.0 or b == 0.0:
        return 0.0
    return _down(a * b)


def _mul_up(a, b):
    if a == 0.0 or b == 0.0:
        return 0.0
    return _up(a * b)


def _add_down(a, b):
    if a == 0.0 or b == 0.0:
        return a + b
    return _down(a + b)


def _add_up(a, b):
    if a == 0.0 or b == 0.0:
        return a + b
    return _up(a + b)


def log2_up():
    """Upper bound of log 2 (the maximum of h)."""
    return _up(math.log(2.0), LIBM_ULPS)


@dataclass(frozen=True)
class Interval:
    """
    Closed interval [lo, hi] of finite floats, lo <= hi.

    The arithmetic operators delegate to the iv_ functions; plain numbers
    are taken as degenerate intervals.
    """
    lo: float
    hi: float

    def __post_init__(self):
        lo = float(self.lo)
        hi = float(self.hi)
        if not (math.isfinite(lo) and math.isfinite(hi)):
            raise DomainError(f"interval endpoints must be finite: [{lo}, {hi}]")
        if lo > hi:
            raise DomainError(f"empty interval [{lo}, {hi}]")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @classmethod
    def point(cls, x):
        return cls(x, x)

    @property
    def width(self):
        return self.hi - self.lo

    @property
    def midpoint(self):
        return self.lo + (self.hi - self.lo) / 2.0

    def contains(self, x):
        if isinstance(x, Interval):
            return self.lo <= x.lo and x.hi <= self.hi
        return self.lo <= x <= self.hi

    def subset(self, other):
        return other.lo <= self.lo and self.hi <= other.hi

    def intersects(self, other):
        return self.lo <= other.hi and other.lo <= self.hi

    def intersection(self, other):
        if not self.intersects(other):
            return None
        return Interval(max(self.lo, other.lo), min(self.hi, other.hi))

    def hull(self, other):
        return Interval(min(self.lo, other.lo), max(self.hi, other.hi))

    def to_dict(self):
        """Endpoints as 17 significant digit strings (round trip exact)."""
        return {"lo": format(self.lo, ".17g"), "hi": format(self.hi, ".17g")}

    def __add__(self, other):
        return iv_add(self, _as_interval(other))

    __radd__ = __add__

    def __sub__(self, other):
        return iv_sub(self, _as_interval(other))

    def __rsub__(self, other):
        return iv_sub(_as_interval(other), self)

    def __mul__(self, other):
        return iv_mul(self, _as_interval(other))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return iv_div(self, _as_interval(other))

    def __rtruediv__(self, other):
        return iv_div(_as_interval(other), self)

    def __neg__(self):
        return iv_neg(self)

    def __str__(self):
        return f"[{self.lo:.17g}, {self.hi:.17g}]"


def _as_interval(value):
    if isinstance(value, Interval):
        return value
    return Interval(value, value)


def iv_add(a, b):
    return Interval(_add_down(a.lo, b.lo), _add_up(a.hi, b.hi))


def iv_sub(a, b):
    return Interval(_add_down(a.lo, -b.hi), _add_up(a.hi, -b.lo))


def iv_neg(a):
    return Interval(-a.hi, -a.lo)


def iv_mul(a, b):
    """Product by enumeration of the endpoint products."""
    pairs = ((a.lo, b.lo), (a.lo, b.hi), (a.hi, b.lo), (a.hi, b.hi))
    return Interval(min(_mul_down(x, y) for x, y in pairs),
                    max(_mul_up(x, y) for x, y in pairs))


def iv_div(a, b):
    """
    Quotient a / b, b must not contain 0.

    Parameters
    ----------
    a : Interval
    b : Interval
        0 not in b.

    Returns
    -------
    Interval

    """
    if b.lo <= 0.0 <= b.hi:
        raise DomainError(f"division by an interval containing 0: {b}")
    quotients = [(x, y) for x in (a.lo, a.hi) for y in (b.lo, b.hi)]
    lo = min(x / y if x == 0.0 else _down(x / y) for x, y in quotients)
    hi = max(x / y if x == 0.0 else _up(x / y) for x, y in quotients)
    return Interval(lo, hi)


def iv_log(a):
    """
    Enclosure of log t for t in a, a.lo > 0.

    Parameters
    ----------
    a : Interval
        positive interval.

    Returns
    -------
    Interval

    """
    if not a.lo > 0.0:
        raise DomainError(f"log of an interval reaching 0 or below: {a}")
    # log 1 = 0 is exact
    lo = 0.0 if a.lo == 1.0 else _down(math.log(a.lo), LIBM_ULPS)
    hi = 0.0 if a.hi == 1.0 else _up(math.log(a.hi), LIBM_ULPS)
    return Interval(lo, hi)


def iv_log1m(a):
    """Enclosure of log(1 - t) for t in a, a.hi < 1, via log1p(-t)."""
    if not a.hi < 1.0:
        raise DomainError(f"log(1 - t) of an interval reaching 1: {a}")
    return Interval(_down(math.log1p(-a.hi), LIBM_ULPS),
                    _up(math.log1p(-a.lo), LIBM_ULPS))


def iv_exp(a):
    """Enclosure of exp t for t in a."""
    try:
        hi = _up(math.exp(a.hi), LIBM_ULPS)
    except OverflowError as err:
        raise DomainError(f"exp overflows on {a}") from err
    return Interval(max(_down(math.exp(a.lo), LIBM_ULPS), 0.0), hi)


def _rpow_bounds(t, p):
    # rigorous bounds of t**p for a single t >= 0, p > 0
    if t == 0.0:
        return 0.0, 0.0
    if t == 1.0:
        return 1.0, 1.0
    enclosure = iv_exp(iv_mul(Interval(p, p), iv_log(Interval(t, t))))
    return enclosure.lo, enclosure.hi


def iv_rpow(x, p):
    """
    Enclosure of t**p for t in x, x.lo >= 0 and a real power p > 0.

    t**p is increasing, so the endpoints are evaluated (as exp(p log t))
    with outward rounding; 0 and 1 are mapped exactly.

    Parameters
    ----------
    x : Interval
        nonnegative interval.
    p : float
        power > 0.

    Returns
    -------
    Interval

    """
    p = float(p)
    if not p > 0.0:
        raise DomainError(f"iv_rpow needs a positive power, got {p}")
    if x.lo < 0.0:
        raise DomainError(f"iv_rpow of a negative interval: {x}")
    return Interval(_rpow_bounds(x.lo, p)[0], _rpow_bounds(x.hi, p)[1])


def _unit_interval(x):
    if not 0.0 <= x.lo <= x.hi <= 1.0:
        raise DomainError(f"interval {x} is not inside [0, 1]")
    return x


def iv_pow(x, k):
    """
    Enclosure of t**k for t in x ⊆ [0, 1] and k > 1, clipped to [0, 1].

    Parameters
    ----------
    x : Interval
        inside [0, 1].
    k : float
        exponent > 1.

    Returns
    -------
    Interval

    """
    k = Exponent(k)
    x = _unit_interval(x)
    enclosure = iv_rpow(x, k)
    return Interval(max(enclosure.lo, 0.0), min(enclosure.hi, 1.0))


def _entropy_point(t):
    """Rigorous (lower, upper) bounds of h(t) for a single float t."""
    if t == 0.0 or t == 1.0:
        return 0.0, 0.0
    u = t if t <= 0.5 else 1.0 - t  # exact for t >= 1/2
    small = Interval(u, u)
    v = 1.0 - u
    # 1 - u is exact when the round trip returns u
    large = Interval(v, v) if 1.0 - v == u else iv_sub(Interval(1.0, 1.0), small)
    h = -(small * iv_log(small)) - large * iv_log1m(small)
    return max(h.lo, 0.0), min(h.hi, log2_up())


def iv_entropy(x):
    """
    Enclosure of h(t) = -t log t - (1-t) log(1-t) for t in x ⊆ [0, 1].

    Uses that h increases on [0, 1/2] and decreases on [1/2, 1]. If x
    straddles 1/2, the upper bound is the upper bound of log 2. The
    result always lies in [0, up(log 2)].

    Parameters
    ----------
    x : Interval
        inside [0, 1].

    Returns
    -------
    Interval

    """
    x = _unit_interval(x)
    lo_lo, lo_hi = _entropy_point(x.lo)
    if x.lo == x.hi:
        return Interval(lo_lo, lo_hi)
    hi_lo, hi_hi = _entropy_point(x.hi)
    if x.hi <= 0.5:
        return Interval(lo_lo, hi_hi)
    if x.lo >= 0.5:
        return Interval(hi_lo, lo_hi)
    return Interval(min(lo_lo, hi_lo), log2_up())


def iv_defect(k, alpha, x):
    """
    Enclosure of D(t) = a h(t^k) - t^(k-1) h(t) for a in alpha, t in x.

    Computed as alpha * h(x^k) - x^(k-1) * h(x) term by term. The result
    is guaranteed to contain the true range, it is not necessarily tight.

    Parameters
    ----------
    k : float
        exponent > 1.
    alpha : Interval
        enclosure of alpha_k (from alpha_solver).
    x : Interval
        inside [0, 1].

    Returns
    -------
    Interval

    """
    k = Exponent(k)
    x = _unit_interval(x)
    alpha = _as_interval(alpha)
    gain = alpha * iv_entropy(iv_pow(x, k))
    loss = iv_rpow(x, k - 1.0) * iv_entropy(x)  # k - 1 is exact for k < 2**53
    return gain - loss


if __name__ == "__main__":
    alpha_2 = Interval(_down((math.sqrt(5) - 1) / 2, 4),
                       _up((math.sqrt(5) - 1) / 2, 4))
    for lo, hi in ((0.0, 0.0), (0.25, 0.35), (0.6, 0.64), (0.9, 0.95)):
        print(f"D on [{lo}, {hi}]:", iv_defect(2, alpha_2, Interval(lo, hi)))
    print("h([0.4, 0.6]):", iv_entropy(Interval(0.4, 0.6)))
