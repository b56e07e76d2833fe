# -*- coding: utf-8 -*-
"""
Branch-and-bound certification of

    D(x) = alpha_k h(x^k) - x^(k-1) h(x) >= 0   on [0, 1].

D touches 0 at x = 0, x* = 1/(1 + alpha_k) and x = 1, so interval bounds
can never prove strict positivity there. [0, 1] is therefore split into
two endpoint zones [0, eps], [1 - eps, 1], an equality zone of radius eps
around the enclosure of x*, and the core in between:

  - core: adaptive bisection with iv_defect, widest region first, until
    the lower bound of D is positive (certified_positive) or the depth
    limit is hit (failed, inconclusive unless the upper bound is < 0,
    then D is proven negative there and the report is falsified),
  - endpoint zones: sampled check that q stays below the lower end of
    the alpha_k enclosure (q tends to 1/k < alpha_k there),
  - equality zone: sampled check that D >= -tangency tolerance and that
    U(x) - U(x^k) changes sign exactly once (the single critical point
    of q).

The zone checks are heuristic; the best verdict is therefore
"certified_except_zones", "certified" is reserved for a rigorous
treatment of the zones.

The core is seeded with a fixed number of segments, which are handled
independently (optionally by several worker processes) and merged in
region order: the report does not depend on the number of workers.

(Part of binentpy.)
"""

import heapq
import json
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from time import time

import numpy as np
import pandas as pd
import yaml

from binentpy.alpha_solver import (DEFAULT_TOL, SolverError, equality_point,
                                   solve_alpha)
from binentpy.interval_core import Interval, iv_defect
from binentpy.scalar_core import (DomainError, Exponent, defect, log_mean,
                                  q, q_deriv, u_fn, u_recip_deriv,
                                  u_residual, u_residual_v)

logger = logging.getLogger(__name__)

DEFAULT_EXCLUSION = 1e-3
DEFAULT_DEPTH = 40
MAX_DEPTH = 60
MIN_EXCLUSION, MAX_EXCLUSION = 1e-6, 1e-2
TANGENCY_TOLERANCE = 1e-12
ENDPOINT_SAMPLES = 64
EQUALITY_SAMPLES = 128
SEED_DEPTH = 4  # each core part starts as 2**SEED_DEPTH segments

CERTIFIED_POSITIVE = "certified_positive"
EQUALITY_ZONE = "equality_zone"
ENDPOINT_ZONE = "endpoint_zone"
HEURISTIC_PASS = "heuristic_pass"
FAILED = "failed"

CERTIFIED = "certified"
CERTIFIED_EXCEPT_ZONES = "certified_except_zones"
FALSIFIED = "falsified"
INCONCLUSIVE = "inconclusive"


def _fmt(value):
    return None if value is None else format(value, ".17g")


@dataclass(frozen=True)
class RegionStatus:
    """
    Verdict on one region of [0, 1].

    margin is the certified lower bound of D for core regions and the
    smallest sampled value of D for zones; upper is the upper bound of D
    (core only). zone is "left", "equality", "right" or None (core).
    """
    region: Interval
    status: str
    margin: float
    upper: float = None
    zone: str = None

    def to_dict(self):
        return {"lo": _fmt(self.region.lo), "hi": _fmt(self.region.hi),
                "status": self.status, "margin": _fmt(self.margin),
                "upper": _fmt(self.upper), "zone": self.zone}


@dataclass(frozen=True)
class VerificationReport:
    k: float
    alpha: object
    exclusion_radius: float
    regions: tuple
    max_depth: int
    min_certified_margin: float
    overall: str
    equality_point: Interval
    tangency_tolerance: float = TANGENCY_TOLERANCE

    def counts(self):
        """Number of regions per status."""
        result = {}
        for region in self.regions:
            result[region.status] = result.get(region.status, 0) + 1
        return result

    def to_dict(self):
        return {"k": _fmt(self.k),
                "alpha": self.alpha.enclosure.to_dict(),
                "exclusion_radius": _fmt(self.exclusion_radius),
                "overall": self.overall,
                "min_certified_margin": _fmt(self.min_certified_margin),
                "max_depth": self.max_depth,
                "tangency_tolerance": _fmt(self.tangency_tolerance),
                "equality_point": self.equality_point.to_dict(),
                "regions": [r.to_dict() for r in self.regions]}

    def to_json(self):
        return json.dumps(self.to_dict(), indent=1)

    def regions_frame(self):
        """The regions as a pandas DataFrame (one row each)."""
        return pd.DataFrame(
            [{"lo": r.region.lo, "hi": r.region.hi, "status": r.status,
              "margin": r.margin, "upper": r.upper, "zone": r.zone}
             for r in self.regions])


class CertifyInput:
    """
    Parameter set of a certification run, written to and read from a
    YAML file and passed on to certify:

        inp = CertifyInput.read_yaml("certify_parameters_file1.yaml")
        report = certify(*inp.all_out())
    """

    def __init__(self, k, exclusion_radius=DEFAULT_EXCLUSION,
                 max_depth=DEFAULT_DEPTH, tol=DEFAULT_TOL, workers=1,
                 zone_samples=None, tangency_tolerance=TANGENCY_TOLERANCE,
                 name="CERT_0"):
        """
        Parameters
        ----------
        k : float
            exponent > 1.
        exclusion_radius : float, optional
            radius eps of the three zones. The default is 1e-3.
        max_depth : int, optional
            bisection depth limit in the core. The default is 40.
        tol : float, optional
            width of the alpha enclosure. The default is 1e-12.
        workers : int, optional
            worker processes for the core. The default is 1.
        zone_samples : int or None, optional
            samples per zone, None for the defaults, 0 skips the zone
            checks. The default is None.
        tangency_tolerance : float, optional
            allowed negative D in the equality zone. The default is 1e-12.
        name : string, optional
            name of the run. The default is "CERT_0".

        Returns
        -------
        None.

        """
        self.k = float(k)
        self.exclusion_radius = float(exclusion_radius)
        self.max_depth = int(max_depth)
        self.tol = float(tol)
        self.workers = int(workers)
        self.zone_samples = None if zone_samples is None else int(zone_samples)
        self.tangency_tolerance = float(tangency_tolerance)
        self.name = name

    def write_yaml(self, fname="certify_parameters_file.yaml"):
        with open(fname, mode="wt", encoding="utf-8") as file:
            yaml.safe_dump(dict(self.__dict__), file, sort_keys=False)

    @classmethod
    def read_yaml(cls, fname="certify_parameters_file.yaml"):
        """
        Read a parameter file written by write_yaml (or by hand).

        Unknown keys are a DomainError, missing keys take the defaults
        (only k is required).
        """
        with open(fname, mode="rt", encoding="utf-8") as file:
            try:
                values = yaml.safe_load(file) or {}
            except (yaml.YAMLError, UnicodeDecodeError) as err:
                raise DomainError(f"{fname}: not a readable YAML file: {err}") from err
        if not isinstance(values, dict) or "k" not in values:
            raise DomainError(f"{fname}: a mapping with at least 'k' is needed")
        try:
            return cls(**values)
        except (TypeError, ValueError) as err:
            raise DomainError(f"{fname}: {err}") from err

    def all_out(self):
        """Positional arguments for certify (same order!)."""
        return (self.k, self.exclusion_radius, self.max_depth, self.tol,
                self.workers, self.zone_samples, self.tangency_tolerance)


def _seed_segments(lo, hi, depth):
    segments = [(lo, hi)]
    for _ in range(depth):
        split = []
        for a, b in segments:
            mid = a + (b - a) / 2.0
            split.extend(((a, mid), (mid, b)))
        segments = split
    return segments


def _certify_segment(task):
    """
    Bisect one core segment; returns sorted leaves (lo, hi, status,
    lower, upper). Module level, so that it can run in a worker process.
    """
    lo, hi, depth, k, alpha_lo, alpha_hi, max_depth, offset = task
    alpha = Interval(alpha_lo, alpha_hi)
    shift = Interval(offset, offset)
    queue = [(-(hi - lo), lo, hi, depth)]
    leaves = []
    while queue:
        _, a, b, d = heapq.heappop(queue)
        bound = iv_defect(k, alpha, Interval(a, b)) - shift
        if bound.lo > 0.0:
            leaves.append((a, b, CERTIFIED_POSITIVE, bound.lo, bound.hi))
            continue
        mid = a + (b - a) / 2.0
        if bound.hi < 0.0 or d >= max_depth or not a < mid < b:
            leaves.append((a, b, FAILED, bound.lo, bound.hi))
            continue
        heapq.heappush(queue, (-(mid - a), a, mid, d + 1))
        heapq.heappush(queue, (-(b - mid), mid, b, d + 1))
    leaves.sort()
    return leaves


def _check_radius(radius):
    radius = float(radius)
    if not 0.0 < radius <= MAX_EXCLUSION:
        raise DomainError(f"zone radius {radius} must be in (0, {MAX_EXCLUSION}]")
    return radius


def zone_check_endpoint(k, side, radius, samples=ENDPOINT_SAMPLES,
                        alpha=None, tol=DEFAULT_TOL):
    """
    Sampled check of an endpoint zone [0, radius] or [1 - radius, 1].

    q tends to 1/k at both ends and alpha_k > 1/k. On a log spaced grid
    of distances to the endpoint (down to radius * 1e-8) the zone fails
    if a sample of q exceeds the lower end of the alpha_k enclosure.
    Whether q also stays below the midpoint (1/k + alpha_k)/2 is only
    logged: next to 1 q approaches 1/k like 1/log(1/(1 - x)), so for
    larger radii or large k the midpoint is exceeded long before alpha_k.

    Parameters
    ----------
    k : float
        exponent > 1.
    side : str
        "left" (zone at 0) or "right" (zone at 1).
    radius : float
        0 < radius <= 1e-2.
    samples : int, optional
        number of grid points, >= 2. The default is 64.
    alpha : AlphaCertificate, optional
        solved with tol if not given.
    tol : float, optional
        The default is DEFAULT_TOL.

    Returns
    -------
    RegionStatus
        heuristic_pass or failed, margin = smallest sampled D.

    """
    k = Exponent(k)
    radius = _check_radius(radius)
    if side not in ("left", "right"):
        raise DomainError(f"side must be 'left' or 'right', not {side!r}")
    if samples < 2:
        raise DomainError("at least 2 samples are needed")
    if alpha is None:
        alpha = solve_alpha(k, tol)
    if side == "left":
        # keep x^k a normal float
        smallest = max(radius * 1e-8, 10.0 ** (-300.0 / k))
        region = Interval(0.0, radius)
    else:
        smallest = max(radius * 1e-8, 1e-14)
        region = Interval(1.0 - radius, 1.0)
    smallest = min(smallest, radius / 2.0)
    distances = np.logspace(math.log10(smallest), math.log10(radius), samples)
    xs = distances if side == "left" else 1.0 - distances
    q_values = np.array([q(k, x) for x in xs])
    midpoint = (1.0 / k + alpha.enclosure.lo) / 2.0
    q_max = float(q_values.max())
    margin = min(defect(k, alpha.estimate, x) for x in xs)
    passed = q_max < alpha.enclosure.lo
    if not passed:
        logger.warning("%s zone k = %g: max q %1.12f exceeds alpha %1.12f at x = %r",
                       side, k, q_max, alpha.enclosure.lo,
                       float(xs[q_values.argmax()]))
    elif q_max > midpoint:
        logger.info("%s zone k = %g: max q %1.6f above the midpoint %1.6f",
                    side, k, q_max, midpoint)
    else:
        logger.debug("%s zone k = %g: max q %1.6f <= %1.6f", side, k, q_max,
                     midpoint)
    return RegionStatus(region, HEURISTIC_PASS if passed else FAILED,
                        margin=margin, zone=side)


def _sign_changes(values):
    signs = np.sign(values[np.isfinite(values)])
    signs = signs[signs != 0]
    return int(np.count_nonzero(np.diff(signs)))


def zone_check_equality(k, radius, samples=EQUALITY_SAMPLES, alpha=None,
                        tol=DEFAULT_TOL, tangency_tolerance=TANGENCY_TOLERANCE,
                        x_star=None):
    """
    Sampled check of the equality zone [x*.lo - radius, x*.hi + radius].

    Passes if D >= -tangency_tolerance on a uniform grid and the residual
    U(x) - U(x^k) changes sign exactly once across the zone.

    Parameters
    ----------
    k : float
        exponent > 1.
    radius : float
        0 < radius <= 1e-2.
    samples : int, optional
        grid points, >= 3. The default is 128.
    alpha : AlphaCertificate, optional
        solved with tol if not given.
    tol : float, optional
        The default is DEFAULT_TOL.
    tangency_tolerance : float, optional
        The default is TANGENCY_TOLERANCE (1e-12).
    x_star : Interval, optional
        enclosure of the equality point, computed if not given.

    Returns
    -------
    RegionStatus

    """
    k = Exponent(k)
    radius = _check_radius(radius)
    if samples < 3:
        raise DomainError("at least 3 samples are needed")
    if alpha is None:
        alpha = solve_alpha(k, tol)
    if x_star is None:
        x_star = equality_point(k, tol, alpha=alpha)
    region = Interval(x_star.lo - radius, x_star.hi + radius)
    xs = np.linspace(region.lo, region.hi, samples)
    d_min = min(defect(k, alpha.estimate, x) for x in xs)
    changes = _sign_changes(u_residual_v(k, xs))
    passed = d_min >= -tangency_tolerance and changes == 1
    if not passed:
        logger.warning("equality zone k = %g: min D %2.3e, %i sign changes "
                       "of U(x) - U(x^k)", k, d_min, changes)
    return RegionStatus(region, HEURISTIC_PASS if passed else FAILED,
                        margin=d_min, zone="equality")


def _overall(regions):
    core = [r for r in regions if r.zone is None]
    zones = [r for r in regions if r.zone is not None]
    if any(r.status == FAILED and r.upper < 0.0 for r in core):
        return FALSIFIED
    if any(r.status != CERTIFIED_POSITIVE for r in core):
        return INCONCLUSIVE
    # unchecked zones (zone_samples=0) do not count as passed
    if any(r.status != HEURISTIC_PASS for r in zones):
        return INCONCLUSIVE
    return CERTIFIED_EXCEPT_ZONES


def certify(k, exclusion_radius=DEFAULT_EXCLUSION, max_depth=DEFAULT_DEPTH,
            tol=DEFAULT_TOL, workers=1, zone_samples=None,
            tangency_tolerance=TANGENCY_TOLERANCE, defect_offset=0.0):
    """
    Certify D >= 0 on [0, 1] up to the three zones.

    Parameters
    ----------
    k : float
        exponent > 1.
    exclusion_radius : float, optional
        zone radius in [1e-6, 1e-2]. The default is 1e-3.
    max_depth : int, optional
        1 <= max_depth <= 60. The default is 40.
    tol : float, optional
        width of the alpha enclosure. The default is 1e-12.
    workers : int, optional
        processes for the core segments, the report is the same for any
        number. The default is 1.
    zone_samples : int or None, optional
        samples per zone check; None: 64 per endpoint zone and 128 for
        the equality zone; 0: zones are not checked, keep the
        statuses endpoint_zone / equality_zone and the run is at best
        inconclusive. The default is None.
    tangency_tolerance : float, optional
        The default is 1e-12.
    defect_offset : float, optional
        test hook: the core certifies D(x) - defect_offset instead of D.
        The default is 0.

    Returns
    -------
    VerificationReport

    """
    t0 = time()
    k = Exponent(k)
    exclusion_radius = float(exclusion_radius)
    if not MIN_EXCLUSION <= exclusion_radius <= MAX_EXCLUSION:
        raise DomainError(f"exclusion radius {exclusion_radius} not in "
                          f"[{MIN_EXCLUSION}, {MAX_EXCLUSION}]")
    if int(max_depth) != max_depth or not 1 <= max_depth <= MAX_DEPTH:
        raise DomainError(f"max_depth {max_depth} not in 1..{MAX_DEPTH}")
    max_depth = int(max_depth)
    if workers < 1:
        raise DomainError("workers must be >= 1")
    if zone_samples is not None and zone_samples < 0:
        raise DomainError("zone_samples must be >= 0")

    alpha = solve_alpha(k, tol)
    if not alpha.converged:
        logger.warning("alpha_%g enclosure stalled at width %2.3e",
                       k, alpha.width)
    x_star = equality_point(k, tol, alpha=alpha)

    eps = exclusion_radius
    if zone_samples == 0:
        left = RegionStatus(Interval(0.0, eps), ENDPOINT_ZONE, math.nan, zone="left")
        right = RegionStatus(Interval(1.0 - eps, 1.0), ENDPOINT_ZONE, math.nan,
                             zone="right")
        middle = RegionStatus(Interval(x_star.lo - eps, x_star.hi + eps),
                              EQUALITY_ZONE, math.nan, zone="equality")
    else:
        n_end = zone_samples or ENDPOINT_SAMPLES
        n_eq = zone_samples or EQUALITY_SAMPLES
        left = zone_check_endpoint(k, "left", eps, n_end, alpha=alpha)
        right = zone_check_endpoint(k, "right", eps, n_end, alpha=alpha)
        middle = zone_check_equality(k, eps, max(n_eq, 3), alpha=alpha,
                                     tangency_tolerance=tangency_tolerance,
                                     x_star=x_star)
    if not (left.region.hi < middle.region.lo
            and middle.region.hi < right.region.lo):
        raise DomainError(f"exclusion radius {eps} leaves no core for k = {k}")

    seed_depth = min(SEED_DEPTH, max_depth)
    tasks = [(a, b, seed_depth, float(k), alpha.enclosure.lo, alpha.enclosure.hi,
              max_depth, float(defect_offset))
             for lo, hi in ((left.region.hi, middle.region.lo),
                            (middle.region.hi, right.region.lo))
             for a, b in _seed_segments(lo, hi, seed_depth)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_certify_segment, tasks))
    else:
        results = [_certify_segment(task) for task in tasks]

    core = [RegionStatus(Interval(a, b), status, margin=lower, upper=upper)
            for leaves in results for a, b, status, lower, upper in leaves]
    regions = tuple(sorted([left, middle, right] + core,
                           key=lambda r: r.region.lo))
    margins = [r.margin for r in core if r.status == CERTIFIED_POSITIVE]
    min_margin = min(margins) if margins else math.nan
    overall = _overall(regions)
    logger.info("k = %g: %i core leaves, %s, min margin %2.3e, %3.2f s",
                k, len(core), overall, min_margin, time() - t0)
    return VerificationReport(k=float(k), alpha=alpha,
                              exclusion_radius=eps, regions=regions,
                              max_depth=max_depth,
                              min_certified_margin=min_margin,
                              overall=overall, equality_point=x_star,
                              tangency_tolerance=float(tangency_tolerance))


def scan(k, grid, alpha=None, tol=DEFAULT_TOL):
    """
    Point evaluations of q, D and U(x) - U(x^k) on a uniform grid of [0, 1].

    q uses its limit 1/k at 0 and 1; the residual is NaN there (U has no
    value at the endpoints). D uses the polished alpha estimate.

    Parameters
    ----------
    k : float
        exponent > 1.
    grid : int
        number of points, >= 2.
    alpha : AlphaCertificate, optional
        solved with tol if not given.
    tol : float, optional
        The default is DEFAULT_TOL.

    Returns
    -------
    pandas.DataFrame
        columns x, q, D, u_residual in increasing x.

    """
    k = Exponent(k)
    if int(grid) != grid or grid < 2:
        raise DomainError(f"grid = {grid} must be an integer >= 2")
    if alpha is None:
        alpha = solve_alpha(k, tol)
    xs = np.linspace(0.0, 1.0, int(grid))
    return pd.DataFrame({"x": xs,
                         "q": [q(k, x) for x in xs],
                         "D": [defect(k, alpha.estimate, x) for x in xs],
                         "u_residual": u_residual_v(k, xs)})


def write_scan_csv(frame, path_or_buf=None):
    """
    Write a scan table as CSV (header x,q,D,u_residual, 17 significant
    digits, "\\n" line ends). Returns the text if path_or_buf is None.
    """
    return frame.to_csv(path_or_buf, index=False, float_format="%.17g",
                        lineterminator="\n", na_rep="nan")


def q_maximum(frame):
    """(x, q) at the largest q of a scan table."""
    i = int(frame["q"].to_numpy().argmax())
    return float(frame["x"].iloc[i]), float(frame["q"].iloc[i])


def q_at_equality_point(k, tol=DEFAULT_TOL):
    """q(1/(1 + alpha_k)); equals alpha_k (the value at the maximum)."""
    alpha = solve_alpha(k, tol)
    return q(k, 1.0 / (1.0 + alpha.estimate))


def proof_checks(k, grid=10_000, tol=DEFAULT_TOL):
    """
    Run every step of the proof numerically for one k.

    Checks (name: what passes):
      endpoint_limits: |q(x) - 1/k| decreases along x = 10^-j and
        x = 1 - 10^-j, j = 3..10,
      alpha_exceeds_recip: the certified alpha_k.lo > 1/k,
      equality_value: |q(1/(1+alpha)) - alpha| <= 1e-12,
      critical_unique: q' and U(x) - U(x^k) change sign exactly once on
        the grid, next to x*,
      u_decreasing: (1/U)' > 0 and 1/U increasing on a grid of (0, 1/2),
      reciprocal_identity: |1/U(x) - (L(1,x) + L(1,1-x))| <= 1e-12,
      equality_consistent: x* and 1/(1 + alpha) enclosures intersect.

    Parameters
    ----------
    k : float
        exponent > 1.
    grid : int, optional
        grid points for the sampled checks. The default is 10000.
    tol : float, optional
        The default is DEFAULT_TOL.

    Returns
    -------
    pandas.DataFrame
        columns check, passed, value.

    """
    k = Exponent(k)
    alpha = solve_alpha(k, tol)
    rows = []

    def add(name, passed, value):
        rows.append({"check": name, "passed": bool(passed), "value": float(value)})

    js = np.arange(3, 11)
    left = np.array([abs(q(k, 10.0**-j) - 1.0 / k) for j in js])
    right = np.array([abs(q(k, 1.0 - 10.0**-j) - 1.0 / k) for j in js])
    add("endpoint_limits",
        np.all(np.diff(left) < 0) and np.all(np.diff(right) < 0),
        max(left[-1], right[-1]))

    add("alpha_exceeds_recip", alpha.enclosure.lo > 1.0 / k,
        alpha.enclosure.lo - 1.0 / k)

    x_eq = 1.0 / (1.0 + alpha.estimate)
    error = abs(q(k, x_eq) - alpha.estimate)
    add("equality_value", error <= 1e-12, error)

    try:
        x_star = equality_point(k, tol, alpha=alpha)
        add("equality_consistent", True, x_star.midpoint)
    except SolverError as err:
        logger.warning("equality point check failed: %s", err)
        x_star = Interval(x_eq, x_eq)
        add("equality_consistent", False, math.nan)

    xs = (np.arange(grid) + 0.5) / grid
    slopes = np.full(grid, np.nan)
    residuals = u_residual_v(k, xs)
    for i, x in enumerate(xs):
        try:
            slopes[i] = q_deriv(k, x)
        except DomainError:
            pass
    near = 2.0 / grid
    located = True
    for values in (slopes, residuals):
        finite = np.isfinite(values)
        xv, sv = xs[finite], np.sign(values[finite])
        where = np.nonzero(np.diff(sv))[0]
        located = located and all(x_star.lo - near <= xv[i] <= x_star.hi + near
                                   for i in where)
    changes = (_sign_changes(slopes), _sign_changes(residuals))
    add("critical_unique", changes == (1, 1) and located, max(changes))

    half = 0.5 * (np.arange(grid) + 0.5) / grid
    derivs = np.array([u_recip_deriv(x) for x in half])
    recips = np.array([1.0 / u_fn(x) for x in half])
    add("u_decreasing", np.all(derivs > 0) and np.all(np.diff(recips) > 0),
        derivs.min())

    identity = max(abs(1.0 / u_fn(x) - (log_mean(1.0, x) + log_mean(1.0, 1.0 - x)))
                   for x in xs)
    add("reciprocal_identity", identity <= 1e-12, identity)
    return pd.DataFrame(rows)


if __name__ == "__main__":
    logging.basicConfig(level=logging.INFO)
    rep = certify(2.0)
    print(rep.overall, rep.counts(), rep.min_certified_margin)
    print(proof_checks(3.0, grid=2000))
    print("U(x)-U(x^2) at 0.2:", u_residual(2, 0.2))
