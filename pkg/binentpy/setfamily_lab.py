# -*- coding: utf-8 -*-
"""
Small set systems and the approximate k-union-closed bound.

A family F of subsets of [n] = {1, ..., n} is stored as the sorted tuple
of its members as n-bit masks (element i is bit i - 1). A family is
(1 - eps)-approximately k-union-closed if a c = 1 - eps fraction of the
ordered k-tuples (A_1, ..., A_k) in F^k (repetition allowed) have their
union in F. For eps < 1/2 and F != {emptyset} some element then lies in
at least

    alpha_k / (1 + alpha_k) - delta,
    delta = (k eps + 2 eps log(1/eps) / log |F|)^(1/(k-1))

of the members. The functions here compute the closure fraction exactly
(zeta / Moebius transforms over the subset lattice, no tuple loop), the
largest element frequency and the bound, and search all families over
[n] for n <= 4 or random families up to n = 16.

Exact rationals are fractions.Fraction, the bound is computed in interval
arithmetic and its lower end decides "satisfied".

(Part of binentpy.)
"""

import json
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from binentpy.alpha_solver import DEFAULT_TOL, frequency_threshold, solve_alpha
from binentpy.interval_core import Interval, iv_log, iv_rpow
from binentpy.scalar_core import DomainError

logger = logging.getLogger(__name__)

MAX_N = 16
MAX_EXHAUSTIVE_N = 4
MAX_TUPLES = 10**9  # desk scale guard of closure_fraction
SAMPLES = 100_000
TUPLE_CONVENTION = "ordered_with_repetition"
EMPTY_SET = "∅"
_CHUNK = 4096  # families per worker task


class FamilyFormatError(DomainError):
    """Malformed family text; line is the 1-based line number."""

    def __init__(self, line, message):
        super().__init__(f"line {line}: {message}")
        self.line = line


class ScaleError(DomainError):
    """Exact closure count refused by the |F|^k guard."""


def _check_n(n, largest=MAX_N):
    if int(n) != n or not 1 <= n <= largest:
        raise DomainError(f"n = {n} must be an integer in 1..{largest}")
    return int(n)


def _check_k(k):
    if int(k) != k or k < 2:
        raise DomainError(f"k = {k} must be an integer >= 2")
    return int(k)


@dataclass(frozen=True)
class SetFamily:
    """
    Family of distinct subsets of [n] as ascending n-bit masks.

    Attributes
    ----------
    n : int
        ground set size, 1 <= n <= 16.
    members : tuple of int
        masks < 2**n, no duplicates, at least one.
    """
    n: int
    members: tuple

    def __post_init__(self):
        n = _check_n(self.n)
        members = [int(m) for m in self.members]
        if not members:
            raise DomainError("a family needs at least one member")
        if len(set(members)) != len(members):
            raise DomainError("a family must not contain a set twice")
        if min(members) < 0 or max(members) >= 1 << n:
            raise DomainError(f"member masks must lie in 0..{(1 << n) - 1}")
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "members", tuple(sorted(members)))

    @classmethod
    def from_sets(cls, n, sets):
        """Family from iterables of 1-based elements."""
        masks = []
        for subset in sets:
            mask = 0
            for element in subset:
                if int(element) != element or not 1 <= element <= n:
                    raise DomainError(f"element {element} is not in 1..{n}")
                mask |= 1 << (int(element) - 1)
            masks.append(mask)
        return cls(n, tuple(masks))

    def to_sets(self):
        """Members as tuples of 1-based elements."""
        return [tuple(i + 1 for i in range(self.n) if m >> i & 1)
                for m in self.members]

    @property
    def masks(self):
        return np.array(self.members, dtype=np.int64)

    @property
    def code(self):
        """Bit m of the code is set iff mask m is a member."""
        return sum(1 << m for m in self.members)

    def relabel(self, permutation):
        """
        Family after moving element i to permutation[i] (0-based, a
        permutation of range(n)).
        """
        if sorted(permutation) != list(range(self.n)):
            raise DomainError(f"{permutation} is not a permutation of 0..{self.n - 1}")
        moved = []
        for m in self.members:
            moved.append(sum(1 << permutation[i] for i in range(self.n) if m >> i & 1))
        return SetFamily(self.n, tuple(moved))

    def __len__(self):
        return len(self.members)


def power_set(n):
    """All 2**n subsets of [n]."""
    n = _check_n(n)
    return SetFamily(n, tuple(range(1 << n)))


def family_from_code(n, code):
    """
    Family whose members are the masks m with bit m of code set.

    Parameters
    ----------
    n : int
        ground set size.
    code : int
        1 <= code < 2**(2**n).

    Returns
    -------
    SetFamily

    """
    n = _check_n(n)
    code = int(code)
    if not 0 < code < 1 << (1 << n):
        raise DomainError(f"code {code} does not encode a family over [{n}]")
    return SetFamily(n, tuple(m for m in range(1 << n) if code >> m & 1))


def _presence(family):
    present = np.zeros(1 << family.n, dtype=bool)
    present[family.masks] = True
    return present


def is_union_closed(family):
    """True iff A | B is a member for every pair of members A, B."""
    present = _presence(family)
    masks = family.masks
    for a in masks:
        if not present[a | masks].all():
            return False
    return True


def _subset_transform(values, n, sign):
    # in place sum (sign +1) or Moebius difference (sign -1) over subsets
    for i in range(n):
        view = values.reshape(-1, 2, 1 << i)
        if sign > 0:
            view[:, 1, :] += view[:, 0, :]
        else:
            view[:, 1, :] -= view[:, 0, :]
    return values


def union_counts(family, k):
    """
    Number of ordered k-tuples of members with union exactly s, for
    every mask s.

    g(s) = #members inside s is a zeta transform, g(s)**k counts the
    tuples with union inside s, Moebius inversion gives the exact union.
    int64 is used while all intermediates fit, Python integers otherwise.

    Parameters
    ----------
    family : SetFamily
    k : int
        >= 2.

    Returns
    -------
    numpy.ndarray
        length 2**n, the counts sum to |F|**k.

    """
    k = _check_k(k)
    n = family.n
    exact_int64 = len(family) ** k * (1 << n) < 2**62
    inside = np.zeros(1 << n, dtype=np.int64)
    inside[family.masks] = 1
    _subset_transform(inside, n, +1)
    if not exact_int64:
        inside = inside.astype(object)
    tuples = inside**k
    return _subset_transform(tuples, n, -1)


def closure_fraction(family, k, max_tuples=MAX_TUPLES):
    """
    Exact fraction c of ordered k-tuples whose union is a member.

    Parameters
    ----------
    family : SetFamily
    k : int
        >= 2.
    max_tuples : int or None, optional
        refuse (ScaleError) if |F|**k is larger; None switches the guard
        off. The default is MAX_TUPLES (1e9).

    Returns
    -------
    fractions.Fraction

    """
    k = _check_k(k)
    total = len(family) ** k
    if max_tuples is not None and total > max_tuples:
        raise ScaleError(f"|F|^k = {len(family)}^{k} exceeds {max_tuples}; "
                         "use sampled_closure_fraction (ucs check --samples) "
                         "for an estimate")
    counts = union_counts(family, k)
    closed = int(counts[family.masks].sum())
    return Fraction(closed, total)


def sampled_closure_fraction(family, k, samples=SAMPLES, seed=0):
    """
    Monte Carlo estimate of the closure fraction from uniform random
    ordered k-tuples.

    Returns
    -------
    estimate : float
    standard_error : float
        sqrt(c (1 - c) / samples) of the estimate.

    """
    k = _check_k(k)
    if samples < 1:
        raise DomainError("at least one sample is needed")
    rng = np.random.default_rng(seed)
    present = _presence(family)
    masks = family.masks
    hits = 0
    done = 0
    while done < samples:
        batch = min(SAMPLES, samples - done)
        picks = masks[rng.integers(0, len(masks), size=(batch, k))]
        hits += int(present[np.bitwise_or.reduce(picks, axis=1)].sum())
        done += batch
    estimate = hits / samples
    return estimate, math.sqrt(estimate * (1.0 - estimate) / samples)


def max_frequency(family):
    """
    Element in the most members and its frequency.

    Returns
    -------
    element : int
        1-based, the lowest one on ties.
    frequency : fractions.Fraction
        members containing it / |F|.

    """
    masks = family.masks
    counts = [int(((masks >> i) & 1).sum()) for i in range(family.n)]
    best = int(np.argmax(counts))
    return best + 1, Fraction(counts[best], len(masks))


def _enclose(value):
    # point interval if value is a float exactly, else its two neighbours
    as_float = float(value)
    if Fraction(as_float) == Fraction(value):
        return Interval(as_float, as_float)
    return Interval(math.nextafter(as_float, -math.inf),
                    math.nextafter(as_float, math.inf))


def corollary_bound(k, epsilon, family_size, alpha=None, tol=DEFAULT_TOL):
    """
    alpha_k / (1 + alpha_k) - delta with
    delta = (k eps + 2 eps log(1/eps) / log |F|)^(1/(k-1)); eps = 0 gives
    delta = 0.

    Parameters
    ----------
    k : int
        >= 2.
    epsilon : float or Fraction
        0 <= epsilon < 1/2.
    family_size : int
        |F| >= 2.
    alpha : AlphaCertificate, optional
        solved with tol if not given.
    tol : float, optional
        The default is DEFAULT_TOL.

    Returns
    -------
    value : float
        from the midpoint of the alpha enclosure, for reporting.
    conservative : float
        lower end of the interval evaluation, used for "satisfied".

    """
    k = _check_k(k)
    if not 0 <= epsilon < Fraction(1, 2):
        raise DomainError(f"epsilon = {epsilon} must lie in [0, 1/2)")
    if int(family_size) != family_size or family_size < 2:
        raise DomainError(f"family size {family_size} must be >= 2")
    if alpha is None:
        alpha = solve_alpha(k, tol)
    a = alpha.enclosure.midpoint
    threshold = frequency_threshold(k, alpha=alpha)
    if epsilon == 0:
        return a / (1.0 + a), threshold.lo

    eps = float(epsilon)
    delta = (k * eps + 2.0 * eps * math.log(1.0 / eps) / math.log(family_size)) \
        ** (1.0 / (k - 1))

    eps_iv = _enclose(epsilon)
    inner = (k * eps_iv
             + 2.0 * eps_iv * (-iv_log(eps_iv)) / iv_log(_enclose(family_size)))
    power = 1.0 / Interval(k - 1, k - 1)
    delta_iv = iv_rpow(inner, power.lo).hull(iv_rpow(inner, power.hi))
    return a / (1.0 + a) - delta, (threshold - delta_iv).lo


@lru_cache(maxsize=4096)
def _cached_bound(k, epsilon, family_size, alpha):
    return corollary_bound(k, epsilon, family_size, alpha)


@dataclass(frozen=True)
class ClosureStats:
    """
    Closure fraction, largest element frequency and the bound for one
    family. bound and satisfied are None where the bound is not defined
    (eps >= 1/2 or |F| < 2).
    """
    k: int
    c: Fraction
    epsilon: Fraction
    max_freq: Fraction
    max_freq_element: int
    bound: float
    bound_estimate: float
    satisfied: bool
    family_size: int
    union_closed: bool

    @property
    def slack(self):
        return None if self.bound is None else float(self.max_freq) - self.bound

    def to_dict(self):
        def real(value):
            return None if value is None else format(float(value), ".17g")
        return {"k": self.k, "c": real(self.c), "c_exact": str(self.c),
                "epsilon": real(self.epsilon),
                "max_freq": real(self.max_freq),
                "max_freq_exact": str(self.max_freq),
                "max_freq_element": self.max_freq_element,
                "bound": real(self.bound),
                "bound_estimate": real(self.bound_estimate),
                "satisfied": self.satisfied,
                "family_size": self.family_size,
                "union_closed": self.union_closed,
                "tuple_convention": TUPLE_CONVENTION}

    def to_json(self):
        return json.dumps(self.to_dict(), indent=1)


def closure_stats(family, k, alpha=None, max_tuples=MAX_TUPLES, tol=DEFAULT_TOL):
    """
    ClosureStats of a family.

    Parameters
    ----------
    family : SetFamily
    k : int
        >= 2.
    alpha : AlphaCertificate, optional
        solved with tol if not given (only needed if the bound applies).
    max_tuples : int or None, optional
        guard of closure_fraction. The default is MAX_TUPLES.
    tol : float, optional
        The default is DEFAULT_TOL.

    Returns
    -------
    ClosureStats

    """
    k = _check_k(k)
    c = closure_fraction(family, k, max_tuples=max_tuples)
    epsilon = 1 - c
    element, frequency = max_frequency(family)
    bound = estimate = satisfied = None
    if epsilon < Fraction(1, 2) and len(family) >= 2:
        if alpha is None:
            alpha = solve_alpha(k, tol)
        estimate, bound = _cached_bound(k, epsilon, len(family), alpha)
        satisfied = frequency >= bound
    return ClosureStats(k=k, c=c, epsilon=epsilon, max_freq=frequency,
                        max_freq_element=element, bound=bound,
                        bound_estimate=estimate, satisfied=satisfied,
                        family_size=len(family),
                        union_closed=is_union_closed(family))


@dataclass(frozen=True)
class SearchReport:
    """
    Result of exhaustive_check or random_probe.

    violations are dicts sorted by family code (exhaustive) or trial
    number (probe); min_slack is the smallest max_freq - bound over the
    families where the bound applies, min_max_freq the smallest largest
    frequency among the union-closed families met.
    """
    mode: str
    n: int
    k: int
    families_checked: int
    violations: tuple
    min_slack: float
    min_max_freq: Fraction
    tuple_convention: str = TUPLE_CONVENTION
    trials: int = None
    seed: int = None

    def to_dict(self):
        return {"mode": self.mode, "n": self.n, "k": self.k,
                "families_checked": self.families_checked,
                "violations": list(self.violations),
                "min_slack": (None if self.min_slack is None
                              else format(self.min_slack, ".17g")),
                "min_max_freq": (None if self.min_max_freq is None
                                 else str(self.min_max_freq)),
                "tuple_convention": self.tuple_convention,
                "trials": self.trials, "seed": self.seed}

    def to_json(self):
        return json.dumps(self.to_dict(), indent=1)


def _violation(key, name, family, stats):
    return {name: key, "members": [list(s) for s in family.to_sets()],
            "c": str(stats.c), "max_freq": str(stats.max_freq),
            "bound": format(stats.bound, ".17g")}


def _tally(families, k, alpha, union_closed_only, key_name):
    """
    Check (key, family) pairs; returns checked, violations, min_slack,
    min_max_freq.
    """
    checked = 0
    violations = []
    min_slack = None
    min_max_freq = None
    for key, family in families:
        if union_closed_only and not is_union_closed(family):
            continue
        checked += 1
        stats = closure_stats(family, k, alpha=alpha, max_tuples=None)
        if stats.union_closed and (min_max_freq is None
                                   or stats.max_freq < min_max_freq):
            min_max_freq = stats.max_freq
        if stats.bound is None:
            continue
        if min_slack is None or stats.slack < min_slack:
            min_slack = stats.slack
        if not stats.satisfied:
            logger.warning("violation: %s %s, c = %s, max_freq = %s < %r",
                           key_name, key, stats.c, stats.max_freq, stats.bound)
            violations.append(_violation(key, key_name, family, stats))
    return checked, violations, min_slack, min_max_freq


def _exhaustive_chunk(task):
    n, k, start, stop, alpha, union_closed_only = task
    # {emptyset} (code 1) is excluded
    families = ((code, family_from_code(n, code))
                for code in range(max(start, 2), stop))
    return _tally(families, k, alpha, union_closed_only, "code")


def _random_family(n, rng):
    while True:
        members = np.flatnonzero(rng.random(1 << n) < 0.5)
        if len(members) and not (len(members) == 1 and members[0] == 0):
            return SetFamily(n, tuple(members))


def _probe_chunk(task):
    n, k, start, stop, seed, alpha = task
    families = ((trial, _random_family(n, np.random.default_rng((seed, trial))))
                for trial in range(start, stop))
    return _tally(families, k, alpha, False, "trial")


def _run(chunk_fn, tasks, workers):
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(chunk_fn, tasks))
    return [chunk_fn(task) for task in tasks]


def _merge(results):
    checked = sum(r[0] for r in results)
    violations = [v for r in results for v in r[1]]
    slacks = [r[2] for r in results if r[2] is not None]
    freqs = [r[3] for r in results if r[3] is not None]
    return (checked, violations, min(slacks) if slacks else None,
            min(freqs) if freqs else None)


def exhaustive_check(n, k, alpha=None, union_closed_only=False, workers=1,
                     tol=DEFAULT_TOL):
    """
    Check the bound on every family over [n] except the empty one and
    {emptyset}.

    Parameters
    ----------
    n : int
        1 <= n <= 4 (2**(2**n) - 2 families).
    k : int
        >= 2.
    alpha : AlphaCertificate, optional
        solved with tol if not given.
    union_closed_only : bool, optional
        check only union-closed families. The default is False.
    workers : int, optional
        processes; the report does not depend on it. The default is 1.
    tol : float, optional
        The default is DEFAULT_TOL.

    Returns
    -------
    SearchReport

    """
    n = _check_n(n, MAX_EXHAUSTIVE_N)
    k = _check_k(k)
    if workers < 1:
        raise DomainError("workers must be >= 1")
    if alpha is None:
        alpha = solve_alpha(k, tol)
    end = 1 << (1 << n)
    tasks = [(n, k, start, min(start + _CHUNK, end), alpha, union_closed_only)
             for start in range(0, end, _CHUNK)]
    checked, violations, min_slack, min_mf = _merge(
        _run(_exhaustive_chunk, tasks, workers))
    violations.sort(key=lambda v: v["code"])
    logger.info("n = %i, k = %i: %i families, %i violations", n, k, checked,
                len(violations))
    return SearchReport(mode="exhaustive", n=n, k=k, families_checked=checked,
                        violations=tuple(violations), min_slack=min_slack,
                        min_max_freq=min_mf)


def random_probe(n, k, trials, seed, alpha=None, workers=1, tol=DEFAULT_TOL):
    """
    Check the bound on random families; each subset of [n] is a member
    with probability 1/2, the empty family and {emptyset} are drawn
    again. Trial t uses numpy.random.default_rng((seed, t)), so the
    result depends on the seed only.

    Parameters
    ----------
    n : int
        1 <= n <= 16.
    k : int
        >= 2.
    trials : int
        >= 0; 0 gives an empty report.
    seed : int
        0 <= seed < 2**64.
    alpha : AlphaCertificate, optional
        solved with tol if not given.
    workers : int, optional
        The default is 1.
    tol : float, optional
        The default is DEFAULT_TOL.

    Returns
    -------
    SearchReport

    """
    n = _check_n(n)
    k = _check_k(k)
    if int(trials) != trials or trials < 0:
        raise DomainError(f"trials = {trials} must be an integer >= 0")
    if int(seed) != seed or not 0 <= seed < 2**64:
        raise DomainError(f"seed = {seed} must be an integer in [0, 2**64)")
    if workers < 1:
        raise DomainError("workers must be >= 1")
    trials, seed = int(trials), int(seed)
    if alpha is None:
        alpha = solve_alpha(k, tol)
    chunk = max(1, _CHUNK >> n)
    tasks = [(n, k, start, min(start + chunk, trials), seed, alpha)
             for start in range(0, trials, chunk)]
    checked, violations, min_slack, min_mf = _merge(
        _run(_probe_chunk, tasks, workers))
    violations.sort(key=lambda v: v["trial"])
    logger.info("probe n = %i, k = %i, seed %i: %i families, %i violations",
                n, k, seed, checked, len(violations))
    return SearchReport(mode="probe", n=n, k=k, families_checked=checked,
                        violations=tuple(violations), min_slack=min_slack,
                        min_max_freq=min_mf, trials=trials, seed=seed)


def parse_family(lines):
    """
    Family from text lines: first line n, then one subset per line as
    comma separated elements, "∅" for the empty set. Blank lines are
    skipped.

    Raises
    ------
    FamilyFormatError
        with the 1-based line number.

    """
    n = None
    masks = []
    seen = {}
    number = 0
    for number, line in enumerate(lines, start=1):
        text = line.strip()
        if not text:
            continue
        if n is None:
            try:
                n = _check_n(int(text))
            except ValueError as err:
                raise FamilyFormatError(number, f"ground set size: {err}") from err
            continue
        mask = 0
        if text != EMPTY_SET:
            for item in text.split(","):
                try:
                    element = int(item.strip())
                except ValueError as err:
                    raise FamilyFormatError(
                        number, f"{item.strip()!r} is not an element") from err
                if not 1 <= element <= n:
                    raise FamilyFormatError(number, f"element {element} not in 1..{n}")
                mask |= 1 << (element - 1)
        if mask in seen:
            raise FamilyFormatError(number, f"same set as line {seen[mask]}")
        seen[mask] = number
        masks.append(mask)
    if n is None:
        raise FamilyFormatError(number + 1, "ground set size missing")
    if not masks:
        raise FamilyFormatError(number + 1, "family has no members")
    return SetFamily(n, tuple(masks))


def read_family(fname):
    """Family from a UTF-8 text file (format of parse_family)."""
    with open(fname, mode="rb") as file:
        raw = file.read()
    try:
        text = raw.decode("utf-8")
    except UnicodeDecodeError as err:
        line = raw.count(b"\n", 0, err.start) + 1
        raise FamilyFormatError(line, f"not UTF-8 text ({err.reason})") from err
    return parse_family(text.splitlines())


def write_family(family, fname=None):
    """Family as text (format of parse_family); returned if fname is None."""
    lines = [str(family.n)]
    for subset in family.to_sets():
        lines.append(",".join(str(e) for e in subset) if subset else EMPTY_SET)
    text = "\n".join(lines) + "\n"
    if fname is None:
        return text
    with open(fname, mode="wt", encoding="utf-8") as file:
        file.write(text)
    return None


if __name__ == "__main__":
    logging.basicConfig(level=logging.INFO)
    two = SetFamily.from_sets(2, [(), (1,), (2,)])
    print(closure_fraction(two, 2), max_frequency(two), is_union_closed(two))
    print(closure_stats(power_set(3), 2).to_json())
    print(exhaustive_check(3, 2).to_json())
