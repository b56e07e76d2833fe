import json
import math
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from binentpy.setfamily_lab import (TUPLE_CONVENTION, FamilyFormatError,
                                    ScaleError, SetFamily, closure_fraction,
                                    closure_stats, corollary_bound,
                                    exhaustive_check, family_from_code,
                                    is_union_closed, max_frequency,
                                    parse_family, power_set, random_probe,
                                    read_family, sampled_closure_fraction,
                                    union_counts, write_family)
from binentpy.scalar_core import DomainError

THRESHOLD_2 = (3.0 - math.sqrt(5.0)) / 2.0
EXAMPLES = Path(__file__).resolve().parents[1] / "examples"

missing_union = SetFamily.from_sets(2, [(), (1,), (2,)])
chain = SetFamily.from_sets(2, [(), (1,), (1, 2)])


def union_closure(n, masks):
    closed = set(masks)
    grown = True
    while grown:
        new = {a | b for a in closed for b in closed} - closed
        grown = bool(new)
        closed |= new
    return SetFamily(n, tuple(closed))


def test_family_validation():
    with pytest.raises(DomainError):
        SetFamily(3, ())
    with pytest.raises(DomainError):
        SetFamily(2, (1, 1))
    with pytest.raises(DomainError):
        SetFamily(2, (4,))
    with pytest.raises(DomainError):
        SetFamily(17, (0,))
    family = SetFamily(3, (5, 0, 3))
    assert family.members == (0, 3, 5)
    assert family.to_sets() == [(), (1, 2), (1, 3)]
    assert family_from_code(3, family.code) == family
    with pytest.raises(DomainError):
        family_from_code(2, 0)


def test_union_closed_examples():
    assert is_union_closed(power_set(3))
    assert not is_union_closed(missing_union)
    assert is_union_closed(chain)


def test_closure_fraction_examples():
    assert closure_fraction(power_set(3), 2) == 1
    assert closure_fraction(missing_union, 2) == Fraction(7, 9)
    # ({1}, {2}, x) and permutations fail for every third set x
    assert closure_fraction(missing_union, 3) == Fraction(27 - 12, 27)


def test_closure_fraction_matches_sampling():
    exact = float(closure_fraction(missing_union, 2))
    estimate, error = sampled_closure_fraction(missing_union, 2, samples=100_000, seed=1)
    assert abs(estimate - exact) <= 5 * error
    again = sampled_closure_fraction(missing_union, 2, samples=100_000, seed=1)
    assert again == (estimate, error)


def test_scale_guard():
    with pytest.raises(ScaleError, match="sampled_closure_fraction"):
        closure_fraction(power_set(16), 2)


def test_scale_guard_threshold():
    with pytest.raises(ScaleError):
        closure_fraction(power_set(3), 2, max_tuples=63)
    assert closure_fraction(power_set(3), 2, max_tuples=64) == 1


def test_union_counts():
    counts = union_counts(missing_union, 2)
    assert counts.tolist() == [1, 3, 3, 2]
    big = union_counts(power_set(4), 15)
    assert big.sum() == 16**15
    assert big[0] == 1
    assert big[15] == 16**15 - sum(int(c) for c in big[:15])


def test_pairwise_closure_equals_full_closure():
    rng = np.random.default_rng(2024)
    for _ in range(1000):
        n = int(rng.integers(1, 5))
        masks = np.flatnonzero(rng.random(1 << n) < 0.3)
        if len(masks) == 0:
            continue
        family = SetFamily(n, tuple(masks))
        if rng.random() < 0.5:
            family = union_closure(n, family.members)
        closed = is_union_closed(family)
        for k in (2, 3):
            assert closed == (closure_fraction(family, k) == 1)


@given(st.sets(st.integers(0, 15), min_size=1), st.permutations(range(4)))
def test_relabeling_invariance(masks, permutation):
    family = SetFamily(4, tuple(masks))
    moved = family.relabel(permutation)
    assert closure_fraction(moved, 2) == closure_fraction(family, 2)
    assert max_frequency(moved)[1] == max_frequency(family)[1]
    assert is_union_closed(moved) == is_union_closed(family)


def test_max_frequency_examples():
    assert max_frequency(power_set(3)) == (1, Fraction(1, 2))
    assert max_frequency(SetFamily.from_sets(1, [(), (1,)])) == (1, Fraction(1, 2))
    assert max_frequency(chain) == (1, Fraction(2, 3))
    for n in range(1, 5):
        assert max_frequency(power_set(n))[1] == Fraction(1, 2)


def test_corollary_bound_examples(alpha_of):
    value, conservative = corollary_bound(2, 0, 8, alpha=alpha_of(2))
    assert value == pytest.approx(THRESHOLD_2, abs=1e-12)
    assert conservative <= THRESHOLD_2 and conservative == pytest.approx(THRESHOLD_2, abs=1e-11)

    eps = 0.1
    expected = THRESHOLD_2 - (2 * eps + 2 * eps * math.log(1 / eps) / math.log(16))
    value, conservative = corollary_bound(2, eps, 16, alpha=alpha_of(2))
    assert value == pytest.approx(expected, abs=1e-12)
    assert value == pytest.approx(0.015870, abs=1e-6)
    assert conservative <= value + 1e-15
    assert conservative == pytest.approx(value, abs=1e-11)

    value, _ = corollary_bound(3, 0, 100, alpha=alpha_of(3))
    assert value == pytest.approx(0.317672, abs=1e-6)


def test_corollary_bound_decreases_in_epsilon(alpha_of):
    for k in (2, 3, 4):
        values = [corollary_bound(k, e, 50, alpha=alpha_of(k))
                  for e in np.linspace(0.0, 0.49, 50).tolist()]
        exact = [v for v, _ in values]
        lower = [c for _, c in values]
        assert all(b < a for a, b in zip(exact, exact[1:]))
        assert all(b <= a for a, b in zip(lower, lower[1:]))
        assert all(c <= v + 1e-15 for v, c in values)


def test_corollary_bound_domain(alpha_of):
    alpha = alpha_of(2)
    for args in ((2, 0.5, 8), (2, -0.1, 8), (2, 0.1, 1), (1, 0.1, 8),
                 (2.5, 0.1, 8)):
        with pytest.raises(DomainError):
            corollary_bound(*args, alpha=alpha)
    value, _ = corollary_bound(2, Fraction(1, 10), 16, alpha=alpha)
    assert value == pytest.approx(corollary_bound(2, 0.1, 16, alpha=alpha)[0])


def test_closure_stats(alpha_of):
    stats = closure_stats(power_set(3), 2, alpha=alpha_of(2))
    assert stats.c == 1 and stats.epsilon == 0
    assert stats.max_freq == Fraction(1, 2) and stats.max_freq_element == 1
    assert stats.bound == pytest.approx(THRESHOLD_2, abs=1e-11)
    assert stats.satisfied is True and stats.union_closed
    data = json.loads(stats.to_json())
    assert data["c_exact"] == "1" and data["satisfied"] is True
    assert data["tuple_convention"] == TUPLE_CONVENTION

    loose = closure_stats(SetFamily.from_sets(2, [(1,), (2,)]), 2, alpha=alpha_of(2))
    assert loose.c == Fraction(1, 2)
    assert loose.bound is None and loose.satisfied is None

    single = closure_stats(SetFamily.from_sets(2, [(1,)]), 2, alpha=alpha_of(2))
    assert single.bound is None


@pytest.mark.parametrize("n, k, checked", [(1, 2, 2), (2, 2, 14), (3, 2, 254),
                                           (3, 3, 254)])
def test_exhaustive_no_violations(alpha_of, n, k, checked):
    report = exhaustive_check(n, k, alpha=alpha_of(k))
    assert report.families_checked == checked
    assert report.violations == ()
    assert report.min_slack is not None and report.min_slack >= 0.0
    assert report.tuple_convention == "ordered_with_repetition"


def test_exhaustive_union_closed(alpha_of):
    report = exhaustive_check(3, 2, alpha=alpha_of(2), union_closed_only=True)
    assert report.min_max_freq == Fraction(1, 2)
    assert report.min_max_freq >= THRESHOLD_2
    assert report.violations == ()
    assert 0 < report.families_checked < 254


def test_exhaustive_limits():
    with pytest.raises(DomainError):
        exhaustive_check(5, 2)
    with pytest.raises(DomainError):
        exhaustive_check(3, 1)


@pytest.mark.slow
def test_exhaustive_four_elements(alpha_of):
    one = exhaustive_check(4, 2, alpha=alpha_of(2))
    assert one.families_checked == 2**16 - 2
    assert one.violations == ()
    two = exhaustive_check(4, 2, alpha=alpha_of(2), workers=2)
    assert two.to_dict() == one.to_dict()


def test_random_probe(alpha_of):
    report = random_probe(5, 2, 10_000, 42, alpha=alpha_of(2))
    assert report.families_checked == 10_000
    assert report.violations == ()
    report = random_probe(5, 3, 1000, 7, alpha=alpha_of(3))
    assert report.violations == ()
    assert report.seed == 7 and report.trials == 1000


def test_random_probe_reproducible(alpha_of):
    first = random_probe(5, 3, 300, 7, alpha=alpha_of(3))
    second = random_probe(5, 3, 300, 7, alpha=alpha_of(3), workers=2)
    assert first.to_dict() == second.to_dict()


def test_random_probe_empty(alpha_of):
    report = random_probe(5, 2, 0, 1, alpha=alpha_of(2))
    assert report.families_checked == 0
    assert report.violations == () and report.min_slack is None
    assert json.loads(report.to_json())["families_checked"] == 0


def test_family_text_files(tmp_path):
    family = read_family(EXAMPLES / "powerset3.txt")
    assert family == power_set(3)
    text = write_family(family)
    assert text.splitlines()[:3] == ["3", "∅", "1"]
    fname = tmp_path / "chain.txt"
    write_family(chain, fname)
    assert read_family(fname) == chain


@pytest.mark.parametrize("text, line", [("", 1), ("x\n", 1), ("3\n1,4\n", 2),
                                        ("3\n1\n\n1,,2\n", 4), ("2\n1\n1\n", 3),
                                        ("2\n", 2)])
def test_malformed_family_text(text, line):
    with pytest.raises(FamilyFormatError) as err:
        parse_family(text.splitlines())
    assert err.value.line == line
    assert f"line {line}" in str(err.value)


def test_non_utf8_family_file(tmp_path):
    fname = tmp_path / "latin1.txt"
    fname.write_bytes("3\n1\n2,3\né\n".encode("latin-1"))
    with pytest.raises(FamilyFormatError) as err:
        read_family(fname)
    assert err.value.line == 4
