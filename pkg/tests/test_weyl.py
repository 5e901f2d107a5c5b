from __future__ import annotations

from fractions import Fraction

import mpmath
import numpy as np
import pytest

from dioph.errors import DomainError, EmptyRange
from dioph.families import PSShift, Zero
from dioph.weyl import (
    SequenceSample,
    c1_generator,
    equid_report,
    sequence_c1,
    star_discrepancy,
    vdc_difference,
    weyl_sum,
)


A = Fraction(1, 4)
JP = (Fraction(3, 10), Fraction(9, 20))


def mp_g(n, m):
    """gamma=1, phi=0: n ** (log a / log(m/n)) at 256 bits."""
    theta = mpmath.mpf(m) / n
    return mpmath.power(n, mpmath.log(mpmath.mpf(1) / 4) / mpmath.log(theta))


# -- generation ---------------------------------------------------------------------------


def test_sequence_single_value():
    s = sequence_c1(A, 1, Zero(), 10, JP)
    assert s.N == 1
    want = float(mpmath.frac(mp_g(10, 4)))
    assert s.values[0] == pytest.approx(want, abs=1e-15)
    assert abs(s.values[0] - 0.58) < 0.01


def test_sequence_matches_mpmath():
    s = sequence_c1(A, 1, Zero(), 1000, JP)
    want = [float(mpmath.frac(mp_g(1000, m))) for m in range(301, 450)]
    assert np.max(np.abs(s.values - np.array(want))) < 1e-15


def test_sequence_empty():
    with pytest.raises(EmptyRange):
        sequence_c1(A, 1, Zero(), 1, JP)


def test_sequence_psshift_length():
    # m = 3001..4499 lie strictly inside (3000, 4500)
    s = sequence_c1(A, 1, PSShift(A, 1), 10**4, JP)
    assert s.N == 1499
    assert s.source["m_range"] == [3001, 4499]


def test_sequence_closure_check():
    with pytest.raises(DomainError):
        sequence_c1(A, 1, Zero(), 100, (Fraction(3, 10), Fraction(1, 2)))
    with pytest.raises(DomainError):
        sequence_c1(A, 1, Zero(), 100, (Fraction(1, 4), Fraction(2, 5)))
    with pytest.raises(DomainError):
        sequence_c1(A, 0, Zero(), 100, JP)


def test_sequence_exponent_range():
    s = sequence_c1(A, 1, Zero(), 1000, JP)
    t_lo = float(mpmath.log(mpmath.mpf(1) / 4) / mpmath.log(mpmath.mpf(3) / 10))
    t_hi = float(mpmath.log(mpmath.mpf(1) / 4) / mpmath.log(mpmath.mpf(9) / 20))
    assert s.source["t_min"] <= t_lo < s.source["t_max"]
    assert t_hi <= s.source["t_max"]
    assert 1 < s.source["t_min"] < s.source["t_max"] < 2


def test_sequence_jobs_invariant():
    a = sequence_c1(A, 1, PSShift(A, 1), 2000, JP, jobs=1)
    b = sequence_c1(A, 1, PSShift(A, 1), 2000, JP, jobs=3)
    assert np.array_equal(a.values, b.values)


def test_sample_validation():
    with pytest.raises(DomainError):
        SequenceSample(np.array([0.5, 1.0]))


# -- Weyl sums ------------------------------------------------------------------------------


def test_weyl_sum_examples():
    assert weyl_sum(SequenceSample(np.zeros(7)), 1) == pytest.approx(1.0)
    assert weyl_sum(SequenceSample(np.array([0.0, 0.5])), 1) == pytest.approx(0.0, abs=1e-15)
    grid = SequenceSample(np.arange(100) / 100)
    assert weyl_sum(grid, 1) == pytest.approx(0.0, abs=1e-13)
    assert weyl_sum(grid, 100) == pytest.approx(1.0)
    with pytest.raises(DomainError):
        weyl_sum(grid, 0)


def test_weyl_sum_in_unit_interval():
    rng = np.random.default_rng(0)
    s = SequenceSample(rng.random(1000))
    for b in (-3, -1, 1, 2, 7):
        assert 0 <= weyl_sum(s, b) <= 1


# -- van der Corput differencing ---------------------------------------------------------------


def test_vdc_constant_generator():
    d = vdc_difference(lambda i: Fraction(5, 7), 20, 3)
    assert d.N == 17 and np.all(d.values == 0)


def test_vdc_linear_generator():
    d = vdc_difference(lambda i: Fraction(3, 10) * i, 30, 1)
    assert np.allclose(d.values, 0.3, atol=0)


def test_vdc_matches_mpmath():
    gen = c1_generator(A, 1, Zero(), 1000, JP)
    d = vdc_difference(gen, gen.count, 1)
    want = [float(mpmath.frac(mp_g(1000, m + 1) - mp_g(1000, m))) for m in range(301, 449)]
    assert d.N == 148
    assert np.max(np.abs(d.values - np.array(want))) < 1e-15
    assert float(np.mean(d.values)) == pytest.approx(0.5103437554298791, abs=1e-14)
    assert star_discrepancy(d) == pytest.approx(0.06639437106701174, abs=1e-14)


def test_vdc_validation():
    with pytest.raises(DomainError):
        vdc_difference(lambda i: 0, 5, 0)
    with pytest.raises(DomainError):
        vdc_difference(lambda i: 0, 3, 3)


# -- star discrepancy and interval report -------------------------------------------------------


def test_star_discrepancy_examples():
    assert star_discrepancy(SequenceSample(np.array([0.5]))) == 0.5
    assert star_discrepancy(SequenceSample(np.array([0.25, 0.75]))) == 0.25
    # repeated zeros: the anchored box [0, t) with t just above 0 holds every point
    assert star_discrepancy(SequenceSample(np.zeros(3))) == 1.0


def test_star_discrepancy_brute_force():
    rng = np.random.default_rng(4)
    xs = np.round(rng.random(40), 3)
    s = SequenceSample(xs)
    # sup over anchored [0, t) and [0, t] boxes, t at each sample point
    worst = 0.0
    for t in np.concatenate([xs, [1.0]]):
        worst = max(worst, abs(np.mean(xs < t) - t), abs(np.mean(xs <= t) - t))
    assert star_discrepancy(s) == pytest.approx(worst, abs=1e-12)


def test_equid_report_grid():
    N = 1000
    s = SequenceSample(np.arange(N) / N)
    (st,) = equid_report(s, [(0, 0.5)])
    assert st.deviation <= 1 / N
    assert equid_report(s, []) == []
    with pytest.raises(DomainError):
        equid_report(s, [(0.5, 1.5)])


def test_equidistribution_pinned():
    big = sequence_c1(A, 1, Zero(), 10**5, JP)
    (st,) = equid_report(big, [(0.2, 0.5)])
    assert st.deviation < 0.02
    assert st.deviation == pytest.approx(0.002980198679912005, abs=1e-12)
    assert star_discrepancy(big) == pytest.approx(0.005121789467344567, abs=1e-12)
    small = sequence_c1(A, 1, Zero(), 1000, JP)
    assert star_discrepancy(small) == pytest.approx(0.059132199630691606, abs=1e-12)
