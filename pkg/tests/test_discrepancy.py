from __future__ import annotations

from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dioph.discrepancy import (
    admissible_H,
    count_in_interval,
    erdos_turan_bound,
    h_from_length,
    length_mod_1,
    membership,
    reduce_mod_1,
    verify_lemma,
)
from dioph.errors import DomainError, IntegerMultiple
from dioph.numeric import parse_scalar


SQRT2 = parse_scalar("sqrt(2)")
GOLDEN = parse_scalar("(1+sqrt(5))/2")


def mp_count(alpha_mp, L, lo, hi):
    """Direct 256-bit scan with the half-open convention after reduction mod 1."""
    lo_f = lo - mpmath.floor(lo)
    width = hi - lo
    out = 0
    for l in range(1, L + 1):
        f = mpmath.frac(alpha_mp * l)
        if width >= 1:
            out += 1
        elif lo_f + width <= 1:
            out += lo_f <= f < lo_f + width
        else:
            out += f >= lo_f or f < lo_f + width - 1
    return out


def pieces(J):
    return [(lo.exact, hi.exact) for lo, hi in reduce_mod_1(J)]


def test_reduce_mod_1_examples():
    F = Fraction
    assert pieces((F("0.2"), F("0.7"))) == [(F("0.2"), F("0.7"))]
    assert pieces((F("0.8"), F("1.3"))) == [(F("0.8"), 1), (0, F("0.3"))]
    assert pieces((F("-0.1"), F("1.2"))) == [(0, 1)]
    assert length_mod_1((F("0.8"), F("1.3"))) == F(1, 2)
    with pytest.raises(DomainError):
        reduce_mod_1((F(1, 2), F(1, 2)))


def test_count_rational_examples():
    assert count_in_interval(Fraction(1, 2), 4, (Fraction("-0.01"), Fraction("0.49"))) == 2
    assert count_in_interval(Fraction(1, 3), 3, (Fraction("-0.01"), Fraction("0.5"))) == 2


def test_count_sqrt2_pinned():
    J = (Fraction(0), Fraction(1, 2))
    assert count_in_interval(SQRT2, 100, J) == 51
    assert mp_count(mpmath.sqrt(2), 100, mpmath.mpf(0), mpmath.mpf("0.5")) == 51


ALPHAS = {
    "sqrt(2)": lambda: mpmath.sqrt(2),
    "sqrt(3)": lambda: mpmath.sqrt(3),
    "(1+sqrt(5))/2": lambda: (1 + mpmath.sqrt(5)) / 2,
    "19/7": lambda: mpmath.mpf(19) / 7,
    "0.123456789": lambda: mpmath.mpf(123456789) / 10**9,
}


def mp_of(q: Fraction):
    return mpmath.mpf(q.numerator) / q.denominator


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(sorted(ALPHAS)),
       st.fractions(min_value=-2, max_value=2, max_denominator=1000),
       st.fractions(min_value=Fraction(1, 1000), max_value=Fraction(3, 2), max_denominator=1000),
       st.integers(min_value=1, max_value=400))
def test_count_matches_mpmath(alpha_text, lo, width, L):
    hi = lo + width
    want = mp_count(ALPHAS[alpha_text](), L, mp_of(lo), mp_of(hi))
    assert count_in_interval(parse_scalar(alpha_text), L, (lo, hi)) == want


def test_membership_shape():
    m = membership(SQRT2, 10, (Fraction(0), Fraction(1, 2)))
    assert m.shape == (10,) and m.dtype == bool
    with pytest.raises(DomainError):
        membership(SQRT2, 0, (0, 1))


def test_bound_sqrt2_h1():
    rep = erdos_turan_bound(SQRT2, 100, (Fraction(0), Fraction(1, 2)), 1)
    want = 50 + 100 + 6 / (mpmath.sqrt(2) - 1)
    assert rep.bound >= want and rep.bound - want < 1e-12
    assert rep.count == 51 and not rep.violated
    assert rep.main == 50.0 and rep.middle == 100.0


def test_bound_integer_multiple():
    with pytest.raises(IntegerMultiple) as e:
        erdos_turan_bound(Fraction(1, 2), 4, (Fraction("-0.01"), Fraction("0.49")), 2)
    assert e.value.h == 2


def test_bound_golden_ratio():
    rep = erdos_turan_bound(GOLDEN, 10**4, (Fraction(0), Fraction(1, 10)), 20)
    assert not rep.violated
    assert rep.count == mp_count((1 + mpmath.sqrt(5)) / 2, 10**4, mpmath.mpf(0), mpmath.mpf("0.1"))


def test_verify_lemma_sqrt2():
    reps = verify_lemma(SQRT2, 1000, (Fraction(3, 10), Fraction(2, 5)), 30)
    assert [r.H for r in reps] == list(range(1, 31))
    assert not any(r.violated for r in reps)


def test_verify_lemma_rational_stops_before_integer_multiple():
    reps = verify_lemma(Fraction(1, 3), 9, (Fraction(0), Fraction(1, 2)), 2)
    assert [r.H for r in reps] == [1, 2]
    assert reps[0].count == 6 and not any(r.violated for r in reps)
    assert admissible_H(Fraction(1, 3), 10) == 2


def test_verify_lemma_rejects_zero_L():
    with pytest.raises(DomainError):
        verify_lemma(SQRT2, 0, (0, 1), 2)


def test_tail_is_upper_bound():
    rep = erdos_turan_bound(SQRT2, 1000, (Fraction(0), Fraction(1, 3)), 10)
    tail = 6 * mpmath.fsum(1 / (h * abs(h * mpmath.sqrt(2) - mpmath.nint(h * mpmath.sqrt(2)))) for h in range(1, 11))
    assert rep.tail >= tail and rep.tail - tail < 1e-9


def test_h_from_length():
    assert h_from_length((Fraction(0), Fraction(1, 10))) == 10
    assert h_from_length((Fraction(0), Fraction(3, 10))) == 3
    assert h_from_length((Fraction(0), Fraction(2))) == 1
