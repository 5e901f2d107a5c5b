from __future__ import annotations

import warnings
from fractions import Fraction

import gmpy2
import mpmath
import pytest

from dioph.errors import (
    ClosureViolation,
    Condition29Violation,
    DomainError,
    NotCoprime,
    PreconditionError,
    SkippedSmallN,
)
from dioph.numeric import ExactScalar
from dioph.ps import (
    direct_solutions,
    floor_pow_many,
    is_member,
    make_equation,
    oriented_equation,
    ps_upto,
    ps_value,
    quotient_set,
    reduced_membership,
    reduction_audit,
    sample_alphas,
    solvability_scan,
    solve_ps_theta,
    worst_case_instance,
)



def ps_exact(n: int, alpha: Fraction) -> int:
    """floor(n^(u/v)) as the integer v-th root of n^u."""
    return int(gmpy2.iroot(gmpy2.mpz(n) ** alpha.numerator, alpha.denominator)[0])


def brute_pairs(a1, a2, b2, alpha: Fraction, n_max: int):
    """(n, k, x, y) with x = floor(n^alpha), y = (a1 x + b2)/a2 an integer in PS(alpha)."""
    xs = [ps_exact(n, alpha) for n in range(1, n_max + 1)]
    out = []
    for n, x in enumerate(xs, 1):
        num = a1 * x + b2
        if num % a2 or num <= 0:
            continue
        y = num // a2
        k = 1
        while ps_exact(k, alpha) < y:
            k += 1
        if ps_exact(k, alpha) == y:
            out.append((n, k, x, y))
    return out


def brute_pairs_fast(a1, a2, b2, alpha: Fraction, n_max: int) -> int:
    xs = [ps_exact(n, alpha) for n in range(1, n_max + 1)]
    members = set(xs)
    top = xs[-1]
    k = n_max
    while True:
        k += 1
        v = ps_exact(k, alpha)
        if v > top:
            break
        members.add(v)
    count = 0
    for x in xs:
        num = a1 * x + b2
        if num > 0 and num % a2 == 0 and num // a2 in members:
            count += 1
    return count


# -- values and membership --------------------------------------------------------------------


@pytest.mark.parametrize("n, alpha, want", [(5, 2, 25), (7, "3/2", 18), (2, "3/2", 2)])
def test_ps_value(n, alpha, want):
    assert ps_value(n, alpha) == want


@pytest.mark.parametrize("y, alpha, want", [(25, 2, True), (18, "3/2", True), (4, "3/2", False)])
def test_is_member(y, alpha, want):
    assert is_member(y, alpha) is want


def test_ps_value_rejects_alpha_not_above_one():
    with pytest.raises(DomainError):
        ps_value(3, 1)
    with pytest.raises(DomainError):
        ps_value(3, "1/2")


def test_floor_pow_many_matches_exact_roots():
    for alpha in (Fraction(3, 2), Fraction(8, 5), Fraction(12, 5), Fraction(19, 10), Fraction(21, 10)):
        got = floor_pow_many(range(1, 5001), alpha)
        assert got.tolist() == [ps_exact(n, alpha) for n in range(1, 5001)]


def test_floor_pow_many_surd_against_mpmath():
    got = floor_pow_many(range(1, 301), "sqrt(3)")
    want = [int(mpmath.floor(mpmath.power(n, mpmath.sqrt(3)))) for n in range(1, 301)]
    assert got.tolist() == want


def test_ps_upto():
    table = ps_upto("3/2", 30).tolist()
    assert [v for v in table if v <= 30] == [1, 2, 5, 8, 11, 14, 18, 22, 27]
    assert table == [ps_exact(k, Fraction(3, 2)) for k in range(1, len(table) + 1)]


def test_membership_agrees_with_table():
    table = set(ps_upto("3/2", 2000).tolist())
    assert all(is_member(y, "3/2") == (y in table) for y in range(1, 2001))


# -- equations ------------------------------------------------------------------------------


def test_make_equation():
    assert make_equation(1, 2, 0).d == 0
    assert make_equation(1, 3, 1).d == 2
    with pytest.raises(NotCoprime):
        make_equation(2, 4, 1)


def test_residue_makes_rhs_integral():
    for a1, a2, b2 in [(1, 3, 1), (2, 5, 1), (3, 7, -2)]:
        eq = make_equation(a1, a2, b2)
        assert all((eq.rhs(x).denominator == 1) == (x % a2 == eq.d) for x in range(50))


def test_oriented_equation():
    eq = oriented_equation(make_equation(2, 1, 0))
    assert (eq.a1, eq.a2) == (1, 2)
    assert oriented_equation(make_equation(1, 2, 0)) == make_equation(1, 2, 0)


# -- direct search ---------------------------------------------------------------------------


def test_direct_solutions_three_halves():
    eq = make_equation(1, 2, 0)
    got = [(p.n, p.k, p.x, p.y) for p in direct_solutions(eq, "3/2", 30)]
    assert got == brute_pairs(1, 2, 0, Fraction(3, 2), 30)
    assert [(x, y) for _, _, x, y in got] == [(2, 1), (22, 11), (36, 18), (82, 41), (140, 70), (164, 82)]


def test_direct_solutions_five_halves_empty():
    eq = make_equation(1, 2, 0)
    assert direct_solutions(eq, "5/2", 100) == []
    assert brute_pairs(1, 2, 0, Fraction(5, 2), 100) == []


def test_direct_solutions_square_empty():
    assert direct_solutions(make_equation(1, 2, 0), 2, 10) == []


def test_direct_solutions_cap():
    assert len(direct_solutions(make_equation(1, 2, 0), "3/2", 30, cap=2)) == 2


def test_scan_counts_pinned():
    eq = make_equation(1, 2, 0)
    rows = solvability_scan(eq, ["1.5", "2.5"], 10**4)
    assert [r.count for r in rows] == [82, 0]
    assert brute_pairs_fast(1, 2, 0, Fraction(3, 2), 10**4) == 82
    third = solvability_scan(make_equation(1, 3, 1), ["1.6"], 10**4)
    assert third[0].count == 19 == brute_pairs_fast(1, 3, 1, Fraction(8, 5), 10**4)
    assert solvability_scan(eq, [], 100) == []


def test_scan_records_errors():
    rows = solvability_scan(make_equation(1, 2, 0), ["1/2", "3/2"], 30)
    assert rows[0].count is None and "DomainError" in rows[0].error
    assert rows[1].count == 6


# -- the reduction ---------------------------------------------------------------------------


def test_reduced_membership_examples():
    eq = make_equation(1, 2, 0)
    assert reduced_membership(eq, "3/2", 2) is True
    assert reduced_membership(eq, "3/2", 3) is False
    with pytest.raises(SkippedSmallN):
        reduced_membership(make_equation(1, 2, -5), "3/2", 2)
    with pytest.raises(DomainError):
        reduced_membership(make_equation(3, 2, 0), "3/2", 2)


def test_reduction_audit_small():
    for a1, a2, b2 in [(1, 2, 0), (1, 3, 1), (2, 5, 1)]:
        eq = make_equation(a1, a2, b2)
        for alpha in ("1.6", "2.4", "sqrt(2)"):
            res = reduction_audit(eq, alpha, 2000)
            assert res.mismatches == [] and res.agree == res.checked


def test_reduction_audit_counts_skips():
    res = reduction_audit(make_equation(1, 2, -5), "3/2", 100)
    assert res.skipped > 0 and res.checked + res.skipped == 100 and res.mismatches == []


# -- alpha samples and quotient sets -------------------------------------------------------------


def test_sample_alphas_deterministic():
    a = sample_alphas("1.2", "1.9", 20, 0)
    assert a == sample_alphas("1.2", "1.9", 20, 0)
    assert a != sample_alphas("1.2", "1.9", 20, 1)
    assert all(Fraction(6, 5) < x.exact < Fraction(19, 10) for x in a)
    with pytest.raises(DomainError):
        sample_alphas(2, 1, 3, 0)


def brute_quotients(alpha: Fraction, N_floor, n_max, h):
    vals = {ps_exact(n, alpha) for n in range(1, n_max + 1)}
    vals = {v for v in vals if v >= N_floor}
    out = set()
    for m in vals:
        for n in vals:
            q = Fraction(m, n)
            if q.numerator <= h and q.denominator <= h:
                out.add(q)
    return sorted(out)


def test_quotient_set_examples():
    got = quotient_set("3/2", 1, 30, 2)
    assert Fraction(2) in got and Fraction(1, 2) in got
    assert got == brute_quotients(Fraction(3, 2), 1, 30, 2)
    assert quotient_set("3/2", 1, 30, 1) == [Fraction(1)]


def test_quotient_set_five_halves():
    # 4528 = floor(29^2.5) and 13584 = floor(45^2.5) = 3 * 4528
    got = quotient_set("5/2", 100, 200, 3)
    assert got == [Fraction(1, 3), Fraction(1), Fraction(3)]
    assert got == brute_quotients(Fraction(5, 2), 100, 200, 3)
    assert ps_exact(29, Fraction(5, 2)) * 3 == ps_exact(45, Fraction(5, 2))


def test_quotient_set_validation():
    with pytest.raises(DomainError):
        quotient_set("3/2", 10**9, 10, 2)
    with pytest.raises(DomainError):
        quotient_set("3/2", 1, 10, 0)


# -- the theta system --------------------------------------------------------------------------


def test_solve_ps_theta_even():
    got = solve_ps_theta(Fraction(1, 4), 0, Fraction(1, 10), 1, (0, 1), Fraction(1, 2), 1, 20)
    assert [r.n for r in got] == list(range(2, 21, 2))


def test_solve_ps_theta_empty_I():
    with pytest.raises(PreconditionError):
        solve_ps_theta(Fraction(1, 4), 0, Fraction(1, 10), 1, (0, 0), Fraction(1, 2), 1, 20)


def mp_ps_theta(theta, n_max):
    th = mpmath.mpf(theta)
    t = mpmath.log(mpmath.mpf(1) / 4) / mpmath.log(th)
    out = []
    for n in range(1, n_max + 1):
        nt1 = mpmath.power(n, t - 1)
        x = n * th + th / (t * nt1)
        if abs(x - mpmath.nint(x)) <= mpmath.mpf(1) / 10 / nt1 and mpmath.frac(n * nt1) < 0.5:
            out.append(n)
    return out


def test_solve_ps_theta_pinned():
    got = solve_ps_theta(Fraction(1, 4), 1, Fraction(1, 10), 1, (0, Fraction(1, 2)), "0.42", 1, 10**5)
    assert [r.n for r in got] == [2, 7, 69]
    assert mp_ps_theta("0.42", 2000) == [2, 7, 69]


def test_worst_case_exponent():
    with warnings.catch_warnings():
        warnings.simplefilter("error", Condition29Violation)
        wc = worst_case_instance(Fraction(1, 4), 1, Fraction(1, 10), 1, (0, 1), ("0.30", "0.32"))
    want = mpmath.log(mpmath.mpf(1) / 4) / mpmath.log(mpmath.mpf("0.32")) - 1
    assert float(wc.sigma) == pytest.approx(float(want), abs=1e-15)
    assert abs(float(wc.sigma) - 0.216651) < 1e-6
    assert wc.interval_ok


def test_worst_case_closure():
    with pytest.raises(ClosureViolation):
        worst_case_instance(Fraction(1, 4), 1, Fraction(1, 10), 1, (0, 1), ("0.3", "0.6"))
    with pytest.raises(ClosureViolation):
        worst_case_instance(Fraction(1, 4), 1, Fraction(1, 10), 1, (0, 1), ("0.2", "0.4"))


def test_worst_case_interval_condition_warns():
    with pytest.warns(Condition29Violation):
        wc = worst_case_instance(Fraction(1, 4), 1, Fraction(1, 10), 1, (0, 1), ("0.30", "0.45"))
    assert not wc.interval_ok
    assert wc.lhs == pytest.approx(0.5847, abs=1e-4)
    assert wc.rhs == pytest.approx(0.2639, abs=1e-4)
    assert isinstance(wc.instance.J[0], ExactScalar)
