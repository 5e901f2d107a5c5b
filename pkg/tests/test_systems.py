from __future__ import annotations

from fractions import Fraction

import mpmath
import numpy as np
import pytest

from dioph.errors import DomainError, EmptyRange, ParseError, PreconditionError
from dioph.families import (
    ConstantBelowTenth,
    NoTwist,
    PowerLaw,
    PowerPhase,
    PSShift,
    Sinusoid,
    Table,
    Zero,
    parse_phi,
    parse_psi,
    parse_rho,
)
from dioph.numeric import BigReal
from dioph.systems import (
    SystemInstance,
    check_hypotheses,
    eval_instance,
    sample_theta,
    solve_system,
    survey_measure,
    target_intervals,
)


TENTH = Fraction(1, 10)


def power(c, sigma, J=(0, 1), phi=None, rho=None, I=(0, 1)):
    return SystemInstance(J, PowerLaw(c, sigma), phi or Zero(), rho or NoTwist(), I)


def statuses(rep):
    return {k: v.status for k, v in rep.verdicts.items()}


# -- evaluation and solving -------------------------------------------------------------------


def test_eval_instance_examples():
    inst = power(TENTH, Fraction(1, 2))
    r2 = eval_instance(inst, Fraction(1, 2), 2)
    assert r2.passed and r2.residual_exact == 0
    r3 = eval_instance(inst, Fraction(1, 2), 3)
    assert not r3.passed and r3.residual_exact == Fraction(1, 2)


def test_eval_instance_sinusoid_at_zero():
    inst = SystemInstance((-1, 1), PowerLaw(TENTH, Fraction(1, 2)), Sinusoid(Fraction(1, 3), Fraction(1, 6)))
    rec = eval_instance(inst, 0, 5)
    assert rec.passed and rec.residual.contains(0)


def test_solve_even_multiples():
    inst = power(TENTH, Fraction(1, 2))
    assert [r.n for r in solve_system(inst, Fraction(1, 2), 1, 10)] == [2, 4, 6, 8, 10]
    assert [r.n for r in solve_system(inst, Fraction(1, 3), 1, 9)] == [3, 6, 9]


def test_solve_max_solutions_and_primes():
    inst = power(TENTH, Fraction(1, 2))
    assert [r.n for r in solve_system(inst, Fraction(1, 2), 1, 100, max_solutions=3)] == [2, 4, 6]
    assert [r.n for r in solve_system(inst, Fraction(1, 2), 1, 100, primes_only=True)] == [2]


def test_solve_rejects_theta_outside_J():
    inst = power(TENTH, Fraction(1, 2), J=(0, Fraction(1, 2)))
    with pytest.raises(DomainError):
        solve_system(inst, Fraction(1, 2), 1, 10)
    with pytest.raises(PreconditionError):
        solve_system(inst, Fraction(1, 4), 5, 1)


# 256-bit direct scan of ||n*theta + sin(n^(1/3) theta)/n^(1/6)|| <= n^(-1/3)/10 for n <= 10^4
SINUSOID_SOLUTIONS = [
    7, 20, 25, 43, 74, 92, 105, 235, 248, 295, 329, 363, 397, 431, 452, 486, 507, 583, 604, 680, 701, 722, 840,
    861, 882, 979, 1000, 1021, 1118, 1139, 1215, 1236, 1312, 1388, 1464, 1540, 1595, 1650, 1705, 1760, 1815, 1870,
    1925, 2014, 2069, 2103, 2158, 2192, 2281, 2370, 2404, 2493, 2527, 2650, 2684, 2807, 2841, 2875, 2998, 3032,
    3066, 3189, 3223, 3257, 3380, 3414, 3448, 3571, 3605, 3639, 3762, 3796, 3919, 3953, 4076, 4110, 4199, 4233,
    4322, 4356, 4445, 4479, 4568, 4691, 4780, 4869, 4958, 5047, 5136, 5225, 5314, 5403, 5492, 5547, 5636, 5691,
    5780, 5835, 5924, 5979, 6068, 6123, 6267, 6322, 6377, 6521, 6576, 6631, 6775, 6830, 6885, 6940, 7139, 7194,
    7249, 7304, 7613, 7668, 7723, 7778, 7833, 8142, 8197, 8252, 8307, 8362, 8616, 8671, 8726, 8781, 9035, 9090,
    9145, 9344, 9399, 9454, 9653, 9708, 9763, 9907, 9962,
]


def test_solve_sinusoid_pinned():
    inst = power(TENTH, Fraction(1, 3), phi=Sinusoid(Fraction(1, 3), Fraction(1, 6)))
    got = [r.n for r in solve_system(inst, "0.618034", 1, 10**4)]
    assert got == SINUSOID_SOLUTIONS


def test_solve_twist_filters():
    rho = PowerPhase(1, alpha=Fraction(3, 2))
    inst = power(TENTH, Fraction(1, 2), rho=rho, I=(0, Fraction(1, 2)))
    for r in solve_system(inst, Fraction(1, 2), 1, 50):
        frac = mpmath.frac(mpmath.power(r.n, 1.5))
        assert frac < 0.5
    every = [r.n for r in solve_system(power(TENTH, Fraction(1, 2)), Fraction(1, 2), 1, 50)]
    kept = [n for n in every if mpmath.frac(mpmath.power(n, 1.5)) < 0.5]
    assert [r.n for r in solve_system(inst, Fraction(1, 2), 1, 50)] == kept


# -- instances and families ---------------------------------------------------------------------


def test_instance_validation():
    with pytest.raises(PreconditionError):
        power(TENTH, 1, J=(Fraction(1, 2), Fraction(1, 2)))
    with pytest.raises(PreconditionError):
        power(TENTH, 1, I=(0, 0))
    with pytest.raises(PreconditionError):
        power(TENTH, 1, I=(0, Fraction(3, 2)))


def test_instance_json_round_trip():
    inst = SystemInstance((Fraction(3, 10), Fraction(9, 20)), PowerLaw(TENTH, Fraction(1, 3)),
                          PSShift(Fraction(1, 4), 1), PowerPhase(2, a=Fraction(1, 4)), (0, Fraction(1, 2)))
    again = SystemInstance.from_json(inst.to_json())
    assert again.to_json() == inst.to_json()


def test_psi_families():
    p = PowerLaw(1, Fraction(1, 2))
    assert p.exact(4) == Fraction(1, 20)  # clamped to 1/10
    with pytest.raises(DomainError):
        PowerLaw(TENTH, 0)
    with pytest.raises(DomainError):
        ConstantBelowTenth(TENTH)
    t = Table((Fraction(1, 20), Fraction(1, 40)), extend=True)
    assert t.exact(4) == Fraction(1, 160)
    with pytest.raises(DomainError):
        Table((Fraction(1, 20),)).exact(2)
    with pytest.raises(DomainError):
        Table((Fraction(1, 5),))


def test_parsers():
    psi = parse_psi("power:0.1,0.5")
    assert psi.exact(4) == PowerLaw(TENTH, Fraction(1, 2)).exact(4) == Fraction(1, 20)
    assert psi.spec() == "power:0.1,0.5"
    assert isinstance(parse_phi("sin:1/3,1/6"), Sinusoid)
    assert isinstance(parse_rho("power-t:1,1/4"), PowerPhase)
    for bad in ("gauss:1", "power:1"):
        with pytest.raises(ParseError):
            parse_psi(bad)
    with pytest.raises(ParseError):
        parse_phi("cos:1,1")
    with pytest.raises(DomainError):
        PowerPhase(0, alpha=2)


@pytest.mark.parametrize("phi", [Sinusoid(Fraction(1, 3), Fraction(1, 6)), PSShift(Fraction(1, 4), 1)])
def test_perturbation_derivative_matches_differences(phi):
    rng = np.random.default_rng(3)
    for _ in range(30):
        n = int(rng.integers(2, 5000))
        th = Fraction(int(rng.integers(310, 440)), 1000)
        h = Fraction(1, 10**6)
        up = phi.enclose(n, BigReal.exact(th + h, 256))
        dn = phi.enclose(n, BigReal.exact(th - h, 256))
        fd = (float(up) - float(dn)) / float(2 * h)
        d = float(phi.deriv_enclose(n, BigReal.exact(th, 256)))
        assert abs(fd - d) <= 1e-6 * max(1.0, abs(d))


def test_psshift_closed_form():
    phi = PSShift(Fraction(1, 4), 1)
    th = mpmath.mpf("0.4")
    t = mpmath.log(mpmath.mpf(1) / 4) / mpmath.log(th)
    want = th / (t * mpmath.power(10, t - 1))
    got = phi.enclose(10, BigReal.exact(Fraction(2, 5), 256))
    assert mpmath.mpf(str(got.lo)) <= want <= mpmath.mpf(str(got.hi))


# -- target intervals ---------------------------------------------------------------------------


def test_target_intervals_grid():
    inst = SystemInstance((0, 1), ConstantBelowTenth(Fraction(9, 100)), Zero())
    tis = target_intervals(inst, 10)
    assert [t.center_exact for t in tis] == [Fraction(m, 10) for m in range(1, 10)]
    assert all(t.half_width_exact == Fraction(45, 10000) for t in tis)


def test_target_intervals_single():
    inst = power(TENTH, Fraction(1, 2), J=(Fraction(3, 10), Fraction(9, 20)))
    tis = target_intervals(inst, 10)
    assert [t.center_exact for t in tis] == [Fraction(2, 5)]


def test_target_intervals_psshift():
    J = (Fraction(3, 10), Fraction(9, 20))
    inst = SystemInstance(J, PowerLaw(TENTH, Fraction(1, 2)), PSShift(Fraction(1, 4), 1))
    (ti,) = target_intervals(inst, 10, prec=256)
    th = mpmath.mpf("0.4")
    t = mpmath.log(mpmath.mpf(1) / 4) / mpmath.log(th)
    want = (4 - th / (t * mpmath.power(10, t - 1))) / 10
    assert mpmath.mpf(str(ti.center.lo)) <= want <= mpmath.mpf(str(ti.center.hi))


def test_target_intervals_empty():
    inst = power(TENTH, Fraction(1, 2), J=(Fraction(3, 10), Fraction(9, 20)))
    with pytest.raises(EmptyRange):
        target_intervals(inst, 1)


# -- hypotheses --------------------------------------------------------------------------------


def test_hypotheses_power_half():
    s = statuses(check_hypotheses(power(TENTH, Fraction(1, 2))))
    assert all(s[k] == "holds-analytically" for k in ("A1", "A2", "A3", "A4"))


def test_hypotheses_power_convergent():
    s = statuses(check_hypotheses(power(TENTH, Fraction(3, 2))))
    assert s["A4"] == "fails"


def test_hypotheses_sinusoid_example():
    inst = power(TENTH, Fraction(1, 3), phi=Sinusoid(Fraction(1, 3), Fraction(1, 6)))
    s = statuses(check_hypotheses(inst))
    # the derivative sup norm grows like n^(1/6), so the bounded-derivative condition is not met
    assert s["B1"] == s["B3"] == s["B4"] == "holds-analytically"
    assert s["B2"] == "fails"


def test_hypotheses_table_uses_truncation():
    vals = tuple(Fraction(1, 20 * n) for n in range(1, 301))
    s = statuses(check_hypotheses(SystemInstance((0, 1), Table(vals), Zero()), 300))
    assert s["A2"] == "holds-on-truncation"


def test_hypotheses_rejects_small_truncation():
    with pytest.raises(PreconditionError):
        check_hypotheses(power(TENTH, Fraction(1, 2)), 10)


# -- survey -------------------------------------------------------------------------------------


def test_survey_pigeonhole():
    inst = SystemInstance((0, 1), ConstantBelowTenth(Fraction(9, 100)), Zero())
    rep = survey_measure(inst, 100, 1000, 1, 42)
    assert rep.fraction == 1.0 and rep.indeterminate == []


def test_survey_convergent_regime_pinned():
    inst = power(TENTH, Fraction(3, 2))
    rep = survey_measure(inst, 100, 10**5, 3, 7)
    assert rep.fraction == 0.03
    # independent float scan with a guard band around the threshold
    ns = np.arange(1, 10**5 + 1, dtype=np.float64)
    psi = 0.1 / ns**1.5
    for theta, hits in zip(rep.thetas, rep.hits):
        x = ns * float(Fraction(theta))
        d = np.abs(x - np.rint(x))
        assert int(np.count_nonzero(d <= psi * (1 - 1e-6))) <= hits <= int(np.count_nonzero(d <= psi * (1 + 1e-6)))


def test_survey_rejects_zero_samples():
    with pytest.raises(PreconditionError):
        survey_measure(power(TENTH, Fraction(1, 2)), 0, 10, 1, 0)


def test_sample_theta_independent_of_sample_count():
    J = (Fraction(0), Fraction(1))
    assert sample_theta(J, 5, 10, 9) == sample_theta(J, 5, 1000, 9)
    th = sample_theta(J, 0, 4, 9, stratified=True)
    assert 0 < th < Fraction(1, 4)


def test_survey_jobs_invariant():
    inst = power(TENTH, Fraction(1, 2))
    a = survey_measure(inst, 8, 2000, 5, 1, jobs=1)
    b = survey_measure(inst, 8, 2000, 5, 1, jobs=4)
    assert a.to_json() == b.to_json()
