"""Piatetski-Shapiro sequences floor(n**alpha) and the equation y = a*x + b.

Membership, direct pair search, the exact reduction of membership to a
congruence plus an interval-contains-an-integer test, scans over alpha,
quotient sets, and the theta-parametrised approximation system behind the
solvability dichotomy.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import (
    AmbiguousAtMaxPrecision,
    ClosureViolation,
    Condition29Violation,
    DomainError,
    NotCoprime,
    PreconditionError,
    SkippedSmallN,
)
from .families import PowerLaw, PowerPhase, PSShift, ThetaPower
from .numeric import (
    ExactScalar,
    LazyReal,
    PrecisionPolicy,
    cceil,
    compare,
    floor_pow,
    power_real,
    t_map,
    t_map_real,
)
from .parallel import pmap
from .systems import SolutionRecord, SystemInstance, solve_system

_LD = np.longdouble
_LD_EPS = float(np.finfo(np.longdouble).eps)


def _alpha(alpha) -> ExactScalar:
    a = ExactScalar.of(alpha)
    if compare(a, 1) <= 0:
        raise DomainError(f"alpha must exceed 1, got {a.describe()}")
    return a


def ps_value(n: int, alpha, policy: PrecisionPolicy | None = None) -> int:
    return floor_pow(n, _alpha(alpha), policy)


def _alpha_ld(alpha: ExactScalar):
    x = alpha.exact
    if x is not None:
        return _LD(str(x.numerator)) / _LD(str(x.denominator))
    return _LD(str(alpha.enclose(128).mid))


def floor_pow_many(ns, alpha, policy: PrecisionPolicy | None = None) -> np.ndarray:
    """floor(n**alpha) for an array of n >= 1.

    Extended precision floats decide every value that is clearly away from an
    integer; the rest go through the certified scalar path.
    """
    alpha = _alpha(alpha)
    ns = np.asarray(ns, dtype=np.int64)
    if ns.size == 0:
        return np.zeros(0, dtype=np.int64)
    if ns.min() < 1:
        raise DomainError("floor_pow needs n >= 1")
    ex = alpha.exact
    if ex is not None and ex.denominator == 1:
        k = int(ex)
        return np.array([int(n) ** k for n in ns], dtype=object if float(ns.max()) ** k >= 2**62 else np.int64)
    a = _alpha_ld(alpha)
    nl = ns.astype(_LD)
    t = a * np.log(nl)
    x = np.exp(t)
    if float(x.max()) >= 2.0**62:
        raise DomainError("floor(n**alpha) exceeds the int64 range; use ps_value per n")
    fl = np.floor(x)
    margin = 32 * _LD_EPS * (np.abs(t) + 1) * x + 1e-30
    unsure = ((x - fl) <= margin) | ((fl + 1 - x) <= margin)
    out = fl.astype(np.int64)
    for i in np.nonzero(unsure)[0]:
        out[i] = floor_pow(int(ns[i]), alpha, policy)
    return out


def ps_upto(alpha, y_max: int, policy: PrecisionPolicy | None = None) -> np.ndarray:
    """PS(alpha) values for k = 1..K where K covers every value <= y_max (index k-1)."""
    alpha = _alpha(alpha)
    K = max(2, int(math.floor((y_max + 1) ** (1.0 / float(alpha)))) + 2)
    return floor_pow_many(np.arange(1, K + 1), alpha, policy)


def is_member(y: int, alpha, policy: PrecisionPolicy | None = None) -> bool:
    """y in PS(alpha): with k = ceil(y**(1/alpha)), check floor(k**alpha) == y."""
    if y < 1:
        raise DomainError("membership is defined for y >= 1")
    alpha = _alpha(alpha)
    k = cceil(power_real(y, alpha.inverse()), policy)
    return k >= 1 and floor_pow(k, alpha, policy) == y


# -- equations ------------------------------------------------------------------------------


@dataclass(frozen=True)
class PSEquation:
    """y = (a1/a2) x + b2/a2, with d the residue of x that makes the right side integral."""

    a1: int
    a2: int
    b2: int
    d: int

    @property
    def a(self) -> Fraction:
        return Fraction(self.a1, self.a2)

    @property
    def b(self) -> Fraction:
        return Fraction(self.b2, self.a2)

    def rhs(self, x: int) -> Fraction:
        return Fraction(self.a1 * x + self.b2, self.a2)

    def to_json(self) -> dict:
        return {"a1": self.a1, "a2": self.a2, "b2": self.b2, "d": self.d}


def make_equation(a1: int, a2: int, b2: int) -> PSEquation:
    if a1 < 1 or a2 < 1:
        raise DomainError("a1 and a2 must be positive")
    if math.gcd(a1, a2) != 1:
        raise NotCoprime(f"gcd({a1}, {a2}) = {math.gcd(a1, a2)}")
    d = 0 if a2 == 1 else (-b2 * pow(a1, -1, a2)) % a2
    return PSEquation(a1, a2, b2, d)


def oriented_equation(eq: PSEquation) -> PSEquation:
    """The same relation with x and y swapped when a > 1, so that 0 < a <= 1."""
    if eq.a1 <= eq.a2:
        return eq
    # x = (a2/a1) y - b2/a1
    return make_equation(eq.a2, eq.a1, -eq.b2)


@dataclass(frozen=True)
class SolutionPair:
    n: int
    k: int
    x: int
    y: int

    def to_json(self) -> dict:
        return {"n": self.n, "k": self.k, "x": self.x, "y": self.y}


def _direct_table(eq: PSEquation, alpha: ExactScalar, n_max: int, policy) -> tuple:
    """(n, x, y, member, k) arrays for n = 1..n_max; y, member, k are meaningful where y is an integer > 0."""
    ns = np.arange(1, n_max + 1, dtype=np.int64)
    xs = floor_pow_many(ns, alpha, policy)
    integral = (xs % eq.a2) == eq.d
    num = eq.a1 * xs.astype(object) + eq.b2 if eq.a1 * float(xs.max()) >= 2**62 else eq.a1 * xs + eq.b2
    ys = np.where(integral, num // eq.a2, 0).astype(np.int64)
    ok = integral & (ys > 0)
    member = np.zeros(n_max, dtype=bool)
    ks = np.zeros(n_max, dtype=np.int64)
    if ok.any():
        table = ps_upto(alpha, int(ys[ok].max()), policy)
        pos = np.searchsorted(table, ys)
        pos_c = np.minimum(pos, len(table) - 1)
        member = ok & (table[pos_c] == ys)
        ks = np.where(member, pos_c + 1, 0)
    return ns, xs, ys, ok, member, ks


def direct_solutions(eq: PSEquation, alpha, n_max: int, cap: int | None = None,
                     policy: PrecisionPolicy | None = None) -> list[SolutionPair]:
    """Pairs (floor(n^alpha), floor(k^alpha)) on the line, for n <= n_max in increasing n."""
    alpha = _alpha(alpha)
    if n_max < 1:
        raise DomainError("n_max must be >= 1")
    ns, xs, ys, ok, member, ks = _direct_table(eq, alpha, n_max, policy)
    out = []
    for i in np.nonzero(member)[0]:
        out.append(SolutionPair(int(ns[i]), int(ks[i]), int(xs[i]), int(ys[i])))
        if cap is not None and len(out) >= cap:
            break
    return out


def reduced_membership(eq: PSEquation, alpha, n: int, policy: PrecisionPolicy | None = None) -> bool:
    """a*floor(n^alpha) + b in PS(alpha), decided through the reduction.

    Condition one: {n^alpha / a2} in [d/a2, (d+1)/a2), i.e. floor(n^alpha) = d (mod a2).
    Condition two: [v^(1/alpha), (v+1)^(1/alpha)) contains an integer, v = a*floor(n^alpha) + b.
    """
    if not (0 < eq.a1 < eq.a2):
        raise DomainError("the reduction needs 0 < a < 1; orient the equation first")
    alpha = _alpha(alpha)
    x = floor_pow(n, alpha, policy)
    v = eq.rhs(x)
    if v <= 0:
        raise SkippedSmallN(f"a*floor({n}^alpha) + b = {v} <= 0")
    if x % eq.a2 != eq.d:
        return False
    inv = alpha.inverse()
    k = cceil(power_real(v, inv), policy)
    # k is the least integer >= v^(1/alpha); the interval holds an integer iff k < (v+1)^(1/alpha)
    return compare(power_real(k, alpha), v + 1, policy) < 0


@dataclass
class AuditResult:
    alpha: str
    checked: int
    skipped: int
    agree: int
    mismatches: list

    def to_json(self) -> dict:
        return {"alpha": self.alpha, "checked": self.checked, "skipped": self.skipped, "agree": self.agree,
                "mismatches": self.mismatches}


def reduction_audit(eq: PSEquation, alpha, n_max: int, policy: PrecisionPolicy | None = None,
                    jobs: int = 1) -> AuditResult:
    """Compare reduced_membership with the direct test for every admissible n <= n_max."""
    alpha = _alpha(alpha)
    ns, xs, ys, ok, member, ks = _direct_table(eq, alpha, n_max, policy)

    def one(i: int):
        try:
            return reduced_membership(eq, alpha, int(ns[i]), policy)
        except SkippedSmallN:
            return None

    got = pmap(one, range(n_max), jobs)
    checked = skipped = agree = 0
    bad = []
    for i, r in enumerate(got):
        if r is None:
            skipped += 1
            continue
        checked += 1
        if r == bool(member[i]):
            agree += 1
        else:
            bad.append(int(ns[i]))
    return AuditResult(alpha.describe(), checked, skipped, agree, bad)


# -- scans over alpha ----------------------------------------------------------------------


@dataclass
class ScanRow:
    alpha: str
    count: int | None
    pairs: list
    error: str | None = None

    def to_json(self) -> dict:
        return {"alpha": self.alpha, "count": self.count, "pairs": [p.to_json() for p in self.pairs],
                "error": self.error}


def sample_alphas(lo, hi, count: int, seed: int) -> list[ExactScalar]:
    """Seeded uniform draws from (lo, hi), each an exact dyadic-offset rational."""
    lo, hi = ExactScalar.of(lo), ExactScalar.of(hi)
    if not lo < hi:
        raise DomainError("need lo < hi")
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    ks = rng.integers(0, 2**52, size=count)
    return [lo + (hi - lo) * Fraction(2 * int(k) + 1, 2**53) for k in ks]


def solvability_scan(eq: PSEquation, alphas, n_max: int, cap: int | None = None,
                     policy: PrecisionPolicy | None = None, jobs: int = 1) -> list[ScanRow]:
    """direct_solutions for each alpha; an ambiguity is recorded on its row and the scan continues."""
    alphas = [ExactScalar.of(a) for a in alphas]

    def one(a: ExactScalar) -> ScanRow:
        try:
            pairs = direct_solutions(eq, a, n_max, cap, policy)
            return ScanRow(a.describe(), len(pairs), pairs)
        except (AmbiguousAtMaxPrecision, PreconditionError) as e:
            return ScanRow(a.describe(), None, [], f"{type(e).__name__}: {e}")

    return pmap(one, alphas, jobs)


def quotient_set(alpha, N_floor: int, n_max: int, height_bound: int,
                 policy: PrecisionPolicy | None = None) -> list[Fraction]:
    """Reduced m/n with m, n in PS(alpha), N_floor <= m, n <= floor(n_max^alpha), both terms <= height_bound."""
    alpha = _alpha(alpha)
    if height_bound < 1:
        raise DomainError("height_bound must be >= 1")
    if n_max < 1:
        raise DomainError("n_max must be >= 1")
    vals = floor_pow_many(np.arange(1, n_max + 1), alpha, policy)
    if N_floor > int(vals[-1]):
        raise DomainError(f"N_floor={N_floor} exceeds floor(n_max^alpha)={int(vals[-1])}")
    vals = vals[vals >= N_floor]
    present = set(vals.tolist())
    out = []
    for p in range(1, height_bound + 1):
        for q in range(1, height_bound + 1):
            if math.gcd(p, q) != 1:
                continue
            # m/n = p/q in lowest terms <=> m = p*t, n = q*t
            if any(v % q == 0 and (v // q) * p in present for v in vals.tolist()):
                out.append(Fraction(p, q))
    return sorted(out)


# -- the theta system ------------------------------------------------------------------------


def ps_theta_instance(a, kappa, c, gamma, I, theta) -> SystemInstance:
    """System with psi_n = c/n^(t-1), phi = PSShift(a, kappa), rho = gamma n^t, t = t_a(theta)."""
    a = ExactScalar.of(a)
    th = ExactScalar.of(theta)
    if not (a.sign() > 0 and a < 1):
        raise DomainError("need 0 < a < 1")
    if not (a < th < 1):
        raise DomainError(f"theta must lie in ({a.describe()}, 1)")
    J = ((a + th) / 2, (th + 1) / 2)
    return SystemInstance(J, ThetaPower(c, a), PSShift(a, kappa), PowerPhase(gamma, a=a), tuple(I))


def solve_ps_theta(a, kappa, c, gamma, I, theta, n0: int, n1: int,
                   policy: PrecisionPolicy | None = None) -> list[SolutionRecord]:
    """n in [n0, n1] with ||n theta + kappa theta/(t n^(t-1))|| <= c/n^(t-1) and {gamma n^t} in I."""
    inst = ps_theta_instance(a, kappa, c, gamma, I, theta)
    return solve_system(inst, theta, n0, n1, policy=policy)


@dataclass
class WorstCase:
    instance: SystemInstance
    sigma: object
    interval_ok: bool
    lhs: float
    rhs: float

    def to_json(self) -> dict:
        return {"instance": self.instance.to_json(), "sigma": float(self.sigma), "interval_condition": self.interval_ok,
                "lhs": repr(self.lhs), "rhs": repr(self.rhs)}


def worst_case_instance(a, kappa, c, gamma, I, J) -> WorstCase:
    """theta-free instance over J whose solutions solve the theta system at every theta in J.

    Uses psi_n = min(c, 1/10)/n^(t_a(j2) - 1), the smallest accuracy over closed J.
    Also checks t_a(j2) - t_a(j1) < 2 - t_a(j2) and warns when it fails.
    """
    a = ExactScalar.of(a)
    j1, j2 = (ExactScalar.of(x) for x in J)
    if not (a.sign() > 0 and a < 1):
        raise DomainError("need 0 < a < 1")
    # j2 < sqrt(a) <=> j2^2 < a for positive j2
    if not (j1 < j2) or compare(j1, a) <= 0 or compare(j2 * j2, a) >= 0:
        raise ClosureViolation(f"closure of J=({j1.describe()}, {j2.describe()}) is not inside "
                               f"({a.describe()}, sqrt({a.describe()}))")
    t2 = t_map_real(a, j2)
    sigma = _minus_one(t2)
    t1b, t2b = t_map(a, j1, 128), t_map(a, j2, 128)
    lhs = t2b - t1b
    rhs = 2 - t2b
    ok = bool(lhs.hi < rhs.lo)
    if not ok:
        warnings.warn(Condition29Violation(
            f"t(j2) - t(j1) = {float(lhs.mid):.6g} is not below 2 - t(j2) = {float(rhs.mid):.6g}"))
    inst = SystemInstance((j1, j2), PowerLaw(c, sigma), PSShift(a, kappa), PowerPhase(gamma, a=a), tuple(I))
    return WorstCase(inst, sigma, ok, float(lhs.mid), float(rhs.mid))


def _minus_one(t):
    if t.exact is not None:
        return ExactScalar(t.exact - 1)
    return LazyReal(lambda p: t.enclose(p) - 1, f"{t.describe()}-1")
