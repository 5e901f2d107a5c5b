"""Counting {alpha*l} in an interval and checking the explicit Erdos-Turan type bound

    #{l <= L : {alpha*l} in J'} <= L*lambda(J) + 2L/(H+1) + 6 * sum_{h<=H} 1/(h*||h*alpha||),

valid whenever h*alpha is not an integer for h = 1..H.  Counts are exact;
the bound is rounded up, so "not violated" is a certified verdict.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import gmpy2
import numpy as np
from gmpy2 import mpfr

from .errors import AmbiguousAtMaxPrecision, DomainError, IntegerMultiple, PreconditionError, Violation
from .numeric import BigReal, CReal, ExactScalar, PrecisionPolicy, as_creal, dist_nearest_int, escalate
from .numeric.interval import _down, _up, round_up_float

TAIL_CONST = 6
BOUND_PREC = 128


def reduce_mod_1(J) -> list[tuple[ExactScalar, ExactScalar]]:
    """J reduced modulo 1 as at most two disjoint half-open pieces [lo, hi) of [0, 1)."""
    j1, j2 = (ExactScalar.of(x) for x in J)
    if not j1 < j2:
        raise DomainError("J must have positive length")
    width = j2 - j1
    if width >= 1:
        return [(ExactScalar(Fraction(0)), ExactScalar(Fraction(1)))]
    a = j1 - j1.floor()
    b = a + width
    if b <= 1:
        return [(a, b)]
    return [(a, ExactScalar(Fraction(1))), (ExactScalar(Fraction(0)), b - 1)]


def length_mod_1(J) -> ExactScalar:
    return sum((hi - lo for lo, hi in reduce_mod_1(J)), ExactScalar(Fraction(0)))


# -- exact membership ---------------------------------------------------------------------


def _sign(x, policy) -> int:
    """Certified sign of a difference that may mix incompatible surds."""
    if isinstance(x, ExactScalar):
        return x.sign()

    def attempt(prec: int) -> int:
        b = x.enclose(prec)
        if b.lo > 0:
            return 1
        if b.hi < 0:
            return -1
        if b.lo == 0 and b.hi == 0:
            return 0
        raise AmbiguousAtMaxPrecision("{alpha*l} cannot be separated from an endpoint of J")

    return escalate(attempt, policy, "endpoint test")


def _diff(x: CReal, y: CReal):
    if isinstance(x, ExactScalar) and isinstance(y, ExactScalar):
        try:
            return x - y
        except PreconditionError:
            pass
    return _LazyDiff(x, y)


class _LazyDiff:
    def __init__(self, x, y):
        self.x, self.y = x, y

    def enclose(self, prec: int) -> BigReal:
        return self.x.enclose(prec) - self.y.enclose(prec)


def _frac_exact(alpha: CReal, l: int, policy):
    """{alpha*l} as a certified real (ExactScalar when alpha is)."""
    if isinstance(alpha, ExactScalar):
        v = alpha * l
        return v - v.floor()
    k = escalate(lambda prec: (alpha.enclose(prec) * l).floor(), policy, "floor(alpha*l)")
    return _LazyDiff(_Scaled(alpha, l), ExactScalar(Fraction(k)))


class _Scaled:
    def __init__(self, x, k):
        self.x, self.k = x, k

    def enclose(self, prec: int) -> BigReal:
        return self.x.enclose(prec) * self.k


def _in_piece_exact(f, lo: ExactScalar, hi: ExactScalar, policy) -> bool:
    return _sign(_diff(f, lo) if isinstance(f, ExactScalar) else _LazyDiff(f, lo), policy) >= 0 and \
        _sign(_diff(f, hi) if isinstance(f, ExactScalar) else _LazyDiff(f, hi), policy) < 0


def _ceil(x: ExactScalar) -> int:
    return -((-x).floor())


def membership(alpha, L: int, J, policy: PrecisionPolicy | None = None) -> np.ndarray:
    """Boolean array m[l-1] = [{alpha*l} in J mod 1] for l = 1..L (half-open pieces)."""
    if L < 1:
        raise DomainError("L must be >= 1")
    alpha = as_creal(alpha)
    pieces = reduce_mod_1(J)
    ells = np.arange(1, L + 1, dtype=np.int64)
    ax = alpha.exact
    if ax is not None:
        u, v = ax.numerator, ax.denominator
        if abs(u) * L < 1 << 62:
            num = (u * ells) % v
        else:
            num = np.array([(u * int(l)) % v for l in ells], dtype=object)
        out = np.zeros(L, dtype=bool)
        for lo, hi in pieces:
            # num/v in [lo, hi) <=> num >= lo*v and num < hi*v, decided exactly
            a = _ceil(lo * v)
            b = _ceil(hi * v)
            out |= (num >= a) & (num < b)
        return out
    af = float(alpha)
    x = af * ells.astype(np.float64)
    fr = x - np.floor(x)
    margin = np.abs(x) * 2.0**-48 + 1e-12
    out = np.zeros(L, dtype=bool)
    unsure = (fr < margin) | (fr > 1 - margin)
    for lo, hi in pieces:
        lf, hf = float(lo), float(hi)
        out |= (fr > lf + margin) & (fr < hf - margin)
        unsure |= (np.abs(fr - lf) <= margin + 1e-15) | (np.abs(fr - hf) <= margin + 1e-15)
    out &= ~unsure
    for i in np.nonzero(unsure)[0]:
        l = int(ells[i])
        f = _frac_exact(alpha, l, policy)
        out[i] = any(_in_piece_exact(f, lo, hi, policy) for lo, hi in pieces)
    return out


def count_in_interval(alpha, L: int, J, policy: PrecisionPolicy | None = None) -> int:
    """#{1 <= l <= L : {alpha*l} in J reduced mod 1}, counted exactly."""
    return int(membership(alpha, L, J, policy).sum())


# -- the bound ----------------------------------------------------------------------------


@dataclass
class DiscrepancyReport:
    H: int
    count: int
    main: float
    middle: float
    tail: float
    bound: float
    violated: bool

    def to_json(self) -> dict:
        return {
            "H": self.H,
            "count": self.count,
            "terms": {"main": repr(self.main), "middle": repr(self.middle), "tail": repr(self.tail)},
            "bound": repr(self.bound),
            "violated": self.violated,
        }

    def row(self) -> dict:
        return {"H": self.H, "count": self.count, "main": repr(self.main), "middle": repr(self.middle),
                "tail": repr(self.tail), "bound": repr(self.bound), "violated": self.violated}


def _dist_lower(alpha: CReal, h: int, policy) -> mpfr:
    """A positive lower bound of ||h*alpha|| at BOUND_PREC; IntegerMultiple if h*alpha is an integer."""
    ax = alpha.exact
    if ax is not None:
        v = ax * h
        if v.denominator == 1:
            raise IntegerMultiple(h)
        d = min(v - math.floor(v), math.ceil(v) - v)
        return mpfr(gmpy2.mpq(d.numerator, d.denominator), context=_down(BOUND_PREC))
    if isinstance(alpha, ExactScalar):
        # an irrational surd times h is never an integer
        def attempt(prec: int):
            b = dist_nearest_int(alpha.enclose(prec) * h)
            if b.lo > 0:
                return mpfr(b.lo, context=_down(BOUND_PREC))
            raise AmbiguousAtMaxPrecision("||h*alpha|| not separated from 0")

        return escalate(attempt, policy, f"||{h}*alpha||")

    def attempt_lazy(prec: int):
        b = dist_nearest_int(alpha.enclose(prec) * h)
        if b.lo > 0:
            return mpfr(b.lo, context=_down(BOUND_PREC))
        raise AmbiguousAtMaxPrecision(f"cannot certify that {h}*alpha is not an integer")

    return escalate(attempt_lazy, policy, f"||{h}*alpha||")


def admissible_H(alpha, H_max: int, policy: PrecisionPolicy | None = None) -> int:
    """Largest H <= H_max with h*alpha not an integer for all h <= H."""
    alpha = as_creal(alpha)
    for h in range(1, H_max + 1):
        try:
            _dist_lower(alpha, h, policy)
        except IntegerMultiple:
            return h - 1
    return H_max


def _tail_terms(alpha: CReal, H: int, policy) -> list:
    up = _up(BOUND_PREC)
    down = _down(BOUND_PREC)
    return [up.div(1, down.mul(h, _dist_lower(alpha, h, policy))) for h in range(1, H + 1)]


def _bound(alpha: CReal, L: int, J, H: int, count: int, tails: list) -> DiscrepancyReport:
    up = _up(BOUND_PREC)
    lam = length_mod_1(J)
    if lam.exact is not None:
        m = L * lam.exact
        main = mpfr(gmpy2.mpq(m.numerator, m.denominator), context=up)
    else:
        main = up.mul(L, lam.enclose(BOUND_PREC).hi)
    middle = up.div(2 * L, H + 1)
    tail = mpfr(0, context=up)
    for t in tails[:H]:
        tail = up.add(tail, t)
    tail = up.mul(TAIL_CONST, tail)
    bound = up.add(up.add(main, middle), tail)
    return DiscrepancyReport(H, count, round_up_float(main), round_up_float(middle), round_up_float(tail),
                             round_up_float(bound), count > bound)


def erdos_turan_bound(alpha, L: int, J, H: int, policy: PrecisionPolicy | None = None,
                      count: int | None = None) -> DiscrepancyReport:
    if H < 1:
        raise DomainError("H must be >= 1")
    if L < 1:
        raise DomainError("L must be >= 1")
    alpha = as_creal(alpha)
    tails = _tail_terms(alpha, H, policy)
    if count is None:
        count = count_in_interval(alpha, L, J, policy)
    return _bound(alpha, L, J, H, count, tails)


def verify_lemma(alpha, L: int, J, H_max: int, policy: PrecisionPolicy | None = None) -> list[DiscrepancyReport]:
    """Reports for every admissible H <= H_max; raises Violation if any bound fails."""
    if L < 1:
        raise DomainError("L must be >= 1")
    if H_max < 1:
        raise DomainError("H_max must be >= 1")
    alpha = as_creal(alpha)
    H_ok = admissible_H(alpha, H_max, policy)
    count = count_in_interval(alpha, L, J, policy)
    tails = _tail_terms(alpha, H_ok, policy) if H_ok else []
    reports = []
    for H in range(1, H_ok + 1):
        rep = _bound(alpha, L, J, H, count, tails)
        if rep.violated:
            raise Violation(H, count, rep.bound)
        reports.append(rep)
    return reports


def h_from_length(J) -> int:
    """H = floor(1/lambda(J)), at least 1."""
    lam = length_mod_1(J)
    return max(1, (1 / lam).floor())
