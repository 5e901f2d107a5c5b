"""Certified real enclosures backed by MPFR directed rounding.

A :class:`BigReal` is a closed interval ``[lo, hi]`` of MPFR numbers at a
fixed working precision.  Every operation rounds the lower endpoint down and
the upper endpoint up, so the exact result of the same expression evaluated
on any points of the operands always lies inside the result.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache

import gmpy2
from gmpy2 import mpfr, mpq, mpz

from ..errors import AmbiguousAtMaxPrecision, DomainError


@lru_cache(maxsize=None)
def _down(prec: int):
    return gmpy2.context(precision=prec, round=gmpy2.RoundDown)


@lru_cache(maxsize=None)
def _up(prec: int):
    return gmpy2.context(precision=prec, round=gmpy2.RoundUp)


@lru_cache(maxsize=None)
def _pi(prec: int) -> tuple:
    return _down(prec).const_pi(), _up(prec).const_pi()


def _to_mpfr(x, ctx):
    if isinstance(x, Fraction):
        x = mpq(x.numerator, x.denominator)
    elif isinstance(x, int):
        x = mpz(x)
    return mpfr(x, context=ctx)


class BigReal:
    """Closed interval ``[lo, hi]`` guaranteed to contain an exact real value.

    Construct from exact data with :meth:`exact` (or :meth:`span`); combine
    with the usual operators and the elementary functions below.  Mixed
    operands (``int``, ``Fraction``) are converted with outward rounding.
    """

    __slots__ = ("lo", "hi", "prec")

    def __init__(self, lo, hi, prec: int):
        self.lo = lo
        self.hi = hi
        self.prec = prec

    # -- construction -----------------------------------------------------

    @classmethod
    def exact(cls, value, prec: int) -> BigReal:
        if isinstance(value, BigReal):
            return value
        if isinstance(value, float):
            value = Fraction(value)
        return cls(_to_mpfr(value, _down(prec)), _to_mpfr(value, _up(prec)), prec)

    @classmethod
    def span(cls, a, b, prec: int) -> BigReal:
        """Smallest representable interval containing the exact values a and b."""
        x, y = cls.exact(a, prec), cls.exact(b, prec)
        return cls(min(x.lo, y.lo), max(x.hi, y.hi), prec)

    def _coerce(self, other) -> BigReal:
        if isinstance(other, BigReal):
            return other
        return BigReal.exact(other, self.prec)

    # -- inspection -------------------------------------------------------

    @property
    def mid(self):
        return _down(self.prec + 2).div(_down(self.prec + 2).add(self.lo, self.hi), 2)

    @property
    def rad(self):
        m = self.mid
        u = _up(self.prec + 2)
        return max(u.sub(self.hi, m), u.sub(m, self.lo))

    @property
    def width(self):
        return _up(self.prec).sub(self.hi, self.lo)

    def is_point(self) -> bool:
        return self.lo == self.hi

    def contains(self, x) -> bool:
        """True if the exact number ``x`` (int, Fraction or float) lies inside."""
        if isinstance(x, BigReal):
            return self.lo <= x.lo and x.hi <= self.hi
        if isinstance(x, float):
            x = Fraction(x)
        q = mpq(x.numerator, x.denominator) if isinstance(x, Fraction) else mpz(x)
        return mpq(self.lo) <= q <= mpq(self.hi)

    def __float__(self) -> float:
        return float(self.mid)

    def __repr__(self) -> str:
        return f"BigReal([{float(self.lo)!r}, {float(self.hi)!r}], prec={self.prec})"

    def to_decimal(self) -> str:
        """Midpoint printed with enough digits to round-trip at this precision."""
        digits = int(math.ceil(self.prec * math.log10(2))) + 2
        return format(self.mid, f".{digits}g")

    def to_json(self) -> dict:
        return {"mid": self.to_decimal(), "rad": format(self.rad, ".3e"), "prec": self.prec}

    # -- arithmetic -------------------------------------------------------

    def __neg__(self) -> BigReal:
        return BigReal(-self.hi, -self.lo, self.prec)

    def __add__(self, other) -> BigReal:
        o = self._coerce(other)
        p = min(self.prec, o.prec)
        return BigReal(_down(p).add(self.lo, o.lo), _up(p).add(self.hi, o.hi), p)

    __radd__ = __add__

    def __sub__(self, other) -> BigReal:
        o = self._coerce(other)
        p = min(self.prec, o.prec)
        return BigReal(_down(p).sub(self.lo, o.hi), _up(p).sub(self.hi, o.lo), p)

    def __rsub__(self, other) -> BigReal:
        return self._coerce(other) - self

    def __mul__(self, other) -> BigReal:
        o = self._coerce(other)
        p = min(self.prec, o.prec)
        d, u = _down(p), _up(p)
        if self.lo >= 0 and o.lo >= 0:
            return BigReal(d.mul(self.lo, o.lo), u.mul(self.hi, o.hi), p)
        pairs = [(self.lo, o.lo), (self.lo, o.hi), (self.hi, o.lo), (self.hi, o.hi)]
        return BigReal(min(d.mul(a, b) for a, b in pairs), max(u.mul(a, b) for a, b in pairs), p)

    __rmul__ = __mul__

    def __truediv__(self, other) -> BigReal:
        o = self._coerce(other)
        if o.lo <= 0 <= o.hi:
            if o.lo == 0 and o.hi == 0:
                raise ZeroDivisionError("division by an exact zero")
            raise AmbiguousAtMaxPrecision("divisor enclosure contains zero")
        p = min(self.prec, o.prec)
        d, u = _down(p), _up(p)
        pairs = [(self.lo, o.lo), (self.lo, o.hi), (self.hi, o.lo), (self.hi, o.hi)]
        return BigReal(min(d.div(a, b) for a, b in pairs), max(u.div(a, b) for a, b in pairs), p)

    def __rtruediv__(self, other) -> BigReal:
        return self._coerce(other) / self

    def __abs__(self) -> BigReal:
        if self.lo >= 0:
            return self
        if self.hi <= 0:
            return -self
        return BigReal(mpfr(0), max(-self.lo, self.hi), self.prec)

    # -- elementary functions ----------------------------------------------

    def exp(self) -> BigReal:
        return BigReal(_down(self.prec).exp(self.lo), _up(self.prec).exp(self.hi), self.prec)

    def log(self) -> BigReal:
        if self.hi <= 0:
            raise DomainError("log of a non-positive number")
        if self.lo <= 0:
            raise AmbiguousAtMaxPrecision("log argument enclosure reaches zero")
        return BigReal(_down(self.prec).log(self.lo), _up(self.prec).log(self.hi), self.prec)

    def sqrt(self) -> BigReal:
        if self.hi < 0:
            raise DomainError("sqrt of a negative number")
        lo = _down(self.prec).sqrt(self.lo) if self.lo > 0 else mpfr(0)
        return BigReal(lo, _up(self.prec).sqrt(self.hi), self.prec)

    def pow(self, exponent) -> BigReal:
        """``self ** exponent`` for a positive base, as ``exp(exponent * log(self))``."""
        if isinstance(exponent, int) and self.lo >= 0:
            d, u = _down(self.prec), _up(self.prec)
            if exponent >= 0:
                return BigReal(d.pow(self.lo, exponent), u.pow(self.hi, exponent), self.prec)
        return (self._coerce(exponent) * self.log()).exp()

    __pow__ = pow

    def _trig(self, fn: str, max_offset: Fraction, min_offset: Fraction) -> BigReal:
        # extrema of sin/cos sit at pi*(2k + offset)
        p = self.prec
        pi_lo, pi_hi = _pi(p)
        if _up(p).sub(self.hi, self.lo) >= 2 * pi_lo:
            return BigReal(mpfr(-1), mpfr(1), p)
        d, u = _down(p), _up(p)
        a, b = getattr(d, fn), getattr(u, fn)
        lo = min(a(self.lo), a(self.hi))
        hi = max(b(self.lo), b(self.hi))

        def may_hit(offset: Fraction) -> bool:
            approx_lo = float(self.lo) / math.pi
            approx_hi = float(self.hi) / math.pi
            k0 = math.floor((approx_lo - float(offset)) / 2) - 1
            k1 = math.ceil((approx_hi - float(offset)) / 2) + 1
            for k in range(k0, k1 + 1):
                m = 2 * k + offset
                q = mpq(m.numerator, m.denominator)
                e1, e2 = d.mul(pi_lo, q), u.mul(pi_hi, q)
                plo, phi = (e1, e2) if m >= 0 else (d.mul(pi_hi, q), u.mul(pi_lo, q))
                if phi >= self.lo and plo <= self.hi:
                    return True
            return False

        if may_hit(max_offset):
            hi = mpfr(1)
        if may_hit(min_offset):
            lo = mpfr(-1)
        return BigReal(max(lo, mpfr(-1)), min(hi, mpfr(1)), p)

    def sin(self) -> BigReal:
        return self._trig("sin", Fraction(1, 2), Fraction(-1, 2))

    def cos(self) -> BigReal:
        return self._trig("cos", Fraction(0), Fraction(1))

    # -- integer parts ------------------------------------------------------

    def floor(self) -> int:
        k = _down(self.prec).floor(self.lo)
        if _down(self.prec).floor(self.hi) != k:
            raise AmbiguousAtMaxPrecision("enclosure straddles an integer")
        return int(k)

    def ceil(self) -> int:
        k = _up(self.prec).ceil(self.hi)
        if _up(self.prec).ceil(self.lo) != k:
            raise AmbiguousAtMaxPrecision("enclosure straddles an integer")
        return int(k)

    # -- certified comparisons ------------------------------------------------

    def le(self, other) -> bool:
        """Certified ``self <= other``; ambiguous if the enclosures overlap."""
        o = self._coerce(other)
        if self.hi <= o.lo:
            return True
        if self.lo > o.hi:
            return False
        raise AmbiguousAtMaxPrecision("enclosures overlap in <= comparison")

    def lt(self, other) -> bool:
        o = self._coerce(other)
        if self.hi < o.lo:
            return True
        if self.lo >= o.hi:
            return False
        raise AmbiguousAtMaxPrecision("enclosures overlap in < comparison")

    def ge(self, other) -> bool:
        return self._coerce(other).le(self)

    def gt(self, other) -> bool:
        return self._coerce(other).lt(self)


def hull(values: list[BigReal]) -> BigReal:
    p = min(v.prec for v in values)
    return BigReal(min(v.lo for v in values), max(v.hi for v in values), p)


def pi(prec: int) -> BigReal:
    lo, hi = _pi(prec)
    return BigReal(lo, hi, prec)


def round_up_float(x) -> float:
    """Smallest double that is >= the mpfr ``x``."""
    return float(_up(53).plus(x))


def round_down_float(x) -> float:
    return float(_down(53).plus(x))
