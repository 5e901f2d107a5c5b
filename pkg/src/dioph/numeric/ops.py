"""Certified scalar operations built on :mod:`.interval` and :mod:`.scalar`."""

from __future__ import annotations

import os
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Iterator, TypeVar

import gmpy2

from ..errors import AmbiguousAtMaxPrecision, DomainError, NotInvertible, PreconditionError
from .interval import BigReal, _down, _up
from .scalar import CReal, ExactScalar, LazyReal, as_creal

T = TypeVar("T")

ENV_PRECISION = "DIOPH_PRECISION_BITS"
DEFAULT_START_BITS = 128
DEFAULT_MAX_BITS = 4096


@dataclass(frozen=True)
class PrecisionPolicy:
    """Working precision ladder: start, double, stop at ``max_bits``."""

    start_bits: int = DEFAULT_START_BITS
    max_bits: int = DEFAULT_MAX_BITS

    def __post_init__(self):
        if self.start_bits < 16 or self.max_bits < self.start_bits:
            raise PreconditionError(f"bad precision policy {self.start_bits}..{self.max_bits}")

    @classmethod
    def default(cls) -> PrecisionPolicy:
        raw = os.environ.get(ENV_PRECISION)
        if raw:
            try:
                cap = int(raw)
            except ValueError:
                raise PreconditionError(f"{ENV_PRECISION}={raw!r} is not an integer") from None
            return cls(min(DEFAULT_START_BITS, cap), cap)
        return cls()

    @classmethod
    def fixed(cls, bits: int) -> PrecisionPolicy:
        return cls(bits, bits)

    def ladder(self) -> Iterator[int]:
        p = self.start_bits
        while p < self.max_bits:
            yield p
            p *= 2
        yield self.max_bits


def resolve(policy: PrecisionPolicy | None) -> PrecisionPolicy:
    return PrecisionPolicy.default() if policy is None else policy


def escalate(fn: Callable[[int], T], policy: PrecisionPolicy | None = None, what: str = "") -> T:
    """Run ``fn(prec)`` up the precision ladder until it stops being ambiguous."""
    pol = resolve(policy)
    last: AmbiguousAtMaxPrecision | None = None
    for prec in pol.ladder():
        try:
            return fn(prec)
        except AmbiguousAtMaxPrecision as exc:
            last = exc
    msg = f"{what + ': ' if what else ''}undecided at {pol.max_bits} bits ({last})"
    raise AmbiguousAtMaxPrecision(msg) from last


# -- fractional part and distance to the integers -------------------------------


def frac(x: BigReal) -> BigReal:
    """Enclosure of ``x - floor(x)``; ambiguous if ``x`` straddles an integer."""
    k = x.floor()
    return BigReal(_down(x.prec).sub(x.lo, k), _up(x.prec).sub(x.hi, k), x.prec)


def dist_nearest_int(x: BigReal) -> BigReal:
    """Enclosure of ``||x||`` over every point of ``x``.

    The distance function is continuous, so an enclosure that straddles an
    integer still yields a valid (if wider) result rather than an error.
    """
    p = x.prec
    d, u = _down(p), _up(p)
    if u.sub(x.hi, x.lo) >= 1:
        return BigReal(gmpy2.mpfr(0), gmpy2.mpfr(0.5), p)

    def dist(v, ctx):
        f = ctx.sub(v, ctx.floor(v))
        return min(f, ctx.sub(1, f))

    fl_lo, fl_hi = d.floor(x.lo), d.floor(x.hi)
    hits_int = fl_lo != fl_hi or x.lo == fl_lo
    half_lo = d.floor(d.sub(x.lo, 0.5))
    half_hi = d.floor(d.sub(x.hi, 0.5))
    hits_half = half_lo != half_hi or d.sub(x.lo, 0.5) == half_lo
    lo = gmpy2.mpfr(0) if hits_int else min(dist(x.lo, d), dist(x.hi, d))
    hi = gmpy2.mpfr(0.5) if hits_half else max(dist(x.lo, u), dist(x.hi, u))
    return BigReal(lo, min(hi, gmpy2.mpfr(0.5)), p)


def frac_exact(q: Fraction) -> Fraction:
    return q - (q.numerator // q.denominator)


def dist_exact(q: Fraction) -> Fraction:
    f = frac_exact(q)
    return min(f, 1 - f)


# -- exact power detection ----------------------------------------------------------


def _exact_root(m: int, v: int) -> int | None:
    if m in (0, 1):
        return m
    if v == 1:
        return m
    if m.bit_length() < v:
        return None
    r, ok = gmpy2.iroot(gmpy2.mpz(m), v)
    return int(r) if ok else None


def exact_pow(base, exponent) -> Fraction | None:
    """``base ** exponent`` when it is rational, else None.

    ``base`` is a positive rational; ``exponent`` an ExactScalar or Fraction.
    A rational power u/v of a rational in lowest terms is rational iff its
    numerator and denominator are perfect v-th powers; an irrational
    algebraic exponent gives a rational only for base 1.
    """
    b = Fraction(base)
    if b <= 0:
        raise DomainError("exact_pow needs a positive base")
    e = exponent if isinstance(exponent, Fraction) else as_creal(exponent).exact
    if b == 1:
        return Fraction(1)
    if e is None:
        return None
    u, v = e.numerator, e.denominator
    rn, rd = _exact_root(b.numerator, v), _exact_root(b.denominator, v)
    if rn is None or rd is None:
        return None
    root = Fraction(rn, rd)
    if abs(u) > 4096 and root != 1:
        # would not be representable usefully; let the caller use enclosures
        return None
    return root**u


@lru_cache(maxsize=65536)
def _pow_cached(base, exponent, prec: int) -> BigReal:
    return BigReal.exact(Fraction(base), prec).pow(exponent.enclose(prec))


def pow_enclose(base, exponent, prec: int) -> BigReal:
    """Enclosure of ``base ** exponent`` for a positive base (int, Fraction or BigReal)."""
    if isinstance(base, (int, Fraction)) and isinstance(exponent, ExactScalar):
        return _pow_cached(base, exponent, prec)
    b = base if isinstance(base, BigReal) else BigReal.exact(Fraction(base), prec)
    if isinstance(exponent, int):
        return b.pow(exponent)
    e = exponent if isinstance(exponent, BigReal) else as_creal(exponent).enclose(prec)
    return b.pow(e)


def power_real(base, exponent, coeff=Fraction(1), label: str | None = None) -> LazyReal:
    """Certified real ``coeff * base ** exponent`` (exact when rational)."""
    c = Fraction(coeff)
    ex = exact_pow(base, exponent)
    text = label or f"{c}*{base}^({as_creal(exponent).describe()})"
    return LazyReal(lambda prec: BigReal.exact(c, prec) * pow_enclose(base, exponent, prec),
                    text, None if ex is None else c * ex)


# -- decisions on certified reals -----------------------------------------------------


def _exact_of(x) -> Fraction | None:
    if isinstance(x, (int, Fraction)):
        return Fraction(x)
    return getattr(x, "exact", None)


def _enclose(x, prec: int) -> BigReal:
    if isinstance(x, (int, Fraction)):
        return BigReal.exact(Fraction(x), prec)
    if isinstance(x, BigReal):
        return x
    return x.enclose(prec)


def compare(x, y, policy: PrecisionPolicy | None = None) -> int:
    """Certified sign of ``x - y`` for certified reals; exact when both are rational."""
    ex, ey = _exact_of(x), _exact_of(y)
    if ex is not None and ey is not None:
        return (ex > ey) - (ex < ey)
    if isinstance(x, ExactScalar) and isinstance(y, (ExactScalar, int, Fraction)):
        try:
            return (x - y).sign()
        except Exception:
            pass

    def attempt(prec: int) -> int:
        a, b = _enclose(x, prec), _enclose(y, prec)
        if a.hi < b.lo:
            return -1
        if a.lo > b.hi:
            return 1
        raise AmbiguousAtMaxPrecision("comparison undecided")

    return escalate(attempt, policy, "compare")


def cfloor(x, policy: PrecisionPolicy | None = None) -> int:
    e = _exact_of(x)
    if e is not None:
        return e.numerator // e.denominator
    if isinstance(x, ExactScalar):
        return x.floor()
    return escalate(lambda prec: _enclose(x, prec).floor(), policy, "floor")


def cceil(x, policy: PrecisionPolicy | None = None) -> int:
    e = _exact_of(x)
    if e is not None:
        return -((-e.numerator) // e.denominator)
    if isinstance(x, ExactScalar):
        return -((-x).floor())
    return escalate(lambda prec: _enclose(x, prec).ceil(), policy, "ceil")


# -- the operations --------------------------------------------------------------------


def floor_pow(n: int, alpha, policy: PrecisionPolicy | None = None) -> int:
    """Exact ``floor(n ** alpha)`` for ``n >= 1`` and exact ``alpha > 0``.

    Rational powers that are themselves rational are detected symbolically
    (interval methods can never certify an integer); everything else is
    enclosed and the precision doubled until no integer lies inside.
    """
    if n < 1:
        raise DomainError(f"floor_pow needs n >= 1, got {n}")
    a = as_creal(alpha)
    if isinstance(a, ExactScalar) and a.sign() <= 0:
        raise DomainError("floor_pow needs alpha > 0")
    ex = _exact_of(a)
    if ex is not None and ex.denominator == 1:
        return n ** int(ex)
    if n == 1:
        return 1
    if ex is not None:
        q = exact_pow(n, ex)
        if q is not None:
            return q.numerator // q.denominator
    logn = None

    def attempt(prec: int) -> int:
        nonlocal logn
        ln = BigReal.exact(n, prec).log()
        return (a.enclose(prec) * ln).exp().floor()

    return escalate(attempt, policy, f"floor({n}^{a.describe()})")


def t_map(a, theta, prec: int | None = None) -> BigReal:
    """Enclosure of ``t_a(theta) = log(a) / log(theta)`` for ``a <= theta < 1``.

    ``theta`` may be exact (checked against the domain exactly) or a BigReal.
    """
    p = prec or resolve(None).start_bits
    aa = as_creal(a)
    _check_base(aa)
    if isinstance(theta, BigReal):
        th = theta
        if th.hi >= 1 or th.lo <= 0:
            raise DomainError("t_map needs theta in [a, 1)")
    else:
        tt = as_creal(theta)
        if compare(tt, 1) >= 0 or compare(tt, aa) < 0:
            raise DomainError(f"t_map needs {aa.describe()} <= theta < 1, got {tt.describe()}")
        ratio = exact_log_ratio(aa, tt)
        if ratio is not None:
            return BigReal.exact(ratio, p)
        th = tt.enclose(p)
    return aa.enclose(p).log() / th.log()


def t_map_real(a, theta) -> LazyReal:
    """``t_a(theta)`` as a certified real usable as an exponent."""
    aa, tt = as_creal(a), as_creal(theta)
    ratio = exact_log_ratio(aa, tt) if isinstance(tt, ExactScalar) else None
    return LazyReal(lambda prec: t_map(aa, tt, prec), f"t_{aa.describe()}({tt.describe()})", ratio)


def inv_t_map(a, alpha, prec: int | None = None) -> BigReal:
    """Enclosure of ``a ** (1/alpha)`` for ``0 < a < 1``, ``alpha >= 1``."""
    p = prec or resolve(None).start_bits
    aa, al = as_creal(a), as_creal(alpha)
    _check_base(aa)
    if compare(al, 1) < 0:
        raise DomainError(f"inv_t_map needs alpha >= 1, got {al.describe()}")
    ea, el = _exact_of(aa), _exact_of(al)
    if ea is not None and el is not None:
        q = exact_pow(ea, 1 / el)
        if q is not None:
            return BigReal.exact(q, p)
    return (aa.enclose(p).log() / al.enclose(p)).exp()


def _check_base(a: CReal) -> None:
    if compare(a, 0) <= 0 or compare(a, 1) >= 0:
        raise DomainError(f"need 0 < a < 1, got {a.describe()}")


def exact_log_ratio(a, theta) -> Fraction | None:
    """``log(a)/log(theta)`` when it is rational (a**den == theta**num), else None."""
    ea, et = _exact_of(a), _exact_of(theta)
    if ea is None or et is None or ea <= 0 or et <= 0 or et == 1:
        return None
    if ea == 1:
        return Fraction(0)
    approx = t_map_float(ea, et)
    guess = Fraction(approx).limit_denominator(64)
    if guess == 0 or abs(guess.numerator) > 256:
        return None
    num, den = guess.numerator, guess.denominator
    if ea**den == et**num:
        return guess
    return None


def t_map_float(a, theta) -> float:
    import math

    return math.log(float(a)) / math.log(float(theta))


def is_prime(p: int) -> bool:
    return p >= 2 and bool(gmpy2.is_prime(p, 50))


def mod_inverse(q: int, p: int) -> int:
    """The unique ``qbar`` in ``{1..p-1}`` with ``q*qbar = 1 (mod p)``, p an odd prime."""
    if not (p > 2 and is_prime(p)):
        raise DomainError(f"modulus {p} is not an odd prime")
    if q % p == 0:
        raise NotInvertible(f"{p} divides {q}")
    return pow(q, -1, p)


def lazy_sum(terms, const=Fraction(0), label: str | None = None) -> CReal:
    """``const + sum(coef * x)`` over certified reals, exact when every ``x`` is exact."""
    terms = [(Fraction(c), as_creal(x)) for c, x in terms]
    if all(isinstance(x, ExactScalar) for _, x in terms):
        try:
            out = ExactScalar(Fraction(const))
            for c, x in terms:
                out = out + x * c
            return out
        except PreconditionError:
            pass
    if all(x.exact is not None for _, x in terms):
        v = Fraction(const) + sum((c * x.exact for c, x in terms), Fraction(0))
        return ExactScalar(v)

    def fn(prec: int) -> BigReal:
        acc = BigReal.exact(Fraction(const), prec)
        for c, x in terms:
            acc = acc + x.enclose(prec) * BigReal.exact(c, prec)
        return acc

    text = label or " + ".join(f"{c}*({x.describe()})" for c, x in terms) + (f" + {const}" if const else "")
    return LazyReal(fn, text)
