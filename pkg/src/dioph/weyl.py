"""Equidistribution diagnostics for the sequences

    g_n(m) = gamma * n ** t_a((m - phi_n(m/n)) / n),   m in nJ' (integers),

with t_a(theta) = log a / log theta: sample generation with certified
fractional parts, Weyl sums, van der Corput differencing and star discrepancy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np

from .errors import DomainError, EmptyRange
from .families import PerturbationFamily, Zero, _t_enclose, exact_n_pow_t
from .numeric import BigReal, ExactScalar, PrecisionPolicy, as_creal, cceil, cfloor, compare, escalate, frac, t_map
from .parallel import pmap

_BELOW_ONE = math.nextafter(1.0, 0.0)


@dataclass
class SequenceSample:
    values: np.ndarray
    source: dict = field(default_factory=dict)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.values.size and (self.values.min() < 0 or self.values.max() >= 1):
            raise DomainError("sample values must lie in [0, 1)")

    @property
    def N(self) -> int:
        return int(self.values.size)


def _to_unit(b: BigReal) -> float:
    """Nearest double to a certified fractional part, kept inside [0, 1)."""
    v = float(b.mid)
    return min(max(v, 0.0), _BELOW_ONE)


def _frac_float(x, policy) -> float:
    if isinstance(x, Fraction):
        return float(x - math.floor(x))
    if isinstance(x, (int, np.integer)):
        return 0.0
    if isinstance(x, (float, np.floating)):
        return min(float(x) - math.floor(x), _BELOW_ONE)
    if isinstance(x, BigReal):
        return _to_unit(frac(x))
    c = x if hasattr(x, "enclose") else as_creal(x)
    if getattr(c, "exact", None) is not None:
        return _frac_float(c.exact, policy)
    return escalate(lambda prec: _to_unit(frac(c.enclose(prec))), policy, "fractional part")


# -- the sequence family ----------------------------------------------------------------------


@dataclass(frozen=True)
class C1Generator:
    """g_n on the integers of nJ'; index i maps to m = m0 + i."""

    a: ExactScalar
    gamma: ExactScalar
    phi: PerturbationFamily
    n: int
    J: tuple
    m0: int
    count: int

    def theta(self, m: int, prec: int):
        ph = self.phi.exact(self.n, Fraction(m, self.n))
        if ph is not None:
            return Fraction(m) / self.n - ph / self.n
        th = BigReal.exact(Fraction(m, self.n), prec)
        return (BigReal.exact(m, prec) - self.phi.enclose(self.n, th)) / self.n

    def exact(self, i: int) -> Fraction | None:
        g = self.gamma.exact
        if g is None:
            return None
        th = self.theta(self.m0 + i, 64)
        if not isinstance(th, Fraction):
            return None
        q = exact_n_pow_t(self.n, self.a, th)
        return None if q is None else g * q

    def enclose(self, i: int, prec: int) -> BigReal:
        th = self.theta(self.m0 + i, prec)
        t = _t_enclose(self.a, th) if isinstance(th, BigReal) else t_map(self.a, th, prec)
        return self.gamma.enclose(prec) * (BigReal.exact(self.n, prec).log() * t).exp()

    def __call__(self, i: int):
        e = self.exact(i)
        if e is not None:
            return e
        return _Lazy(self, i)


class _Lazy:
    def __init__(self, gen: C1Generator, i: int):
        self.gen, self.i = gen, i
        self.exact = None

    def enclose(self, prec: int) -> BigReal:
        return self.gen.enclose(self.i, prec)

    def describe(self) -> str:
        return f"g_{self.gen.n}({self.gen.m0 + self.i})"


def c1_generator(a, gamma, phi: PerturbationFamily | None, n: int, J) -> C1Generator:
    a = ExactScalar.of(a)
    gamma = ExactScalar.of(gamma)
    phi = phi if phi is not None else Zero()
    if not (a.sign() > 0 and a < 1):
        raise DomainError("need 0 < a < 1")
    if gamma.sign() == 0:
        raise DomainError("gamma must be nonzero")
    if n < 1:
        raise DomainError("n must be >= 1")
    j1, j2 = (ExactScalar.of(x) for x in J)
    root_a = _sqrt_creal(a)
    if not (j1 < j2) or compare(j1, a) <= 0 or compare(j2, root_a) >= 0:
        raise DomainError(f"closure of J' must lie inside ({a.describe()}, sqrt({a.describe()}))")
    phi.check_domain((j1, j2))
    m0 = cfloor(j1 * n) + 1
    m1 = cceil(j2 * n) - 1
    if m1 < m0:
        raise EmptyRange(f"no integer m with m/{n} in J'")
    return C1Generator(a, gamma, phi, n, (j1, j2), m0, m1 - m0 + 1)


def _sqrt_creal(a: ExactScalar):
    x = a.exact
    if x is not None:
        return ExactScalar(Fraction(0), Fraction(1, x.denominator), x.numerator * x.denominator, "surd")
    return _SqrtLazy(a)


class _SqrtLazy:
    exact = None

    def __init__(self, a):
        self.a = a

    def enclose(self, prec: int) -> BigReal:
        return self.a.enclose(prec).sqrt()


def sequence_c1(a, gamma, phi: PerturbationFamily | None, n: int, J, policy: PrecisionPolicy | None = None,
                jobs: int = 1) -> SequenceSample:
    """{g_n(m)} for the integers m in nJ', in increasing order, each fractional part certified."""
    gen = c1_generator(a, gamma, phi, n, J)
    vals = pmap(lambda i: _frac_float(gen(i), policy), range(gen.count), jobs)
    # t_a is increasing in theta, so its range over closed J' is [t(j1), t(j2)]
    t_lo = t_map(gen.a, gen.J[0], 64)
    t_hi = t_map(gen.a, gen.J[1], 64)
    source = {
        "family": "c1",
        "a": gen.a.describe(),
        "gamma": gen.gamma.describe(),
        "phi": gen.phi.spec(),
        "n": n,
        "J": [gen.J[0].describe(), gen.J[1].describe()],
        "m_range": [gen.m0, gen.m0 + gen.count - 1],
        "t_min": float(t_lo.lo),
        "t_max": float(t_hi.hi),
    }
    return SequenceSample(np.array(vals), source)


# -- statistics ----------------------------------------------------------------------------


def weyl_sum(sample: SequenceSample, b: int) -> float:
    """|(1/N) sum e(b x_i)|, clamped to [0, 1]."""
    if sample.N < 1:
        raise DomainError("weyl_sum needs a non-empty sample")
    if b == 0:
        raise DomainError("b must be nonzero")
    # reduce b*x mod 1 before the trig call to keep the argument small
    bx = np.mod(b * sample.values, 1.0)
    ang = 2 * np.pi * bx
    re = math.fsum(np.cos(ang))
    im = math.fsum(np.sin(ang))
    return min(1.0, math.hypot(re, im) / sample.N)


def vdc_difference(generator: Callable[[int], object], N: int, h: int,
                   policy: PrecisionPolicy | None = None) -> SequenceSample:
    """{g(i + h) - g(i)} for i = 0..N-h-1."""
    if h < 1:
        raise DomainError("h must be >= 1")
    if N <= h:
        raise DomainError("need N > h")
    vals = [_frac_float(_sub(generator(i + h), generator(i)), policy) for i in range(N - h)]
    return SequenceSample(np.array(vals), {"family": "vdc", "h": h, "N": N})


def _sub(x, y):
    if isinstance(x, (int, Fraction)) and isinstance(y, (int, Fraction)):
        return Fraction(x) - Fraction(y)
    if isinstance(x, (float, np.floating)) or isinstance(y, (float, np.floating)):
        return float(x) - float(y)
    return _Diff(x, y)


class _Diff:
    exact = None

    def __init__(self, x, y):
        self.x, self.y = x, y

    def enclose(self, prec: int) -> BigReal:
        def enc(v):
            if isinstance(v, (int, Fraction)):
                return BigReal.exact(Fraction(v), prec)
            if isinstance(v, BigReal):
                return v
            return v.enclose(prec) if hasattr(v, "enclose") else as_creal(v).enclose(prec)

        return enc(self.x) - enc(self.y)


def star_discrepancy(sample: SequenceSample) -> float:
    """D*_N = max_i max(x_(i) - (i-1)/N, i/N - x_(i)) over the sorted sample."""
    N = sample.N
    if N < 1:
        raise DomainError("star_discrepancy needs a non-empty sample")
    xs = np.sort(sample.values)
    i = np.arange(1, N + 1, dtype=np.float64)
    return float(max(np.max(xs - (i - 1) / N), np.max(i / N - xs)))


@dataclass
class IntervalStat:
    lo: float
    hi: float
    proportion: float
    length: float
    deviation: float

    def to_json(self) -> dict:
        return {"interval": [repr(self.lo), repr(self.hi)], "proportion": repr(self.proportion),
                "length": repr(self.length), "deviation": repr(self.deviation)}


def equid_report(sample: SequenceSample, intervals) -> list[IntervalStat]:
    """Empirical proportion in each [lo, hi) against its length."""
    out = []
    for lo, hi in intervals:
        lo, hi = float(lo), float(hi)
        if not (0 <= lo <= hi <= 1):
            raise DomainError(f"interval [{lo}, {hi}) is not inside [0, 1)")
        hits = int(np.count_nonzero((sample.values >= lo) & (sample.values < hi)))
        prop = hits / sample.N if sample.N else 0.0
        out.append(IntervalStat(lo, hi, prop, hi - lo, abs(prop - (hi - lo))))
    return out
