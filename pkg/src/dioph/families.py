"""Accuracy (psi), perturbation (phi) and twist (rho) sequences.

Every family evaluates in three ways:

* ``exact(n, theta)``: the rational value when one exists, else None;
* ``enclose(n, theta, prec)``: a certified :class:`BigReal`;
* ``floats(ns, theta)``: a vectorised double approximation used only to
  discard candidates that certainly fail (never to accept one).

``theta`` is an ExactScalar/Fraction for ``exact`` and a BigReal for
``enclose``.  Spec strings (``power:0.1,0.5``, ``sin:1/3,1/6`` ...) round-trip
through :func:`parse_psi`, :func:`parse_phi`, :func:`parse_rho` and ``spec()``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import numpy as np

from .errors import DomainError, ParseError
from .numeric import (
    BigReal,
    CReal,
    ExactScalar,
    LazyReal,
    as_creal,
    compare,
    exact_log_ratio,
    exact_pow,
    t_map,
    t_map_real,
)
from .numeric.interval import round_up_float
from .numeric.ops import pow_enclose

TENTH = Fraction(1, 10)
SUP_PIECES = 64


def _frac_of(theta) -> Fraction | None:
    if isinstance(theta, Fraction):
        return theta
    if isinstance(theta, int):
        return Fraction(theta)
    return getattr(theta, "exact", None)


def _log_enclose(a: CReal, prec: int) -> BigReal:
    return a.enclose(prec).log()


def _t_enclose(a: CReal, theta: BigReal) -> BigReal:
    """t_a on an enclosure of theta (theta must stay inside (0, 1))."""
    if theta.hi >= 1 or theta.lo <= 0:
        raise DomainError("theta left (0, 1) while evaluating t_a")
    return _log_enclose(a, theta.prec) / theta.log()


def exact_n_pow_t(n: int, a, theta) -> Fraction | None:
    """``n ** t_a(theta)`` when it is rational.

    Either t_a(theta) is rational, or ``n**t = a**(log n / log theta)`` with a
    rational exponent; both are detected exactly.
    """
    th = _frac_of(theta)
    ea = _frac_of(a)
    if th is None or ea is None:
        return None
    t = exact_log_ratio(ea, th)
    if t is not None:
        return exact_pow(n, t)
    r = exact_log_ratio(Fraction(n), th)
    if r is not None:
        return exact_pow(ea, r)
    return None


def _pieces(J, prec: int, k: int = SUP_PIECES) -> tuple[BigReal, ...]:
    j1, j2 = (as_creal(x) for x in J)
    if isinstance(j1, ExactScalar) and isinstance(j2, ExactScalar):
        return _pieces_exact(j1, j2, prec, k)
    a, b = j1.enclose(prec), j2.enclose(prec)
    w = b - a
    out = []
    for i in range(k):
        lo = a + w * BigReal.exact(Fraction(i, k), prec)
        hi = a + w * BigReal.exact(Fraction(i + 1, k), prec)
        out.append(BigReal(lo.lo, hi.hi, prec))
    return tuple(out)


@lru_cache(maxsize=256)
def _pieces_exact(j1: ExactScalar, j2: ExactScalar, prec: int, k: int) -> tuple[BigReal, ...]:
    out = []
    for i in range(k):
        lo = j1 + (j2 - j1) * Fraction(i, k)
        hi = j1 + (j2 - j1) * Fraction(i + 1, k)
        out.append(BigReal(lo.enclose(prec).lo, hi.enclose(prec).hi, prec))
    return tuple(out)


def _sup_abs(fn, J, prec: int = 128) -> float:
    """Certified upper bound of ``|fn|`` over the closed interval J (by subdivision)."""
    best = 0.0
    for piece in _pieces(J, prec):
        v = abs(fn(piece))
        best = max(best, round_up_float(v.hi))
    return best


# -- accuracy sequences -----------------------------------------------------------


class PsiFamily:
    tag = "psi"
    depends_on_theta = False

    def exact(self, n: int, theta=None) -> Fraction | None:
        raise NotImplementedError

    def enclose(self, n: int, prec: int, theta: BigReal | None = None) -> BigReal:
        raise NotImplementedError

    def floats(self, ns: np.ndarray, theta: float = 0.0) -> np.ndarray:
        raise NotImplementedError

    def value(self, n: int, theta=None) -> CReal:
        """psi_n as a certified real."""
        ex = self.exact(n, theta)
        if ex is not None:
            return ExactScalar(ex)
        th = as_creal(theta) if theta is not None else None
        return LazyReal(lambda p: self.enclose(n, p, th.enclose(p) if th is not None else None),
                        f"psi_{n}")

    def spec(self) -> str:
        raise NotImplementedError

    def to_json(self) -> dict:
        return {"family": self.tag, "spec": self.spec()}


@dataclass(frozen=True)
class PowerLaw(PsiFamily):
    """``psi_n = min(c, 1/10) / n**sigma`` with ``sigma > 0``."""

    c: ExactScalar
    sigma: object  # ExactScalar or LazyReal
    tag = "power"

    def __post_init__(self):
        c = ExactScalar.of(self.c)
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "sigma", as_creal(self.sigma))
        if c.sign() <= 0:
            raise DomainError("PowerLaw needs c > 0")
        if compare(self.sigma, 0) <= 0:
            raise DomainError("PowerLaw needs sigma > 0")

    @property
    def scale(self) -> ExactScalar:
        return self.c if self.c < TENTH else ExactScalar(TENTH)

    def exact(self, n, theta=None):
        cs = self.scale.exact
        if cs is None:
            return None
        if n == 1:
            return cs
        s = self.sigma.exact
        if s is None:
            return None
        q = exact_pow(n, s)
        return None if q is None else cs / q

    def enclose(self, n, prec, theta=None):
        if n == 1:
            return self.scale.enclose(prec)
        return self.scale.enclose(prec) / pow_enclose(n, self.sigma, prec)

    def floats(self, ns, theta=0.0):
        return float(self.scale) * np.power(np.asarray(ns, dtype=np.float64), -float(self.sigma))

    def value(self, n, theta=None):
        # c/n**(k/2) is a quadratic surd, which keeps downstream comparisons exact
        s = self.sigma.exact
        cs = self.scale.exact
        if s is not None and cs is not None and s.denominator == 2 and self.exact(n) is None:
            return ExactScalar(Fraction(0), cs / Fraction(n) ** ((s.numerator + 1) // 2), n, "surd")
        return super().value(n, theta)

    def spec(self):
        return f"power:{self.c.describe()},{self.sigma.describe()}"


@dataclass(frozen=True)
class ConstantBelowTenth(PsiFamily):
    """``psi_n = c`` for a constant ``0 < c < 1/10``."""

    c: ExactScalar
    tag = "const"

    def __post_init__(self):
        c = ExactScalar.of(self.c)
        object.__setattr__(self, "c", c)
        if not (c.sign() > 0 and c < TENTH):
            raise DomainError("constant psi must lie in (0, 1/10)")

    def exact(self, n, theta=None):
        return self.c.exact

    def enclose(self, n, prec, theta=None):
        return self.c.enclose(prec)

    def floats(self, ns, theta=0.0):
        return np.full(np.shape(ns), float(self.c))

    def spec(self):
        return f"const:{self.c.describe()}"


@dataclass(frozen=True)
class Table(PsiFamily):
    """Explicit values psi_1, psi_2, ...; past the end either error or continue geometrically."""

    values: tuple
    extend: bool = False
    tag = "table"

    def __post_init__(self):
        vals = tuple(ExactScalar.of(v).as_fraction() for v in self.values)
        object.__setattr__(self, "values", vals)
        if not vals:
            raise DomainError("empty psi table")
        bad = [i + 1 for i, v in enumerate(vals) if not (0 < v < TENTH)]
        if bad:
            raise DomainError(f"psi table entries outside (0, 1/10) at n={bad[:5]}")
        if self.extend and len(vals) < 2:
            raise DomainError("extending a psi table needs at least two entries")
        if self.extend and vals[-1] > vals[-2]:
            raise DomainError("geometric extension with ratio > 1 would leave (0, 1/10)")

    def exact(self, n, theta=None):
        vals = self.values
        if n <= len(vals):
            return vals[n - 1]
        if not self.extend:
            raise DomainError(f"psi table has {len(vals)} entries, asked for n={n}")
        ratio = vals[-1] / vals[-2]
        k = n - len(vals)
        if k > 512 and ratio != 1:
            return None
        return vals[-1] * ratio**k

    def enclose(self, n, prec, theta=None):
        ex = self.exact(n)
        if ex is not None:
            return BigReal.exact(ex, prec)
        vals = self.values
        ratio = BigReal.exact(vals[-1] / vals[-2], prec)
        return BigReal.exact(vals[-1], prec) * ratio.pow(n - len(vals))

    def floats(self, ns, theta=0.0):
        ns = np.asarray(ns, dtype=np.int64)
        vals = np.array([float(v) for v in self.values])
        out = np.empty(ns.shape, dtype=np.float64)
        inside = ns <= len(vals)
        out[inside] = vals[ns[inside] - 1]
        if (~inside).any():
            if not self.extend:
                raise DomainError(f"psi table has {len(vals)} entries, asked for n={int(ns.max())}")
            ratio = vals[-1] / vals[-2]
            out[~inside] = vals[-1] * ratio ** (ns[~inside] - len(vals)).astype(np.float64)
        return out

    def spec(self):
        body = ";".join(str(v) for v in self.values)
        return f"table{'-ratio' if self.extend else ''}:{body}"


@dataclass(frozen=True)
class ThetaPower(PsiFamily):
    """``psi_n(theta) = c / n**(t_a(theta) - 1)``: the theta-dependent accuracy of the PS system."""

    c: ExactScalar
    a: ExactScalar
    tag = "theta-power"
    depends_on_theta = True

    def __post_init__(self):
        object.__setattr__(self, "c", ExactScalar.of(self.c))
        object.__setattr__(self, "a", ExactScalar.of(self.a))
        if self.c.sign() <= 0:
            raise DomainError("need c > 0")

    def exact(self, n, theta=None):
        c = self.c.exact
        if c is None or theta is None:
            return None
        q = exact_n_pow_t(n, self.a, theta)
        return None if q is None else c * n / q

    def enclose(self, n, prec, theta=None):
        t = _t_enclose(self.a, theta)
        return self.c.enclose(prec) * (BigReal.exact(n, prec).log() * (1 - t)).exp()

    def floats(self, ns, theta=0.0):
        t = math.log(float(self.a)) / math.log(theta)
        return float(self.c) * np.power(np.asarray(ns, dtype=np.float64), 1.0 - t)

    def spec(self):
        return f"theta-power:{self.c.describe()},{self.a.describe()}"


# -- perturbations -------------------------------------------------------------------


class PerturbationFamily:
    tag = "phi"

    def exact(self, n: int, theta) -> Fraction | None:
        raise NotImplementedError

    def enclose(self, n: int, theta: BigReal) -> BigReal:
        raise NotImplementedError

    def deriv_enclose(self, n: int, theta: BigReal) -> BigReal:
        raise NotImplementedError

    def floats(self, ns: np.ndarray, theta: float) -> tuple[np.ndarray, np.ndarray]:
        """Approximate values and a generous absolute error estimate for each."""
        raise NotImplementedError

    def sup_norm(self, n: int, J, prec: int = 128) -> float:
        return _sup_abs(lambda th: self.enclose(n, th), J, prec)

    def sup_deriv(self, n: int, J, prec: int = 128) -> float:
        return _sup_abs(lambda th: self.deriv_enclose(n, th), J, prec)

    def sup_bound(self, n: int) -> float | None:
        """A J-independent bound on |phi_n|, if one exists."""
        return None

    def growth(self, J) -> dict:
        """Asymptotic shape of the sup norms over closed J.

        ``sup_exp``/``deriv_exp``: exponents e with norm ~ n**e (log n)**k;
        None means the sequence is identically zero.
        """
        raise NotImplementedError

    def check_domain(self, J) -> None:
        return None

    def spec(self) -> str:
        raise NotImplementedError

    def to_json(self) -> dict:
        return {"family": self.tag, "spec": self.spec()}


@dataclass(frozen=True)
class Zero(PerturbationFamily):
    tag = "zero"

    def exact(self, n, theta):
        return Fraction(0)

    def enclose(self, n, theta):
        return BigReal.exact(0, theta.prec)

    def deriv_enclose(self, n, theta):
        return BigReal.exact(0, theta.prec)

    def floats(self, ns, theta):
        z = np.zeros(np.shape(ns))
        return z, z

    def sup_norm(self, n, J, prec=128):
        return 0.0

    def sup_deriv(self, n, J, prec=128):
        return 0.0

    def sup_bound(self, n):
        return 0.0

    def growth(self, J):
        return {"sup_exp": None, "deriv_exp": None, "deriv_log": 0, "bounded": True}

    def spec(self):
        return "zero"


@dataclass(frozen=True)
class Sinusoid(PerturbationFamily):
    """``phi_n(theta) = sin(n**kappa * theta) / n**delta``."""

    kappa: ExactScalar
    delta: ExactScalar
    tag = "sin"

    def __post_init__(self):
        object.__setattr__(self, "kappa", ExactScalar.of(self.kappa))
        object.__setattr__(self, "delta", ExactScalar.of(self.delta))

    def _nk(self, n, prec):
        return pow_enclose(n, self.kappa, prec)

    def _nd_inv(self, n, prec):
        return 1 / pow_enclose(n, self.delta, prec)

    def exact(self, n, theta):
        th = _frac_of(theta)
        return Fraction(0) if th == 0 else None

    def enclose(self, n, theta):
        p = theta.prec
        return (self._nk(n, p) * theta).sin() * self._nd_inv(n, p)

    def deriv_enclose(self, n, theta):
        # d/dtheta sin(n^k theta) n^-d = n^(k-d) cos(n^k theta)
        p = theta.prec
        nk = self._nk(n, p)
        return (nk * theta).cos() * nk * self._nd_inv(n, p)

    def floats(self, ns, theta):
        nf = np.asarray(ns, dtype=np.float64)
        arg = np.power(nf, float(self.kappa)) * theta
        vals = np.sin(arg) * np.power(nf, -float(self.delta))
        return vals, 1e-14 * (np.abs(arg) + 1.0)

    def sup_bound(self, n):
        return n ** -float(self.delta)

    def sup_norm(self, n, J, prec=128):
        return min(super().sup_norm(n, J, prec), round_up_float(pow_enclose(n, -self.delta, prec).hi))

    def growth(self, J):
        return {
            "sup_exp": -self.delta,
            "deriv_exp": self.kappa - self.delta,
            "deriv_log": 0,
            "bounded": self.delta.sign() >= 0,
        }

    def spec(self):
        return f"sin:{self.kappa.describe()},{self.delta.describe()}"


@dataclass(frozen=True)
class PSShift(PerturbationFamily):
    """``phi_n(theta) = kappa*theta / (t * n**(t-1))`` with ``t = t_a(theta)``."""

    a: ExactScalar
    kappa: ExactScalar
    tag = "psshift"

    def __post_init__(self):
        a = ExactScalar.of(self.a)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "kappa", ExactScalar.of(self.kappa))
        if not (a.sign() > 0 and a < 1):
            raise DomainError("PSShift needs 0 < a < 1")

    def exact(self, n, theta):
        k = self.kappa.exact
        if k == 0:
            return Fraction(0)
        th = _frac_of(theta)
        if k is None or th is None or self.a.exact is None:
            return None
        t = exact_log_ratio(self.a.exact, th)
        if t is None:
            return None
        q = exact_pow(n, t - 1)
        return None if q is None else k * th / (t * q)

    def enclose(self, n, theta):
        p = theta.prec
        t = _t_enclose(self.a, theta)
        ln = BigReal.exact(n, p).log()
        return self.kappa.enclose(p) * theta / t * (ln * (1 - t)).exp()

    def deriv_enclose(self, n, theta):
        p = theta.prec
        t = _t_enclose(self.a, theta)
        ln = BigReal.exact(n, p).log()
        lth = theta.log()
        la = _log_enclose(self.a, p)
        return self.kappa.enclose(p) * (ln * (1 - t)).exp() * (ln / lth + (1 + lth) / la)

    def floats(self, ns, theta):
        nf = np.asarray(ns, dtype=np.float64)
        t = math.log(float(self.a)) / math.log(theta)
        vals = float(self.kappa) * theta / t * np.power(nf, 1.0 - t)
        return vals, np.full(nf.shape, 1e-12 * (abs(float(self.kappa)) + 1.0))

    def sup_bound(self, n):
        return None

    def check_domain(self, J):
        j1, j2 = (as_creal(x) for x in J)
        if compare(j1, self.a) <= 0 or compare(j2, 1) >= 0:
            raise DomainError(f"PSShift needs closed J inside ({self.a.describe()}, 1)")

    def growth(self, J):
        self.check_domain(J)
        zero = self.kappa.sign() == 0
        t1 = t_map_real(self.a, as_creal(J[0]))
        one_minus = _one_minus(t1)
        return {
            "sup_exp": None if zero else one_minus,
            "deriv_exp": None if zero else one_minus,
            "deriv_log": 1,
            "bounded": True,
        }

    def spec(self):
        return f"psshift:{self.a.describe()},{self.kappa.describe()}"


def _one_minus(t: CReal) -> CReal:
    if t.exact is not None:
        return ExactScalar(1 - t.exact)
    return LazyReal(lambda p: 1 - t.enclose(p), f"1-{t.describe()}")


# -- twists ---------------------------------------------------------------------------


class TwistFamily:
    tag = "rho"
    active = True

    def exact(self, n: int, theta) -> Fraction | None:
        raise NotImplementedError

    def enclose(self, n: int, theta: BigReal) -> BigReal:
        raise NotImplementedError

    def spec(self) -> str:
        raise NotImplementedError

    def to_json(self) -> dict:
        return {"family": self.tag, "spec": self.spec()}


@dataclass(frozen=True)
class NoTwist(TwistFamily):
    tag = "none"
    active = False

    def exact(self, n, theta):
        return Fraction(0)

    def enclose(self, n, theta):
        return BigReal.exact(0, theta.prec)

    def spec(self):
        return "none"


@dataclass(frozen=True)
class PowerPhase(TwistFamily):
    """``rho_n(theta) = gamma * n**alpha`` (fixed) or ``gamma * n**t_a(theta)`` (theta mode)."""

    gamma: ExactScalar
    alpha: ExactScalar | None = None
    a: ExactScalar | None = None
    tag = "power"

    def __post_init__(self):
        object.__setattr__(self, "gamma", ExactScalar.of(self.gamma))
        if self.gamma.sign() == 0:
            raise DomainError("PowerPhase needs gamma != 0")
        if (self.alpha is None) == (self.a is None):
            raise DomainError("PowerPhase needs exactly one of a fixed exponent or a base a")
        if self.alpha is not None:
            object.__setattr__(self, "alpha", ExactScalar.of(self.alpha))
        if self.a is not None:
            a = ExactScalar.of(self.a)
            if not (a.sign() > 0 and a < 1):
                raise DomainError("theta-mode PowerPhase needs 0 < a < 1")
            object.__setattr__(self, "a", a)

    @property
    def theta_mode(self) -> bool:
        return self.a is not None

    def exact(self, n, theta):
        g = self.gamma.exact
        if g is None:
            return None
        if self.theta_mode:
            q = exact_n_pow_t(n, self.a, theta)
        else:
            q = exact_pow(n, self.alpha)
        return None if q is None else g * q

    def enclose(self, n, theta):
        p = theta.prec
        g = self.gamma.enclose(p)
        if self.theta_mode:
            t = _t_enclose(self.a, theta)
            return g * (BigReal.exact(n, p).log() * t).exp()
        return g * pow_enclose(n, self.alpha, p)

    def spec(self):
        if self.theta_mode:
            return f"power-t:{self.gamma.describe()},{self.a.describe()}"
        return f"power:{self.gamma.describe()},{self.alpha.describe()}"


# -- spec strings -------------------------------------------------------------------------


def _split(spec: str, kind: str) -> tuple[str, list[str]]:
    spec = spec.strip()
    head, _, rest = spec.partition(":")
    args = [x.strip() for x in rest.split(",")] if rest else []
    if any(not x for x in args):
        raise ParseError(f"malformed {kind} spec {spec!r}")
    return head.strip().lower(), args


def _want(args: Sequence[str], k: int, spec: str):
    if len(args) != k:
        raise ParseError(f"{spec!r} needs {k} parameter(s), got {len(args)}")


def parse_psi(spec: str) -> PsiFamily:
    head, args = _split(spec, "psi")
    if head == "power":
        _want(args, 2, spec)
        return PowerLaw(ExactScalar.of(args[0]), ExactScalar.of(args[1]))
    if head == "const":
        _want(args, 1, spec)
        return ConstantBelowTenth(ExactScalar.of(args[0]))
    if head in ("table", "table-ratio"):
        body = spec.partition(":")[2]
        vals = [v for v in body.replace(",", ";").split(";") if v.strip()]
        return Table(tuple(vals), extend=head == "table-ratio")
    if head == "theta-power":
        _want(args, 2, spec)
        return ThetaPower(ExactScalar.of(args[0]), ExactScalar.of(args[1]))
    raise ParseError(f"unknown psi family {head!r} (power, const, table, table-ratio)")


def parse_phi(spec: str) -> PerturbationFamily:
    head, args = _split(spec, "phi")
    if head == "zero":
        _want(args, 0, spec)
        return Zero()
    if head == "sin":
        _want(args, 2, spec)
        return Sinusoid(ExactScalar.of(args[0]), ExactScalar.of(args[1]))
    if head == "psshift":
        _want(args, 2, spec)
        return PSShift(ExactScalar.of(args[0]), ExactScalar.of(args[1]))
    raise ParseError(f"unknown phi family {head!r} (zero, sin, psshift)")


def parse_rho(spec: str) -> TwistFamily:
    head, args = _split(spec, "rho")
    if head == "none":
        _want(args, 0, spec)
        return NoTwist()
    if head == "power":
        _want(args, 2, spec)
        return PowerPhase(ExactScalar.of(args[0]), alpha=ExactScalar.of(args[1]))
    if head == "power-t":
        _want(args, 2, spec)
        return PowerPhase(ExactScalar.of(args[0]), a=ExactScalar.of(args[1]))
    raise ParseError(f"unknown rho family {head!r} (none, power, power-t)")
