"""Exact user-facing scalars and lazily enclosed reals.

User inputs (alpha, theta, sigma, kappa, ...) are never routed through
hardware floats.  :class:`ExactScalar` holds a number of the form
``r + s*sqrt(d)`` with rational ``r, s`` and squarefree ``d``; this covers
rationals, decimal literals and the quadratic irrationals (sqrt(2), the
golden ratio, ...) used in the experiments.

Anything that is a certified real but not exactly representable (a power
``c * n**sigma``, a change of variables ``log(a)/log(theta)``) is a
:class:`LazyReal`: a callable producing a :class:`BigReal` at a requested
precision, with an optional exact rational value.
"""

from __future__ import annotations

import ast
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Union

from ..errors import ParseError
from .interval import BigReal


def _squarefree_split(d: int) -> tuple[int, int]:
    """Return (k, m) with d = k*k*m and m squarefree."""
    k, m, f = 1, d, 2
    while f * f <= m:
        while m % (f * f) == 0:
            m //= f * f
            k *= f
        f += 1
    return k, m


def _sign_surd(r: Fraction, s: Fraction, d: int) -> int:
    """Exact sign of r + s*sqrt(d) for d >= 1."""
    if s == 0 or d == 1:
        v = r + s * (1 if d == 1 else 0)
        return (v > 0) - (v < 0)
    sr, ss = (r > 0) - (r < 0), (s > 0) - (s < 0)
    if sr == 0:
        return ss
    if sr == ss:
        return sr
    # opposite signs: compare r^2 with s^2 d
    c = r * r - s * s * d
    return sr if c > 0 else (ss if c < 0 else 0)


@dataclass(frozen=True)
class ExactScalar:
    """``rational + coeff*sqrt(radicand)``; ``kind`` records how it was written."""

    rational: Fraction
    coeff: Fraction = Fraction(0)
    radicand: int = 1
    kind: str = "rational"
    text: str = field(default="", compare=False)

    def __post_init__(self):
        if self.radicand < 1:
            raise ParseError("radicand must be a positive integer")
        if self.coeff != 0 and self.radicand > 1:
            k, m = _squarefree_split(self.radicand)
            if k != 1:
                object.__setattr__(self, "coeff", self.coeff * k)
                object.__setattr__(self, "radicand", m)
        if self.coeff == 0 and self.radicand != 1:
            object.__setattr__(self, "radicand", 1)
        if self.radicand == 1 and self.coeff != 0:
            object.__setattr__(self, "rational", self.rational + self.coeff)
            object.__setattr__(self, "coeff", Fraction(0))
        if self.coeff == 0 and self.kind == "surd":
            object.__setattr__(self, "kind", "rational")
        if not self.text:
            object.__setattr__(self, "text", self._render())

    # -- construction -----------------------------------------------------

    @classmethod
    def of(cls, value) -> ExactScalar:
        if isinstance(value, ExactScalar):
            return value
        if isinstance(value, str):
            return parse_scalar(value)
        if isinstance(value, bool):
            raise ParseError("booleans are not scalars")
        if isinstance(value, (int, Fraction)):
            return cls(Fraction(value))
        if isinstance(value, float):
            raise ParseError("hardware floats are not accepted; pass a decimal string or Fraction")
        raise ParseError(f"cannot interpret {value!r} as a scalar")

    def _render(self) -> str:
        def q(x: Fraction) -> str:
            return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"

        if self.coeff == 0:
            return q(self.rational)
        surd = f"sqrt({self.radicand})" if self.coeff == 1 else f"{q(self.coeff)}*sqrt({self.radicand})"
        if self.coeff == -1:
            surd = f"-sqrt({self.radicand})"
        if self.rational == 0:
            return surd
        return f"{q(self.rational)}+{surd}".replace("+-", "-")

    # -- exactness ----------------------------------------------------------

    @property
    def is_rational(self) -> bool:
        return self.coeff == 0

    @property
    def exact(self) -> Fraction | None:
        return self.rational if self.coeff == 0 else None

    def as_fraction(self) -> Fraction:
        if self.coeff != 0:
            raise ParseError(f"{self.text} is irrational")
        return self.rational

    def enclose(self, prec: int) -> BigReal:
        base = BigReal.exact(self.rational, prec)
        if self.coeff == 0:
            return base
        return base + BigReal.exact(self.coeff, prec) * BigReal.exact(self.radicand, prec).sqrt()

    def describe(self) -> str:
        return self.text

    def __float__(self) -> float:
        if self.coeff == 0:
            return float(self.rational)
        return float(self.rational) + float(self.coeff) * math.sqrt(self.radicand)

    def __str__(self) -> str:
        return self.text

    def __hash__(self):
        return hash((self.rational, self.coeff, self.radicand))

    # -- exact field arithmetic in Q(sqrt(d)) ----------------------------------

    def _align(self, other) -> tuple[ExactScalar, ExactScalar, int]:
        o = ExactScalar.of(other)
        if self.coeff != 0 and o.coeff != 0 and self.radicand != o.radicand:
            raise ParseError(f"cannot combine sqrt({self.radicand}) with sqrt({o.radicand})")
        d = self.radicand if self.coeff != 0 else o.radicand
        return self, o, d

    def _new(self, r: Fraction, s: Fraction, d: int) -> ExactScalar:
        return ExactScalar(r, s, d, "surd" if s != 0 else "rational")

    def __add__(self, other) -> ExactScalar:
        a, b, d = self._align(other)
        return self._new(a.rational + b.rational, a.coeff + b.coeff, d)

    __radd__ = __add__

    def __neg__(self) -> ExactScalar:
        return self._new(-self.rational, -self.coeff, self.radicand)

    def __sub__(self, other) -> ExactScalar:
        return self + (-ExactScalar.of(other))

    def __rsub__(self, other) -> ExactScalar:
        return ExactScalar.of(other) - self

    def __mul__(self, other) -> ExactScalar:
        a, b, d = self._align(other)
        r = a.rational * b.rational + a.coeff * b.coeff * d
        s = a.rational * b.coeff + a.coeff * b.rational
        return self._new(r, s, d)

    __rmul__ = __mul__

    def inverse(self) -> ExactScalar:
        n = self.rational * self.rational - self.coeff * self.coeff * self.radicand
        if n == 0:
            raise ZeroDivisionError("inverse of zero")
        return self._new(self.rational / n, -self.coeff / n, self.radicand)

    def __truediv__(self, other) -> ExactScalar:
        return self * ExactScalar.of(other).inverse()

    def __rtruediv__(self, other) -> ExactScalar:
        return ExactScalar.of(other) * self.inverse()

    def sign(self) -> int:
        return _sign_surd(self.rational, self.coeff, self.radicand)

    def _cmp(self, other) -> int:
        return (self - other).sign()

    def __eq__(self, other):
        try:
            return self._cmp(other) == 0
        except (ParseError, TypeError):
            return NotImplemented

    def __lt__(self, other):
        return self._cmp(other) < 0

    def __le__(self, other):
        return self._cmp(other) <= 0

    def __gt__(self, other):
        return self._cmp(other) > 0

    def __ge__(self, other):
        return self._cmp(other) >= 0

    def floor(self) -> int:
        """Exact floor; uses a float guess corrected by exact comparisons."""
        if self.coeff == 0:
            return math.floor(self.rational)
        k = math.floor(float(self))
        while self < k:
            k -= 1
        while self >= k + 1:
            k += 1
        return k

    def to_json(self) -> str:
        return self.text


# -- parsing -----------------------------------------------------------------

_ALLOWED_BINOPS = (ast.Add, ast.Sub, ast.Mult, ast.Div, ast.Pow)


def parse_scalar(text: str) -> ExactScalar:
    """Parse ``"1/3"``, ``"0.618034"``, ``"sqrt(2)"``, ``"(1+sqrt(5))/2"`` exactly.

    Decimal literals are read from the source text, never through float.
    ``^`` is accepted as a synonym for ``**`` (integer exponents only).
    """
    src = str(text).strip()
    if not src:
        raise ParseError("empty scalar")
    try:
        tree = ast.parse(src.replace("^", "**"), mode="eval")
    except SyntaxError as exc:
        raise ParseError(f"cannot parse scalar {text!r}") from exc
    body = src.replace("^", "**")

    def ev(node) -> ExactScalar:
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)) and not isinstance(node.value, bool):
            literal = ast.get_source_segment(body, node)
            return ExactScalar(Fraction(literal))
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = ev(node.operand)
            return -v if isinstance(node.op, ast.USub) else v
        if isinstance(node, ast.BinOp) and isinstance(node.op, _ALLOWED_BINOPS):
            left, right = ev(node.left), ev(node.right)
            if isinstance(node.op, ast.Add):
                return left + right
            if isinstance(node.op, ast.Sub):
                return left - right
            if isinstance(node.op, ast.Mult):
                return left * right
            if isinstance(node.op, ast.Div):
                if right.sign() == 0:
                    raise ParseError("division by zero")
                return left / right
            e = right.exact
            if e is None or e.denominator != 1:
                raise ParseError("only integer exponents are exact; use a Fraction exponent elsewhere")
            out = ExactScalar(Fraction(1))
            for _ in range(abs(int(e))):
                out = out * left
            return out if e >= 0 else out.inverse()
        if (
            isinstance(node, ast.Call)
            and isinstance(node.func, ast.Name)
            and node.func.id == "sqrt"
            and len(node.args) == 1
            and not node.keywords
        ):
            arg = ev(node.args[0]).exact
            if arg is None or arg < 0:
                raise ParseError("sqrt takes a non-negative rational argument")
            # sqrt(p/q) = sqrt(p*q)/q
            k, m = _squarefree_split(arg.numerator * arg.denominator)
            return ExactScalar(Fraction(0), Fraction(k, arg.denominator), m, "surd")
        raise ParseError(f"unsupported syntax in scalar {text!r}")

    value = ev(tree)
    literal_decimal = isinstance(tree.body, ast.Constant) or (
        isinstance(tree.body, ast.UnaryOp) and isinstance(tree.body.operand, ast.Constant)
    )
    kind = "surd" if value.coeff != 0 else ("decimal" if literal_decimal and "." in src else "rational")
    return ExactScalar(value.rational, value.coeff, value.radicand, kind, src)


# -- lazily enclosed reals -------------------------------------------------------


class LazyReal:
    """A certified real given by an enclosure function.

    ``fn(prec)`` must return a :class:`BigReal` containing the value; ``exact``
    is the rational value when one is known (used for tie-breaking).
    """

    __slots__ = ("_fn", "label", "exact", "_approx")

    def __init__(self, fn: Callable[[int], BigReal], label: str, exact: Fraction | None = None):
        self._fn = fn
        self.label = label
        self.exact = exact
        self._approx: float | None = None

    def enclose(self, prec: int) -> BigReal:
        if self.exact is not None:
            return BigReal.exact(self.exact, prec)
        return self._fn(prec)

    def describe(self) -> str:
        return self.label

    def __float__(self) -> float:
        if self._approx is None:
            self._approx = float(self.enclose(128).mid)
        return self._approx

    def __repr__(self) -> str:
        return f"LazyReal({self.label})"

    def to_json(self) -> dict:
        b = self.enclose(128)
        return {"expr": self.label, "value": b.to_decimal()}


CReal = Union[ExactScalar, LazyReal]


def as_creal(x) -> CReal:
    if isinstance(x, (ExactScalar, LazyReal)):
        return x
    return ExactScalar.of(x)
