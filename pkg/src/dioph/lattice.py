"""Exact counts of solutions to |qr - ps| <= L and to its perturbed version

    | q(r - phi_p(r/p)) - p(s - phi_q(s/q)) | <= L,

each with an independent exhaustive oracle, plus the scale omega that
separates covering resolution from perturbation drift.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from gmpy2 import mpq

from .errors import AmbiguousAtMaxPrecision, InvalidQuery, WorkCapExceeded
from .parallel import pmap
from .families import PerturbationFamily, PsiFamily, Zero
from .numeric import (
    BigReal,
    ExactScalar,
    PrecisionPolicy,
    as_creal,
    cceil,
    cfloor,
    compare,
    escalate,
    is_prime,
    lazy_sum,
    mod_inverse,
)

DEFAULT_WORK_CAP = 50_000_000


@dataclass(frozen=True)
class LatticeQuery:
    p: int
    Q: int
    qset: tuple
    L: object  # certified real >= 1
    J: tuple
    phi: PerturbationFamily | None = None

    def __post_init__(self):
        problems = []
        if not (self.p > 2 and is_prime(self.p)):
            problems.append(f"p={self.p} is not an odd prime")
        if not self.Q > self.p:
            problems.append(f"need p < Q (p={self.p}, Q={self.Q})")
        qs = tuple(sorted(set(int(q) for q in self.qset)))
        outside = [q for q in qs if not (self.Q <= q <= 2 * self.Q - 1)]
        if outside:
            problems.append(f"q outside [{self.Q}, {2 * self.Q - 1}]: {outside[:5]}")
        if self.p > 2:
            mult = [q for q in qs if q % self.p == 0]
            if mult:
                problems.append(f"multiples of p in the q-set: {mult[:5]}")
        L = as_creal(self.L)
        try:
            if compare(L, 1) < 0:
                problems.append("need L >= 1")
        except AmbiguousAtMaxPrecision:
            problems.append("cannot decide L >= 1")
        j1, j2 = (ExactScalar.of(x) for x in self.J)
        if not j1 < j2:
            problems.append("J must be a non-empty open interval (lambda(J) > 0)")
        if problems:
            raise InvalidQuery("; ".join(problems))
        object.__setattr__(self, "qset", qs)
        object.__setattr__(self, "L", L)
        object.__setattr__(self, "J", (j1, j2))
        if self.phi is not None:
            self.phi.check_domain(self.J)

    @property
    def length(self) -> ExactScalar:
        return self.J[1] - self.J[0]

    def r_range(self) -> range:
        """r with r/p in J (open)."""
        return range(cfloor(self.J[0] * self.p) + 1, cceil(self.J[1] * self.p))

    def s_range(self, q: int) -> range:
        return range(cfloor(self.J[0] * q) + 1, cceil(self.J[1] * q))

    def to_json(self) -> dict:
        return {
            "p": self.p,
            "Q": self.Q,
            "qset": list(self.qset),
            "L": self.L.describe(),
            "J": [self.J[0].describe(), self.J[1].describe()],
            "phi": None if self.phi is None else self.phi.spec(),
        }


@dataclass
class CountReport:
    count: int
    bound_basic: float
    omega: float | None = None
    hypothesis_ok: bool | None = None
    bound_perturbed: float | None = None
    mode: str = "closed-form"

    @property
    def ratio(self) -> float | None:
        b = self.bound_perturbed if self.bound_perturbed is not None else self.bound_basic
        return self.count / b if b and b > 0 else None

    def to_json(self) -> dict:
        return {
            "count": self.count,
            "bound_basic": repr(self.bound_basic),
            "omega": None if self.omega is None else repr(self.omega),
            "hypothesis_ok": self.hypothesis_ok,
            "bound_perturbed": None if self.bound_perturbed is None else repr(self.bound_perturbed),
            "ratio": None if self.ratio is None else repr(self.ratio),
            "mode": self.mode,
        }


def _ceil_L(q: LatticeQuery) -> int:
    return cceil(q.L)


def _log_term(Q: int) -> float:
    return Q * math.log(Q) ** 2


def bound_basic(q: LatticeQuery) -> float:
    """lambda(J) ceil(L) |Q| + Q (log Q)^2 (implicit constant taken as 1)."""
    return float(q.length) * _ceil_L(q) * len(q.qset) + _log_term(q.Q)


# -- basic count ---------------------------------------------------------------------------------


def _s_count_exact(qr: int, p: int, L) -> int:
    """#{s : |qr - ps| <= L} = floor((qr+L)/p) - ceil((qr-L)/p) + 1, clamped at 0."""
    hi = cfloor(lazy_sum([(Fraction(1, p), L)], Fraction(qr, p)))
    lo = cceil(lazy_sum([(Fraction(-1, p), L)], Fraction(qr, p)))
    return max(0, hi - lo + 1)


def count_basic(query: LatticeQuery, congruence: bool = False) -> CountReport:
    """Exact number of (q, r, s) with q in Q-set, r/p in J and |qr - ps| <= L.

    ``s`` is unconstrained.  The default sums the closed form per (q, r);
    ``congruence=True`` counts through r = qbar*l (mod p) over |l| <= floor(L).
    """
    if query.phi is not None and not isinstance(query.phi, Zero):
        raise InvalidQuery("count_basic takes an unperturbed query")
    rr = query.r_range()
    if congruence:
        total = _count_congruence(query, rr)
    else:
        total = _count_closed_form(query, rr)
    return CountReport(total, bound_basic(query), mode="congruence" if congruence else "closed-form")


def _count_closed_form(query: LatticeQuery, rr: range) -> int:
    p = query.p
    Lx = query.L.exact
    if Lx is not None and len(rr) and query.qset:
        u, v = Lx.numerator, Lx.denominator
        big = 2 * query.Q * max(abs(rr.start), abs(rr.stop)) * v + abs(u)
        if big < 1 << 60:
            qs = np.array(query.qset, dtype=np.int64)[:, None]
            rs = np.arange(rr.start, rr.stop, dtype=np.int64)[None, :]
            qr = qs * rs
            hi = np.floor_divide(v * qr + u, v * p)
            lo = -np.floor_divide(-(v * qr - u), v * p)
            return int(np.maximum(hi - lo + 1, 0).sum())
    return sum(_s_count_exact(q * r, p, query.L) for q in query.qset for r in rr)


def _count_congruence(query: LatticeQuery, rr: range) -> int:
    p = query.p
    lmax = cfloor(query.L)
    total = 0
    for q in query.qset:
        qbar = mod_inverse(q, p)
        for l in range(-lmax, lmax + 1):
            res = (qbar * l) % p
            # r in rr with r = res (mod p)
            first = rr.start + ((res - rr.start) % p)
            if first < rr.stop:
                total += (rr.stop - 1 - first) // p + 1
    return total


def _work(query: LatticeQuery, per_pair: float) -> float:
    return len(query.qset) * len(query.r_range()) * per_pair


def count_basic_oracle(query: LatticeQuery, work_cap: int = DEFAULT_WORK_CAP) -> int:
    """Exhaustive reference: scan a window of s around qr/p and test |qr - ps| <= L directly."""
    Lf = float(query.L)
    work = _work(query, 2 * Lf / query.p + 6)
    if work > work_cap:
        raise WorkCapExceeded(f"oracle work {work:.3g} exceeds cap {work_cap}")
    p, L = query.p, query.L
    count = 0
    for q in query.qset:
        for r in query.r_range():
            qr = q * r
            s_lo = math.floor((qr - Lf) / p) - 2
            s_hi = math.ceil((qr + Lf) / p) + 2
            for s in range(s_lo, s_hi + 1):
                if compare(abs(qr - p * s), L) <= 0:
                    count += 1
    return count


# -- omega and the perturbed count -----------------------------------------------------------------


@dataclass
class OmegaResult:
    omega: float
    hypothesis_ok: bool
    rhs: float
    sup_phi: dict = field(default_factory=dict)
    sup_dphi: dict = field(default_factory=dict)


def _lower_fraction(x) -> Fraction:
    """A rational lower bound of a certified real."""
    c = as_creal(x)
    if c.exact is not None:
        return c.exact
    return Fraction(*mpq(c.enclose(128).lo).as_integer_ratio())


def omega(query: LatticeQuery) -> OmegaResult:
    """omega = (1/10) min_n min(lambda(J), L/(Q |phi_n'|)) and the check omega >= 10 max_n(1/p, L/(pQ), |phi_n|/n).

    Sup norms are certified upper bounds over closed J, so omega is a lower
    bound and the right-hand side an upper bound: ``hypothesis_ok`` is conservative.
    """
    phi = query.phi if query.phi is not None else Zero()
    ns = sorted({query.p, *query.qset})
    lam = _lower_fraction(query.length)
    L_lo = _lower_fraction(query.L)
    L_hi = query.L.exact if query.L.exact is not None else Fraction(*mpq(query.L.enclose(128).hi).as_integer_ratio())
    sup = {n: phi.sup_norm(n, query.J) for n in ns}
    dsup = {n: phi.sup_deriv(n, query.J) for n in ns}
    inner = lam
    for n in ns:
        if dsup[n] > 0:
            inner = min(inner, L_lo / (query.Q * Fraction(dsup[n])))
    om = inner / 10
    rhs = 10 * max([Fraction(1, query.p), L_hi / (query.p * query.Q)] + [Fraction(sup[n]) / n for n in ns])
    return OmegaResult(float(om), om >= rhs, float(rhs), sup, dsup)


class _Side:
    """Values n*(x - phi_n(x/n)) style terms, exact when possible, cached at 128 bits."""

    def __init__(self, phi: PerturbationFamily, n: int, scale: int):
        self.phi, self.n, self.scale = phi, n, scale
        self.cache: dict = {}

    def exact(self, x: int) -> Fraction | None:
        ph = self.phi.exact(self.n, Fraction(x, self.n))
        return None if ph is None else self.scale * (x - ph)

    def enclose(self, x: int, prec: int) -> BigReal:
        key = (x, prec)
        v = self.cache.get(key)
        if v is None:
            th = BigReal.exact(Fraction(x, self.n), prec)
            v = (BigReal.exact(x, prec) - self.phi.enclose(self.n, th)) * self.scale
            self.cache[key] = v
        return v

    def approx(self, x: int) -> float:
        e = self.exact(x)
        return float(e) if e is not None else float(self.enclose(x, 128).mid)


def _pair_ok(A: _Side, B: _Side, r: int, s: int, L, policy) -> bool:
    """Certified |A(r) - B(s)| <= L."""
    ea, eb = A.exact(r), B.exact(s)
    if ea is not None and eb is not None:
        return compare(abs(ea - eb), L) <= 0

    def attempt(prec: int) -> bool:
        a = BigReal.exact(ea, prec) if ea is not None else A.enclose(r, prec)
        b = BigReal.exact(eb, prec) if eb is not None else B.enclose(s, prec)
        v = abs(a - b)
        Le = L.enclose(prec)
        if v.hi <= Le.lo:
            return True
        if v.lo > Le.hi:
            return False
        raise AmbiguousAtMaxPrecision("perturbed inequality enclosure straddles L")

    return escalate(attempt, policy, f"(r={r}, s={s})")


def bound_perturbed(query: LatticeQuery, om: float) -> float | None:
    if om <= 0:
        return None
    return float(query.length) * (_ceil_L(query) * len(query.qset) + _log_term(query.Q) / om)


def _require_phi(query: LatticeQuery) -> PerturbationFamily:
    if query.phi is None:
        raise InvalidQuery("the perturbed count needs a perturbation family (use zero for none)")
    return query.phi


def _count_perturbed_q(query: LatticeQuery, phi: PerturbationFamily, q: int, sup_q: float, policy) -> int:
    p, L = query.p, query.L
    Lf = float(L)
    srange = query.s_range(q)
    if not len(srange):
        return 0
    A = _Side(phi, p, q)
    B = _Side(phi, q, p)
    rr = query.r_range()
    # float pre-pass: only candidates that might pass get certified
    fa, ea = _side_floats(phi, p, rr)
    fb, eb = _side_floats(phi, q, srange)
    slack = sup_q + 1e-6 + 1e-12 * (abs(srange.start) + abs(srange.stop))
    total = 0
    for i, r in enumerate(rr):
        a = q * (r - fa[i])
        lo = max(srange.start, math.floor((a - Lf) / p - slack) - 1)
        hi = min(srange.stop - 1, math.ceil((a + Lf) / p + slack) + 1)
        for s in range(lo, hi + 1):
            j = s - srange.start
            diff = abs(a - p * (s - fb[j]))
            margin = q * ea[i] + p * eb[j] + 1e-12 * (abs(a) + p * abs(s) + Lf) + 1e-9
            if diff > Lf + margin:
                continue
            if _pair_ok(A, B, r, s, L, policy):
                total += 1
    return total


def _side_floats(phi: PerturbationFamily, n: int, xs: range) -> tuple[np.ndarray, np.ndarray]:
    """phi_n(x/n) for x in xs, with a generous error estimate."""
    if not len(xs):
        return np.zeros(0), np.zeros(0)
    ths = np.arange(xs.start, xs.stop, dtype=np.float64) / n
    vals = np.empty(len(xs))
    errs = np.empty(len(xs))
    for k, th in enumerate(ths):
        v, e = phi.floats(np.array([n]), float(th))
        vals[k], errs[k] = v[0], 8 * e[0] + 1e-15
    return vals, errs


def count_perturbed(query: LatticeQuery, policy: PrecisionPolicy | None = None, jobs: int = 1) -> CountReport:
    """Exact count of (q, r, s) with r/p, s/q in J and the perturbed inequality.

    For each (q, r) the admissible s are bracketed using sup|phi_q| and then
    each candidate is decided with certified arithmetic.
    """
    phi = _require_phi(query)
    om = omega(query)
    total = sum(pmap(lambda q: _count_perturbed_q(query, phi, q, om.sup_phi[q], policy), query.qset, jobs))
    return CountReport(total, bound_basic(query), om.omega, om.hypothesis_ok, bound_perturbed(query, om.omega),
                       mode="bracketed")


def count_perturbed_oracle(query: LatticeQuery, work_cap: int = DEFAULT_WORK_CAP,
                           policy: PrecisionPolicy | None = None) -> int:
    """Reference: every s in qJ for every (q, r), no bracketing."""
    phi = _require_phi(query)
    work = sum(len(query.s_range(q)) for q in query.qset) * len(query.r_range())
    if work > work_cap:
        raise WorkCapExceeded(f"oracle work {work} exceeds cap {work_cap}")
    total = 0
    for q in query.qset:
        A = _Side(phi, query.p, q)
        B = _Side(phi, q, query.p)
        for r in query.r_range():
            for s in query.s_range(q):
                if _pair_ok(A, B, r, s, query.L, policy):
                    total += 1
    return total


def overlap_query_from_systems(p: int, Q: int, psi: PsiFamily, phi: PerturbationFamily | None, J,
                               qset=None) -> LatticeQuery:
    """The overlap-counting query for the band [Q, 2Q): L = 4 * (2Q) * psi_p."""
    if Q <= p:
        raise InvalidQuery(f"band Q={Q} must lie above p={p}")
    L = lazy_sum([(8 * Q, psi.value(p))])
    if qset is None:
        qset = [q for q in range(Q, 2 * Q) if q % p]
    return LatticeQuery(p, Q, tuple(qset), L, tuple(J), phi)
