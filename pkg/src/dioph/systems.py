"""The perturbed, twisted approximation system

    || theta*n + phi_n(theta) || <= psi_n,    { rho_n(theta) } in I,

its certified evaluation, a filtered solver, the target intervals around
(m - phi_n(m/n))/n, an analytic/truncation hypothesis checker and a seeded
survey of the solvable set.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from gmpy2 import mpq

from .errors import AmbiguousAtMaxPrecision, DomainError, EmptyRange, PreconditionError
from .families import (
    ConstantBelowTenth,
    NoTwist,
    PerturbationFamily,
    PowerLaw,
    PowerPhase,
    PsiFamily,
    Table,
    ThetaPower,
    TwistFamily,
    parse_phi,
    parse_psi,
    parse_rho,
)
from .numeric import (
    BigReal,
    ExactScalar,
    PrecisionPolicy,
    as_creal,
    cceil,
    cfloor,
    compare,
    dist_exact,
    dist_nearest_int,
    escalate,
    frac,
    frac_exact,
    lazy_sum,
    t_map_real,
)
from .parallel import pmap

FILTER_EPS = 2.0**-40
CHUNK = 1 << 16


@dataclass(frozen=True)
class SystemInstance:
    J: tuple
    psi: PsiFamily
    phi: PerturbationFamily
    rho: TwistFamily = field(default_factory=NoTwist)
    I: tuple = (Fraction(0), Fraction(1))

    def __post_init__(self):
        j1, j2 = (ExactScalar.of(x) for x in self.J)
        if not j1 < j2:
            raise PreconditionError(f"J=({j1}, {j2}) is empty")
        object.__setattr__(self, "J", (j1, j2))
        l, r = (ExactScalar.of(x).as_fraction() for x in self.I)
        if not (0 <= l < r <= 1):
            raise PreconditionError(f"I=[{l}, {r}) must be a non-empty subinterval of [0, 1)")
        object.__setattr__(self, "I", (l, r))
        self.phi.check_domain(self.J)

    @property
    def full_I(self) -> bool:
        return self.I == (0, 1)

    def contains(self, theta) -> bool:
        th = as_creal(theta)
        return compare(th, self.J[0]) > 0 and compare(th, self.J[1]) < 0

    def to_json(self) -> dict:
        return {
            "J": [self.J[0].describe(), self.J[1].describe()],
            "psi": self.psi.spec(),
            "phi": self.phi.spec(),
            "rho": self.rho.spec(),
            "I": [_q(self.I[0]), _q(self.I[1])],
        }

    @classmethod
    def from_json(cls, doc: dict) -> SystemInstance:
        return cls(
            J=tuple(doc["J"]),
            psi=parse_psi(doc["psi"]),
            phi=parse_phi(doc.get("phi", "zero")),
            rho=parse_rho(doc.get("rho", "none")),
            I=tuple(doc.get("I", ("0", "1"))),
        )


def _q(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def real_text(exact: Fraction | None, enc: BigReal | None) -> str | None:
    """Exact rationals print exactly; enclosures print their midpoint at full precision."""
    if exact is not None:
        return _q(exact)
    if enc is None:
        return None
    return enc.to_decimal()


@dataclass
class SolutionRecord:
    n: int
    residual: BigReal
    twist: BigReal | None
    passed: bool
    residual_exact: Fraction | None = None
    twist_exact: Fraction | None = None

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "residual": real_text(self.residual_exact, self.residual),
            "twist": real_text(self.twist_exact, self.twist) if (self.twist is not None) else None,
            "passed": self.passed,
        }


# -- evaluation ----------------------------------------------------------------------------


def _le_enclosure(x_lo, x_hi, y: BigReal) -> bool:
    """Certified ``x <= y`` for x in [x_lo, x_hi]."""
    if x_hi <= y.lo:
        return True
    if x_lo > y.hi:
        return False
    raise AmbiguousAtMaxPrecision("residual enclosure overlaps psi_n")


def _residual(inst: SystemInstance, theta: ExactScalar, n: int, policy) -> tuple:
    th_exact = theta.exact
    ph_exact = inst.phi.exact(n, theta) if th_exact is not None else None
    psi_exact = inst.psi.exact(n, theta)
    if th_exact is not None and ph_exact is not None:
        res = dist_exact(th_exact * n + ph_exact)
        if psi_exact is not None:
            return BigReal.exact(res, 128), res, res <= psi_exact

        def cmp_exact(prec: int):
            psi = inst.psi.enclose(n, prec, theta.enclose(prec))
            r = BigReal.exact(res, prec)
            return _le_enclosure(r.lo, r.hi, psi)

        ok = escalate(cmp_exact, policy, f"residual at n={n}")
        return BigReal.exact(res, 128), res, ok

    def attempt(prec: int):
        th = theta.enclose(prec)
        x = th * n + inst.phi.enclose(n, th)
        d = dist_nearest_int(x)
        if psi_exact is not None:
            psi = BigReal.exact(psi_exact, prec)
        else:
            psi = inst.psi.enclose(n, prec, th)
        return d, _le_enclosure(d.lo, d.hi, psi)

    d, ok = escalate(attempt, policy, f"residual at n={n}")
    return d, None, ok


def _in_I(f_lo, f_hi, I) -> bool:
    l, r = I
    if f_lo >= l and f_hi < r:
        return True
    if f_hi < l or f_lo >= r:
        return False
    raise AmbiguousAtMaxPrecision("twist enclosure straddles an endpoint of I")


def _twist(inst: SystemInstance, theta: ExactScalar, n: int, policy) -> tuple:
    ex = inst.rho.exact(n, theta)
    if ex is not None:
        f = frac_exact(ex)
        return BigReal.exact(f, 128), f, inst.I[0] <= f < inst.I[1]

    def attempt(prec: int):
        th = theta.enclose(prec)
        f = frac(inst.rho.enclose(n, th))
        return f, _in_I(f.lo, f.hi, tuple(mpq(x.numerator, x.denominator) for x in inst.I))

    f, ok = escalate(attempt, policy, f"twist at n={n}")
    return f, None, ok


def eval_instance(inst: SystemInstance, theta, n: int, policy: PrecisionPolicy | None = None) -> SolutionRecord:
    """Certified evaluation of both conditions at one n."""
    th = ExactScalar.of(theta)
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    if not inst.contains(th):
        raise DomainError(f"theta={th} is not in J=({inst.J[0]}, {inst.J[1]})")
    try:
        res, res_exact, ok = _residual(inst, th, n, policy)
        if not ok:
            return SolutionRecord(n, res, None, False, res_exact)
        if not inst.rho.active or inst.full_I:
            return SolutionRecord(n, res, None, True, res_exact)
        tw, tw_exact, ok2 = _twist(inst, th, n, policy)
        return SolutionRecord(n, res, tw, ok2, res_exact, tw_exact)
    except AmbiguousAtMaxPrecision as exc:
        if exc.n is not None:
            raise
        raise AmbiguousAtMaxPrecision(str(exc), n=n) from exc


def _primes_mask(lo: int, hi: int) -> np.ndarray:
    sieve = np.ones(hi + 1, dtype=bool)
    sieve[:2] = False
    for p in range(2, int(math.isqrt(hi)) + 1):
        if sieve[p]:
            sieve[p * p :: p] = False
    return sieve[lo : hi + 1]


def candidates(inst: SystemInstance, theta: ExactScalar, n0: int, n1: int) -> np.ndarray:
    """Indices in [n0, n1] not certainly failing the residual inequality in double precision.

    Everything returned is re-checked with certified arithmetic; only indices whose
    float residual exceeds psi_n by more than a generous error margin are dropped.
    """
    tf = float(theta)
    ns = np.arange(n0, n1 + 1, dtype=np.int64)
    nf = ns.astype(np.float64)
    ph, ph_err = inst.phi.floats(nf, tf)
    x = tf * nf + ph
    res = np.abs(x - np.rint(x))
    psi = inst.psi.floats(nf, tf)
    margin = ph_err + FILTER_EPS * (1.0 + nf * abs(tf) + np.abs(ph)) + psi * FILTER_EPS * (1.0 + np.log(nf))
    keep = ~(res > psi + margin)
    return ns[keep]


def solve_system(
    inst: SystemInstance,
    theta,
    n0: int,
    n1: int,
    max_solutions: int | None = None,
    primes_only: bool = False,
    policy: PrecisionPolicy | None = None,
) -> list[SolutionRecord]:
    """All passing n in [n0, n1], increasing, truncated at ``max_solutions``."""
    th = ExactScalar.of(theta)
    if n0 < 1 or n1 < n0:
        raise PreconditionError(f"bad n range [{n0}, {n1}]")
    if max_solutions is not None and max_solutions < 0:
        raise PreconditionError("max_solutions must be >= 0")
    if not inst.contains(th):
        raise DomainError(f"theta={th} is not in J")
    out: list[SolutionRecord] = []
    for lo in range(n0, n1 + 1, CHUNK):
        hi = min(n1, lo + CHUNK - 1)
        cand = candidates(inst, th, lo, hi)
        if primes_only:
            mask = _primes_mask(lo, hi)
            cand = cand[mask[cand - lo]]
        for n in cand.tolist():
            rec = eval_instance(inst, th, n, policy)
            if rec.passed:
                out.append(rec)
                if max_solutions is not None and len(out) >= max_solutions:
                    return out
    return out


# -- target intervals ------------------------------------------------------------------------


@dataclass
class TargetInterval:
    m: int
    center: BigReal
    half_width: BigReal
    center_exact: Fraction | None = None
    half_width_exact: Fraction | None = None

    def contains_float(self, x: float) -> bool:
        c, h = float(self.center), float(self.half_width)
        return c - h <= x <= c + h

    def to_json(self) -> dict:
        return {
            "m": self.m,
            "center": real_text(self.center_exact, self.center),
            "half_width": real_text(self.half_width_exact, self.half_width),
        }


def target_intervals(inst: SystemInstance, n: int, prec: int = 128) -> list[TargetInterval]:
    """Intervals e_{n,m} +- psi_n/(2n) for every m with m/n in J, sorted by center."""
    j1, j2 = inst.J
    m_lo = cfloor(j1 * n) + 1
    m_hi = cceil(j2 * n) - 1
    if m_hi < m_lo:
        raise EmptyRange(f"nJ contains no integer for n={n}")
    out = []
    for m in range(m_lo, m_hi + 1):
        q = Fraction(m, n)
        ph = inst.phi.exact(n, q)
        qe = BigReal.exact(q, prec)
        if ph is not None:
            ce = (m - ph) / Fraction(n)
            center = BigReal.exact(ce, prec)
        else:
            ce = None
            center = (BigReal.exact(m, prec) - inst.phi.enclose(n, qe)) / n
        ps = inst.psi.exact(n, q)
        if ps is not None:
            hwe = ps / (2 * n)
            hw = BigReal.exact(hwe, prec)
        else:
            hwe = None
            hw = inst.psi.enclose(n, prec, qe) / (2 * n)
        out.append(TargetInterval(m, center, hw, ce, hwe))
    out.sort(key=lambda t: (t.center.lo, t.m))
    return out


# -- hypotheses ----------------------------------------------------------------------------------

HOLDS = "holds-analytically"
HOLDS_TRUNC = "holds-on-truncation"
FAILS = "fails"
INDET = "indeterminate"
CONDITIONS = ("A1", "A2", "A3", "A4", "B1", "B2", "B3", "B4", "C2")


@dataclass
class Verdict:
    status: str
    detail: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"verdict": self.status, **{k: _jsonable(v) for k, v in self.detail.items()}}


def _jsonable(v):
    if isinstance(v, Fraction):
        return _q(v)
    if isinstance(v, float):
        return repr(v)
    if hasattr(v, "describe"):
        return v.describe()
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    return v


@dataclass
class HypothesisReport:
    verdicts: dict
    N_trunc: int

    def __getitem__(self, key: str) -> Verdict:
        return self.verdicts[key]

    def to_json(self) -> dict:
        return {"N_trunc": self.N_trunc, "conditions": {k: self.verdicts[k].to_json() for k in CONDITIONS}}


def _psi_exponent(psi: PsiFamily):
    if isinstance(psi, PowerLaw):
        return psi.sigma
    if isinstance(psi, ConstantBelowTenth):
        return ExactScalar(Fraction(0))
    return None


def _primes_upto(n: int) -> np.ndarray:
    return np.nonzero(_primes_mask(0, n))[0]


def _a_conditions(psi: PsiFamily, N: int) -> dict:
    sigma = _psi_exponent(psi)
    if sigma is not None:
        s = float(sigma)
        a1_sum = sum(2.0 ** (-s * l) * l * l for l in range(1, 400)) if s > 0 else math.inf
        return {
            "A1": Verdict(HOLDS if compare(sigma, 0) > 0 else FAILS, {"sigma": sigma, "sup_sum": a1_sum}),
            "A2": Verdict(HOLDS if compare(sigma, -1) >= 0 else FAILS, {"sigma": sigma}),
            "A3": Verdict(HOLDS, {"ratio_psi_n_over_psi_2n": 2.0**s, "any_c_above": max(1.0, 2.0**s)}),
            "A4": Verdict(HOLDS if compare(sigma, 1) <= 0 else FAILS, {"sigma": sigma}),
        }
    if isinstance(psi, ThetaPower):
        note = {"note": "accuracy depends on theta; not a fixed sequence"}
        return {k: Verdict(INDET, dict(note)) for k in ("A1", "A2", "A3", "A4")}
    return _a_truncation(psi, N)


def _table_len(psi: PsiFamily, N: int) -> int:
    if isinstance(psi, Table) and not psi.extend:
        return min(N, len(psi.values))
    return N


def _a_truncation(psi: PsiFamily, N: int) -> dict:
    N = _table_len(psi, N)
    ns = np.arange(1, N + 1)
    v = psi.floats(ns)
    out = {}
    # A1: sup over n of sum_l psi_{2^l n} l^2 / psi_n, truncated at 2^l n <= N
    sums, last_share = [], 0.0
    for n in range(1, N // 2 + 1):
        terms = []
        l, m = 1, 2 * n
        while m <= N:
            terms.append(v[m - 1] * l * l / v[n - 1])
            l, m = l + 1, 2 * m
        s = sum(terms)
        sums.append(s)
        if n == 1 and terms:
            last_share = terms[-1] / s
    sup = max(sums) if sums else 0.0
    out["A1"] = Verdict(HOLDS_TRUNC if sums and last_share < 0.01 else INDET,
                        {"sup_partial_sum": sup, "last_term_share_n1": last_share, "N": N})
    ratio = v / ns
    bad = np.nonzero(np.diff(ratio) > 0)[0]
    if bad.size:
        out["A2"] = Verdict(FAILS, {"breakpoints": [int(i) + 2 for i in bad[:10]], "N": N})
    else:
        out["A2"] = Verdict(HOLDS_TRUNC, {"N": N})
    half = N // 2
    c_inf = float(np.max(v[:half] / v[1 : 2 * half : 2])) if half else 1.0
    out["A3"] = Verdict(HOLDS_TRUNC, {"inferred_c": max(c_inf, 1.0), "N": N})
    primes = _primes_upto(N)
    psum = float(np.sum(v[primes - 1])) if primes.size else 0.0
    lo = max(2, N // 2)
    slope = (math.log(v[N - 1]) - math.log(v[lo - 1])) / (math.log(N) - math.log(lo)) if N > lo else 0.0
    out["A4"] = Verdict(HOLDS_TRUNC if slope >= -1 else INDET,
                        {"prime_partial_sum": psum, "local_log_slope": slope, "N": N})
    return out


def _b_conditions(inst: SystemInstance, N: int) -> dict:
    g = inst.phi.growth(inst.J)
    e = g["deriv_exp"]
    out = {"B1": Verdict(HOLDS if g["bounded"] else FAILS, {"sup_exp": g["sup_exp"]})}
    if e is None or compare(e, 0) <= 0:
        out["B2"] = Verdict(HOLDS, {"deriv_exp": e})
    else:
        out["B2"] = Verdict(FAILS, {"deriv_exp": e, "note": "sup of |phi_n'| grows like n**deriv_exp"})
    sigma = _psi_exponent(inst.psi)
    if sigma is None:
        out.update(_b_truncation(inst, N))
        return out
    m = sigma * -1 if e is None else (e if compare(e, -sigma) > 0 else sigma * -1)
    lhs = lazy_sum([(1, m)], 1)
    rhs = lazy_sum([(-2, sigma)], 2)
    b3 = compare(sigma, 1) < 0 and compare(lhs, rhs) < 0
    out["B3"] = Verdict(HOLDS if b3 else FAILS, {"growth_exponent": m, "sigma": sigma,
                                                 "numerator_exp": lhs, "denominator_exp": rhs})
    if e is None:
        out["B4"] = Verdict(HOLDS, {"deriv_exp": None})
    else:
        ex = lazy_sum([(1, e), (1, sigma)], -1)
        out["B4"] = Verdict(HOLDS if compare(ex, 0) < 0 else FAILS, {"ratio_exponent": ex})
    return out


def _b_truncation(inst: SystemInstance, N: int) -> dict:
    if isinstance(inst.psi, ThetaPower):
        note = {"note": "accuracy depends on theta"}
        return {"B3": Verdict(INDET, dict(note)), "B4": Verdict(INDET, dict(note))}
    N = _table_len(inst.psi, N)
    limit = min(N, 2000)
    primes = _primes_upto(limit)
    psi = inst.psi.floats(np.arange(1, limit + 1))
    dsup = {int(p): inst.phi.sup_deriv(int(p), inst.J) for p in primes}

    def b3_ratio(M: int) -> float:
        ps = [p for p in primes if p <= M]
        num = sum(max(psi[p - 1], dsup[p]) * math.log(p) ** 2 for p in ps)
        den = sum(psi[p - 1] for p in ps) ** 2
        return num / den if den else math.inf

    r_half, r_full = b3_ratio(limit // 2), b3_ratio(limit)
    b4 = [dsup[p] / (p * psi[p - 1]) for p in primes]
    b4_half = max(b4[len(b4) // 2 :]) if b4 else 0.0
    b4_first = max(b4[: len(b4) // 2]) if b4 else 0.0
    return {
        "B3": Verdict(HOLDS_TRUNC if r_full < r_half else INDET, {"ratio_half": r_half, "ratio_full": r_full, "N": limit}),
        "B4": Verdict(HOLDS_TRUNC if b4_half < b4_first else INDET, {"max_first_half": b4_first, "max_second_half": b4_half}),
    }


def _c2(inst: SystemInstance) -> Verdict:
    rho = inst.rho
    if not rho.active:
        return Verdict(HOLDS, {"note": "no twist"})
    if isinstance(rho, PowerPhase) and not rho.theta_mode:
        return Verdict(HOLDS, {"note": "rho_n does not depend on theta"})
    if isinstance(rho, PowerPhase):
        sigma = _psi_exponent(inst.psi)
        if sigma is None:
            return Verdict(INDET, {"note": "no closed-form psi exponent"})
        j2 = inst.J[1]
        if compare(j2, rho.a) <= 0 or compare(j2, 1) >= 0:
            return Verdict(INDET, {"note": "J not inside (a, 1)"})
        need = lazy_sum([(1, t_map_real(rho.a, j2))], -1)
        return Verdict(HOLDS if compare(sigma, need) >= 0 else FAILS, {"sigma": sigma, "t_a(j2)-1": need})
    return Verdict(INDET, {})


def check_hypotheses(inst: SystemInstance, N_trunc: int = 1000) -> HypothesisReport:
    """Classify A1-A4, B1-B4 and C2 (C1 is an equidistribution question left to the weyl module)."""
    if N_trunc < 100:
        raise PreconditionError("N_trunc must be >= 100")
    verdicts = {}
    verdicts.update(_a_conditions(inst.psi, N_trunc))
    verdicts.update(_b_conditions(inst, N_trunc))
    verdicts["C2"] = _c2(inst)
    return HypothesisReport(verdicts, N_trunc)


# -- survey --------------------------------------------------------------------------------------


@dataclass
class SurveyReport:
    fraction: float | None
    hits: list
    thetas: list
    indeterminate: list
    samples: int
    n_max: int
    min_hits: int
    seed: int
    stratified: bool = False

    @property
    def determinate(self) -> int:
        return self.samples - len(self.indeterminate)

    def to_json(self) -> dict:
        return {
            "fraction": None if self.fraction is None else repr(self.fraction),
            "determinate": self.determinate,
            "samples": self.samples,
            "n_max": self.n_max,
            "min_hits": self.min_hits,
            "seed": self.seed,
            "stratified": self.stratified,
            "per_sample": [
                {"index": i, "theta": self.thetas[i], "hits": self.hits[i]} for i in range(self.samples)
            ],
            "indeterminate": self.indeterminate,
        }

    def rows(self) -> list[dict]:
        return [{"index": i, "theta": self.thetas[i], "hits": "" if self.hits[i] is None else self.hits[i],
                 "status": "indeterminate" if self.hits[i] is None else "ok"} for i in range(self.samples)]


def sample_theta(J, index: int, samples: int, seed: int, stratified: bool = False) -> ExactScalar:
    """The index-th survey point, from its own substream of the master seed."""
    rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(index,)))
    k = int(rng.integers(0, 1 << 52))
    u = Fraction(2 * k + 1, 1 << 53)
    if stratified:
        u = (index + u) / samples
    j1, j2 = (ExactScalar.of(x) for x in J)
    return j1 + (j2 - j1) * u


def survey_measure(
    inst: SystemInstance,
    samples: int,
    n_max: int,
    min_hits: int,
    seed: int,
    stratified: bool = False,
    jobs: int = 1,
    policy: PrecisionPolicy | None = None,
) -> SurveyReport:
    if samples < 1:
        raise PreconditionError("samples must be >= 1")
    if n_max < 1 or min_hits < 0:
        raise PreconditionError("need n_max >= 1 and min_hits >= 0")
    if not (0 <= seed < 1 << 64):
        raise PreconditionError("seed must be a 64-bit unsigned integer")
    thetas = [sample_theta(inst.J, i, samples, seed, stratified) for i in range(samples)]

    def one(theta):
        try:
            return len(solve_system(inst, theta, 1, n_max, policy=policy))
        except AmbiguousAtMaxPrecision:
            return None

    hits = pmap(one, thetas, jobs)
    indet = [i for i, h in enumerate(hits) if h is None]
    good = [h for h in hits if h is not None]
    fraction = (sum(1 for h in good if h >= min_hits) / len(good)) if good else None
    return SurveyReport(fraction, hits, [t.describe() for t in thetas], indet, samples, n_max, min_hits, seed, stratified)
