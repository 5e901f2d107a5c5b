"""Command line entry point: one subcommand per experiment, seeded and machine readable.

Exit codes: 0 success, 2 invalid input, 3 undecidable at the precision cap,
1 anything else (a violated guaranteed bound is an implementation bug).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import re
import sys
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import ARTIFACT, __version__
from .errors import AmbiguousAtMaxPrecision, DiophError, ParseError, PreconditionError, ValidationError
from .numeric import ExactScalar, PrecisionPolicy
from .numeric.ops import DEFAULT_MAX_BITS, DEFAULT_START_BITS, ENV_PRECISION

EXIT_OK, EXIT_ERROR, EXIT_INVALID, EXIT_AMBIGUOUS = 0, 1, 2, 3

GENERAL_KEYS = ("seed", "precision_bits", "format", "output", "jobs")


# -- option tables -------------------------------------------------------------------------


@dataclass(frozen=True)
class Opt:
    name: str  # flag without dashes, e.g. "n-max"
    kind: type = str  # str (exact scalar text or spec), int, bool
    default: object = None
    help: str = ""
    required: bool = False

    @property
    def key(self) -> str:
        return self.name.replace("-", "_")


SYSTEM_OPTS = [
    Opt("psi", help="accuracy family, e.g. power:0.1,0.5", required=True),
    Opt("phi", default="zero", help="perturbation family, e.g. sin:1/3,1/6"),
    Opt("rho", default="none", help="twist family, e.g. power:1,3/2"),
    Opt("J", default="0,1", help="theta interval lo,hi"),
    Opt("I", default="0,1", help="twist target [lo,hi)"),
]

SUBCOMMANDS: dict[str, tuple[str, list[Opt]]] = {
    "solve": ("solutions n of one system at a given theta", SYSTEM_OPTS + [
        Opt("theta", required=True, help="exact theta, e.g. 1/2 or 0.618034"),
        Opt("n-min", int, 1),
        Opt("n-max", int, required=True),
        Opt("max-solutions", int),
        Opt("primes-only", bool, False),
    ]),
    "survey": ("fraction of sampled theta with at least min-hits solutions", SYSTEM_OPTS + [
        Opt("samples", int, 100),
        Opt("n-max", int, required=True),
        Opt("min-hits", int, 1),
        Opt("stratified", bool, False),
    ]),
    "hypotheses": ("classify the growth conditions of a system", SYSTEM_OPTS + [
        Opt("n-trunc", int, 1000),
    ]),
    "lattice-count": ("exact count of lattice solutions, optionally perturbed", [
        Opt("p", int, required=True),
        Opt("Q", int, required=True),
        Opt("L", required=True, help="real bound >= 1"),
        Opt("J", default="0,1"),
        Opt("qset", default="all", help="all | 17,19 | range:a-b | random:k"),
        Opt("phi", help="perturbation family; omit for the unperturbed count"),
        Opt("oracle", bool, False, help="also run the exhaustive oracle"),
        Opt("congruence", bool, False, help="count through residues instead of the closed form"),
    ]),
    "discrepancy": ("count {alpha l} in J and check the explicit bound", [
        Opt("alpha", required=True),
        Opt("L", int, required=True),
        Opt("J", required=True),
        Opt("H", int, help="single H"),
        Opt("H-max", int, help="every admissible H up to this"),
        Opt("h-paper", bool, False, help="use H = floor(1/length(J))"),
    ]),
    "weyl": ("equidistribution statistics of the c1 sequence family", [
        Opt("family", default="c1"),
        Opt("a", required=True),
        Opt("gamma", default="1"),
        Opt("phi", default="zero"),
        Opt("n", int, required=True),
        Opt("J", required=True),
        Opt("b-range", default="-3,3", help="inclusive lo,hi; b = 0 skipped"),
        Opt("intervals", default="", help="lo,hi;lo,hi;..."),
        Opt("vdc-h", int, help="also report the lag-h differenced sample"),
    ]),
    "ps-scan": ("pairs on y = (a1 x + b2)/a2 in PS(alpha)", [
        Opt("a1", int, required=True),
        Opt("a2", int, required=True),
        Opt("b2", int, 0),
        Opt("alpha", help="one or more exact alphas, comma separated"),
        Opt("alpha-range", help="lo,hi,count seeded uniform draws"),
        Opt("n-max", int, required=True),
        Opt("cap", int),
    ]),
    "ps-quotients": ("quotient sets of PS(alpha) with bounded height", [
        Opt("alpha"),
        Opt("alpha-range"),
        Opt("n-floor", int, 1),
        Opt("n-max", int, required=True),
        Opt("height", int, 3),
    ]),
    "ps-check": ("audit the congruence reduction against direct membership", [
        Opt("a1", int, required=True),
        Opt("a2", int, required=True),
        Opt("b2", int, 0),
        Opt("alpha"),
        Opt("alpha-range"),
        Opt("n-max", int, required=True),
    ]),
}


# -- configuration -------------------------------------------------------------------------


@dataclass
class RunConfig:
    subcommand: str
    params: dict = field(default_factory=dict)
    seed: int = 0
    precision_bits: int | None = None  # cap of the precision ladder
    format: str = "json"
    output: str | None = None
    jobs: int = 1

    @property
    def cap_bits(self) -> int:
        if self.precision_bits is not None:
            return self.precision_bits
        raw = os.environ.get(ENV_PRECISION)
        if raw:
            try:
                return int(raw)
            except ValueError:
                raise ParseError(f"{ENV_PRECISION}={raw!r} is not an integer") from None
        return DEFAULT_MAX_BITS

    def policy(self) -> PrecisionPolicy:
        cap = self.cap_bits
        return PrecisionPolicy(min(DEFAULT_START_BITS, cap), cap)

    def echo(self) -> dict:
        # jobs is deliberately absent: output must not depend on the worker count
        return {
            "subcommand": self.subcommand,
            "params": dict(sorted(self.params.items())),
            "seed": self.seed,
            "precision_start_bits": min(DEFAULT_START_BITS, self.cap_bits),
            "precision_bits": self.cap_bits,
            "format": self.format,
        }


def _coerce(opt: Opt, value, problems: list, where: str):
    try:
        if opt.kind is bool:
            if isinstance(value, bool):
                return value
            raise ValueError("expected true/false")
        if opt.kind is int:
            if isinstance(value, bool) or isinstance(value, float):
                raise ValueError("expected an integer")
            return int(value)
        if isinstance(value, (int, str)) and not isinstance(value, bool):
            return str(value)
        raise ValueError("expected a string")
    except (TypeError, ValueError) as e:
        problems.append(f"{where} {opt.key}: {e}")
        return None


def _validate_general(doc: dict, problems: list) -> dict:
    out = {}
    if "seed" in doc:
        s = doc["seed"]
        if isinstance(s, bool) or not isinstance(s, int) or not (0 <= s < 1 << 64):
            problems.append("seed: must be an integer in [0, 2^64)")
        else:
            out["seed"] = s
    if "precision_bits" in doc:
        b = doc["precision_bits"]
        if isinstance(b, bool) or not isinstance(b, int) or b < 16:
            problems.append("precision_bits: must be an integer >= 16")
        else:
            out["precision_bits"] = b
    if "format" in doc:
        if doc["format"] not in ("json", "csv"):
            problems.append("format: must be json or csv")
        else:
            out["format"] = doc["format"]
    if "output" in doc:
        if doc["output"] is not None and not isinstance(doc["output"], str):
            problems.append("output: must be a path string")
        else:
            out["output"] = doc["output"]
    if "jobs" in doc:
        j = doc["jobs"]
        if isinstance(j, bool) or not isinstance(j, int) or j < 1:
            problems.append("jobs: must be a positive integer")
        else:
            out["jobs"] = j
    return out


def load_config(path: str, subcommand: str | None = None) -> RunConfig:
    """Read a flat JSON config; every invalid field is reported in one ValidationError."""
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as e:
        raise ParseError(f"cannot read config {path}: {e}") from None
    except json.JSONDecodeError as e:
        raise ParseError(f"config {path} is not valid JSON: {e}") from None
    return config_from_dict(doc, subcommand)


def config_from_dict(doc: dict, subcommand: str | None = None) -> RunConfig:
    if not isinstance(doc, dict):
        raise ParseError("config must be a JSON object")
    problems: list[str] = []
    sub = doc.get("subcommand", subcommand)
    if subcommand is not None and sub != subcommand:
        problems.append(f"subcommand: file says {sub!r} but {subcommand!r} was requested")
        sub = subcommand
    if sub not in SUBCOMMANDS:
        raise ValidationError(problems + [f"subcommand: unknown {sub!r}"])
    opts = {o.key: o for o in SUBCOMMANDS[sub][1]}
    general = _validate_general(doc, problems)
    params = {}
    for k, v in doc.items():
        if k == "subcommand" or k in GENERAL_KEYS:
            continue
        if k not in opts:
            problems.append(f"unknown key {k!r}")
            continue
        params[k] = _coerce(opts[k], v, problems, "config")
    if problems:
        raise ValidationError(problems)
    return RunConfig(sub, params, **general)


# -- argv handling ----------------------------------------------------------------------------


_NEG_VALUE = re.compile(r"^-[\d.]")


def preprocess_argv(argv: list[str]) -> list[str]:
    """Glue values that start with a minus sign to their flag (``--J -0.1,0.4`` -> ``--J=-0.1,0.4``)."""
    out = []
    i = 0
    while i < len(argv):
        tok = argv[i]
        if tok.startswith("--") and "=" not in tok and i + 1 < len(argv) and _NEG_VALUE.match(argv[i + 1]):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
            continue
        out.append(tok)
        i += 1
    return out


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ParseError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="dioph", description="Perturbed Diophantine approximation experiments")
    parser.add_argument("--version", action="version", version=f"{ARTIFACT} {__version__}")
    subs = parser.add_subparsers(dest="subcommand", required=True, parser_class=_Parser)
    for name, (desc, opts) in SUBCOMMANDS.items():
        p = subs.add_parser(name, help=desc, description=desc, argument_default=argparse.SUPPRESS)
        p.add_argument("--config", help="JSON file of defaults; flags override it")
        p.add_argument("--seed", type=int)
        p.add_argument("--precision-bits", type=int, help=f"precision cap in bits (env {ENV_PRECISION})")
        p.add_argument("--format", choices=("json", "csv"))
        p.add_argument("--output", help="write here instead of standard output")
        p.add_argument("--jobs", type=int, help="worker processes")
        for o in opts:
            flag = f"--{o.name}"
            if o.kind is bool:
                p.add_argument(flag, dest=o.key, action="store_true", help=o.help)
            else:
                p.add_argument(flag, dest=o.key, type=o.kind, help=o.help)
    return parser


def resolve_config(argv: list[str]) -> RunConfig:
    ns = vars(build_parser().parse_args(preprocess_argv(argv)))
    sub = ns.pop("subcommand")
    cfg = load_config(ns.pop("config"), sub) if "config" in ns else RunConfig(sub)
    problems: list[str] = []
    general = _validate_general({k: ns.pop(k) for k in GENERAL_KEYS if k in ns}, problems)
    for k, v in general.items():
        setattr(cfg, k, v)
    opts = SUBCOMMANDS[sub][1]
    params = {o.key: o.default for o in opts if o.default is not None}
    params.update({k: v for k, v in cfg.params.items() if v is not None})
    params.update(ns)
    for o in opts:
        if o.required and params.get(o.key) is None:
            problems.append(f"missing required --{o.name}")
    if problems:
        raise ValidationError(problems)
    cfg.params = params
    return cfg


# -- parsing helpers --------------------------------------------------------------------------


def _pair(text: str, what: str) -> tuple[ExactScalar, ExactScalar]:
    parts = [s.strip() for s in str(text).split(",")]
    if len(parts) != 2:
        raise ParseError(f"{what} must be lo,hi; got {text!r}")
    return ExactScalar.of(parts[0]), ExactScalar.of(parts[1])


def _intervals(text: str) -> list[tuple[float, float]]:
    if not text:
        return []
    out = []
    for chunk in text.split(";"):
        lo, hi = _pair(chunk, "interval")
        out.append((float(lo), float(hi)))
    return out


def _int_range(text: str) -> list[int]:
    parts = str(text).split(",")
    if len(parts) != 2:
        raise ParseError(f"b-range must be lo,hi; got {text!r}")
    lo, hi = int(parts[0]), int(parts[1])
    if lo > hi:
        raise ParseError("b-range needs lo <= hi")
    bs = [b for b in range(lo, hi + 1) if b != 0]
    if not bs:
        raise ParseError("b-range contains no nonzero b")
    return bs


def parse_qset(spec: str, p: int, Q: int, seed: int) -> list[int]:
    band = [q for q in range(Q, 2 * Q) if q % p]
    spec = str(spec).strip()
    if spec == "all":
        return band
    if spec.startswith("range:"):
        try:
            a, b = (int(x) for x in spec[6:].split("-"))
        except ValueError:
            raise ParseError(f"bad qset range {spec!r}") from None
        return [q for q in range(a, b + 1)]
    if spec.startswith("random:"):
        try:
            k = int(spec[7:])
        except ValueError:
            raise ParseError(f"bad qset {spec!r}") from None
        if not (0 <= k <= len(band)):
            raise PreconditionError(f"random:{k} exceeds the {len(band)} admissible q")
        rng = np.random.default_rng(np.random.SeedSequence(seed))
        return sorted(int(x) for x in rng.choice(band, size=k, replace=False))
    try:
        return [int(x) for x in spec.split(",") if x.strip()]
    except ValueError:
        raise ParseError(f"bad qset {spec!r}") from None


def _alphas(params: dict, seed: int) -> list[ExactScalar]:
    from .ps import sample_alphas

    out = []
    if params.get("alpha"):
        out += [ExactScalar.of(x.strip()) for x in str(params["alpha"]).split(",")]
    if params.get("alpha_range"):
        parts = str(params["alpha_range"]).split(",")
        if len(parts) != 3:
            raise ParseError("alpha-range must be lo,hi,count")
        out += sample_alphas(parts[0], parts[1], int(parts[2]), seed)
    if not out:
        raise ValidationError(["give --alpha or --alpha-range"])
    return out


def _fraction_text(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


# -- subcommand bodies ------------------------------------------------------------------------
# each returns (json result, csv rows)


def _instance(params: dict):
    from .families import parse_phi, parse_psi, parse_rho
    from .systems import SystemInstance

    return SystemInstance(
        J=_pair(params["J"], "J"),
        psi=parse_psi(params["psi"]),
        phi=parse_phi(params["phi"]),
        rho=parse_rho(params["rho"]),
        I=_pair(params["I"], "I"),
    )


def cmd_solve(cfg: RunConfig):
    from .systems import solve_system

    p = cfg.params
    inst = _instance(p)
    recs = solve_system(inst, p["theta"], p["n_min"], p["n_max"], p.get("max_solutions"), p["primes_only"],
                        cfg.policy())
    result = {"instance": inst.to_json(), "theta": ExactScalar.of(p["theta"]).describe(),
              "count": len(recs), "solutions": [r.to_json() for r in recs]}
    return result, [r.to_json() for r in recs]


def cmd_survey(cfg: RunConfig):
    from .systems import survey_measure

    p = cfg.params
    inst = _instance(p)
    rep = survey_measure(inst, p["samples"], p["n_max"], p["min_hits"], cfg.seed, p["stratified"], cfg.jobs,
                         cfg.policy())
    return {"instance": inst.to_json(), **rep.to_json()}, rep.rows()


def cmd_hypotheses(cfg: RunConfig):
    from .systems import check_hypotheses

    inst = _instance(cfg.params)
    rep = check_hypotheses(inst, cfg.params["n_trunc"])
    doc = rep.to_json()
    rows = [{"condition": k, "verdict": v["verdict"]} for k, v in doc["conditions"].items()]
    return {"instance": inst.to_json(), **doc}, rows


def cmd_lattice(cfg: RunConfig):
    from .families import parse_phi
    from .lattice import (LatticeQuery, count_basic, count_basic_oracle, count_perturbed,
                          count_perturbed_oracle)

    p = cfg.params
    qs = parse_qset(p["qset"], p["p"], p["Q"], cfg.seed)
    phi = parse_phi(p["phi"]) if p.get("phi") else None
    q = LatticeQuery(p["p"], p["Q"], tuple(qs), ExactScalar.of(p["L"]), _pair(p["J"], "J"), phi)
    if phi is None:
        rep = count_basic(q, congruence=p["congruence"])
        oracle = count_basic_oracle(q) if p["oracle"] else None
    else:
        rep = count_perturbed(q, cfg.policy(), cfg.jobs)
        oracle = count_perturbed_oracle(q, policy=cfg.policy()) if p["oracle"] else None
    result = {"query": q.to_json(), "report": rep.to_json(), "oracle": oracle,
              "oracle_agrees": None if oracle is None else oracle == rep.count}
    row = {**rep.to_json(), "oracle": "" if oracle is None else oracle}
    return result, [row]


def cmd_discrepancy(cfg: RunConfig):
    from .discrepancy import count_in_interval, erdos_turan_bound, h_from_length, verify_lemma

    p = cfg.params
    alpha = ExactScalar.of(p["alpha"])
    J = _pair(p["J"], "J")
    chosen = [k for k in ("H", "H_max") if p.get(k) is not None] + (["h_paper"] if p["h_paper"] else [])
    if len(chosen) != 1:
        raise ValidationError(["give exactly one of --H, --H-max, --h-paper"])
    pol = cfg.policy()
    if p.get("H_max") is not None:
        reps = verify_lemma(alpha, p["L"], J, p["H_max"], pol)
    else:
        H = p["H"] if p.get("H") is not None else h_from_length(J)
        reps = [erdos_turan_bound(alpha, p["L"], J, H, pol)]
    count = reps[0].count if reps else count_in_interval(alpha, p["L"], J, pol)
    result = {"alpha": alpha.describe(), "L": p["L"], "J": [J[0].describe(), J[1].describe()], "count": count,
              "reports": [r.to_json() for r in reps], "violated": any(r.violated for r in reps)}
    return result, [r.row() for r in reps]


def cmd_weyl(cfg: RunConfig):
    from .families import parse_phi
    from .weyl import c1_generator, equid_report, sequence_c1, star_discrepancy, vdc_difference, weyl_sum

    p = cfg.params
    if p["family"] != "c1":
        raise ValidationError([f"family: only c1 is available, got {p['family']!r}"])
    J = _pair(p["J"], "J")
    phi = parse_phi(p["phi"])
    pol = cfg.policy()
    sample = sequence_c1(p["a"], p["gamma"], phi, p["n"], J, pol, cfg.jobs)
    bs = _int_range(p["b_range"])
    sums = {str(b): repr(weyl_sum(sample, b)) for b in bs}
    ivs = equid_report(sample, _intervals(p["intervals"]))
    result = {"source": sample.source, "N": sample.N, "star_discrepancy": repr(star_discrepancy(sample)),
              "weyl_sums": sums, "intervals": [s.to_json() for s in ivs]}
    rows = [{"statistic": "star_discrepancy", "key": "", "value": result["star_discrepancy"]}]
    rows += [{"statistic": "weyl_sum", "key": b, "value": v} for b, v in sums.items()]
    rows += [{"statistic": "deviation", "key": f"{s.lo!r},{s.hi!r}", "value": repr(s.deviation)} for s in ivs]
    if p.get("vdc_h") is not None:
        gen = c1_generator(p["a"], p["gamma"], phi, p["n"], J)
        d = vdc_difference(gen, gen.count, p["vdc_h"], pol)
        result["vdc"] = {"h": p["vdc_h"], "N": d.N, "star_discrepancy": repr(star_discrepancy(d)),
                         "weyl_sums": {str(b): repr(weyl_sum(d, b)) for b in bs}}
        rows.append({"statistic": "vdc_star_discrepancy", "key": p["vdc_h"], "value": result["vdc"]["star_discrepancy"]})
    return result, rows


def _equation(p: dict):
    from .ps import make_equation

    return make_equation(p["a1"], p["a2"], p["b2"])


def cmd_ps_scan(cfg: RunConfig):
    from .ps import solvability_scan

    p = cfg.params
    eq = _equation(p)
    rows = solvability_scan(eq, _alphas(p, cfg.seed), p["n_max"], p.get("cap"), cfg.policy(), cfg.jobs)
    result = {"equation": eq.to_json(), "n_max": p["n_max"], "rows": [r.to_json() for r in rows]}
    csv_rows = [{"alpha": r.alpha, "count": "" if r.count is None else r.count, "error": r.error or ""} for r in rows]
    return result, csv_rows


def cmd_ps_quotients(cfg: RunConfig):
    from .parallel import pmap
    from .ps import quotient_set

    p = cfg.params
    alphas = _alphas(p, cfg.seed)
    pol = cfg.policy()
    sets = pmap(lambda a: quotient_set(a, p["n_floor"], p["n_max"], p["height"], pol), alphas, cfg.jobs)
    rows = [{"alpha": a.describe(), "quotients": [_fraction_text(q) for q in s]} for a, s in zip(alphas, sets)]
    result = {"n_floor": p["n_floor"], "n_max": p["n_max"], "height": p["height"], "rows": rows}
    return result, [{"alpha": r["alpha"], "quotients": " ".join(r["quotients"])} for r in rows]


def cmd_ps_check(cfg: RunConfig):
    from .ps import oriented_equation, reduction_audit

    p = cfg.params
    eq = oriented_equation(_equation(p))
    audits = [reduction_audit(eq, a, p["n_max"], cfg.policy(), cfg.jobs) for a in _alphas(p, cfg.seed)]
    result = {"equation": eq.to_json(), "n_max": p["n_max"], "audits": [a.to_json() for a in audits],
              "mismatches": sum(len(a.mismatches) for a in audits)}
    rows = [{"alpha": a.alpha, "checked": a.checked, "skipped": a.skipped, "agree": a.agree,
             "mismatches": " ".join(map(str, a.mismatches))} for a in audits]
    return result, rows


COMMANDS = {
    "solve": cmd_solve,
    "survey": cmd_survey,
    "hypotheses": cmd_hypotheses,
    "lattice-count": cmd_lattice,
    "discrepancy": cmd_discrepancy,
    "weyl": cmd_weyl,
    "ps-scan": cmd_ps_scan,
    "ps-quotients": cmd_ps_quotients,
    "ps-check": cmd_ps_check,
}


# -- output --------------------------------------------------------------------------------


def render(cfg: RunConfig, result: dict, rows: list[dict]) -> str:
    if cfg.format == "csv":
        buf = io.StringIO()
        buf.write("# artifact: " + json.dumps({"name": ARTIFACT, "version": __version__}, sort_keys=True) + "\n")
        buf.write("# config: " + json.dumps(cfg.echo(), sort_keys=True) + "\n")
        fields = list(rows[0].keys()) if rows else []
        w = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n", quoting=csv.QUOTE_MINIMAL)
        if fields:
            w.writeheader()
            w.writerows(rows)
        return buf.getvalue()
    doc = {"artifact": ARTIFACT, "version": __version__, "config": cfg.echo(), "result": result}
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def run(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    if any(a in ("-h", "--help", "--version") for a in argv):
        try:
            build_parser().parse_args(preprocess_argv(argv))
        except SystemExit as e:
            return int(e.code or 0)
        except ParseError as e:
            print(f"dioph: error: {e}", file=sys.stderr)
            return EXIT_INVALID
    try:
        cfg = resolve_config(argv)
        result, rows = COMMANDS[cfg.subcommand](cfg)
        text = render(cfg, result, rows)
    except AmbiguousAtMaxPrecision as e:
        print(f"dioph: ambiguous: {e}", file=sys.stderr)
        return EXIT_AMBIGUOUS
    except ValidationError as e:
        for prob in e.problems:
            print(f"dioph: invalid: {prob}", file=sys.stderr)
        return EXIT_INVALID
    except PreconditionError as e:
        print(f"dioph: invalid: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_INVALID
    except DiophError as e:
        print(f"dioph: error: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_ERROR
    except (ValueError, ZeroDivisionError, OverflowError) as e:
        print(f"dioph: invalid: {e}", file=sys.stderr)
        return EXIT_INVALID
    if cfg.output:
        with open(cfg.output, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
