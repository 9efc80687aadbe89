"""Batch verification suites with machine-readable reports.

Subcommands:

verify      run selected checks over alpha/dimension/family grids
describe    print the statement, hypotheses and extremal family of a check
identities  residual summary for the derivative identities on random jets

Exit codes: 0 all verdicts pass, 1 at least one failure, 2 invalid
configuration.  With a fixed seed the report file is byte-identical between
runs: the only randomness is the seeded generator recorded in the header, and
rows are emitted in sorted key order.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import tempfile
from dataclasses import dataclass

import numpy as np

from . import __version__, inequalities as ineq, kernels
from .forms import GridConfig
from .jets import VectorJet
from .mappings import MappingFamily

DEFAULT_ALPHAS = (0.0, 0.1, 0.25, 0.4, 0.5 - 1e-6, 0.5, 0.75, 0.9)
DEFAULT_NS = (1, 2, 3)

ALL_CHECKS = (
    "lemma2.1", "lemma2.2", "lemma2.3", "lemma2.4", "lemma3.6", "lemma3.8",
    "thm2.1", "thm2.2", "cor2.2", "cor_e", "thm2.3", "cor2.3", "cor_f",
    "thm3.1", "thm3.2", "thm3.3", "cor3.3", "thm3.4", "thm3.5",
)

CATALOG = {
    "lemma2.1": {
        "title": "Coefficient cap for self-maps of the disk",
        "statement": "|a_n| <= 1 - |a_0|^2 for every n >= 1 when f maps the disk into itself",
        "hypotheses": "f holomorphic on the unit disk with f(D) inside D",
        "extremal": "f(z) = z attains equality at n = 1",
    },
    "lemma2.2": {
        "title": "Coefficient inequalities for the shifted Caratheodory class",
        "statement": ("(2.1) |b2 - b1^2/(2(1-a))| <= 2(1-a) - |b1|^2/(2(1-a)); "
                      "(2.2) |b3 - b1 b2/(1-a) + b1^3/(4(1-a)^2)| <= same right side; "
                      "(2.3) |b2| <= 2(1-a); (2.4) |b2 - b1^2/(1-a)| <= 2(1-a)"),
        "hypotheses": "p holomorphic on the disk, p(0) = 1, Re p >= a",
        "extremal": "omega(z) = unimodular * z gives equality in (2.1) and (2.2)",
    },
    "lemma2.3": {
        "title": "Derivative identities for the quasi-convexity operator",
        "statement": ("deg-2 block of g equals 2x the f block; deg-3 block equals "
                      "6*(f block) - 4*B(x, D^2f(0)(x^2)/2!) with B the quadratic bilinear form"),
        "hypotheses": "f normalized locally biholomorphic; g = (Df)^{-1}(D^2f(x^2) + Df x)",
        "extremal": "identities, exact for every normalized jet",
    },
    "lemma2.4": {
        "title": "Derivative identities for the starlikeness operator",
        "statement": ("deg-2: -1x; deg-3: -2x + 2 B(x, w2); deg-4: -3x + 3 L3(x^2, w2) "
                      "+ 4 B(x, w3) - 4 B(x, B(x, w2))"),
        "hypotheses": "f normalized locally biholomorphic; g = (Df)^{-1} f",
        "extremal": "identities, exact for every normalized jet",
    },
    "lemma3.6": {
        "title": "Polarization constant for quadratics on the max-norm polydisk",
        "statement": "||L|| = ||L^|| for n = 2; ||L|| <= (3/4) sqrt(3) ||L^|| for n >= 3",
        "hypotheses": "L the symmetric bilinear form of a quadratic on the polydisk",
        "extremal": "every n = 2 quadratic attains equality",
    },
    "lemma3.8": {
        "title": "Monotone cubic majorant of the fourth-block chain",
        "statement": ("h(x) = ((12a^2-10a+1)/(4(1-a)^2)) x^3 - x^2/(2(1-a)) + (5-7a) x + 2(1-a) "
                      "increases on [0, 2(1-a)] with max (1-a)(3-4a)(4-6a)"),
        "hypotheses": "a in [0, (37-sqrt(505))/72]",
        "extremal": "maximum attained at x = 2(1-a)",
    },
    "thm2.1": {
        "title": "Supporting-functional third-block bound, quasi-convex class",
        "statement": "|T_x(D^3f(0)(x^3)/3!) - (2/3) T_x(B(x, w2))| <= (1-a)/3 ||x||^3",
        "hypotheses": "f quasi-convex of type B and order a on the ball",
        "extremal": "coordinate function (1-(1-z)^(2a-1))/(2a-1) (-log(1-z) at a=1/2); sharp",
    },
    "thm2.2": {
        "title": "Norm third-block bound, quasi-convex class on the polydisk",
        "statement": "||D^3f(0)(x^3)/3! - (2/3) B(x, w2)|| <= (1-a)/3 ||x||^3",
        "hypotheses": "f quasi-convex of type B and order a on the polydisk",
        "extremal": "same coordinate function as thm2.1; sharp",
    },
    "cor2.2": {
        "title": "One-variable reduction of thm2.2",
        "statement": "|a3 - (2/3) a2^2| <= (1-a)/3 for convex functions of order a",
        "hypotheses": "f univalent convex of order a on the disk",
        "extremal": "(1-(1-z)^(2a-1))/(2a-1); sharp",
    },
    "cor_e": {
        "title": "Convex third-coefficient bound (order 0)",
        "statement": "|a3 - (2/3) a2^2| <= 1/3 for convex univalent functions",
        "hypotheses": "f univalent convex on the disk",
        "extremal": "z/(1-z); sharp",
    },
    "thm2.3": {
        "title": "Supporting-functional mixed bound, almost starlike class",
        "statement": ("|2 T_x(D^3f(0)(x^3)/3!)||x|| - 2 T_x(B(x, w2))||x|| "
                      "+ T_x(w2)^2/(1-a)| <= 2(1-a) ||x||^4"),
        "hypotheses": "f almost starlike of order a on the ball",
        "extremal": "coordinate function z/(1-(1-2a)z)^(2(1-a)/(1-2a)) (z e^z at a=1/2); sharp",
    },
    "cor2.3": {
        "title": "Order-0 specialization of thm2.3 (starlike maps)",
        "statement": "|2 T_x(D^3f(0)(x^3)/3!)||x|| - 2 T_x(B(x, w2))||x|| + T_x(w2)^2| <= 2||x||^4",
        "hypotheses": "f starlike on the ball",
        "extremal": "Koebe coordinate function z/(1-z)^2; sharp",
    },
    "cor_f": {
        "title": "Starlike second/third coefficient bound",
        "statement": "|2 a3 - a2^2| <= 2 for starlike univalent functions",
        "hypotheses": "f univalent starlike on the disk",
        "extremal": "Koebe function z/(1-z)^2; sharp",
    },
    "thm3.1": {
        "title": "Third-block sup bound, quasi-convex class",
        "statement": ("||D^3f(0)(z^3)||/3! <= (1-a)(3-2a)/3 ||z||^3 for n <= 2; "
                      "<= (1-a)((3/2)sqrt(3)(1-a) + 1)/3 ||z||^3 for n >= 3"),
        "hypotheses": "f quasi-convex of type B and order a on the polydisk",
        "extremal": "diagonal quasi-convex extremal; sharp for n = 2",
    },
    "thm3.2": {
        "title": "Third-block sup bound under the structured quadratic hypothesis",
        "statement": "||D^3f(0)(z^3)||/3! <= (1-a)(3-2a)/3 ||z||^3 for every n",
        "hypotheses": ("f quasi-convex of type B and order a, with "
                       "D^2f_k(0)(z^2)/2! = z_k (sum_l a_kl z_l)"),
        "extremal": "diagonal quasi-convex extremal; sharp",
    },
    "thm3.3": {
        "title": "Third-block sup bound, structured almost starlike maps",
        "statement": "||D^3f(0)(z^3)||/3! <= (1-a)(3-4a) ||z||^3",
        "hypotheses": "f almost starlike of order a <= 1/2 with structured quadratic block",
        "extremal": "diagonal almost-starlike extremal; sharp",
    },
    "cor3.3": {
        "title": "Refined row-sum bound for structured almost starlike maps",
        "statement": ("||D^3f(0)(z^3)||/3! <= (1 - a + ((1-2a)/(1-a)) M^2/2) ||z||^3 "
                      "<= (1-a)(3-4a) ||z||^3, M the max absolute row sum"),
        "hypotheses": "as thm3.3",
        "extremal": "diagonal almost-starlike extremal with M = 2(1-a); sharp",
    },
    "thm3.4": {
        "title": "Unconditional third-block sup bound, almost starlike maps",
        "statement": ("||D^3f(0)(z^3)||/3! <= (1-a)(5-4a) ||z||^3 for n = 2; "
                      "<= (1-a)(3 sqrt(3) + 1 - 3 sqrt(3) a) ||z||^3 for n >= 3"),
        "hypotheses": "f almost starlike of order a on the polydisk",
        "extremal": "none claimed",
    },
    "thm3.5": {
        "title": "Fourth-block sup bound for diagonal low blocks",
        "statement": "||D^4f(0)(z^4)||/4! <= (1-a)(3-4a)(4-6a)/3 ||z||^4",
        "hypotheses": ("f almost starlike of order a <= (37-sqrt(505))/72 with "
                       "D^2f_k(0)(z^2)/2! = a_k z_k^2 and D^3f_k(0)(z^3)/3! = b_k z_k^3"),
        "extremal": "diagonal almost-starlike extremal; sharp",
    },
}

_QUASI_CHECKS = {"thm2.1", "thm2.2", "cor2.2", "cor_e", "thm3.1", "thm3.2"}
_STAR_CHECKS = {"thm2.3", "cor2.3", "cor_f", "thm3.3", "cor3.3", "thm3.4", "thm3.5"}


@dataclass(frozen=True)
class SuiteConfig:
    """Everything that determines a suite run; same config => identical report."""

    theorems: tuple[str, ...] = ("all",)
    alphas: tuple[float, ...] = DEFAULT_ALPHAS
    ns: tuple[int, ...] = DEFAULT_NS
    family: str = "extremal"
    resolution: int | None = None
    refine: int = 40
    seed: int = 0
    tol: float = 1e-6
    out: str = "report.jsonl"
    fmt: str = "report"
    lemma22_samples: int = 2000
    identity_samples: int = 200
    polarization_samples: int = 50

    def checks(self):
        if "all" in self.theorems:
            return ALL_CHECKS
        return self.theorems

    def grid(self):
        return GridConfig(resolution=self.resolution, refine_steps=self.refine)

    def validate(self):
        for t in self.checks():
            if t not in ALL_CHECKS:
                raise ValueError(f"unknown check id {t!r}")
        for a in self.alphas:
            if not 0.0 <= a < 1.0:
                raise ValueError(f"alpha must lie in [0, 1), got {a}")
        for n in self.ns:
            if n < 1:
                raise ValueError(f"dimension must be >= 1, got {n}")
        if self.fmt not in ("report", "csv"):
            raise ValueError(f"unknown format {self.fmt!r}")
        if self.refine < 1:
            raise ValueError("refinement depth must be >= 1")


def _family_for(check_id, name, alpha, n, seed):
    if name == "extremal":
        if check_id in _QUASI_CHECKS:
            return MappingFamily.quasi_convex_extremal(alpha, n)
        if check_id in _STAR_CHECKS:
            return MappingFamily.almost_starlike_extremal(alpha, n)
        return MappingFamily.identity(n)
    if name == "identity":
        return MappingFamily.identity(n)
    if name == "quasi_convex_extremal":
        return MappingFamily.quasi_convex_extremal(alpha, n)
    if name == "almost_starlike_extremal":
        return MappingFamily.almost_starlike_extremal(alpha, n)
    if name.startswith("user_jet:"):
        jet = VectorJet.from_file(name.split(":", 1)[1], normalized=True)
        return MappingFamily.from_jet(jet)
    raise ValueError(f"unknown family selector {name!r}")


def _alpha_grid_for(check_id, alphas):
    if check_id in ("lemma2.1", "lemma2.3", "lemma2.4", "lemma3.6"):
        return (None,)
    if check_id in ("cor_e", "cor2.3", "cor_f"):
        return (0.0,)
    if check_id in ("thm3.3", "cor3.3"):
        return tuple(a for a in alphas if a <= 0.5)
    if check_id in ("thm3.5", "lemma3.8"):
        return tuple(a for a in alphas if a <= ineq.ALPHA_STAR_MAX)
    return alphas


def _n_grid_for(check_id, ns):
    if check_id in ("lemma2.1", "lemma2.2", "lemma3.8", "cor2.2", "cor_e", "cor_f"):
        return (1,)
    if check_id == "lemma3.6":
        return tuple(n for n in ns if n >= 2)
    return ns


def build_tasks(cfg):
    tasks = []
    for check_id in cfg.checks():
        for alpha in _alpha_grid_for(check_id, cfg.alphas):
            for n in _n_grid_for(check_id, cfg.ns):
                tasks.append((check_id, alpha, n))
    tasks.sort(key=lambda t: (t[0], -1.0 if t[1] is None else t[1], t[2]))
    return tasks


def _run_task(task, cfg, index):
    check_id, alpha, n = task
    rng = np.random.default_rng([cfg.seed, index])
    grid = cfg.grid()
    if check_id == "lemma2.1":
        worst = None
        for _ in range(500):
            rep = ineq.verify_lemma21(ineq.random_bounded_coefficients(rng))
            if worst is None or rep.margin < worst.margin:
                worst = rep
        worst.samples = 500
        return worst
    if check_id == "lemma2.2":
        worst = None
        eq21 = eq22 = False
        count = cfg.lemma22_samples
        for i in range(count):
            if i == 0:
                p = ineq.schwarz_to_caratheodory(ineq.BlaschkeSchwarz(), alpha)
            else:
                p = ineq.random_caratheodory(rng, alpha)
            rep = ineq.verify_lemma22(p)
            eq21 = eq21 or rep.details["equality_21"]
            eq22 = eq22 or rep.details["equality_22"]
            if worst is None or rep.margin < worst.margin:
                worst = rep
        worst.samples = count
        worst.details["equality_21"] = eq21
        worst.details["equality_22"] = eq22
        return worst
    if check_id in ("lemma2.3", "lemma2.4"):
        return ineq.verify_identities(check_id, n, cfg.identity_samples, rng)
    if check_id == "lemma3.6":
        return ineq.verify_polarization(n, cfg.polarization_samples, rng, grid)
    if check_id == "lemma3.8":
        return ineq.verify_lemma38(alpha)
    family = _family_for(check_id, cfg.family, alpha, n, cfg.seed)
    try:
        if check_id == "thm2.1":
            return ineq.verify_thm21(family, alpha, grid, rng, tol=cfg.tol)
        if check_id in ("thm2.2", "cor2.2", "cor_e"):
            rep = ineq.verify_thm22_cor22(family, alpha, grid, tol=cfg.tol)
            rep.check_id = check_id
            return rep
        if check_id in ("thm2.3", "cor2.3", "cor_f"):
            rep = ineq.verify_thm23(family, alpha, grid, rng, tol=cfg.tol)
            rep.check_id = check_id
            return rep
        if check_id == "thm3.1":
            return ineq.verify_thm31(family, alpha, grid, tol=cfg.tol)
        if check_id == "thm3.2":
            return ineq.verify_thm32(family, alpha, grid, rng, tol=cfg.tol)
        if check_id in ("thm3.3", "cor3.3"):
            rep = ineq.verify_thm33_cor33(family, alpha, grid, tol=cfg.tol)
            rep.check_id = check_id
            return rep
        if check_id == "thm3.4":
            return ineq.verify_thm34(family, alpha, grid, tol=cfg.tol)
        if check_id == "thm3.5":
            return ineq.verify_thm35(family, alpha, grid, tol=cfg.tol)
    except ineq.HypothesisError as exc:
        cert = exc.certificate.to_dict() if exc.certificate else {}
        return ineq.CheckReport(check_id, family.label(), alpha, n, math.nan,
                                math.nan, -math.inf, None, 0, "fail",
                                {"error": str(exc), "certificate": cert})
    raise ValueError(f"unknown check id {check_id!r}")


def _json_default(obj):
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    raise TypeError(f"not serializable: {type(obj)}")


def render_report(cfg, reports):
    lines = []
    header = {
        "kind": "header",
        "tool": "polyjet",
        "version": __version__,
        "backend": kernels.BACKEND,
        "seed": cfg.seed,
        "theorems": list(cfg.checks()),
        "alphas": list(cfg.alphas),
        "ns": list(cfg.ns),
        "family": cfg.family,
        "grid": cfg.resolution,
        "refine": cfg.refine,
        "tol": cfg.tol,
    }
    lines.append(json.dumps(header, default=_json_default))
    passed = failed = 0
    for rep in reports:
        if rep.passed:
            passed += 1
        else:
            failed += 1
        lines.append(json.dumps({"kind": "check", **rep.row()}, default=_json_default))
    summary = {"kind": "summary", "total": len(reports), "pass": passed, "fail": failed}
    lines.append(json.dumps(summary, default=_json_default))
    return "\n".join(lines) + "\n"


_CSV_FIELDS = ("id", "family", "alpha", "n", "left", "bound", "margin",
               "sharp_gap", "samples", "verdict")


def render_csv(cfg, reports):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(_CSV_FIELDS)
    for rep in reports:
        row = rep.row()
        writer.writerow([row[f] if row[f] is not None else "" for f in _CSV_FIELDS])
    return buf.getvalue()


def write_atomic(path, text):
    directory = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".polyjet-")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def run_suite(cfg):
    """Execute every selected check; returns (exit status, rendered report, reports)."""
    cfg.validate()
    tasks = build_tasks(cfg)
    reports = [_run_task(task, cfg, i) for i, task in enumerate(tasks)]
    text = render_report(cfg, reports) if cfg.fmt == "report" else render_csv(cfg, reports)
    write_atomic(cfg.out, text)
    status = 0 if all(r.passed for r in reports) else 1
    return status, text, reports


def describe(check_id):
    """Human-readable statement of one catalog check."""
    if check_id not in CATALOG:
        raise KeyError(check_id)
    entry = CATALOG[check_id]
    return (f"{check_id}: {entry['title']}\n"
            f"  statement:  {entry['statement']}\n"
            f"  hypotheses: {entry['hypotheses']}\n"
            f"  extremal:   {entry['extremal']}\n")


def _parse_list(text, conv):
    return tuple(conv(x) for x in text.split(",") if x != "")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="polyjet",
        description="verify sharp homogeneous-expansion inequalities on the polydisk")
    sub = parser.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="run a verification suite")
    v.add_argument("--theorem", default="all",
                   help="comma list of check ids, or 'all'")
    v.add_argument("--alpha", default=None,
                   help="comma list of orders in [0, 1)")
    v.add_argument("--n", default=None, help="comma list of dimensions")
    v.add_argument("--family", default="extremal",
                   help="extremal | identity | quasi_convex_extremal | "
                        "almost_starlike_extremal | user_jet:PATH")
    v.add_argument("--grid", type=int, default=None, help="phase samples per variable")
    v.add_argument("--refine", type=int, default=40, help="golden-section steps per coordinate")
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--tol", type=float, default=1e-6, help="one-sided bound tolerance")
    v.add_argument("--out", default="report.jsonl")
    v.add_argument("--format", choices=("report", "csv"), default="report")

    d = sub.add_parser("describe", help="print the statement behind a check id")
    d.add_argument("id")

    i = sub.add_parser("identities", help="derivative-identity residual summary")
    i.add_argument("--samples", type=int, default=1000)
    i.add_argument("--n", default="1,2,3")
    i.add_argument("--seed", type=int, default=0)
    i.add_argument("--out", default="identities.jsonl")
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "describe":
        try:
            sys.stdout.write(describe(args.id))
        except KeyError:
            print(f"unknown check id {args.id!r}; known ids: {', '.join(ALL_CHECKS)}",
                  file=sys.stderr)
            return 2
        return 0
    if args.command == "identities":
        try:
            ns = _parse_list(args.n, int)
            cfg = SuiteConfig(theorems=("lemma2.3", "lemma2.4"), ns=ns,
                              seed=args.seed, out=args.out,
                              identity_samples=args.samples)
            cfg.validate()
        except ValueError as exc:
            print(f"invalid configuration: {exc}", file=sys.stderr)
            return 2
        status, _, reports = run_suite(cfg)
        for rep in reports:
            print(f"{rep.check_id} n={rep.n}: max residual {rep.left:.3e} "
                  f"over {rep.samples} jets -> {rep.verdict}")
        return status
    # verify
    try:
        cfg = SuiteConfig(
            theorems=_parse_list(args.theorem, str),
            alphas=_parse_list(args.alpha, float) if args.alpha else DEFAULT_ALPHAS,
            ns=_parse_list(args.n, int) if args.n else DEFAULT_NS,
            family=args.family,
            resolution=args.grid,
            refine=args.refine,
            seed=args.seed,
            tol=args.tol,
            out=args.out,
            fmt=args.format,
        )
        cfg.validate()
    except ValueError as exc:
        print(f"invalid configuration: {exc}", file=sys.stderr)
        return 2
    try:
        status, _, reports = run_suite(cfg)
    except (ValueError, OSError) as exc:
        print(f"invalid configuration: {exc}", file=sys.stderr)
        return 2
    npass = sum(1 for r in reports if r.passed)
    print(f"polyjet: {npass} pass, {len(reports) - npass} fail -> {cfg.out}")
    return status


if __name__ == "__main__":
    sys.exit(main())
