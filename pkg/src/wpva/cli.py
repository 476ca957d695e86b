"""Command-line front end: ``wpva {algebra,wgen,bracket,verify,hier}``.

Exit codes are 0 on success, 1 when a verification fails and 2 for usage or
resource errors.  ``--format json`` output is deterministic (sorted keys) and
carries a ``schema_version`` field.  The only environment variable consulted is
``WPVA_THREADS``, the worker count for the per-weight kernel solve.
"""
from __future__ import annotations

import argparse
import json
import random
import sys
from dataclasses import dataclass
from fractions import Fraction

from .coeffs import RatFunc, parse_ratfunc
from .diffpoly import DiffPoly, d, parse, random_diffpoly
from .liealg import (SimpleLieAlgebra, build_algebra, check_condition_F, default_y, grade,
                     parse_element, partition_triple, principal_triple, render_element, scan_y)
from .loopgeo import LoopContext, left_right_commutator_suite, verify_dual_frame_derivative, verify_screening_realization
from .pva import affine_pva, functional, local_bracket
from .screening import (ResourceLimitError, build_system, check_subalgebra, generators,
                        hamiltonians, joint_kernel)

SCHEMA_VERSION = 1
EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(ValueError):
    pass


@dataclass
class JobConfig:
    command: str
    type: str
    nilpotent: str = "principal"
    partition: tuple | None = None
    y: str = "default"
    scan_y: bool = False
    level: str = "k"
    weight_max: Fraction = Fraction(4)
    N: int = 3
    weights: tuple | None = None
    fmt: str = "text"
    seed: int = 0
    samples: int = 20
    suite: str | None = None
    left: str | None = None
    right: str | None = None
    pva: str = "affine"

    def validate(self) -> None:
        if self.weight_max < 0:
            raise UsageError("--weight-max must be >= 0")
        if self.N < 1:
            raise UsageError("--N must be >= 1")
        if self.samples < 0:
            raise UsageError("--samples must be >= 0")


# shared construction ------------------------------------------------------------

class Job:
    """Lazily built objects for one configuration."""

    def __init__(self, cfg: JobConfig):
        self.cfg = cfg
        try:
            self.alg = build_algebra(cfg.type)
        except (ValueError, KeyError) as exc:
            raise UsageError(f"unknown algebra type {cfg.type!r}: {exc}") from None
        try:
            self.level = parse_ratfunc(cfg.level)
        except ValueError as exc:
            raise UsageError(f"bad --level: {exc}") from None
        if self.level.is_zero():
            raise UsageError("--level must be nonzero")
        self._triple = None
        self._grading = None
        self._y = None

    @property
    def has_nilpotent(self) -> bool:
        return isinstance(self.alg, SimpleLieAlgebra) and self.cfg.nilpotent != "none"

    def _need_nilpotent(self):
        if not self.has_nilpotent:
            raise UsageError(f"{self.alg.type_label} has no nilpotent data (use a simple type)")

    @property
    def triple(self):
        if self._triple is None:
            self._need_nilpotent()
            if self.cfg.partition:
                try:
                    self._triple = partition_triple(self.alg, list(self.cfg.partition))
                except ValueError as exc:
                    raise UsageError(str(exc)) from None
            else:
                self._triple = principal_triple(self.alg)
        return self._triple

    @property
    def grading(self):
        if self._grading is None:
            self._grading = grade(self.alg, self.triple)
        return self._grading

    @property
    def y(self) -> dict:
        if self._y is None:
            alg, g = self.alg, self.grading
            if self.cfg.scan_y:
                found = scan_y(alg, self.triple, g)
                self._y = found if found is not None else {}
            elif self.cfg.y == "default":
                try:
                    self._y = default_y(alg, g)
                except ValueError as exc:
                    raise UsageError(str(exc)) from None
            else:
                try:
                    self._y = parse_element(alg, self.cfg.y)
                except ValueError as exc:
                    raise UsageError(f"bad --y: {exc}") from None
            bad = [i for i in self._y if g.degree_of[i] != g.depth]
            if bad:
                raise UsageError(f"--y must lie in g_{g.depth}; {alg.labels[bad[0]]} has degree "
                                 f"{g.degree_of[bad[0]]}")
        return self._y

    def system(self):
        return build_system(self.alg, self.triple, self.grading, self.level)

    def header(self) -> dict:
        out = {"type": self.alg.type_label, "level": self.level.render()}
        if self.has_nilpotent:
            out["nilpotent"] = (",".join(map(str, self.cfg.partition)) if self.cfg.partition
                                else "principal")
        return out


def _lab(alg, idx) -> list[str]:
    return [alg.labels[i] for i in idx]


def _weights_upto(wmax: Fraction, step: Fraction) -> list[Fraction]:
    out, w = [], Fraction(0)
    while w <= wmax:
        out.append(w)
        w += step
    return out


# commands ------------------------------------------------------------------------

def cmd_algebra(job: Job) -> tuple[dict, bool]:
    alg = job.alg
    rep = {**job.header(), "dim": alg.dim, "rank": alg.rank, "basis": list(alg.labels),
           "center_dim": len(alg.center())}
    if not job.has_nilpotent:
        return rep, True
    tr, g = job.triple, job.grading
    rep["triple"] = {"e": render_element(alg, tr.e), "h": render_element(alg, tr.h),
                     "f": render_element(alg, tr.f)}
    rep["depth"] = str(g.depth)
    rep["grading"] = {str(j): _lab(alg, idx) for j, idx in g.pieces.items()}
    rep["Pi"] = _lab(alg, g.Pi)
    rep["Pi_half"] = _lab(alg, g.Pi_half)
    rep["Pi_1"] = _lab(alg, g.Pi_1)
    y = job.y
    rep["y"] = render_element(alg, y)
    report = check_condition_F(alg, tr, g, y)
    rep["condition_F"] = report.to_json()
    return rep, True


def _kernel(job: Job):
    system = job.system()
    kb = joint_kernel(system, job.cfg.weight_max)
    return system, kb


def cmd_wgen(job: Job) -> tuple[dict, bool]:
    _, kb = _kernel(job)
    gens = generators(kb)
    rep = {**job.header(), "weight_max": str(job.cfg.weight_max),
           "kernel": {str(w): {"dim": len(ps), "basis": [p.render() for p in ps]}
                      for w, ps in kb.by_weight.items()},
           "generators": {str(w): [p.render() for p in ps] for w, ps in gens.items()},
           "bad_k": list(kb.bad_k)}
    return rep, True


def cmd_bracket(job: Job) -> tuple[dict, bool]:
    cfg = job.cfg
    if cfg.left is None or cfg.right is None:
        raise UsageError("bracket needs --left and --right")
    if cfg.pva == "affine":
        pva = affine_pva(job.alg, job.level)
    else:
        pva = job.system().pva
    try:
        a = parse(cfg.left, pva.variables)
        b = parse(cfg.right, pva.variables)
    except ValueError as exc:
        raise UsageError(f"cannot parse polynomial: {exc}") from None
    br = pva.bracket(a, b)
    rep = {**job.header(), "pva": pva.tag, "left": a.render(), "right": b.render(),
           "lambda_bracket": {str(n): c.render() for n, c in br.items()},
           "local_bracket": local_bracket(functional(a), functional(b), pva).render()}
    return rep, True


def _check(name, ok, **extra) -> dict:
    return {"identity": name, "pass": bool(ok), **extra}


def _verify_axioms(job: Job) -> list[dict]:
    checks = []
    pva = affine_pva(job.alg, job.level)
    skew, jac = pva.check()
    checks.append(_check(f"skew {pva.tag}", skew))
    checks.append(_check(f"jacobi {pva.tag}", jac))
    if not job.has_nilpotent:
        return checks
    system = job.system()
    skew, jac = system.pva.check()
    checks.append(_check(f"skew {system.pva.tag}", skew))
    checks.append(_check(f"jacobi {system.pva.tag}", jac))
    rng = random.Random(job.cfg.seed)
    samples = [system.pva.gen(v.name, n) for v in system.variables for n in range(2)]
    samples += [random_diffpoly(system.variables, 4, rng) for _ in range(job.cfg.samples)]
    bad = None
    for al in system.screening_indices:
        for p in samples:
            lhs = system.apply(al, d(p)) - d(system.apply(al, p))
            if lhs != system.commutator_rhs(al, p):
                bad = {"screening": job.alg.labels[al], "element": p.render()}
                break
        if bad:
            break
    checks.append(_check("screening commutator with d", bad is None, checked=len(samples),
                         seed=job.cfg.seed, counterexample=bad))
    return checks


def _verify_geometry(job: Job) -> list[dict]:
    if not job.grading.integral:
        raise UsageError("geometry checks need an integral grading")
    ctx = LoopContext(job.alg, job.triple, job.grading, job.y, job.cfg.N, job.level)
    results = [left_right_commutator_suite(ctx)] + verify_screening_realization(ctx, job.system()) + [verify_dual_frame_derivative(ctx)]
    return [r.to_json() for r in results]


def _hier_weights(job: Job) -> list[Fraction]:
    if job.cfg.weights:
        return sorted(set(job.cfg.weights))
    return [w for w in _weights_upto(job.cfg.weight_max, Fraction(1)) if w > 0]


def _hierarchy(job: Job):
    weights = _hier_weights(job)
    if not weights:
        raise UsageError("no positive hierarchy weights requested")
    system = job.system()
    kb = joint_kernel(system, max(weights))
    return kb, hamiltonians(kb, weights)


def _verify_hierarchy(job: Job) -> list[dict]:
    kb, hr = _hierarchy(job)
    sub_ok, witness = check_subalgebra(kb, kb.weight_max)
    nonzero = [(wa, i, wb, j, F) for wa, i, wb, j, F in hr.brackets if not F.is_zero()]
    ex = None
    if nonzero:
        wa, i, wb, j, F = nonzero[0]
        ex = {"a": f"{wa}#{i}", "b": f"{wb}#{j}", "bracket": F.render()}
    nfun = len(hr.all_functionals())
    return [
        _check("kernel closed under lambda-bracket", sub_ok, counterexample=witness),
        _check("hamiltonians pairwise commute", hr.commuting and nfun > 0,
               functionals=nfun, counterexample=ex),
    ]


SUITES = {"axioms": _verify_axioms, "geometry": _verify_geometry, "hierarchy": _verify_hierarchy}


def cmd_verify(job: Job) -> tuple[dict, bool]:
    suite = job.cfg.suite
    if suite not in SUITES:
        raise UsageError(f"unknown suite {suite!r}; choose from {sorted(SUITES)}")
    checks = SUITES[suite](job)
    ok = all(c["pass"] for c in checks)
    rep = {**job.header(), "suite": suite, "checks": checks, "pass": ok}
    if suite == "geometry":
        rep["N"] = job.cfg.N
    return rep, ok


def cmd_hier(job: Job) -> tuple[dict, bool]:
    _, hr = _hierarchy(job)
    funcs = {f"{w}#{i}": F.to_json() for w, i, F in hr.all_functionals()}
    brackets = {f"[{wa}#{i}, {wb}#{j}]": F.render() for wa, i, wb, j, F in hr.brackets}
    ok = hr.commuting and bool(funcs)
    rep = {**job.header(), "weights": [str(w) for w in _hier_weights(job)],
           "functionals": funcs, "brackets": brackets, "commuting": ok}
    return rep, ok


COMMANDS = {"algebra": cmd_algebra, "wgen": cmd_wgen, "bracket": cmd_bracket,
            "verify": cmd_verify, "hier": cmd_hier}


# output ----------------------------------------------------------------------------

def _plain(x):
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, RatFunc):
        return x.render()
    if isinstance(x, DiffPoly):
        return x.render()
    return x


def to_json_text(command: str, report: dict) -> str:
    doc = {"schema_version": SCHEMA_VERSION, "command": command, "result": _plain(report)}
    return json.dumps(doc, sort_keys=True, indent=2, ensure_ascii=False)


def _text_lines(report, indent=0):
    pad = "  " * indent
    for key, val in report.items():
        if isinstance(val, dict):
            yield f"{pad}{key}:"
            yield from _text_lines(val, indent + 1)
        elif isinstance(val, list) and val and isinstance(val[0], dict):
            yield f"{pad}{key}:"
            for item in val:
                name = item.get("identity", "")
                status = "PASS" if item.get("pass") else "FAIL"
                rest = {k: v for k, v in item.items() if k not in ("identity", "pass") and v is not None}
                extra = " ".join(f"{k}={v}" for k, v in rest.items())
                yield f"{pad}  [{status}] {name} {extra}".rstrip()
        elif isinstance(val, list):
            yield f"{pad}{key}: " + (", ".join(map(str, val)) if val else "-")
        else:
            yield f"{pad}{key}: {val}"


def to_text(report: dict) -> str:
    return "\n".join(_text_lines(_plain(report)))


# argument parsing ----------------------------------------------------------------

def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from None


def _int_list(text: str) -> tuple:
    try:
        return tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers: {text!r}") from None


def _fraction_list(text: str) -> tuple:
    return tuple(_fraction(x) for x in text.split(",") if x.strip())


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--type", required=True, help="A<n>, C<n>, sl<n>, sp<2n> or gl<n>")
    nil = common.add_mutually_exclusive_group()
    nil.add_argument("--nilpotent", default="principal", choices=["principal", "none"])
    nil.add_argument("--partition", type=_int_list, help="Jordan type, e.g. 2,2")
    ychoice = common.add_mutually_exclusive_group()
    ychoice.add_argument("--y", default="default",
                         help="element of g_d such as '2*e1_1 + e0_1', '0', or 'default'")
    ychoice.add_argument("--scan-y", action="store_true", help="search small y for which (F) holds")
    common.add_argument("--level", default="k", help="'k' (symbolic) or a nonzero rational")
    common.add_argument("--weight-max", type=_fraction, default=Fraction(4))
    common.add_argument("--N", type=int, default=3, help="loop truncation order")
    common.add_argument("--weights", type=_fraction_list, help="hierarchy weights, e.g. 2,4")
    common.add_argument("--format", dest="fmt", choices=["text", "json"], default="text")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--samples", type=int, default=20, help="random elements per randomized check")

    parser = argparse.ArgumentParser(prog="wpva", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("algebra", parents=[common], help="algebra, grading and condition (F)")
    sub.add_parser("wgen", parents=[common], help="screening kernel and W-algebra generators")
    br = sub.add_parser("bracket", parents=[common], help="lambda-bracket of two polynomials")
    br.add_argument("--left", required=True)
    br.add_argument("--right", required=True)
    br.add_argument("--pva", choices=["affine", "screening"], default="affine",
                    help="V^k(g), or the screening ambient V^k(g_0) (x) F(g_1/2)")
    ver = sub.add_parser("verify", parents=[common], help="run a verification suite")
    ver.add_argument("suite", help="axioms | geometry | hierarchy")
    sub.add_parser("hier", parents=[common], help="local functionals and their brackets")
    return parser


def config_from_args(ns: argparse.Namespace) -> JobConfig:
    cfg = JobConfig(
        command=ns.command, type=ns.type, nilpotent=ns.nilpotent, partition=ns.partition,
        y=ns.y, scan_y=ns.scan_y, level=ns.level, weight_max=ns.weight_max, N=ns.N,
        weights=ns.weights, fmt=ns.fmt, seed=ns.seed, samples=ns.samples,
        suite=getattr(ns, "suite", None), left=getattr(ns, "left", None),
        right=getattr(ns, "right", None), pva=getattr(ns, "pva", "affine"),
    )
    cfg.validate()
    return cfg


def run(cfg: JobConfig) -> tuple[str, int]:
    """Execute a configuration; returns (output text, exit code)."""
    job = Job(cfg)
    report, ok = COMMANDS[cfg.command](job)
    text = to_json_text(cfg.command, report) if cfg.fmt == "json" else to_text(report)
    return text, EXIT_OK if ok else EXIT_FAIL


def main(argv=None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        text, code = run(config_from_args(ns))
    except (UsageError, ResourceLimitError) as exc:
        print(f"wpva: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    print(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
