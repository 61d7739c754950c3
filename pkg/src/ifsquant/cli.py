"""Command-line front end.

Every subcommand prints ``#``-prefixed manifest comments followed by one CSV
table; ``--out DIR`` additionally writes the same bytes to ``DIR/<sub>.csv``.
Reruns with identical arguments are byte-identical except for the timestamp
comment.  Exit codes: 0 success, 2 validation/precondition failure, 3
iteration budget exhausted, 64 usage errors.
"""

from __future__ import annotations

import argparse
import datetime
import os
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .analysis import distortion_curve, estimate_dimension, theorem_witness
from .errors import BudgetError, ValidationError
from .ifs import map_contained_in_domain, truncate, validate_separation
from .quantize import constructive_quantizer, lloyd
from .sampler import sample
from .systems import resolve_system
from .thermo import (beta, kappa_residual, kappa_via_beta, pressure,
                     quantization_dimension, temperature_curve, validate_finiteness)
from .transport import DiscreteMeasure, transport_plan, wasserstein_1d


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


@dataclass(frozen=True)
class RunManifest:
    """Reproducibility header attached to every CLI output.

    Replaying a manifest reproduces the output byte-identically, apart from
    the timestamp line.
    """

    subcommand: str
    system_id: str
    parameters: dict
    seed: int | None
    artifact_version: str
    timestamp: str

    def comment_lines(self):
        lines = [f"# subcommand: {self.subcommand}", f"# system: {self.system_id}"]
        for k in sorted(self.parameters):
            lines.append(f"# param.{k}: {_fmt(self.parameters[k])}")
        if self.seed is not None:
            lines.append(f"# seed: {self.seed}")
        lines.append(f"# artifact-version: {self.artifact_version}")
        lines.append(f"# timestamp: {self.timestamp}")
        return lines


def _fmt(x):
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


def _parse_grid(text):
    """Integer grids: '16', '2,4,8', '2:64:x2' (geometric), '2:10:+2'."""
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3 or not parts[2] or parts[2][0] not in "x+":
            raise UsageError(f"bad grid {text!r}; use lo:hi:xK or lo:hi:+K")
        lo, hi = int(parts[0]), int(parts[1])
        out = []
        v = lo
        if parts[2][0] == "x":
            k = int(parts[2][1:])
            if k < 2:
                raise UsageError("geometric grid step must be at least 2")
            while v <= hi:
                out.append(v)
                v *= k
        else:
            k = int(parts[2][1:])
            if k < 1:
                raise UsageError("arithmetic grid step must be at least 1")
            while v <= hi:
                out.append(v)
                v += k
        if not out:
            raise UsageError(f"grid {text!r} is empty")
        return out
    return [int(v) for v in text.split(",")]


def _parse_reals(text):
    return [float(v) for v in text.split(",")]


def _manifest(sub, system_id, params, seed=None):
    stamp = datetime.datetime.now(datetime.timezone.utc).isoformat()
    manifest = RunManifest(sub, system_id, params, seed, __version__, stamp)
    return manifest.comment_lines()


def _emit(lines, out_dir, sub):
    text = "\n".join(lines) + "\n"
    sys.stdout.write(text)
    if out_dir:
        path = Path(out_dir)
        path.mkdir(parents=True, exist_ok=True)
        (path / f"{sub}.csv").write_text(text, encoding="utf-8")


def _read_measure(path):
    atoms, masses = [], []
    header = None
    with open(path, "r", encoding="utf-8") as fh:
        for raw in fh:
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if header is None:
                header = [c.strip() for c in line.split(",")]
                if header not in (["x", "mass"], ["x", "y", "mass"]):
                    raise ValidationError(
                        f"{path}: header must be 'x,mass' or 'x,y,mass'")
                continue
            vals = [float(v) for v in line.split(",")]
            if len(vals) != len(header):
                raise ValidationError(f"{path}: row width does not match header")
            atoms.append(vals[:-1])
            masses.append(vals[-1])
    if header is None:
        raise ValidationError(f"{path}: no data rows")
    return DiscreteMeasure(np.array(atoms), np.array(masses))


def _center_rows(centers):
    head = "cx" if centers.shape[1] == 1 else "cx,cy"
    rows = [head]
    for c in centers:
        rows.append(",".join(_fmt(v) for v in c))
    return rows


def build_parser():
    parser = _Parser(prog="ifsquant", description=__doc__)
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def add(name, help_text, system=True):
        p = sub.add_parser(name, help=help_text)
        if system:
            p.add_argument("--system", required=True,
                           help="system-spec file or built-in name")
        p.add_argument("--tol", type=float, default=1e-10)
        p.add_argument("--out", default=None, help="directory for CSV output")
        p.add_argument("--threads", type=int, default=None,
                       help="cap on BLAS worker threads (exported to the env)")
        return p

    p = add("pressure", "evaluate P(q,t) with certified tail")
    p.add_argument("--q", required=True)
    p.add_argument("--t", required=True)

    p = add("beta", "zero of t -> P(q,t)")
    p.add_argument("--q", default="0:1:21",
                   help="comma list or lo:hi:count grid of q values")

    p = add("dim", "quantization dimension kappa_r")
    p.add_argument("--r", default="1")

    p = add("sample", "draw points of the self-similar measure")
    p.add_argument("--samples", type=int, default=10000)
    p.add_argument("--eps", type=float, default=1e-6)
    p.add_argument("--seed", type=int, default=0)

    p = add("lloyd", "Lloyd quantizer on an empirical measure")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--r", type=float, default=2.0)
    p.add_argument("--samples", type=int, default=100000)
    p.add_argument("--eps", type=float, default=1e-6)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--restarts", type=int, default=5)

    p = add("constructive", "word-set quantizer from the truncated system")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--r", type=float, default=1.0)
    p.add_argument("--kappa", type=float, default=None)
    p.add_argument("--samples", type=int, default=20000)
    p.add_argument("--eps", type=float, default=1e-6)
    p.add_argument("--seed", type=int, default=0)

    p = add("wasserstein", "exact rho_r between two discrete measures", system=False)
    p.add_argument("mu", help="CSV atom list (x[,y],mass)")
    p.add_argument("nu", help="CSV atom list (x[,y],mass)")
    p.add_argument("--r", type=float, default=2.0)

    p = add("curve", "distortion curve and dimension fit")
    p.add_argument("--n", default="2:64:x2")
    p.add_argument("--r", type=float, default=2.0)
    p.add_argument("--samples", type=int, default=100000)
    p.add_argument("--eps", type=float, default=1e-6)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--restarts", type=int, default=5)
    p.add_argument("--kappa", type=float, default=None)

    p = add("witness", "finite-grid coefficient witnesses")
    p.add_argument("--n", default="2:64:x2")
    p.add_argument("--r", type=float, default=2.0)
    p.add_argument("--kappa-minus", type=float, required=True)
    p.add_argument("--kappa-plus", type=float, required=True)
    p.add_argument("--samples", type=int, default=100000)
    p.add_argument("--eps", type=float, default=1e-6)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--restarts", type=int, default=5)

    add("verify", "run the property battery on a system")
    return parser


def _q_grid(text):
    if ":" in text:
        lo, hi, count = text.split(":")
        return list(np.linspace(float(lo), float(hi), int(count)))
    return _parse_reals(text)


def _cmd_pressure(args, system):
    lines = _manifest("pressure", system.system_id,
                      {"q": args.q, "t": args.t, "tol": args.tol})
    lines.append("q,t,value,tail_bound")
    for q in _parse_reals(args.q):
        for t in _parse_reals(args.t):
            pv = pressure(system, q, t, tol=max(args.tol, 1e-12))
            lines.append(",".join(_fmt(v) for v in (q, t, pv.value, pv.tail_bound)))
    return lines, 0


def _cmd_beta(args, system):
    lines = _manifest("beta", system.system_id, {"q": args.q, "tol": args.tol})
    lines.append("q,t,value,tail_bound")
    for q in _q_grid(args.q):
        t = beta(system, q, tol=args.tol)
        pv = pressure(system, q, t, tol=1e-12)
        lines.append(",".join(_fmt(v) for v in (q, t, pv.value, pv.tail_bound)))
    return lines, 0


def _cmd_dim(args, system):
    lines = _manifest("dim", system.system_id, {"r": args.r, "tol": args.tol})
    lines.append("r,kappa_r,residual")
    for r in _parse_reals(args.r):
        kap = quantization_dimension(system, r, tol=args.tol)
        res = kappa_residual(system, r, kap)
        lines.append(",".join(_fmt(v) for v in (r, kap, res)))
    return lines, 0


def _cmd_sample(args, system):
    emp = sample(system, args.samples, args.eps, args.seed)
    lines = _manifest("sample", system.system_id,
                      {"samples": args.samples, "eps": args.eps}, seed=args.seed)
    lines.append(f"# coding_depth: {emp.coding_depth}")
    lines.append(f"# spatial_error: {_fmt(emp.spatial_error)}")
    lines.append(f"# generator: {emp.generator}")
    lines.append("x" if emp.dim == 1 else "x,y")
    for p in emp.points:
        lines.append(",".join(_fmt(v) for v in p))
    return lines, 0


def _cmd_lloyd(args, system):
    emp = sample(system, args.samples, args.eps, args.seed)
    q = lloyd(emp, args.n, args.r, seed=args.seed, restarts=args.restarts)
    lines = _manifest("lloyd", system.system_id,
                      {"n": args.n, "r": args.r, "samples": args.samples,
                       "eps": args.eps, "restarts": args.restarts}, seed=args.seed)
    lines.append(f"# distortion: {_fmt(q.distortion_estimate)}")
    lines.append(f"# stderr: {_fmt(q.distortion_stderr)}")
    lines.append(f"# iterations: {len(q.meta['history'])}")
    lines.extend(_center_rows(q.centers))
    return lines, 0


def _cmd_constructive(args, system):
    q = constructive_quantizer(system, args.n, args.r, kappa=args.kappa,
                               tol=args.tol, samples=args.samples,
                               eps=args.eps, seed=args.seed)
    lines = _manifest("constructive", system.system_id,
                      {"n": args.n, "r": args.r, "kappa": q.meta["kappa"],
                       "samples": args.samples, "eps": args.eps}, seed=args.seed)
    for key in ("kappa_r", "eta", "alpha", "N", "card", "rho", "bound_sum"):
        lines.append(f"# {key}: {_fmt(q.meta[key])}")
    lines.append(f"# distortion: {_fmt(q.distortion_estimate)}")
    lines.append(f"# stderr: {_fmt(q.distortion_stderr)}")
    lines.extend(_center_rows(q.centers))
    return lines, 0


def _cmd_wasserstein(args):
    mu = _read_measure(args.mu)
    nu = _read_measure(args.nu)
    lines = _manifest("wasserstein", "-", {"mu": args.mu, "nu": args.nu, "r": args.r})
    if mu.dim == 1 and args.r >= 1.0:
        rho = wasserstein_1d(mu, nu, args.r)
        lines.append("# method: quantile-coupling")
        lines.append("r,rho_r")
        lines.append(f"{_fmt(args.r)},{_fmt(rho)}")
        return lines, 0
    rho, plan = transport_plan(mu, nu, args.r)
    lines.append("# method: exact-assignment")
    lines.append("r,rho_r")
    lines.append(f"{_fmt(args.r)},{_fmt(rho)}")
    lines.append("")
    lines.append("i,j,mass")
    for i, j, m in plan:
        lines.append(f"{i},{j},{_fmt(float(m))}")
    return lines, 0


def _cmd_curve(args, system):
    grid = _parse_grid(args.n)
    curve = distortion_curve(system, args.r, grid, samples=args.samples,
                             eps=args.eps, seed=args.seed, restarts=args.restarts)
    d_hat, ci = estimate_dimension(curve)
    kappa = args.kappa if args.kappa is not None else d_hat
    lines = _manifest("curve", system.system_id,
                      {"n": args.n, "r": args.r, "samples": args.samples,
                       "eps": args.eps, "restarts": args.restarts,
                       "kappa": kappa}, seed=args.seed)
    lines.append(f"# d_hat: {_fmt(d_hat)}")
    lines.append(f"# d_hat_ci: {_fmt(ci[0])},{_fmt(ci[1])}")
    lines.append("n,V,stderr,coeff")
    for e in curve.entries:
        coeff = e.n * e.V ** (kappa / args.r)
        lines.append(",".join(_fmt(v) for v in (e.n, e.V, e.stderr, coeff)))
    return lines, 0


def _cmd_witness(args, system):
    grid = _parse_grid(args.n)
    report = theorem_witness(system, args.r, args.kappa_minus, args.kappa_plus,
                             grid, args.seed, samples=args.samples,
                             eps=args.eps, restarts=args.restarts)
    lines = _manifest("witness", system.system_id,
                      {"n": args.n, "r": args.r, "kappa_minus": args.kappa_minus,
                       "kappa_plus": args.kappa_plus, "samples": args.samples,
                       "restarts": args.restarts}, seed=args.seed)
    lines.extend(f"# {text}" for text in report.lines())
    lines.append("n,V,stderr,coeff_minus,coeff_plus")
    for e, (_, lo), (_, hi) in zip(report.curve.entries, report.lower_values,
                                   report.upper_values):
        lines.append(",".join(_fmt(v) for v in (e.n, e.V, e.stderr, lo, hi)))
    return lines, 0 if report.passed else 2


def _cmd_verify(args, system):
    checks = []

    total = sum(system.probs.prefix) + system.probs.tail_sum(system.probs.prefix_len)
    checks.append(("mass-normalization", abs(total - 1.0) <= 1e-12,
                   f"sum={total!r}"))

    upper = system.family_size or 12
    ok = all(map_contained_in_domain(system.map_for(j), system.domain)
             for j in range(1, upper + 1))
    checks.append(("map-containment", ok, f"first {upper} maps inside X"))

    if not system.claims_separation:
        checks.append(("separation", None, "zero-gap placement; thermodynamics-only"))
    else:
        size = system.family_size or 6
        rep = validate_separation(system, prefix_size=min(size, 6), depth=2)
        checks.append(("separation", rep.passed, f"min gap {rep.min_gap:.3e}"))

    try:
        validate_finiteness(system)
        checks.append(("finiteness-condition", True, "0 <= P(q,u) < inf exhibited"))
    except ValidationError as exc:
        checks.append(("finiteness-condition", False, str(exc)))

    b1 = beta(system, 1.0, tol=1e-10)
    checks.append(("beta(1)=0", abs(b1) <= 1e-8, f"beta(1)={b1!r}"))

    curve = temperature_curve(system, np.linspace(0.0, 1.0, 9), tol=1e-8)
    checks.append(("temperature-curve", curve.ok,
                   f"max step {curve.max_step:.2e}, "
                   f"min convexity residual {curve.min_convexity_residual:.2e}"))

    kap = quantization_dimension(system, 1.0, tol=1e-10)
    alt = kappa_via_beta(system, 1.0, tol=1e-10)
    checks.append(("dimension-routes", abs(kap - alt) <= 1e-8,
                   f"direct {kap!r} vs temperature-route {alt!r}"))

    if system.is_finite:
        checks.append(("truncation-mass", None, "finite system"))
    else:
        tr = truncate(system, max(system.j0, 3))
        checks.append(("truncation-mass",
                       abs(float(tr.probs_tilde.sum()) - 1.0) <= 1e-12,
                       f"N={tr.N}"))

    emp1 = sample(system, 2000, 1e-6, 7)
    emp2 = sample(system, 2000, 1e-6, 7)
    ok = bool(np.array_equal(emp1.points, emp2.points)) and \
        system.domain.contains(emp1.points, slack=1e-9)
    checks.append(("sampler", ok, "deterministic, supported in X"))

    lines = _manifest("verify", system.system_id, {})
    failed = False
    for name, status, detail in checks:
        if status is None:
            word = "SKIP"
        elif status:
            word = "PASS"
        else:
            word = "FAIL"
            failed = True
        lines.append(f"# {word} {name}: {detail}")
    lines.append("check,status")
    for name, status, _ in checks:
        word = "skip" if status is None else ("pass" if status else "fail")
        lines.append(f"{name},{word}")
    return lines, 2 if failed else 0


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        sys.stderr.write(f"usage error: {exc}\n")
        parser.print_usage(sys.stderr)
        return 64
    if getattr(args, "threads", None):
        for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
            os.environ[var] = str(args.threads)
    try:
        if args.subcommand == "wasserstein":
            lines, code = _cmd_wasserstein(args)
        else:
            system = resolve_system(args.system)
            handler = {
                "pressure": _cmd_pressure,
                "beta": _cmd_beta,
                "dim": _cmd_dim,
                "sample": _cmd_sample,
                "lloyd": _cmd_lloyd,
                "constructive": _cmd_constructive,
                "curve": _cmd_curve,
                "witness": _cmd_witness,
                "verify": _cmd_verify,
            }[args.subcommand]
            lines, code = handler(args, system)
    except ValidationError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2
    except BudgetError as exc:
        sys.stderr.write(f"budget exhausted: {exc}\n")
        return 3
    _emit(lines, args.out, args.subcommand)
    return code


if __name__ == "__main__":
    sys.exit(main())
