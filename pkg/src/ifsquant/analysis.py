"""Distortion curves, dimension estimates and asymptotic witnesses.

The quantization dimension governs V_{n,r} ~ n^{-r/D}, so a least-squares
fit of log V against log n has slope -r/D.  The liminf/limsup statements
behind the dimension cannot be observed at finite n; the witness report
operationalizes them as finite-grid criteria (minimum over the grid bounded
away from zero for kappa below the dimension, negative last-third trend for
kappa above) and says so.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import InsufficientDataError, ValidationError
from .quantize import lloyd
from .sampler import sample
from .thermo import quantization_dimension


@dataclass(frozen=True)
class CurveEntry:
    n: int
    V: float
    stderr: float
    method: str


@dataclass(frozen=True)
class DistortionCurve:
    entries: tuple
    r: float
    system_id: str
    seeds: tuple

    def __post_init__(self):
        ns = [e.n for e in self.entries]
        if any(b <= a for a, b in zip(ns, ns[1:])):
            raise ValidationError("entries must have strictly increasing n")

    def violations(self):
        """Entries where V increases by more than twice the combined stderr."""
        bad = []
        for a, b in zip(self.entries, self.entries[1:]):
            if b.V > a.V + 2.0 * (a.stderr + b.stderr):
                bad.append((a.n, b.n))
        return bad


def distortion_curve(system, r, n_grid, samples=100_000, eps=1e-6, seed=0,
                     restarts=5, max_iters=200, tol=1e-9):
    """Lloyd distortion at each n of the grid, on one shared sample."""
    n_grid = sorted(int(n) for n in n_grid)
    emp = sample(system, samples, eps, seed)
    entries = []
    for n in n_grid:
        q = lloyd(emp, n, r, seed=seed, restarts=restarts,
                  max_iters=max_iters, tol=tol)
        entries.append(CurveEntry(n, q.distortion_estimate, q.distortion_stderr, "lloyd"))
    return DistortionCurve(tuple(entries), r, system.system_id, (seed,))


def estimate_dimension(curve, bootstrap=200, seed=0):
    """(D_hat, confidence interval) from the log-log slope of the curve.

    Fits log V ~ a + m log n by unweighted least squares and returns
    D_hat = -r/m with a bootstrap percentile interval over the entries.
    """
    usable = [(e.n, e.V) for e in curve.entries if e.V > 0]
    dropped = len(curve.entries) - len(usable)
    if dropped:
        warnings.warn(f"excluded {dropped} entries with nonpositive distortion")
    if len(usable) < 4:
        raise InsufficientDataError("need at least four entries with positive distortion")
    logn = np.log([n for n, _ in usable])
    logv = np.log([v for _, v in usable])
    slope = _slope(logn, logv)
    if slope >= 0:
        raise ValidationError("distortion does not decay; no dimension estimate")
    d_hat = -curve.r / slope
    rng = np.random.default_rng(seed)
    boots = []
    k = len(usable)
    for _ in range(bootstrap):
        for _ in range(64):
            pick = rng.integers(0, k, size=k)
            if len(np.unique(logn[pick])) >= 2:
                break
        m = _slope(logn[pick], logv[pick])
        if m < 0:
            boots.append(-curve.r / m)
    if boots:
        lo, hi = np.percentile(boots, [2.5, 97.5])
    else:
        lo = hi = d_hat
    return d_hat, (float(lo), float(hi))


def _slope(x, y):
    return float(np.polyfit(x, y, 1)[0])


def coefficient_curve(curve, kappa):
    """Pointwise transform (n, V) -> (n, n * V**(kappa/r)); no extrapolation."""
    if kappa <= 0:
        raise ValidationError("kappa must be positive")
    return [(e.n, e.n * e.V ** (kappa / curve.r)) for e in curve.entries]


@dataclass(frozen=True)
class WitnessReport:
    """Finite-grid substitutes for the asymptotic coefficient statements."""

    system_id: str
    r: float
    kappa_r: float
    kappa_minus: float
    kappa_plus: float
    curve: DistortionCurve
    lower_values: tuple
    upper_values: tuple
    lower_min: float
    lower_median: float
    upper_slope: float
    lower_threshold: float = 0.1

    @property
    def lower_pass(self):
        return self.lower_min > self.lower_threshold * self.lower_median

    @property
    def upper_pass(self):
        return self.upper_slope < 0.0

    @property
    def passed(self):
        return self.lower_pass and self.upper_pass

    def lines(self):
        out = [
            f"system {self.system_id}, r={self.r}, kappa_r={self.kappa_r:.6f}",
            f"lower witness (kappa={self.kappa_minus}): "
            f"min n*V^(k/r) = {self.lower_min:.6g}, median = {self.lower_median:.6g} "
            f"-> {'PASS' if self.lower_pass else 'FAIL'}",
            f"upper witness (kappa={self.kappa_plus}): "
            f"last-third log-log slope = {self.upper_slope:.4f} "
            f"-> {'PASS' if self.upper_pass else 'FAIL'}",
            "note: finite-grid criteria standing in for liminf/limsup behavior",
        ]
        return out


def witness_from_curve(curve, kappa_r, kappa_minus, kappa_plus):
    if not kappa_minus < kappa_r < kappa_plus:
        raise ValidationError(
            f"need kappa_minus < kappa_r < kappa_plus, got "
            f"{kappa_minus}, {kappa_r}, {kappa_plus}")
    if len(curve.entries) < 2:
        raise InsufficientDataError("witnesses need at least two grid points")
    lower = [(e.n, e.n * e.V ** (kappa_minus / curve.r)) for e in curve.entries]
    upper = [(e.n, e.n * e.V ** (kappa_plus / curve.r)) for e in curve.entries]
    lvals = np.array([v for _, v in lower])
    k = len(curve.entries)
    start = min(max(0, (2 * k) // 3), k - 2)
    tail = upper[start:]
    slope = _slope(np.log([n for n, _ in tail]), np.log([v for _, v in tail]))
    return WitnessReport(
        system_id=curve.system_id,
        r=curve.r,
        kappa_r=kappa_r,
        kappa_minus=kappa_minus,
        kappa_plus=kappa_plus,
        curve=curve,
        lower_values=tuple(lower),
        upper_values=tuple(upper),
        lower_min=float(lvals.min()),
        lower_median=float(np.median(lvals)),
        upper_slope=slope,
    )


def theorem_witness(system, r, kappa_minus, kappa_plus, n_grid, seed,
                    samples=100_000, eps=1e-6, restarts=5, tol=1e-10, curve=None):
    """Run the distortion grid and evaluate both coefficient witnesses."""
    kappa_r = quantization_dimension(system, r, tol=max(tol, 1e-12))
    if not kappa_minus < kappa_r < kappa_plus:
        raise ValidationError(
            f"need kappa_minus < kappa_r < kappa_plus around {kappa_r}")
    if len(list(n_grid)) < 2:
        raise InsufficientDataError("witness grids need at least two sizes")
    if curve is None:
        curve = distortion_curve(system, r, n_grid, samples=samples, eps=eps,
                                 seed=seed, restarts=restarts)
    return witness_from_curve(curve, kappa_r, kappa_minus, kappa_plus)
