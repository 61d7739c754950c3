"""Exact L_r transport distances on small discrete instances.

Two independent exact routes: the monotone (quantile) coupling in one
dimension for convex costs (r >= 1), and a minimum-cost perfect assignment
after expanding rational masses into equal-mass atoms.  On top of these,
``best_discrete_approx`` enumerates support partitions to find the best
n-point approximation of a discrete measure, whose transport cost to the
original must reproduce the brute-force quantization error.

These solvers exist to verify identities, not to scale: caps are hard
errors, never silent approximations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import InstanceTooLargeError, ValidationError
from .quantize import r_center


@dataclass(frozen=True)
class DiscreteMeasure:
    """Finitely many distinct atoms with positive masses summing to one."""

    atoms: np.ndarray
    masses: np.ndarray

    def __post_init__(self):
        a = np.atleast_2d(np.asarray(self.atoms, dtype=float))
        m = np.asarray(self.masses, dtype=float)
        if a.shape[0] != m.shape[0]:
            raise ValidationError("one mass per atom required")
        if np.any(m <= 0):
            raise ValidationError("masses must be positive")
        if abs(float(m.sum()) - 1.0) > 1e-12:
            raise ValidationError(f"masses sum to {float(m.sum())!r}, not 1")
        if len(np.unique(a, axis=0)) != len(a):
            raise ValidationError("atoms must be distinct")
        a.setflags(write=False)
        m.setflags(write=False)
        object.__setattr__(self, "atoms", a)
        object.__setattr__(self, "masses", m)

    @property
    def size(self):
        return self.atoms.shape[0]

    @property
    def dim(self):
        return self.atoms.shape[1]

    @classmethod
    def from_points(cls, points, masses=None):
        """Build a measure from possibly repeated points, merging duplicates."""
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        if masses is None:
            masses = np.full(len(pts), 1.0 / len(pts))
        masses = np.asarray(masses, dtype=float)
        uniq, inverse = np.unique(pts, axis=0, return_inverse=True)
        merged = np.zeros(len(uniq))
        np.add.at(merged, inverse, masses)
        return cls(uniq, merged)


def wasserstein_1d(mu, nu, r):
    """Exact rho_r via the monotone coupling over merged CDF breakpoints.

    Valid for r >= 1, where |x-y|^r is convex and the quantile coupling is
    optimal on the line.
    """
    if r < 1.0:
        raise ValidationError(
            "the monotone coupling needs r >= 1; use wasserstein_assignment")
    if mu.dim != 1 or nu.dim != 1:
        raise ValidationError("wasserstein_1d takes one-dimensional measures")
    ax, aw = _sorted_1d(mu)
    bx, bw = _sorted_1d(nu)
    i = j = 0
    rem_a, rem_b = aw[0], bw[0]
    cost = 0.0
    while True:
        take = min(rem_a, rem_b)
        cost += take * abs(ax[i] - bx[j]) ** r
        rem_a -= take
        rem_b -= take
        if rem_a <= 1e-18:
            i += 1
            if i == len(ax):
                break
            rem_a = aw[i]
        if rem_b <= 1e-18:
            j += 1
            if j == len(bx):
                break
            rem_b = bw[j]
    return cost ** (1.0 / r)


def _sorted_1d(measure):
    order = np.argsort(measure.atoms[:, 0], kind="stable")
    return measure.atoms[order, 0], measure.masses[order]


def _rationalize(masses, cap):
    fracs = [Fraction(float(m)).limit_denominator(cap) for m in masses]
    for f, m in zip(fracs, masses):
        if abs(float(f) - float(m)) > 1e-9:
            raise InstanceTooLargeError(
                f"mass {float(m)!r} has no small-denominator rational form")
    if sum(fracs) != 1:
        raise ValidationError("rationalized masses do not sum exactly to 1")
    return fracs


def _expand(measure, cap):
    fracs = _rationalize(measure.masses, cap)
    lcm = 1
    for f in fracs:
        lcm = lcm * f.denominator // math.gcd(lcm, f.denominator)
    if lcm > cap:
        raise InstanceTooLargeError(
            f"equal-mass expansion needs {lcm} atoms, above the cap {cap}")
    owners = []
    for i, f in enumerate(fracs):
        owners.extend([i] * int(f * lcm))
    return np.array(owners, dtype=int), lcm


def transport_plan(mu, nu, r, cap=64):
    """(rho_r, coupling) by exact min-cost assignment on equal-mass atoms.

    The coupling is a list of (i, j, mass) triples whose row and column sums
    reproduce the input masses exactly (mass arithmetic is rational).
    """
    if r <= 0:
        raise ValidationError("order r must be positive")
    if mu.dim != nu.dim:
        raise ValidationError("measures live in different dimensions")
    own_a, la = _expand(mu, cap)
    own_b, lb = _expand(nu, cap)
    lcm = la * lb // math.gcd(la, lb)
    if lcm > cap:
        raise InstanceTooLargeError(
            f"joint equal-mass expansion needs {lcm} atoms, above the cap {cap}")
    own_a = np.repeat(own_a, lcm // la)
    own_b = np.repeat(own_b, lcm // lb)
    xa = mu.atoms[own_a]
    xb = nu.atoms[own_b]
    cost = np.linalg.norm(xa[:, None, :] - xb[None, :, :], axis=2) ** r
    rows, cols = linear_sum_assignment(cost)
    total = float(cost[rows, cols].sum()) / lcm
    unit = Fraction(1, lcm)
    plan = {}
    for a, b in zip(rows, cols):
        key = (int(own_a[a]), int(own_b[b]))
        plan[key] = plan.get(key, Fraction(0)) + unit
    coupling = [(i, j, m) for (i, j), m in sorted(plan.items())]
    return total ** (1.0 / r), coupling


def wasserstein_assignment(mu, nu, r, cap=64):
    """Exact rho_r by minimum-cost perfect assignment (any r > 0)."""
    rho, _ = transport_plan(mu, nu, r, cap=cap)
    return rho


def wasserstein(mu, nu, r, cap=64):
    """Exact rho_r: quantile coupling in 1D for r >= 1, else assignment."""
    if mu.dim == 1 and nu.dim == 1 and r >= 1.0:
        return wasserstein_1d(mu, nu, r)
    return wasserstein_assignment(mu, nu, r, cap=cap)


# ---------------------------------------------------------------------------
# partition enumeration (brute-force quantization oracle)
# ---------------------------------------------------------------------------

def iter_partitions(k, max_cells):
    """All partitions of range(k) into at most max_cells nonempty cells,
    in deterministic restricted-growth order."""
    def rec(i, cells):
        if i == k:
            yield [tuple(c) for c in cells]
            return
        for c in cells:
            c.append(i)
            yield from rec(i + 1, cells)
            c.pop()
        if len(cells) < max_cells:
            cells.append([i])
            yield from rec(i + 1, cells)
            cells.pop()
    yield from rec(0, [])


def brute_force_vnr(points, weights, n, r, max_support=12):
    """Exact n-point quantization error of a weighted point set.

    Enumerates every partition of the support into at most n cells and takes
    the generalized center per cell; returns (error, centers, cell masses).
    """
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    k = len(pts)
    if k > max_support:
        raise InstanceTooLargeError(f"support of size {k} exceeds the cap {max_support}")
    if n < 1:
        raise ValidationError("n must be at least 1")
    w = np.full(k, 1.0 / k) if weights is None else np.asarray(weights, dtype=float)
    best = None
    for cells in iter_partitions(k, n):
        total = 0.0
        centers = []
        masses = []
        for cell in cells:
            cpts = pts[list(cell)]
            cw = w[list(cell)]
            c = r_center(cpts, cw, r)
            total += float(cw @ np.linalg.norm(cpts - c, axis=1) ** r)
            centers.append(c)
            masses.append(float(cw.sum()))
            if best is not None and total >= best[0]:
                break
        if best is None or total < best[0]:
            best = (total, np.array(centers), np.array(masses))
    return best


def best_discrete_approx(P, n, r, max_support=12):
    """Best approximation of P by a measure on at most n points, with its
    exact transport distance.

    Returns (Q, rho) where rho = rho_r(P, Q); rho**r equals the brute-force
    quantization error of P, which callers can verify independently.
    """
    if P.size > max_support:
        raise InstanceTooLargeError(
            f"support of size {P.size} exceeds the cap {max_support}")
    if n >= P.size:
        return P, 0.0
    err, centers, masses = brute_force_vnr(P.atoms, P.masses, n, r,
                                           max_support=max_support)
    Q = DiscreteMeasure.from_points(centers, masses)
    rho = wasserstein(P, Q, r)
    return Q, rho
