"""Pressure function, temperature function and quantization dimension.

For a system with masses ``p_j`` and ratios ``s_j`` the pressure is

    P(q, t) = log sum_j p_j^q s_j^t ,

finite for ``t`` above a convergence abscissa ``theta(q)``.  ``beta(q)`` is
the unique zero of ``t -> P(q, t)``; since ``P`` is strictly decreasing and
convex in ``t``, bisection with certified series evaluation is
unconditionally convergent.  The order-``r`` quantization dimension
``kappa_r`` solves ``sum_j (p_j s_j^r)^{kappa/(r+kappa)} = 1``, i.e.
``P(tau, r tau) = 0`` with ``tau = kappa/(r+kappa)``; it is cross-checked
against the equivalent route ``beta(q_r)/(1-q_r)`` where ``beta(q_r) =
r q_r``.

Beyond the explicit prefix every term has the form ``C x^j j^{-e}``, so the
omitted tail of a partial sum is either summed exactly (geometric series,
Hurwitz zeta, Lerch transcendent) or bounded by a closed form; the reported
``tail_bound`` is an upper bound on the error of ``value`` after propagation
through the logarithm.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp, zeta

from .errors import BudgetError, DivergenceError, ValidationError
from .ifs import GeometricTail, PowerLawTail

_NEG_INF = float("-inf")

# Floor on the reported tail_bound when the tail is summed by a closed form:
# covers floating-point roundoff of the log terms plus the trust level of the
# special functions involved.  Root solvers therefore refuse tolerances under
# _TOL_FLOOR.
_EXACT_FLOOR = 3e-13
_EXACT_REL = 1e-13
_TOL_FLOOR = 1e-12

_MAX_TERMS = 1 << 20
_LERCH_AT = 1 << 14


@dataclass(frozen=True)
class PressureValue:
    """Truncated pressure evaluation: |value - P(q,t)| <= tail_bound."""

    value: float
    tail_bound: float
    terms_used: int


@dataclass(frozen=True)
class TemperatureCurve:
    """beta on a grid plus monotonicity/convexity diagnostics."""

    q_grid: np.ndarray
    beta_values: np.ndarray
    tolerance: float
    max_step: float                  # most positive consecutive difference
    min_convexity_residual: float    # most negative midpoint residual

    @property
    def strictly_decreasing(self):
        return self.max_step < self.tolerance

    @property
    def midpoint_convex(self):
        return self.min_convexity_residual >= -self.tolerance

    @property
    def ok(self):
        return self.strictly_decreasing and self.midpoint_convex


def _tail_powers(tail):
    """(log coeff, log base, polynomial exponent) of a parametric tail."""
    if isinstance(tail, GeometricTail):
        return math.log(tail.coeff), math.log(tail.base), 0.0
    if isinstance(tail, PowerLawTail):
        return math.log(tail.coeff), 0.0, tail.exponent
    raise ValidationError(f"unsupported tail {tail!r}")


def _combined(system, q, t):
    """Parameters (log_c, log_x, e) of the terms p_j^q s_j^t = C x^j j^-e
    beyond both prefixes; None for finite systems."""
    if system.is_finite:
        return None
    lcp, lbp, ep = _tail_powers(system.probs.tail)
    lcs, lbs, es = _tail_powers(system.maps.tail)
    return (q * lcp + t * lcs, q * lbp + t * lbs, q * ep + t * es)


def theta(system, q):
    """Convergence abscissa inf{t : sum p_j^q s_j^t < inf}; -inf if the sum
    converges for every t."""
    if system.is_finite:
        return _NEG_INF
    _, lbp, ep = _tail_powers(system.probs.tail)
    _, lbs, es = _tail_powers(system.maps.tail)
    if lbs < 0.0:
        # geometric ratios dominate: x(t) = rho^q gamma^t < 1
        return -q * lbp / lbs + 0.0
    if lbp < 0.0 and q > 0.0:
        return _NEG_INF
    if es > 0.0:
        return (1.0 - q * ep) / es
    raise ValidationError("tail combination admits no convergence region")


def converges_at(system, q, t):
    """Whether sum_j p_j^q s_j^t is finite (boundary cases included)."""
    if system.is_finite:
        return True
    _, lx, e = _combined(system, q, t)
    if lx < 0.0:
        return True
    if lx == 0.0:
        return e > 1.0
    return False


def _log_terms(system, q, t, n):
    j = np.arange(1, n + 1)
    return q * system.probs.log_masses(j) + t * system.maps.log_ratios(j)


def _partial_logsum(system, q, t, n):
    """log of the n-term partial sum; a lower bound on P(q,t) regardless of
    convergence."""
    if system.is_finite:
        n = min(n, system.maps.prefix_len)
    return float(logsumexp(_log_terms(system, q, t, n)))


def _lerch_tail(lc, lx, e, n):
    """Exact log of sum_{j>n} C x^j j^-e via the Lerch transcendent."""
    import mpmath

    x = math.exp(lx)
    if x >= 1.0:
        # lx is within one ulp of the abscissa; the Hurwitz tail dominates
        if e > 1.0:
            return lc + math.log(float(zeta(e, n + 1)))
        raise BudgetError("tail evaluation degenerates at the convergence boundary")
    with mpmath.workdps(30):
        phi = mpmath.lerchphi(x, e, n + 1)
        return lc + (n + 1) * lx + float(mpmath.log(phi))


def pressure(system, q, t, tol=1e-12, terms=None):
    """Certified evaluation of P(q, t) = log sum_j p_j^q s_j^t.

    ``terms`` pins the explicit term count (testing hook); otherwise the
    count doubles until the propagated tail bound is at most ``tol``.
    """
    if tol <= 0:
        raise ValidationError("tolerance must be positive")
    if system.is_finite:
        n = system.maps.prefix_len
        return PressureValue(_partial_logsum(system, q, t, n), 0.0, n)
    if not converges_at(system, q, t):
        raise DivergenceError(
            f"sum p^{q} s^{t} diverges (abscissa theta({q}) = {theta(system, q)})")
    lc, lx, e = _combined(system, q, t)
    m = max(system.maps.prefix_len, system.probs.prefix_len)
    n = max(terms if terms is not None else 16, m, 1)
    while True:
        log_terms = _log_terms(system, q, t, n)
        if lx == 0.0:
            exact_tail = lc + math.log(float(zeta(e, n + 1)))
        elif e == 0.0:
            exact_tail = lc + (n + 1) * lx - math.log(-math.expm1(lx))
        else:
            bound = _mixed_tail_bound(lc, lx, e, n)
            if bound is not None:
                value = float(logsumexp(log_terms))
                tb = math.log1p(math.exp(min(bound - value, 700.0)))
                if tb <= tol or terms is not None:
                    return PressureValue(value, tb, n)
            if terms is None and n < _LERCH_AT:
                n *= 2
                continue
            exact_tail = _lerch_tail(lc, lx, e, n)
        value = float(logsumexp(np.append(log_terms, exact_tail)))
        tail_share = math.exp(min(exact_tail - value, 0.0))
        tb = _EXACT_FLOOR + _EXACT_REL * tail_share
        if terms is None and tb > tol:
            raise BudgetError(
                f"requested tolerance {tol} is below the closed-form trust level {tb}",
                best=PressureValue(value, tb, n))
        return PressureValue(value, tb, n)


def _mixed_tail_bound(lc, lx, e, n):
    """Closed-form upper bound on log sum_{j>n} C x^j j^-e for x < 1, or None
    if n is still too small for the ratio bound."""
    if e >= 0.0:
        # j^-e <= (n+1)^-e on the tail
        return lc + (n + 1) * lx - e * math.log(n + 1) - math.log(-math.expm1(lx))
    log_ratio = lx - e * math.log1p(1.0 / (n + 1))
    if log_ratio >= -1e-12:
        return None
    first = lc + (n + 1) * lx - e * math.log(n + 1)
    return first - math.log(-math.expm1(log_ratio))


# ---------------------------------------------------------------------------
# root finding on monotone pressure paths
# ---------------------------------------------------------------------------

def _probe(system, q, t, ptol, tol):
    """Certified sign of P(q,t): +1, -1, or 0 when |P| <= tail bound.

    Divergent points count as +1 (the pressure is +inf there)."""
    if not converges_at(system, q, t):
        return 1, None
    try:
        pv = pressure(system, q, t, tol=ptol)
    except BudgetError:
        if _partial_logsum(system, q, t, _MAX_TERMS) >= 0.0:
            return 1, None
        raise
    lo, hi = pv.value, pv.value + pv.tail_bound
    if lo >= 0.0:
        return 1, pv
    if hi < 0.0:
        return -1, pv
    return 0, pv  # |P| <= tail_bound <= ptol


def _bisect_root(system, path, lo, hi, tol, ptol, max_iter=200):
    """Bisection for P(path(tau)) = 0 on [lo, hi] with P>=0 at lo, P<0 at hi.

    Runs until |P| <= tol at the returned point; if the pressure jumps
    across zero (no root), the bracket collapses to fp resolution and the
    residual check fails, which signals a family without a zero.
    """
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if not lo < mid < hi:
            break
        sign, pv = _probe(system, *path(mid), ptol, tol)
        if sign == 0:
            return mid
        if pv is not None and abs(pv.value) <= tol:
            return mid
        if sign > 0:
            lo = mid
        else:
            hi = mid
    sign, pv = _probe(system, *path(hi), ptol, tol)
    if sign == 0 or (pv is not None and abs(pv.value) <= tol):
        return hi
    raise ValidationError(
        "pressure has no zero on the bracket; the finiteness condition fails for this family")


def beta(system, q, tol=1e-10, max_iter=200):
    """The unique t with P(q, t) = 0, located by certified bisection."""
    if not 0.0 <= q <= 1.0:
        raise ValidationError("beta is defined for q in [0, 1]")
    if tol < _TOL_FLOOR:
        raise ValidationError(f"tolerance floor is {_TOL_FLOOR}")
    ptol = 5e-13
    path = lambda t: (q, t)
    th = theta(system, q)

    hi = (th if th > _NEG_INF else 0.0) + 1.0
    step = 1.0
    for _ in range(200):
        sign, pv = _probe(system, q, hi, ptol, tol)
        if sign < 0:
            break
        if sign == 0:
            return hi
        step *= 2.0
        hi += step
    else:
        raise BudgetError(f"no negative pressure found expanding up to t={hi}")

    if th > _NEG_INF:
        lo = th
        sign, pv = _probe(system, q, lo, ptol, tol)
        if sign == 0:
            return lo
        if sign < 0:
            raise ValidationError(
                f"P({q}, t) < 0 already at the abscissa; finiteness condition fails")
    else:
        lo = hi - step
        offset = max(step, 1.0)
        for _ in range(200):
            sign, _ = _probe(system, q, lo, ptol, tol)
            if sign > 0:
                break
            if sign == 0:
                return lo
            offset *= 2.0
            lo -= offset
        else:
            raise BudgetError("no positive pressure found expanding downward")

    return _bisect_root(system, path, lo, hi, tol, ptol, max_iter)


def solve_q_r(system, r, tol=1e-10, max_iter=200):
    """The unique q_r in (0,1) with beta(q_r) = r q_r."""
    if r <= 0:
        raise ValidationError("order r must be positive")
    btol = max(min(0.01 * tol, 1e-11), _TOL_FLOOR)
    lo, hi = 0.0, 1.0
    g_lo = beta(system, lo, tol=btol)  # beta(0) > 0
    if g_lo <= 0:
        raise ValidationError("beta(0) must be positive")
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        g = beta(system, mid, tol=btol) - r * mid
        if abs(g) <= tol:
            return mid
        if g > 0:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-15:
            return mid
    raise BudgetError("q_r bisection did not reach tolerance")


def quantization_dimension(system, r, tol=1e-10, cross_check=True):
    """kappa_r solving sum_j (p_j s_j^r)^{kappa/(r+kappa)} = 1.

    Bisection runs over tau = kappa/(r+kappa) in (0,1), where the sum equals
    exp(P(tau, r tau)) and is strictly decreasing in tau.  The result is
    cross-checked against the temperature-function route beta(q_r)/(1-q_r).
    """
    if r <= 0:
        raise ValidationError("order r must be positive")
    if tol < _TOL_FLOOR:
        raise ValidationError(f"tolerance floor is {_TOL_FLOOR}")
    ptol = 5e-13
    path = lambda tau: (tau, r * tau)

    hi = 1.0
    sign, pv = _probe(system, *path(hi), ptol, tol)
    if sign >= 0:
        raise ValidationError("sum p_j s_j^r does not drop below 1 at tau=1")
    lo = 0.5
    for _ in range(200):
        sign, _ = _probe(system, *path(lo), ptol, tol)
        if sign > 0:
            break
        if sign == 0:
            break
        hi = lo
        lo *= 0.5
    else:
        raise BudgetError("no divergence found shrinking tau")

    tau = lo if sign == 0 else _bisect_root(system, path, lo, hi, tol, ptol)
    kappa = r * tau / (1.0 - tau)

    residual = kappa_residual(system, r, kappa)
    if residual > tol:
        raise BudgetError(f"defining-equation residual {residual} exceeds {tol}")
    if cross_check:
        # tau is q_r, so the temperature route reduces to beta(tau)/(1-tau)
        btol = max(min(0.01 * tol, 1e-11), _TOL_FLOOR)
        alt = beta(system, tau, tol=btol) / (1.0 - tau)
        if abs(kappa - alt) > 10.0 * tol:
            raise BudgetError(
                f"route disagreement: direct {kappa} vs temperature route {alt}")
    return kappa


def kappa_via_beta(system, r, tol=1e-10):
    """kappa_r through the temperature function: beta(q_r)/(1-q_r)."""
    qr = solve_q_r(system, r, tol=tol)
    btol = max(min(0.01 * tol, 1e-11), _TOL_FLOOR)
    return beta(system, qr, tol=btol) / (1.0 - qr)


def kappa_residual(system, r, kappa, tol=_TOL_FLOOR):
    """|sum_j (p_j s_j^r)^{kappa/(r+kappa)} - 1| with certified tail."""
    tau = kappa / (r + kappa)
    pv = pressure(system, tau, r * tau, tol=max(tol, _TOL_FLOOR))
    lo = abs(math.expm1(pv.value))
    hi = abs(math.expm1(pv.value + pv.tail_bound))
    return max(lo, hi)


def temperature_curve(system, grid, tol=1e-8):
    """beta on an increasing grid in [0,1] plus decrease/convexity diagnostics.

    Violations are reported in the returned curve, not raised: a tolerance
    that is too loose for the solver shows up as a bad margin.
    """
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or len(grid) < 2:
        raise ValidationError("grid must hold at least two points")
    if np.any(np.diff(grid) <= 0) or grid[0] < 0 or grid[-1] > 1:
        raise ValidationError("grid must be strictly increasing inside [0,1]")
    btol = max(min(0.01 * tol, 1e-10), _TOL_FLOOR)
    vals = np.array([beta(system, float(q), tol=btol) for q in grid])
    max_step = float(np.diff(vals).max())
    min_resid = math.inf
    for i in range(len(grid)):
        for k in range(i + 2, len(grid)):
            mid = 0.5 * (grid[i] + grid[k])
            hits = np.nonzero(np.abs(grid - mid) <= 1e-12)[0]
            if hits.size:
                resid = 0.5 * (vals[i] + vals[k]) - vals[hits[0]]
                min_resid = min(min_resid, float(resid))
    if math.isinf(min_resid):
        min_resid = 0.0
    return TemperatureCurve(grid, vals, tol, max_step, min_resid)


def validate_finiteness(system, q_grid=None, partial_terms=4096):
    """Check that every q in the grid admits u with 0 <= P(q, u) < inf.

    At q = 1 the normalization sum p_j = 1 gives P(1, 0) = 0 for free.  For
    other q the check walks u toward the abscissa, certifying P >= 0 through
    partial sums (which are lower bounds); failure raises.
    """
    if q_grid is None:
        # the condition typically degrades near q = 1, so probe that edge too
        q_grid = list(np.linspace(0.0, 1.0, 11)) + [0.97, 0.99]
    for q in q_grid:
        q = float(q)
        if q == 1.0:
            continue
        th = theta(system, q)
        ok = False
        if th == _NEG_INF:
            u = 0.0
            for k in range(60):
                if _partial_logsum(system, q, u, partial_terms) >= 0.0:
                    ok = True
                    break
                u -= 2.0 ** k
        else:
            for k in range(60):
                u = th + 2.0 ** (-k)
                if _partial_logsum(system, q, u, partial_terms) >= 0.0:
                    ok = True
                    break
            if not ok and converges_at(system, q, th):
                pv = pressure(system, q, th, tol=1e-12)
                ok = pv.value + pv.tail_bound >= 0.0
        if not ok:
            raise ValidationError(
                f"finiteness condition fails at q={q}: no u with P(q,u) >= 0 found")
