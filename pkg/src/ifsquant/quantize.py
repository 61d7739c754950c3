"""Lloyd-type quantization and the constructive word-set quantizer.

``lloyd`` alternates nearest-center assignment with per-cell generalized
centers on an empirical measure; the recorded distortion sequence is
non-increasing.  ``build_F_n`` expands the (N+1)-ary word tree of a
truncated system by the stopping rule

    gamma_w <= 1/(n rho) < gamma_{w^-},   rho = min_i gamma_i,

which yields an antichain of at most n words, and the constructive
quantizer places one center in each word's image cell.
"""

from __future__ import annotations

import math
import warnings
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .errors import BudgetError, ValidationError
from .thermo import pressure, quantization_dimension

_CHUNK = 1 << 21


@dataclass
class Quantizer:
    """A finite center set with estimated order-r distortion."""

    centers: np.ndarray
    r: float
    distortion_estimate: float
    distortion_stderr: float
    provenance: str
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        c = np.atleast_2d(np.asarray(self.centers, dtype=float))
        self.centers = c
        if len(c) < 1:
            raise ValidationError("a quantizer needs at least one center")
        if self.distortion_estimate < 0:
            raise ValidationError("distortion cannot be negative")


@dataclass(frozen=True)
class FnWordSet:
    """Stopping-rule antichain over the truncated alphabet."""

    words: tuple
    gammas: tuple
    rho: float
    n: int
    threshold: float
    eta: float | None = None
    alpha: float | None = None
    N: int | None = None

    @property
    def card(self):
        return len(self.words)


def _points_of(obj):
    pts = obj.points if hasattr(obj, "points") else np.asarray(obj, dtype=float)
    if pts.ndim == 1:
        pts = pts.reshape(-1, 1)
    return pts


def assign(points, centers):
    """Index of the nearest center per point; ties go to the lowest index."""
    pts = _points_of(points)
    ctr = _points_of(centers)
    if len(ctr) == 0:
        raise ValidationError("no centers to assign to")
    idx, _ = _nearest_bruteforce(pts, ctr)
    return idx


def _nearest_bruteforce(pts, ctr):
    n = len(pts)
    idx = np.empty(n, dtype=np.int64)
    dmin = np.empty(n)
    step = max(1, _CHUNK // max(len(ctr), 1))
    for s in range(0, n, step):
        blk = pts[s:s + step]
        d2 = ((blk[:, None, :] - ctr[None, :, :]) ** 2).sum(-1)
        k = d2.argmin(1)
        idx[s:s + len(blk)] = k
        dmin[s:s + len(blk)] = np.sqrt(d2[np.arange(len(blk)), k])
    return idx, dmin


def _nearest(pts, ctr):
    """Assignment for internal Lloyd loops (1D fast path; arbitrary ties)."""
    if pts.shape[1] == 1 and len(ctr) > 4:
        order = np.argsort(ctr[:, 0], kind="stable")
        sc = ctr[order, 0]
        mids = 0.5 * (sc[1:] + sc[:-1])
        pos = np.searchsorted(mids, pts[:, 0], side="left")
        idx = order[pos]
        dmin = np.abs(pts[:, 0] - ctr[idx, 0])
        return idx, dmin
    return _nearest_bruteforce(pts, ctr)


def distortion(empirical, centers, r):
    """Monte-Carlo mean and standard error of d(x, centers)^r."""
    pts = _points_of(empirical)
    ctr = _points_of(centers)
    if len(ctr) == 0:
        raise ValidationError("no centers")
    if len(pts) == 0:
        raise ValidationError("no sample points")
    _, dmin = _nearest_bruteforce(pts, ctr)
    vals = dmin ** r
    est = float(vals.mean())
    se = float(vals.std(ddof=1) / math.sqrt(len(vals))) if len(vals) > 1 else 0.0
    return est, se


# ---------------------------------------------------------------------------
# generalized centers
# ---------------------------------------------------------------------------

def _cost(points, weights, c, r):
    return float(weights @ np.linalg.norm(points - c, axis=1) ** r)

def r_center(points, weights=None, r=2.0, tol=1e-12, max_iter=8000):
    """argmin_c sum w_i |x_i - c|^r.

    Exact for r=2 (weighted mean) and in 1D for r=1 (weighted median) and
    0<r<1 (the cell cost is concave between data points, so some data point
    attains the minimum).  Otherwise a Weiszfeld-type reweighted fixed point
    with a coincidence guard and damping on stall.
    """
    pts = _points_of(points)
    n, d = pts.shape
    if n == 0:
        raise ValidationError("cannot center an empty cell")
    w = np.full(n, 1.0 / n) if weights is None else np.asarray(weights, dtype=float)
    if w.shape != (n,) or np.any(w <= 0):
        raise ValidationError("weights must be positive, one per point")
    if r <= 0:
        raise ValidationError("order r must be positive")

    if r == 2.0:
        return (w @ pts) / w.sum()
    if r < 1.0:
        if d != 1:
            raise ValidationError("centers for r < 1 are supported in one dimension only")
        costs = [_cost(pts, w, c, r) for c in pts]
        return pts[int(np.argmin(costs))].copy()
    if r == 1.0 and d == 1:
        order = np.argsort(pts[:, 0], kind="stable")
        cum = np.cumsum(w[order])
        k = int(np.searchsorted(cum, 0.5 * w.sum(), side="left"))
        return pts[order[min(k, n - 1)]].copy()

    scale = float(np.ptp(pts, axis=0).max())
    if scale == 0.0:
        return pts[0].copy()
    guard = 1e-14 * scale
    c = (w @ pts) / w.sum()
    best_c, best_f = c, _cost(pts, w, c, r)
    stall = 0
    for _ in range(max_iter):
        dist = np.linalg.norm(pts - c, axis=1)
        if r == 1.0:
            on_point = dist <= guard
            w0 = float(w[on_point].sum())
            away = ~on_point
            if not away.any():
                return c
            inv = w[away] / dist[away]
            t_step = (inv @ pts[away]) / inv.sum()
            if w0 > 0.0:
                resid = np.linalg.norm(inv @ (pts[away] - c))
                if resid <= w0:
                    return c  # subgradient condition: c is optimal
                lam = min(1.0, w0 / resid)
                c_new = (1.0 - lam) * t_step + lam * c
            else:
                c_new = t_step
        else:
            w_eff = w * np.maximum(dist, guard) ** (r - 2.0)
            c_new = (w_eff @ pts) / w_eff.sum()
        f_new = _cost(pts, w, c_new, r)
        halvings = 0
        while f_new > best_f * (1.0 + 1e-12) and halvings < 40:
            c_new = 0.5 * (c_new + c)  # damp genuine overshoots
            f_new = _cost(pts, w, c_new, r)
            halvings += 1
        move = float(np.linalg.norm(c_new - c))
        if f_new < best_f * (1.0 - 4e-15):
            best_c, best_f = c_new, f_new
            stall = 0
        else:
            stall += 1
        c = c_new
        # exit on positional convergence or a sustained cost plateau; the
        # cost is quadratically flat at the optimum, so a plateau means the
        # remaining positional drift no longer moves the objective
        if move <= tol * scale or stall >= 12:
            return best_c
    raise BudgetError("center iteration did not converge", best=best_c)


# ---------------------------------------------------------------------------
# Lloyd iteration
# ---------------------------------------------------------------------------

def _kmeanspp(pts, n, rng):
    count = len(pts)
    idx = int(rng.integers(count))
    centers = np.empty((n, pts.shape[1]))
    centers[0] = pts[idx]
    d2 = ((pts - centers[0]) ** 2).sum(1)
    for k in range(1, n):
        total = float(d2.sum())
        if total <= 0.0:
            i = int(rng.integers(count))
        else:
            i = int(rng.choice(count, p=d2 / total))
        centers[k] = pts[i]
        d2 = np.minimum(d2, ((pts - centers[k]) ** 2).sum(1))
    return centers


def _fix_empty_cells(pts, centers, idx, dmin, n):
    for _ in range(n):
        counts = np.bincount(idx, minlength=n)
        empty = np.nonzero(counts == 0)[0]
        if empty.size == 0:
            return centers, idx, dmin
        for k in empty:
            far = int(np.argmax(dmin))
            centers[k] = pts[far]
            idx, dmin = _nearest(pts, centers)
    return centers, idx, dmin


def _update_centers(pts, centers, idx, n, r):
    new = centers.copy()
    if r == 2.0:
        sums = np.zeros_like(centers)
        np.add.at(sums, idx, pts)
        counts = np.bincount(idx, minlength=n).astype(float)
        nz = counts > 0
        new[nz] = sums[nz] / counts[nz, None]
        return new
    for k in range(n):
        cell = pts[idx == k]
        if len(cell) == 0:
            continue
        old_cost = float((np.linalg.norm(cell - centers[k], axis=1) ** r).sum())
        try:
            ck = r_center(cell, None, r, tol=1e-12)
        except BudgetError as exc:
            ck = exc.best
        if float((np.linalg.norm(cell - ck, axis=1) ** r).sum()) <= old_cost:
            new[k] = ck
    return new


def _lloyd_once(pts, n, r, rng, max_iters, tol):
    centers = _kmeanspp(pts, n, rng)
    history = []
    prev = math.inf
    for _ in range(max_iters):
        idx, dmin = _nearest(pts, centers)
        centers, idx, dmin = _fix_empty_cells(pts, centers, idx, dmin, n)
        cost = float((dmin ** r).mean())
        history.append(cost)
        if prev - cost <= tol * max(cost, 1e-300):
            break
        prev = cost
        centers = _update_centers(pts, centers, idx, n, r)
    return centers, history


def lloyd(empirical, n, r, seed=0, restarts=1, max_iters=200, tol=1e-9):
    """Best-of-``restarts`` Lloyd quantizer on an empirical measure.

    Initialization is distance-weighted seeding; empty cells are reseeded at
    the sample point farthest from its center.  Deterministic given seed.
    """
    pts = _points_of(empirical)
    count = len(pts)
    if n < 1:
        raise ValidationError("need at least one center")
    if count == 0:
        raise ValidationError("empty empirical measure")
    if restarts < 1:
        raise ValidationError("need at least one restart")
    if n > count:
        warnings.warn("more centers than sample points; returning the samples")
        return Quantizer(pts.copy(), r, 0.0, 0.0, "lloyd",
                         meta={"seed": seed, "restarts": restarts, "n": n,
                               "degenerate": True, "history": (0.0,)})
    best = None
    for rep in range(restarts):
        rng = np.random.default_rng([seed, rep])
        centers, history = _lloyd_once(pts, n, r, rng, max_iters, tol)
        if best is None or history[-1] < best[1][-1]:
            best = (centers, history)
    centers, history = best
    est, se = distortion(pts, centers, r)
    return Quantizer(centers, r, est, se, "lloyd",
                     meta={"seed": seed, "restarts": restarts, "n": n,
                           "history": tuple(history)})


# ---------------------------------------------------------------------------
# constructive quantizer
# ---------------------------------------------------------------------------

def build_F_n(gammas, n, eta=None, alpha=None, N=None, max_words=1 << 20):
    """Antichain of words w over {1..len(gammas)} with gamma_w <= 1/(n rho)
    and gamma of the parent above the threshold.

    Every emitted word then satisfies gamma_w > 1/n and the antichain has at
    most n elements.  When the threshold reaches 1 the root already
    qualifies and the set is the singleton {empty word}.
    """
    g = np.asarray(gammas, dtype=float)
    if g.ndim != 1 or len(g) < 1:
        raise ValidationError("gamma vector must be one-dimensional and nonempty")
    if np.any(g <= 0.0) or np.any(g >= 1.0):
        raise ValidationError("gamma entries must lie in (0,1)")
    if float(g.sum()) >= 1.0:
        raise ValidationError("gamma entries must sum to less than 1")
    if n < 1:
        raise ValidationError("n must be at least 1")
    rho = float(g.min())
    threshold = 1.0 / (n * rho)
    if threshold >= 1.0:
        return FnWordSet(((),), (1.0,), rho, n, threshold, eta, alpha, N)
    words, gs = [], []
    queue = deque([((), 1.0)])
    while queue:
        w, gw = queue.popleft()
        for i in range(1, len(g) + 1):
            child = gw * g[i - 1]
            if child <= threshold:
                words.append(w + (i,))
                gs.append(child)
            else:
                queue.append((w + (i,), child))
        if len(words) + len(queue) > max_words:
            raise BudgetError("word-set expansion exceeded the cap")
    if len(words) > n:
        raise ValidationError("antichain bound violated; gamma vector is inconsistent")
    return FnWordSet(tuple(words), tuple(gs), rho, n, threshold, eta, alpha, N)


def constructive_quantizer(system, n, r, kappa=None, tol=1e-10,
                           samples=20000, eps=1e-6, seed=0):
    """One center per word cell of the truncated system.

    Given kappa above the quantization dimension, eta = kappa/(r+kappa);
    alpha is the midpoint between sum_j (p_j s_j^r)^eta and 1, the truncation
    level N is the smallest with (tail mass)^eta below (1-alpha)/2, and the
    word set comes from gamma_i = (ptilde_i stilde_i^r)^eta.  The reported
    distortion is Monte Carlo against a fresh sample; ``meta['bound_sum']``
    carries sum_{w in F_n} ptilde_w stilde_w^r for cross-checking the
    distortion bound shape.
    """
    from .ifs import truncate
    from .sampler import sample

    if n < 1:
        raise ValidationError("n must be at least 1")
    if system.is_finite:
        raise ValidationError("the constructive quantizer targets infinite systems")
    kappa_r = quantization_dimension(system, r, tol=max(tol, 1e-12))
    if kappa is None:
        kappa = 1.05 * kappa_r
    if kappa <= kappa_r:
        raise ValidationError(f"kappa={kappa} must exceed the dimension {kappa_r}")
    eta = kappa / (r + kappa)
    pv = pressure(system, eta, r * eta, tol=1e-12)
    series_sum = math.exp(pv.value + pv.tail_bound)
    if series_sum >= 1.0:
        raise ValidationError("sum (p s^r)^eta must drop below 1; raise kappa")
    alpha = 0.5 * (series_sum + 1.0)
    budget = 0.5 * (1.0 - alpha)
    N = max(system.j0, 1)
    while system.probs.tail_sum(N) ** eta >= budget:
        N += 1
        if N > 100_000:
            raise ValidationError("no truncation level fits the tail-mass budget")
    trunc = truncate(system, N)
    p_t = trunc.probs_tilde
    s_t = np.array([m.ratio for m in trunc.maps_tilde])
    gammas = (p_t * s_t ** r) ** eta
    fn = build_F_n(gammas, n, eta=eta, alpha=alpha, N=N)
    x0 = np.asarray(system.domain.center, dtype=float)
    centers = np.array([trunc.apply_word(w, x0) for w in fn.words])
    emp = sample(system, samples, eps, seed)
    est, se = distortion(emp, centers, r)
    bound_sum = float(sum(trunc.word_mass(w) * trunc.word_ratio(w) ** r for w in fn.words))
    return Quantizer(centers, r, est, se, "constructive",
                     meta={"kappa": kappa, "kappa_r": kappa_r, "eta": eta,
                           "alpha": alpha, "N": N, "card": fn.card,
                           "rho": fn.rho, "threshold": fn.threshold,
                           "bound_sum": bound_sum, "samples": samples,
                           "eps": eps, "seed": seed, "n": n})
