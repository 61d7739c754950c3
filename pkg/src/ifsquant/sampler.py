"""Monte-Carlo sampling from the self-similar measure.

Symbols are drawn i.i.d. from the probability family by inverse-CDF lookup
over the countable alphabet; a word of depth ``n`` codes a cylinder of
diameter at most ``sup_ratio**n * diam(X)``, so truncating at the smallest
depth with ``sup_ratio**n * diam(X) <= eps`` leaves a certified spatial
error.  Each sample point is the image of the domain center under its
truncated word.  Everything is deterministic given the 64-bit seed
(numpy PCG64).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .ifs import GeometricTail

GENERATOR_ID = "numpy:PCG64"

_TABLE_CAP = 1 << 16


@dataclass(frozen=True)
class EmpiricalMeasure:
    """Uniformly weighted sample of the self-similar measure."""

    points: np.ndarray          # (count, d)
    seed: int
    coding_depth: int
    spatial_error: float
    requested_eps: float
    generator: str = GENERATOR_ID

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim == 1:
            pts = pts.reshape(-1, 1)
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)
        if self.spatial_error > self.requested_eps:
            raise ValidationError("spatial error exceeds the requested resolution")

    @property
    def count(self):
        return self.points.shape[0]

    @property
    def dim(self):
        return self.points.shape[1]

    @property
    def weights(self):
        n = self.count
        return np.full(n, 1.0 / n) if n else np.empty(0)


class _InverseCdf:
    """Inverse CDF over the countable alphabet: table lookup for the bulk,
    closed-form tail resolution for the rare deep draws."""

    def __init__(self, probs):
        self.probs = probs
        k = max(probs.prefix_len, 2)
        cdf = self._cdf_through(k)
        while 1.0 - cdf[-1] > 1e-16 and k < _TABLE_CAP:
            k *= 2
            cdf = self._cdf_through(k)
        self.cdf = cdf

    def _cdf_through(self, k):
        masses = np.array([self.probs.mass(j) for j in range(1, k + 1)])
        return np.cumsum(masses)

    def _beyond_table(self, u):
        probs = self.probs
        k = len(self.cdf)
        if isinstance(probs.tail, GeometricTail) and k >= probs.prefix_len:
            # smallest j with tail_sum(j) < 1-u, solved in closed form
            tail = probs.tail
            target = (1.0 - u) * (1.0 - tail.base) / tail.coeff
            j = int(math.floor(math.log(target) / math.log(tail.base)))
            j = max(j, k)
            while probs.tail_sum(j) >= 1.0 - u:
                j += 1
            while j > k and probs.tail_sum(j - 1) < 1.0 - u:
                j -= 1
            return j
        lo, hi = k, 2 * k
        while probs.tail_sum(hi) >= 1.0 - u:
            lo, hi = hi, 2 * hi
            if hi > 1 << 62:
                raise ValidationError("inverse CDF ran beyond representable indices")
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if probs.tail_sum(mid) < 1.0 - u:
                hi = mid
            else:
                lo = mid
        return hi

    def draw(self, u):
        u = np.asarray(u, dtype=float)
        out = np.searchsorted(self.cdf, u, side="right") + 1
        deep = u >= self.cdf[-1]
        if deep.any():
            out[deep] = [self._beyond_table(float(v)) for v in u[deep]]
        return out


def draw_symbol(probs, u):
    """Smallest j with CDF(j) > u, for a single uniform u in [0,1)."""
    if not 0.0 <= u < 1.0:
        raise ValidationError("u must lie in [0,1)")
    return int(_InverseCdf(probs).draw(np.array([u]))[0])


def coding_depth(system, eps):
    """Minimal n with sup_ratio**n * diam(X) <= eps."""
    if eps <= 0:
        raise ValidationError("eps must be positive")
    s, diam = system.sup_ratio, system.domain.diameter
    n = max(1, math.ceil(math.log(eps / diam) / math.log(s)))
    while s ** n * diam > eps:
        n += 1
    while n > 1 and s ** (n - 1) * diam <= eps:
        n -= 1
    return n


def sample(system, count, eps, seed):
    """Draw ``count`` i.i.d. points of the self-similar measure.

    Each point is S_{w|n}(x0) for the domain center x0 and the minimal depth
    n resolving ``eps``; the spatial error per point is sup_ratio**n*diam(X).
    """
    if count < 0:
        raise ValidationError("count must be nonnegative")
    depth = coding_depth(system, eps)
    err = system.sup_ratio ** depth * system.domain.diameter
    d = system.dim
    if count == 0:
        return EmpiricalMeasure(np.empty((0, d)), seed, depth, err, eps)
    rng = np.random.default_rng(seed)
    u = rng.random((count, depth))
    symbols = _InverseCdf(system.probs).draw(u)
    points = _apply_symbol_columns(system, symbols)
    return EmpiricalMeasure(points, seed, depth, err, eps)


def _apply_symbol_columns(system, symbols):
    """Vectorized S_{w_1} o ... o S_{w_n}(center) per row of symbols."""
    count, depth = symbols.shape
    d = system.dim
    max_sym = int(symbols.max())
    ratios = np.empty(max_sym + 1)
    trans = np.empty((max_sym + 1, d))
    orths = np.empty((max_sym + 1, d, d))
    for j in range(1, max_sym + 1):
        m = system.map_for(j)
        ratios[j] = m.ratio
        trans[j] = m.translation
        orths[j] = m.orthogonal
    x = np.tile(np.asarray(system.domain.center, dtype=float), (count, 1))
    identity_only = bool(np.all(orths[1:] == np.eye(d)))
    for k in range(depth - 1, -1, -1):
        idx = symbols[:, k]
        if identity_only:
            x = ratios[idx, None] * x + trans[idx]
        else:
            x = ratios[idx, None] * np.einsum("nij,nj->ni", orths[idx], x) + trans[idx]
    return x


def cylinder_mass(system, word):
    """mu(S_w(X)) = p_{w_1} ... p_{w_n} under strong separation."""
    out = 1.0
    for j in word:
        out *= system.probs.mass(j)
    return out


def cylinder_counts(system, empirical, words):
    """How many sample points fall in each cylinder S_w(X) (geometric test)."""
    from .ifs import image_ball, word_map

    counts = []
    pts = empirical.points
    for w in words:
        sim = word_map(system, w)
        if sim is None:
            counts.append(pts.shape[0])
            continue
        c, rad = image_ball(sim, system.domain)
        if system.domain.kind == "ball":
            inside = np.linalg.norm(pts - c, axis=1) <= rad + 1e-12
        else:
            lo = sim.apply(system.domain.center - system.domain.radius_or_halfwidths)
            hi = sim.apply(system.domain.center + system.domain.radius_or_halfwidths)
            lo, hi = np.minimum(lo, hi), np.maximum(lo, hi)
            inside = np.all((pts >= lo - 1e-12) & (pts <= hi + 1e-12), axis=1)
        counts.append(int(inside.sum()))
    return counts
