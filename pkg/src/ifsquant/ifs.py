"""Infinite systems of contractive similarities on a compact domain.

A system is a countable family of similarity maps ``S_j(x) = s_j O_j x + b_j``
(``0 < s_j < 1``, ``O_j`` orthogonal) on an interval, box or ball ``X``,
together with a probability vector ``(p_j)`` with ``p_j > 0``.  Both the
ratios and the probabilities are given by a finite explicit prefix plus an
optional parametric tail (geometric ``c b^j`` or power law ``c j^{-b}``), so
that tail sums have closed forms.  Tail maps are positioned by a
deterministic placement rule that stacks their images along one axis with
positive gaps; the rule also supplies the hull maps used by finite
truncations.

Words are plain tuples of positive integers; ``apply_word`` composes maps
left to right, so ``(1, 2)`` means ``S_1(S_2(x))``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.special import zeta

from .errors import ValidationError

Word = tuple  # finite sequence of positive integers; () is the identity

_ORTHO_TOL = 1e-12


def _as_array(x, dim=None):
    a = np.asarray(x, dtype=float)
    if a.ndim == 0:
        a = a.reshape(1)
    if dim is not None and a.shape != (dim,):
        raise ValidationError(f"expected shape ({dim},), got {a.shape}")
    return a


# ---------------------------------------------------------------------------
# ambient domain
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AmbientDomain:
    """Compact ambient set X: an interval (d=1), a box or a ball (d=2)."""

    kind: str
    center: np.ndarray
    radius_or_halfwidths: np.ndarray

    def __post_init__(self):
        if self.kind not in ("interval", "box", "ball"):
            raise ValidationError(f"unknown domain kind {self.kind!r}")
        c = _as_array(self.center)
        r = _as_array(self.radius_or_halfwidths)
        object.__setattr__(self, "center", c)
        object.__setattr__(self, "radius_or_halfwidths", r)
        if self.kind == "interval":
            if c.shape != (1,) or r.shape != (1,):
                raise ValidationError("interval domains are one-dimensional")
        else:
            if c.shape != (2,):
                raise ValidationError("box/ball domains are two-dimensional")
            if self.kind == "ball" and r.shape != (1,):
                raise ValidationError("a ball takes a single radius")
            if self.kind == "box" and r.shape != (2,):
                raise ValidationError("a box takes one halfwidth per axis")
        if np.any(r <= 0):
            raise ValidationError("domain radii/halfwidths must be positive")
        c.setflags(write=False)
        r.setflags(write=False)

    @property
    def dim(self):
        return 1 if self.kind == "interval" else 2

    @property
    def diameter(self):
        if self.kind == "box":
            return 2.0 * float(np.linalg.norm(self.radius_or_halfwidths))
        return 2.0 * float(self.radius_or_halfwidths[0])

    def extent(self, axis=0):
        """Length of the domain's shadow on a coordinate axis."""
        if self.kind == "box":
            return 2.0 * float(self.radius_or_halfwidths[axis])
        return 2.0 * float(self.radius_or_halfwidths[0])

    def axis_interval(self, axis=0):
        h = 0.5 * self.extent(axis)
        c = float(self.center[axis])
        return c - h, c + h

    def extreme_points(self):
        """Corner points (interval endpoints / box corners / ball axis points)."""
        c, r = self.center, self.radius_or_halfwidths
        if self.kind == "interval":
            return np.array([[c[0] - r[0]], [c[0] + r[0]]])
        if self.kind == "box":
            sx, sy = r
            offs = np.array([[-sx, -sy], [-sx, sy], [sx, -sy], [sx, sy]])
            return c + offs
        R = r[0]
        offs = np.array([[-R, 0.0], [R, 0.0], [0.0, -R], [0.0, R]])
        return c + offs

    def contains(self, pts, slack=1e-9):
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        if self.kind == "ball":
            return bool(np.all(np.linalg.norm(pts - self.center, axis=1)
                               <= self.radius_or_halfwidths[0] + slack))
        lo = self.center - self.radius_or_halfwidths
        hi = self.center + self.radius_or_halfwidths
        return bool(np.all(pts >= lo - slack) and np.all(pts <= hi + slack))


# ---------------------------------------------------------------------------
# similarity maps
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ContractiveSimilarity:
    """x -> ratio * orthogonal @ x + translation with ratio in (0, 1)."""

    ratio: float
    orthogonal: np.ndarray
    translation: np.ndarray

    def __post_init__(self):
        if not (0.0 < self.ratio < 1.0):
            raise ValidationError(f"similarity ratio {self.ratio} not in (0,1)")
        O = np.atleast_2d(np.asarray(self.orthogonal, dtype=float))
        t = _as_array(self.translation)
        if O.shape != (t.shape[0], t.shape[0]):
            raise ValidationError("orthogonal part and translation disagree on dimension")
        if not np.allclose(O @ O.T, np.eye(O.shape[0]), atol=_ORTHO_TOL):
            raise ValidationError("orthogonal part is not orthogonal")
        O.setflags(write=False)
        t.setflags(write=False)
        object.__setattr__(self, "orthogonal", O)
        object.__setattr__(self, "translation", t)

    @property
    def dim(self):
        return self.translation.shape[0]

    def apply(self, x):
        """Apply to a point (d,) or a batch (n, d)."""
        x = np.asarray(x, dtype=float)
        return self.ratio * (x @ self.orthogonal.T) + self.translation

    def compose(self, other):
        """self o other (apply ``other`` first)."""
        return ContractiveSimilarity(
            ratio=self.ratio * other.ratio,
            orthogonal=self.orthogonal @ other.orthogonal,
            translation=self.apply(other.translation),
        )


def similarity_1d(ratio, translation, flip=False):
    O = np.array([[-1.0 if flip else 1.0]])
    return ContractiveSimilarity(ratio, O, np.array([float(translation)]))


def scaling_2d(ratio, translation):
    return ContractiveSimilarity(ratio, np.eye(2), _as_array(translation, 2))


def image_ball(sim, domain):
    """(center, radius) of a ball that equals (interval/ball) or contains (box)
    the image sim(X)."""
    c = sim.apply(domain.center)
    if domain.kind == "box":
        rad = sim.ratio * float(np.linalg.norm(domain.radius_or_halfwidths))
    else:
        rad = sim.ratio * float(domain.radius_or_halfwidths[0])
    return c, rad


def image_gap(sim_a, sim_b, domain):
    """Distance between sim_a(X) and sim_b(X).

    Exact for intervals and balls; a certified lower bound (circumscribed
    balls) for boxes.  Negative values indicate overlap of the bounding sets.
    """
    ca, ra = image_ball(sim_a, domain)
    cb, rb = image_ball(sim_b, domain)
    return float(np.linalg.norm(ca - cb)) - ra - rb


def image_contained(inner, outer, domain, slack=1e-12):
    """Whether inner(X) is a subset of outer(X).

    Intervals and balls are checked in absolute coordinates (no error
    amplification); box domains fall back to transforming corners into the
    outer frame, where the slack grows with 1/outer.ratio.
    """
    if domain.kind == "ball":
        ci, ri = image_ball(inner, domain)
        co, ro = image_ball(outer, domain)
        return float(np.linalg.norm(ci - co)) + ri <= ro + slack
    if domain.kind == "interval":
        pi = inner.apply(domain.extreme_points())
        po = outer.apply(domain.extreme_points())
        return bool(pi.min() >= po.min() - slack and pi.max() <= po.max() + slack)
    rel_ratio = inner.ratio / outer.ratio
    rel_orth = outer.orthogonal.T @ inner.orthogonal
    rel_trans = (outer.orthogonal.T @ (inner.translation - outer.translation)) / outer.ratio
    pts = domain.extreme_points()
    imgs = rel_ratio * (pts @ rel_orth.T) + rel_trans
    return domain.contains(imgs, slack=slack + 1e-13 / outer.ratio)


def map_contained_in_domain(sim, domain, slack=1e-12):
    """Whether sim(X) is a subset of X."""
    if domain.kind == "ball":
        c, rad = image_ball(sim, domain)
        return float(np.linalg.norm(c - domain.center)) + rad \
            <= float(domain.radius_or_halfwidths[0]) + slack
    return domain.contains(sim.apply(domain.extreme_points()), slack=slack)


# ---------------------------------------------------------------------------
# parametric tails
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GeometricTail:
    """Values coeff * base**j for indices j beyond the explicit prefix."""

    base: float
    coeff: float = 1.0

    def __post_init__(self):
        if not (0.0 < self.base < 1.0):
            raise ValidationError("geometric tail base must lie in (0,1)")
        if self.coeff <= 0:
            raise ValidationError("geometric tail coefficient must be positive")

    def value(self, j):
        return self.coeff * self.base ** j

    def log_values(self, j):
        return math.log(self.coeff) + np.asarray(j, dtype=float) * math.log(self.base)

    def tail_sum(self, n):
        """Sum of values over j > n (exact closed form)."""
        return self.coeff * self.base ** (n + 1) / (1.0 - self.base)

    def partial_sum(self, n):
        return self.coeff * self.base * (1.0 - self.base ** n) / (1.0 - self.base)

    def sup_beyond(self, n):
        return self.value(n + 1)


@dataclass(frozen=True)
class PowerLawTail:
    """Values coeff * j**(-exponent) for indices j beyond the explicit prefix."""

    exponent: float
    coeff: float = 1.0

    def __post_init__(self):
        if self.exponent <= 1.0:
            raise ValidationError("power-law tail needs exponent > 1 for summability")
        if self.coeff <= 0:
            raise ValidationError("power-law tail coefficient must be positive")

    def value(self, j):
        return self.coeff * float(j) ** (-self.exponent)

    def log_values(self, j):
        return math.log(self.coeff) - self.exponent * np.log(np.asarray(j, dtype=float))

    def tail_sum(self, n):
        # Hurwitz zeta: sum_{j>n} j^-b = zeta(b, n+1)
        return self.coeff * float(zeta(self.exponent, n + 1))

    def partial_sum(self, n):
        return self.coeff * (float(zeta(self.exponent, 1)) - float(zeta(self.exponent, n + 1)))

    def sup_beyond(self, n):
        return self.value(n + 1)


# ---------------------------------------------------------------------------
# map and probability families
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MapFamily:
    """Contraction ratios: explicit prefix maps plus an optional ratio tail.

    The tail only fixes the ratios s_j; the positions of tail maps come from
    the system's placement rule.
    """

    prefix: tuple
    tail: object = None  # GeometricTail | PowerLawTail | None

    def __post_init__(self):
        object.__setattr__(self, "prefix", tuple(self.prefix))
        if not self.prefix and self.tail is None:
            raise ValidationError("a map family needs a prefix or a tail")
        if self.sup_ratio >= 1.0:
            raise ValidationError("sup of contraction ratios must be < 1")

    @property
    def prefix_len(self):
        return len(self.prefix)

    @property
    def is_finite(self):
        return self.tail is None

    @property
    def sup_ratio(self):
        sup = max((m.ratio for m in self.prefix), default=0.0)
        if self.tail is not None:
            sup = max(sup, self.tail.sup_beyond(self.prefix_len))
        return sup

    def ratio(self, j):
        if j < 1:
            raise ValidationError("map indices start at 1")
        if j <= self.prefix_len:
            return self.prefix[j - 1].ratio
        if self.tail is None:
            raise ValidationError(f"index {j} beyond a finite family of size {self.prefix_len}")
        r = self.tail.value(j)
        if r <= 0.0:
            raise ValidationError(f"ratio for index {j} underflows to zero")
        return r

    def log_ratios(self, j):
        j = np.asarray(j)
        out = np.empty(j.shape, dtype=float)
        pre = j <= self.prefix_len
        if pre.any():
            vals = np.array([self.prefix[int(i) - 1].ratio for i in j[pre]])
            out[pre] = np.log(vals)
        if (~pre).any():
            if self.tail is None:
                raise ValidationError("index beyond a finite family")
            out[~pre] = self.tail.log_values(j[~pre])
        return out

    def ratio_tail_sum(self, n):
        """Sum of s_j over j > n; requires n >= prefix length."""
        if self.tail is None:
            return 0.0
        if n < self.prefix_len:
            extra = sum(self.prefix[i].ratio for i in range(n, self.prefix_len))
            return extra + self.tail.tail_sum(self.prefix_len)
        return self.tail.tail_sum(n)


@dataclass(frozen=True)
class ProbabilityFamily:
    """Probability masses p_j > 0 summing to one, prefix plus closed-form tail."""

    prefix: tuple
    tail: object = None

    def __post_init__(self):
        object.__setattr__(self, "prefix", tuple(float(p) for p in self.prefix))
        if any(not (0.0 < p < 1.0) for p in self.prefix):
            raise ValidationError("prefix masses must lie in (0,1)")
        total = sum(self.prefix) + (self.tail.tail_sum(len(self.prefix)) if self.tail else 0.0)
        if abs(total - 1.0) > 1e-12:
            raise ValidationError(f"masses sum to {total!r}, not 1")

    @property
    def prefix_len(self):
        return len(self.prefix)

    @property
    def is_finite(self):
        return self.tail is None

    def mass(self, j):
        if j < 1:
            raise ValidationError("indices start at 1")
        if j <= self.prefix_len:
            return self.prefix[j - 1]
        if self.tail is None:
            raise ValidationError(f"index {j} beyond a finite probability vector")
        return self.tail.value(j)

    def log_masses(self, j):
        j = np.asarray(j)
        out = np.empty(j.shape, dtype=float)
        pre = j <= self.prefix_len
        if pre.any():
            out[pre] = np.log([self.prefix[int(i) - 1] for i in j[pre]])
        if (~pre).any():
            if self.tail is None:
                raise ValidationError("index beyond a finite probability vector")
            out[~pre] = self.tail.log_values(j[~pre])
        return out

    def tail_sum(self, n):
        """Closed-form sum of p_j over j > n."""
        if self.tail is None:
            return float(sum(self.prefix[n:])) if n < self.prefix_len else 0.0
        if n < self.prefix_len:
            return float(sum(self.prefix[n:])) + self.tail.tail_sum(self.prefix_len)
        return self.tail.tail_sum(n)


# ---------------------------------------------------------------------------
# placement of tail maps
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class StackPlacement:
    """Stack tail images along one axis, from the high end downward.

    Image j gets an axis span of length s_j * extent; consecutive images are
    separated by gaps g_j = G * gap_decay**j, with G chosen so the gaps use a
    ``gap_fraction`` share of the free space.  Images accumulate at a limit
    point strictly inside (or at the low edge of) the domain, which yields a
    closed-form hull map for every truncation level.
    """

    domain: AmbientDomain
    ratio_tail: object
    prefix_len: int
    gap_fraction: float
    gap_decay: float
    axis: int = 0

    def __post_init__(self):
        if not (0.0 <= self.gap_fraction <= 1.0):
            raise ValidationError("gap_fraction must lie in [0,1]")
        if not (0.0 < self.gap_decay < 1.0):
            raise ValidationError("gap_decay must lie in (0,1)")
        if self.total_length >= self.extent + 1e-15 * self.extent:
            raise ValidationError("tail images do not fit inside the domain")

    @property
    def extent(self):
        return self.domain.extent(self.axis)

    @property
    def total_length(self):
        return self.extent * self.ratio_tail.tail_sum(self.prefix_len)

    @property
    def gap_budget(self):
        return max(self.extent - self.total_length, 0.0) * self.gap_fraction

    @property
    def _gap_coeff(self):
        phi = self.gap_decay
        return self.gap_budget * (1.0 - phi) / phi ** (self.prefix_len + 1)

    def gap(self, j):
        """Gap between image j and image j+1."""
        return self._gap_coeff * self.gap_decay ** j

    def _cum(self, j):
        """Total span (lengths + gaps) of images prefix_len+1 .. j."""
        m = self.prefix_len
        if j <= m:
            return 0.0
        lens = self.extent * (self.ratio_tail.tail_sum(m) - self.ratio_tail.tail_sum(j))
        phi = self.gap_decay
        gaps = self._gap_coeff * (phi ** (m + 1) - phi ** (j + 1)) / (1.0 - phi)
        return lens + gaps

    def right_edge(self, j):
        _, hi = self.domain.axis_interval(self.axis)
        return hi - self._cum(j - 1)

    def left_edge(self, j):
        return self.right_edge(j) - self.extent * self.ratio_tail.value(j)

    @property
    def accumulation_point(self):
        _, hi = self.domain.axis_interval(self.axis)
        return hi - (self.total_length + self.gap_budget)

    def _axis_similarity(self, ratio, span_center):
        d = self.domain.dim
        center = np.array(self.domain.center, dtype=float)
        center[self.axis] = span_center
        trans = center - ratio * np.asarray(self.domain.center)
        return ContractiveSimilarity(ratio, np.eye(d), trans)

    def map_for(self, j):
        if j <= self.prefix_len:
            raise ValidationError("placement only generates maps beyond the prefix")
        s = self.ratio_tail.value(j)
        if s <= 0.0:
            raise ValidationError(f"ratio for index {j} underflows to zero")
        span_center = 0.5 * (self.left_edge(j) + self.right_edge(j))
        return self._axis_similarity(s, span_center)

    def hull_for(self, n):
        """A contraction T with S_j(X) inside T(X) for every j > n."""
        if n < self.prefix_len:
            raise ValidationError("hull level must not cut into the explicit prefix")
        a = self.accumulation_point
        b = self.right_edge(n + 1)
        ratio = (b - a) / self.extent
        if not (0.0 < ratio < 1.0):
            raise ValidationError("hull span degenerates at this truncation level")
        return self._axis_similarity(ratio, 0.5 * (a + b))

    def min_prefix_gap(self, k):
        """Smallest pairwise gap among the first k placed images."""
        if k < 2:
            raise ValidationError("need at least two images for a gap")
        return min(self.gap(j) for j in range(self.prefix_len + 1, self.prefix_len + k))


# ---------------------------------------------------------------------------
# the system
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class InfiniteIFS:
    """A (possibly infinite) strongly separated similarity system with weights."""

    domain: AmbientDomain
    maps: MapFamily
    probs: ProbabilityFamily
    placement: StackPlacement | None = None
    j0: int = 1
    system_id: str = "system"
    separation_gap: float = 0.0

    def __post_init__(self):
        if self.maps.is_finite != self.probs.is_finite:
            raise ValidationError("maps and probabilities must both be finite or both infinite")
        if self.maps.is_finite and self.maps.prefix_len != self.probs.prefix_len:
            raise ValidationError("finite systems need one mass per map")
        if not self.maps.is_finite and self.placement is None:
            raise ValidationError("infinite systems need a placement rule for tail maps")
        for i, m in enumerate(self.maps.prefix):
            if m.dim != self.domain.dim:
                raise ValidationError(f"prefix map {i + 1} has wrong dimension")
            if not map_contained_in_domain(m, self.domain):
                raise ValidationError(f"prefix map {i + 1} does not map the domain into itself")

    @property
    def dim(self):
        return self.domain.dim

    @property
    def is_finite(self):
        return self.maps.is_finite

    @property
    def family_size(self):
        return self.maps.prefix_len if self.is_finite else None

    @property
    def sup_ratio(self):
        return self.maps.sup_ratio

    @property
    def claims_separation(self):
        """False for families placed with zero gaps (analysis-only systems)."""
        if self.placement is not None and self.placement.gap_budget == 0.0:
            return False
        return True

    def map_for(self, j):
        if j < 1:
            raise ValidationError("map indices start at 1")
        if j <= self.maps.prefix_len:
            return self.maps.prefix[j - 1]
        if self.maps.is_finite:
            raise ValidationError(
                f"index {j} beyond a finite family of size {self.maps.prefix_len}")
        return self.placement.map_for(j)

    def hull_for(self, n):
        if self.is_finite:
            raise ValidationError("finite systems have no tail to hull")
        return self.placement.hull_for(n)

    def with_id(self, system_id):
        return replace(self, system_id=system_id)


def map_for_index(system, j):
    """The j-th similarity of the family (prefix entry or tail-rule map)."""
    return system.map_for(j)


def apply_word(system, word, x):
    """S_w(x) with S_w = S_{w_1} o ... o S_{w_n}; the empty word is the identity."""
    x = np.asarray(x, dtype=float)
    scalar = x.ndim == 0
    if scalar:
        x = x.reshape(1)
    for j in reversed(word):
        x = system.map_for(j).apply(x)
    return float(x[0]) if scalar and system.dim == 1 else x


def word_ratio(system, word):
    """Product of the contraction ratios along the word."""
    out = 1.0
    for j in word:
        out *= system.maps.ratio(j)
    return out


def word_map(system, word):
    """The composed similarity S_w, or None for the empty word."""
    sim = None
    for j in word:
        m = system.map_for(j)
        sim = m if sim is None else sim.compose(m)
    return sim


def cylinder_diameter(system, word):
    return word_ratio(system, word) * system.domain.diameter


@dataclass(frozen=True)
class SeparationReport:
    passed: bool
    min_gap: float
    prefix_size: int
    depth: int
    pairs_checked: int
    worst_pair: tuple


def validate_separation(system, prefix_size, depth=1, max_words_per_level=4096):
    """Check pairwise gaps between word images over a finite prefix alphabet.

    Words of each length 1..depth over the alphabet {1..prefix_size} are
    enumerated and the minimal pairwise distance between same-length images
    is reported.  A positive minimum passes; overlap yields a failing report,
    not an exception.
    """
    if prefix_size < 2:
        raise ValidationError("separation needs at least two maps")
    if depth < 1:
        raise ValidationError("depth must be at least 1")
    min_gap = math.inf
    worst = ((), ())
    pairs = 0
    level = [((j,), system.map_for(j)) for j in range(1, prefix_size + 1)]
    for _ in range(depth):
        for a in range(len(level)):
            for b in range(a + 1, len(level)):
                g = image_gap(level[a][1], level[b][1], system.domain)
                pairs += 1
                if g < min_gap:
                    min_gap = g
                    worst = (level[a][0], level[b][0])
        if len(level) * prefix_size > max_words_per_level:
            break
        level = [(w + (j,), sim.compose(system.map_for(j)))
                 for (w, sim) in level for j in range(1, prefix_size + 1)]
    return SeparationReport(
        passed=bool(min_gap > 0.0),
        min_gap=float(min_gap),
        prefix_size=prefix_size,
        depth=depth,
        pairs_checked=pairs,
        worst_pair=worst,
    )


# ---------------------------------------------------------------------------
# finite truncations
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FiniteTruncation:
    """First N maps plus a hull map absorbing the whole tail.

    Entry N+1 is a contraction T with S_j(X) inside T(X) for all j > N, and
    carries the tail mass sum_{j>N} p_j.
    """

    base: InfiniteIFS
    N: int
    maps_tilde: tuple
    probs_tilde: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.probs_tilde, dtype=float)
        p.setflags(write=False)
        object.__setattr__(self, "probs_tilde", p)
        total = float(p.sum())
        if abs(total - 1.0) > 1e-12:
            raise ValidationError(f"truncated masses sum to {total!r}, not 1")

    @property
    def size(self):
        return self.N + 1

    def map_for(self, i):
        if not 1 <= i <= self.size:
            raise ValidationError(f"truncated index {i} outside 1..{self.size}")
        return self.maps_tilde[i - 1]

    def ratio(self, i):
        return self.map_for(i).ratio

    def mass(self, i):
        if not 1 <= i <= self.size:
            raise ValidationError(f"truncated index {i} outside 1..{self.size}")
        return float(self.probs_tilde[i - 1])

    def apply_word(self, word, x):
        x = np.asarray(x, dtype=float)
        for i in reversed(word):
            x = self.map_for(i).apply(x)
        return x

    def word_ratio(self, word):
        out = 1.0
        for i in word:
            out *= self.ratio(i)
        return out

    def word_mass(self, word):
        out = 1.0
        for i in word:
            out *= self.mass(i)
        return out


def truncate(system, N, hull=None, containment_checks=8):
    """Build the (N+1)-map truncation with hull map and closed-form tail mass.

    The hull defaults to the placement rule's map for level N.  Containment
    of the first few omitted images in the hull image is verified.
    """
    if system.is_finite:
        raise ValidationError("cannot truncate a finite system")
    if N < max(system.j0, 1):
        raise ValidationError(f"truncation level {N} below the family's j0={system.j0}")
    if hull is None:
        hull = system.hull_for(N)
    if not map_contained_in_domain(hull, system.domain):
        raise ValidationError("hull map does not map the domain into itself")
    for j in range(N + 1, N + 1 + containment_checks):
        try:
            sj = system.map_for(j)
        except ValidationError:
            break  # ratio underflow; deeper images are sub-fp specks inside the hull
        if not image_contained(sj, hull, system.domain):
            raise ValidationError(f"image of map {j} escapes the hull image")
    maps_tilde = tuple(system.map_for(j) for j in range(1, N + 1)) + (hull,)
    probs_tilde = np.array([system.probs.mass(j) for j in range(1, N + 1)]
                           + [system.probs.tail_sum(N)])
    return FiniteTruncation(base=system, N=N, maps_tilde=maps_tilde, probs_tilde=probs_tilde)
