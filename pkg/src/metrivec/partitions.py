"""Partitions and tagged partitions of a compact interval.

Points are compared by exact equality of their values; callers that want
two partitions to share a point must build it from the same expression.
Points and tags may be floats, exact rationals (``Fraction``) or
:class:`~metrivec.reals.Irrational` instances.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import DomainError, InvariantError
from .reals import decode_real, encode_real, is_rational

__all__ = [
    "Partition",
    "TaggedPartition",
    "uniform",
    "uniform_points",
    "mesh",
    "refines",
    "merge",
    "retag",
    "TAG_RULES",
    "random_refinement",
    "random_partition",
]


def _width(lo, hi):
    return float(hi - lo)


def _clamp(s, lo, hi):
    """Keep a rounded float tag inside the closed interval ``[lo, hi]``."""
    if s < lo:
        return lo
    if s > hi:
        return hi
    return s


@dataclass(frozen=True)
class Partition:
    """Strictly increasing points ``a = t_0 < ... < t_N = b`` with ``N >= 1``."""

    points: tuple

    def __post_init__(self):
        pts = tuple(self.points)
        if len(pts) < 2:
            raise InvariantError("a partition needs at least two points")
        for lo, hi in zip(pts, pts[1:]):
            if not lo < hi:
                raise InvariantError(f"partition points must increase strictly ({lo!r} !< {hi!r})")
        object.__setattr__(self, "points", pts)

    @property
    def a(self):
        return self.points[0]

    @property
    def b(self):
        return self.points[-1]

    @property
    def n(self):
        return len(self.points) - 1

    def intervals(self):
        return list(zip(self.points, self.points[1:]))

    def widths(self):
        return [_width(lo, hi) for lo, hi in self.intervals()]

    @property
    def mesh(self):
        return max(self.widths())

    @property
    def partition(self):
        return self

    def to_dict(self):
        return {"points": [encode_real(t) for t in self.points]}

    @classmethod
    def from_dict(cls, data):
        return cls(tuple(decode_real(t) for t in data["points"]))


@dataclass(frozen=True)
class TaggedPartition:
    """A partition together with one tag ``s_i in [t_{i-1}, t_i]`` per interval."""

    partition: Partition
    tags: tuple

    def __post_init__(self):
        if not isinstance(self.partition, Partition):
            object.__setattr__(self, "partition", Partition(tuple(self.partition)))
        tags = tuple(self.tags)
        if len(tags) != self.partition.n:
            raise InvariantError(f"{len(tags)} tags for {self.partition.n} intervals")
        for i, ((lo, hi), s) in enumerate(zip(self.partition.intervals(), tags)):
            if not (lo <= s <= hi):
                raise InvariantError(f"tag {s!r} of interval {i} lies outside [{lo!r}, {hi!r}]")
        object.__setattr__(self, "tags", tags)

    @property
    def points(self):
        return self.partition.points

    @property
    def a(self):
        return self.partition.a

    @property
    def b(self):
        return self.partition.b

    @property
    def n(self):
        return self.partition.n

    @property
    def mesh(self):
        return self.partition.mesh

    def intervals(self):
        return self.partition.intervals()

    def widths(self):
        return self.partition.widths()

    def to_dict(self):
        return {
            "points": [encode_real(t) for t in self.points],
            "tags": [encode_real(s) for s in self.tags],
        }

    @classmethod
    def from_dict(cls, data):
        return cls(
            Partition(tuple(decode_real(t) for t in data["points"])),
            tuple(decode_real(s) for s in data["tags"]),
        )


# -- tag rules ------------------------------------------------------------------

def _left(lo, hi):
    return lo


def _right(lo, hi):
    return hi


def _midpoint(lo, hi):
    if is_rational(lo) and is_rational(hi):
        return (Fraction(lo) + Fraction(hi)) / 2
    return _clamp((float(lo) + float(hi)) / 2, lo, hi)


def _seeded_random(seed):
    rng = np.random.default_rng(seed)

    def rule(lo, hi):
        flo, fhi = float(lo), float(hi)
        return _clamp(flo + rng.random() * (fhi - flo), lo, hi)
    return rule


TAG_RULES = ("left", "right", "midpoint", "seeded-random")


def _resolve_rule(rule, seed=None):
    if callable(rule):
        return rule
    if rule == "left":
        return _left
    if rule == "right":
        return _right
    if rule == "midpoint":
        return _midpoint
    if rule == "seeded-random":
        return _seeded_random(0 if seed is None else seed)
    raise DomainError(f"unknown tag rule {rule!r}; expected one of {TAG_RULES}")


# -- constructors -----------------------------------------------------------------

def uniform_points(a, b, n):
    """Points ``a + i*(b - a)/n``; the last point is exactly ``b``."""
    if not a < b:
        raise DomainError(f"need a < b, got a={a!r}, b={b!r}")
    n = int(n)
    if n < 1:
        raise DomainError("number of intervals must be positive")
    if isinstance(a, Fraction) or isinstance(b, Fraction):
        return tuple(Fraction(a) + (Fraction(b) - Fraction(a)) * i / n for i in range(n + 1))
    a, b = float(a), float(b)
    pts = [a + (b - a) * i / n for i in range(n)]
    pts.append(b)
    return tuple(pts)


def uniform(a, b, n, tag_rule="midpoint", seed=None) -> TaggedPartition:
    """``n`` equal-width intervals of ``[a, b]`` tagged by ``tag_rule``.

    ``tag_rule`` is one of ``"left"``, ``"right"``, ``"midpoint"``,
    ``"seeded-random"`` (deterministic given ``seed``) or a callable
    ``(lo, hi) -> tag``.
    """
    part = Partition(uniform_points(a, b, n))
    rule = _resolve_rule(tag_rule, seed)
    return TaggedPartition(part, tuple(rule(lo, hi) for lo, hi in part.intervals()))


def mesh(delta) -> float:
    """Largest interval width."""
    return delta.partition.mesh


def refines(finer, coarser) -> bool:
    """True iff every point of ``coarser`` is a point of ``finer``."""
    p1, p2 = finer.partition, coarser.partition
    if p1.a != p2.a or p1.b != p2.b:
        raise DomainError("partitions of different intervals cannot be compared")
    return set(p2.points) <= set(p1.points)


def merge(delta: TaggedPartition, other, rule="midpoint", seed=None) -> TaggedPartition:
    """Union of the points of ``delta`` and ``other``, keeping ``delta``'s tags
    on intervals that survive unchanged and tagging new intervals by ``rule``."""
    p1, p2 = delta.partition, other.partition
    if p1.a != p2.a or p1.b != p2.b:
        raise DomainError("cannot merge partitions of different intervals")
    pts = tuple(sorted(set(p1.points) | set(p2.points)))
    kept = {iv: s for iv, s in zip(p1.intervals(), delta.tags)}
    fill = _resolve_rule(rule, seed)
    tags = []
    for iv in zip(pts, pts[1:]):
        tags.append(kept[iv] if iv in kept else fill(*iv))
    return TaggedPartition(Partition(pts), tuple(tags))


def retag(delta, tag_source, seed=None) -> TaggedPartition:
    """Same points, tags from ``tag_source(lo, hi)`` (or a named rule)."""
    rule = _resolve_rule(tag_source, seed)
    part = delta.partition
    return TaggedPartition(part, tuple(rule(lo, hi) for lo, hi in part.intervals()))


def random_partition(a, b, max_width, rng, tag_rule="seeded-random") -> TaggedPartition:
    """Random partition whose widths all stay strictly below ``max_width``."""
    a, b = float(a), float(b)
    if max_width <= 0:
        raise DomainError("max_width must be positive")
    # jittered grid: widths lie in (h/2, 3h/2) and 3h/2 < max_width
    m = int(np.ceil(1.5 * (b - a) / max_width)) + 1
    h = (b - a) / m
    inner = a + h * (np.arange(1, m) + (rng.random(m - 1) - 0.5) * 0.5)
    part = Partition((a, *(float(t) for t in inner), b))
    return retag(part, tag_rule, seed=int(rng.integers(2**31)))


def random_refinement(base, rng, extra=3, tag_rule="seeded-random") -> TaggedPartition:
    """Insert up to ``extra`` random points into each interval of ``base``."""
    pts = set(base.partition.points)
    for lo, hi in base.partition.intervals():
        k = int(rng.integers(0, extra + 1))
        flo, fhi = float(lo), float(hi)
        for u in rng.random(k):
            t = flo + u * (fhi - flo)
            if lo < t < hi:
                pts.add(t)
    part = Partition(tuple(sorted(pts)))
    seed = int(rng.integers(2**31))
    return retag(part, tag_rule, seed=seed)


def interval_index(partition, t):
    """Index of an interval of ``partition`` containing ``t``."""
    pts = partition.points
    i = bisect.bisect_right(pts, t) - 1
    return min(max(i, 0), len(pts) - 2)
