"""Oscillation functionals, Darboux probes and discontinuity-set measures.

All sup-type quantities are estimated from finitely many sample points:
seeded random points, interval endpoints and, for gallery functions, the
integrand's landmarks and witness points.  Estimates are therefore lower
bounds for the true oscillation; they are tight whenever the integrand's
landmarks realise the supremum (true for every gallery function).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError
from .integration import CriterionReport, Integrand
from .partitions import Partition, uniform_points
from .reals import encode_real

__all__ = [
    "Sampler",
    "OscillationProfile",
    "MeasureEstimate",
    "CellProfile",
    "interval_measure",
    "oscillation_on_interval",
    "oscillation_sum",
    "pointwise_oscillation",
    "default_windows",
    "window_points",
    "SupAccumulator",
    "darboux_probe",
    "cell_profile",
    "discontinuity_measure",
]


@dataclass(frozen=True)
class Sampler:
    """How sup-estimators pick points inside a window.

    Parameters
    ----------
    points : int
        Seeded uniform random points per window.
    seed : int
        Base seed; every window derives its own stream from it.
    witness : bool
        Include the integrand's landmarks and witness points.
    """

    points: int = 8
    seed: int = 0
    witness: bool = True

    def to_dict(self):
        return {"points": self.points, "seed": self.seed, "witness": self.witness}


@dataclass
class OscillationProfile:
    target: str
    space: str
    estimate: float
    windows: list
    window_estimates: list
    samples: int
    seed: int
    witness: tuple | None = None
    monotone: bool = True
    annotations: list = field(default_factory=list)
    details: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.estimate < 0:
            raise ValueError("oscillation estimates are nonnegative")

    def to_dict(self):
        return {
            "target": self.target,
            "space": self.space,
            "estimate": self.estimate,
            "bound_type": "lower",
            "windows": [[encode_real(lo), encode_real(hi)] for lo, hi in self.windows],
            "window_estimates": list(self.window_estimates),
            "samples": self.samples,
            "seed": self.seed,
            "witness": None if self.witness is None else [encode_real(x) for x in self.witness],
            "monotone": self.monotone,
            "annotations": list(self.annotations),
            "details": dict(self.details),
        }


@dataclass
class MeasureEstimate:
    """Bracket ``lower <= m(E_r) <= upper`` from a grid classification."""

    r: float
    grid: int
    lower: float
    upper: float
    radii: list
    counts: dict
    space: str = ""
    annotations: list = field(default_factory=list)

    def __post_init__(self):
        if not 0.0 <= self.lower <= self.upper:
            raise ValueError("measure bracket must satisfy 0 <= lower <= upper")

    def to_dict(self):
        return {"r": self.r, "grid": self.grid, "lower": self.lower, "upper": self.upper,
                "radii": list(self.radii), "counts": dict(self.counts), "space": self.space,
                "annotations": list(self.annotations)}


def interval_measure(intervals) -> float:
    """Lebesgue measure of a finite union of closed intervals."""
    ivs = []
    for iv in intervals:
        try:
            lo, hi = iv
        except (TypeError, ValueError):
            raise DomainError(f"malformed interval {iv!r}") from None
        if not lo <= hi:
            raise DomainError(f"malformed interval [{lo!r}, {hi!r}]")
        ivs.append((lo, hi))
    ivs.sort()
    total, cur_lo, cur_hi = 0.0, None, None
    for lo, hi in ivs:
        if cur_hi is None or lo > cur_hi:
            if cur_hi is not None:
                total += float(cur_hi - cur_lo)
            cur_lo, cur_hi = lo, hi
        elif hi > cur_hi:
            cur_hi = hi
    if cur_hi is not None:
        total += float(cur_hi - cur_lo)
    return total


# -- window sampling ------------------------------------------------------------

def window_points(f: Integrand, lo, hi, sampler: Sampler, rng):
    """Endpoints, seeded random points and witness-assisted points of ``[lo, hi]``."""
    pts = [lo, hi]
    flo, fhi = float(lo), float(hi)
    if sampler.points and fhi > flo:
        for u in rng.random(sampler.points):
            s = flo + u * (fhi - flo)
            if lo <= s <= hi:
                pts.append(s)
    if sampler.witness:
        pts.extend(f.landmarks(lo, hi))
        if f.has_witness:
            u = f.anchor(lo, hi)
            v = f.witness(u, float(hi - lo), 0.0, within=(lo, hi))
            pts.append(u)
            if v is not None:
                pts.append(v)
    return pts


class SupAccumulator:
    """Running ``max d(f(u), f(v))`` over a growing point set."""

    def __init__(self, f, space):
        self.f, self.space = f, space
        self.points, self.values = [], []
        self.best, self.pair = 0.0, None
        self._seen = set()

    def add(self, pts):
        fresh = []
        for p in pts:
            # the type is part of the key: Fraction(1, 2) and 0.5 are different points here
            key = (type(p), p)
            if key not in self._seen:
                self._seen.add(key)
                fresh.append(p)
        if not fresh:
            return self.best
        vals = list(self.f.values(fresh))
        for block, others in ((self.space.pairwise(vals), fresh),
                              (self.space.cross(vals, self.values), self.points)):
            if block.size and block.max() > self.best:
                i, j = np.unravel_index(int(np.argmax(block)), block.shape)
                self.best, self.pair = float(block[i, j]), (fresh[i], others[j])
        self.points.extend(fresh)
        self.values.extend(vals)
        return self.best


def _space_of(f, space):
    if space is None:
        return f.space, f
    return space, f.with_space(space)


def _interval_estimate(f, lo, hi, sampler, rng, space):
    acc = SupAccumulator(f, space)
    acc.add(window_points(f, lo, hi, sampler, rng))
    return acc.best, acc.pair, len(acc.points)


def oscillation_on_interval(f: Integrand, interval, sampler: Sampler | None = None,
                            space=None) -> OscillationProfile:
    """Lower estimate of ``sup {d(f(u), f(v)) : u, v in I}``."""
    sampler = sampler or Sampler()
    space, f = _space_of(f, space)
    lo, hi = interval
    if not lo <= hi:
        raise DomainError(f"malformed interval [{lo!r}, {hi!r}]")
    rng = np.random.default_rng(sampler.seed)
    est, pair, n = _interval_estimate(f, lo, hi, sampler, rng, space)
    return OscillationProfile("interval", str(space), est, [(lo, hi)], [est], n, sampler.seed,
                              pair, True, f.annotations())


def oscillation_sum(f: Integrand, partition, sampler: Sampler | None = None,
                    space=None) -> OscillationProfile:
    """``sum_i omega(f, [t_{i-1}, t_i]) (t_i - t_{i-1})``, accumulated left to right."""
    sampler = sampler or Sampler()
    space, f = _space_of(f, space)
    part = partition.partition
    rng = np.random.default_rng([sampler.seed, part.n])
    total, worst, count = 0.0, (0.0, None, None), 0
    for (lo, hi), w in zip(part.intervals(), part.widths()):
        est, pair, n = _interval_estimate(f, lo, hi, sampler, rng, space)
        total += est * w
        count += n
        if est > worst[0]:
            worst = (est, (lo, hi), pair)
    details = {"intervals": part.n, "mesh": part.mesh}
    if worst[1] is not None:
        details["worst_interval"] = [encode_real(worst[1][0]), encode_real(worst[1][1])]
        details["worst_pair"] = [encode_real(x) for x in worst[2]]
        details["worst_oscillation"] = worst[0]
    return OscillationProfile("partition", str(space), total, [(part.a, part.b)], [total],
                              count, sampler.seed, worst[2], True, f.annotations(), details)


def default_windows(a=0.0, b=1.0, coarse=3, fine=16):
    """Window radii ``2**-coarse .. 2**-fine`` times ``b - a``."""
    w = float(b) - float(a)
    return [w * 2.0 ** -k for k in range(coarse, fine + 1)]


def pointwise_oscillation(f: Integrand, t, radii=None, sampler: Sampler | None = None,
                          space=None, respect_resolution=True) -> OscillationProfile:
    """Estimate ``omega(f, t)`` along shrinking windows ``[t - r, t + r]``.

    Windows are clipped to the domain, which gives the one-sided forms at
    the endpoints.  Samples of inner windows are reused in outer ones, so
    the estimates are non-increasing as the radius shrinks.  With
    ``respect_resolution`` radii below the integrand's ``resolution`` (the
    scale below which a truncated gallery function no longer represents
    the modelled one) are dropped.  The reported value is the estimate of
    the smallest window.
    """
    sampler = sampler or Sampler()
    space, f = _space_of(f, space)
    a, b = f.domain
    if not a <= t <= b:
        raise DomainError(f"point {t!r} outside the domain [{a}, {b}]")
    radii = sorted((float(r) for r in (radii or default_windows(a, b))), reverse=True)
    if any(r <= 0 for r in radii):
        raise DomainError("window radii must be positive")
    res = getattr(f, "resolution", 0.0)
    if respect_resolution and res > 0:
        kept = [r for r in radii if r >= res]
        radii = kept or radii[:1]
    rng = np.random.default_rng([sampler.seed, 7])
    acc = SupAccumulator(f, space)
    acc.add([t])
    windows, ests, pairs = [], [], []
    for r in reversed(radii):
        lo, hi = max(a, t - r), min(b, t + r)
        acc.add(window_points(f, lo, hi, sampler, rng))
        windows.append((lo, hi))
        ests.append(acc.best)
        pairs.append(acc.pair)
    windows.reverse()
    ests.reverse()
    pairs.reverse()
    mono = all(x >= y for x, y in zip(ests, ests[1:]))
    details = {"radii": radii, "point": encode_real(t), "resolution": res,
               "stabilized": len(ests) < 2 or ests[-1] == ests[-2]}
    return OscillationProfile("point", str(space), ests[-1], windows, ests, len(acc.points),
                              sampler.seed, pairs[-1], mono, f.annotations(), details)


# -- Darboux -------------------------------------------------------------------

def darboux_probe(f: Integrand, eps=0.05, levels=None, a=None, b=None,
                  sampler: Sampler | None = None, space=None) -> CriterionReport:
    """Oscillation sums along uniform partitions with ``levels`` intervals.

    Passes at the first level whose estimate is below ``eps``.  Otherwise the
    smallest estimate over all levels is reported as the persistent lower
    bound (each estimate is a lower bound for that partition's sum).
    """
    if not eps > 0:
        raise DomainError("eps must be positive")
    sampler = sampler or Sampler()
    space, g = _space_of(f, space)
    a = g.domain[0] if a is None else a
    b = g.domain[1] if b is None else b
    levels = tuple(levels or (2 ** k for k in range(3, 13)))
    ests, meshes, worst = [], [], None
    passed = False
    for n in levels:
        prof = oscillation_sum(g, Partition(uniform_points(a, b, n)), sampler)
        ests.append(prof.estimate)
        meshes.append(prof.details["mesh"])
        worst = prof.details
        if prof.estimate < eps:
            passed = True
            break
    bound = ests[-1] if passed else min(ests)
    details = {"eps": eps, "levels": list(levels[: len(ests)]), "meshes": meshes,
               "estimates": ests, "passed": passed,
               "verdict": "pass" if passed else "fail",
               "persistent_bound": None if passed else bound}
    if worst and "worst_interval" in worst:
        details["worst_interval"] = worst["worst_interval"]
        details["worst_pair"] = worst["worst_pair"]
        details["worst_oscillation"] = worst["worst_oscillation"]
    return CriterionReport("darboux", str(space), bound, None, sum(levels[: len(ests)]),
                           sampler.seed, g.annotations(), details)


# -- discontinuity sets -------------------------------------------------------------

@dataclass
class CellProfile:
    """Per-cell window estimates on a uniform grid.

    ``outer[j]`` is the estimate on the window of radius ``radii[0]`` around
    the centre of cell ``j``; ``inner[j]`` the estimate on the smallest
    window (nested, so ``inner <= outer``).
    """

    a: float
    b: float
    grid: int
    radii: list
    outer: np.ndarray
    inner: np.ndarray
    space: str
    annotations: list

    @property
    def h(self):
        return (self.b - self.a) / self.grid

    def classify(self, r):
        """``"high"`` (confirmed >= r), ``"low"`` (outer window < r) or ``"open"``."""
        cls = np.full(self.grid, "open", dtype=object)
        cls[self.outer < r] = "low"
        cls[self.inner >= r] = "high"
        return cls

    def rows(self, r):
        """``(t, omega_estimate, class)`` for every cell centre."""
        cls = self.classify(r)
        return [(self.a + (j + 0.5) * self.h, float(self.inner[j]), str(cls[j]))
                for j in range(self.grid)]


def cell_profile(f: Integrand, grid=2 ** 12, radii=None, a=None, b=None,
                 sampler: Sampler | None = None, space=None) -> CellProfile:
    """Window estimates around every cell centre of a uniform grid.

    The default radii are ``h`` and ``h / 16`` with ``h`` the cell width.
    A window of radius ``h`` around a cell centre covers the cell and half
    of each neighbour.
    """
    sampler = sampler or Sampler()
    space, g = _space_of(f, space)
    a = g.domain[0] if a is None else a
    b = g.domain[1] if b is None else b
    grid = int(grid)
    if grid < 1:
        raise DomainError("grid must be a positive integer")
    h = (float(b) - float(a)) / grid
    radii = sorted((float(r) for r in (radii or (h, h / 16))), reverse=True)
    rng = np.random.default_rng([sampler.seed, grid])
    outer, inner = np.zeros(grid), np.zeros(grid)
    for j in range(grid):
        c = float(a) + (j + 0.5) * h
        acc = SupAccumulator(g, space)
        acc.add([c])
        for k, r in enumerate(reversed(radii)):
            lo, hi = max(a, c - r), min(b, c + r)
            acc.add(window_points(g, lo, hi, sampler, rng))
            if k == 0:
                inner[j] = acc.best
        outer[j] = acc.best
    return CellProfile(float(a), float(b), grid, radii, outer, inner, str(space),
                       g.annotations())


def discontinuity_measure(f: Integrand, r, grid=2 ** 12, radii=None, a=None, b=None,
                          sampler: Sampler | None = None, space=None,
                          cells: CellProfile | None = None) -> MeasureEstimate:
    """Bracket the measure of ``E_r = {t : omega(f, t) >= r}``.

    ``lower`` is the total width of cells whose smallest window already
    reaches ``r``; ``upper`` the total width of cells not confirmed below
    ``r`` on their largest window.  A precomputed ``cells`` profile can be
    passed to classify several thresholds without resampling.
    """
    if not r > 0:
        raise DomainError("r must be positive")
    if cells is None:
        cells = cell_profile(f, grid, radii, a, b, sampler, space)
    cls = cells.classify(r)
    high = int(np.count_nonzero(cls == "high"))
    low = int(np.count_nonzero(cls == "low"))
    h = cells.h
    return MeasureEstimate(float(r), cells.grid, high * h, (cells.grid - low) * h,
                           list(cells.radii), {"high": high, "low": low,
                                               "open": cells.grid - high - low},
                           cells.space, list(cells.annotations))
