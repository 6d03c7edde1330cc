"""Riemann sums, the sampled integral estimator and integrability probes.

Every probe here is one-sided: a reported separation is a certified lower
bound (its witness reproduces it), while a small separation is only evidence
that no violation was found among the sampled tagged partitions.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .errors import CapabilityError, DomainError
from .partitions import (
    TaggedPartition,
    random_partition,
    random_refinement,
    retag,
    uniform,
)
from .reals import encode_real
from .spaces import SparseVector

__all__ = [
    "Integrand",
    "riemann_sum",
    "IntegrateConfig",
    "IntegrationReport",
    "integrate",
    "default_levels",
    "CriterionReport",
    "adversarial_pair",
    "mesh_cauchy_probe",
    "refinement_cauchy_probe",
    "same_points_probe",
    "variation_bound_estimate",
]


class Integrand:
    """A function ``[a, b] -> X`` bound to its codomain space.

    Parameters
    ----------
    func : callable
        ``t -> vector`` of ``space``.  Must be deterministic.
    space : Space
        Codomain.
    domain : tuple
        ``(a, b)``, used for windows and default integration bounds.
    bound : float, optional
        Known ``L`` with ``d(0, f(t)) <= L`` on the domain.
    batch : callable, optional
        Vectorized evaluation for a 1-d float array of arguments, returning
        a ``(n, dim)`` array.  Only used when every argument is a float.
    """

    has_witness = False

    def __init__(self, func, space, domain=(0.0, 1.0), bound=None, label="", batch=None):
        self.func = func
        self.space = space
        self.domain = (domain[0], domain[1])
        self.bound = bound
        self.label = label or getattr(func, "__name__", "integrand")
        self.batch = batch

    def __call__(self, t):
        return self.func(t)

    def values(self, ts):
        """Evaluate at every point of ``ts``; floats go through ``batch`` if set."""
        ts = list(ts)
        if self.batch is None:
            return [self.func(t) for t in ts]
        fast = [i for i, t in enumerate(ts) if type(t) is float or isinstance(t, np.floating)]
        if len(fast) == len(ts):
            return self.batch(np.array(ts, dtype=float))
        out = np.empty((len(ts), self.space.dim))
        if fast:
            out[fast] = self.batch(np.array([ts[i] for i in fast], dtype=float))
        for i, t in enumerate(ts):
            if not (type(t) is float or isinstance(t, np.floating)):
                out[i] = self.func(t)
        return out

    def with_space(self, space):
        """The same function measured with another compatible metric."""
        if not space.compatible(self.space):
            raise CapabilityError(f"cannot view {self.space} values in {space}")
        clone = object.__new__(type(self))
        clone.__dict__.update(self.__dict__)
        clone.space = space
        return clone

    # -- witness support (overridden by gallery functions) ---------------
    def anchor(self, lo, hi):
        """A point of ``[lo, hi]`` where a large oscillation is expected."""
        return (float(lo) + float(hi)) / 2

    def witness(self, t, radius, sigma=0.0, within=None):
        raise CapabilityError(f"{self.label} exposes no discontinuity witness")

    def landmarks(self, lo, hi):
        """Extra points of ``[lo, hi]`` that sup-estimators should include."""
        return ()

    def jump_intervals(self, lo, hi, limit=64):
        """Short intervals straddling known jumps inside ``[lo, hi]``."""
        return []

    def annotations(self):
        return list(self.space.annotations())

    def describe(self):
        return {"label": self.label, "space": str(self.space), "bound": self.bound}


def riemann_sum(f: Integrand, delta: TaggedPartition):
    """``sum_i (t_i - t_{i-1}) f(s_i)`` accumulated from left to right."""
    return f.space.combine(delta.widths(), f.values(delta.tags))


def default_levels(coarse=3, fine=14):
    """Interval counts ``2**coarse .. 2**fine`` (mesh halving each level)."""
    return tuple(2 ** k for k in range(coarse, fine + 1))


@dataclass(frozen=True)
class IntegrateConfig:
    eps: float = 1e-4
    levels: tuple = default_levels()
    samples: int = 8
    seed: int = 0
    adversarial: bool = True

    def __post_init__(self):
        if not self.eps > 0:
            raise DomainError("tolerance eps must be positive")
        if not self.levels:
            raise DomainError("mesh schedule is empty")
        if self.samples < 2:
            raise DomainError("need at least two tag samples per level")

    def to_dict(self):
        return {"eps": self.eps, "levels": list(self.levels), "samples": self.samples,
                "seed": self.seed, "adversarial": self.adversarial}


@dataclass
class IntegrationReport:
    space: str
    interval: tuple
    estimate: object
    meshes: list
    separations: list
    samples: list
    converged: bool
    eps: float
    seed: int
    annotations: list = field(default_factory=list)
    witnesses: list = field(default_factory=list)

    @property
    def delta(self):
        """Finest mesh attempted."""
        return self.meshes[-1]

    @property
    def verdict(self):
        return "no-violation-found" if self.converged else "separation-persisted"

    def table(self):
        """Rows ``(mesh, worst_separation, samples)``."""
        return list(zip(self.meshes, self.separations, self.samples))

    def to_dict(self):
        return {
            "space": self.space,
            "interval": [encode_real(self.interval[0]), encode_real(self.interval[1])],
            "estimate": _vec_json(self.estimate),
            "meshes": list(self.meshes),
            "separations": list(self.separations),
            "samples": list(self.samples),
            "converged": self.converged,
            "verdict": self.verdict,
            "eps": self.eps,
            "delta": self.delta,
            "seed": self.seed,
            "annotations": list(self.annotations),
            "witnesses": list(self.witnesses),
        }


def _vec_json(x):
    if isinstance(x, SparseVector):
        return dict(x.data)
    return [float(v) for v in x]


def _tag_family(f, part, samples, rng, adversarial):
    """Named tag choices on a fixed set of points."""
    fam = [("left", retag(part, "left")), ("right", retag(part, "right")),
           ("midpoint", retag(part, "midpoint"))]
    if adversarial and f.has_witness:
        u, v = adversarial_pair(f, part)
        fam += [("anchor", u), ("witness", v)]
    k = 0
    while len(fam) < samples:
        fam.append((f"random{k}", retag(part, "seeded-random", seed=int(rng.integers(2**31)))))
        k += 1
    return fam


def integrate(f: Integrand, a=None, b=None, config: IntegrateConfig | None = None,
              **overrides) -> IntegrationReport:
    """Estimate ``int_a^b f`` and record the Cauchy diagnostics per mesh level.

    At every level the Riemann sums of several tag choices on the uniform
    partition are compared; the largest mutual distance is that level's
    separation.  The run stops at the first level whose separation is below
    ``eps``.  The estimate is the midpoint sum of the last level visited.
    """
    cfg = config or IntegrateConfig()
    if overrides:
        cfg = replace(cfg, **overrides)
    a = f.domain[0] if a is None else a
    b = f.domain[1] if b is None else b
    if not a < b:
        raise DomainError(f"need a < b, got a={a!r}, b={b!r}")
    space = f.space
    meshes, seps, counts, wits = [], [], [], []
    estimate, converged = None, False
    for n in cfg.levels:
        rng = np.random.default_rng([cfg.seed, int(n)])
        base = uniform(a, b, n, "left").partition
        fam = _tag_family(f, base, cfg.samples, rng, cfg.adversarial)
        sums = [riemann_sum(f, d) for _, d in fam]
        dist = space.pairwise(sums)
        i, j = np.unravel_index(int(np.argmax(dist)), dist.shape)
        meshes.append(base.mesh)
        seps.append(float(dist[i, j]))
        counts.append(len(fam))
        wits.append({"n": int(n), "pair": [fam[i][0], fam[j][0]]})
        estimate = sums[2]
        if seps[-1] < cfg.eps:
            converged = True
            break
    return IntegrationReport(
        space=str(space), interval=(a, b), estimate=estimate, meshes=meshes,
        separations=seps, samples=counts, converged=converged, eps=cfg.eps,
        seed=cfg.seed, annotations=f.annotations(), witnesses=wits,
    )


# ---------------------------------------------------------------------------
# integrability criteria


@dataclass
class CriterionReport:
    """Worst separation found by a probe, with a reproducible witness.

    ``witness`` holds either two tagged partitions (Cauchy-type criteria)
    or a collection of intervals (variation criterion), or is ``None``
    when nothing was sampled.
    """

    criterion: str
    space: str
    separation: float
    witness: object
    samples: int
    seed: int
    annotations: list = field(default_factory=list)
    details: dict = field(default_factory=dict)

    def reevaluate(self, f: Integrand) -> float:
        if self.witness is None:
            return 0.0
        if self.criterion == "variation":
            return _collection_value(f, self.witness)
        d1, d2 = self.witness
        return f.space.metric(riemann_sum(f, d1), riemann_sum(f, d2))

    def to_dict(self):
        if self.witness is None:
            wit = None
        elif self.criterion == "variation":
            wit = {"intervals": [[encode_real(c), encode_real(d)] for c, d in self.witness]}
        else:
            wit = {"first": self.witness[0].to_dict(), "second": self.witness[1].to_dict()}
        return {
            "criterion": self.criterion,
            "space": self.space,
            "separation": self.separation,
            "witness": wit,
            "samples": self.samples,
            "seed": self.seed,
            "annotations": list(self.annotations),
            "details": dict(self.details),
        }


def adversarial_pair(f: Integrand, partition, sigma=0.0):
    """Two tag choices on the same points built from ``f``'s witness oracle.

    The first partition is tagged at ``f.anchor`` of every interval, the
    second at the witness returned for that anchor inside the interval (or
    at the anchor itself when the oracle finds nothing).
    """
    if not f.has_witness:
        raise CapabilityError(f"{f.label} exposes no discontinuity witness")
    part = partition.partition
    us, vs = [], []
    for lo, hi in part.intervals():
        u = f.anchor(lo, hi)
        v = f.witness(u, float(hi - lo), sigma, within=(lo, hi))
        us.append(u)
        vs.append(u if v is None else v)
    return TaggedPartition(part, tuple(us)), TaggedPartition(part, tuple(vs))


def _worst_pair(f, candidates):
    sums = [riemann_sum(f, d) for d in candidates]
    dist = f.space.pairwise(sums)
    i, j = np.unravel_index(int(np.argmax(dist)), dist.shape)
    return float(dist[i, j]), (candidates[i], candidates[j])


def mesh_cauchy_probe(f: Integrand, a, b, delta, samples=16, seed=0,
                      adversarial=True) -> CriterionReport:
    """Sample pairs of tagged partitions with mesh below ``delta``."""
    if not delta > 0:
        raise DomainError("delta must be positive")
    rng = np.random.default_rng(seed)
    n_star = int(np.floor((float(b) - float(a)) / delta)) + 1
    base = uniform(a, b, n_star, "left").partition
    cands = [d for _, d in _tag_family(f, base, 4, rng, adversarial)]
    while len(cands) < samples:
        rule = ("seeded-random", "left", "right", "midpoint")[len(cands) % 4]
        cands.append(random_partition(a, b, delta, rng, rule))
    sep, wit = _worst_pair(f, cands)
    return CriterionReport("mesh-cauchy", str(f.space), sep, wit, len(cands), seed,
                           f.annotations(), {"delta": float(delta)})


def refinement_cauchy_probe(f: Integrand, base, samples=16, seed=0, extra=3,
                            adversarial=True) -> CriterionReport:
    """Sample pairs of tagged partitions refining ``base``."""
    rng = np.random.default_rng(seed)
    part = base.partition
    cands = [d for _, d in _tag_family(f, part, 4, rng, adversarial)]
    while len(cands) < samples:
        rule = ("seeded-random", "left", "right", "midpoint")[len(cands) % 4]
        cands.append(random_refinement(part, rng, extra, rule))
    sep, wit = _worst_pair(f, cands)
    return CriterionReport("refinement-cauchy", str(f.space), sep, wit, len(cands), seed,
                           f.annotations(), {"base_intervals": part.n})


def same_points_probe(f: Integrand, base, mode="seeded-random", samples=16,
                      seed=0) -> CriterionReport:
    """Compare tag choices sharing the points of ``base``.

    ``mode="adversarial"`` uses the integrand's witness oracle and raises
    :class:`CapabilityError` when there is none.
    """
    part = base.partition
    rng = np.random.default_rng(seed)
    if mode == "adversarial":
        u, v = adversarial_pair(f, part)
        cands = [u, v]
    elif mode == "seeded-random":
        cands = [retag(part, r) for r in ("left", "right", "midpoint")]
        while len(cands) < samples:
            cands.append(retag(part, "seeded-random", seed=int(rng.integers(2**31))))
    else:
        raise DomainError(f"unknown tag search {mode!r}")
    sep, wit = _worst_pair(f, cands)
    return CriterionReport("same-points", str(f.space), sep, wit, len(cands), seed,
                           f.annotations(), {"mode": mode, "intervals": part.n,
                                             "mesh": part.mesh})


def _collection_value(f, intervals):
    space = f.space
    if not intervals:
        return 0.0
    ends = f.values([d for _, d in intervals])
    starts = f.values([c for c, _ in intervals])
    ones = [1.0] * len(intervals)
    total = space.sub(space.combine(ones, ends), space.combine(ones, starts))
    return space.dist0(total)


def variation_bound_estimate(f: Integrand, a, b, collections=64, max_intervals=16,
                             seed=0) -> CriterionReport:
    """Lower bound for ``sup d(0, sum_i (f(d_i) - f(c_i)))`` over finite families
    of nonoverlapping intervals ``[c_i, d_i]`` of ``[a, b]``.

    Candidate intervals are the whole interval, the cells of a few uniform
    grids, random subintervals and any jump-straddling intervals the
    integrand advertises.  Each collection is grown greedily from a
    shuffled candidate list.
    """
    if collections < 1 or max_intervals < 1:
        raise DomainError("sampler bounds must be positive")
    rng = np.random.default_rng(seed)
    a_f, b_f = float(a), float(b)
    cands = [(a, b)]
    for n in (2, 4, 8, 16):
        cands.extend(uniform(a, b, n).intervals())
    cands.extend(f.jump_intervals(a, b, limit=4 * max_intervals))
    for _ in range(4 * max_intervals):
        c, d = sorted(a_f + (b_f - a_f) * rng.random(2))
        if c < d:
            cands.append((c, d))
    space = f.space
    jumps = {iv: space.sub(f(iv[1]), f(iv[0])) for iv in cands}
    best, best_col = 0.0, []
    for _ in range(collections):
        order = rng.permutation(len(cands))
        chosen, acc, val = [], space.zero(), 0.0
        for k in order:
            c, d = cands[k]
            if any(c < d2 and c2 < d for c2, d2 in chosen):
                continue
            trial = space.add(acc, jumps[(c, d)])
            tv = space.dist0(trial)
            if tv > val:
                chosen.append((c, d))
                acc, val = trial, tv
                if len(chosen) >= max_intervals:
                    break
        if val > best:
            best, best_col = val, sorted(chosen)
    return CriterionReport("variation", str(space), best, best_col or None,
                           collections, seed, f.annotations(),
                           {"max_intervals": max_intervals, "candidates": len(cands)})
