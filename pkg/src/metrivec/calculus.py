"""Primitives, pointwise differentiability probes and FTC residuals.

A derivative ``x_t`` of ``phi`` at ``t`` is probed through the ratios

    rho_m = d(0, phi(t + s_m) - phi(t) - s_m x_t) / |s_m|

along a shrinking step schedule.  Finite evidence for ``o(s)`` needs a
declared decision rule: the verdict is positive when the last three ratios
are below ``threshold`` times the first ratio and do not increase.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import DomainError
from .integration import Integrand, IntegrateConfig, IntegrationReport, integrate, riemann_sum
from .oscillation import Sampler, oscillation_sum
from .partitions import Partition, uniform, uniform_points
from .reals import encode_real
from .spaces import SparseVector

__all__ = [
    "PrimitiveTable",
    "primitive",
    "numerical_primitive",
    "DerivativeProbeReport",
    "differentiability_probe",
    "default_steps",
    "FTCReport",
    "ftc_check",
]


def _vec(x):
    if isinstance(x, SparseVector):
        return dict(x.data)
    return [float(v) for v in x]


@dataclass
class PrimitiveTable:
    """``F(t_j) = int_a^{t_j} f`` on a grid, with one report per grid point."""

    space: str
    grid: list
    values: list
    reports: list

    def __post_init__(self):
        if any(not lo < hi for lo, hi in zip(self.grid, self.grid[1:])):
            raise ValueError("primitive grid must increase strictly")

    @property
    def converged(self):
        return [True if r is None else r.converged for r in self.reports]

    def rows(self):
        """``(t, coordinates..., converged)`` rows for CSV output."""
        out = []
        for t, v, ok in zip(self.grid, self.values, self.converged):
            coords = list(v.data.values()) if isinstance(v, SparseVector) else [float(c) for c in v]
            out.append((float(t), *coords, ok))
        return out

    def to_dict(self):
        return {
            "space": self.space,
            "grid": [encode_real(t) for t in self.grid],
            "values": [_vec(v) for v in self.values],
            "converged": self.converged,
            "reports": [None if r is None else r.to_dict() for r in self.reports],
        }


def primitive(f: Integrand, a, b, G, config: IntegrateConfig | None = None) -> PrimitiveTable:
    """``F(t_j)`` on ``G`` equally spaced points of ``[a, b]`` (endpoints included).

    ``F(a)`` is the zero vector; every other value comes from
    :func:`~metrivec.integration.integrate` on ``[a, t_j]``.
    """
    G = int(G)
    if G < 2:
        raise DomainError("a primitive table needs G >= 2 grid points")
    grid = list(uniform_points(a, b, G - 1))
    values, reports = [f.space.zero()], [None]
    for t in grid[1:]:
        rep = integrate(f, a, t, config)
        values.append(rep.estimate)
        reports.append(rep)
    return PrimitiveTable(str(f.space), grid, values, reports)


def numerical_primitive(f: Integrand, a=None, n=2 ** 14):
    """``t -> f(midpoint partition of [a, t] with n intervals)``.

    With ``n`` fixed the result is a smooth function of ``t`` whenever ``f``
    is, which is what a finite-difference derivative probe needs.
    """
    a = f.domain[0] if a is None else a

    def F(t):
        if t == a:
            return f.space.zero()
        if t < a:
            raise DomainError(f"numerical primitive is defined for t >= {a!r}")
        return riemann_sum(f, uniform(a, t, n, "midpoint"))
    return F


def default_steps(first=1, last=6):
    """Steps ``10**-first .. 10**-last``."""
    return [10.0 ** -k for k in range(first, last + 1)]


@dataclass
class DerivativeProbeReport:
    t: object
    space: str
    candidate: object
    steps: list
    ratios: dict
    threshold: float
    side_verdicts: dict
    annotations: list = field(default_factory=list)

    def __post_init__(self):
        if any(r < 0 for rs in self.ratios.values() for r in rs):
            raise ValueError("ratios are nonnegative")
        if any(not x > y for x, y in zip(self.steps, self.steps[1:])):
            raise ValueError("step schedule must decrease strictly")

    @property
    def verdict(self):
        return all(self.side_verdicts.values())

    def to_dict(self):
        return {
            "t": encode_real(self.t),
            "space": self.space,
            "candidate": _vec(self.candidate),
            "steps": list(self.steps),
            "ratios": {k: list(v) for k, v in self.ratios.items()},
            "threshold": self.threshold,
            "side_verdicts": dict(self.side_verdicts),
            "verdict": self.verdict,
            "annotations": list(self.annotations),
        }


def _side_verdict(ratios, threshold, tol):
    if len(ratios) < 3:
        return False
    bar = threshold * ratios[0]
    tail = ratios[-3:]
    below = all(r == 0.0 or r < bar for r in tail)
    steady = all(y <= x * (1 + tol) + 1e-300 for x, y in zip(tail, tail[1:]))
    return below and steady


def differentiability_probe(phi, space, t, x_t, steps=None, threshold=1e-2, domain=None,
                            tol=1e-6) -> DerivativeProbeReport:
    """Probe ``phi(t + s) - phi(t) - s x_t = o(s)`` from both sides.

    At an endpoint of ``domain`` only the inward side is probed.  The verdict
    requires, on every probed side, that the last three ratios lie below
    ``threshold`` times the first ratio and are non-increasing up to a
    relative ``tol``.
    """
    steps = sorted((float(s) for s in (steps or default_steps())), reverse=True)
    if not steps or steps[-1] <= 0:
        raise DomainError("steps must be positive")
    sides = {"right": 1.0, "left": -1.0}
    if domain is not None:
        lo, hi = domain
        if not lo <= t <= hi:
            raise DomainError(f"t={t!r} outside [{lo!r}, {hi!r}]")
        if t == lo:
            sides.pop("left")
        if t == hi:
            sides.pop("right")
    base = phi(t)
    ratios, verdicts = {}, {}
    for name, sign in sides.items():
        rs = []
        for s in steps:
            step = sign * s
            rem = space.sub(space.sub(phi(t + step), base), space.scale(step, x_t))
            rs.append(space.dist0(rem) / s)
        ratios[name] = rs
        verdicts[name] = _side_verdict(rs, threshold, tol)
    return DerivativeProbeReport(t, str(space), x_t, steps, ratios, threshold, verdicts,
                                 list(space.annotations()))


@dataclass
class FTCReport:
    """``d(int_a^tau F', F(tau) - F(a))`` and the integration behind it."""

    space: str
    a: object
    tau: object
    residual: float
    integral: object
    difference: object
    integration: IntegrationReport
    precheck: dict | None = None

    @property
    def reliable(self):
        return self.integration.converged

    def to_dict(self):
        return {
            "space": self.space,
            "a": encode_real(self.a),
            "tau": encode_real(self.tau),
            "residual": self.residual,
            "reliable": self.reliable,
            "integral": _vec(self.integral),
            "difference": _vec(self.difference),
            "integration": self.integration.to_dict(),
            "precheck": self.precheck,
        }


def ftc_check(F, dF, space, a, tau, config: IntegrateConfig | None = None,
              precheck=False) -> FTCReport:
    """Compare ``int_a^tau F'`` with ``F(tau) - F(a)``.

    The caller asserts that ``F'`` is continuous on ``[a, tau]``.  With
    ``precheck`` the oscillation sum of ``F'`` on the finest uniform level
    is recorded as a sanity check of that assertion; it does not change
    the residual.
    """
    if not a < tau:
        raise DomainError(f"need a < tau, got a={a!r}, tau={tau!r}")
    g = dF if isinstance(dF, Integrand) else Integrand(dF, space, (a, tau), label="derivative")
    rep = integrate(g, a, tau, config)
    diff = space.sub(F(tau), F(a))
    residual = space.metric(rep.estimate, diff)
    pre = None
    if precheck:
        n = max((config or IntegrateConfig()).levels)
        prof = oscillation_sum(g, Partition(uniform_points(a, tau, n)), Sampler(points=4))
        pre = {"intervals": n, "oscillation_sum": prof.estimate}
    return FTCReport(str(space), a, tau, residual, rep.estimate, diff, rep, pre)
