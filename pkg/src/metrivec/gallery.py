"""Concrete integrands with analytically known discontinuity structure.

Every gallery function is an :class:`~metrivec.integration.Integrand` that
also carries a *witness oracle*: given a point ``t``, a radius and a target
separation it returns a nearby point ``v`` with ``d(f(t), f(v))`` at least
that large, or ``None``.  Oscillation and adversarial-tag estimators use the
oracle (and the cheaper ``landmarks``) to make sup-type estimates tight.

Function ids
------------
``rationals:<Nmax>``
    ``f(r_n) = e_n`` for the first ``Nmax`` rationals of ``[0, 1]``, zero
    elsewhere.
``digits:<K>``
    ``f(t) = (c_1(t), ..., c_K(t), 0, ...)``, the binary digits of ``t``.
``ratind``
    ``e_1`` at rationals, zero at irrationals.
``smooth:<name>``
    Continuous calibration functions: ``const``, ``linear``, ``poly12``,
    ``trig``, ``mix``.

Rationality is decided by the type of the argument (see
:mod:`metrivec.reals`): only ``int`` and ``Fraction`` inputs are rational.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import CapabilityError, ConstructionError, DomainError
from .integration import Integrand, riemann_sum
from .oscillation import (
    Sampler,
    SupAccumulator,
    cell_profile,
    default_windows,
    discontinuity_measure,
    window_points,
)
from .partitions import Partition, TaggedPartition, uniform_points
from .reals import Irrational, encode_real, is_rational
from .spaces import DEFAULT_TRUNCATION, Euclidean, L1Gamma, Linf, Lp, OmegaSum, OmegaSup, Space

__all__ = [
    "GalleryFunction",
    "RationalEnumeration",
    "DigitFunction",
    "RationalIndicator",
    "SmoothFunction",
    "farey_enumeration",
    "rational_enumeration_function",
    "binary_digit_function",
    "rational_indicator_l1",
    "smooth_function",
    "smooth_calibration_set",
    "SMOOTH_NAMES",
    "function_from_id",
    "AdversaryResult",
    "adversary_partitions",
    "CoordinateContinuityReport",
    "coordinate_continuity_probe",
]

_SQRT2M1 = math.sqrt(2.0) - 1.0


def _window(t, radius, within, domain):
    lo, hi = within if within is not None else domain
    return max(lo, t - radius), min(hi, t + radius)


def _irrational_in(lo, hi, label="window"):
    """An irrational point strictly inside ``(lo, hi)`` (when representable)."""
    flo, fhi = float(lo), float(hi)
    v = flo + (fhi - flo) * _SQRT2M1
    if not flo < v < fhi:
        v = flo + (fhi - flo) / 2
    return Irrational(v, label)


def _dyadic_in(lo, hi):
    """A dyadic rational strictly inside ``(lo, hi)``."""
    flo, fhi = float(lo), float(hi)
    if not flo < fhi:
        return None
    k = max(0, math.ceil(-math.log2(fhi - flo)) + 1)
    while k < 1100:
        q = 2 ** k
        p = math.floor(flo * q) + 1
        r = Fraction(p, q)
        if lo < r < hi:
            return r
        k += 1
    return None


class GalleryFunction(Integrand):
    """An integrand with a witness oracle and a structure descriptor.

    Attributes
    ----------
    structure : str
        Human-readable description of the discontinuity set.
    truncation : dict
        Truncation parameters (``N_max``, ``K``, ``M``) of the desk-scale model.
    resolution : float
        Smallest window radius at which the truncated function still shows
        the behaviour of the modelled one (0 when no truncation applies).
    fine_scale : float
        Length below which the truncated function has no further structure.
    """

    has_witness = True
    structure = ""
    resolution = 0.0
    fine_scale = 0.0

    def __init__(self, func, space, label, bound, batch=None, truncation=None):
        super().__init__(func, space, (0.0, 1.0), bound, label, batch)
        self.truncation = dict(truncation or {})

    def witness(self, t, radius, sigma=0.0, within=None):
        lo, hi = _window(t, radius, within, self.domain)
        cands = [lo, hi, *self.landmarks(lo, hi)]
        return self._best(t, cands, sigma)

    def _best(self, t, cands, sigma):
        cands = [c for c in cands if c != t]
        if not cands:
            return None
        dist = self.space.distances(self(t), self.values(cands))
        k = int(np.argmax(dist))
        if dist[k] > 0 and dist[k] >= sigma:
            return cands[k]
        return None

    def describe(self):
        out = super().describe()
        out.update({"structure": self.structure, "truncation": dict(self.truncation),
                    "resolution": self.resolution})
        return out


def _coords_space(space, need):
    if space.representation not in ("sequence", "dense"):
        raise CapabilityError(f"{space} is not a coordinate space")
    if space.dim < need:
        raise CapabilityError(f"{space} has {space.dim} coordinates, {need} needed")


# -- Example: enumerated rationals --------------------------------------------

def farey_enumeration(n_max):
    """The first ``n_max`` rationals of ``[0, 1]`` ordered by denominator.

    ``0, 1, 1/2, 1/3, 2/3, 1/4, 3/4, 1/5, ...``: every reduced fraction
    ``p/q`` appears once, ``q`` ascending, then ``p`` ascending.
    """
    if n_max < 1:
        raise DomainError("n_max must be positive")
    out = [Fraction(0), Fraction(1)]
    q = 2
    while len(out) < n_max:
        out.extend(Fraction(p, q) for p in range(1, q) if math.gcd(p, q) == 1)
        q += 1
    return out[:n_max]


class RationalEnumeration(GalleryFunction):
    """``f(r_n) = e_n`` for ``n <= N_max`` and ``f = 0`` elsewhere."""

    def __init__(self, n_max=1000, space=None):
        n_max = int(n_max)
        space = space or Lp(2, max(DEFAULT_TRUNCATION, n_max))
        if space.representation != "sequence":
            raise CapabilityError(f"rationals:{n_max} needs a sequence space, got {space}")
        if space.dim < n_max:
            raise CapabilityError(f"rationals:{n_max} needs M >= {n_max}, got {space}")
        self.n_max = n_max
        self.rationals = farey_enumeration(n_max)
        self.index = {r: n for n, r in enumerate(self.rationals, start=1)}
        order = sorted(range(n_max), key=lambda i: self.rationals[i])
        self._sorted = [self.rationals[i] for i in order]
        self._sorted_f = np.array([float(r) for r in self._sorted])
        self._sorted_n = np.array(order) + 1
        gaps = np.diff(self._sorted_f)
        self.resolution = float(gaps.max())
        self.fine_scale = float(gaps.min())
        self.structure = (f"jumps at the first {n_max} enumerated rationals; "
                          "the untruncated function is discontinuous everywhere")
        dim = space.dim
        super().__init__(self._eval, space, f"rationals:{n_max}", space.dist0(space.basis(1)),
                         batch=lambda ts: np.zeros((len(ts), dim)),
                         truncation={"N_max": n_max, "M": dim})

    def _eval(self, t):
        if is_rational(t):
            n = self.index.get(Fraction(t))
            if n is not None:
                return self.space.basis(n)
        return self.space.zero()

    def rank(self, t):
        """Enumeration index of ``t``, or ``None``."""
        return self.index.get(Fraction(t)) if is_rational(t) else None

    def enumerated_in(self, lo, hi, limit=4, open_=False):
        """Lowest-index enumerated rationals of ``[lo, hi]`` (index order)."""
        i0 = int(np.searchsorted(self._sorted_f, float(lo), "right" if open_ else "left"))
        i1 = int(np.searchsorted(self._sorted_f, float(hi), "left" if open_ else "right"))
        if i1 <= i0:
            return []
        ns = np.sort(self._sorted_n[i0:i1])[:limit]
        return [self.rationals[n - 1] for n in ns]

    def anchor(self, lo, hi):
        return _irrational_in(lo, hi, "anchor")

    def landmarks(self, lo, hi):
        return [*self.enumerated_in(lo, hi), _irrational_in(lo, hi)]

    def witness(self, t, radius, sigma=0.0, within=None):
        lo, hi = _window(t, radius, within, self.domain)
        if self.rank(t) is not None:
            return self._best(t, [_irrational_in(lo, hi)], sigma)
        # prefer the interior so neighbouring intervals get distinct rationals
        cands = self.enumerated_in(lo, hi, 1, open_=True) or self.enumerated_in(lo, hi, 1)
        return self._best(t, cands, sigma)

    def exclusion_radius(self, t, n):
        """Distance from ``t`` to the nearest of ``r_1 .. r_n`` other than ``t``."""
        ft = float(t)
        return min(abs(float(r) - ft) for r in self.rationals[:n] if r != t)

    def jump_intervals(self, lo, hi, limit=64):
        eta = self.fine_scale / 4
        return [(float(r) - eta, r) for r in self.enumerated_in(lo, hi, limit)
                if float(r) - eta >= float(lo)]


def rational_enumeration_function(n_max=1000, space=None) -> RationalEnumeration:
    return RationalEnumeration(n_max, space)


# -- Example: binary digits ---------------------------------------------------

class DigitFunction(GalleryFunction):
    """``t -> (c_1(t), c_2(t), ..., c_K(t))`` with terminating expansions.

    Dyadic rationals use the expansion that ends in zeros, so every ``c_k``
    is right-continuous; ``t = 1`` maps to all ones.  ``select`` restricts
    the output to some digit indices (written to coordinates 1, 2, ...).
    """

    def __init__(self, K=24, space=None, select=None):
        K = int(K)
        if not 1 <= K <= 52:
            raise DomainError("digit count K must lie in 1..52")
        self.K = K
        self.select = tuple(range(1, K + 1)) if select is None else tuple(int(k) for k in select)
        if any(not 1 <= k <= K for k in self.select):
            raise DomainError(f"selected digits must lie in 1..{K}")
        space = space or Linf(max(DEFAULT_TRUNCATION, K))
        _coords_space(space, len(self.select))
        self._ks = np.array(self.select)
        self.resolution = math.ldexp(1.0, -K)
        self.fine_scale = math.ldexp(1.0, -K)
        self.structure = f"jumps at dyadic rationals of level <= {K}"
        label = f"digits:{K}" if select is None else f"digits:{K}[{','.join(map(str, self.select))}]"
        bound = space.dist0(space.from_coords({i: 1.0 for i in range(1, len(self.select) + 1)}))
        super().__init__(self._eval, space, label, bound, batch=self._batch,
                         truncation={"K": K, "M": space.dim})

    def digits(self, t):
        """Digits ``c_k(t)`` for the selected ``k``."""
        if t == 1:
            return [1] * len(self.select)
        if not 0 <= t <= 1:
            raise DomainError(f"digit function is defined on [0, 1], got {t!r}")
        if is_rational(t):
            x = Fraction(t)
            return [math.floor(x * 2 ** k) % 2 for k in self.select]
        x = float(t)
        return [int(math.floor(math.ldexp(x, k))) % 2 for k in self.select]

    def _eval(self, t):
        return self.space.from_coords({i: c for i, c in enumerate(self.digits(t), start=1)})

    def annotations(self):
        out = super().annotations()
        if isinstance(self.space, Linf):
            # integrability into the sup norm is disputed: tag separation stays at 1
            out.append("digit-linf-integrability-disputed")
        return out

    def _batch(self, ts):
        out = np.zeros((len(ts), self.space.dim))
        d = np.floor(np.ldexp(ts[:, None], self._ks[None, :])) % 2
        d[ts == 1.0] = 1.0
        out[:, : len(self.select)] = d
        return out

    def _lowest_dyadic(self, lo, hi, open_):
        flo, fhi = float(lo), float(hi)
        for k in range(self.K + 1):
            q = math.ldexp(1.0, k)
            j = math.floor(flo * q) + 1 if open_ else math.ceil(flo * q)
            p = j / q
            if p < fhi or (not open_ and p <= fhi):
                return p
        return None

    def anchor(self, lo, hi):
        p = self._lowest_dyadic(lo, hi, open_=True)
        return p if p is not None else (float(lo) + float(hi)) / 2

    def landmarks(self, lo, hi):
        out = []
        step = math.ldexp(1.0, -self.K)
        for open_ in (True, False):
            p = self._lowest_dyadic(lo, hi, open_)
            if p is not None:
                out.extend((p, max(float(lo), p - step)))
        return list(dict.fromkeys(out))

    def witness(self, t, radius, sigma=0.0, within=None):
        """Flip the most significant digit that has a breakpoint in the window."""
        lo, hi = _window(t, radius, within, self.domain)
        p = self._lowest_dyadic(lo, hi, open_=True)
        if p is None:
            return None
        v = p if float(t) < p else max(float(lo), p - math.ldexp(1.0, -self.K))
        return self._best(t, [v], sigma)

    def jump_intervals(self, lo, hi, limit=64):
        step = math.ldexp(1.0, -self.K)
        flo, fhi = float(lo), float(hi)
        out = []
        for k in range(1, self.K + 1):
            q = 2 ** k
            for j in range(math.floor(flo * q) + 1, math.floor(fhi * q) + 1):
                p = j / q
                if j % 2 and flo <= p - step and p <= fhi:
                    out.append((p - step, p))
                if len(out) >= limit:
                    return out
        return out


def binary_digit_function(K=24, space=None, select=None) -> DigitFunction:
    return DigitFunction(K, space, select)


# -- rational indicator --------------------------------------------------------

class RationalIndicator(GalleryFunction):
    """``e_1`` at rational inputs and zero elsewhere; nowhere continuous."""

    structure = "discontinuous at every point"

    def __init__(self, space=None):
        space = space or L1Gamma()
        if space.representation == "sparse":
            self._e1 = space.basis("1")
            batch = None
        else:
            self._e1 = space.basis(1)
            dim = space.dim
            batch = lambda ts: np.zeros((len(ts), dim))  # noqa: E731
        super().__init__(self._eval, space, "ratind", space.dist0(self._e1), batch=batch)

    def _eval(self, t):
        return self._e1 if is_rational(t) else self.space.zero()

    def anchor(self, lo, hi):
        return _irrational_in(lo, hi, "anchor")

    def landmarks(self, lo, hi):
        r = _dyadic_in(lo, hi)
        return [_irrational_in(lo, hi)] + ([r] if r is not None else [])

    def witness(self, t, radius, sigma=0.0, within=None):
        lo, hi = _window(t, radius, within, self.domain)
        if is_rational(t):
            return self._best(t, [_irrational_in(lo, hi)], sigma)
        r = _dyadic_in(lo, hi)
        return None if r is None else self._best(t, [r], sigma)


def rational_indicator_l1(space=None) -> RationalIndicator:
    return RationalIndicator(space)


# -- smooth calibration functions ------------------------------------------------

# name -> (coordinates, antiderivatives, derivatives, coordinate bounds on [0, 1])
_SMOOTH = {
    "const": ((lambda t: np.ones_like(t), lambda t: 0.5 + 0 * t),
              (lambda t: t, lambda t: 0.5 * t),
              (lambda t: 0 * t, lambda t: 0 * t),
              (1.0, 0.5)),
    "linear": ((lambda t: t,), (lambda t: t * t / 2,), (lambda t: np.ones_like(t),), (1.0,)),
    "poly12": ((lambda t: t, lambda t: t * t),
               (lambda t: t * t / 2, lambda t: t ** 3 / 3),
               (lambda t: np.ones_like(t), lambda t: 2 * t),
               (1.0, 1.0)),
    "trig": ((np.sin, np.cos),
             (lambda t: 1 - np.cos(t), np.sin),
             (np.cos, lambda t: -np.sin(t)),
             (math.sin(1.0), 1.0)),
    "mix": ((lambda t: t, lambda t: t * t, np.sin, np.cos, lambda t: np.exp(-t)),
            (lambda t: t * t / 2, lambda t: t ** 3 / 3, lambda t: 1 - np.cos(t), np.sin,
             lambda t: 1 - np.exp(-t)),
            (lambda t: np.ones_like(t), lambda t: 2 * t, np.cos, lambda t: -np.sin(t),
             lambda t: -np.exp(-t)),
            (1.0, 1.0, math.sin(1.0), 1.0, 1.0)),
}

SMOOTH_NAMES = tuple(_SMOOTH)


class SmoothFunction(GalleryFunction):
    """Continuous calibration integrand with analytic integral and derivative.

    ``antiderivative(t)`` is the primitive vanishing at 0 and ``derivative(t)``
    the coordinatewise derivative, both as vectors of ``space``.
    """

    structure = "continuous everywhere"

    def __init__(self, name="poly12", space=None):
        if name not in _SMOOTH:
            raise DomainError(f"unknown smooth function {name!r}; expected one of {SMOOTH_NAMES}")
        self.name = name
        coords, prims, ders, sups = _SMOOTH[name]
        self._coords, self._prims, self._ders = coords, prims, ders
        self.ncoords = len(coords)
        space = space or Euclidean(self.ncoords)
        _coords_space(space, self.ncoords)
        bound = space.dist0(space.from_coords({i: s for i, s in enumerate(sups, start=1)}))
        super().__init__(self._eval, space, f"smooth:{name}", bound, batch=self._batch)

    def _stack(self, fns, ts):
        out = np.zeros((len(ts), self.space.dim))
        for i, g in enumerate(fns):
            out[:, i] = g(ts)
        return out

    def _batch(self, ts):
        return self._stack(self._coords, ts)

    def _vector(self, fns, t):
        row = self._stack(fns, np.array([float(t)]))[0]
        return self.space.element(row)

    def _eval(self, t):
        return self._vector(self._coords, t)

    def antiderivative(self, t):
        return self._vector(self._prims, t)

    def derivative(self, t):
        return self._vector(self._ders, t)

    def integral(self, a, b):
        return self.space.sub(self.antiderivative(b), self.antiderivative(a))

    def derivative_function(self) -> Integrand:
        """The coordinatewise derivative as an integrand into the same space."""
        return Integrand(self.derivative, self.space, self.domain, label=f"d/dt {self.label}",
                         batch=lambda ts: self._stack(self._ders, ts))

    def anchor(self, lo, hi):
        return float(lo)

    def landmarks(self, lo, hi):
        # every coordinate is monotone on [0, 1]: the endpoints realise the sup
        return []


def smooth_function(name="poly12", space=None) -> SmoothFunction:
    return SmoothFunction(name, space)


def smooth_calibration_set(space=None):
    """One instance of every smooth calibration function."""
    return [SmoothFunction(name, space) for name in SMOOTH_NAMES]


def function_from_id(text: str, space: Space | None = None) -> GalleryFunction:
    """Build a gallery function from ``rationals:<N>``, ``digits:<K>``,
    ``ratind`` or ``smooth:<name>``."""
    head, _, arg = text.strip().partition(":")
    try:
        if head == "rationals":
            return RationalEnumeration(int(arg) if arg else 1000, space)
        if head == "digits":
            return DigitFunction(int(arg) if arg else 24, space)
        if head == "ratind" and not arg:
            return RationalIndicator(space)
        if head == "smooth":
            return SmoothFunction(arg or "poly12", space)
    except ValueError as exc:
        if isinstance(exc, DomainError):
            raise
        raise DomainError(f"malformed function id {text!r}: {exc}") from None
    raise DomainError(f"unknown function {text!r}; expected rationals:<Nmax>, digits:<K>, "
                      f"ratind or smooth:<name> with name in {SMOOTH_NAMES}")


# -- adversarial tags for l1-type spaces ----------------------------------------

@dataclass
class AdversaryResult:
    """Two tagged partitions on the same points ``i/N`` and their separation.

    ``floor`` is ``r * m / 4`` with ``m`` the lower bracket of the measure of
    ``E_r`` (cells of width ``1/N``, windows of radius ``1/N``).
    """

    function: str
    space: str
    r: float
    n: int
    first: TaggedPartition
    second: TaggedPartition
    measure: object
    achieved: float
    floor: float
    active: list
    annotations: list = field(default_factory=list)

    @property
    def meets_floor(self):
        return self.achieved >= self.floor

    def to_dict(self):
        return {
            "function": self.function,
            "space": self.space,
            "r": self.r,
            "N": self.n,
            "first": self.first.to_dict(),
            "second": self.second.to_dict(),
            "measure": self.measure.to_dict(),
            "achieved": self.achieved,
            "floor": self.floor,
            "meets_floor": self.meets_floor,
            "active_intervals": len(self.active),
            "annotations": list(self.annotations),
        }


def adversary_partitions(f: GalleryFunction, r, n, sampler=None) -> AdversaryResult:
    """Tag ``{i/N}`` twice so that the Riemann sums stay far apart.

    Intervals whose cell lies in the lower bracket of ``E_r`` get the
    anchor ``u_k`` in the first partition and a witness ``v_k`` with
    ``d(f(u_k), f(v_k)) >= r/2`` in the second; all other intervals share
    the anchor.  Raises :class:`ConstructionError` naming the interval when
    the oracle cannot reach ``r/2``.
    """
    if not r > 0:
        raise DomainError("r must be positive")
    n = int(n)
    if n < 1:
        raise DomainError("N must be positive")
    if not f.has_witness:
        raise CapabilityError(f"{f.label} exposes no discontinuity witness")
    a, b = f.domain
    part = Partition(uniform_points(Fraction(a), Fraction(b), n))
    cells = cell_profile(f, grid=n, radii=(float(b - a) / n,), sampler=sampler)
    measure = discontinuity_measure(f, r, cells=cells)
    high = cells.classify(r) == "high"
    us, vs, active = [], [], []
    for k, (lo, hi) in enumerate(part.intervals()):
        u = f.anchor(lo, hi)
        v = u
        if high[k]:
            v = f.witness(u, float(hi - lo), r / 2, within=(lo, hi))
            if v is None:
                raise ConstructionError(
                    f"no witness with separation {r / 2:g} in interval {k} "
                    f"[{encode_real(lo)}, {encode_real(hi)}] for {f.label}")
            active.append(k)
        us.append(u)
        vs.append(v)
    d1, d2 = TaggedPartition(part, tuple(us)), TaggedPartition(part, tuple(vs))
    achieved = f.space.metric(riemann_sum(f, d1), riemann_sum(f, d2))
    return AdversaryResult(f.label, str(f.space), float(r), n, d1, d2, measure, achieved,
                           float(r) * measure.lower / 4, active, f.annotations())


# -- coordinatewise continuity ---------------------------------------------------

@dataclass
class CoordinateContinuityReport:
    """Both sides of "f is continuous at t iff every coordinate is".

    Each side is judged on the smallest window: coordinates by their scalar
    oscillation against ``coordinate_threshold``, the product metric against
    ``product_threshold``, which separates what a jump in coordinate
    ``i <= I_max`` forces from what coordinates beyond ``I_max`` can add.
    """

    t: object
    space: str
    i_max: int
    radii: list
    product_estimates: list
    product_threshold: float
    coordinate_threshold: float
    discontinuous_coordinates: list
    max_coordinate_oscillation: float

    @property
    def coordinates_continuous(self):
        return not self.discontinuous_coordinates

    @property
    def product_continuous(self):
        return self.product_estimates[-1] < self.product_threshold

    @property
    def agree(self):
        return self.coordinates_continuous == self.product_continuous

    def to_dict(self):
        return {
            "t": encode_real(self.t),
            "space": self.space,
            "i_max": self.i_max,
            "radii": list(self.radii),
            "product_estimates": list(self.product_estimates),
            "product_threshold": self.product_threshold,
            "product_continuous": self.product_continuous,
            "coordinate_threshold": self.coordinate_threshold,
            "discontinuous_coordinates": list(self.discontinuous_coordinates),
            "max_coordinate_oscillation": self.max_coordinate_oscillation,
            "coordinates_continuous": self.coordinates_continuous,
            "agree": self.agree,
        }


def _product_threshold(space, i_max):
    if isinstance(space, OmegaSup):
        hi, lo = space.weight(i_max), space.weight(i_max + 1)
    elif isinstance(space, OmegaSum):
        hi = space.weight(i_max)
        lo = sum(space.weight(i) for i in range(i_max + 1, space.dim + 1))
    else:
        raise CapabilityError(f"{space} is not a product metric")
    if not lo < hi:
        raise DomainError(f"I_max={i_max} leaves no gap between tail and head weights in {space}")
    return (lo + hi) / 2


def coordinate_continuity_probe(f: GalleryFunction, t, i_max=None, radii=None,
                                product=None, sampler=None,
                                coordinate_threshold=0.5) -> CoordinateContinuityReport:
    """Scalar oscillations of ``pi_i o f`` (``i <= I_max``) and the product
    oscillation of ``f`` at ``t``, over the same nested windows.

    The default radii run from ``2**-3`` down to ``2**-16`` or further, until
    they are below an eighth of the function's finest structure.
    """
    if f.space.representation != "sequence":
        raise CapabilityError(f"{f.space} is not a sequence backend")
    product = product or OmegaSup(f.space.dim)
    g = f.with_space(product)
    i_max = int(i_max or getattr(f, "n_max", None) or len(getattr(f, "select", ())) or product.dim)
    if not 1 <= i_max <= product.dim:
        raise DomainError(f"I_max must lie in 1..{product.dim}")
    threshold = _product_threshold(product, i_max)
    if radii is None:
        fine = 16
        while f.fine_scale and 2.0 ** -fine > f.fine_scale / 8:
            fine += 1
        radii = default_windows(0.0, 1.0, 3, fine)
    radii = sorted((float(x) for x in radii), reverse=True)
    sampler = sampler or Sampler()
    rng = np.random.default_rng([sampler.seed, 11])
    a, b = g.domain
    acc = SupAccumulator(g, product)
    acc.add([t])
    prod_est, coord_osc = [], None
    # innermost window first: its points are exactly the first block
    for r in reversed(radii):
        lo, hi = max(a, t - r), min(b, t + r)
        acc.add(window_points(g, lo, hi, sampler, rng))
        prod_est.append(acc.best)
        if coord_osc is None:
            V = np.asarray(acc.values, dtype=float)[:, :i_max]
            coord_osc = V.max(axis=0) - V.min(axis=0)
    prod_est.reverse()
    bad = [int(i) + 1 for i in np.flatnonzero(coord_osc >= coordinate_threshold)]
    return CoordinateContinuityReport(t, str(product), i_max, radii, prod_est, threshold,
                                      coordinate_threshold, bad, float(coord_osc.max()))
