"""Metric vector spaces over which the integration machinery is generic.

Every backend exposes the same small surface: vector-space arithmetic
(``zero``, ``add``, ``sub``, ``scale``), a translation-invariant metric,
and batch helpers (``combine``, ``pairwise``) used by the sum and
oscillation estimators.

Backends
--------
=================  =========================================  ===============
grammar            metric ``d(x, y)``                         representation
=================  =========================================  ===============
``euclidean:n``    ``|x - y|_2`` on R^n                       dense array
``omega-sup:M``    ``max_i min(|x_i - y_i|, 1) / i``          sequence prefix
``omega-sum:M``    ``sum_i min(|x_i - y_i|, 1) / 2**i``       sequence prefix
``lp:p:M``         ``(sum_i |x_i - y_i|**p) ** (1/p)``        sequence prefix
``linf:M``         ``max_i |x_i - y_i|``                      sequence prefix
``l1gamma``        ``sum_a |x_a - y_a|`` over labels          sparse map
=================  =========================================  ===============

Sequence spaces are truncated at ``M`` coordinates (indexed ``1..M``);
coordinates beyond ``M`` are implicitly zero.  The two product metrics do
not satisfy ``d(l*x, l*y) <= l*d(x, y)`` for ``0 <= l < 1`` once a
coordinate difference exceeds 1; their ``scaling`` flag is ``"violated"``.
"""

from __future__ import annotations

import abc
import math
import numbers
from dataclasses import dataclass, field
from types import MappingProxyType

import numpy as np

from .errors import DomainError, StructuralError

__all__ = [
    "SparseVector",
    "Space",
    "Euclidean",
    "OmegaSup",
    "OmegaSum",
    "Lp",
    "Linf",
    "L1Gamma",
    "parse_space",
    "MetricProbeReport",
    "check_translation_invariance",
    "check_scaling_inequality",
    "DEFAULT_TRUNCATION",
]

DEFAULT_TRUNCATION = 64

HOLDS = "holds"
VIOLATED = "violated"
UNKNOWN = "unknown"


def _frozen(arr):
    arr = np.asarray(arr, dtype=np.float64)
    if arr.flags.writeable:
        arr = arr.copy() if arr.base is not None else arr
        arr.flags.writeable = False
    return arr


class SparseVector:
    """Immutable finitely supported family ``label -> value`` with no stored zeros."""

    __slots__ = ("_data",)

    def __init__(self, data=None):
        items = {}
        for k, v in (data or {}).items():
            v = float(v)
            if v != 0.0:
                items[str(k)] = v
        self._data = MappingProxyType(dict(sorted(items.items())))

    @property
    def data(self):
        return self._data

    def labels(self):
        return tuple(self._data)

    def get(self, label, default=0.0):
        return self._data.get(str(label), default)

    def __len__(self):
        return len(self._data)

    def __iter__(self):
        return iter(self._data.items())

    def __eq__(self, other):
        if not isinstance(other, SparseVector):
            return NotImplemented
        return dict(self._data) == dict(other._data)

    def __hash__(self):
        return hash(tuple(self._data.items()))

    def __repr__(self):
        return f"SparseVector({dict(self._data)!r})"


class Space(abc.ABC):
    """Abstract metric vector space with a translation-invariant metric."""

    kind = "abstract"
    translation_invariant = True
    scaling = UNKNOWN
    norm_induced = False

    # -- arithmetic -------------------------------------------------------
    @abc.abstractmethod
    def zero(self): ...

    @abc.abstractmethod
    def element(self, data): ...

    @abc.abstractmethod
    def check(self, x): ...

    @abc.abstractmethod
    def add(self, x, y): ...

    @abc.abstractmethod
    def sub(self, x, y): ...

    @abc.abstractmethod
    def scale(self, lam, x): ...

    @abc.abstractmethod
    def metric(self, x, y) -> float: ...

    @abc.abstractmethod
    def basis(self, i): ...

    @abc.abstractmethod
    def from_coords(self, coords): ...

    @abc.abstractmethod
    def coordinate(self, x, i) -> float: ...

    @abc.abstractmethod
    def sample(self, rng, scale=1.0): ...

    def dist0(self, x) -> float:
        """``d(0, x)``."""
        return self.metric(self.zero(), x)

    def equal(self, x, y) -> bool:
        self.check(x)
        self.check(y)
        return self.metric(x, y) == 0.0

    def combine(self, weights, values):
        """Weighted sum ``sum_i w_i * v_i`` accumulated left to right."""
        acc = self.zero()
        for w, v in zip(weights, values):
            acc = self.add(acc, self.scale(w, v))
        return acc

    def pairwise(self, values):
        """Matrix of mutual distances of a finite list of vectors."""
        n = len(values)
        out = np.zeros((n, n))
        for i in range(n):
            for j in range(i + 1, n):
                out[i, j] = out[j, i] = self.metric(values[i], values[j])
        return out

    def distances(self, x, values):
        """Distances from ``x`` to each vector in ``values``."""
        return np.array([self.metric(x, v) for v in values], dtype=float)

    def cross(self, left, right):
        """Matrix ``D[i, j] = d(left[i], right[j])``."""
        out = np.zeros((len(left), len(right)))
        for i, x in enumerate(left):
            for j, y in enumerate(right):
                out[i, j] = self.metric(x, y)
        return out

    def compatible(self, other) -> bool:
        """Whether vectors of ``other`` can be measured with this metric."""
        return type(self).representation == type(other).representation and self.dim == other.dim

    def scaling_witnesses(self):
        """Known ``(x, y, lam)`` triples worth including in the scaling probe."""
        return []

    def annotations(self):
        """Hypothesis annotations carried by reports computed in this space."""
        if self.scaling == VIOLATED:
            return ["scaling-inequality-violated"]
        return []

    def __eq__(self, other):
        return isinstance(other, Space) and str(self) == str(other)

    def __hash__(self):
        return hash(str(self))

    def __repr__(self):
        return f"<{type(self).__name__} {self}>"


class _ArraySpace(Space):
    """Spaces whose vectors are read-only float arrays of fixed length."""

    representation = "array"

    def __init__(self, dim):
        dim = int(dim)
        if dim < 1:
            raise DomainError("dimension must be a positive integer")
        self.dim = dim

    def zero(self):
        return _frozen(np.zeros(self.dim))

    def element(self, data):
        if isinstance(data, dict):
            return self.from_coords(data)
        arr = np.array(data, dtype=np.float64).reshape(-1)
        if arr.shape != (self.dim,):
            raise StructuralError(f"{self} expects {self.dim} coordinates, got {arr.shape[0]}")
        return _frozen(arr)

    def check(self, x):
        if not isinstance(x, np.ndarray) or x.shape != (self.dim,):
            shape = getattr(x, "shape", type(x).__name__)
            raise StructuralError(f"{self} expects an array of shape ({self.dim},), got {shape}")

    def add(self, x, y):
        self.check(x)
        self.check(y)
        return _frozen(x + y)

    def sub(self, x, y):
        self.check(x)
        self.check(y)
        return _frozen(x - y)

    def scale(self, lam, x):
        self.check(x)
        return _frozen(float(lam) * x)

    def basis(self, i):
        return self.from_coords({i: 1.0})

    def from_coords(self, coords):
        arr = np.zeros(self.dim)
        for i, v in dict(coords).items():
            i = int(i)
            if not 1 <= i <= self.dim:
                raise StructuralError(f"coordinate {i} outside 1..{self.dim} of {self}")
            arr[i - 1] = float(v)
        return _frozen(arr)

    def coordinate(self, x, i):
        self.check(x)
        i = int(i)
        if not 1 <= i <= self.dim:
            return 0.0
        return float(x[i - 1])

    def sample(self, rng, scale=1.0):
        k = int(rng.integers(1, min(self.dim, 8) + 1))
        idx = rng.choice(self.dim, size=k, replace=False)
        arr = np.zeros(self.dim)
        arr[idx] = rng.normal(0.0, scale, size=k)
        return _frozen(arr)

    @abc.abstractmethod
    def _row_dist(self, diff, cols=None):
        """Distances of difference vectors stored along the last axis.

        ``cols`` lists the coordinates kept in ``diff`` when constant
        columns were pruned (the omitted differences are exactly zero).
        """

    def _pruned(self, A, B):
        """Drop coordinates on which every row of ``A`` and ``B`` agrees."""
        ref = A[0]
        keep = np.flatnonzero((A != ref).any(axis=0) | (B != ref).any(axis=0))
        if keep.size == self.dim:
            return A, B, None
        return A[:, keep], B[:, keep], keep

    def metric(self, x, y):
        self.check(x)
        self.check(y)
        return float(self._row_dist(np.asarray(x) - np.asarray(y)))

    def combine(self, weights, values):
        w = np.asarray(weights, dtype=np.float64)
        if len(values) == 0:
            return self.zero()
        V = np.asarray(values, dtype=np.float64)
        if V.shape != (w.shape[0], self.dim):
            raise StructuralError(f"{self} cannot combine values of shape {V.shape}")
        # cumsum along axis 0 is strictly sequential: left-to-right accumulation
        return _frozen(np.cumsum(w[:, None] * V, axis=0)[-1])

    def pairwise(self, values):
        if len(values) == 0:
            return np.zeros((0, 0))
        V = np.asarray(values, dtype=np.float64)
        V, _, cols = self._pruned(V, V)
        if cols is not None and cols.size == 0:
            return np.zeros((len(V), len(V)))
        return self._row_dist(V[:, None, :] - V[None, :, :], cols)

    def distances(self, x, values):
        if len(values) == 0:
            return np.zeros(0)
        V = np.asarray(values, dtype=np.float64)
        return self._row_dist(np.asarray(x)[None, :] - V)

    def cross(self, left, right):
        if len(left) == 0 or len(right) == 0:
            return np.zeros((len(left), len(right)))
        A = np.asarray(left, dtype=np.float64)
        B = np.asarray(right, dtype=np.float64)
        A, B, cols = self._pruned(A, B)
        if cols is not None and cols.size == 0:
            return np.zeros((len(A), len(B)))
        return self._row_dist(A[:, None, :] - B[None, :, :], cols)


class Euclidean(_ArraySpace):
    kind = "euclidean"
    representation = "dense"
    scaling = HOLDS
    norm_induced = True

    def _row_dist(self, diff, cols=None):
        return np.sqrt(np.sum(diff * diff, axis=-1))

    def __str__(self):
        return f"euclidean:{self.dim}"


class _SequenceSpace(_ArraySpace):
    representation = "sequence"

    def _w(self, cols):
        return self._weights if cols is None else self._weights[cols]

    @property
    def truncation(self):
        return self.dim


class OmegaSup(_SequenceSpace):
    """R^omega with ``d(x, y) = sup_i min(|x_i - y_i|, 1) / i``."""

    kind = "omega-sup"
    scaling = VIOLATED

    def __init__(self, dim=DEFAULT_TRUNCATION):
        super().__init__(dim)
        self._weights = 1.0 / np.arange(1, self.dim + 1, dtype=np.float64)

    def _row_dist(self, diff, cols=None):
        return np.max(np.minimum(np.abs(diff), 1.0) * self._w(cols), axis=-1)

    def scaling_witnesses(self):
        return [(self.from_coords({1: 2.0}), self.zero(), 0.6)]

    def weight(self, i):
        return 1.0 / i

    def __str__(self):
        return f"omega-sup:{self.dim}"


class OmegaSum(_SequenceSpace):
    """R^omega with ``d(x, y) = sum_i min(|x_i - y_i|, 1) / 2**i``."""

    kind = "omega-sum"
    scaling = VIOLATED

    def __init__(self, dim=DEFAULT_TRUNCATION):
        super().__init__(dim)
        self._weights = np.ldexp(1.0, -np.arange(1, self.dim + 1))

    def _row_dist(self, diff, cols=None):
        return np.sum(np.minimum(np.abs(diff), 1.0) * self._w(cols), axis=-1)

    def scaling_witnesses(self):
        return [(self.from_coords({1: 2.0}), self.zero(), 0.6)]

    def weight(self, i):
        return math.ldexp(1.0, -i)

    def __str__(self):
        return f"omega-sum:{self.dim}"


class Lp(_SequenceSpace):
    kind = "lp"
    scaling = HOLDS
    norm_induced = True

    def __init__(self, p, dim=DEFAULT_TRUNCATION):
        p = float(p)
        if not (p >= 1.0 and math.isfinite(p)):
            raise DomainError("lp requires 1 <= p < inf; use linf for the sup norm")
        super().__init__(dim)
        self.p = p

    def _row_dist(self, diff, cols=None):
        a = np.abs(diff)
        if self.p == 1.0:
            return np.sum(a, axis=-1)
        if self.p == 2.0:
            return np.sqrt(np.sum(a * a, axis=-1))
        return np.sum(a ** self.p, axis=-1) ** (1.0 / self.p)

    def __str__(self):
        return f"lp:{self.p:g}:{self.dim}"


class Linf(_SequenceSpace):
    kind = "linf"
    scaling = HOLDS
    norm_induced = True

    def _row_dist(self, diff, cols=None):
        return np.max(np.abs(diff), axis=-1)

    def __str__(self):
        return f"linf:{self.dim}"


class L1Gamma(Space):
    """l1 over an arbitrary label set, stored sparsely."""

    kind = "l1gamma"
    representation = "sparse"
    scaling = HOLDS
    norm_induced = True
    dim = None

    _sample_labels = tuple(f"g{i}" for i in range(16))

    def zero(self):
        return SparseVector()

    def element(self, data):
        if isinstance(data, SparseVector):
            return data
        if isinstance(data, dict):
            return SparseVector(data)
        raise StructuralError("l1gamma vectors are built from label -> value mappings")

    def check(self, x):
        if not isinstance(x, SparseVector):
            raise StructuralError(f"l1gamma expects a SparseVector, got {type(x).__name__}")

    def _merge(self, x, y, sign):
        out = dict(x.data)
        for k, v in y:
            out[k] = out.get(k, 0.0) + sign * v
        return SparseVector(out)

    def add(self, x, y):
        self.check(x)
        self.check(y)
        return self._merge(x, y, 1.0)

    def sub(self, x, y):
        self.check(x)
        self.check(y)
        return self._merge(x, y, -1.0)

    def scale(self, lam, x):
        self.check(x)
        lam = float(lam)
        return SparseVector({k: lam * v for k, v in x})

    def metric(self, x, y):
        self.check(x)
        self.check(y)
        total = 0.0
        for label in sorted(set(x.data) | set(y.data)):
            total += abs(x.get(label) - y.get(label))
        return total

    def basis(self, i):
        return SparseVector({str(i): 1.0})

    def from_coords(self, coords):
        return SparseVector({str(k): v for k, v in dict(coords).items()})

    def coordinate(self, x, i):
        self.check(x)
        return x.get(str(i))

    def combine(self, weights, values):
        acc = {}
        for w, v in zip(weights, values):
            self.check(v)
            w = float(w)
            for k, c in v:
                acc[k] = acc.get(k, 0.0) + w * c
        return SparseVector(acc)

    def sample(self, rng, scale=1.0):
        k = int(rng.integers(1, 6))
        labels = rng.choice(len(self._sample_labels), size=k, replace=False)
        vals = rng.normal(0.0, scale, size=k)
        return SparseVector({self._sample_labels[j]: v for j, v in zip(labels, vals)})

    def compatible(self, other):
        return isinstance(other, L1Gamma)

    def __str__(self):
        return "l1gamma"


def parse_space(text: str, default_trunc: int = DEFAULT_TRUNCATION) -> Space:
    """Build a space from its string form, e.g. ``"lp:2:64"`` or ``"omega-sup:16"``.

    The truncation ``M`` may be omitted for sequence spaces, in which case
    ``default_trunc`` is used.
    """
    parts = text.strip().split(":")
    head, args = parts[0], parts[1:]
    try:
        if head == "euclidean" and len(args) == 1:
            return Euclidean(int(args[0]))
        if head == "omega-sup" and len(args) <= 1:
            return OmegaSup(int(args[0]) if args else default_trunc)
        if head == "omega-sum" and len(args) <= 1:
            return OmegaSum(int(args[0]) if args else default_trunc)
        if head == "lp" and 1 <= len(args) <= 2:
            return Lp(float(args[0]), int(args[1]) if len(args) == 2 else default_trunc)
        if head == "linf" and len(args) <= 1:
            return Linf(int(args[0]) if args else default_trunc)
        if head == "l1gamma" and not args:
            return L1Gamma()
    except ValueError as exc:
        raise DomainError(f"malformed space string {text!r}: {exc}") from None
    raise DomainError(
        f"unknown space {text!r}; expected one of euclidean:<n>, omega-sup:<M>, "
        "omega-sum:<M>, lp:<p>:<M>, linf:<M>, l1gamma"
    )


# ---------------------------------------------------------------------------
# metric probes


def _vector_json(space, x):
    if isinstance(x, SparseVector):
        return dict(x.data)
    return [float(v) for v in x]


@dataclass
class MetricProbeReport:
    probe: str
    space: str
    samples: int
    seed: int
    tolerance: float
    worst_violation: float
    violations: int
    witness: dict | None = None
    outcome: str = HOLDS
    notes: list = field(default_factory=list)

    def __post_init__(self):
        if self.worst_violation < 0:
            raise ValueError("worst_violation must be nonnegative")

    def to_dict(self):
        return {
            "probe": self.probe,
            "space": self.space,
            "samples": self.samples,
            "seed": self.seed,
            "tolerance": self.tolerance,
            "worst_violation": self.worst_violation,
            "violations": self.violations,
            "witness": self.witness,
            "outcome": self.outcome,
            "notes": list(self.notes),
        }


def check_translation_invariance(space: Space, samples: int = 10_000, seed: int = 0,
                                 tol: float = 1e-12) -> MetricProbeReport:
    """Sample triples and report ``max |d(x+z, y+z) - d(x, y)|``.

    Differences at or below ``tol`` are floating-point rounding and are not
    counted as violations.
    """
    rng = np.random.default_rng(seed)
    worst, worst_w, count = 0.0, None, 0
    for _ in range(samples):
        s = float(10.0 ** rng.uniform(-2, 2))
        x, y, z = space.sample(rng, s), space.sample(rng, s), space.sample(rng, s)
        gap = abs(space.metric(space.add(x, z), space.add(y, z)) - space.metric(x, y))
        if gap > tol:
            count += 1
            if gap > worst:
                worst = gap
                worst_w = {"x": _vector_json(space, x), "y": _vector_json(space, y),
                           "z": _vector_json(space, z)}
    return MetricProbeReport(
        probe="translation-invariance", space=str(space), samples=samples, seed=seed,
        tolerance=tol, worst_violation=worst, violations=count, witness=worst_w,
        outcome=VIOLATED if count else HOLDS,
    )


DEFAULT_LAMBDAS = (0.0, 0.1, 0.25, 0.5, 0.6, 0.75, 0.9, 0.99)


def check_scaling_inequality(space: Space, samples: int = 10_000, lambdas=DEFAULT_LAMBDAS,
                             seed: int = 0, bounded_differences: bool = False,
                             include_witnesses: bool = True,
                             tol: float = 1e-12) -> MetricProbeReport:
    """Search for ``d(l*x, l*y) > l*d(x, y)`` with ``l`` in ``lambdas``.

    With ``bounded_differences`` every sampled pair satisfies
    ``|x_i - y_i| <= 1`` coordinatewise.  Known witnesses of the space are
    added to the search corpus unless ``include_witnesses`` is false.
    """
    lambdas = tuple(float(l) for l in lambdas)
    if any(not 0.0 <= l < 1.0 for l in lambdas):
        raise DomainError("scaling factors must lie in [0, 1)")
    rng = np.random.default_rng(seed)
    corpus = []
    if include_witnesses and not bounded_differences:
        corpus.extend(space.scaling_witnesses())
    for _ in range(samples):
        s = float(10.0 ** rng.uniform(-2, 2))
        y = space.sample(rng, s)
        if bounded_differences:
            step = space.sample(rng, 1.0)
            if isinstance(step, SparseVector):
                step = SparseVector({k: math.copysign(min(abs(v), 1.0), v) for k, v in step})
            else:
                step = _frozen(np.clip(step, -1.0, 1.0))
            x = space.add(y, step)
        else:
            x = space.sample(rng, s)
        corpus.append((x, y, None))

    worst, worst_w, count = 0.0, None, 0
    for x, y, lam0 in corpus:
        dxy = space.metric(x, y)
        for lam in (lambdas if lam0 is None else (lam0,)):
            gap = space.metric(space.scale(lam, x), space.scale(lam, y)) - lam * dxy
            if gap > tol:
                count += 1
                if gap > worst:
                    worst = gap
                    worst_w = {"x": _vector_json(space, x), "y": _vector_json(space, y),
                               "lambda": lam}
    return MetricProbeReport(
        probe="scaling-inequality", space=str(space), samples=len(corpus), seed=seed,
        tolerance=tol, worst_violation=worst, violations=count, witness=worst_w,
        outcome=VIOLATED if count else HOLDS,
        notes=["bounded-differences"] if bounded_differences else [],
    )
