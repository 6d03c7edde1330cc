"""Riemann integration of functions with values in metric vector spaces.

Backends cover Euclidean space, the product metrics on sequences,
truncated l^p and l^infinity, and a finitely supported l^1 family.  The
probes report finite evidence: separations, oscillation sums and
discontinuity-measure brackets are lower bounds or brackets, never proofs.
"""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    CapabilityError,
    ConstructionError,
    DomainError,
    InvariantError,
    MetrivecError,
    StructuralError,
)
from .reals import Irrational, decode_real, encode_real, is_rational, parse_point  # noqa: E402
from .spaces import (  # noqa: E402
    L1Gamma,
    Euclidean,
    Linf,
    Lp,
    OmegaSum,
    OmegaSup,
    Space,
    SparseVector,
    check_scaling_inequality,
    check_translation_invariance,
    parse_space,
)
from .partitions import (  # noqa: E402
    Partition,
    TaggedPartition,
    merge,
    mesh,
    refines,
    uniform,
    uniform_points,
)
from .integration import (  # noqa: E402
    Integrand,
    IntegrateConfig,
    integrate,
    mesh_cauchy_probe,
    refinement_cauchy_probe,
    riemann_sum,
    same_points_probe,
    variation_bound_estimate,
)
from .oscillation import (  # noqa: E402
    Sampler,
    darboux_probe,
    discontinuity_measure,
    oscillation_sum,
    pointwise_oscillation,
)
from .calculus import differentiability_probe, ftc_check, primitive  # noqa: E402
from .gallery import (  # noqa: E402
    adversary_partitions,
    binary_digit_function,
    coordinate_continuity_probe,
    function_from_id,
    rational_enumeration_function,
    rational_indicator_l1,
    smooth_function,
)

__all__ = [name for name in dir() if not name.startswith("_")]
