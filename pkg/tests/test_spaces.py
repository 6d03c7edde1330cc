import math

import numpy as np
import pytest
from hypothesis import given, seed
from hypothesis import strategies as st

from metrivec.errors import DomainError, StructuralError
from metrivec.spaces import (
    Euclidean,
    L1Gamma,
    Linf,
    Lp,
    OmegaSum,
    OmegaSup,
    SparseVector,
    check_scaling_inequality,
    check_translation_invariance,
    parse_space,
)

BACKENDS = [Euclidean(3), OmegaSup(16), OmegaSum(16), Lp(1, 8), Lp(2, 8), Lp(3.5, 8), Linf(8),
            L1Gamma()]
NORMS = [s for s in BACKENDS if s.norm_induced]


def test_zero_vectors():
    assert list(Euclidean(2).zero()) == [0.0, 0.0]
    assert list(OmegaSup(8).zero()) == [0.0] * 8
    assert L1Gamma().zero() == SparseVector()


def test_arithmetic_examples():
    e = Euclidean(2)
    assert list(e.add(e.element([1, 2]), e.element([3, 4]))) == [4.0, 6.0]
    g = L1Gamma()
    assert g.sub(g.basis(1), g.basis(1)).data == {}
    for space in BACKENDS:
        x = space.sample(np.random.default_rng(0))
        assert space.equal(space.scale(0, x), space.zero())


@pytest.mark.parametrize("space, x, y, expected", [
    (OmegaSup(8), {1: 1.0}, {}, 1.0),
    (OmegaSup(8), {3: 1.0}, {}, 1 / 3),
    (OmegaSup(8), {2: 7.0}, {}, 0.5),
    (OmegaSum(8), {1: 5.0, 3: 0.5}, {}, 0.5 + 0.5 / 8),
    (Lp(2, 4), {1: 1.0}, {2: 1.0}, math.sqrt(2)),
    (Lp(1, 4), {1: 1.0}, {2: -2.0}, 3.0),
    (Linf(4), {1: 1.0, 4: -3.0}, {}, 3.0),
    (L1Gamma(), {"a": 1.0}, {"b": 1.0}, 2.0),
    (L1Gamma(), {"a": 1.0}, {"a": 1.0}, 0.0),
])
def test_metric_examples(space, x, y, expected):
    assert space.metric(space.from_coords(x), space.from_coords(y)) == pytest.approx(expected,
                                                                                     abs=1e-15)


@pytest.mark.parametrize("space", BACKENDS, ids=str)
def test_metric_axioms_on_samples(space, rng):
    pts = [space.sample(rng) for _ in range(24)]
    for x in pts[:8]:
        assert space.metric(x, x) == 0.0
        for y in pts[8:16]:
            assert space.metric(x, y) == space.metric(y, x) >= 0
            for z in pts[16:]:
                assert space.metric(x, z) <= space.metric(x, y) + space.metric(y, z) + 1e-9


@pytest.mark.parametrize("space", [s for s in BACKENDS if s.representation != "sparse"], ids=str)
def test_vectorized_distances_match_metric(space, rng):
    A = [space.sample(rng) for _ in range(5)]
    B = [space.sample(rng) for _ in range(4)]
    cross = space.cross(A, B)
    pair = space.pairwise(A)
    for i, x in enumerate(A):
        for j, y in enumerate(B):
            assert cross[i, j] == pytest.approx(space.metric(x, y), rel=1e-12)
        for j, y in enumerate(A):
            assert pair[i, j] == pytest.approx(space.metric(x, y), rel=1e-12, abs=1e-300)


def test_pruned_columns_do_not_change_distances():
    s = OmegaSup(10)
    A = [s.from_coords({7: 1.0}), s.from_coords({9: 0.5})]
    assert s.pairwise(A)[0, 1] == pytest.approx(1 / 7)
    assert s.cross(A, [s.zero()])[:, 0].tolist() == pytest.approx([1 / 7, 0.5 / 9])
    assert s.cross([s.zero()], [s.zero()])[0, 0] == 0.0


@pytest.mark.parametrize("space", BACKENDS, ids=str)
def test_translation_invariance_probe(space):
    rep = check_translation_invariance(space, 2000, seed=3)
    assert rep.worst_violation <= 1e-12 and rep.outcome == "holds"


@pytest.mark.parametrize("space", NORMS, ids=str)
def test_norm_backends_scale_exactly(space):
    rep = check_scaling_inequality(space, 2000, seed=5)
    assert rep.violations == 0


@pytest.mark.parametrize("space", [OmegaSup(16), OmegaSum(16)], ids=str)
def test_product_metrics_violate_scaling_with_documented_witness(space):
    rep = check_scaling_inequality(space, 500, seed=5)
    assert rep.outcome == "violated" == space.scaling
    assert rep.worst_violation >= 0.4 - 1e-9 or isinstance(space, OmegaSum)
    assert rep.worst_violation > 0
    assert "scaling-inequality-violated" in space.annotations()


@pytest.mark.parametrize("space", [OmegaSup(16), OmegaSum(16)], ids=str)
def test_product_metrics_scale_on_bounded_differences(space):
    rep = check_scaling_inequality(space, 2000, seed=5, bounded_differences=True,
                                   include_witnesses=False)
    assert rep.violations == 0


@seed(4)
@given(st.lists(st.integers(-50, 50), min_size=6, max_size=6), st.integers(-4, 4))
def test_vector_space_axioms_exact_on_integers(coords, lam):
    s = Lp(2, 3)
    x, y = s.element(coords[:3]), s.element(coords[3:])
    assert s.equal(s.add(x, y), s.add(y, x))
    assert s.equal(s.sub(s.add(x, y), y), x)
    assert s.equal(s.scale(lam, s.add(x, y)), s.add(s.scale(lam, x), s.scale(lam, y)))


@pytest.mark.parametrize("text, expected", [
    ("euclidean:3", "euclidean:3"),
    ("omega-sup:16", "omega-sup:16"),
    ("omega-sum", "omega-sum:64"),
    ("lp:2:8", "lp:2:8"),
    ("lp:1.5", "lp:1.5:64"),
    ("linf:5", "linf:5"),
    ("l1gamma", "l1gamma"),
])
def test_space_grammar_round_trip(text, expected):
    s = parse_space(text)
    assert str(s) == expected and parse_space(str(s)) == s


@pytest.mark.parametrize("text", ["euclid:3", "lp:0.5:4", "lp:x", "omega-sup:0", "l1gamma:3", ""])
def test_space_grammar_rejects(text):
    with pytest.raises(DomainError):
        parse_space(text)


def test_representation_mismatch_is_structural():
    with pytest.raises(StructuralError):
        Euclidean(2).metric(Euclidean(2).zero(), Euclidean(3).zero())
    with pytest.raises(StructuralError):
        L1Gamma().add(L1Gamma().zero(), np.zeros(2))


def test_sparse_vectors_drop_zeros():
    v = SparseVector({"a": 0.0, "b": 2.0})
    assert v.data == {"b": 2.0}
