import math

import numpy as np
import pytest
from hypothesis import given, seed
from hypothesis import strategies as st

from conftest import curve, linear
from metrivec.errors import CapabilityError, DomainError
from metrivec.gallery import binary_digit_function, rational_indicator_l1, smooth_function
from metrivec.integration import (
    Integrand,
    IntegrateConfig,
    integrate,
    mesh_cauchy_probe,
    refinement_cauchy_probe,
    riemann_sum,
    same_points_probe,
    variation_bound_estimate,
)
from metrivec.partitions import merge, random_partition, uniform
from metrivec.spaces import Euclidean, L1Gamma, Linf, Lp, OmegaSum


def test_left_sum_of_linear_function():
    assert riemann_sum(linear(), uniform(0, 1, 4, "left"))[0] == 0.375


@pytest.mark.parametrize("n", [1, 2, 3, 7, 64, 1000])
def test_midpoint_rule_is_exact_for_linear(n):
    assert riemann_sum(linear(), uniform(0.0, 1.0, n, "midpoint"))[0] == pytest.approx(0.5, abs=1e-15)


def test_sums_in_sparse_space():
    g = L1Gamma()
    f = Integrand(lambda t: g.from_coords({"x": float(t)}), g)
    s = riemann_sum(f, uniform(0, 1, 4, "left"))
    assert s.data == {"x": 0.375}


@seed(21)
@given(st.integers(1, 40), st.integers(0, 2**31 - 1),
       st.floats(-3, 3, allow_nan=False), st.floats(-3, 3, allow_nan=False))
def test_riemann_sums_are_linear(n, tag_seed, alpha, beta):
    space = Euclidean(2)
    f, g = curve(space), smooth_function("trig", space)
    h = Integrand(lambda t: space.add(space.scale(alpha, f(t)), space.scale(beta, g(t))), space)
    d = uniform(0.0, 1.0, n, "seeded-random", seed=tag_seed)
    lhs = riemann_sum(h, d)
    rhs = space.add(space.scale(alpha, riemann_sum(f, d)), space.scale(beta, riemann_sum(g, d)))
    assert space.metric(lhs, rhs) <= 1e-12


@pytest.mark.parametrize("space", [Euclidean(5), Lp(1, 5), Lp(3, 5), Linf(5)], ids=str)
def test_merge_bound_on_norm_backends(space, rng):
    # d(f(D), f(merge(D, P))) <= 2 L N delta with N the intervals of P
    f = smooth_function("mix", space)
    for _ in range(25):
        delta = rng.uniform(0.005, 0.2)
        d = random_partition(0.0, 1.0, delta, rng)
        p = random_partition(0.0, 1.0, rng.uniform(0.05, 0.6), rng).partition
        m = merge(d, p)
        gap = space.metric(riemann_sum(f, d), riemann_sum(f, m))
        assert gap <= 2 * f.bound * p.n * d.mesh + 1e-9


def test_integrate_smooth_curve():
    rep = integrate(curve(), 0.0, 1.0, IntegrateConfig(eps=1e-4))
    assert rep.converged and rep.verdict == "no-violation-found"
    assert rep.estimate == pytest.approx([0.5, 1 / 3], abs=1e-4)
    assert all(y < x for x, y in zip(rep.separations, rep.separations[1:]))
    assert rep.delta == rep.meshes[-1]


def test_rational_indicator_never_converges():
    rep = integrate(rational_indicator_l1(), 0, 1, IntegrateConfig(eps=0.1, levels=(8, 64, 512)))
    assert not rep.converged and rep.verdict == "separation-persisted"
    assert min(rep.separations) >= 1 - 1e-9


def test_config_validation():
    with pytest.raises(DomainError):
        IntegrateConfig(eps=0)
    with pytest.raises(DomainError):
        IntegrateConfig(levels=())
    with pytest.raises(DomainError):
        integrate(linear(), 1.0, 0.0)


def test_overrides_replace_config_fields():
    rep = integrate(linear(), 0.0, 1.0, levels=(4, 8), eps=1e-12)
    assert rep.meshes == [0.25, 0.125] and not rep.converged


def test_digits_same_points_under_linf():
    f = binary_digit_function(16, Linf(64))
    rep = same_points_probe(f, uniform(0.0, 1.0, 64), "adversarial")
    assert rep.separation >= 1 - 1e-9
    assert rep.reevaluate(f) == rep.separation


def test_digits_same_points_under_omega_sum():
    f = binary_digit_function(16, OmegaSum(16))
    rep = same_points_probe(f, uniform(0.0, 1.0, 64), "adversarial")
    assert rep.separation <= 2 ** -6 + 2 ** -16 * 16


def test_adversarial_needs_a_witness():
    with pytest.raises(CapabilityError):
        same_points_probe(linear(), uniform(0.0, 1.0, 4), "adversarial")
    with pytest.raises(DomainError):
        same_points_probe(linear(), uniform(0.0, 1.0, 4), "exhaustive")


@pytest.mark.parametrize("probe", ["mesh", "refinement", "same"])
def test_cauchy_probes_shrink_for_smooth_functions(probe):
    f = curve()
    seps = []
    for n in (8, 64, 512):
        if probe == "mesh":
            rep = mesh_cauchy_probe(f, 0.0, 1.0, 1 / n, samples=8, seed=1)
        elif probe == "refinement":
            rep = refinement_cauchy_probe(f, uniform(0.0, 1.0, n), samples=8, seed=1)
        else:
            rep = same_points_probe(f, uniform(0.0, 1.0, n), samples=8, seed=1)
        assert rep.reevaluate(f) == pytest.approx(rep.separation, abs=1e-15)
        seps.append(rep.separation)
    assert seps[-1] < seps[0] / 8


def test_cauchy_probes_find_the_indicator_gap():
    f = rational_indicator_l1()
    assert mesh_cauchy_probe(f, 0, 1, 1 / 256, samples=6).separation >= 1 - 1e-9
    assert refinement_cauchy_probe(f, uniform(0, 1, 64), samples=6).separation >= 1 - 1e-9


def test_variation_of_linear_function_is_length():
    rep = variation_bound_estimate(linear(), 0.0, 1.0, seed=2)
    assert 0.9 <= rep.separation <= 1 + 1e-12
    assert rep.reevaluate(linear()) == pytest.approx(rep.separation)


def test_variation_of_first_digit_exceeds_one():
    f = binary_digit_function(16, Euclidean(1), select=(1,))
    rep = variation_bound_estimate(f, 0.0, 1.0, seed=0)
    assert rep.separation >= 1
    more = variation_bound_estimate(binary_digit_function(16, Euclidean(1), select=(4,)), 0.0, 1.0)
    assert more.separation > rep.separation


def test_report_serialization():
    d = integrate(curve(), levels=(8, 16)).to_dict()
    assert d["meshes"] == [0.125, 0.0625] and len(d["estimate"]) == 2
    assert math.isfinite(d["delta"])
    w = same_points_probe(rational_indicator_l1(), uniform(0, 1, 4), "adversarial").to_dict()
    assert len(w["witness"]["first"]["tags"]) == 4
    assert any(isinstance(t, dict) and "irrational" in t
               for t in w["witness"]["first"]["tags"] + w["witness"]["second"]["tags"])
