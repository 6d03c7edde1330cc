import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, seed
from hypothesis import strategies as st

from metrivec.errors import CapabilityError, ConstructionError, DomainError
from metrivec.gallery import (
    SMOOTH_NAMES,
    adversary_partitions,
    binary_digit_function,
    coordinate_continuity_probe,
    farey_enumeration,
    function_from_id,
    rational_enumeration_function,
    rational_indicator_l1,
    smooth_function,
)
from metrivec.integration import riemann_sum, same_points_probe
from metrivec.partitions import Partition, TaggedPartition, uniform, uniform_points
from metrivec.reals import Irrational
from metrivec.spaces import Euclidean, L1Gamma, Linf, Lp, OmegaSum, OmegaSup


def test_farey_order():
    assert farey_enumeration(8) == [Fraction(0), Fraction(1), Fraction(1, 2), Fraction(1, 3),
                                    Fraction(2, 3), Fraction(1, 4), Fraction(3, 4), Fraction(1, 5)]
    rs = farey_enumeration(1000)
    assert len(set(rs)) == 1000 and all(0 <= r <= 1 for r in rs)


def test_rational_enumeration_values():
    f = rational_enumeration_function(50, Lp(2, 64))
    assert f.space.equal(f(Fraction(1, 2)), f.space.basis(3))
    assert f.rank(Fraction(2, 3)) == 5
    assert f.space.equal(f(0.5), f.space.zero())  # a float is generic, not rational
    assert f.space.equal(f(Irrational(0.5)), f.space.zero())
    assert f.space.equal(f(Fraction(1, 997)), f.space.zero())  # beyond N_max


@pytest.mark.parametrize("space", [Lp(2, 10), Euclidean(2000), L1Gamma()], ids=str)
def test_rational_enumeration_needs_long_sequences(space):
    with pytest.raises(CapabilityError):
        rational_enumeration_function(1000, space)


def test_resolution_of_thousand_rationals():
    f = rational_enumeration_function(1000)
    assert f.resolution == pytest.approx(1 / 56)
    assert f.fine_scale < f.resolution


def test_digits_of_one_third():
    f = binary_digit_function(16)
    assert f.digits(Fraction(1, 3)) == [k % 2 == 0 for k in range(1, 17)]
    assert f.digits(1) == [1] * 16
    assert f.digits(Fraction(1, 2)) == [1] + [0] * 15


def test_first_digit_midpoint_sum():
    f = binary_digit_function(16, Euclidean(1), select=(1,))
    assert riemann_sum(f, uniform(0.0, 1.0, 8, "midpoint"))[0] == 0.5


@pytest.mark.parametrize("K", [0, 53])
def test_digit_count_bounds(K):
    with pytest.raises(DomainError):
        binary_digit_function(K)


@seed(17)
@given(st.integers(0, 2 ** 20 - 1))
def test_float_and_exact_digits_agree_on_dyadics(j):
    f = binary_digit_function(20)
    assert f.digits(j / 2 ** 20) == f.digits(Fraction(j, 2 ** 20))


def test_rational_indicator_in_l1gamma():
    f = rational_indicator_l1()
    g = f.space
    assert g.metric(f(Fraction(1, 7)), f(Irrational(0.3))) == 1.0
    assert g.metric(f(Fraction(1, 7)), f(Fraction(2, 7))) == 0.0


@pytest.mark.parametrize("name", SMOOTH_NAMES)
def test_smooth_integrals_match_riemann_sums(name):
    f = smooth_function(name, Euclidean(5))
    exact = f.integral(0.0, 1.0)
    approx = riemann_sum(f, uniform(0.0, 1.0, 4096, "midpoint"))
    assert f.space.metric(exact, approx) < 1e-7


@pytest.mark.parametrize("name", SMOOTH_NAMES)
def test_smooth_derivatives_match_differences(name):
    f = smooth_function(name, Euclidean(5))
    h, t = 1e-6, 0.37
    diff = f.space.scale(1 / (2 * h), f.space.sub(f(t + h), f(t - h)))
    assert f.space.metric(diff, f.derivative(t)) < 1e-8


def test_trig_derivative_oracle():
    f = smooth_function("trig", Euclidean(2))
    assert list(f.derivative(0.3)) == pytest.approx([math.cos(0.3), -math.sin(0.3)])


@pytest.mark.parametrize("text, label", [
    ("rationals:20", "rationals:20"), ("digits:8", "digits:8"), ("ratind", "ratind"),
    ("smooth:trig", "smooth:trig"),
])
def test_function_ids(text, label):
    assert function_from_id(text).label == label


@pytest.mark.parametrize("text", ["foo", "digits:x", "smooth:cubic", "ratind:3"])
def test_bad_function_ids(text):
    with pytest.raises(DomainError):
        function_from_id(text)


GALLERY = [
    lambda: rational_enumeration_function(200, Lp(2, 200)),
    lambda: rational_enumeration_function(200, OmegaSup(200)),
    lambda: binary_digit_function(16, Linf(16)),
    lambda: binary_digit_function(16, OmegaSum(16)),
    lambda: rational_indicator_l1(),
    lambda: smooth_function("mix", Lp(1, 5)),
]


@pytest.mark.parametrize("make", GALLERY, ids=["rat-lp2", "rat-osup", "dig-linf", "dig-osum",
                                               "ratind", "smooth"])
def test_witnesses_are_sound(make, rng):
    # a returned witness lies in the window and really reaches sigma
    f = make()
    for _ in range(60):
        lo = rng.uniform(0, 0.9)
        hi = lo + rng.uniform(1e-4, 0.1)
        t = f.anchor(lo, hi)
        assert lo <= t <= hi
        v = f.witness(t, hi - lo, 0.0, within=(lo, hi))
        if v is not None:
            assert lo <= v <= hi
            assert f.space.metric(f(t), f(v)) > 0
        for s in f.landmarks(lo, hi):
            assert lo <= s <= hi


def test_omega_sum_same_points_bound_holds_only_for_the_probe():
    # the probe meets 2^-6 + 16 * 2^-16; a hand-built pair of tag choices does not
    f = binary_digit_function(16, OmegaSum(16))
    bound = 2 ** -6 + 2 ** -16 * 16
    assert same_points_probe(f, uniform(0.0, 1.0, 64), "adversarial").separation <= bound
    part = Partition(uniform_points(Fraction(0), Fraction(1), 64))
    low = Fraction(1, 64) * (1 - Fraction(1, 2 ** 10))  # digits 7..16 all one
    first, second = [], []
    for lo, hi in part.intervals():
        if hi == Fraction(1, 2):
            first.append(hi)   # 0.100000...
            second.append(lo)  # 0.011111 000...
        else:
            first.append(lo + low)
            second.append(lo)
    sep = f.space.metric(riemann_sum(f, TaggedPartition(part, tuple(first))),
                         riemann_sum(f, TaggedPartition(part, tuple(second))))
    oracle = (1 - Fraction(1, 64)) / 64 + Fraction(63, 64) * (Fraction(1, 64) - Fraction(1, 2 ** 16))
    assert sep == pytest.approx(float(oracle), rel=1e-12)
    assert sep > 1.9 * bound


def test_adversary_on_indicator():
    res = adversary_partitions(rational_indicator_l1(), 1.0, 100)
    assert res.achieved == pytest.approx(1.0, abs=1e-9)
    assert res.floor == pytest.approx(0.25) and res.meets_floor
    assert res.to_dict()["active_intervals"] == 100


def test_adversary_pythagorean_loss_in_lp2():
    res = adversary_partitions(rational_enumeration_function(1000, Lp(2, 1000)), 1.0, 50)
    assert res.achieved == pytest.approx(math.sqrt(50) / 50, abs=1e-6)
    assert not res.meets_floor


def test_adversary_reports_missing_witness():
    f = rational_indicator_l1()
    f.witness = lambda *a, **k: None
    with pytest.raises(ConstructionError, match="interval 0"):
        adversary_partitions(f, 1.0, 4)


def test_adversary_argument_checks():
    with pytest.raises(DomainError):
        adversary_partitions(rational_indicator_l1(), 0.0, 4)
    with pytest.raises(DomainError):
        adversary_partitions(rational_indicator_l1(), 1.0, 0)


@pytest.mark.parametrize("t, continuous", [(Fraction(1, 3), True), (0.5, False),
                                           (Fraction(3, 8), False), (0.1, True)])
def test_coordinate_probe_on_digits(t, continuous):
    rep = coordinate_continuity_probe(binary_digit_function(24), t)
    assert rep.coordinates_continuous is continuous and rep.agree


def test_coordinate_probe_on_rationals():
    f = rational_enumeration_function(1000)
    at_rational = coordinate_continuity_probe(f, Fraction(2, 3))
    assert at_rational.discontinuous_coordinates == [5] and at_rational.agree
    at_irrational = coordinate_continuity_probe(f, Irrational(math.sqrt(2) - 1))
    assert at_irrational.coordinates_continuous and at_irrational.agree


def test_coordinate_probe_needs_sequences():
    with pytest.raises(CapabilityError):
        coordinate_continuity_probe(rational_indicator_l1(), 0.5)
