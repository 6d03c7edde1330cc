"""Acceptance gate: one test per criterion, one PASS/FAIL line each.

Run ``pytest tests/test_acceptance.py -v`` (add ``-s`` to see the lines as
they happen); the summary section lists all verdicts at the end.
"""

import json
import math
import time
from fractions import Fraction

import numpy as np
import pytest

from conftest import curve, record
from metrivec.calculus import differentiability_probe, ftc_check, numerical_primitive
from metrivec.cli import ExperimentConfig, main, run
from metrivec.gallery import (
    adversary_partitions,
    binary_digit_function,
    coordinate_continuity_probe,
    rational_enumeration_function,
    rational_indicator_l1,
    smooth_function,
)
from metrivec.integration import IntegrateConfig, integrate, riemann_sum, same_points_probe
from metrivec.oscillation import darboux_probe, discontinuity_measure, pointwise_oscillation
from metrivec.partitions import merge, random_partition, uniform
from metrivec.reals import Irrational
from metrivec.spaces import (
    Euclidean,
    L1Gamma,
    Linf,
    Lp,
    OmegaSum,
    OmegaSup,
    check_scaling_inequality,
)

SEED = 20240611


def test_criterion_1_smooth_calibration():
    rep = integrate(curve(), 0.0, 1.0, IntegrateConfig(eps=1e-4))
    err = max(abs(rep.estimate[0] - 0.5), abs(rep.estimate[1] - 1 / 3))
    mono = all(y < x for x, y in zip(rep.separations, rep.separations[1:]))
    ok = rep.converged and err <= 1e-4 and mono
    assert record(1, ok, f"estimate error {err:.2e} <= 1e-4, converged={rep.converged}, "
                         f"separations monotone={mono} over {len(rep.meshes)} levels")


def test_criterion_2_fundamental_theorems():
    F = smooth_function("trig", OmegaSum(8))
    ftc = ftc_check(F, F.derivative_function(), F.space, 0.0, 1.0,
                    IntegrateConfig(eps=1e-3, levels=(2 ** 12,)))
    prim = numerical_primitive(F, 0.0)
    pts = np.random.default_rng(SEED).uniform(0.05, 0.95, 10)
    verdicts = [differentiability_probe(prim, F.space, float(t), F(float(t))).verdict
                for t in pts]
    ok = ftc.residual < 1e-5 and all(verdicts)
    assert record(2, ok, f"FTC residual {ftc.residual:.2e} < 1e-5 at mesh 2^-12; "
                         f"derivative probe passed at {sum(verdicts)}/10 points")


def _merge_cases(rng):
    spaces = [Euclidean(5), Lp(1, 5), Lp(2, 5), Lp(3, 5), Linf(5), L1Gamma()]
    for k in range(200):
        space = spaces[k % len(spaces)]
        if k % 3 == 0:
            f = rational_indicator_l1(space if space.representation == "sparse" else Lp(1, 5))
        elif space.representation == "sparse":
            f = rational_indicator_l1(space)
        else:
            f = smooth_function(("const", "linear", "poly12", "trig", "mix")[k % 5], space)
        delta = random_partition(0.0, 1.0, rng.uniform(0.002, 0.2), rng)
        other = random_partition(0.0, 1.0, rng.uniform(0.02, 0.8), rng).partition
        yield f, delta, other


def test_criterion_3_merge_bound():
    rng = np.random.default_rng(SEED)
    worst, fails = -math.inf, 0
    for f, delta, other in _merge_cases(rng):
        gap = f.space.metric(riemann_sum(f, delta), riemann_sum(f, merge(delta, other)))
        bound = 2 * f.bound * other.n * delta.mesh
        worst = max(worst, gap - bound)
        fails += gap > bound + 1e-9
    assert record(3, fails == 0, f"200 merges, d <= 2LN*delta + 1e-9 in every case "
                                 f"(max excess {worst:.2e}, failures {fails})")


def test_criterion_4_scaling_inequality():
    norms = [Lp(1, 16), Lp(2, 16), Lp(3.5, 16), Linf(16), Euclidean(3), L1Gamma()]
    viol = {str(s): check_scaling_inequality(s, 10_000, seed=SEED).violations for s in norms}
    prod = check_scaling_inequality(OmegaSup(16), 10_000, seed=SEED)
    ok = not any(viol.values()) and prod.worst_violation >= 0.4 - 1e-9
    assert record(4, ok, f"norm backends violations {sum(viol.values())} in 10^4 samples each; "
                         f"omega-sup worst violation {prod.worst_violation:.3f} >= 0.4")


def test_criterion_5_enumerated_rationals():
    rng = np.random.default_rng(SEED)
    pts = [Irrational(float(x), "seeded") for x in rng.uniform(0.01, 0.99, 100)]
    f2 = rational_enumeration_function(1000, Lp(2, 1000))
    lp2 = min(pointwise_oscillation(f2, t).estimate for t in pts)
    fsup = rational_enumeration_function(1000, OmegaSup(1000))
    sup_ok = True
    worst = {}
    for n in (10, 100):
        vals = []
        for t in pts:
            rad = 0.999 * fsup.exclusion_radius(t, n)
            prof = pointwise_oscillation(fsup, t, radii=[rad, rad / 4, rad / 16],
                                         respect_resolution=False)
            vals.append(prof.estimate)
        worst[n] = max(vals)
        sup_ok &= worst[n] <= 1 / (n + 1) + 1e-12
    f1 = rational_enumeration_function(1000, Lp(1, 1000))
    levels = (8, 16, 32, 64)
    sep1 = [same_points_probe(f1, uniform(Fraction(0), Fraction(1), n), "adversarial").separation
            for n in levels]
    sep2 = [same_points_probe(f2, uniform(Fraction(0), Fraction(1), n), "adversarial").separation
            for n in levels]
    l1_ok = all(abs(s - 1) <= 1e-9 for s in sep1)
    l2_ok = all(s <= (1 / n) ** 0.5 + 1e-9 for s, n in zip(sep2, levels))
    ok = lp2 >= 1 and sup_ok and l1_ok and l2_ok
    assert record(5, ok, f"lp(2) min oscillation {lp2:.3f} >= 1; omega-sup worst "
                         f"{worst[10]:.4f} <= 1/11, {worst[100]:.5f} <= 1/101; lp(1) tag "
                         f"separation {sep1}; lp(2) within mesh^1/2: {l2_ok}")


def test_criterion_6_binary_digits():
    f = binary_digit_function(16, Linf(64))
    levels = [2 ** k for k in range(3, 13)]
    seps = [same_points_probe(f, uniform(0.0, 1.0, n), "adversarial").separation for n in levels]
    dar = darboux_probe(f, 0.05)
    g = binary_digit_function(16, OmegaSum(16))
    dar_g = darboux_probe(g, 0.05)
    m = discontinuity_measure(g, 0.1, grid=2 ** 12)
    flagged = "digit-linf-integrability-disputed" in dar.annotations
    ok = (min(seps) >= 1 - 1e-9 and not dar.details["passed"]
          and dar.details["persistent_bound"] >= 1 and dar_g.details["passed"]
          and m.upper < 0.01 and flagged)
    assert record(6, ok, f"linf tag separation min {min(seps):.3f} over N=8..4096, darboux "
                         f"bound {dar.details['persistent_bound']:.3f} (flagged: {flagged}); "
                         f"omega-sum darboux passed={dar_g.details['passed']}, "
                         f"m(E_0.1) <= {m.upper:.5f}")


def test_criterion_7_adversary():
    ind = adversary_partitions(rational_indicator_l1(), 1.0, 100)
    l1 = adversary_partitions(rational_enumeration_function(1000, Lp(1, 1000)), 1.0, 50)
    l2 = adversary_partitions(rational_enumeration_function(1000, Lp(2, 1000)), 1.0, 50)
    ok = (abs(ind.achieved - 1) <= 1e-9 and ind.floor == 0.25 and ind.meets_floor
          and abs(l1.achieved - 1) <= 1e-9
          and abs(l2.achieved - 0.1414) <= 1e-4 and abs(l2.achieved - math.sqrt(0.02)) <= 1e-6
          and l2.achieved < 0.25)
    assert record(7, ok, f"indicator achieved {ind.achieved:.6f} >= floor {ind.floor}; "
                         f"lp(1) {l1.achieved:.6f}; lp(2) {l2.achieved:.6f} < 0.25")


def test_criterion_8_coordinatewise_continuity():
    rng = np.random.default_rng(SEED)
    digits = binary_digit_function(24)
    dpts = [float(x) for x in rng.uniform(0, 1, 25)]
    dpts += [Fraction(int(rng.integers(1, 2 ** int(k))), 2 ** int(k)) for k in rng.integers(1, 11, 25)]
    rats = rational_enumeration_function(1000)
    rpts = [rats.rationals[int(n)] for n in rng.integers(0, 1000, 25)]
    rpts += [Irrational(float(x), "seeded") for x in rng.uniform(0.01, 0.99, 25)]
    reports = [coordinate_continuity_probe(digits, t) for t in dpts]
    reports += [coordinate_continuity_probe(rats, t) for t in rpts]
    bad = sum(not r.agree for r in reports)
    split = sum(r.coordinates_continuous for r in reports)
    assert record(8, bad == 0, f"{len(reports) - bad}/100 points agree "
                               f"({split} continuous, {100 - split} discontinuous)")


def test_criterion_9_atlas():
    t0 = time.perf_counter()
    js, _ = run(ExperimentConfig("atlas"))
    elapsed = time.perf_counter() - t0
    cells = json.loads(js)["result"]["cells"]
    incoherent = [(c["function"], c["space"]) for c in cells if not c["coherent"]]
    by = {(c["function"], c["space"].split(":")[0]): c for c in cells}
    linf, osum = by[("digits:16", "linf")], by[("digits:16", "omega-sum")]
    digit_row = (linf["nowhere_continuous"] and min(linf["tag_separation"]["separations"]) >= 1
                 and osum["darboux"]["passed"] and osum["measures"][0]["upper"] < 0.01)
    ok = not incoherent and len(cells) == 40 and elapsed <= 300 and digit_row
    assert record(9, ok, f"{len(cells) - len(incoherent)}/{len(cells)} atlas cells coherent "
                         f"in {elapsed:.0f}s; digit row linf/omega-sum as expected: {digit_row}")


COMMANDS = [
    ["integrate", "--fn", "smooth:poly12", "--space", "euclidean:2"],
    ["ftc", "--fn", "smooth:trig", "--space", "omega-sum:8", "--mesh-min", "2.5e-4",
     "--mesh-levels", "1"],
    ["spacecheck", "--space", "omega-sup:16", "--N", "10000"],
    ["oscillate", "--fn", "rationals:1000", "--space", "lp:2", "--points", "irr:0.41421356"],
    ["probe", "--fn", "digits:16", "--space", "linf", "--criterion", "same-points", "--N", "4096"],
    ["darboux", "--fn", "digits:16", "--space", "omega-sum:16"],
    ["adversary", "--fn", "ratind", "--r", "1", "--N", "100"],
    ["oscillate", "--fn", "digits:24", "--points", "1/3,0.5", "--coordinates"],
    ["atlas", "--fns", "digits:16,smooth:trig", "--spaces", "linf,omega-sum", "--grid", "512"],
]


def test_criterion_10_determinism(tmp_path):
    same = 0
    for k, argv in enumerate(COMMANDS):
        blobs = []
        for rep in range(2):
            path = tmp_path / f"c{k}_{rep}.json"
            assert main([*argv, "--seed", "7", "--out", str(path)]) == 0
            blobs.append(path.read_bytes())
        same += blobs[0] == blobs[1]
    ok = same == len(COMMANDS)
    assert record(10, ok, f"{same}/{len(COMMANDS)} commands byte-identical on repeat")
