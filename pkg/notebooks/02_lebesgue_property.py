"""
Integrable but discontinuous
============================

The same function can be Riemann integrable and discontinuous almost
everywhere under one metric, and continuous almost everywhere under
another.  This walk-through compares sequence norms with the product
metrics on R^omega.
"""

# %%
from fractions import Fraction

import numpy as np

from metrivec import Irrational, Linf, Lp, OmegaSum, OmegaSup, uniform
from metrivec.gallery import (
    adversary_partitions,
    binary_digit_function,
    rational_enumeration_function,
    rational_indicator_l1,
)
from metrivec.integration import same_points_probe
from metrivec.oscillation import darboux_probe, discontinuity_measure, pointwise_oscillation

N_MAX = 1000

# %%
# f(r_n) = e_n on an enumeration of the rationals, 0 elsewhere.  In lp(2)
# every window around an irrational holds some r_n, so the oscillation is
# at least ||e_n|| = 1; in the product metric far-out indices barely count.
t = Irrational(np.sqrt(2) - 1, "sqrt2-1")
for space in (Lp(2, N_MAX), OmegaSup(N_MAX)):
    f = rational_enumeration_function(N_MAX, space)
    print(space, "oscillation at sqrt(2)-1:", pointwise_oscillation(f, t).estimate)

# %%
# Yet the lp(2) Riemann sums still converge: rational tags in distinct
# intervals have disjoint supports, so the sum has norm sqrt(N)/N.
for p in (1, 2):
    f = rational_enumeration_function(N_MAX, Lp(p, N_MAX))
    seps = [same_points_probe(f, uniform(Fraction(0), Fraction(1), n), "adversarial").separation
            for n in (8, 16, 32, 64)]
    print(f"lp({p}) tag separations", np.round(seps, 4))

# %%
# Binary digits t -> (c_1(t), c_2(t), ...).  In the sup norm a high digit
# flips inside every interval; in the weighted product metric high digits
# are damped by 2^-k and the Darboux sums shrink.
sup = binary_digit_function(16, Linf(64))
prod = binary_digit_function(16, OmegaSum(16))
print("linf tag separation at N=1024:",
      same_points_probe(sup, uniform(0.0, 1.0, 1024), "adversarial").separation)
print("linf annotations:", sup.annotations())
rep = darboux_probe(prod, 0.05)
print("omega-sum Darboux passed:", rep.details["passed"], "at N =", rep.details["levels"][-1])
print("omega-sum m(E_0.1) bracket:", discontinuity_measure(prod, 0.1, grid=1024).to_dict()["upper"])

# %%
# In l1 every discontinuity set of positive measure can be turned into a
# pair of Riemann sums at distance r m(E_r) / 4 or more.
res = adversary_partitions(rational_indicator_l1(), 1.0, 100)
print(f"l1: achieved {res.achieved:.3f}, floor {res.floor:.3f}")
res = adversary_partitions(rational_enumeration_function(N_MAX, Lp(2, N_MAX)), 1.0, 50)
print(f"lp(2): achieved {res.achieved:.4f}, floor {res.floor:.3f}")
