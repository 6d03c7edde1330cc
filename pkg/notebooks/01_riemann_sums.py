"""
Riemann sums in metric vector spaces
====================================

Tagged partitions, Riemann sums and the Cauchy-type diagnostics that
decide whether the sums settle down as the mesh shrinks.
"""

# %%
# A vector-valued integrand: t -> (t, t^2) in the plane.
import numpy as np

from metrivec import Euclidean, Integrand, integrate, riemann_sum, uniform

E2 = Euclidean(2)
f = Integrand(lambda t: E2.element([t, t * t]), E2, label="(t, t^2)",
              batch=lambda ts: np.stack([ts, ts * ts], axis=1))

# %%
# Left, right and midpoint tags on the same eight intervals.
for rule in ("left", "right", "midpoint"):
    print(rule, riemann_sum(f, uniform(0.0, 1.0, 8, rule)))

# %%
# `integrate` walks a halving mesh schedule and stops once every pair of
# tag choices agrees to eps.  The table is the convergence diagnostic.
rep = integrate(f, 0.0, 1.0, eps=1e-4)
for mesh, sep, n in rep.table():
    print(f"mesh {mesh:.2e}  worst separation {sep:.2e}  ({n} tag choices)")
print("estimate", rep.estimate, "converged", rep.converged)

# %%
# Merging a partition with a coarse one changes the sum by at most
# 2 L N delta: only intervals cut by one of the N new points move.
from metrivec.gallery import smooth_function
from metrivec.partitions import merge, random_partition

rng = np.random.default_rng(0)
g = smooth_function("mix", Euclidean(5))
delta = random_partition(0.0, 1.0, 0.05, rng)
coarse = random_partition(0.0, 1.0, 0.4, rng).partition
gap = g.space.metric(riemann_sum(g, delta), riemann_sum(g, merge(delta, coarse)))
print(f"gap {gap:.2e} <= bound {2 * g.bound * coarse.n * delta.mesh:.2e}")

# %%
# The product metric on sequences is not homogeneous: scaling by 0.6
# leaves d(0, 2 e_1) clamped at 1.
from metrivec import OmegaSup, check_scaling_inequality

rep = check_scaling_inequality(OmegaSup(16), 2000, seed=0)
print(rep.outcome, f"worst violation {rep.worst_violation:.2f}")
