"""
Primitives and derivatives
==========================

Primitives of continuous functions and the two halves of the fundamental
theorem, checked on (sin t, cos t) inside a product space.
"""

# %%
import numpy as np

from metrivec import IntegrateConfig, OmegaSum, differentiability_probe, ftc_check, primitive
from metrivec.calculus import numerical_primitive
from metrivec.gallery import smooth_function

F = smooth_function("trig", OmegaSum(8))
dF = F.derivative_function()

# %%
# Integrating the derivative gives back the increment of F.
rep = ftc_check(F, dF, F.space, 0.0, 1.0, IntegrateConfig(eps=1e-3, levels=(4096,)))
print(f"residual {rep.residual:.2e}, reliable {rep.reliable}")

# %%
# A primitive table of f itself on five points against 1 - cos and sin.
tab = primitive(F, 0.0, 1.0, 5, IntegrateConfig(eps=1e-3, levels=(4096,)))
for t, v in zip(tab.grid, tab.values):
    print(f"t={float(t):.2f}  F=({v[0]:.6f}, {v[1]:.6f})  exact=({1 - np.cos(t):.6f}, {np.sin(t):.6f})")

# %%
# Differentiating the numerical primitive recovers f: the remainder
# ratios fall roughly in proportion to the step.
G = numerical_primitive(F, 0.0)
probe = differentiability_probe(G, F.space, 0.4, F(0.4))
print("ratios", np.array(probe.ratios["right"]), "verdict", probe.verdict)
