"""
Flat bands and their degeneracy classes
=======================================

A two-leg bosonic ladder with particle-hole (pairing) couplings has four
Bloch bands.  When the leg hopping ``j`` equals the leg pairing ``t`` and the
rungs satisfy ``t1 cos(theta1) = t2 cos(theta2)``, every band is flat.  What
differs between flat configurations is how the bands touch: the flat
Bloch matrix can be diagonalizable (a diabolic point) or defective (an
exceptional point of order 2 or 4).  The minimal polynomial tells them apart.
"""

import math

import numpy as np

from nhcage import LadderParams, classify, dispersion
from nhcage.transfer import flat_band_conditions

# Four representative flat configurations, one per class.
configs = {
    "EP4": LadderParams(2, 2, 2, 2, math.pi / 3, -math.pi / 3),
    "EP2 (second kind)": LadderParams(2, 2, 2 * math.sqrt(3), 2, math.pi / 3, math.pi / 6),
    "EP2 (first kind)": LadderParams(2, 2, 2, 2, 0, 0),
    "DP2": LadderParams(2, 2, 1, 2, 0, math.pi / 3),
}

ks = np.linspace(-math.pi, math.pi, 101)

# %%
# Each band is constant in k to machine precision.
for name, p in configs.items():
    grid = dispersion(p, ks)
    print(f"{name:20s} band spread over k: {grid.spread().max():.1e}")

# %%
# Detuning j away from t destroys the flatness.
p = configs["EP4"].with_(j=2.5)
print("\nEP4 with j = 2.5:", flat_band_conditions(p))
print("band spread:", dispersion(p, ks).spread().round(3))

# %%
# The minimal polynomial of the flat Bloch matrix (it is the same at every k)
# fixes the class.  Roots come with their multiplicity in the minimal
# polynomial; a multiplicity above one means a Jordan block, i.e. an EP.
print()
for name, p in configs.items():
    c = classify(p)
    roots = ", ".join(f"{complex(r):.4g}^{m}" for r, m in c.minimal_poly.roots)
    print(f"{name:20s} -> {c.kind.value:11s} minimal polynomial roots: {roots}")
