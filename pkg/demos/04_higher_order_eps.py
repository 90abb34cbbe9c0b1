"""
Higher-order exceptional points from N coupled chains
=====================================================

Stacking N chains with identical rungs that each satisfy the cage conditions
gives a single flat band at zero energy whose Bloch matrix is nilpotent of
order 2N.  Numerically this is a hard case: a 2N-fold Jordan block scatters
the computed eigenvalues over a circle of radius about eps**(1/2N).
"""

import math

import numpy as np

from nhcage import LatticeSpec, SiteIndex, build_real_space, classify_nchain, local_range
from nhcage import make_ep2n_params, numkit

# %%
# The minimal polynomial is x^(2N) and an excitation spreads over 2N cells.
for n in (2, 3, 4, 5):
    p = make_ep2n_params(n, 2.0, math.pi / 3)
    c = classify_nchain(p)
    lr = local_range(p, LatticeSpec(64), SiteIndex(1, 32))
    print(f"N={n}: class {c.kind.value}, minimal polynomial degree {c.minimal_poly.degree}, "
          f"local range {lr}")

# %%
# Raw LAPACK eigenvalues versus cluster means with a verified Jordan structure.
print()
for n in (2, 3, 4, 5):
    h = build_real_space(make_ep2n_params(n, 2.0, math.pi / 3), LatticeSpec(16))
    raw = np.abs(numkit.eigvals(h)).max()
    clustered = np.abs(numkit.clustered_eigvals(h)).max()
    print(f"N={n}: max |E| raw {raw:.2e}, clustered {clustered:.1e}")
