"""
Aharonov-Bohm caging in time
============================

Inject a particle-hole pair on a single site of a 64-cell ring and follow the
intensity.  In a cage the excitation never leaves its neighbourhood.  Inside
the cage, the degeneracy class sets how the intensity behaves: bounded
oscillation, polynomial growth from a Jordan block, or exponential growth
from complex flat-band energies.
"""

import math

import numpy as np

from nhcage import LadderParams, SiteIndex, evolve, growth_character
from nhcage.dynamics import max_leak, mirror_deviation, occupied_sites

src = SiteIndex(1, 32)
configs = {
    "EP4": LadderParams(2, 2, 2, 2, math.pi / 3, -math.pi / 3),
    "EP2_second": LadderParams(2, 2, 2 * math.sqrt(3), 2, math.pi / 3, math.pi / 6),
    "EP2_first": LadderParams(2, 2, 2, 2, 0, 0),
    "DP2": LadderParams(2, 2, 1, 2, 0, math.pi / 3),
}

# %%
# Every flat configuration keeps the intensity within one cell of the source.
for name, p in configs.items():
    tr = evolve(p)
    cells = sorted({s.cell for s in occupied_sites(tr)})
    print(f"{name:11s} occupied cells {cells}  leak {max_leak(tr):.1e}  "
          f"mirror asymmetry {mirror_deviation(tr):.1e}")

# %%
# Growth of the source intensity.  For EP2 of the first kind the source is
# frozen, so watch the rung partner on leg b instead.
print()
for name, p in configs.items():
    site = SiteIndex(2, 32) if name == "EP2_first" else src
    g = growth_character(evolve(p), site)
    value = "" if g.value is None else f"{g.value:.4g}"
    print(f"{name:11s} {g.kind:12s} {value}")

# %%
# The first-kind EP2 state is exactly (1 - i H t) psi0, so the rung intensity
# is a parabola in t.
tr = evolve(configs["EP2_first"])
y = tr.series(SiteIndex(2, 32))
print("\nb-site intensity / t^2 at t = 1, 5, 10:",
      np.round(y[[20, 100, 200]] / tr.times[[20, 100, 200]] ** 2, 12))

# %%
# Breaking j = t releases the excitation.
tr = evolve(LadderParams(2, 1, 2, 2), times=np.linspace(0, 2, 41))
print(f"\nj != t: intensity beyond the neighbouring cells by t = 2: {max_leak(tr):.3g}")
