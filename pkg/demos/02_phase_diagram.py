"""
Phase diagram of degeneracy classes
===================================

Fix ``j = t = 2`` and ``t1 = 2`` and walk over the two rung phases.  At each
point the second rung amplitude is chosen as ``t2 = t1 cos(theta1) /
cos(theta2)``, so every point is a flat-band configuration.  The scan records
which class each point falls in.
"""

import collections
import math

from nhcage.spectra import default_angle_grid, phase_diagram_scan

n = 32
grid = default_angle_grid(n)
diagram = phase_diagram_scan(2.0, grid, grid, j=2.0)
kinds = diagram.kinds()

# %%
# Counts per class.  Generic points are second-kind EP2s; EP4 sits on the
# anti-diagonal theta2 = -theta1, DP2 on the theta1 = 0 line.
print(collections.Counter(kinds.ravel()))

# %%
# A coarse character map: rows are theta1, columns theta2.
symbol = {"EP4": "4", "EP2_second": ".", "EP2_first": "1", "DP2": "D", "Undefined": " "}
print("\ntheta1 \\ theta2 from -pi to pi")
for th1, row in zip(grid, kinds):
    print(f"{math.degrees(th1):7.1f}  " + "".join(symbol[k] for k in row))

# %%
# Points where cos(theta2) = 0 cannot meet the constraint and are flagged.
flagged = [pt for pt in diagram.points if pt.flagged]
print(f"\n{len(flagged)} flagged points, e.g. {flagged[0]}")
