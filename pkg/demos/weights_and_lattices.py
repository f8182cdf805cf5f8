"""
Doubling weights and r-lattices
===============================

Classify a few radial weights, then build a lattice and look at how its
points spread toward the boundary.
"""

import numpy as np

from tentlab import build_lattice
from tentlab.weights import RadialWeight, classify_doubling

# standard weights (1-r)^alpha: the tail ratio at r and (1+r)/2 is exactly 2^(alpha+1)
for alpha in (-0.5, 0.0, 1.0, 3.0):
    rep = classify_doubling(RadialWeight.standard(alpha))
    print(f"alpha={alpha:5}: in D = {rep.in_D}, C_hat = {rep.C_hat:.6f}, beta0 = {rep.beta0:.3f}")

# a weight that decays too fast: the tail ratio blows up near the boundary
rep = classify_doubling(RadialWeight.exp_inv())
print("exp(-1/(1-r)):", rep.in_D_hat.value, "C_hat =", rep.C_hat)

lat = build_lattice(0.2, 2.0**-8)
print(len(lat), "lattice points")

# counts per dyadic annulus grow on average like 2^j; rings are spaced in hyperbolic radius, so they pair up
d = 1 - np.abs(lat.points)
for j in range(1, 9):
    band = (d <= 2.0 ** -(j - 1)) & (d > 2.0**-j)
    print(f"  1-|z| in (2^-{j}, 2^-{j - 1}]: {band.sum()}")
