"""
Carleson measures and the embedding certificate
===============================================

Sampled Carleson ratios, a vanishing test and the two-sided check between
the embedding estimate and the lower-bound probe.
"""

import math

from tentlab.certify import embed_certify, embed_compact_certify, embed_lower_bound_probe
from tentlab.measures import DiskMeasure, SupGrid, carleson_norm, vanishing_carleson_test
from tentlab.weights import RadialWeight

grid = SupGrid(8, 4)

# area measure: the sup sits at a = 0, everything else is (1-|a|^2)/2
res = carleson_norm(DiskMeasure.area(), grid)
print("Carleson norm of dA:", res.value, "vs pi =", math.pi)

nu = DiskMeasure.density(lambda z: abs(1 - z) ** -0.5, label="|1-z|^-1/2 dA")
print("vanishing?", vanishing_carleson_test(nu).verdict.value)

w = RadialWeight.standard(0.0)
for label, mu in (("omega dA", DiskMeasure.weighted_area(w)),
                  ("(1-|z|)^0.5 omega dA", DiskMeasure.weighted_area(w, 0.5))):
    est = embed_certify(w, 2, 2, mu, grid=grid)
    cpt = embed_compact_certify(w, 2, 2, mu)
    probe = embed_lower_bound_probe(w, 2, 2, mu, grid=SupGrid(5, 4), seeds=())
    print(f"{label}: {est.verdict.value} estimate {est.estimate:.4f}, {cpt.verdict.value}, "
          f"probe/estimate {probe.value / est.estimate:.3f}")
