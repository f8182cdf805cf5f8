"""
Volterra operators and atomic decomposition
===========================================
"""

import numpy as np

from tentlab import build_lattice
from tentlab.analytic import AnalyticFn, AtomCoefficients, analyze_atoms, default_gamma, synthesize_atoms
from tentlab.certify import volterra_certify, volterra_compact_certify
from tentlab.weights import RadialWeight, classify_doubling

w = RadialWeight.standard(0.0)
rep = classify_doubling(w)

for expr in ("z", "z**3 + z", "-log(1-z)", "z/(1-z)"):
    g = AnalyticFn.parse(expr)
    b = volterra_certify(g, w, 2, 2, report=rep)
    c = volterra_compact_certify(g, w, 2, 2, report=rep)
    print(f"J_g, g = {expr:10s}: {b.verdict.value:9s} estimate {b.estimate:.4g}, {c.verdict.value}")

# synthesise a two-atom function, then recover coefficients by Neumann iteration
lat = build_lattice(0.1, 2.0**-10)
gamma = default_gamma(rep, 2)
c = np.zeros(len(lat))
c[[5, 400]] = [1.0, -0.5]
f = synthesize_atoms(AtomCoefficients(lat, c, gamma, 2, w), rep)
res = analyze_atoms(f, lat, gamma, w, 2, report=rep)
print("residuals:", ["%.1e" % r for r in res.residuals])

z = 0.9 * np.exp(1j * np.linspace(0, 2 * np.pi, 7))
print("max error:", np.max(np.abs(f(z) - synthesize_atoms(res.coeffs, rep, validate=False)(z))))
