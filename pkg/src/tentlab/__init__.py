"""tentlab: numerics for tent spaces of analytic functions with doubling weights.

The modules build on each other: ``weights`` (radial weights and doubling
classes), ``diskgeom`` (pseudo-disks, Carleson squares, lattices), ``quad``
(disk cubature and integral estimates), ``measures`` (Carleson and tent
norms), ``analytic`` (evaluable analytic functions, atoms), ``certify``
(embedding, Littlewood-Paley and Volterra certifiers) and ``cli``.
"""

from ._trend import Verdict
from .analytic import AnalyticFn, AtomCoefficients, analyze_atoms, synthesize_atoms, test_function, volterra_apply
from .certify import (CertReport, embed_certify, embed_compact_certify, embed_lower_bound_probe, g_mu_r,
                      lp_equivalence_check, lp_norm, volterra_certify, volterra_compact_certify)
from .diskgeom import Lattice, build_lattice, pseudo_dist, pseudo_disk
from .errors import (CoveringError, DivergentIntegralError, DomainError, NonConvergenceError, ParameterDomainError,
                     TentlabError, WeightClassError)
from .measures import DiskMeasure, SupGrid, carleson_norm, seq_tent_norm, tent_infty_norm
from .weights import DoublingReport, RadialWeight, classify_doubling

__version__ = "0.1.0"

__all__ = [
    "AnalyticFn", "AtomCoefficients", "CertReport", "CoveringError", "DiskMeasure", "DivergentIntegralError",
    "DomainError", "DoublingReport", "Lattice", "NonConvergenceError", "ParameterDomainError", "RadialWeight",
    "SupGrid", "TentlabError", "Verdict", "WeightClassError", "analyze_atoms", "build_lattice", "carleson_norm",
    "classify_doubling", "embed_certify", "embed_compact_certify", "embed_lower_bound_probe", "g_mu_r",
    "lp_equivalence_check", "lp_norm", "pseudo_disk", "pseudo_dist", "seq_tent_norm", "synthesize_atoms",
    "tent_infty_norm", "test_function", "volterra_apply", "volterra_certify", "volterra_compact_certify",
]
