"""Numerical certifiers for embeddings, Littlewood-Paley equivalence and Volterra operators.

Every certifier samples its defining quantity on a :class:`~tentlab.measures.SupGrid`
and reads the verdict off the per-level maxima with the trend rules of
:mod:`tentlab._trend`.  Reports never claim a universal constant: an
"estimate" is the sampled supremum (or tent norm) of the defining quantity.

For ``p <= q`` the embedding estimate is the local mass ratio normalised by
the weighted area of the same pseudohyperbolic disk,

    Gt(z) = (mu(Delta(z,r)) / (omega dA)(Delta(z,r)))^(1/q) * omega_hat(z)^(1/q - 1/p),

which is comparable to ``G_{mu,r}(z)`` with constants depending only on the
weight and ``r``, and equals the operator norm exactly when ``mu = c omega dA``
and ``p = q``.  The raw supremum of ``G_{mu,r}`` is reported next to it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Callable, Sequence

import numpy as np

from ._parallel import pmap
from ._trend import Verdict, decay_verdict, growth_verdict
from .analytic import (AnalyticFn, AtomCoefficients, default_gamma, random_sign_probe, test_function)
from .diskgeom import Lattice, build_lattice, carleson_square_contains, pseudo_disk
from .errors import DivergentIntegralError, DomainError, NonConvergenceError, WeightClassError
from .measures import (DiskMeasure, SupGrid, carleson_norm, kernel_carleson_norm, region_integral, seq_tent_norm,
                       tent_infty_norm, vanishing_carleson_test)
from .quad import RatioBand, _band
from .weights import DoublingReport, RadialWeight, classify_doubling

R_DEFAULT = 0.2
S_DEFAULT = 1.0
WHITNEY_ANGLES = 4
NORM_NOTE = "T-infinity norms use the Carleson form sup over the disk of square averages"


@dataclass
class CertReport:
    verdict: Verdict
    estimate: float
    condition_used: str
    theorem_ref: str
    r: float | None = None
    s: float | None = None
    grid: dict = field(default_factory=dict)
    trend: list = field(default_factory=list)
    lower_bound_probe: float | None = None
    details: dict = field(default_factory=dict)

    def __post_init__(self):
        finite_ok = self.verdict in (Verdict.BOUNDED, Verdict.COMPACT)
        if not finite_ok:
            if math.isfinite(self.estimate):
                self.details.setdefault("sampled_value", self.estimate)
            self.estimate = math.inf
        elif not math.isfinite(self.estimate):
            raise ValueError("a bounded/compact verdict needs a finite estimate")

    def to_dict(self) -> dict:
        out: dict[str, Any] = {
            "verdict": self.verdict.value,
            "estimate": self.estimate,
            "condition_used": self.condition_used,
            "theorem_ref": self.theorem_ref,
            "r": self.r,
            "s": self.s,
            "grid": self.grid,
            "trend": list(self.trend),
            "norm_convention": NORM_NOTE,
        }
        if self.lower_bound_probe is not None:
            out["lower_bound_probe"] = self.lower_bound_probe
        if self.details:
            out["details"] = self.details
        return out


def _weight_report(w: RadialWeight, report: DoublingReport | None) -> DoublingReport:
    rep = classify_doubling(w) if report is None else report
    if not rep.in_D:
        raise WeightClassError(f"weight {w.label!r} is not confirmed doubling "
                               f"(D-hat: {rep.in_D_hat.value}, D-check: {rep.in_D_check.value})")
    return rep


def _check_pq(p: float, q: float) -> None:
    if not (p > 0 and q > 0):
        raise DomainError("p and q must be positive")


def _check_r(r: float) -> None:
    if not 0.0 < r < 0.25:
        raise DomainError("r must lie in (0, 1/4)")


def _grid_levels(grid: SupGrid, invariant: bool) -> list[np.ndarray]:
    levels = [grid.level_points(j) for j in range(grid.levels + 1)]
    return [lv[:1] for lv in levels] if invariant else levels


def _per_level(func: Callable[[complex], float], grid: SupGrid, invariant: bool):
    levels = _grid_levels(grid, invariant)
    pts = np.concatenate(levels)
    vals = np.asarray(pmap(lambda z: func(complex(z)), pts), dtype=float)
    lev = np.concatenate([np.full(lv.size, j) for j, lv in enumerate(levels)])
    maxima = np.array([vals[lev == j].max() for j in range(len(levels))])
    return pts, vals, maxima


# -- local mass ratio ------------------------------------------------------------------


def g_mu_r(mu: DiskMeasure, w: RadialWeight, p: float, q: float, r: float, z: complex) -> float:
    """``mu(Delta(z,r))^(1/q) / (omega_hat(z)^(1/p) (1-|z|)^(1/q))``."""
    _check_pq(p, q)
    _check_r(r)
    z = complex(z)
    mass = mu_region(mu, z, r)
    x = abs(z)
    return mass ** (1.0 / q) / (float(w.tail(x)) ** (1.0 / p) * (1.0 - x) ** (1.0 / q))


def mu_region(mu: DiskMeasure, z: complex, r: float) -> float:
    """``mu(Delta(z, r))``; a cubature stall within 1e-6 relative (cut-off densities) is accepted."""
    try:
        return region_integral(mu, pseudo_disk(z, r), tol=1e-8)
    except NonConvergenceError as exc:
        if math.isfinite(exc.partial) and exc.error <= 1e-6 * abs(exc.partial):
            return float(exc.partial)
        raise


def g_normalised(mu: DiskMeasure, w: RadialWeight, p: float, q: float, r: float, z: complex,
                 reference: DiskMeasure | None = None) -> tuple[float, float]:
    """``(Gt(z), G(z))``: the normalised and the raw local mass ratio."""
    ref_mu = DiskMeasure.weighted_area(w) if reference is None else reference
    z = complex(z)
    x = abs(z)
    mass = mu_region(mu, z, r)
    ref = mu_region(ref_mu, z, r)
    hat = float(w.tail(x))
    raw = mass ** (1.0 / q) / (hat ** (1.0 / p) * (1.0 - x) ** (1.0 / q))
    norm = (mass / ref) ** (1.0 / q) * hat ** (1.0 / q - 1.0 / p)
    return norm, raw


def _g_profile(mu: DiskMeasure, w: RadialWeight, p: float, q: float, r: float, grid: SupGrid):
    ref_mu = DiskMeasure.weighted_area(w)
    invariant = mu.rotation_invariant
    levels = _grid_levels(grid, invariant)
    pts = np.concatenate(levels)
    pairs = pmap(lambda z: g_normalised(mu, w, p, q, r, z, ref_mu), pts)
    norm = np.array([a for a, _ in pairs])
    raw = np.array([b for _, b in pairs])
    lev = np.concatenate([np.full(lv.size, j) for j, lv in enumerate(levels)])
    m_norm = np.array([norm[lev == j].max() for j in range(len(levels))])
    m_raw = np.array([raw[lev == j].max() for j in range(len(levels))])
    return pts, norm, raw, m_norm, m_raw


# -- G as a density for the p > q regime --------------------------------------------------


def _g_measure(mu: DiskMeasure, w: RadialWeight, p: float, q: float, r: float, expo: float,
               depth: int) -> DiskMeasure:
    """``Gt^expo (1-|z|)^(-1) dA`` for the ``T^infty_{pq/(p-q), -1}`` conditions.

    Rotation-invariant ``mu`` gives a radial ``Gt``, tabulated at
    ``1 - rho = 2**-t`` (8 nodes per octave) and interpolated in ``log Gt``;
    beyond the table ``log Gt`` is extended linearly in ``t``.  Otherwise the
    measure is discretised on Whitney cells (dyadic bands, ``4 * 2**k``
    sectors in band ``k``) down to ``1 - |z| = 2**-depth``.
    """
    ref_mu = DiskMeasure.weighted_area(w)
    if mu.rotation_invariant:
        ts = np.arange(0, 8 * depth + 1) / 8.0
        rho = 1.0 - 2.0**-ts
        vals = np.array(pmap(lambda x: g_normalised(mu, w, p, q, r, complex(x), ref_mu)[0], rho))
        if np.any(vals <= 0):
            logs = None
        else:
            logs = np.log(vals)
        slope = (logs[-1] - logs[-9]) if logs is not None else 0.0

        def radial(x):
            x = np.asarray(x, dtype=float)
            t = -np.log2(np.maximum(1.0 - x, 1e-300))
            if logs is None:
                g = np.interp(t, ts, vals)
            else:
                g = np.exp(np.where(t <= ts[-1], np.interp(t, ts, logs), logs[-1] + slope * (t - ts[-1])))
            return g**expo / (1.0 - x)

        return DiskMeasure.density(lambda z: radial(np.abs(z)), radial=radial, label="G^s/(1-|z|) dA")
    pts, masses = [], []
    for k in range(depth):
        lo, hi = 1.0 - 2.0**-k, 1.0 - 2.0 ** -(k + 1)
        n = WHITNEY_ANGLES * 2**k
        t = 2.0 * np.pi * (np.arange(n) + 0.5) / n
        centre = 0.5 * (lo + hi) * np.exp(1j * t)
        g = np.array(pmap(lambda z: g_normalised(mu, w, p, q, r, complex(z), ref_mu)[0], centre))
        # int over the cell of (1-|z|)^(-1) dA
        cell = (2.0 * np.pi / n) * (math.log((1.0 - lo) / (1.0 - hi)) - (hi - lo))
        pts.append(centre)
        masses.append(g**expo * cell)
    return DiskMeasure.atoms(np.concatenate(pts), np.concatenate(masses))


# -- embeddings ----------------------------------------------------------------------


def embed_certify(w: RadialWeight, p: float, q: float, mu: DiskMeasure, r: float = R_DEFAULT,
                  grid: SupGrid | None = None, *, report: DoublingReport | None = None) -> CertReport:
    """Boundedness of the identity ``AT^infty_p(omega) -> T^infty_q(mu)``.

    ``p <= q``: the estimate is the grid supremum of the normalised local
    mass ratio; bounded iff its per-level maxima do not grow toward the
    boundary.  ``p > q``: the estimate is the ``T^infty_{pq/(p-q), -1}`` norm
    of the ratio, i.e. ``carleson_norm(Gt^s (1-|z|)^(-1) dA)^(1/s)``.
    """
    _check_pq(p, q)
    _check_r(r)
    _weight_report(w, report)
    grid = SupGrid() if grid is None else grid
    gmeta = grid.to_dict()
    if p <= q:
        pts, norm, raw, m_norm, m_raw = _g_profile(mu, w, p, q, r, grid)
        verdict = growth_verdict(m_norm)
        k = int(np.argmax(norm))
        return CertReport(verdict, float(norm[k]), "sup_z G_{mu,r}(z) < infinity (p <= q)",
                          "embedding characterisation, p <= q: local mass ratio bounded", r, None, gmeta,
                          m_norm.tolist(), details={"argmax": complex(pts[k]), "sup_G_raw": float(raw.max()),
                                                    "raw_trend": m_raw.tolist()})
    expo = p * q / (p - q)
    nu = _g_measure(mu, w, p, q, r, expo, grid.levels + 3)
    res = carleson_norm(nu, grid)
    value = res.value ** (1.0 / expo) if math.isfinite(res.value) else math.inf
    trend = (res.levels ** (1.0 / expo)).tolist()
    verdict = Verdict.UNBOUNDED if not math.isfinite(value) else growth_verdict(res.levels ** (1.0 / expo))
    return CertReport(verdict, value, f"G_{{mu,r}} in T^infty_{{{expo:g},-1}} (p > q)",
                      "embedding characterisation, p > q: tent condition on the local mass ratio", r, None, gmeta,
                      trend, details={"argmax": res.argmax, "exponent": expo})


def embed_compact_certify(w: RadialWeight, p: float, q: float, mu: DiskMeasure, r: float = R_DEFAULT,
                          grid: SupGrid | None = None, *, report: DoublingReport | None = None) -> CertReport:
    """Compactness surrogate: ``Gt`` in ``C_0`` (``p <= q``) or ``T^0_{pq/(p-q),-1}`` (``p > q``)."""
    _check_pq(p, q)
    _check_r(r)
    _weight_report(w, report)
    grid = SupGrid() if grid is None else grid
    gmeta = grid.to_dict()
    if p <= q:
        pts, norm, raw, m_norm, m_raw = _g_profile(mu, w, p, q, r, grid)
        v = decay_verdict(m_norm)
        verdict = {Verdict.VANISHING: Verdict.COMPACT, Verdict.NON_VANISHING: Verdict.NON_COMPACT}.get(
            v, Verdict.INCONCLUSIVE)
        return CertReport(verdict, float(norm.max()), "G_{mu,r} tends to 0 at the boundary (p <= q)",
                          "compact embedding, p <= q: local mass ratio in C_0", r, None, gmeta, m_norm.tolist(),
                          details={"sup_G_raw": float(raw.max())})
    expo = p * q / (p - q)
    nu = _g_measure(mu, w, p, q, r, expo, grid.levels + 3)
    t = vanishing_carleson_test(nu, grid)
    verdict = {Verdict.VANISHING: Verdict.COMPACT, Verdict.NON_VANISHING: Verdict.NON_COMPACT}.get(
        t.verdict, Verdict.INCONCLUSIVE)
    est = t.sup.value ** (1.0 / expo) if math.isfinite(t.sup.value) else math.inf
    return CertReport(verdict, est, f"G_{{mu,r}} in T^0_{{{expo:g},-1}} (p > q)",
                      "compact embedding, p > q: vanishing tent condition", r, None, gmeta, t.levels.tolist(),
                      details={"exponent": expo})


@dataclass
class ProbeResult:
    value: float
    best: str
    ratios: list

    def __float__(self) -> float:
        return float(self.value)

    def to_dict(self) -> dict:
        return {"value": self.value, "best": self.best, "ratios": self.ratios}


PROBE_PANEL = 1.0 / 16.0
PROBE_NODES = 6
PROBE_DEPTH = 40
_GL = np.polynomial.legendre.leggauss(PROBE_NODES)


def _gl_nodes(breaks: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    lo, hi = breaks[:-1, None], breaks[1:, None]
    x = 0.5 * (hi - lo) * _GL[0][None, :] + 0.5 * (hi + lo)
    wts = 0.5 * (hi - lo) * _GL[1][None, :]
    return x.ravel(), wts.ravel()


def _shared_atoms(fs: Sequence[AnalyticFn]) -> bool:
    f0 = fs[0]
    for f in fs:
        if np.any(f.poly) or f.kern_c.size or f.dilation != 1.0:
            return False
        if f.atom_a.shape != f0.atom_a.shape or np.any(f.atom_a != f0.atom_a) \
                or np.any(f.atom_gamma != f0.atom_gamma) or np.any(f.atom_scale != f0.atom_scale):
            return False
    return True


def multi_eval(fs: Sequence[AnalyticFn], z) -> np.ndarray:
    """``[f(z) for f in fs]`` as columns; atom sums over the same atoms share one kernel evaluation."""
    z = np.asarray(z, dtype=complex).ravel()
    if len(fs) == 1 or not _shared_atoms(fs):
        return np.column_stack([f(z) for f in fs])
    f0 = fs[0]
    ca = np.conj(f0.atom_a)
    g = f0.atom_gamma
    base = f0.atom_scale * (1.0 - np.abs(f0.atom_a)) ** g
    cmat = np.column_stack([f.atom_c * base for f in fs])
    out = np.empty((z.size, len(fs)), dtype=complex)
    step = max(1, CHUNK_NODES // max(1, ca.size))
    for i in range(0, z.size, step):
        zi = z[i:i + step, None]
        out[i:i + step] = ((1.0 - ca[None, :] * zi) ** -g[None, :]) @ cmat
    return out


CHUNK_NODES = 1 << 21


class FixedSquareRule:
    """Tensor Gauss rule on Carleson squares for smooth probe functions.

    Meant for atom sums whose atoms stay at ``1 - |a| >= PROBE_PANEL``:
    angular panels no wider than ``PROBE_PANEL``, uniform radial panels down
    to ``1 - |z| = PROBE_PANEL`` and dyadic panels below.  ``|f|`` at the
    nodes is computed once per square for all functions and reused for every
    measure and exponent.
    """

    def __init__(self, fs: Sequence[AnalyticFn]):
        self.fs = list(fs)
        self._cache: dict[complex, tuple] = {}

    def _nodes(self, a: complex):
        if a in self._cache:
            return self._cache[a]
        ra = abs(a)
        h = 1.0 - ra
        if ra == 0.0:
            t0, t1 = -np.pi, np.pi
        else:
            th = float(np.angle(a))
            t0, t1 = th - 0.5 * h, th + 0.5 * h
        na = max(1, math.ceil((t1 - t0) / PROBE_PANEL))
        tt, tw = _gl_nodes(np.linspace(t0, t1, na + 1))
        d = [h]
        if h > PROBE_PANEL:
            d = list(np.linspace(h, PROBE_PANEL, max(2, math.ceil((h - PROBE_PANEL) / PROBE_PANEL) + 1)))
        while d[-1] > 2.0**-PROBE_DEPTH:
            d.append(0.5 * d[-1])
        rr, rw = _gl_nodes(1.0 - np.asarray(d))
        z = (rr[:, None] * np.exp(1j * tt)[None, :]).ravel()
        wt = (np.abs(rr * rw)[:, None] * tw[None, :]).ravel()
        self._cache[a] = (z, wt, np.abs(multi_eval(self.fs, z)))
        return self._cache[a]

    def square_masses(self, mu: DiskMeasure, a: complex, q: float) -> np.ndarray:
        """``int_{S(a)} |f|^q dmu`` for every function."""
        a = complex(a)
        total = np.zeros(len(self.fs))
        if mu.parts:
            z, wt, fa = self._nodes(a)
            dens = sum(p(z) for p in mu.parts)
            total += (wt * dens) @ fa**q
        if mu.atom_points.size:
            inside = np.atleast_1d(carleson_square_contains(a, mu.atom_points))
            if np.any(inside):
                fa = np.abs(multi_eval(self.fs, mu.atom_points[inside]))
                total += mu.atom_masses[inside] @ fa**q
        return total

    def tent_norms(self, mu: DiskMeasure, q: float, grid: SupGrid) -> np.ndarray:
        """``||f||_{T^infty_q(mu)}`` for every function, on the grid's squares."""
        vals = np.array([self.square_masses(mu, a, q) / (1.0 - abs(a)) for a in grid.points])
        return vals.max(axis=0) ** (1.0 / q)


_PROBE_CACHE: dict[tuple, tuple] = {}
_DEN_CACHE: dict[tuple, float] = {}


def _random_probes(w: RadialWeight, p: float, gamma: float, lattice: Lattice | None, seeds: Sequence[int],
                   grid: SupGrid) -> tuple[FixedSquareRule, np.ndarray]:
    """Random-sign atom sums with unit sequence tent norm, their square rule and ``T^infty_p(omega)`` norms."""
    lat_key = ("default",) if lattice is None else (lattice.separation, lattice.truncation, len(lattice))
    key = (repr(w.to_dict()), p, gamma, lat_key, tuple(seeds), repr(grid.to_dict()))
    if key in _PROBE_CACHE:
        return _PROBE_CACHE[key]
    lat = build_lattice(0.2, PROBE_PANEL * 2.0) if lattice is None else lattice
    c = np.ones(len(lat))
    c = c / seq_tent_norm(lat, c, p, grid)
    coeffs = AtomCoefficients(lat, c, gamma, p, w)
    rule = FixedSquareRule([random_sign_probe(coeffs, int(sd)) for sd in seeds])
    den = rule.tent_norms(DiskMeasure.weighted_area(w), p, grid)
    if len(_PROBE_CACHE) > 16:
        _PROBE_CACHE.clear()
    _PROBE_CACHE[key] = (rule, den)
    return rule, den


def default_probe_points() -> np.ndarray:
    j = np.arange(0, 6)
    rad = 1.0 - 2.0**-j.astype(float)
    rad[0] = 0.0
    return np.concatenate([rad, rad[1:] * np.exp(1j * np.pi / 3)])


def embed_lower_bound_probe(w: RadialWeight, p: float, q: float, mu: DiskMeasure, lattice: Lattice | None = None,
                            gamma: float | None = None, seeds: Sequence[int] = (0, 1, 2), *,
                            zgrid=None, grid: SupGrid | None = None, report: DoublingReport | None = None,
                            tol: float = 1e-5) -> ProbeResult:
    """Largest observed ``||f||_{T^infty_q(mu)} / ||f||_{T^infty_p(omega)}`` over the test functions.

    Test functions are the normalised kernels ``f_z`` on ``zgrid`` and
    random-sign atom sums whose coefficients have unit sequence tent norm.
    Each ratio is a lower bound for the embedding norm.
    """
    _check_pq(p, q)
    rep = _weight_report(w, report)
    grid = SupGrid(levels=8, angles_per_level=8) if grid is None else grid
    if mu.is_zero:
        return ProbeResult(0.0, "zero measure", [])
    gamma = default_gamma(rep, p) if gamma is None else gamma
    omega = DiskMeasure.weighted_area(w)
    pts = default_probe_points() if zgrid is None else np.atleast_1d(np.asarray(zgrid, dtype=complex))

    wkey = repr(w.to_dict())
    rows = []
    for z in pts:
        f = test_function(z, w, p, gamma, report=rep)
        key = (wkey, p, gamma, complex(z), repr(grid.to_dict()), tol)
        if key not in _DEN_CACHE:
            _DEN_CACHE[key] = tent_infty_norm(f, omega, p, grid, tol)
        rows.append((f"f_z z={complex(z):.4g}", tent_infty_norm(f, mu, q, grid, tol) / _DEN_CACHE[key]))
    if seeds:
        rule, den = _random_probes(w, p, gamma, lattice, seeds, grid)
        num = rule.tent_norms(mu, q, grid)
        rows.extend((f"random signs seed={sd}", float(a / b)) for sd, a, b in zip(seeds, num, den))
    k = int(np.argmax([v for _, v in rows]))
    return ProbeResult(float(rows[k][1]), rows[k][0], [{"probe": a, "ratio": b} for a, b in rows])


def embed_sweep(w: RadialWeight, p: float, q: float, mu: DiskMeasure, rs: Sequence[float] = (0.1, 0.2),
                ss: Sequence[float] = (0.5, 1.0, 2.0), grid: SupGrid | None = None) -> dict:
    """Verdict invariance over ``r`` (and, for ``p > q``, over the kernel exponent ``s``)."""
    grid = SupGrid() if grid is None else grid
    rep = _weight_report(w, None)
    by_r = {r: embed_certify(w, p, q, mu, r, grid, report=rep) for r in rs}
    out: dict[str, Any] = {"r": {str(r): c.verdict.value for r, c in by_r.items()}}
    if p > q:
        expo = p * q / (p - q)
        nu = _g_measure(mu, w, p, q, rs[-1], expo, grid.levels + 3)
        out["s"] = {}
        for s in ss:
            k = kernel_carleson_norm(nu, s, grid)
            out["s"][str(s)] = Verdict.UNBOUNDED.value if not math.isfinite(k.value) else \
                growth_verdict(k.levels).value
    verdicts = set(out["r"].values()) | set(out.get("s", {}).values())
    out["invariant"] = len(verdicts) == 1
    return out


# -- Littlewood-Paley ---------------------------------------------------------------------


class DampedDerivative:
    """``z -> f^(m)(z) (1 - |z|)^m``, with the quadrature hints of ``f``."""

    def __init__(self, f: AnalyticFn, m: int):
        self.f, self.m = f, int(m)

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        return self.f.eval(z, self.m) * (1.0 - np.abs(z)) ** self.m

    def peaks(self, n: int = 24):
        return self.f.peaks(n)

    def derivative_modulus(self):
        """``|f^(m)(r e^{it})|`` as a function of ``r`` when it does not depend on ``t``, else None."""
        f = self.f
        if (f.atom_c.size and np.any(f.atom_c)) or (f.kern_c.size and np.any(f.kern_c)):
            return None
        d = np.array([abs(c) * math.perm(k, self.m) * f.dilation**k if k >= self.m else 0.0
                      for k, c in enumerate(f.poly)])
        nz = np.flatnonzero(d)
        if nz.size == 0:
            return lambda r: np.zeros(np.shape(r))
        if nz.size > 1:
            return None
        c, k = float(d[nz[0]]), int(nz[0]) - self.m
        return lambda r: c * np.asarray(r, dtype=float) ** k

    def radial_modulus(self):
        dm = self.derivative_modulus()
        if dm is None:
            return None
        return lambda r: dm(r) * (1.0 - np.asarray(r, dtype=float)) ** self.m


def lp_norm(f: AnalyticFn, w: RadialWeight, q: float, m: int, grid: SupGrid | None = None,
            tol: float = 1e-6) -> float:
    """``sum_{j<m} |f^(j)(0)| + ||f^(m)(z) (1-|z|)^m||_{T^infty_q(omega)}``."""
    if m < 1:
        raise DomainError("lp_norm needs m >= 1")
    head = sum(abs(f.eval(0.0, j)) for j in range(m))
    return float(head + tent_infty_norm(DampedDerivative(f, m), DiskMeasure.weighted_area(w), q, grid, tol))


@dataclass
class LPReport:
    verified: bool
    function_band: RatioBand
    moment_band: RatioBand
    moment_ratios: list
    details: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"verified": self.verified, "function_band": self.function_band.to_dict(),
                "moment_band": self.moment_band.to_dict(), "moment_ratios": self.moment_ratios,
                "details": self.details}


def monomial_moment_ratio(w: RadialWeight, q: float, n: int) -> float:
    """``n^q int_0^1 r^{(n-1)q+1} (1-r)^q omega dr / omega_{nq+1}``."""
    num = w.power_moment((n - 1) * q + 1.0, q)
    den = w.power_moment(n * q + 1.0, 0.0)
    return float(n**q * num / den)


def default_lp_corpus(w: RadialWeight, q: float, nmax: int = 200, seed: int = 0, n_random: int = 10,
                      report: DoublingReport | None = None) -> list[AnalyticFn]:
    ns = sorted(set(np.unique(np.geomspace(1, nmax, 12).astype(int)).tolist()))
    corpus = [AnalyticFn.monomial(n) for n in ns]
    rng = np.random.default_rng(seed)
    for _ in range(n_random):
        k = int(rng.integers(1, 4))
        a = np.sqrt(rng.uniform(0, 0.9, k)) * np.exp(2j * np.pi * rng.uniform(size=k))
        c = rng.normal(size=k) + 1j * rng.normal(size=k)
        corpus.append(AnalyticFn.atom_sum(c, a, 3.0).with_label("random atoms"))
    return corpus


def lp_equivalence_check(w: RadialWeight, q: float, m: int = 1, corpus: Sequence[AnalyticFn] | None = None, *,
                         nmax: int = 200, grid: SupGrid | None = None, tol: float = 1e-6) -> LPReport:
    """Bands of ``lp_norm / tent norm`` over a corpus and of the monomial moment ratio over ``n <= nmax``.

    Verified iff both bands are finite and the moment band over ``n <= nmax``
    changes by less than 20% relative to the band over ``n <= nmax/2``.
    The weight is not required to be doubling: that is what the check probes.
    """
    grid = SupGrid() if grid is None else grid
    if corpus is None:
        corpus = default_lp_corpus(w, q, nmax)
    omega = DiskMeasure.weighted_area(w)
    vals, labels = [], []
    for f in corpus:
        try:
            num = lp_norm(f, w, q, m, grid, tol)
            den = tent_infty_norm(f, omega, q, grid, tol)
            vals.append(num / den if den > 0 else math.inf)
        except DivergentIntegralError:
            vals.append(math.inf)
        labels.append(f.label)
    fband = _band(vals, np.zeros(len(vals)), f"lp_norm/tent_norm m={m} q={q}", {"J": grid.levels})
    for row, lab in zip(fband.trace, labels):
        row["function"] = lab
    ns = np.arange(1, nmax + 1)
    ratios = np.array([monomial_moment_ratio(w, q, int(n)) for n in ns])
    mband = _band(ratios, ns, "monomial moment ratio", {"nmax": nmax})
    for row, n in zip(mband.trace, ns):
        row["n"] = int(n)
    half = ratios[: max(1, nmax // 2)]
    mhalf = _band(half, ns[: half.size], "monomial moment ratio (half range)", {"nmax": nmax // 2})
    stable = mhalf.stable_against(mband)
    verified = fband.finite and mband.finite and stable
    return LPReport(verified, fband, mband, ratios.tolist(),
                    {"moment_band_half": [mhalf.lo, mhalf.hi], "moment_stable": stable, "m": m, "q": q})


def lp0_check(f: AnalyticFn, w: RadialWeight, q: float, m: int = 1, grid: SupGrid | None = None,
              tol: float = 1e-6) -> dict:
    """Vanishing test of ``|f^(m)|^q (1-|z|)^{mq} omega dA`` against that of ``|f|^q omega dA``."""
    from .measures import function_measure

    grid = SupGrid() if grid is None else grid
    omega = DiskMeasure.weighted_area(w)
    a = vanishing_carleson_test(function_measure(DampedDerivative(f, m), omega, q), grid, tol)
    b = vanishing_carleson_test(function_measure(f, omega, q), grid, tol)
    if Verdict.INCONCLUSIVE in (a.verdict, b.verdict):
        verdict = Verdict.INCONCLUSIVE
    else:
        verdict = Verdict.CONSISTENT if a.verdict == b.verdict else Verdict.INCONSISTENT
    return {"verdict": verdict, "derivative": a, "function": b}


# -- Volterra operators --------------------------------------------------------------------


def mu_g(g: AnalyticFn, w: RadialWeight, q: float) -> DiskMeasure:
    """``|g'(z)|^q (1-|z|)^(q-1) omega_hat(z) dA(z)``."""
    def radial_part(x):
        x = np.asarray(x, dtype=float)
        return (1.0 - x) ** (q - 1.0) * np.asarray(w.tail(x), dtype=float)

    def fn(z):
        z = np.asarray(z, dtype=complex)
        return np.abs(g.eval(z, 1)) ** q * radial_part(np.abs(z))

    gp = DampedDerivative(g, 1).derivative_modulus()
    radial = None if gp is None else (lambda x: np.asarray(gp(x)) ** q * radial_part(x))
    return DiskMeasure.density(fn, radial=radial, peaks=g.peaks(), label=f"mu_g[{g.label}]")


def _volterra_quantity(g: AnalyticFn, w: RadialWeight, p: float, q: float):
    e = 1.0 / q - 1.0 / p

    def h(z: complex) -> float:
        x = abs(z)
        return abs(g.eval(z, 1)) * (1.0 - x) * float(w.tail(x)) ** e

    return h


def volterra_certify(g: AnalyticFn, w: RadialWeight, p: float, q: float, grid: SupGrid | None = None, *,
                     r: float = R_DEFAULT, report: DoublingReport | None = None,
                     cross_check: bool = True) -> CertReport:
    """Boundedness of ``J_g: AT^infty_p(omega) -> AT^infty_q(omega)``.

    ``p <= q``: grid supremum of ``|g'(z)| (1-|z|) omega_hat(z)^(1/q-1/p)``.
    ``p > q``: ``lp_norm(g - g(0), m=1)`` with exponent ``pq/(p-q)``.
    The verdict is cross-checked against :func:`embed_certify` for the
    measure :func:`mu_g`; disagreement gives ``inconclusive``.
    """
    _check_pq(p, q)
    rep = _weight_report(w, report)
    grid = SupGrid() if grid is None else grid
    gmeta = grid.to_dict()
    invariant = DampedDerivative(g, 1).radial_modulus() is not None
    if p <= q:
        pts, vals, maxima = _per_level(_volterra_quantity(g, w, p, q), grid, invariant)
        verdict = growth_verdict(maxima)
        k = int(np.argmax(vals))
        est = float(vals[k])
        cond = "sup |g'(z)| (1-|z|) omega_hat(z)^(1/q-1/p) < infinity (p <= q)"
        ref = "Volterra characterisation, p <= q"
        details: dict[str, Any] = {"argmax": complex(pts[k])}
    else:
        expo = p * q / (p - q)
        g0 = g - complex(g.eval(0.0))
        h = DampedDerivative(g0, 1)
        res = carleson_norm(_fn_measure(h, w, expo), grid)
        maxima = res.levels ** (1.0 / expo)
        est = res.value ** (1.0 / expo) if math.isfinite(res.value) else math.inf
        verdict = Verdict.UNBOUNDED if not math.isfinite(est) else growth_verdict(maxima)
        cond = f"g in AT^infty_{expo:g}(omega) (p > q)"
        ref = "Volterra characterisation, p > q"
        details = {"exponent": expo, "argmax": res.argmax}
    if cross_check:
        emb = embed_certify(w, p, q, mu_g(g, w, q), r, grid, report=rep)
        details["mu_g_verdict"] = emb.verdict.value
        details["mu_g_trend"] = emb.trend
        if emb.verdict != verdict:
            details["direct_verdict"] = verdict.value
            verdict = Verdict.INCONCLUSIVE
    return CertReport(verdict, est, cond, ref, r, None, gmeta, list(np.asarray(maxima).tolist()), details=details)


def _fn_measure(h, w: RadialWeight, expo: float) -> DiskMeasure:
    from .measures import function_measure

    return function_measure(h, DiskMeasure.weighted_area(w), expo)


def volterra_compact_certify(g: AnalyticFn, w: RadialWeight, p: float, q: float, grid: SupGrid | None = None, *,
                             report: DoublingReport | None = None) -> CertReport:
    """Compactness surrogate for ``J_g``: the clause quantity tends to 0 (``p <= q``) or ``g`` in ``AT^0``."""
    _check_pq(p, q)
    _weight_report(w, report)
    grid = SupGrid() if grid is None else grid
    gmeta = grid.to_dict()
    invariant = DampedDerivative(g, 1).radial_modulus() is not None
    if p <= q:
        pts, vals, maxima = _per_level(_volterra_quantity(g, w, p, q), grid, invariant)
        v = decay_verdict(maxima)
        est = float(vals.max())
        cond = "|g'(z)| (1-|z|) omega_hat(z)^(1/q-1/p) -> 0 as |z| -> 1 (p <= q)"
        ref = "compact Volterra operator, p <= q"
        trend = maxima
    else:
        expo = p * q / (p - q)
        t = vanishing_carleson_test(_fn_measure(DampedDerivative(g, 1), w, expo), grid)
        v = t.verdict
        est = t.sup.value ** (1.0 / expo) if math.isfinite(t.sup.value) else math.inf
        cond = f"g in AT^0_{expo:g}(omega) (p > q)"
        ref = "compact Volterra operator, p > q"
        trend = t.levels
    verdict = {Verdict.VANISHING: Verdict.COMPACT, Verdict.NON_VANISHING: Verdict.NON_COMPACT}.get(
        v, Verdict.INCONCLUSIVE)
    return CertReport(verdict, est, cond, ref, None, None, gmeta, list(np.asarray(trend).tolist()))
