"""Positive measures on the disk, Carleson norms and tent-space norms.

A :class:`DiskMeasure` is a finite sum of density parts (each optionally
restricted to a disk ``|z| < rmax`` and an arc of arguments) plus point
masses.  Region integrals over Carleson squares, pseudohyperbolic disks and
Koranyi regions are computed part by part; rotation-invariant parts reduce
to one-dimensional radial integrals.

All suprema over ``a`` in the disk are taken over a :class:`SupGrid`: the
origin plus ``angles_per_level`` points on each circle ``1 - |a| = 2**-j``.
The T-infinity norm is computed in its Carleson form
``sup_a (int_{S(a)} |f|^q dmu / (1 - |a|))^(1/q)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Any, Callable, Mapping, Sequence

import numpy as np
from scipy.spatial import cKDTree

from ._parallel import pmap
from ._trend import Verdict, decay_verdict
from .diskgeom import EuclideanDisk, Lattice, koranyi_contains, koranyi_halfwidth
from .errors import DivergentIntegralError, DomainError
from .quad import integrate_euclidean_disk, integrate_polar, integrate_radial
from .weights import RadialWeight

TOL = 1e-6
MAX_PEAKS = 24


@dataclass(frozen=True)
class CarlesonSquare:
    a: complex


@dataclass(frozen=True)
class KoranyiRegion:
    xi: complex


@dataclass(frozen=True, eq=False)
class DensityPart:
    """A density w.r.t. area measure, optionally restricted to ``|z| < rmax`` and ``arc``.

    ``radial`` is the same density as a function of ``|z|`` when it is
    rotation invariant; it enables one-dimensional quadrature.
    """

    fn: Callable[[np.ndarray], np.ndarray]
    radial: Callable[[np.ndarray], np.ndarray] | None = None
    rmax: float = 1.0
    arc: tuple[float, float] | None = None
    peaks: tuple[complex, ...] = ()
    weight: float = 1.0

    @property
    def rotation_invariant(self) -> bool:
        return self.radial is not None and self.arc is None

    def unit(self, z):
        """The restricted density without the constant factor ``weight``."""
        z = np.asarray(z, dtype=complex)
        out = np.asarray(self.fn(z), dtype=float)
        mask = np.ones(z.shape, dtype=bool)
        if self.rmax < 1.0:
            mask &= np.abs(z) < self.rmax
        if self.arc is not None:
            mask &= _in_arc(np.angle(z), self.arc)
        return np.where(mask, out, 0.0)

    def __call__(self, z):
        return self.weight * self.unit(z)

    def scaled(self, c: float) -> "DensityPart":
        # the factor is applied after integration so scaling is exact
        return replace(self, weight=self.weight * c)


def _in_arc(t, arc):
    t0, t1 = arc
    return np.mod(np.asarray(t) - t0, 2.0 * np.pi) <= (t1 - t0)


def _arc_overlap(a0: float, a1: float, arc: tuple[float, float] | None) -> list[tuple[float, float]]:
    """Pieces of ``[a0, a1]`` that lie in ``arc`` (both of length at most 2 pi)."""
    if arc is None:
        return [(a0, a1)]
    out = []
    for shift in (-4.0 * np.pi, -2.0 * np.pi, 0.0, 2.0 * np.pi, 4.0 * np.pi):
        lo, hi = max(a0, arc[0] + shift), min(a1, arc[1] + shift)
        if hi > lo:
            out.append((lo, hi))
    return out


@dataclass(frozen=True, eq=False)
class DiskMeasure:
    """A positive measure on the disk: density parts plus point masses."""

    parts: tuple[DensityPart, ...] = ()
    atom_points: np.ndarray = field(default_factory=lambda: np.empty(0, dtype=complex))
    atom_masses: np.ndarray = field(default_factory=lambda: np.empty(0))
    label: str = "measure"
    spec: Mapping[str, Any] | None = None
    _tree: Any = field(init=False, repr=False, default=None)

    def __post_init__(self):
        pts = np.asarray(self.atom_points, dtype=complex).ravel()
        ms = np.asarray(self.atom_masses, dtype=float).ravel()
        if pts.shape != ms.shape:
            raise DomainError("atom points and masses must have the same length")
        if np.any(ms < 0) or np.any(np.abs(pts) >= 1.0):
            raise DomainError("atoms must have nonnegative mass and lie in the open disk")
        keep = ms > 0
        pts, ms = pts[keep], ms[keep]
        object.__setattr__(self, "atom_points", pts)
        object.__setattr__(self, "atom_masses", ms)
        if pts.size:
            object.__setattr__(self, "_tree", cKDTree(np.column_stack([pts.real, pts.imag])))

    # -- constructors ---------------------------------------------------------

    @classmethod
    def zero(cls) -> "DiskMeasure":
        return cls(label="0", spec={"kind": "atoms", "points": [], "masses": []})

    @classmethod
    def area(cls, rmax: float = 1.0, arc: tuple[float, float] | None = None) -> "DiskMeasure":
        """Area measure ``dA`` (the disk has mass ``pi``), optionally restricted."""
        part = DensityPart(lambda z: np.ones(np.shape(z)), lambda r: np.ones(np.shape(r)), rmax, arc)
        return cls((part,), label="dA")

    @classmethod
    def weighted_area(cls, w: RadialWeight, extra_power: float = 0.0, rmax: float = 1.0,
                      arc: tuple[float, float] | None = None) -> "DiskMeasure":
        """``omega(z) (1 - |z|)**extra_power dA(z)``."""
        p = float(extra_power)

        def radial(r):
            r = np.asarray(r, dtype=float)
            return np.asarray(w(r), dtype=float) * (1.0 - r) ** p

        part = DensityPart(lambda z: radial(np.abs(z)), radial, rmax, arc)
        spec = {"kind": "weighted_area", "weight": w.to_dict(), "extra_power": p}
        if rmax < 1.0:
            spec["rmax"] = rmax
        if arc is not None:
            spec["arc"] = list(arc)
        return cls((part,), label=f"{w.label}*(1-|z|)^{p:g} dA", spec=spec)

    @classmethod
    def atoms(cls, points, masses) -> "DiskMeasure":
        pts = np.asarray(points, dtype=complex).ravel()
        ms = np.asarray(masses, dtype=float).ravel()
        spec = {"kind": "atoms", "points": [[float(p.real), float(p.imag)] for p in pts], "masses": ms.tolist()}
        return cls(atom_points=pts, atom_masses=ms, label=f"{pts.size} atoms", spec=spec)

    @classmethod
    def density(cls, fn: Callable[[np.ndarray], np.ndarray], radial: Callable | None = None,
                peaks: Sequence[complex] = (), label: str = "density") -> "DiskMeasure":
        return cls((DensityPart(fn, radial, peaks=tuple(peaks)),), label=label)

    @classmethod
    def lattice_masses(cls, lattice: Lattice, w: RadialWeight | None = None) -> "DiskMeasure":
        """``sum_k (1-|a_k|) omega_hat(a_k) delta_{a_k}`` (``omega_hat = 1`` when ``w`` is None)."""
        pts = lattice.points
        m = 1.0 - np.abs(pts)
        if w is not None:
            m = m * np.asarray(w.tail(np.abs(pts)))
        out = cls.atoms(pts, m)
        return replace(out, label="lattice point masses", spec=None)

    @classmethod
    def from_spec(cls, spec: Mapping[str, Any]) -> "DiskMeasure":
        """Build a measure from its JSON form (``density``, ``atoms`` or ``weighted_area``)."""
        kind = spec.get("kind")
        if kind == "weighted_area":
            arc = tuple(spec["arc"]) if spec.get("arc") else None
            return cls.weighted_area(RadialWeight.from_spec(spec["weight"]), float(spec.get("extra_power", 0.0)),
                                     float(spec.get("rmax", 1.0)), arc)
        if kind == "atoms":
            pts = [complex(x, y) for x, y in spec.get("points", [])]
            return cls.atoms(pts, spec.get("masses", []))
        if kind == "density":
            fn = compile_density(spec["expr"])
            out = cls.density(fn, label=spec["expr"])
            return replace(out, spec=dict(spec))
        raise DomainError(f"unknown measure kind {kind!r}")

    def to_dict(self) -> dict:
        if self.spec is not None:
            return dict(self.spec)
        return {"kind": "composite", "label": self.label, "parts": len(self.parts), "atoms": int(self.atom_points.size)}

    # -- algebra ----------------------------------------------------------------

    def __add__(self, other: "DiskMeasure") -> "DiskMeasure":
        return DiskMeasure(self.parts + other.parts, np.concatenate([self.atom_points, other.atom_points]),
                           np.concatenate([self.atom_masses, other.atom_masses]), f"({self.label})+({other.label})")

    def scaled(self, c: float) -> "DiskMeasure":
        if c < 0:
            raise DomainError("measures can only be scaled by nonnegative numbers")
        spec = None
        return DiskMeasure(tuple(p.scaled(c) for p in self.parts), self.atom_points, c * self.atom_masses,
                           f"{c:g}*({self.label})", spec)

    def __rmul__(self, c: float) -> "DiskMeasure":
        return self.scaled(float(c))

    def with_density_factor(self, g: Callable[[np.ndarray], np.ndarray], radial: Callable | None = None,
                            peaks: Sequence[complex] = (), label: str = "g") -> "DiskMeasure":
        """``g dmu`` for a nonnegative function ``g`` (``radial`` gives ``g`` as a function of ``|z|``)."""
        parts = []
        for p in self.parts:
            fn, rad = p.fn, p.radial
            new_rad = None
            if rad is not None and radial is not None:
                new_rad = (lambda r, rad=rad: rad(r) * radial(r))
            parts.append(replace(p, fn=(lambda z, fn=fn: fn(z) * g(z)), radial=new_rad,
                                 peaks=tuple(p.peaks) + tuple(peaks)))
        masses = self.atom_masses * (np.asarray(g(self.atom_points), dtype=float) if self.atom_points.size else 1.0)
        return DiskMeasure(tuple(parts), self.atom_points, masses, f"{label}*({self.label})")

    def restricted(self, rmax: float) -> "DiskMeasure":
        parts = tuple(replace(p, rmax=min(p.rmax, rmax)) for p in self.parts)
        keep = np.abs(self.atom_points) < rmax
        return DiskMeasure(parts, self.atom_points[keep], self.atom_masses[keep], f"({self.label})|{{|z|<{rmax:g}}}")

    @property
    def rotation_invariant(self) -> bool:
        return self.atom_points.size == 0 and all(p.rotation_invariant for p in self.parts)

    @property
    def is_zero(self) -> bool:
        return not self.parts and self.atom_points.size == 0

    def density_at(self, z):
        z = np.asarray(z, dtype=complex)
        out = np.zeros(z.shape)
        for p in self.parts:
            out = out + p(z)
        return out

    # -- region integrals -------------------------------------------------------

    def atoms_in(self, region) -> float:
        if self.atom_points.size == 0:
            return 0.0
        pts = self.atom_points
        if isinstance(region, CarlesonSquare):
            from .diskgeom import carleson_square_contains
            mask = carleson_square_contains(region.a, pts)
        elif isinstance(region, EuclideanDisk):
            idx = self._tree.query_ball_point([region.center.real, region.center.imag], region.radius)
            idx = np.asarray(idx, dtype=int)
            if idx.size == 0:
                return 0.0
            sel = np.abs(pts[idx] - region.center) < region.radius
            return float(self.atom_masses[idx][sel].sum())
        elif isinstance(region, KoranyiRegion):
            mask = koranyi_contains(region.xi, pts)
        else:
            mask = np.asarray(region(pts), dtype=bool)
        return float(self.atom_masses[np.asarray(mask, dtype=bool)].sum())


def compile_density(expr: str) -> Callable[[np.ndarray], np.ndarray]:
    """Turn an expression in ``z`` (complex) and ``r = |z|`` into a vectorised density.

    Only numpy functions are in scope, e.g. ``"(1 - r)**0.5"`` or ``"abs(1 - z)**-1"``.
    """
    names = {k: getattr(np, k) for k in ("abs", "exp", "log", "sqrt", "cos", "sin", "real", "imag", "pi", "angle",
                                          "log1p", "expm1", "minimum", "maximum", "where")}
    code = compile(expr, "<density>", "eval")
    for name in code.co_names:
        if name not in names and name not in ("z", "r"):
            raise DomainError(f"name {name!r} is not allowed in a density expression")

    def fn(z):
        z = np.asarray(z, dtype=complex)
        val = eval(code, {"__builtins__": {}}, dict(names, z=z, r=np.abs(z)))
        return np.real(np.broadcast_to(val, z.shape)).astype(float)

    return fn


def _part_square(p: DensityPart, a: complex, tol: float) -> float:
    ra = abs(a)
    rho1 = p.rmax
    if ra >= rho1:
        return 0.0
    if ra == 0.0:
        arcs = [(-np.pi, np.pi)] if p.arc is None else [p.arc]
    else:
        th = math.atan2(a.imag, a.real)
        h = 0.5 * (1.0 - ra)
        arcs = _arc_overlap(th - h, th + h, p.arc)
    if not arcs:
        return 0.0
    if p.radial is not None:
        length = sum(hi - lo for lo, hi in arcs)
        return p.weight * length * integrate_radial(p.radial, ra, rho1)
    total = 0.0
    for lo, hi in arcs:
        total += integrate_polar(p.fn, ra, rho1, lo, hi, peaks=p.peaks, tol=tol).value
    return p.weight * total


def region_integral(nu: DiskMeasure, region, tol: float = TOL) -> float:
    """``nu(region)`` for a :class:`CarlesonSquare`, :class:`EuclideanDisk`, :class:`KoranyiRegion`
    or an indicator function ``z -> bool``.

    Density parts are integrated by adaptive quadrature restricted to the
    region and atoms are summed by membership.  An ``EuclideanDisk`` region
    integrates a restricted part by masking, which is exact only when the disk
    does not cross the restriction boundary.
    """
    total = nu.atoms_in(region)
    for p in nu.parts:
        if isinstance(region, CarlesonSquare):
            total += _part_square(p, complex(region.a), tol)
        elif isinstance(region, EuclideanDisk):
            if p.radial is not None and p.arc is None and abs(region.center) == 0.0:
                total += p.weight * 2.0 * np.pi * integrate_radial(p.radial, 0.0, min(region.radius, p.rmax))
            else:
                total += p.weight * integrate_euclidean_disk(p.unit, region.center, region.radius,
                                                             tol=min(tol, 1e-8))
        elif isinstance(region, KoranyiRegion):
            total += p.weight * koranyi_integral(p.unit, complex(region.xi), tol, peaks=p.peaks)
        elif callable(region):
            f = (lambda z, p=p: p.unit(z) * np.asarray(region(z), dtype=float))
            total += p.weight * integrate_polar(f, 0.0, p.rmax, peaks=p.peaks, tol=tol).value
        else:
            raise DomainError("unsupported region type")
    return float(total)


def koranyi_integral(p: Callable, xi: complex, tol: float = TOL, extra: Callable | None = None,
                     peaks: Sequence[complex] = ()) -> float:
    """``int_{Gamma(xi)} p(z) [extra(z)] dA(z)`` with the Koranyi region cut out exactly in polar form."""
    phi = math.atan2(xi.imag, xi.real)

    def f(z):
        v = p(z)
        return v if extra is None else v * extra(z)

    peaks = tuple(peaks)
    return integrate_polar(f, 0.0, 1.0, halfwidth=koranyi_halfwidth, center=phi, peaks=peaks, tol=tol).value


# -- sup grids ------------------------------------------------------------------


@dataclass(frozen=True)
class SupGrid:
    """The origin plus ``angles_per_level`` equally spaced points on ``1 - |a| = 2**-j``, ``j = 1..levels``."""

    levels: int = 10
    angles_per_level: int = 8
    extra_angles: tuple[float, ...] = ()

    def angles(self) -> np.ndarray:
        base = 2.0 * np.pi * np.arange(self.angles_per_level) / self.angles_per_level
        return np.unique(np.concatenate([base, np.mod(np.asarray(self.extra_angles, dtype=float), 2 * np.pi)]))

    def level_points(self, j: int) -> np.ndarray:
        if j == 0:
            return np.array([0j])
        return (1.0 - 2.0**-j) * np.exp(1j * self.angles())

    @property
    def points(self) -> np.ndarray:
        return np.concatenate([self.level_points(j) for j in range(self.levels + 1)])

    def level_of(self) -> np.ndarray:
        return np.concatenate([np.full(self.level_points(j).size, j) for j in range(self.levels + 1)])

    def refine(self) -> "SupGrid":
        """One refinement step: one more dyadic level and twice the angles."""
        return SupGrid(self.levels + 1, 2 * self.angles_per_level, self.extra_angles)

    def to_dict(self) -> dict:
        return {"J": self.levels, "angles": self.angles_per_level, "extra_angles": list(self.extra_angles)}


@dataclass
class SupResult:
    """A grid supremum with its maximiser and per-level maxima."""

    value: float
    argmax: complex
    levels: np.ndarray
    points: np.ndarray
    values: np.ndarray

    def __float__(self) -> float:
        return float(self.value)

    def to_dict(self) -> dict:
        return {"value": self.value, "argmax": self.argmax, "levels": self.levels.tolist()}


def sup_over_grid(func: Callable[[complex], float], grid: SupGrid, invariant: bool = False) -> SupResult:
    """Evaluate ``func`` on the grid (once per level if ``invariant`` under rotation) and reduce."""
    levels = [grid.level_points(j) for j in range(grid.levels + 1)]
    pts = np.concatenate(levels)
    lev = np.concatenate([np.full(p.size, j) for j, p in enumerate(levels)])
    if invariant:
        per = pmap(lambda p: func(complex(p[0])), levels)
        vals = np.concatenate([np.full(p.size, v, dtype=float) for p, v in zip(levels, per)])
    else:
        vals = np.asarray(pmap(lambda a: func(complex(a)), pts), dtype=float)
    per_level = np.array([vals[lev == j].max() for j in range(grid.levels + 1)])
    k = int(np.argmax(vals))
    return SupResult(float(vals[k]), complex(pts[k]), per_level, pts, vals)


def _square_ratio(nu: DiskMeasure, tol: float) -> Callable[[complex], float]:
    def ratio(a: complex) -> float:
        try:
            mass = region_integral(nu, CarlesonSquare(a), tol)
        except DivergentIntegralError:
            return math.inf
        return mass / (1.0 - abs(a))

    return ratio


def carleson_norm(nu: DiskMeasure, grid: SupGrid | None = None, tol: float = TOL) -> SupResult:
    """``max_a nu(S(a)) / (1 - |a|)`` over the grid, with the maximiser (``inf`` if a square diverges)."""
    grid = SupGrid() if grid is None else grid
    return sup_over_grid(_square_ratio(nu, tol), grid, nu.rotation_invariant)


def kernel_carleson_norm(nu: DiskMeasure, s: float = 1.0, grid: SupGrid | None = None, tol: float = TOL) -> SupResult:
    """``max_a int (1-|a|)^s / |1 - conj(a) z|^(s+1) dnu(z)`` over the grid."""
    if s <= 0:
        raise DomainError("kernel_carleson_norm needs s > 0")
    grid = SupGrid() if grid is None else grid

    def value(a: complex) -> float:
        ca = np.conj(a)
        scale = (1.0 - abs(a)) ** s

        def kern(z):
            return scale / np.abs(1.0 - ca * z) ** (s + 1.0)

        total = float((nu.atom_masses * kern(nu.atom_points)).sum()) if nu.atom_points.size else 0.0
        for p in nu.parts:
            f = (lambda z, p=p: p.unit(z) * kern(z))
            peaks = tuple(p.peaks) + ((a,) if a != 0 else ())
            try:
                if p.arc is None and p.rmax >= 1.0:
                    total += p.weight * integrate_polar(f, 0.0, 1.0, peaks=peaks, tol=tol).value
                else:
                    lo, hi = p.arc if p.arc is not None else (-np.pi, np.pi)
                    total += p.weight * integrate_polar(f, 0.0, p.rmax, lo, hi, peaks=peaks, tol=tol).value
            except DivergentIntegralError:
                return math.inf
        return total

    return sup_over_grid(value, grid, nu.rotation_invariant)


@dataclass
class TrendResult:
    verdict: Verdict
    levels: np.ndarray
    sup: SupResult

    def to_dict(self) -> dict:
        return {"verdict": self.verdict.value, "trend": self.levels.tolist(), "argmax": self.sup.argmax}


def vanishing_carleson_test(nu: DiskMeasure, grid: SupGrid | None = None, tol: float = TOL) -> TrendResult:
    """Three-level trend rule applied to ``m_j = max_{level j} nu(S(a)) / (1 - |a|)``."""
    res = carleson_norm(nu, grid, tol)
    return TrendResult(decay_verdict(res.levels), res.levels, res)


# -- tent norms -----------------------------------------------------------------


def _modulus_power(f, q: float):
    """``|f|^q`` as a vectorised function plus radial form and peaks when available."""
    if np.isscalar(f):
        c = abs(complex(f)) ** q
        return (lambda z: np.full(np.shape(z), c)), (lambda r: np.full(np.shape(r), c)), ()
    radial = None
    rad_mod = getattr(f, "radial_modulus", None)
    if callable(rad_mod):
        rm = rad_mod()
        if rm is not None:
            radial = (lambda r: np.abs(rm(r)) ** q)
    peaks = tuple(f.peaks(MAX_PEAKS)) if hasattr(f, "peaks") else ()
    return (lambda z: np.abs(f(z)) ** q), radial, peaks


def function_measure(f, mu: DiskMeasure, q: float) -> DiskMeasure:
    """``|f|^q dmu``."""
    g, radial, peaks = _modulus_power(f, q)
    return mu.with_density_factor(g, radial, peaks)


def tent_infty_norm(f, mu: DiskMeasure, q: float, grid: SupGrid | None = None, tol: float = TOL) -> float:
    """``carleson_norm(|f|^q dmu)^(1/q)``, the canonical T-infinity norm."""
    return tent_infty(f, mu, q, grid, tol).value ** (1.0 / q)


def tent_infty(f, mu: DiskMeasure, q: float, grid: SupGrid | None = None, tol: float = TOL) -> SupResult:
    """Like :func:`tent_infty_norm` but returns the full sup record of ``|f|^q dmu`` square ratios."""
    if q <= 0:
        raise DomainError("q must be positive")
    return carleson_norm(function_measure(f, mu, q), grid, tol)


def tent_pq_norm(f, mu: DiskMeasure, p: float, q: float, n_xi: int = 256, tol: float = TOL) -> float:
    """``(int_T (int_{Gamma(xi)} |f|^q dmu / (1-|z|))^(p/q) |dxi|)^(1/p)``, ``xi`` on a uniform grid."""
    if p <= 0 or q <= 0:
        raise DomainError("p and q must be positive")
    nu = function_measure(f, mu, q)
    xis = np.exp(2j * np.pi * np.arange(n_xi) / n_xi)

    def inv_dist(z):
        return 1.0 / (1.0 - np.abs(z))

    def aperture(xi: complex) -> float:
        total = 0.0
        if nu.atom_points.size:
            inside = koranyi_contains(xi, nu.atom_points)
            total += float((nu.atom_masses[inside] * inv_dist(nu.atom_points[inside])).sum())
        for part in nu.parts:
            total += part.weight * koranyi_integral(part.unit, xi, tol, extra=inv_dist, peaks=part.peaks)
        return total

    if nu.rotation_invariant:
        vals = np.full(n_xi, aperture(1.0 + 0j))
    else:
        vals = np.array([aperture(complex(x)) for x in xis])
    return float((2.0 * np.pi / n_xi * np.sum(vals ** (p / q))) ** (1.0 / p))


def sequence_measure(lattice: Lattice, c, q: float) -> DiskMeasure:
    """``nu_c = sum_k |c_k|^q (1 - |a_k|) delta_{a_k}``."""
    c = np.asarray(c)
    if c.shape != (len(lattice),):
        raise DomainError(f"coefficient length {c.size} does not match the lattice size {len(lattice)}")
    pts = lattice.points
    return DiskMeasure.atoms(pts, np.abs(c) ** q * (1.0 - np.abs(pts)))


def seq_tent_norm(lattice: Lattice, c, q: float, grid: SupGrid | None = None) -> float:
    """Sequence tent norm ``carleson_norm(nu_c)^(1/q)``."""
    return carleson_norm(sequence_measure(lattice, c, q), grid).value ** (1.0 / q)


def seq_tent_vanishing(lattice: Lattice, c, q: float, grid: SupGrid | None = None) -> TrendResult:
    """Trend rule for membership of ``c`` in the vanishing sequence tent space."""
    return vanishing_carleson_test(sequence_measure(lattice, c, q), grid)


def hat_equivalence_ratio(f, w: RadialWeight, p: float, alpha: float, tol: float = 1e-7) -> float:
    """``int |f|^p (1-|z|)^alpha omega dA / int |f|^p (1-|z|)^(alpha-1) omega_hat dA``.

    Bounded above and below for doubling weights; used as a desk-scale check
    that the weight may be traded for its tail.
    """
    g, _, peaks = _modulus_power(f, p)

    def num(z):
        m = np.abs(z)
        return g(z) * (1.0 - m) ** alpha * w(m)

    def den(z):
        m = np.abs(z)
        return g(z) * (1.0 - m) ** (alpha - 1.0) * np.asarray(w.tail(m))

    return integrate_polar(num, tol=tol, peaks=peaks).value / integrate_polar(den, tol=tol, peaks=peaks).value
