"""Pseudohyperbolic geometry of the unit disk and r-lattices.

The pseudohyperbolic distance is ``d(z, u) = |z - u| / |1 - z conj(u)|``.  Its
balls ``Delta(z, r)`` are Euclidean disks, which is what makes region
integrals and neighbour searches cheap: a point ``u`` lies in
``Delta(z, r)`` exactly when it lies in the Euclidean disk returned by
:func:`pseudo_disk`, so a k-d tree over Euclidean coordinates answers
pseudohyperbolic ball queries without approximation.

Lattices are built ring by ring: candidate rings are spaced evenly in
hyperbolic radius and each ring carries evenly spaced candidates, so an
accepted lattice keeps an exact rotational structure that the atomic
decomposition code exploits with FFTs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Mapping

import numpy as np
from scipy.spatial import cKDTree

from .errors import CoveringError, DomainError

SPACING = 1.25
VERIFY_POINTS = 100_000
_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def _check_inside(*zs) -> None:
    for z in zs:
        if np.any(np.abs(z) >= 1.0):
            raise DomainError("points must lie in the open unit disk")


def pseudo_dist(z, u):
    """``|z - u| / |1 - z conj(u)|`` (vectorised over numpy broadcasting)."""
    z = np.asarray(z, dtype=complex)
    u = np.asarray(u, dtype=complex)
    _check_inside(z, u)
    out = np.abs(z - u) / np.abs(1.0 - z * np.conj(u))
    return float(out) if out.ndim == 0 else out


def mobius(a, w):
    """The involution ``phi_a(w) = (a - w) / (1 - conj(a) w)``."""
    a = np.asarray(a, dtype=complex)
    w = np.asarray(w, dtype=complex)
    return (a - w) / (1.0 - np.conj(a) * w)


@dataclass(frozen=True)
class EuclideanDisk:
    center: complex
    radius: float

    def contains(self, u) -> np.ndarray:
        return np.abs(np.asarray(u, dtype=complex) - self.center) < self.radius

    def boundary(self, n: int) -> np.ndarray:
        t = 2.0 * np.pi * np.arange(n) / n
        return self.center + self.radius * np.exp(1j * t)

    @property
    def area(self) -> float:
        return math.pi * self.radius**2


def pseudo_disk_params(z, r):
    """Vectorised centre and radius of ``Delta(z, r)``."""
    z = np.asarray(z, dtype=complex)
    r = np.asarray(r, dtype=float)
    m = np.abs(z) ** 2
    den = 1.0 - r**2 * m
    return (1.0 - r**2) * z / den, r * (1.0 - m) / den


def pseudo_disk(z: complex, r: float) -> EuclideanDisk:
    """The Euclidean disk equal to ``Delta(z, r) = {u : d(z, u) < r}``."""
    _check_inside(z)
    if not 0.0 < r < 1.0:
        raise DomainError("pseudo_disk needs 0 < r < 1")
    c, rad = pseudo_disk_params(z, r)
    return EuclideanDisk(complex(c), float(rad))


def _angle_gap(t, theta):
    """``t - theta`` reduced to ``(-pi, pi]``."""
    d = np.mod(np.asarray(t) - np.asarray(theta) + np.pi, 2.0 * np.pi) - np.pi
    return np.where(d == -np.pi, np.pi, d)


def carleson_square_contains(a, z):
    """Membership of ``z`` in the Carleson square ``S(a)``.

    ``S(0)`` is the whole disk; otherwise, with ``a = r e^{i theta}``, the
    square is ``{rho e^{it} : rho >= r, |t - theta| <= (1 - r)/2}``.
    """
    a = np.asarray(a, dtype=complex)
    z = np.asarray(z, dtype=complex)
    ra = np.abs(a)
    inside = (np.abs(z) >= ra) & (np.abs(_angle_gap(np.angle(z), np.angle(a))) <= 0.5 * (1.0 - ra))
    out = np.where(ra == 0.0, True, inside)
    return bool(out) if out.ndim == 0 else out


def koranyi_contains(xi, z):
    """Membership of ``z`` in the Koranyi region ``|1 - conj(xi) z| < 1 - |z|^2``."""
    xi = np.asarray(xi, dtype=complex)
    if np.any(np.abs(np.abs(xi) - 1.0) > 1e-12):
        raise DomainError("xi must be unimodular")
    z = np.asarray(z, dtype=complex)
    out = np.abs(1.0 - np.conj(xi) * z) < 1.0 - np.abs(z) ** 2
    return bool(out) if out.ndim == 0 else out


def koranyi_halfwidth(rho):
    """Angular half-width of the Koranyi region on the circle ``|z| = rho`` (0 if empty)."""
    rho = np.asarray(rho, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        c = (1.0 + rho**2 - (1.0 - rho**2) ** 2) / (2.0 * rho)
    c = np.where(rho > 0, c, 1.0)
    return np.arccos(np.clip(c, -1.0, 1.0))


def tilde_point(z: complex) -> complex:
    """``(1 - 2(1 - |z|)) z / |z|``, defined for ``1/2 < |z| < 1``.

    For ``r < 1/4`` the pseudohyperbolic disk ``Delta(z, r)`` sits inside the
    Carleson square of this point.
    """
    z = complex(z)
    m = abs(z)
    if not 0.5 < m < 1.0:
        raise DomainError("tilde_point needs 1/2 < |z| < 1")
    return (1.0 - 2.0 * (1.0 - m)) * z / m


# -- lattices ------------------------------------------------------------------


@dataclass(frozen=True)
class Ring:
    """``count`` equally spaced lattice points ``rho e^{i(phase + 2 pi k / count)}``.

    ``inner`` and ``outer`` bound the annulus of the polar cells that belong
    to the ring's points.
    """

    rho: float
    count: int
    phase: float
    inner: float
    outer: float

    def points(self) -> np.ndarray:
        return self.rho * np.exp(1j * (self.phase + 2.0 * np.pi * np.arange(self.count) / self.count))


@dataclass(frozen=True, eq=False)
class Lattice:
    """A truncated r-lattice with covering diagnostics.

    ``cells`` assigns every verification sample to its pseudohyperbolically
    nearest lattice point (a sampled Voronoi partition).  ``rings`` records the
    polar structure and the polar cells used by the atomic decomposition; it
    is ``None`` for lattices loaded from a bare point list.
    """

    points: np.ndarray
    separation: float
    truncation: float
    multiplicity: int
    rings: tuple[Ring, ...] | None = None
    samples: np.ndarray = field(default_factory=lambda: np.empty(0, dtype=complex), repr=False)
    cells: np.ndarray = field(default_factory=lambda: np.empty(0, dtype=int), repr=False)
    covering_radius: float = math.nan
    min_separation: float = math.nan

    def __len__(self) -> int:
        return int(self.points.size)

    @property
    def r(self) -> float:
        return self.separation

    def to_dict(self, include_rings: bool = True) -> dict:
        out: dict[str, Any] = {
            "r": self.separation,
            "eps_trunc": self.truncation,
            "points": [[float(p.real), float(p.imag)] for p in self.points],
            "N": int(self.multiplicity),
        }
        if include_rings and self.rings is not None:
            out["rings"] = [[g.rho, g.count, g.phase, g.inner, g.outer] for g in self.rings]
        out["covering_radius"] = self.covering_radius
        out["min_separation"] = self.min_separation
        return out

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "Lattice":
        pts = np.array([complex(x, y) for x, y in data["points"]], dtype=complex)
        rings = None
        if data.get("rings"):
            rings = tuple(Ring(float(a), int(b), float(c), float(d), float(e)) for a, b, c, d, e in data["rings"])
        return cls(pts, float(data["r"]), float(data["eps_trunc"]), int(data["N"]), rings,
                   covering_radius=float(data.get("covering_radius", math.nan)),
                   min_separation=float(data.get("min_separation", math.nan)))

    def cell_areas(self, weight_exponent: float = 0.0) -> np.ndarray:
        """``int_{cell} (1 - |u|^2)^e dA(u)`` for each polar cell (ring lattices only)."""
        if self.rings is None:
            raise DomainError("polar cells are only available for ring-structured lattices")
        e1 = weight_exponent + 1.0
        out = []
        for g in self.rings:
            radial = ((1.0 - g.inner**2) ** e1 - (1.0 - g.outer**2) ** e1) / (2.0 * e1)
            out.append(np.full(g.count, radial * 2.0 * np.pi / g.count))
        return np.concatenate(out)


def _angular_count(rho: float, spacing: float) -> int:
    """Smallest count whose neighbours on the circle ``rho`` are at most ``spacing`` apart."""
    if rho == 0.0:
        return 1
    r2 = rho * rho
    c = (2.0 * r2 - spacing**2 * (1.0 + r2 * r2)) / (2.0 * r2 * (1.0 - spacing**2))
    if c <= -1.0:
        return 2
    return max(2, int(math.ceil(2.0 * math.pi / math.acos(min(c, 1.0)))))


def lattice_rings(r: float, eps_trunc: float, density: float = 1.0) -> list[Ring]:
    """Candidate rings: origin plus circles evenly spaced in hyperbolic radius up to ``1 - eps_trunc``."""
    h = SPACING * r
    beta_max = math.atanh(1.0 - eps_trunc)
    n = max(1, int(math.ceil(beta_max / math.atanh(h))))
    dbeta = beta_max / n
    rings = [Ring(0.0, 1, 0.0, 0.0, math.tanh(0.5 * dbeta))]
    spacing = h / density
    for k in range(1, n + 1):
        rho = math.tanh(k * dbeta)
        count = _angular_count(rho, spacing)
        phase = math.pi / count if k % 2 else 0.0
        rings.append(Ring(rho, count, phase, math.tanh((k - 0.5) * dbeta), math.tanh((k + 0.5) * dbeta)))
    return rings


def verification_grid(eps_trunc: float, n_target: int = VERIFY_POINTS) -> np.ndarray:
    """Roughly ``n_target`` samples of ``{1 - |z| >= eps_trunc}`` at uniform hyperbolic density.

    Rings are evenly spaced in hyperbolic radius; each ring's points carry a
    golden-ratio phase so the grid does not line up with any lattice.
    """
    rho_max = 1.0 - eps_trunc
    area = math.pi * (1.0 / (1.0 - rho_max**2) - 1.0)
    step = math.sqrt(area / n_target)
    beta_max = math.atanh(rho_max)
    n = max(2, int(math.ceil(beta_max / math.atanh(min(step, 0.5)))))
    rhos = np.tanh(np.linspace(0.0, beta_max, n + 1))
    pts = [np.array([0.0j])]
    for k, rho in enumerate(rhos[1:], start=1):
        count = max(3, int(math.ceil(2.0 * math.pi * rho / (1.0 - rho**2) / step)))
        phase = 2.0 * math.pi * ((k * _GOLDEN) % 1.0) / count
        pts.append(rho * np.exp(1j * (phase + 2.0 * np.pi * np.arange(count) / count)))
    return np.concatenate(pts)


def ball_counts(tree: cKDTree, centers, r: float) -> np.ndarray:
    """Number of tree points inside ``Delta(z, r)`` for every ``z`` in ``centers``."""
    c, rad = pseudo_disk_params(centers, r)
    xy = np.column_stack([c.real, c.imag])
    return np.asarray(tree.query_ball_point(xy, rad * (1.0 - 1e-12), return_length=True))


def ball_members(tree: cKDTree, centers, r: float) -> list[list[int]]:
    c, rad = pseudo_disk_params(centers, r)
    xy = np.column_stack([c.real, c.imag])
    return tree.query_ball_point(xy, rad)


def nearest_in_ball(tree: cKDTree, points: np.ndarray, samples: np.ndarray, r: float):
    """Pseudohyperbolically nearest lattice point for each sample (``-1``/``inf`` if none within ``r``)."""
    members = ball_members(tree, samples, r)
    lens = np.fromiter((len(m) for m in members), dtype=int, count=len(members))
    owner = np.full(samples.size, -1, dtype=int)
    best = np.full(samples.size, np.inf)
    if lens.sum() == 0:
        return owner, best
    flat = np.fromiter((i for m in members for i in m), dtype=int, count=int(lens.sum()))
    row = np.repeat(np.arange(samples.size), lens)
    d = np.abs(samples[row] - points[flat]) / np.abs(1.0 - samples[row] * np.conj(points[flat]))
    order = np.lexsort((d, row))
    row_s, flat_s, d_s = row[order], flat[order], d[order]
    first = np.ones(row_s.size, dtype=bool)
    first[1:] = row_s[1:] != row_s[:-1]
    owner[row_s[first]] = flat_s[first]
    best[row_s[first]] = d_s[first]
    return owner, best


def _greedy_accept(rings: list[Ring], r: float) -> tuple[list[Ring], np.ndarray, float]:
    """Greedy acceptance of ring candidates against everything accepted so far.

    A candidate is accepted iff its distance to all accepted points is at
    least ``r/2``.  Ring spacing is chosen so that this never rejects a
    candidate; a rejection would break the ring structure and is reported as
    an error instead of being hidden.
    """
    accepted: list[np.ndarray] = []
    tree = None
    min_sep = math.inf
    for g in rings:
        cand = g.points()
        if g.count > 1:
            ring_gap = float(pseudo_dist(cand[0], cand[1]))
            min_sep = min(min_sep, ring_gap)
            if ring_gap < 0.5 * r:
                raise CoveringError("ring candidates closer than r/2", complex(cand[1]))
        if tree is not None:
            prev = np.concatenate(accepted)
            owner, dist = nearest_in_ball(tree, prev, cand, min(0.999, 2.0 * r))
            if np.any(dist < 0.5 * r):
                bad = int(np.argmin(dist))
                raise CoveringError("candidate within r/2 of an accepted point", complex(cand[bad]))
            if np.any(owner >= 0):
                min_sep = min(min_sep, float(np.min(dist)))
        accepted.append(cand)
        allpts = np.concatenate(accepted)
        tree = cKDTree(np.column_stack([allpts.real, allpts.imag]))
    return rings, np.concatenate(accepted), min_sep


def build_lattice(r: float, eps_trunc: float = 2.0**-12, verify_points: int = VERIFY_POINTS) -> Lattice:
    """Greedy r-lattice of ``{1 - |z| >= eps_trunc}`` with covering and multiplicity checks.

    Covering is verified on :func:`verification_grid`; if a sample is
    uncovered the construction is repeated once with doubled angular density
    and a :class:`~tentlab.errors.CoveringError` is raised if that also fails.
    The multiplicity ``N`` is the largest number of disks ``Delta(a_k, 2r)``
    seen covering one verification sample.
    """
    if not 0.0 < r < 0.25:
        raise DomainError("build_lattice needs 0 < r < 1/4")
    if not 0.0 < eps_trunc < 0.5 + 1e-15:
        raise DomainError("build_lattice needs 0 < eps_trunc <= 1/2")
    samples = verification_grid(eps_trunc, verify_points)
    last_error = None
    for density in (1.0, 2.0):
        rings, pts, min_sep = _greedy_accept(lattice_rings(r, eps_trunc, density), r)
        tree = cKDTree(np.column_stack([pts.real, pts.imag]))
        owner, dist = nearest_in_ball(tree, pts, samples, r)
        if np.any(owner < 0):
            bad = int(np.flatnonzero(owner < 0)[0])
            last_error = CoveringError(f"sample not within {r} of the lattice", complex(samples[bad]))
            continue
        mult = int(np.max(ball_counts(tree, samples, min(0.999, 2.0 * r))))
        return Lattice(pts, r, eps_trunc, mult, tuple(rings), samples, owner, float(np.max(dist)), min_sep)
    assert last_error is not None
    raise last_error


def lattice_multiplicity(lattice: Lattice, samples: np.ndarray) -> int:
    """Overlap count of the disks ``Delta(a_k, 2r)`` on an arbitrary sample set."""
    pts = lattice.points
    tree = cKDTree(np.column_stack([pts.real, pts.imag]))
    return int(np.max(ball_counts(tree, samples, min(0.999, 2.0 * lattice.separation))))
