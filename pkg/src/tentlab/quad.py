"""Adaptive quadrature over the disk and checks of Forelli-Rudin type kernel bounds.

The workhorse is a vectorised, globally adaptive tensor Gauss-Kronrod
(7/15) cubature on rectangles in polar-like coordinates.  Disk regions that
reach the unit circle are split into dyadic radial panels in ``1 - rho``;
inside every panel the angular partition is graded geometrically around the
directions where the integrand concentrates (``peaks``), with a width
proportional to the distance to the circle.  What is left beyond the deepest
panel is extrapolated from the geometric decay of the last panel sums.

The ``*_check`` functions return a :class:`RatioBand`: the range of a ratio
that a kernel estimate claims to be bounded (one-sided) or bounded above and
below (two-sided) over a grid of points.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import DivergentIntegralError, NonConvergenceError, ParameterDomainError
from .weights import DoublingReport, RadialWeight, classify_doubling

DEPTH = 30
STABILITY = 0.2

_XK = np.array([0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                0.207784955007898467600689403773245, 0.0])
_WK = np.array([0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                0.204432940075298892414161999234649, 0.209482141084727828012999174891714])
_WG = np.array([0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                0.381830050505118944950369775488975, 0.417959183673469387755102040816327])

NODES = np.concatenate([-_XK[:-1], [0.0], _XK[:-1][::-1]])
W_KRONROD = np.concatenate([_WK[:-1], [_WK[-1]], _WK[:-1][::-1]])
W_GAUSS = np.zeros(15)
W_GAUSS[1::2] = np.concatenate([_WG[:-1], [_WG[-1]], _WG[:-1][::-1]])


@dataclass
class CubatureResult:
    value: float
    error: float
    evaluations: int
    by_panel: np.ndarray = field(default_factory=lambda: np.empty(0))


def adaptive_rectangles(g: Callable[[np.ndarray, np.ndarray], np.ndarray], x0, x1, y0, y1, *,
                        tol: float = 1e-6, atol: float = 0.0, max_cells: int = 400_000,
                        panel: np.ndarray | None = None) -> CubatureResult:
    """Globally adaptive tensor Gauss-Kronrod cubature of ``g`` over a union of rectangles.

    ``g(x, y)`` receives arrays of shape ``(cells, 15, 15)`` and must return
    integrand values (including any Jacobian).  ``panel`` optionally labels
    each initial cell; ``by_panel`` then holds the converged integral per label.
    Cells are bisected along the direction with the larger embedded error until
    the summed error estimate falls below ``max(tol*|I|, atol)``.
    """
    x0 = np.asarray(x0, dtype=float).ravel()
    x1 = np.asarray(x1, dtype=float).ravel()
    y0 = np.asarray(y0, dtype=float).ravel()
    y1 = np.asarray(y1, dtype=float).ravel()
    lab = np.zeros(x0.size, dtype=int) if panel is None else np.asarray(panel, dtype=int).ravel()

    def evaluate(a0, a1, b0, b1):
        hx = 0.5 * (a1 - a0)
        hy = 0.5 * (b1 - b0)
        xs = (a0 + hx)[:, None, None] + hx[:, None, None] * NODES[None, :, None]
        ys = (b0 + hy)[:, None, None] + hy[:, None, None] * NODES[None, None, :]
        xs, ys = np.broadcast_arrays(xs, ys)
        v = np.asarray(g(xs, ys), dtype=float)
        area = hx * hy
        kk = np.einsum("cij,i,j->c", v, W_KRONROD, W_KRONROD) * area
        gk = np.einsum("cij,i,j->c", v, W_GAUSS, W_KRONROD) * area
        kg = np.einsum("cij,i,j->c", v, W_KRONROD, W_GAUSS) * area
        return kk, np.abs(kk - gk), np.abs(kk - kg)

    val, ex, ey = evaluate(x0, x1, y0, y1)
    evals = 225 * x0.size
    while True:
        if not np.all(np.isfinite(val)):
            raise DivergentIntegralError("integrand is not finite on a quadrature node")
        err = ex + ey
        total = float(val.sum())
        est = float(err.sum())
        goal = max(tol * abs(total), atol)
        if est <= goal:
            break
        if val.size > max_cells:
            raise NonConvergenceError(f"cubature did not converge (error {est:.3g}, goal {goal:.3g})", total, est)
        order = np.argsort(err)[::-1]
        cum = np.cumsum(err[order])
        n_split = int(np.searchsorted(cum, est - 0.5 * goal)) + 1
        pick = order[: max(1, n_split)]
        keep = np.ones(val.size, dtype=bool)
        keep[pick] = False
        a0, a1, b0, b1, lp = x0[pick], x1[pick], y0[pick], y1[pick], lab[pick]
        along_x = ex[pick] >= ey[pick]
        mx = 0.5 * (a0 + a1)
        my = 0.5 * (b0 + b1)
        c_x0 = np.concatenate([a0, np.where(along_x, mx, a0)])
        c_x1 = np.concatenate([np.where(along_x, mx, a1), a1])
        c_y0 = np.concatenate([b0, np.where(along_x, b0, my)])
        c_y1 = np.concatenate([np.where(along_x, b1, my), b1])
        nv, nex, ney = evaluate(c_x0, c_x1, c_y0, c_y1)
        evals += 225 * c_x0.size
        x0 = np.concatenate([x0[keep], c_x0])
        x1 = np.concatenate([x1[keep], c_x1])
        y0 = np.concatenate([y0[keep], c_y0])
        y1 = np.concatenate([y1[keep], c_y1])
        lab = np.concatenate([lab[keep], lp, lp])
        val = np.concatenate([val[keep], nv])
        ex = np.concatenate([ex[keep], nex])
        ey = np.concatenate([ey[keep], ney])
    by_panel = np.bincount(lab, weights=val, minlength=int(lab.max()) + 1 if lab.size else 0)
    return CubatureResult(total, est, evals, by_panel)


def _angular_breaks(t0: float, t1: float, scale: float, peak_angles: Sequence[tuple[float, float]],
                    base: int = 4) -> np.ndarray:
    """Breakpoints on ``[t0, t1]``: ``base`` uniform panels plus geometric grading at peaks."""
    pts = list(np.linspace(t0, t1, base + 1))
    for phi, width in peak_angles:
        eps = scale + width
        for c in (phi - 2.0 * np.pi, phi, phi + 2.0 * np.pi):
            if c < t0 - np.pi or c > t1 + np.pi:
                continue
            step = eps
            while step < (t1 - t0):
                for b in (c - step, c + step):
                    if t0 < b < t1:
                        pts.append(b)
                step *= 4.0
            if t0 < c < t1:
                pts.append(c)
    return np.unique(np.asarray(pts))


def _peak_list(peaks) -> list[tuple[float, float]]:
    out = []
    for p in peaks or ():
        p = complex(p)
        if p != 0:
            out.append((math.atan2(p.imag, p.real), max(0.0, 1.0 - abs(p))))
    return out


def integrate_polar(f: Callable[[np.ndarray], np.ndarray], rho0: float = 0.0, rho1: float = 1.0,
                    t0: float = -np.pi, t1: float = np.pi, *, peaks=(), halfwidth: Callable | None = None,
                    center: float = 0.0, tol: float = 1e-6, depth: int = DEPTH,
                    max_cells: int = 400_000) -> CubatureResult:
    """``int f dA`` over ``{rho e^{it}: rho0 <= rho < rho1, t0 <= t <= t1}``.

    With ``halfwidth`` given, the angular range at radius ``rho`` is instead
    ``center +- halfwidth(rho)`` (used for Koranyi regions).  When
    ``rho1 == 1`` the radial range is cut into dyadic panels down to
    ``(1 - rho0) * 2**-depth`` and the remainder is extrapolated from the
    geometric decay of the last panel sums; growth there means the integral
    diverges.
    """
    peak_angles = _peak_list(peaks)
    to_boundary = rho1 >= 1.0
    d0 = 1.0 - rho0
    if to_boundary:
        d = d0 * 2.0 ** -np.arange(depth + 1)
        rb = 1.0 - d
    else:
        n = max(1, int(math.ceil(math.log2(max(d0 / max(1.0 - rho1, 1e-300), 1.0)))) )
        n = min(n, depth)
        rb = 1.0 - d0 * np.geomspace(1.0, (1.0 - rho1) / d0, n + 1)
        rb[-1] = rho1
    rb[0] = rho0
    cx0, cx1, cy0, cy1, lab = [], [], [], [], []
    for k in range(rb.size - 1):
        if halfwidth is None:
            lo, hi = t0, t1
        else:
            lo, hi = -1.0, 1.0
        scale = 1.0 - 0.5 * (rb[k] + rb[k + 1])
        if halfwidth is None:
            brk = _angular_breaks(lo, hi, scale, peak_angles)
        else:
            hw = float(halfwidth(0.5 * (rb[k] + rb[k + 1]))) or 1.0
            mapped = [((phi - center) / hw, wdt / hw) for phi, wdt in peak_angles]
            brk = _angular_breaks(lo, hi, scale / hw, mapped, base=2)
        cx0.append(np.full(brk.size - 1, rb[k]))
        cx1.append(np.full(brk.size - 1, rb[k + 1]))
        cy0.append(brk[:-1])
        cy1.append(brk[1:])
        lab.append(np.full(brk.size - 1, k))
    cx0, cx1, cy0, cy1, lab = map(np.concatenate, (cx0, cx1, cy0, cy1, lab))

    if halfwidth is None:
        def g(x, y):
            return f(x * np.exp(1j * y)) * x
    else:
        def g(x, y):
            hw = halfwidth(x)
            return f(x * np.exp(1j * (center + y * hw))) * x * hw

    res = adaptive_rectangles(g, cx0, cx1, cy0, cy1, tol=tol, max_cells=max_cells, panel=lab)
    if not to_boundary:
        return res
    c = res.by_panel
    tail, tail_err = _geometric_tail(c)
    value = res.value + tail
    return CubatureResult(value, res.error + tail_err, res.evaluations, c)


def _geometric_tail(c: np.ndarray) -> tuple[float, float]:
    """Extrapolated sum beyond the last panel assuming geometric decay of panel sums."""
    last, prev, prev2 = abs(c[-1]), abs(c[-2]), abs(c[-3])
    if last == 0.0:
        return 0.0, 0.0
    if prev == 0.0:
        return 0.0, last
    q = last / prev
    if q >= 1.0:
        raise DivergentIntegralError(f"panel sums do not decay toward the boundary (ratio {q:.3g})")
    tail = c[-1] * q / (1.0 - q)
    q2 = prev / prev2 if prev2 > 0 else q
    alt = c[-1] * q2 / (1.0 - q2) if q2 < 1.0 else 2.0 * tail
    return float(tail), float(abs(tail - alt))


def integrate_disk(f: Callable[[np.ndarray], np.ndarray], tol: float = 1e-6, *, peaks=(),
                   depth: int = DEPTH) -> float:
    """``int_D f dA`` (area measure, so ``f = 1`` gives ``pi``).

    ``f`` is evaluated on complex numpy arrays.  ``peaks`` lists points (inside
    the disk or on its boundary) where ``f`` concentrates; the angular
    partition is graded toward their directions.  Raises
    :class:`~tentlab.errors.NonConvergenceError` carrying the partial value.
    """
    res = integrate_polar(f, 0.0, 1.0, peaks=peaks, tol=tol, depth=depth)
    if res.error > 10.0 * tol * abs(res.value) and res.error > 1e-300:
        raise NonConvergenceError("boundary extrapolation is unreliable", res.value, res.error)
    return res.value


_GL20 = np.polynomial.legendre.leggauss(20)


RADIAL_FLOOR = 2.0**-44


def integrate_radial(fr: Callable[[np.ndarray], np.ndarray], rho0: float = 0.0, rho1: float = 1.0,
                     depth: int = 48) -> float:
    """``int_{rho0}^{rho1} fr(rho) rho d rho`` on dyadic panels in ``1 - rho``.

    Reaching ``rho1 = 1`` the remainder past the deepest panel is
    extrapolated geometrically; non-decaying panel sums raise
    :class:`~tentlab.errors.DivergentIntegralError`.
    """
    if rho1 <= rho0:
        return 0.0
    d0 = 1.0 - rho0
    if rho1 >= 1.0:
        # keep 1 - d representable well above rounding level
        depth = max(3, min(depth, int(math.floor(math.log2(d0 / RADIAL_FLOOR)))))
        d = d0 * 2.0 ** -np.arange(depth + 1)
    else:
        n = max(1, min(depth, int(math.ceil(math.log2(d0 / (1.0 - rho1))))))
        d = d0 * np.geomspace(1.0, (1.0 - rho1) / d0, n + 1)
    lo, hi = 1.0 - d[:-1], 1.0 - d[1:]
    lo[0] = rho0
    if rho1 < 1.0:
        hi[-1] = rho1
    x, wt = _GL20
    half = 0.5 * (hi - lo)[:, None]
    pts = lo[:, None] + half * (x + 1.0)
    with np.errstate(all="ignore"):
        vals = np.asarray(fr(pts), dtype=float) * pts
    panels = (vals * half * wt).sum(axis=1)
    if not np.all(np.isfinite(panels)):
        raise DivergentIntegralError("radial integrand is not finite")
    total = float(panels.sum())
    if rho1 >= 1.0:
        total += _geometric_tail(panels)[0]
    return total


def integrate_euclidean_disk(f: Callable[[np.ndarray], np.ndarray], center: complex, radius: float,
                             tol: float = 1e-8) -> float:
    """``int f dA`` over the Euclidean disk ``|u - center| < radius``."""
    def g(s, t):
        return f(center + radius * s * np.exp(1j * t)) * (radius * radius) * s

    x0 = np.array([0.0, 0.0, 0.0, 0.0, 0.5, 0.5, 0.5, 0.5])
    x1 = np.array([0.5, 0.5, 0.5, 0.5, 1.0, 1.0, 1.0, 1.0])
    y0 = np.tile(np.linspace(-np.pi, np.pi, 5)[:-1], 2)
    y1 = np.tile(np.linspace(-np.pi, np.pi, 5)[1:], 2)
    return adaptive_rectangles(g, x0, x1, y0, y1, tol=tol, atol=1e-300).value


# -- bands ---------------------------------------------------------------------


@dataclass
class RatioBand:
    """Range ``[lo, hi]`` of a ratio over a sample grid, with the per-point trace."""

    lo: float
    hi: float
    grid: dict
    quantity_label: str
    trace: list = field(default_factory=list)
    one_sided: bool = False

    @property
    def spread(self) -> float:
        return self.hi / self.lo if self.lo > 0 else math.inf

    @property
    def finite(self) -> bool:
        if self.one_sided:
            return math.isfinite(self.hi)
        return math.isfinite(self.hi) and self.lo > 0 and math.isfinite(self.lo)

    def stable_against(self, refined: "RatioBand", threshold: float = STABILITY) -> bool:
        """Less than ``threshold`` relative change of the band's key number under refinement.

        The key number is ``hi`` for one-sided bands and ``hi/lo`` otherwise.
        """
        if not (self.finite and refined.finite):
            return False
        a, b = (self.hi, refined.hi) if self.one_sided else (self.spread, refined.spread)
        return abs(b - a) <= threshold * abs(a)

    def to_dict(self) -> dict:
        return {"lo": self.lo, "hi": self.hi, "quantity_label": self.quantity_label,
                "one_sided": self.one_sided, "grid": self.grid, "trace": self.trace}

    def to_csv(self) -> str:
        if not self.trace:
            return ""
        keys = list(self.trace[0].keys())
        lines = [",".join(keys)]
        for row in self.trace:
            cells = []
            for k in keys:
                v = row[k]
                cells.append(f"{v.real!r}{'+' if v.imag >= 0 else '-'}{abs(v.imag)!r}j" if isinstance(v, complex)
                             else repr(v))
            lines.append(",".join(cells))
        return "\n".join(lines) + "\n"


def dyadic_points(levels: int = 10, angles: int = 8, include_origin: bool = False, start: int = 1) -> np.ndarray:
    """Points with ``1 - |z| = 2**-j`` (``j = start..levels``) at ``angles`` equally spaced arguments."""
    j = np.arange(start, levels + 1)
    t = 2.0 * np.pi * np.arange(angles) / angles
    pts = ((1.0 - 2.0**-j)[:, None] * np.exp(1j * t)[None, :]).ravel()
    return np.concatenate([[0j], pts]) if include_origin else pts


def _band(values, points, label, grid, one_sided=False, extra=None) -> RatioBand:
    values = np.asarray(values, dtype=float)
    trace = []
    for i, (z, v) in enumerate(zip(points, values)):
        row = {"z_re": float(np.real(z)), "z_im": float(np.imag(z)), "one_minus_abs_z": float(1 - abs(z)), "ratio": float(v)}
        if extra is not None:
            row.update({k: float(val[i]) for k, val in extra.items()})
        trace.append(row)
    return RatioBand(float(np.min(values)), float(np.max(values)), grid, label, trace, one_sided)


def fr_j(alpha: float, s: float, z: complex, tol: float = 1e-6) -> float:
    """``J(z) = int (1-|u|)^alpha / |1 - conj(u) z|^(2+alpha+s) dA(u)``."""
    p = 2.0 + alpha + s

    def f(u):
        return (1.0 - np.abs(u)) ** alpha / np.abs(1.0 - np.conj(u) * z) ** p

    return integrate_disk(f, tol, peaks=[z] if z != 0 else ())


def fr_check(alpha: float, s: float, zgrid=None, *, tol: float = 1e-6, levels: int = 10, angles: int = 8) -> RatioBand:
    """Band of ``J(z) (1-|z|)^s`` over ``zgrid`` (default ``1-|z| = 2**-j``, ``j=1..levels``)."""
    if alpha <= -1.0 or s <= 0.0:
        raise ParameterDomainError("fr_check needs alpha > -1 and s > 0")
    pts = dyadic_points(levels, angles) if zgrid is None else np.atleast_1d(np.asarray(zgrid, dtype=complex))
    js = np.array([fr_j(alpha, s, complex(z), tol) for z in pts])
    vals = js * (1.0 - np.abs(pts)) ** s
    grid = {"levels": levels, "angles": angles, "tol": tol} if zgrid is None else {"points": len(pts), "tol": tol}
    return _band(vals, pts, f"J(z)(1-|z|)^s, alpha={alpha}, s={s}", grid, extra={"J": js})


def gfr_integral(w: RadialWeight, s: float, gamma: float, delta: float, a: complex, z: complex,
                 tol: float = 1e-6) -> float:
    """``I(a,z) = int (1-|u|)^-delta omega(u) / (|1-conj(a)u|^s |1-conj(z)u|^gamma) dA(u)``."""
    ca, cz = np.conj(a), np.conj(z)

    def f(u):
        m = np.abs(u)
        return ((1.0 - m) ** (-delta) * w(m)
                / (np.abs(1.0 - ca * u) ** s * np.abs(1.0 - cz * u) ** gamma))

    return integrate_disk(f, tol, peaks=[p for p in (a, z) if p != 0])


def validate_gfr(report: DoublingReport, s: float, gamma: float, delta: float, part: str, m: int = 0) -> None:
    if part == "part1":
        if not report.hat_member:
            raise ParameterDomainError("part1 needs a weight in the hat class")
        if not (s > 1.0 and gamma > 1.0 and gamma > max(report.gamma0, 1.0) and delta == 0.0):
            raise ParameterDomainError("part1 needs s, gamma > 1, gamma > max(gamma0, 1) and delta = 0")
    elif part == "part2":
        if not report.in_D:
            raise ParameterDomainError("part2 needs a doubling weight (both classes)")
        if m < 0 or int(m) != m:
            raise ParameterDomainError("m must be a nonnegative integer")
        if gamma < m + 1.0 + report.gamma0:
            raise ParameterDomainError(f"part2 needs gamma >= m + 1 + gamma0 = {m + 1 + report.gamma0:.4g}")
        if not 1.0 < s < 1.0 + report.delta0:
            raise ParameterDomainError(f"part2 needs s in (1, 1 + delta0) = (1, {1 + report.delta0:.4g})")
        if not -m <= delta < report.delta0:
            raise ParameterDomainError(f"part2 needs delta in [-m, delta0) = [{-m}, {report.delta0:.4g})")
    else:
        raise ParameterDomainError("part must be 'part1' or 'part2'")


def gfr_default_grids(levels: int = 5, a_angles: Sequence[float] = (0.0, np.pi / 4, np.pi)):
    rad = 1.0 - 2.0 ** -np.arange(1, levels + 1)
    zs = np.concatenate([[0j], rad.astype(complex)])
    a_list = [0j] + [ra * np.exp(1j * t) for ra in rad for t in a_angles]
    return np.asarray(a_list, dtype=complex), zs


def gfr_check(w: RadialWeight, s: float, gamma: float, delta: float, case: str = "part1", grids=None, *,
              m: int = 0, report: DoublingReport | None = None, tol: float = 1e-6, levels: int = 5) -> RatioBand:
    """One-sided band of ``I(a,z)`` over its claimed majorant on an ``(a, z)`` grid.

    part1 majorant: ``omega_hat(z) / ((1-|a|)^(s-1) (1-|z|)^gamma)``;
    part2 majorant: ``omega_hat(z) / (|1-conj(a)z|^s (1-|z|)^(gamma+delta-1))``.
    Parameters are validated against the weight's :class:`DoublingReport`.
    """
    report = classify_doubling(w) if report is None else report
    validate_gfr(report, s, gamma, delta, case, m)
    a_pts, z_pts = gfr_default_grids(levels) if grids is None else (np.asarray(grids[0], complex), np.asarray(grids[1], complex))
    vals, pts_a, pts_z, ints = [], [], [], []
    for z in z_pts:
        wz = float(w.tail(abs(z)))
        for a in a_pts:
            val = gfr_integral(w, s, gamma, delta, complex(a), complex(z), tol)
            if case == "part1":
                major = wz / ((1.0 - abs(a)) ** (s - 1.0) * (1.0 - abs(z)) ** gamma)
            else:
                major = wz / (abs(1.0 - np.conj(a) * z) ** s * (1.0 - abs(z)) ** (gamma + delta - 1.0))
            vals.append(val / major)
            ints.append(val)
            pts_a.append(a)
            pts_z.append(z)
    vals = np.array(vals)
    trace = [{"a_re": float(a.real), "a_im": float(a.imag), "z_re": float(z.real), "z_im": float(z.imag),
              "I": float(i), "ratio": float(v)} for a, z, i, v in zip(pts_a, pts_z, ints, vals)]
    grid = {"levels": levels, "pairs": len(vals), "tol": tol, "m": m}
    label = f"I(a,z)/majorant [{case}], s={s}, gamma={gamma}, delta={delta}"
    return RatioBand(float(vals.min()), float(vals.max()), grid, label, trace, one_sided=True)


HAT_LEVELS = 40


def hat_tail_integral(w: RadialWeight, tau: float, x: float) -> float:
    """``int_x^1 omega_hat(r) (1-r)^(-1-tau) dr`` on dyadic panels toward 1.

    Each panel is integrated in ``log(1 - r)`` with 20-point Gauss-Legendre.
    Once consecutive panel ratios agree (a local power law) the remaining
    panels are summed as a geometric series; otherwise the ratio of the last
    two panels is used after ``HAT_LEVELS`` panels.
    """
    d0 = 1.0 - x
    xg, wg = _GL20
    sums = []
    for k in range(HAT_LEVELS):
        s_hi, s_lo = math.log(d0) - k * math.log(2.0), math.log(d0) - (k + 1) * math.log(2.0)
        s = 0.5 * (s_hi - s_lo) * xg + 0.5 * (s_hi + s_lo)
        d = np.exp(s)
        vals = np.asarray(w.tail(1.0 - d), dtype=float) * d ** (-tau)
        sums.append(float(0.5 * (s_hi - s_lo) * np.dot(wg, vals)))
        if k >= 3 and sums[-1] > 0 and sums[-2] > 0:
            q1, q0 = sums[-1] / sums[-2], sums[-2] / sums[-3]
            if q1 >= 1.0:
                raise DivergentIntegralError("hat integral diverges: tau too large for this weight")
            if abs(q1 - q0) <= 1e-9 * q1:
                break
    total = math.fsum(sums)
    if sums[-1] == 0.0:
        return total
    q = sums[-1] / sums[-2] if sums[-2] > 0 else 0.0
    if q >= 1.0:
        raise DivergentIntegralError("hat integral diverges: tau too large for this weight")
    return total + sums[-1] * q / (1.0 - q)


def hat_tail_check(w: RadialWeight, tau: float, zgrid=None, *, report: DoublingReport | None = None,
                   levels: int = 10) -> RatioBand:
    """Band of ``(1-|z|)^tau / omega_hat(z) * int_{|z|}^1 omega_hat(r) (1-r)^(-1-tau) dr``."""
    report = classify_doubling(w) if report is None else report
    if not report.in_D:
        raise ParameterDomainError("hat_tail_check needs a doubling weight (both classes)")
    if not 0.0 < tau < report.tau0:
        raise ParameterDomainError(f"hat_tail_check needs 0 < tau < tau0 = {report.tau0:.4g}")
    pts = dyadic_points(levels, 1, include_origin=True) if zgrid is None else np.atleast_1d(np.asarray(zgrid, complex))
    vals = []
    for z in pts:
        x = abs(z)
        vals.append(hat_tail_integral(w, tau, x) * (1.0 - x) ** tau / float(w.tail(x)))
    return _band(vals, pts, f"hat integral ratio, tau={tau}", {"levels": levels}, one_sided=True)
