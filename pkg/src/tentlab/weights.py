"""Radial weights on the unit disk: tails, moments and doubling classification.

A radial weight is an integrable density ``omega`` on ``[0, 1)``.  Most of the
library only ever needs three derived quantities:

* the tail ``omega_hat(r) = int_r^1 omega(s) ds``,
* the moments ``omega_x = int_0^1 r**x omega(r) dr``,
* the doubling constants and exponents reported by :func:`classify_doubling`.

Example::

    >>> w = RadialWeight.standard(1.0)
    >>> round(omega_hat(w, 0.5), 12)
    0.125
    >>> rep = classify_doubling(w)
    >>> rep.in_D, rep.C_hat
    (True, 4.0)
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Callable, Mapping

import numpy as np
from scipy import integrate, special

from ._trend import Verdict
from .errors import DivergentIntegralError, DomainError

GUARD = 1.0 - 2.0**-40
PER_OCTAVE = 32
LEVELS = 30
K_SWEEP = (2, 4, 8, 16)
SLOPE_MARGIN = 0.05
EDGE = 5
EDGE_TOL = 0.05

_GL10 = np.polynomial.legendre.leggauss(10)
_GL5 = np.polynomial.legendre.leggauss(5)
_GL24 = np.polynomial.legendre.leggauss(24)


def _gauss_panels(lo, hi, rule):
    """Nodes and weights of ``rule`` mapped onto each panel ``[lo_i, hi_i]``."""
    x, wt = rule
    lo = np.asarray(lo, dtype=float)[..., None]
    hi = np.asarray(hi, dtype=float)[..., None]
    half = 0.5 * (hi - lo)
    return lo + half * (x + 1.0), half * wt


def _as_float_array(r):
    return np.asarray(r, dtype=float)


@dataclass(frozen=True, eq=False)
class RadialWeight:
    """A radial weight with an eagerly built tail cache.

    ``evaluator`` must accept numpy arrays of radii in ``[0, 1)``.  When
    ``closed_form_tail`` is missing, the tail is tabulated at construction on
    a geometric grid ``1 - r = 2**(-i/32)`` up to ``integrability_guard``; the
    piece beyond the guard is extrapolated from the local power law of the
    density, and a non-integrable density raises
    :class:`~tentlab.errors.DivergentIntegralError` right away.
    """

    evaluator: Callable[[np.ndarray], np.ndarray]
    closed_form_tail: Callable[[np.ndarray], np.ndarray] | None = None
    integrability_guard: float = GUARD
    label: str = "custom"
    spec: Mapping[str, Any] | None = None
    log_tail: Callable[[np.ndarray], np.ndarray] | None = None
    beta_moment: Callable[[float, float], float] | None = None
    _nodes: np.ndarray = field(init=False, repr=False)
    _tails: np.ndarray = field(init=False, repr=False)
    _edge_exponent: float = field(init=False, repr=False)

    def __post_init__(self):
        if not 0.5 < self.integrability_guard < 1.0:
            raise DomainError("integrability_guard must lie in (1/2, 1)")
        octaves = -math.log2(1.0 - self.integrability_guard)
        count = int(math.ceil(octaves * PER_OCTAVE))
        t = np.minimum(np.arange(count + 1) / PER_OCTAVE, octaves)
        nodes = 1.0 - 2.0**-t
        nodes[-1] = self.integrability_guard
        object.__setattr__(self, "_nodes", nodes)

        delta = 1.0 - self.integrability_guard
        with np.errstate(all="ignore"):
            w_edge = self.evaluator(np.array([1.0 - 4.0 * delta, 1.0 - 2.0 * delta, 1.0 - delta]))
        w_edge = np.asarray(w_edge, dtype=float)
        if np.any(w_edge < 0) or not np.all(np.isfinite(w_edge)):
            raise DomainError("weight must be finite and nonnegative near the guard")
        if w_edge[-1] > 0.0 and w_edge[-2] > 0.0:
            expo = math.log2(w_edge[-2] / w_edge[-1])
        else:
            expo = math.inf
        object.__setattr__(self, "_edge_exponent", expo)
        if self.closed_form_tail is None and expo <= -1.0 + 1e-9:
            raise DivergentIntegralError(f"density behaves like (1-r)^{expo:.3g} near 1: not integrable")

        if self.closed_form_tail is not None:
            object.__setattr__(self, "_tails", np.empty(0))
            return
        x10, w10 = _gauss_panels(nodes[:-1], nodes[1:], _GL10)
        x5, w5 = _gauss_panels(nodes[:-1], nodes[1:], _GL5)
        with np.errstate(all="ignore"):
            f10 = np.asarray(self.evaluator(x10), dtype=float)
            f5 = np.asarray(self.evaluator(x5), dtype=float)
        if np.any(f10 < 0) or not np.all(np.isfinite(f10)):
            raise DomainError("weight evaluator returned negative or non-finite values")
        panels = (f10 * w10).sum(axis=1)
        coarse = (f5 * w5).sum(axis=1)
        bad = np.abs(panels - coarse) > 1e-10 * np.maximum(np.abs(panels), 1e-300)
        for i in np.flatnonzero(bad):
            panels[i] = integrate.quad(lambda s: float(self.evaluator(np.array([s]))[0]), nodes[i], nodes[i + 1],
                                       epsabs=0.0, epsrel=1e-13, limit=200)[0]
        beyond = self._beyond_guard(self.integrability_guard)
        tails = np.concatenate([np.cumsum(panels[::-1])[::-1], [0.0]]) + beyond
        if not math.isfinite(tails[0]) or tails[0] <= 0.0:
            raise DivergentIntegralError("omega_hat(0) is not finite and positive")
        object.__setattr__(self, "_tails", tails)

    # -- constructors -----------------------------------------------------

    @classmethod
    def standard(cls, alpha: float) -> "RadialWeight":
        """``(1 - r)**alpha`` for ``alpha > -1``, with closed-form tail and moments."""
        alpha = float(alpha)
        if alpha <= -1.0:
            raise DivergentIntegralError("(1-r)^alpha is integrable only for alpha > -1")
        a1 = alpha + 1.0

        def density(r):
            return (1.0 - _as_float_array(r)) ** alpha

        def tail(r):
            return (1.0 - _as_float_array(r)) ** a1 / a1

        def log_tail(r):
            return a1 * np.log1p(-_as_float_array(r)) - math.log(a1)

        def moment(x, y):
            return float(special.beta(x + 1.0, y + a1))

        return cls(density, tail, label=f"standard(alpha={alpha:g})", spec={"kind": "standard", "alpha": alpha},
                   log_tail=log_tail, beta_moment=moment)

    @classmethod
    def exp_inv(cls) -> "RadialWeight":
        """``exp(-1/(1-r))``: a rapidly decreasing weight outside the hat class.

        With ``X = 1/(1-r)`` the tail equals the incomplete gamma function
        ``Gamma(-1, X) = exp(-X) U(2, 2, X)``, evaluated in log form so that it
        stays meaningful where ``exp(-X)`` underflows.
        """

        def density(r):
            with np.errstate(over="ignore", under="ignore", divide="ignore"):
                return np.exp(-1.0 / (1.0 - _as_float_array(r)))

        def log_tail(r):
            x = 1.0 / (1.0 - _as_float_array(r))
            return -x + np.log(special.hyperu(2.0, 2.0, x))

        def tail(r):
            with np.errstate(under="ignore"):
                return np.exp(log_tail(r))

        return cls(density, tail, label="exp_inv", spec={"kind": "exp_inv"}, log_tail=log_tail)

    @classmethod
    def table(cls, r, w) -> "RadialWeight":
        """Piecewise-linear density through ``(r[i], w[i])``, constant after the last node."""
        rr = np.asarray(r, dtype=float)
        ww = np.asarray(w, dtype=float)
        if rr.ndim != 1 or rr.shape != ww.shape or rr.size < 2:
            raise DomainError("table weight needs matching 1-d arrays with at least two nodes")
        if rr[0] != 0.0 or np.any(np.diff(rr) <= 0) or rr[-1] > 1.0 or np.any(ww < 0):
            raise DomainError("table radii must start at 0, increase strictly and stay in [0, 1]; values >= 0")
        if rr[-1] < 1.0:
            rr = np.append(rr, 1.0)
            ww = np.append(ww, ww[-1])
        seg = 0.5 * (ww[1:] + ww[:-1]) * np.diff(rr)
        cum = np.concatenate([np.cumsum(seg[::-1])[::-1], [0.0]])

        def density(x):
            return np.interp(_as_float_array(x), rr, ww)

        def tail(x):
            x = _as_float_array(x)
            k = np.clip(np.searchsorted(rr, x, side="right") - 1, 0, rr.size - 2)
            wx = np.interp(x, rr, ww)
            return cum[k + 1] + 0.5 * (wx + ww[k + 1]) * (rr[k + 1] - x)

        return cls(density, tail, label="table", spec={"kind": "table", "r": rr.tolist(), "w": ww.tolist()})

    @classmethod
    def from_spec(cls, spec: Mapping[str, Any]) -> "RadialWeight":
        """Build a weight from its JSON form (``standard``, ``table`` or ``exp_inv``)."""
        kind = spec.get("kind")
        if kind == "standard":
            return cls.standard(float(spec["alpha"]))
        if kind == "exp_inv":
            return cls.exp_inv()
        if kind == "table":
            return cls.table(spec["r"], spec["w"])
        raise DomainError(f"unknown weight kind {kind!r}")

    def to_dict(self) -> dict:
        return dict(self.spec) if self.spec is not None else {"kind": "custom", "label": self.label}

    # -- evaluation -------------------------------------------------------

    def __call__(self, r):
        return self.evaluator(_as_float_array(r))

    def _beyond_guard(self, r):
        """Tail past ``r >= guard`` from the local power law ``(1-r)**e`` of the density."""
        r = _as_float_array(r)
        expo = self._edge_exponent
        if not math.isfinite(expo):
            return np.zeros_like(r)
        with np.errstate(all="ignore"):
            return np.asarray(self.evaluator(r), dtype=float) * (1.0 - r) / (expo + 1.0)

    def tail(self, r):
        """``omega_hat`` at ``r`` (scalar or array)."""
        r = _as_float_array(r)
        if np.any((r < 0.0) | (r >= 1.0)):
            raise DomainError("omega_hat needs r in [0, 1)")
        if self.closed_form_tail is not None:
            out = np.asarray(self.closed_form_tail(r), dtype=float)
            return float(out) if out.ndim == 0 else out
        flat = np.atleast_1d(r).ravel()
        out = np.empty_like(flat)
        past = flat >= self.integrability_guard
        out[past] = self._beyond_guard(flat[past])
        inside = ~past
        if np.any(inside):
            x = flat[inside]
            idx = np.floor(-np.log2(1.0 - x) * PER_OCTAVE).astype(int)
            idx = np.clip(idx, 0, self._nodes.size - 2)
            idx = np.where(self._nodes[idx] > x, idx - 1, idx)
            hi = self._nodes[idx + 1]
            nodes, wts = _gauss_panels(x, hi, _GL10)
            with np.errstate(all="ignore"):
                piece = (np.asarray(self.evaluator(nodes), dtype=float) * wts).sum(axis=1)
            out[inside] = self._tails[idx + 1] + piece
        out = out.reshape(np.shape(r))
        return float(out) if out.ndim == 0 else out

    def log_omega_hat(self, r):
        """``log omega_hat(r)``; finite even where the tail itself underflows (when known)."""
        if self.log_tail is not None:
            out = np.asarray(self.log_tail(_as_float_array(r)), dtype=float)
            return float(out) if out.ndim == 0 else out
        with np.errstate(divide="ignore"):
            return np.log(self.tail(r))

    def power_moment(self, x: float, y: float = 0.0) -> float:
        """``int_0^1 r**x (1-r)**y omega(r) dr`` for ``x > 0`` (or ``x = 0``) and ``y >= 0``."""
        if x < 0 or y < 0:
            raise DomainError("power_moment needs x >= 0 and y >= 0")
        if self.beta_moment is not None:
            return self.beta_moment(x, y)

        def integrand(s):
            with np.errstate(all="ignore"):
                return s**x * (1.0 - s) ** y * np.asarray(self.evaluator(s), dtype=float)

        head, err = integrate.quad(lambda s: float(integrand(np.array([s]))[0]), 0.0, 0.5,
                                   epsabs=0.0, epsrel=1e-13, limit=200)
        grid = self._nodes[PER_OCTAVE:]
        pts, wts = _gauss_panels(grid[:-1], grid[1:], _GL10)
        body = float((integrand(pts) * wts).sum())
        g = self.integrability_guard
        with np.errstate(all="ignore"):
            w_g = float(np.asarray(self.evaluator(np.array([g])))[0])
        expo = self._edge_exponent
        beyond = 0.0 if not math.isfinite(expo) else w_g * (1.0 - g) ** (1.0 + y) / (expo + y + 1.0)
        total = head + body + beyond
        if not math.isfinite(total):
            raise DivergentIntegralError("moment integral diverges")
        return total


def omega_hat(w: RadialWeight, r):
    """``int_r^1 omega(s) ds`` (relative error about 1e-10 for smooth densities)."""
    return w.tail(r)


def moment(w: RadialWeight, x: float) -> float:
    """``omega_x = int_0^1 r**x omega(r) dr`` for ``x > 0``."""
    if x <= 0:
        raise DomainError("moment needs x > 0")
    return w.power_moment(x, 0.0)


@dataclass(frozen=True)
class DoublingReport:
    """Outcome of :func:`classify_doubling`.

    ``beta0`` and ``alpha0`` are the raw extreme log-slopes of ``omega_hat``;
    code that needs an admissible exponent with room to spare should use
    :meth:`beta_admissible` / :meth:`alpha_admissible`, which apply the 5%
    margin.
    """

    in_D_hat: Verdict
    in_D_check: Verdict
    C_hat: float
    C_check: float
    K_check: float
    beta0: float
    gamma0: float
    alpha0: float
    tau0: float
    delta0: float
    grid: dict

    @property
    def in_D(self) -> bool:
        return self.in_D_hat is Verdict.MEMBER and self.in_D_check is Verdict.MEMBER

    @property
    def hat_member(self) -> bool:
        return self.in_D_hat is Verdict.MEMBER

    def beta_admissible(self) -> float:
        return self.beta0 * (1.0 + SLOPE_MARGIN)

    def alpha_admissible(self) -> float:
        return self.alpha0 * (1.0 - SLOPE_MARGIN)

    def d_constant(self, r: float) -> float:
        """A constant ``C`` with ``C**-1 <= omega_hat(z)/omega_hat(u) <= C`` whenever ``d(z,u) < r``.

        For ``d(z, u) < r`` the distances to the boundary compare within the
        factor ``(1+r)/(1-r)``, and the slope envelope turns that into a tail
        comparison.
        """
        return ((1.0 + r) / (1.0 - r)) ** self.beta_admissible()

    def to_dict(self) -> dict:
        return {
            "in_D_hat": self.in_D_hat.value,
            "in_D_check": self.in_D_check.value,
            "in_D": self.in_D,
            "C_hat": self.C_hat,
            "C_check": self.C_check,
            "K_check": self.K_check,
            "beta0": self.beta0,
            "gamma0": self.gamma0,
            "alpha0": self.alpha0,
            "tau0": self.tau0,
            "delta0": self.delta0,
            "grid": self.grid,
        }


def _edge_verdict(seq: np.ndarray) -> Verdict:
    """Member when the ratio sequence is flat or settling at the truncation edge."""
    if not np.all(np.isfinite(seq)):
        return Verdict.NON_MEMBER
    tail = seq[-EDGE:]
    if tail[-1] > (1.0 + EDGE_TOL) * tail[0]:
        return Verdict.NON_MEMBER if np.all(np.diff(tail) >= 0) else Verdict.INCONCLUSIVE
    if np.max(tail) > (1.0 + EDGE_TOL) * max(tail[0], tail[-1]):
        return Verdict.INCONCLUSIVE
    return Verdict.MEMBER


def gamma_sweep(w: RadialWeight, gammas, levels: int = LEVELS) -> np.ndarray:
    """Ratios ``(1-t)**g int_0^t omega(r)/(1-r)**g dr / omega_hat(t)`` at ``t = 1 - 2**-j``.

    Returns an array of shape ``(len(gammas), levels)``.
    """
    gammas = np.asarray(gammas, dtype=float)
    j = np.arange(levels + 1)
    lo, hi = 1.0 - 2.0**-j[:-1], 1.0 - 2.0**-j[1:]
    pts, wts = _gauss_panels(lo, hi, _GL24)
    with np.errstate(all="ignore"):
        wr = np.asarray(w(pts), dtype=float) * wts
    log1m = np.log1p(-pts)
    t = hi
    log1mt = np.log1p(-t)
    out = np.empty((gammas.size, levels))
    for gi, g in enumerate(gammas):
        for k in range(levels):
            scale = np.exp(g * (log1mt[k] - log1m[: k + 1]))
            out[gi, k] = float((wr[: k + 1] * scale).sum())
    with np.errstate(all="ignore"):
        out /= np.asarray(w.tail(t), dtype=float)
    return out


def classify_doubling(w: RadialWeight, levels: int = LEVELS) -> DoublingReport:
    """Grid verdict on membership in the hat class, the check class and their intersection.

    The grid is ``1 - r = 2**-j`` for ``j = 1..levels``.  Membership means the
    defining ratio stays bounded (hat class) or above 1 (check class) with a
    flat trend over the last few levels; a widening trend means non-member.
    """
    j = np.arange(1, levels + 2)
    r = 1.0 - 2.0**-j
    L = np.asarray(w.log_omega_hat(r), dtype=float)
    with np.errstate(invalid="ignore", over="ignore"):
        hat_ratio = np.exp(L[:-1] - L[1:])
    hat = _edge_verdict(hat_ratio)
    c_hat = float(np.max(hat_ratio)) if np.all(np.isfinite(hat_ratio)) else math.inf

    rk = r[:-1]
    check = Verdict.NON_MEMBER
    c_check, k_check = math.nan, math.nan
    check_trace = {}
    for K in K_SWEEP:
        Lk = np.asarray(w.log_omega_hat(1.0 - (1.0 - rk) / K), dtype=float)
        with np.errstate(invalid="ignore", over="ignore"):
            q = np.exp(L[:-1] - Lk)
        check_trace[str(K)] = q.tolist()
        if np.any(np.isnan(q)):
            continue
        inf_q = float(np.min(q))
        if inf_q > 1.0 + 1e-9:
            tail = q[-EDGE:]
            settling = tail[-1] < (1.0 - EDGE_TOL) * tail[0] and np.all(np.diff(tail) <= 0)
            check = Verdict.INCONCLUSIVE if settling else Verdict.MEMBER
            c_check, k_check = inf_q, float(K)
            break

    finite = np.isfinite(L[:-1])
    lj = L[:-1][finite]
    xj = -j[:-1][finite] * math.log(2.0)
    if lj.size >= 2:
        ii, kk = np.triu_indices(lj.size, 1)
        slopes = (lj[kk] - lj[ii]) / (xj[kk] - xj[ii])
        beta0, alpha0 = float(np.max(slopes)), float(np.min(slopes))
    else:
        beta0 = alpha0 = math.nan

    gammas = 2.0 ** (np.arange(-8, 49) / 8.0)
    sweep = gamma_sweep(w, gammas, levels)
    gamma0 = math.inf
    for g, row in zip(gammas, sweep):
        if np.all(np.isfinite(row)) and row[-1] <= (1.0 + EDGE_TOL) * row[-EDGE]:
            gamma0 = float(g)
            break

    tau0 = math.log(c_check) / math.log(k_check) if math.isfinite(c_check) else math.nan
    parts = (alpha0, gamma0, tau0)
    delta0 = 0.5 * min(parts) if all(math.isfinite(p) for p in parts) else math.nan
    grid = {
        "levels": levels,
        "largest_j": int(levels),
        "one_minus_r": (1.0 - rk).tolist(),
        "hat_ratio": hat_ratio.tolist(),
        "check_ratio": check_trace,
        "gamma_sweep": gammas.tolist(),
    }
    return DoublingReport(hat, check, c_hat, c_check, k_check, beta0, gamma0, alpha0, tau0, delta0, grid)
