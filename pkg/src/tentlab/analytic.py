"""Closed-form analytic functions on the disk and the atomic decomposition.

An :class:`AnalyticFn` is a finite sum of

* a polynomial ``sum_n p_n z^n``;
* lattice atoms ``c * scale * (1-|a|)^gamma / (1 - conj(a) z)^gamma`` with ``|a| < 1``;
* kernels ``c * (1 - conj(zeta) z)^(-s)`` or ``c * (-log(1 - conj(zeta) z))`` with
  ``|zeta| <= 1``; these carry boundary singularities such as ``(1-z)^(-1/2)``;

optionally composed with a dilation ``u -> rho u``.  Every derivative is
available in closed form.

The decomposition operator used by :func:`analyze_atoms` is a discretised
reproducing formula

    S g(z) = sum_k g(a_k) W_k (1 - conj(a_k) z)^(-gamma),
    W_k = (gamma-1)/pi * int_{D_k} (1-|u|^2)^(gamma-2) dA(u),

over the polar cells ``D_k`` of a ring lattice.  With this normalisation
``S`` is close to the identity and the Neumann iteration converges.
"""

from __future__ import annotations

import ast
import cmath
import math
from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np
from scipy import integrate, special

from ._io import jsonable, parse_complex
from .diskgeom import Lattice
from .errors import DomainError, NonConvergenceError, ParameterDomainError
from .quad import RatioBand, _band, dyadic_points
from .weights import DoublingReport, RadialWeight, classify_doubling

CHUNK = 1 << 22
ZERO_TOL = 1e-14


def _arr(x, dtype=complex) -> np.ndarray:
    return np.atleast_1d(np.asarray(x, dtype=dtype)).ravel()


def _rising(x: np.ndarray, m: int) -> np.ndarray:
    """Pochhammer symbol ``x (x+1) ... (x+m-1)``."""
    out = np.ones_like(np.asarray(x, dtype=float))
    for j in range(m):
        out = out * (x + j)
    return out


@dataclass(frozen=True, eq=False)
class AnalyticFn:
    poly: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=complex))
    atom_c: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=complex))
    atom_a: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=complex))
    atom_gamma: np.ndarray = field(default_factory=lambda: np.zeros(0))
    atom_scale: np.ndarray = field(default_factory=lambda: np.zeros(0))
    kern_c: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=complex))
    kern_zeta: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=complex))
    kern_s: np.ndarray = field(default_factory=lambda: np.zeros(0))
    kern_log: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=bool))
    dilation: float = 1.0
    label: str = ""

    def __post_init__(self):
        for name, dt in (("poly", complex), ("atom_c", complex), ("atom_a", complex), ("atom_gamma", float),
                         ("atom_scale", float), ("kern_c", complex), ("kern_zeta", complex), ("kern_s", float),
                         ("kern_log", bool)):
            object.__setattr__(self, name, _arr(getattr(self, name), dt))
        n = self.atom_c.size
        if not (self.atom_a.size == self.atom_gamma.size == self.atom_scale.size == n):
            raise DomainError("atom arrays must have equal length")
        if not (self.kern_zeta.size == self.kern_s.size == self.kern_log.size == self.kern_c.size):
            raise DomainError("kernel arrays must have equal length")
        if n and (np.any(np.abs(self.atom_a) >= 1.0) or np.any(self.atom_scale <= 0)):
            raise DomainError("atoms need |a| < 1 and positive scale")
        if self.kern_zeta.size and np.any(np.abs(self.kern_zeta) > 1.0 + 1e-15):
            raise DomainError("kernel singularities must lie outside the open disk")
        if not 0.0 < self.dilation <= 1.0:
            raise DomainError("dilation must be in (0, 1]")
        # trim trailing zero polynomial coefficients
        p = self.poly
        k = p.size
        while k and p[k - 1] == 0:
            k -= 1
        object.__setattr__(self, "poly", p[:k])

    # -- constructors ---------------------------------------------------------

    @classmethod
    def polynomial(cls, coeffs: Sequence[complex], label: str = "") -> "AnalyticFn":
        return cls(poly=coeffs, label=label)

    @classmethod
    def constant(cls, c: complex) -> "AnalyticFn":
        return cls(poly=[c], label=f"{c}")

    @classmethod
    def monomial(cls, n: int, c: complex = 1.0) -> "AnalyticFn":
        p = np.zeros(n + 1, dtype=complex)
        p[n] = c
        return cls(poly=p, label=f"z^{n}")

    @classmethod
    def atom_sum(cls, c, a, gamma, scale=1.0) -> "AnalyticFn":
        c, a = _arr(c), _arr(a)
        g = np.broadcast_to(np.asarray(gamma, float), c.shape)
        s = np.broadcast_to(np.asarray(scale, float), c.shape)
        return cls(atom_c=c, atom_a=a, atom_gamma=g, atom_scale=s)

    @classmethod
    def kernel(cls, zeta: complex = 1.0, s: float = 1.0, c: complex = 1.0) -> "AnalyticFn":
        """``c (1 - conj(zeta) z)^(-s)``."""
        return cls(kern_c=[c], kern_zeta=[zeta], kern_s=[s], kern_log=[False])

    @classmethod
    def log_kernel(cls, zeta: complex = 1.0, c: complex = 1.0) -> "AnalyticFn":
        """``c * (-log(1 - conj(zeta) z))``."""
        return cls(kern_c=[c], kern_zeta=[zeta], kern_s=[0.0], kern_log=[True])

    @classmethod
    def parse(cls, expr: str) -> "AnalyticFn":
        """Parse an expression such as ``"z**2 + 3"``, ``"z/(1-z)"``, ``"-log(1-z)"`` or ``"(1-z)**-0.5"``."""
        out = _Parser().parse(expr)
        return out.with_label(expr)

    @classmethod
    def from_spec(cls, spec) -> "AnalyticFn":
        if isinstance(spec, str):
            return cls.parse(spec)
        if "expr" in spec:
            out = cls.parse(spec["expr"])
            rho = float(spec.get("dilation", 1.0))
            return out if rho == 1.0 else dilate(out, rho)
        atoms = spec.get("atoms", [])
        kerns = spec.get("kernels", [])
        return cls(
            poly=[parse_complex(x) for x in spec.get("poly", [])],
            atom_c=[parse_complex(t["c"]) for t in atoms],
            atom_a=[parse_complex(t["a"]) for t in atoms],
            atom_gamma=[float(t["gamma"]) for t in atoms],
            atom_scale=[float(t.get("scale", 1.0)) for t in atoms],
            kern_c=[parse_complex(t["c"]) for t in kerns],
            kern_zeta=[parse_complex(t["zeta"]) for t in kerns],
            kern_s=[float(t.get("s", 0.0)) for t in kerns],
            kern_log=[bool(t.get("log", False)) for t in kerns],
            dilation=float(spec.get("dilation", 1.0)),
            label=str(spec.get("label", "")),
        )

    def to_dict(self) -> dict:
        out: dict[str, Any] = {"poly": jsonable(self.poly),
                               "atoms": [{"c": jsonable(c), "a": jsonable(a), "gamma": float(g), "scale": float(s)}
                                         for c, a, g, s in zip(self.atom_c, self.atom_a, self.atom_gamma,
                                                               self.atom_scale)]}
        if self.kern_c.size:
            out["kernels"] = [{"c": jsonable(c), "zeta": jsonable(z), "s": float(s), "log": bool(lg)}
                              for c, z, s, lg in zip(self.kern_c, self.kern_zeta, self.kern_s, self.kern_log)]
        if self.dilation != 1.0:
            out["dilation"] = self.dilation
        if self.label:
            out["label"] = self.label
        return out

    def with_label(self, label: str) -> "AnalyticFn":
        return _replace(self, label=label)

    # -- evaluation -------------------------------------------------------------

    def __call__(self, z):
        return self.eval(z, 0)

    def eval(self, z, m: int = 0):
        """Value of the ``m``-th derivative at ``z`` (scalar or array)."""
        if m < 0 or int(m) != m:
            raise DomainError("derivative order must be a nonnegative integer")
        m = int(m)
        z0 = np.asarray(z, dtype=complex)
        if np.any(np.abs(z0) >= 1.0):
            raise DomainError("evaluation point outside the open disk")
        rho = self.dilation
        u = rho * z0.ravel()
        out = self._poly_eval(u, m) + self._atom_eval(u, m) + self._kern_eval(u, m)
        if rho != 1.0 and m:
            out = out * rho**m
        out = out.reshape(z0.shape)
        return complex(out) if z0.ndim == 0 else out

    def _poly_eval(self, u, m):
        p = self.poly
        if p.size <= m:
            return np.zeros(u.shape, dtype=complex)
        n = np.arange(m, p.size)
        dp = p[m:] * special.poch(n - m + 1.0, m)
        return np.polynomial.polynomial.polyval(u, dp)

    def _atom_eval(self, u, m):
        out = np.zeros(u.shape, dtype=complex)
        if not self.atom_c.size:
            return out
        ca = np.conj(self.atom_a)
        g = self.atom_gamma
        b = self.atom_c * self.atom_scale * (1.0 - np.abs(self.atom_a)) ** g
        if m:
            b = b * _rising(g, m) * ca**m
        step = max(1, CHUNK // max(1, self.atom_c.size))
        for i in range(0, u.size, step):
            ui = u[i:i + step, None]
            out[i:i + step] = ((1.0 - ca[None, :] * ui) ** -(g + m)[None, :]) @ b
        return out

    def _kern_eval(self, u, m):
        out = np.zeros(u.shape, dtype=complex)
        for c, zeta, s, lg in zip(self.kern_c, self.kern_zeta, self.kern_s, self.kern_log):
            cz = np.conj(zeta)
            base = 1.0 - cz * u
            if lg:
                if m == 0:
                    out += c * -np.log(base)
                else:
                    out += c * math.factorial(m - 1) * cz**m * base ** (-float(m))
            else:
                out += c * float(special.poch(s, m)) * cz**m * base ** (-(s + m))
        return out

    # -- structure --------------------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return (not np.any(self.poly) and not np.any(self.atom_c) and not np.any(self.kern_c))

    def peaks(self, n: int = 24) -> list[complex]:
        """Points where ``|f|`` or its derivatives concentrate, for quadrature grading."""
        rho = self.dilation
        cand: list[tuple[float, complex]] = []
        for z in self.kern_zeta:
            cand.append((math.inf, complex(z)))
        if self.atom_c.size:
            h = np.abs(self.atom_c) * self.atom_scale * (1.0 - np.abs(self.atom_a)) ** self.atom_gamma \
                / (1.0 - np.abs(self.atom_a) ** 2) ** self.atom_gamma
            order = np.argsort(-h)[:n]
            cand.extend((float(h[i]), complex(self.atom_a[i])) for i in order if self.atom_a[i] != 0)
        out = []
        for _, p in sorted(cand, key=lambda t: -t[0])[:n]:
            if rho != 1.0 and p != 0:
                d = abs(1.0 - abs(p) / rho)
                p = (1.0 - min(d, 1.0)) * p / abs(p)
            out.append(p)
        return out

    def radial_modulus(self):
        """``|f(r e^{it})|`` as a function of ``r`` when it does not depend on ``t``, else None."""
        if self.atom_c.size and np.any(self.atom_a != 0):
            return None
        if self.kern_c.size and np.any(self.kern_zeta != 0):
            return None
        const = complex(self.atom_c @ self.atom_scale) if self.atom_c.size else 0j
        const += complex(self.kern_c[~self.kern_log].sum()) if self.kern_c.size else 0j
        p = self.poly.copy()
        if const:
            p = np.concatenate([p, [0j]]) if p.size == 0 else p
            p[0] += const
        nz = np.flatnonzero(p)
        if nz.size == 0:
            return lambda r: np.zeros(np.shape(r))
        if nz.size > 1:
            return None
        n, c, rho = int(nz[0]), abs(p[nz[0]]), self.dilation
        return lambda r: c * (rho * np.asarray(r, dtype=float)) ** n

    # -- algebra ----------------------------------------------------------------

    def __add__(self, other):
        if np.isscalar(other):
            other = AnalyticFn.constant(other)
        if self.dilation != other.dilation:
            raise DomainError("cannot add functions with different dilations")
        n = max(self.poly.size, other.poly.size)
        p = np.zeros(n, dtype=complex)
        p[:self.poly.size] += self.poly
        p[:other.poly.size] += other.poly
        return AnalyticFn(p, *(np.concatenate([getattr(self, k), getattr(other, k)]) for k in _TERM_FIELDS),
                          dilation=self.dilation)

    __radd__ = __add__

    def __mul__(self, c):
        if not np.isscalar(c):
            return NotImplemented
        c = complex(c)
        return _replace(self, poly=self.poly * c, atom_c=self.atom_c * c, kern_c=self.kern_c * c, label="")

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1.0

    def __sub__(self, other):
        return self + (-other if not np.isscalar(other) else -complex(other))


_TERM_FIELDS = ("atom_c", "atom_a", "atom_gamma", "atom_scale", "kern_c", "kern_zeta", "kern_s", "kern_log")


def _replace(f: AnalyticFn, **kw) -> AnalyticFn:
    base = {k: getattr(f, k) for k in ("poly",) + _TERM_FIELDS + ("dilation", "label")}
    base.update(kw)
    return AnalyticFn(**base)


def eval_fn(f: AnalyticFn, z, m: int = 0):
    """``f^(m)(z)``."""
    return f.eval(z, m)


eval = eval_fn  # noqa: A001  (operation name used by the public API)


def dilate(f: AnalyticFn, rho: float) -> AnalyticFn:
    """``u -> f(rho u)``; derivatives pick up ``rho**m`` by the chain rule."""
    if not 0.0 < rho < 1.0:
        raise DomainError("dilation needs 0 < rho < 1")
    lab = f"({f.label})_rho={rho:g}" if f.label else ""
    return _replace(f, dilation=f.dilation * rho, label=lab)


# -- expression parser ------------------------------------------------------------


class _Expr:
    """Intermediate sum of terms ``poly + sum c (1 - conj(zeta) z)^(-s) + sum c (-log(1 - conj(zeta) z))``."""

    def __init__(self, poly=None, pows=None, logs=None):
        self.poly = np.asarray(poly if poly is not None else [0j], dtype=complex)
        self.pows: dict[tuple[complex, float], complex] = dict(pows or {})
        self.logs: dict[complex, complex] = dict(logs or {})

    @staticmethod
    def const(c):
        return _Expr([complex(c)])

    def is_poly(self):
        return not self.pows and not self.logs

    def add(self, o: "_Expr", sign=1.0):
        n = max(self.poly.size, o.poly.size)
        p = np.zeros(n, dtype=complex)
        p[:self.poly.size] += self.poly
        p[:o.poly.size] += sign * o.poly
        pows = dict(self.pows)
        for k, v in o.pows.items():
            pows[k] = pows.get(k, 0) + sign * v
        logs = dict(self.logs)
        for k, v in o.logs.items():
            logs[k] = logs.get(k, 0) + sign * v
        return _Expr(p, pows, logs)._normalise()

    def scale(self, c):
        return _Expr(self.poly * c, {k: v * c for k, v in self.pows.items()}, {k: v * c for k, v in self.logs.items()})

    def _normalise(self):
        pows = {}
        extra = _Expr()
        for (zeta, s), c in self.pows.items():
            if c == 0:
                continue
            if s <= 0 and float(s).is_integer():
                extra = extra.add(_Expr(c * np.polynomial.polynomial.polypow([1.0, -np.conj(zeta)], int(-s))))
            else:
                pows[(zeta, s)] = c
        logs = {k: v for k, v in self.logs.items() if v != 0}
        out = _Expr(self.poly, pows, logs)
        if not extra.is_poly() or np.any(extra.poly):
            n = max(out.poly.size, extra.poly.size)
            p = np.zeros(n, dtype=complex)
            p[:out.poly.size] += out.poly
            p[:extra.poly.size] += extra.poly
            out.poly = p
        return out

    def single_power(self):
        """``(c, zeta, s)`` with ``self == c (1 - conj(zeta) z)^(-s)``, or None."""
        if self.logs:
            return None
        p = np.trim_zeros(self.poly, "b")
        if self.pows:
            if np.any(p) or len(self.pows) != 1:
                return None
            (zeta, s), c = next(iter(self.pows.items()))
            return c, zeta, s
        if p.size == 0:
            return None
        if p.size == 1:
            return p[0], 0j, 0.0
        if p[0] != 0:
            # p = p0 (1 + t z)^k ?
            k = p.size - 1
            t = p[1] / (k * p[0])
            cand = p[0] * np.polynomial.polynomial.polypow([1.0, t], k)
            if np.allclose(cand, p, rtol=1e-13, atol=1e-13 * np.abs(p).max()):
                return p[0], -np.conj(t), -float(k)
        return None

    def mul(self, o: "_Expr"):
        if self.is_poly() and o.is_poly():
            return _Expr(np.polynomial.polynomial.polymul(self.poly, o.poly))
        if o.is_poly():
            self, o = o, self
        if self.is_poly():
            out = _Expr()
            for n, c in enumerate(self.poly):
                if c != 0:
                    out = out.add(o.times_zn(n).scale(c))
            return out
        a, b = self.single_power(), o.single_power()
        if a is None or b is None or (a[1] != b[1] and a[2] != 0 and b[2] != 0):
            raise DomainError("product of singular terms with different singularities is not supported")
        zeta = a[1] if a[2] != 0 else b[1]
        return _Expr(pows={(zeta, a[2] + b[2]): a[0] * b[0]})._normalise()

    def times_zn(self, n: int):
        out = self
        for _ in range(n):
            out = out._times_z()
        return out

    def _times_z(self):
        out = _Expr(np.concatenate([[0j], self.poly]))
        for (zeta, s), c in self.pows.items():
            cz = np.conj(zeta)
            if cz == 0:
                raise DomainError("degenerate kernel")
            # z (1 - cz z)^(-s) = [(1 - cz z)^(-s) - (1 - cz z)^(1-s)] / cz
            out = out.add(_Expr(pows={(zeta, s): c / cz, (zeta, s - 1.0): -c / cz})._normalise())
        if self.logs:
            raise DomainError("z times a logarithm is not in the closed-form class")
        return out

    def power(self, e: float):
        if self.is_poly() and float(e).is_integer() and e >= 0:
            return _Expr(np.polynomial.polynomial.polypow(self.poly, int(e)))
        sp = self.single_power()
        if sp is None:
            raise DomainError("only constants and (a + b z)^s style bases may be raised to non-integer powers")
        c, zeta, s = sp
        if s == 0:
            return _Expr.const(complex(c) ** e)
        if abs(zeta) > 1.0 + 1e-15:
            raise DomainError("singularity inside the disk")
        return _Expr(pows={(zeta, s * e): complex(c) ** e})._normalise()

    def log(self):
        sp = self.single_power()
        if sp is None or sp[2] not in (0.0, -1.0):
            raise DomainError("log argument must be of the form a + b z")
        c, zeta, s = sp
        if s == 0:
            return _Expr.const(cmath.log(c))
        if abs(zeta) > 1.0 + 1e-15:
            raise DomainError("singularity inside the disk")
        # log(c (1 - conj(zeta) z)) = log c - (-log(1 - conj(zeta) z))
        return _Expr([cmath.log(c)], logs={zeta: -1.0})

    def to_fn(self) -> AnalyticFn:
        ks = list(self.pows.items())
        ls = list(self.logs.items())
        return AnalyticFn(poly=self.poly,
                          kern_c=[c for _, c in ks] + [c for _, c in ls],
                          kern_zeta=[k[0] for k, _ in ks] + [z for z, _ in ls],
                          kern_s=[k[1] for k, _ in ks] + [0.0] * len(ls),
                          kern_log=[False] * len(ks) + [True] * len(ls))


class _Parser:
    def parse(self, expr: str) -> AnalyticFn:
        try:
            tree = ast.parse(expr.replace("^", "**"), mode="eval")
        except SyntaxError as exc:
            raise DomainError(f"cannot parse {expr!r}: {exc.msg}") from None
        return self.visit(tree.body).to_fn()

    def visit(self, node) -> _Expr:
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float, complex)):
            return _Expr.const(node.value)
        if isinstance(node, ast.Name):
            if node.id == "z":
                return _Expr([0j, 1.0])
            if node.id in ("j", "i"):
                return _Expr.const(1j)
            if node.id == "pi":
                return _Expr.const(math.pi)
            raise DomainError(f"unknown name {node.id!r}")
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = self.visit(node.operand)
            return v.scale(-1.0) if isinstance(node.op, ast.USub) else v
        if isinstance(node, ast.BinOp):
            a = self.visit(node.left)
            if isinstance(node.op, ast.Pow):
                e = self.visit(node.right)
                if not e.is_poly() or np.trim_zeros(e.poly, "b").size > 1:
                    raise DomainError("exponents must be constants")
                ev = complex(e.poly[0]) if e.poly.size else 0j
                if ev.imag:
                    raise DomainError("exponents must be real")
                return a.power(ev.real)
            b = self.visit(node.right)
            if isinstance(node.op, ast.Add):
                return a.add(b)
            if isinstance(node.op, ast.Sub):
                return a.add(b, -1.0)
            if isinstance(node.op, ast.Mult):
                return a.mul(b)
            if isinstance(node.op, ast.Div):
                return a.mul(b.power(-1.0))
        if isinstance(node, ast.Call) and isinstance(node.func, ast.Name) and len(node.args) == 1:
            arg = self.visit(node.args[0])
            if node.func.id == "log":
                return arg.log()
            if node.func.id == "sqrt":
                return arg.power(0.5)
        raise DomainError(f"unsupported expression element {ast.dump(node)[:40]}")


# -- test functions and growth ----------------------------------------------------------


def _report(w: RadialWeight, report: DoublingReport | None) -> DoublingReport:
    return classify_doubling(w) if report is None else report


def test_function(z: complex, w: RadialWeight, q: float, gamma: float,
                  report: DoublingReport | None = None) -> AnalyticFn:
    """``u -> omega_hat(z)^(-1/q) ((1-|z|) / (1 - conj(z) u))^gamma`` as a single atom."""
    rep = _report(w, report)
    need = max(rep.gamma0 / q, 1.0 / q)
    if not gamma > need:
        raise ParameterDomainError(f"test_function needs gamma > {need:.4g}")
    z = complex(z)
    if abs(z) >= 1.0:
        raise DomainError("test_function needs |z| < 1")
    scale = float(w.tail(abs(z))) ** (-1.0 / q)
    return AnalyticFn.atom_sum([1.0], [z], gamma, scale).with_label(f"f_z z={z:.4g}")


test_function.__test__ = False  # not a pytest test


def growth_check(f: AnalyticFn, w: RadialWeight, q: float, m: int = 0, zgrid=None, *,
                 norm: float | None = None, levels: int = 10, angles: int = 8, tol: float = 1e-6) -> RatioBand:
    """Band of ``|f^(m)(z)| omega_hat(z)^(1/q) (1-|z|)^m / ||f||`` over the grid.

    ``||f||`` is the T-infinity norm against ``omega dA`` unless given.
    """
    from .measures import DiskMeasure, tent_infty_norm

    if norm is None:
        norm = tent_infty_norm(f, DiskMeasure.weighted_area(w), q, tol=tol)
    pts = dyadic_points(levels, angles, include_origin=True) if zgrid is None else _arr(zgrid)
    r = np.abs(pts)
    vals = np.abs(f.eval(pts, m)) * np.asarray(w.tail(r)) ** (1.0 / q) * (1.0 - r) ** m / norm
    return _band(vals, pts, f"growth m={m} q={q}", {"levels": levels, "angles": angles, "norm": norm},
                 one_sided=True)


# -- atomic decomposition ----------------------------------------------------------


@dataclass(frozen=True, eq=False)
class AtomCoefficients:
    lattice: Lattice
    values: np.ndarray
    gamma: float
    q: float
    weight: RadialWeight

    def __post_init__(self):
        v = _arr(self.values)
        object.__setattr__(self, "values", v)
        if v.size != len(self.lattice):
            raise DomainError(f"{v.size} coefficients for a lattice of {len(self.lattice)} points")
        if self.q <= 0:
            raise DomainError("q must be positive")

    def validate(self, report: DoublingReport | None = None) -> None:
        rep = _report(self.weight, report)
        need = (1.0 + rep.gamma0) * max(1.0, 1.0 / self.q)
        if not self.gamma > need:
            raise ParameterDomainError(f"atoms need gamma > (1+gamma0) max(1,1/q) = {need:.4g}")

    def with_values(self, values) -> "AtomCoefficients":
        return AtomCoefficients(self.lattice, values, self.gamma, self.q, self.weight)

    def to_dict(self, include_values: bool = True) -> dict:
        out = {"gamma": self.gamma, "q": self.q, "weight": self.weight.to_dict(), "n": int(self.values.size)}
        if include_values:
            out["values"] = jsonable(self.values)
        return out


def default_gamma(report: DoublingReport, q: float) -> float:
    return 1.5 * (1.0 + report.gamma0) * max(1.0, 1.0 / q)


def synthesize_atoms(coeffs: AtomCoefficients, report: DoublingReport | None = None,
                     validate: bool = True) -> AnalyticFn:
    """``sum_k c_k (1-|a_k|)^gamma omega_hat(a_k)^(-1/q) (1 - conj(a_k) z)^(-gamma)``; zero coefficients dropped."""
    if validate:
        coeffs.validate(report)
    keep = coeffs.values != 0
    pts = coeffs.lattice.points[keep]
    scale = np.asarray(coeffs.weight.tail(np.abs(pts)), dtype=float) ** (-1.0 / coeffs.q)
    return AnalyticFn.atom_sum(coeffs.values[keep], pts, coeffs.gamma, scale).with_label("atom synthesis")


def reproducing_weights(lattice: Lattice, gamma: float) -> np.ndarray:
    """``W_k = (gamma-1)/pi * int_{D_k} (1-|u|^2)^(gamma-2) dA``."""
    if gamma <= 1.0:
        raise ParameterDomainError("the reproducing weights need gamma > 1")
    return (gamma - 1.0) / math.pi * lattice.cell_areas(gamma - 2.0)


class RingOperator:
    """Fast evaluation of ``S`` at the lattice points through per-ring FFTs.

    With ``a_k = rho_i e^{i(phi_i + 2 pi l / n_i)}`` on ring ``i``,
    ``S g(z) = sum_n binom(n+gamma-1, n) z^n M_n`` where
    ``M_n = sum_i rho_i^n e^{-i n phi_i} F_i[n mod n_i]`` and ``F_i`` is the
    DFT of the weighted values on ring ``i``.  Evaluating on ring ``j`` folds
    the series modulo ``n_j`` and applies an inverse DFT.
    """

    def __init__(self, lattice: Lattice, gamma: float, eps: float = 1e-16):
        if lattice.rings is None:
            raise DomainError("the fast operator needs a ring-structured lattice")
        self.lattice = lattice
        self.gamma = float(gamma)
        self.weights = reproducing_weights(lattice, gamma)
        self.rings = lattice.rings
        rmax = max(g.rho for g in self.rings)
        # truncate the Taylor series where binom(n+gamma-1, n) rmax^(2n) < eps
        x = rmax * rmax
        n = 16
        while self._log_coef(n) + n * math.log(x) > math.log(eps) or n < 8 * max(g.count for g in self.rings[:2]):
            n = int(n * 1.25) + 1
            if n > 10_000_000:
                raise NonConvergenceError("Taylor truncation too long", None)
        self.nmax = n
        ns = np.arange(n)
        self.coef = np.exp(special.gammaln(ns + self.gamma) - special.gammaln(self.gamma) - special.gammaln(ns + 1.0))
        self.offsets = np.cumsum([0] + [g.count for g in self.rings])
        self._ns = ns
        self._phase = [np.exp(-1j * ns * g.phase) * _powers(g.rho, ns) for g in self.rings]

    def _log_coef(self, n: int) -> float:
        return special.gammaln(n + self.gamma) - special.gammaln(self.gamma) - special.gammaln(n + 1.0)

    def moments(self, values: np.ndarray) -> np.ndarray:
        """``M_n = sum_k W_k v_k conj(a_k)^n`` for ``n < nmax``."""
        u = self.weights * values
        M = np.zeros(self.nmax, dtype=complex)
        for i, g in enumerate(self.rings):
            F = np.fft.fft(u[self.offsets[i]:self.offsets[i + 1]])
            M += self._phase[i] * F[self._ns % g.count]
        return M

    def apply(self, values) -> np.ndarray:
        values = _arr(values)
        A = self.coef * self.moments(values)
        out = np.empty(values.size, dtype=complex)
        for j, g in enumerate(self.rings):
            Aj = A * np.conj(self._phase[j])  # rho_j^n e^{+i n phi_j}
            pad = (-Aj.size) % g.count
            B = np.concatenate([Aj, np.zeros(pad, dtype=complex)]).reshape(-1, g.count).sum(axis=0)
            out[self.offsets[j]:self.offsets[j + 1]] = g.count * np.fft.ifft(B)
        return out

    def apply_dense(self, values, z) -> np.ndarray:
        """``S g`` at arbitrary points by direct summation (reference path)."""
        values = _arr(values)
        z = _arr(z)
        ca = np.conj(self.lattice.points)
        b = self.weights * values
        out = np.empty(z.size, dtype=complex)
        step = max(1, CHUNK // max(1, ca.size))
        for i in range(0, z.size, step):
            out[i:i + step] = (b[None, :] * (1.0 - z[i:i + step, None] * ca[None, :]) ** -self.gamma).sum(axis=1)
        return out


def _powers(rho: float, ns: np.ndarray) -> np.ndarray:
    if rho == 0.0:
        return (ns == 0).astype(float)
    return np.exp(ns * math.log(rho))


@dataclass
class AnalysisResult:
    coeffs: AtomCoefficients
    residuals: list[float]
    converged: bool
    iterations: int
    g_values: np.ndarray = field(repr=False)

    @property
    def monotone(self) -> bool:
        r = self.residuals
        return all(b < a for a, b in zip(r, r[1:]))

    def to_dict(self, include_values: bool = False) -> dict:
        return {"residual_trace": self.residuals, "converged": self.converged, "iterations": self.iterations,
                "monotone": self.monotone, "coefficients": self.coeffs.to_dict(include_values)}


def _residual_norm(lattice: Lattice, res: np.ndarray, hat_q: np.ndarray, q: float, grid) -> float:
    from .measures import seq_tent_norm

    return seq_tent_norm(lattice, res * hat_q, q, grid)


def analyze_atoms(f: AnalyticFn, lattice: Lattice, gamma: float, w: RadialWeight, q: float,
                  max_iter: int = 20, tol: float = 1e-8, *, report: DoublingReport | None = None,
                  grid=None, validate: bool = True) -> AnalysisResult:
    """Coefficients ``c`` with ``synthesize_atoms(c) ~ f`` by Neumann iteration for ``S``.

    Starting from ``g = f`` on the lattice, ``g <- g + (f - S g)`` is repeated
    until the discrete tent norm of the residual ``f - S g`` falls below
    ``tol`` times that of ``f``, stagnates, or ``max_iter`` is reached.  The
    residual norm is the sequence tent norm of ``(f - S g)(a_k) omega_hat(a_k)^(1/q)``.
    Non-convergence is reported in the result, not raised.
    """
    coeffs0 = AtomCoefficients(lattice, np.zeros(len(lattice)), gamma, q, w)
    if validate:
        coeffs0.validate(report)
    op = RingOperator(lattice, gamma)
    pts = lattice.points
    r = np.abs(pts)
    hat = np.asarray(w.tail(r), dtype=float)
    hat_q = hat ** (1.0 / q)
    fv = _arr(f(pts))
    fnorm = _residual_norm(lattice, fv, hat_q, q, grid)
    g = fv.copy()
    residuals: list[float] = []
    converged = fnorm == 0.0
    it = 0
    if not converged:
        for it in range(1, max_iter + 1):
            res = fv - op.apply(g)
            rel = _residual_norm(lattice, res, hat_q, q, grid) / fnorm
            residuals.append(rel)
            if rel < tol:
                converged = True
                break
            if len(residuals) >= 3 and rel >= residuals[-3]:
                break
            g = g + res
    c = g * hat_q * (1.0 - r) ** (-gamma) * op.weights
    if fnorm == 0.0:
        c = np.zeros_like(g)
    return AnalysisResult(coeffs0.with_values(c), residuals, converged, it, g)


def random_sign_probe(coeffs: AtomCoefficients, seed: int) -> AnalyticFn:
    """Synthesis with each coefficient multiplied by an independent +-1 from ``default_rng(seed)``."""
    rng = np.random.default_rng(seed)
    signs = rng.choice(np.array([-1.0, 1.0]), size=coeffs.values.size)
    return synthesize_atoms(coeffs.with_values(coeffs.values * signs), validate=False)


# -- Volterra operator ----------------------------------------------------------------


def volterra_apply(g: AnalyticFn, f: AnalyticFn, z: complex, rtol: float = 1e-10) -> complex:
    """``int_0^z f(zeta) g'(zeta) d zeta`` along the segment ``[0, z]``."""
    z = complex(z)
    if abs(z) >= 1.0:
        raise DomainError("volterra_apply needs |z| < 1")
    if z == 0:
        return 0j

    def integrand(t):
        zeta = t * z
        v = f(zeta) * g.eval(zeta, 1) * z
        return np.array([v.real, v.imag])

    val, err = integrate.quad_vec(integrand, 0.0, 1.0, epsrel=rtol, epsabs=0.0, limit=400)
    if not np.all(np.isfinite(val)) or err > max(1e-8 * np.abs(val).max(), 1e-300) * 10:
        raise NonConvergenceError("Volterra quadrature failed", complex(val[0], val[1]), float(err))
    return complex(val[0], val[1])
