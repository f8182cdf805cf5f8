"""Command-line front end.

Every run is described by a :class:`RunConfig`; the config is echoed into
the JSON report so a run can be repeated from its own output with
``--config``.  Exit codes: 0 success, 2 configuration error, 3 numerical
non-convergence, 4 precondition (weight class / parameter domain) failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import asdict, dataclass, field
from typing import Any, Sequence

import numpy as np

from . import certify, quad
from ._io import jsonable
from ._parallel import set_threads
from ._svg import loglog_svg
from .analytic import (AnalyticFn, AtomCoefficients, analyze_atoms, default_gamma, synthesize_atoms)
from .diskgeom import build_lattice
from .errors import DomainError, NonConvergenceError, ParameterDomainError, TentlabError
from .measures import (DiskMeasure, SupGrid, kernel_carleson_norm, seq_tent_norm, tent_infty,
                       tent_pq_norm, vanishing_carleson_test)
from .weights import RadialWeight, classify_doubling

EXIT_OK, EXIT_CONFIG, EXIT_NONCONV, EXIT_PRECOND = 0, 2, 3, 4

COMMANDS = ("classify-weight", "lattice", "carleson", "tent-norm", "fr-check", "gfr-check", "atoms synth",
            "atoms analyze", "embed certify", "embed compact", "embed probe", "lp check", "volterra certify",
            "volterra compact")

PARAM_DEFAULTS: dict[str, Any] = {
    "p": 2.0, "q": 2.0, "r": 0.2, "s": 1.0, "m": 1, "alpha_fr": 0.0, "gamma": None, "delta": 0.0, "case": "part1",
    "lattice_r": 0.2, "eps": 2.0**-8, "nmax": 200, "coeffs": "ones", "max_iter": 20, "atol": 1e-8,
    "samples": 100, "sweep": False, "tent_pq": False, "with_points": False, "levels": 5,
}


class ConfigError(TentlabError):
    pass


@dataclass
class RunConfig:
    command: str
    weight_spec: dict = field(default_factory=lambda: {"kind": "standard", "alpha": 0.0})
    measure_spec: dict | None = None
    function_spec: Any = None
    params: dict = field(default_factory=dict)
    grid: dict = field(default_factory=lambda: {"J": 10, "angles": 8, "tol": 1e-6})
    output: str | None = None
    format: str = "json"
    csv: str | None = None
    plot: str | None = None
    seed: int = 0

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}")
        if self.format not in ("json", "csv"):
            raise ConfigError("format must be json or csv")
        unknown = set(self.params) - set(PARAM_DEFAULTS)
        if unknown:
            raise ConfigError(f"unknown parameters {sorted(unknown)}")
        full = dict(PARAM_DEFAULTS)
        full.update(self.params)
        self.params = full
        g = {"J": 10, "angles": 8, "tol": 1e-6}
        g.update(self.grid)
        self.grid = g

    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        known = {"command", "weight_spec", "measure_spec", "function_spec", "params", "grid", "output", "format",
                 "csv", "plot", "seed"}
        extra = set(d) - known
        if extra:
            raise ConfigError(f"unknown config keys {sorted(extra)}")
        if "command" not in d:
            raise ConfigError("config needs a command")
        return cls(**d)

    def to_dict(self) -> dict:
        return asdict(self)

    @property
    def sup_grid(self) -> SupGrid:
        return SupGrid(int(self.grid["J"]), int(self.grid["angles"]))


# -- building inputs -----------------------------------------------------------------


def _weight(cfg: RunConfig) -> RadialWeight:
    return RadialWeight.from_spec(cfg.weight_spec)


def _measure(cfg: RunConfig, w: RadialWeight) -> DiskMeasure:
    spec = cfg.measure_spec
    if spec is None:
        return DiskMeasure.weighted_area(w)
    if spec.get("kind") == "lattice":
        lat = build_lattice(float(spec.get("r", 0.2)), float(spec.get("eps", 2.0**-12)))
        return DiskMeasure.lattice_masses(lat, w if spec.get("weighted", False) else None)
    if spec.get("kind") == "weighted_area" and "weight" not in spec:
        spec = dict(spec, weight=cfg.weight_spec)
    return DiskMeasure.from_spec(spec)


def _function(cfg: RunConfig) -> AnalyticFn:
    if cfg.function_spec is None:
        raise ConfigError(f"{cfg.command} needs a function (--f / --g)")
    return AnalyticFn.from_spec(cfg.function_spec)


def _sample_points(n: int, seed: int, rmax: float = 0.9) -> np.ndarray:
    rng = np.random.default_rng(seed)
    return np.sqrt(rng.uniform(0, rmax**2, n)) * np.exp(2j * np.pi * rng.uniform(size=n))


# -- commands -------------------------------------------------------------------------


def _levels_trace(values: Sequence[float], label: str) -> list[dict]:
    return [{"level": j, "one_minus_abs_z": 2.0**-j, label: float(v)} for j, v in enumerate(values)]


def _run(cfg: RunConfig) -> tuple[dict, list[dict], str]:
    """Report, CSV/plot trace rows and the traced column name."""
    P = cfg.params
    grid = cfg.sup_grid
    tol = float(cfg.grid["tol"])
    cmd = cfg.command
    if cmd == "fr-check":
        band = quad.fr_check(float(P["alpha_fr"]), float(P["s"]), tol=tol, levels=grid.levels,
                             angles=grid.angles_per_level)
        return band.to_dict(), band.trace, "ratio"
    w = _weight(cfg)
    if cmd == "classify-weight":
        return classify_doubling(w).to_dict(), [], "value"
    if cmd == "lattice":
        lat = build_lattice(float(P["lattice_r"]), float(P["eps"]))
        d = lat.to_dict(include_rings=False)
        if not P["with_points"]:
            d.pop("points", None)
        d["count"] = len(lat)
        rows = [{"ring": k, "one_minus_abs_z": 1.0 - rg.rho, "count": rg.count} for k, rg in enumerate(lat.rings or ())]
        return d, rows, "count"
    if cmd == "carleson":
        mu = _measure(cfg, w)
        if P["s"] != 1.0:
            res = kernel_carleson_norm(mu, float(P["s"]), grid, tol)
            d = {"kernel_carleson": res.to_dict(), "s": P["s"]}
            return d, _levels_trace(res.levels, "ratio"), "ratio"
        t = vanishing_carleson_test(mu, grid, tol)
        return {"carleson": t.sup.to_dict(), "vanishing": t.verdict.value}, _levels_trace(t.levels, "ratio"), "ratio"
    if cmd == "tent-norm":
        f = _function(cfg)
        mu = _measure(cfg, w)
        q = float(P["q"])
        res = tent_infty(f, mu, q, grid, tol)
        d = {"tent_infty_norm": res.value ** (1.0 / q), "argmax": res.argmax, "q": q}
        if P["tent_pq"]:
            d["tent_pq_norm"] = tent_pq_norm(f, mu, float(P["p"]), q, tol=max(tol, 1e-5))
            d["p"] = float(P["p"])
        return d, _levels_trace(res.levels ** (1.0 / q), "norm"), "norm"
    if cmd == "gfr-check":
        gamma = 1.0 if P["gamma"] is None else float(P["gamma"])
        band = quad.gfr_check(w, float(P["s"]), gamma, float(P["delta"]), str(P["case"]), m=int(P["m"]),
                              tol=max(tol, 1e-6), levels=int(P["levels"]))
        return band.to_dict(), band.trace, "ratio"
    if cmd in ("atoms synth", "atoms analyze"):
        return _atoms(cfg, w, grid)
    if cmd.startswith("embed"):
        mu = _measure(cfg, w)
        p, q, r = float(P["p"]), float(P["q"]), float(P["r"])
        if cmd == "embed probe":
            res = certify.embed_lower_bound_probe(w, p, q, mu, seeds=(cfg.seed, cfg.seed + 1, cfg.seed + 2))
            return res.to_dict(), res.ratios, "ratio"
        fn = certify.embed_certify if cmd == "embed certify" else certify.embed_compact_certify
        rep = fn(w, p, q, mu, r, grid)
        d = rep.to_dict()
        if P["sweep"]:
            d["sweep"] = certify.embed_sweep(w, p, q, mu, grid=grid)
        return d, _levels_trace(rep.trend, "value"), "value"
    if cmd == "lp check":
        rep = certify.lp_equivalence_check(w, float(P["q"]), int(P["m"]), nmax=int(P["nmax"]), grid=grid, tol=tol)
        d = rep.to_dict()
        d["moment_band"].pop("trace", None)
        ns = np.arange(1, len(rep.moment_ratios) + 1)
        rows = [{"n": int(n), "one_minus_abs_z": 1.0 / n, "moment_ratio": v} for n, v in zip(ns, rep.moment_ratios)]
        return d, rows, "moment_ratio"
    if cmd.startswith("volterra"):
        g = _function(cfg)
        fn = certify.volterra_certify if cmd == "volterra certify" else certify.volterra_compact_certify
        rep = fn(g, w, float(P["p"]), float(P["q"]), grid)
        return rep.to_dict(), _levels_trace(rep.trend, "value"), "value"
    raise ConfigError(f"unhandled command {cmd!r}")


def _atoms(cfg: RunConfig, w: RadialWeight, grid: SupGrid):
    P = cfg.params
    q = float(P["q"])
    rep = classify_doubling(w)
    gamma = default_gamma(rep, q) if P["gamma"] is None else float(P["gamma"])
    pts = _sample_points(int(P["samples"]), cfg.seed)
    if cfg.command == "atoms synth":
        lat = build_lattice(float(P["lattice_r"]), float(P["eps"]))
        if P["coeffs"] == "ones":
            c = np.ones(len(lat))
        elif P["coeffs"] == "random":
            c = np.random.default_rng(cfg.seed).choice([-1.0, 1.0], size=len(lat))
        else:
            c = np.asarray(P["coeffs"], dtype=complex)
            if c.size != len(lat):
                raise ConfigError(f"coefficient list has {c.size} entries, lattice has {len(lat)}")
        coeffs = AtomCoefficients(lat, c, gamma, q, w)
        f = synthesize_atoms(coeffs, rep)
        vals = f(pts)
        d = {"gamma": gamma, "q": q, "lattice_size": len(lat), "seq_tent_norm": seq_tent_norm(lat, c, q, grid),
             "sample_max_abs": float(np.max(np.abs(vals)))}
        rows = [{"z_re": float(z.real), "z_im": float(z.imag), "one_minus_abs_z": float(1 - abs(z)),
                 "abs_f": float(abs(v))} for z, v in zip(pts, vals)]
        return d, rows, "abs_f"
    f = _function(cfg)
    lat = build_lattice(float(P["lattice_r"]), float(P["eps"]))
    res = analyze_atoms(f, lat, gamma, w, q, int(P["max_iter"]), float(P["atol"]), report=rep)
    if not res.converged and not res.residuals:
        raise NonConvergenceError("analysis produced no iterate")
    back = synthesize_atoms(res.coeffs, rep)(pts)
    ref = f(pts)
    err = float(np.max(np.abs(back - ref)) / max(np.max(np.abs(ref)), 1e-300))
    d = res.to_dict()
    d.update({"gamma": gamma, "lattice_size": len(lat), "round_trip_rel_error": err, "samples": int(P["samples"])})
    rows = [{"iteration": k, "one_minus_abs_z": 2.0**-k, "residual": v} for k, v in enumerate(res.residuals)]
    return d, rows, "residual"


# -- output ---------------------------------------------------------------------------


def _csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    if not rows:
        return ""
    keys = list(rows[0].keys())
    wr = csv.DictWriter(buf, fieldnames=keys, lineterminator="\n", extrasaction="ignore")
    wr.writeheader()
    for row in rows:
        wr.writerow({k: _cell(row.get(k)) for k in keys})
    return buf.getvalue()


def _cell(v):
    v = jsonable(v)
    return json.dumps(v) if isinstance(v, list) else v


def run(cfg: RunConfig) -> tuple[int, dict]:
    """Execute ``cfg``; write the requested artifacts and return ``(exit status, document)``."""
    try:
        report, rows, column = _run(cfg)
        status = EXIT_OK
    except NonConvergenceError as exc:
        report, rows, column, status = {"error": str(exc), "partial": exc.partial}, [], "value", EXIT_NONCONV
    except ParameterDomainError as exc:
        report, rows, column, status = {"error": str(exc)}, [], "value", EXIT_PRECOND
    except (ConfigError, DomainError, KeyError, TypeError, ValueError, SyntaxError) as exc:
        report, rows, column, status = {"error": f"{type(exc).__name__}: {exc}"}, [], "value", EXIT_CONFIG
    doc = {"config": cfg.to_dict(), "report": jsonable(report), "exit_status": status}
    text = json.dumps(doc, indent=2, sort_keys=True) + "\n" if cfg.format == "json" else _csv(rows)
    if cfg.output:
        with open(cfg.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if cfg.csv and status == EXIT_OK:
        with open(cfg.csv, "w", encoding="utf-8") as fh:
            fh.write(_csv(rows))
    if cfg.plot and status == EXIT_OK:
        xs = [float(r.get("one_minus_abs_z", np.nan)) for r in rows]
        ys = [float(jsonable(r.get(column, np.nan))) if not isinstance(r.get(column), str) else np.nan for r in rows]
        with open(cfg.plot, "w", encoding="utf-8") as fh:
            fh.write(loglog_svg(xs, ys, cfg.command, ylabel=column))
    return status, doc


# -- argument parsing ---------------------------------------------------------------------


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON RunConfig; explicit flags override it")
    p.add_argument("--threads", type=int, help="worker threads (default: TENTLAB_THREADS or CPU count)")
    p.add_argument("--output", help="report path (default: stdout)")
    p.add_argument("--format", choices=("json", "csv"))
    p.add_argument("--csv", help="write the grid trace as CSV")
    p.add_argument("--plot", help="write an SVG plot of the trace against 1-|z|")
    p.add_argument("--seed", type=int)
    p.add_argument("--J", type=int, help="dyadic levels of the sup grid")
    p.add_argument("--angles", type=int, help="angles per level of the sup grid")
    p.add_argument("--tol", type=float, help="quadrature tolerance")
    p.add_argument("--alpha", type=float, help="standard weight (1-r)^alpha")
    p.add_argument("--weight", help="weight JSON")
    p.add_argument("--measure", help="measure JSON")


def _real(text: str) -> float:
    """Floats, plus ``2^-k`` / ``2**-k`` shorthand."""
    t = text.replace("**", "^")
    if "^" in t:
        b, e = t.split("^", 1)
        return float(b) ** float(e)
    return float(t)


_PARAM_FLAGS = {
    "p": ("--p", _real), "q": ("--q", _real), "r": ("--r", _real), "s": ("--s", _real), "m": ("--m", int),
    "gamma": ("--gamma", _real), "delta": ("--delta", _real), "case": ("--case", str),
    "lattice_r": ("--lattice-r", _real), "eps": ("--eps", _real), "nmax": ("--nmax", int),
    "max_iter": ("--max-iter", int), "atol": ("--atol", _real), "samples": ("--samples", int),
    "levels": ("--levels", int),
}


def build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(prog="tentlab", description="Tent-space and doubling-weight numerics.")
    sub = top.add_subparsers(dest="cmd", required=True)

    def leaf(parent, name, params, fn_flag=None, extra=None):
        p = parent.add_parser(name)
        _common(p)
        for k in params:
            flag, typ = _PARAM_FLAGS[k]
            p.add_argument(flag, dest=f"param_{k}", type=typ)
        if fn_flag:
            p.add_argument(fn_flag, dest="function", help="function expression or JSON")
        for args, kw in extra or ():
            p.add_argument(*args, **kw)
        return p

    leaf(sub, "classify-weight", [])
    leaf(sub, "lattice", ["lattice_r", "eps"], extra=[(("--with-points",), {"action": "store_true",
                                                                           "dest": "param_with_points"})])
    leaf(sub, "carleson", ["s"])
    leaf(sub, "tent-norm", ["q", "p"], "--f", extra=[(("--tent-pq",), {"action": "store_true", "dest": "param_tent_pq",
                                                                     "help": "also compute the T^p_q norm"})])
    leaf(sub, "fr-check", ["s"])
    leaf(sub, "gfr-check", ["s", "gamma", "delta", "case", "m", "levels"])
    atoms = sub.add_parser("atoms").add_subparsers(dest="sub", required=True)
    leaf(atoms, "synth", ["q", "gamma", "lattice_r", "eps", "samples"],
         extra=[(("--coeffs",), {"dest": "param_coeffs", "help": "ones, random or a JSON list"})])
    leaf(atoms, "analyze", ["q", "gamma", "lattice_r", "eps", "max_iter", "atol", "samples"], "--f")
    embed = sub.add_parser("embed").add_subparsers(dest="sub", required=True)
    for name in ("certify", "compact", "probe"):
        leaf(embed, name, ["p", "q", "r"], extra=[(("--sweep",), {"action": "store_true", "dest": "param_sweep"})])
    lp = sub.add_parser("lp").add_subparsers(dest="sub", required=True)
    leaf(lp, "check", ["q", "m", "nmax"])
    vol = sub.add_parser("volterra").add_subparsers(dest="sub", required=True)
    for name in ("certify", "compact"):
        leaf(vol, name, ["p", "q"], "--g")
    return top


def _json_arg(text: str, what: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{what} is not valid JSON: {exc}") from exc


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    command = ns.cmd if getattr(ns, "sub", None) is None else f"{ns.cmd} {ns.sub}"
    base: dict[str, Any] = {}
    if ns.config:
        try:
            with open(ns.config, encoding="utf-8") as fh:
                base = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {ns.config}: {exc}") from exc
        base.pop("exit_status", None)
        if "config" in base and "command" not in base:
            base = base["config"]  # a previous report
    base["command"] = command
    params = dict(base.get("params", {}))
    for k, v in vars(ns).items():
        if k.startswith("param_") and v not in (None, False):
            params[k[6:]] = v
    if command == "fr-check" and ns.alpha is not None:
        params["alpha_fr"] = ns.alpha
    if command == "atoms synth" and params.get("coeffs") not in (None, "ones", "random"):
        if isinstance(params["coeffs"], str):
            params["coeffs"] = _json_arg(params["coeffs"], "--coeffs")
    if command == "atoms analyze" and "params" not in base:
        params.setdefault("lattice_r", 0.1)
        params.setdefault("eps", 2.0**-10)
    base["params"] = params
    if ns.weight:
        base["weight_spec"] = _json_arg(ns.weight, "--weight")
    elif ns.alpha is not None:
        base["weight_spec"] = {"kind": "standard", "alpha": ns.alpha}
    if ns.measure:
        base["measure_spec"] = _json_arg(ns.measure, "--measure")
    fn = getattr(ns, "function", None)
    if fn is not None:
        base["function_spec"] = _json_arg(fn, "function") if fn.lstrip().startswith("{") else fn
    grid = dict(base.get("grid", {}))
    for k in ("J", "angles", "tol"):
        if getattr(ns, k) is not None:
            grid[k] = getattr(ns, k)
    base["grid"] = grid
    for k in ("output", "format", "csv", "plot", "seed"):
        if getattr(ns, k) is not None:
            base[k] = getattr(ns, k)
    return RunConfig.from_dict(base)


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    set_threads(ns.threads)
    try:
        cfg = config_from_args(ns)
    except (ConfigError, TypeError, ValueError) as exc:
        print(f"tentlab: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    status, doc = run(cfg)
    if status != EXIT_OK:
        print(f"tentlab: {doc['report'].get('error', 'failed')}", file=sys.stderr)
    return status


if __name__ == "__main__":
    sys.exit(main())
