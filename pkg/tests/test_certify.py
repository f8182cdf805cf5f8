import math

import numpy as np
import pytest

from tentlab._trend import Verdict
from tentlab.analytic import AnalyticFn, test_function as make_test_function
from tentlab.certify import (CertReport, embed_certify, embed_compact_certify, embed_lower_bound_probe, embed_sweep,
                             g_mu_r, lp0_check, lp_equivalence_check, lp_norm, monomial_moment_ratio, mu_g,
                             volterra_certify, volterra_compact_certify)
from tentlab.diskgeom import build_lattice
from tentlab.errors import DomainError, WeightClassError
from tentlab.measures import DiskMeasure, SupGrid
from tentlab.weights import RadialWeight, classify_doubling

W0 = RadialWeight.standard(0.0)
W1 = RadialWeight.standard(1.0)
GRID = SupGrid(8, 4)


@pytest.fixture(scope="module")
def rep0():
    return classify_doubling(W0)


def test_local_mass_ratio_origin():
    assert g_mu_r(DiskMeasure.area(), W0, 2, 2, 0.2, 0) == pytest.approx(0.2 * math.sqrt(math.pi), rel=1e-9)
    assert g_mu_r(DiskMeasure.zero(), W0, 2, 2, 0.2, 0.5) == 0.0


def test_local_mass_ratio_lattice_point_count():
    lat = build_lattice(0.2, 2.0**-8)
    mu = DiskMeasure.lattice_masses(lat)
    a = lat.points
    for z in (0.0, 0.5, 0.9j, -0.97 + 0.01j):
        d = np.abs(a - z) / np.abs(1 - np.conj(z) * a)
        mass = float((1 - np.abs(a[d < 0.2])).sum())
        expect = mass**0.5 / ((1 - abs(z)) ** 0.5 * (1 - abs(z)) ** 0.5)
        assert g_mu_r(mu, W0, 2, 2, 0.2, z) == pytest.approx(expect, rel=1e-12)


def test_identity_embedding_bounded(rep0):
    for w in (W0, W1):
        rep = classify_doubling(w)
        res = embed_certify(w, 2, 2, DiskMeasure.weighted_area(w), grid=GRID, report=rep)
        assert res.verdict is Verdict.BOUNDED
        assert res.estimate == pytest.approx(1.0, rel=1e-6)
        assert res.condition_used and res.theorem_ref


def test_zero_measure(rep0):
    res = embed_certify(W0, 2, 2, DiskMeasure.zero(), grid=GRID, report=rep0)
    assert res.verdict is Verdict.BOUNDED and res.estimate == 0.0
    assert embed_lower_bound_probe(W0, 2, 2, DiskMeasure.zero(), report=rep0).value == 0.0


def test_compact_support(rep0):
    mu = DiskMeasure.area(rmax=0.5)
    assert embed_compact_certify(W0, 2, 2, mu, grid=GRID, report=rep0).verdict is Verdict.COMPACT


def test_compactness_verdicts(rep0):
    mu = DiskMeasure.weighted_area(W0, 0.5)
    assert embed_compact_certify(W0, 2, 2, mu, report=rep0).verdict is Verdict.COMPACT
    mu = DiskMeasure.weighted_area(W0)
    assert embed_compact_certify(W0, 2, 2, mu, report=rep0).verdict is Verdict.NON_COMPACT


@pytest.mark.parametrize("p, q", [(2, 2), (1, 2), (4, 2)])
def test_homogeneity(rep0, p, q):
    mu = DiskMeasure.weighted_area(W0, 0.5)
    a = embed_certify(W0, p, q, mu, grid=GRID, report=rep0)
    b = embed_certify(W0, p, q, 3.0 * mu, grid=GRID, report=rep0)
    assert b.verdict is a.verdict
    assert b.estimate == pytest.approx(3.0 ** (1 / q) * a.estimate, rel=1e-6)


@pytest.mark.parametrize("p, q", [(2, 2), (4, 2)])
def test_monotone_in_measure(rep0, p, q):
    small = embed_certify(W0, p, q, DiskMeasure.weighted_area(W0, 0.5), grid=GRID, report=rep0)
    big = embed_certify(W0, p, q, DiskMeasure.weighted_area(W0), grid=GRID, report=rep0)
    assert small.estimate <= big.estimate * (1 + 1e-9)


def test_p_greater_than_q(rep0):
    res = embed_certify(W0, 4, 2, DiskMeasure.weighted_area(W0), grid=GRID, report=rep0)
    assert res.verdict is Verdict.BOUNDED and math.isfinite(res.estimate)
    assert res.details["exponent"] == pytest.approx(4.0)


def test_probe_scaling(rep0):
    mu = DiskMeasure.weighted_area(W0, 0.5)
    grid = SupGrid(5, 4)
    a = embed_lower_bound_probe(W0, 2, 2, mu, seeds=(), grid=grid, report=rep0)
    b = embed_lower_bound_probe(W0, 2, 2, 2.0 * mu, seeds=(), grid=grid, report=rep0)
    assert b.value == pytest.approx(2**0.5 * a.value, rel=1e-6)


def test_probe_against_estimate(rep0):
    mu = DiskMeasure.weighted_area(W0)
    est = embed_certify(W0, 2, 2, mu, grid=GRID, report=rep0).estimate
    probe = embed_lower_bound_probe(W0, 2, 2, mu, seeds=(), grid=SupGrid(5, 4), report=rep0).value
    assert est / 50 <= probe <= est * (1 + 1e-6)


def test_sweep_invariance():
    for p, q in ((2, 2), (4, 2)):
        out = embed_sweep(W0, p, q, DiskMeasure.weighted_area(W0), grid=SupGrid(6, 4))
        assert out["invariant"], out


def test_guards(rep0):
    bad = RadialWeight.from_spec({"kind": "exp_inv"})
    with pytest.raises(WeightClassError):
        embed_certify(bad, 2, 2, DiskMeasure.area())
    with pytest.raises(DomainError):
        embed_certify(W0, 2, 2, DiskMeasure.area(), r=0.3, report=rep0)
    with pytest.raises(DomainError):
        embed_certify(W0, 0, 2, DiskMeasure.area(), report=rep0)


def test_report_forces_infinite_estimate():
    rep = CertReport(Verdict.UNBOUNDED, 12.0, "c", "t")
    assert rep.estimate == math.inf and rep.details["sampled_value"] == 12.0
    with pytest.raises(ValueError):
        CertReport(Verdict.BOUNDED, math.inf, "c", "t")
    d = CertReport(Verdict.BOUNDED, 1.0, "c", "t").to_dict()
    assert d["verdict"] == "bounded" and "norm_convention" in d


def test_lp_norm_closed_forms():
    grid = SupGrid(6, 4)
    assert lp_norm(AnalyticFn.constant(1.0), W0, 2, 1, grid) == pytest.approx(1.0, abs=1e-12)
    assert lp_norm(AnalyticFn.constant(-2.5), W0, 2, 1, grid) == pytest.approx(2.5, abs=1e-12)
    assert lp_norm(AnalyticFn.monomial(1), W0, 1, 1, grid) == pytest.approx(math.pi / 3, rel=1e-9)
    # z^2, m = 2: 2 (1-|z|)^2 has T^infty_1 norm 4 pi B(2, 3) = pi / 3
    assert lp_norm(AnalyticFn.monomial(2), W0, 1, 2, grid) == pytest.approx(math.pi / 3, rel=1e-9)


def test_lp_norm_maximiser_at_origin():
    from tentlab.certify import DampedDerivative
    from tentlab.measures import tent_infty

    res = tent_infty(DampedDerivative(AnalyticFn.monomial(1), 1), DiskMeasure.area(), 1.0, SupGrid(6, 4))
    assert res.argmax == 0


@pytest.mark.parametrize("n", [1, 2, 5, 20, 100, 200])
def test_moment_ratio_beta(n):
    assert monomial_moment_ratio(W0, 2, n) == pytest.approx(n / (2 * n + 1), rel=1e-6)


def test_lp_check_standard_weight_small_corpus():
    corpus = [AnalyticFn.monomial(n) for n in (1, 3, 10)] + [AnalyticFn.constant(2.0)]
    rep = lp_equivalence_check(W1, 2, corpus=corpus, nmax=60, grid=SupGrid(6, 4))
    assert rep.verified, rep.details
    assert np.isfinite(rep.function_band.hi) and rep.function_band.lo > 0


def test_lp0():
    grid = SupGrid(8, 4)
    assert lp0_check(AnalyticFn.polynomial([1, 2, 0, 1]), W0, 2, 1, grid)["verdict"] is Verdict.CONSISTENT
    assert lp0_check(AnalyticFn.constant(0.0), W0, 2, 1, grid)["verdict"] is Verdict.CONSISTENT
    f = make_test_function(0.5, W0, 2, 2.0)
    out = lp0_check(f, W0, 2, 1, grid)
    assert out["verdict"] is Verdict.CONSISTENT
    assert out["function"].verdict is Verdict.VANISHING


@pytest.mark.parametrize("alpha", [0.0, 1.0, 3.0])
def test_volterra_identity_symbol(alpha):
    w = RadialWeight.standard(alpha)
    res = volterra_certify(AnalyticFn.monomial(1), w, 2, 2)
    assert res.verdict is Verdict.BOUNDED
    assert res.estimate == 1.0
    assert res.details["mu_g_verdict"] == "bounded"


def test_volterra_verdicts(rep0):
    unb = volterra_certify(AnalyticFn.parse("z/(1-z)"), W0, 2, 2, report=rep0)
    assert unb.verdict is Verdict.UNBOUNDED and unb.details["mu_g_verdict"] == "unbounded"
    log = volterra_certify(AnalyticFn.parse("-log(1-z)"), W0, 2, 2, report=rep0)
    assert log.verdict is Verdict.BOUNDED and log.estimate <= 1.0 + 1e-12
    const = volterra_certify(AnalyticFn.constant(3.0), W0, 2, 2, report=rep0)
    assert const.verdict is Verdict.BOUNDED and const.estimate == 0.0


def test_volterra_compact(rep0):
    assert volterra_compact_certify(AnalyticFn.polynomial([0, 1, 0, 2]), W0, 2, 2, report=rep0).verdict \
        is Verdict.COMPACT
    assert volterra_compact_certify(AnalyticFn.parse("-log(1-z)"), W0, 2, 2, report=rep0).verdict \
        is Verdict.NON_COMPACT
    c = volterra_compact_certify(AnalyticFn.constant(1.0), W0, 2, 2, report=rep0)
    assert c.verdict is Verdict.COMPACT and c.estimate == 0.0


def test_volterra_p_greater_than_q(rep0):
    res = volterra_certify(AnalyticFn.monomial(1), W0, 4, 2, grid=SupGrid(6, 4), report=rep0)
    assert res.verdict is Verdict.BOUNDED and math.isfinite(res.estimate)


def test_mu_g_closed_form():
    # g = z, q = 2, omega = 1: |g'|^2 (1-|z|) (1-|z|); total mass 2 pi B(2, 3) = pi / 6
    mu = mu_g(AnalyticFn.monomial(1), W0, 2)
    from tentlab.measures import carleson_norm

    assert carleson_norm(mu, SupGrid(0, 1)).value == pytest.approx(math.pi / 6, rel=1e-9)
