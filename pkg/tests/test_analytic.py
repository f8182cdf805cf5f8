import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from tentlab.analytic import (AnalyticFn, AtomCoefficients, RingOperator, analyze_atoms, default_gamma, dilate,
                              growth_check, random_sign_probe, synthesize_atoms, test_function as make_test_function,
                              volterra_apply)
from tentlab.certify import FixedSquareRule
from tentlab.diskgeom import build_lattice
from tentlab.errors import DomainError, ParameterDomainError
from tentlab.measures import DiskMeasure, SupGrid, seq_tent_norm, tent_infty_norm
from tentlab.weights import RadialWeight, classify_doubling

W1 = RadialWeight.standard(0.0)


@pytest.fixture(scope="module")
def rep1():
    return classify_doubling(W1)


@pytest.fixture(scope="module")
def small_lattice():
    return build_lattice(0.2, 2.0**-6)


def _samples(n=100, rmax=0.999, seed=0):
    rng = np.random.default_rng(seed)
    return np.sqrt(rng.random(n)) * rmax * np.exp(2j * np.pi * rng.random(n))


def test_polynomial_derivative():
    f = AnalyticFn.polynomial([0, 0, 1])
    assert f.eval(0.3, 1) == pytest.approx(0.6, rel=1e-12)
    assert f.eval(0.3, 2) == pytest.approx(2.0, rel=1e-12)
    assert f.eval(0.3, 3) == 0


def test_atom_at_origin_is_constant():
    f = AnalyticFn.atom_sum([1.0], [0.0], 2.0)
    z = _samples(10)
    assert np.allclose(f(z), 1.0, rtol=0, atol=1e-15)
    for m in (1, 2, 3):
        assert np.allclose(f.eval(z, m), 0.0, atol=1e-15)


def test_atom_derivative_finite_difference():
    f = AnalyticFn.atom_sum([1.0], [0.5], 2.0)
    h = 1e-6
    fd = (f(h) - f(-h)) / (2 * h)
    assert complex(f.eval(0.0, 1)) == pytest.approx(0.25, rel=1e-12)
    assert complex(fd) == pytest.approx(0.25, rel=1e-6)


@settings(max_examples=30, deadline=None)
@given(st.floats(0.0, 0.9), st.floats(-3, 3), st.floats(1.1, 4.0), st.integers(1, 3))
def test_atom_derivatives_match_finite_differences(r, t, gamma, m):
    a = r * complex(math.cos(t), math.sin(t))
    f = AnalyticFn.atom_sum([1.0 - 0.5j], [a], gamma, 0.7)
    z0 = 0.3 * complex(math.cos(2 * t), math.sin(2 * t))
    h = 1e-3
    # centered differences of the (m-1)-th derivative along the real direction
    fd = (f.eval(z0 + h, m - 1) - f.eval(z0 - h, m - 1)) / (2 * h)
    exact = complex(f.eval(z0, m))
    assert abs(complex(fd) - exact) <= 1e-4 * max(1.0, abs(exact))


def test_test_function_values(rep1):
    f0 = make_test_function(0.0, W1, 2, 2.0, rep1)
    assert np.allclose(f0(_samples(5)), 1.0, atol=1e-15)
    f = make_test_function(0.5, W1, 2, 2.0, rep1)
    assert complex(f(0.5)).real == pytest.approx(math.sqrt(2) * 4 / 9, rel=1e-12)


def test_test_function_uniformly_bounded(rep1):
    grid = SupGrid(4, 4)
    mu = DiskMeasure.weighted_area(W1)
    for z in grid.points:
        f = make_test_function(complex(z), W1, 2, 2.0, rep1)
        assert tent_infty_norm(f, mu, 2, SupGrid(6, 8)) <= 5


def test_test_function_gamma_guard(rep1):
    with pytest.raises(ParameterDomainError):
        make_test_function(0.5, W1, 2, 0.4, rep1)
    with pytest.raises(DomainError):
        make_test_function(1.0, W1, 2, 2.0, rep1)


def test_growth_constant():
    band = growth_check(AnalyticFn.constant(1.0), W1, 1.0, 0, levels=6, angles=4)
    assert band.hi == pytest.approx(1 / math.pi, rel=1e-9)
    for row in band.trace:
        assert row["ratio"] == pytest.approx(row["one_minus_abs_z"] / math.pi, rel=1e-9)


def test_growth_monomial_peak():
    n = 16
    band = growth_check(AnalyticFn.monomial(n), W1, 2.0, 1, levels=8, angles=4)
    assert math.isfinite(band.hi)
    best = max(band.trace, key=lambda row: row["ratio"])
    # (1-r)^(3/2) r^(n-1) peaks near 1 - 1/n
    assert abs(math.log2(best["one_minus_abs_z"]) - math.log2(1 / n)) <= 1.0


def test_dilate():
    f = AnalyticFn.polynomial([0, 1])
    z = _samples(20)
    assert np.allclose(dilate(f, 0.5)(z), 0.5 * z, rtol=0, atol=1e-15)


@settings(max_examples=20, deadline=None)
@given(st.floats(0.05, 1.0), st.floats(0.05, 1.0))
def test_dilate_product_law(r1, r2):
    f = AnalyticFn.parse("z**3 - 2*z + 1") + AnalyticFn.atom_sum([1.0, 2j], [0.5, -0.3j], 2.5) \
        + AnalyticFn.log_kernel()
    z = _samples(100)
    lhs = dilate(dilate(f, r1), r2)(z)
    rhs = dilate(f, r1 * r2)(z)
    assert np.allclose(lhs, rhs, rtol=1e-12, atol=1e-12)


def test_dilation_corpus_bounded():
    corpus = [AnalyticFn.monomial(n) for n in (1, 4, 16)] + [AnalyticFn.parse(e) for e in
              ("(1-z)**-0.5", "1 + z**2", "-log(1-z)")]
    corpus += [AnalyticFn.atom_sum([1.0], [a], 3.0) for a in (0.5, 0.9j, -0.75, 0.3 + 0.3j)]
    mu, grid = DiskMeasure.weighted_area(W1), SupGrid(6, 8)
    worst = 0.0
    for f in corpus:
        base = tent_infty_norm(f, mu, 2, grid)
        for rho in (0.5, 0.9, 0.99):
            worst = max(worst, tent_infty_norm(dilate(f, rho), mu, 2, grid) / base)
    assert worst < 3.0


def test_synthesis_trivial(small_lattice, rep1):
    lat = small_lattice
    k = int(np.argmin(np.abs(lat.points)))
    c = np.zeros(len(lat))
    c[k] = 2.5
    f = synthesize_atoms(AtomCoefficients(lat, c, 3.0, 2, W1), rep1)
    assert np.allclose(f(_samples(10)), 2.5 * 1.0 ** -0.5, atol=1e-14)
    w = RadialWeight.standard(1.0)
    f = synthesize_atoms(AtomCoefficients(lat, c, 4.0, 2, w), classify_doubling(w))
    assert np.allclose(f(_samples(10)), 2.5 * 0.5 ** -0.5, rtol=1e-12)
    zero = synthesize_atoms(AtomCoefficients(lat, np.zeros(len(lat)), 3.0, 2, W1), rep1)
    assert zero.is_zero
    assert np.all(zero(_samples(10)) == 0)


def test_synthesis_bounded_by_sequence_norm(rep1):
    lat = build_lattice(0.2, 2.0**-4)
    mu, grid = DiskMeasure.weighted_area(W1), SupGrid(4, 4)
    gamma = default_gamma(rep1, 2)
    fs = []
    for seed in range(20):
        c = np.random.default_rng(seed).standard_normal(len(lat))
        c /= seq_tent_norm(lat, c, 2, grid)
        fs.append(synthesize_atoms(AtomCoefficients(lat, c, gamma, 2, W1), rep1))
    ratios = FixedSquareRule(fs).tent_norms(mu, 2, grid)
    assert np.all(np.isfinite(ratios)) and ratios.max() / ratios.min() < 3.0


def test_ring_operator_matches_direct_sum(small_lattice):
    op = RingOperator(small_lattice, 3.0)
    v = np.random.default_rng(1).standard_normal(len(small_lattice)) + 0j
    fast = op.apply(v)
    slow = op.apply_dense(v, small_lattice.points)
    assert np.allclose(fast, slow, rtol=1e-10, atol=1e-10 * np.abs(slow).max())


def test_square_rule_matches_adaptive_norm(rep1):
    f = AnalyticFn.atom_sum([1.0, -0.5], [0.5, 0.8j], 3.0)
    grid = SupGrid(5, 4)
    mu = DiskMeasure.weighted_area(W1)
    fixed = FixedSquareRule([f]).tent_norms(mu, 2, grid)[0]
    adaptive = tent_infty_norm(f, mu, 2, grid)
    assert fixed == pytest.approx(adaptive, rel=1e-6)


@pytest.fixture(scope="module")
def fine_lattice():
    return build_lattice(0.1, 2.0**-10)


def _round_trip(lat, idx, rep):
    gamma = default_gamma(rep, 2)
    c = np.zeros(len(lat))
    c[idx] = 1.0
    f = synthesize_atoms(AtomCoefficients(lat, c, gamma, 2, W1), rep)
    res = analyze_atoms(f, lat, gamma, W1, 2, max_iter=20, report=rep)
    g = synthesize_atoms(res.coeffs, rep, validate=False)
    z = _samples(100)
    return res, np.max(np.abs(f(z) - g(z))) / np.max(np.abs(f(z)))


def test_round_trip_single_atom(fine_lattice, rep1):
    res, err = _round_trip(fine_lattice, [7], rep1)
    assert err < 1e-3
    assert res.monotone and len(res.residuals) >= 2


def test_round_trip_constant_and_z(fine_lattice, rep1):
    gamma = default_gamma(rep1, 2)
    for f, need in ((AnalyticFn.constant(1.0), 1e-3), (AnalyticFn.polynomial([0, 1]), 1e-2)):
        res = analyze_atoms(f, fine_lattice, gamma, W1, 2, max_iter=20, report=rep1)
        assert res.residuals[-1] < need
        assert res.monotone


def test_random_sign_probe(small_lattice, rep1):
    lat = small_lattice
    gamma = default_gamma(rep1, 2)
    c = (1 - np.abs(lat.points)) ** 0.5
    coeffs = AtomCoefficients(lat, c, gamma, 2, W1)
    z = np.array([0.3, 0.7j, -0.9])
    assert np.array_equal(random_sign_probe(coeffs, 4)(z), random_sign_probe(coeffs, 4)(z))
    zero = coeffs.with_values(np.zeros(len(lat)))
    assert np.all(random_sign_probe(zero, 11)(z) == 0)


def test_random_sign_second_moment(small_lattice, rep1):
    lat = small_lattice
    gamma = default_gamma(rep1, 2)
    c = np.random.default_rng(5).random(len(lat))
    coeffs = AtomCoefficients(lat, c, gamma, 2, W1)
    z0 = 0.6 + 0.2j
    vals = np.array([abs(complex(random_sign_probe(coeffs, s)(z0))) ** 2 for s in range(200)])
    # exact second moment: sum_k |c_k atom_k(z0)|^2, with omega_hat(a) = 1 - |a|
    a = lat.points
    atom_vals = (1 - np.abs(a)) ** (gamma - 0.5) * np.abs(1 - np.conj(a) * z0) ** -gamma
    expect = float(np.sum((c * atom_vals) ** 2))
    se = vals.std(ddof=1) / math.sqrt(vals.size)
    assert abs(vals.mean() - expect) < 3 * se


def test_volterra_examples():
    z = 0.4 + 0.3j
    g1, g2 = AnalyticFn.monomial(1), AnalyticFn.monomial(2)
    one = AnalyticFn.constant(1.0)
    assert volterra_apply(g1, one, z) == pytest.approx(z, rel=1e-12)
    assert volterra_apply(g2, one, z) == pytest.approx(z * z, rel=1e-12)
    assert volterra_apply(g1, g1, z) == pytest.approx(z * z / 2, rel=1e-12)
    assert volterra_apply(g1, one, 0) == 0


def test_volterra_log_kernel():
    # J_g 1 with g = -log(1 - z) is g itself
    g = AnalyticFn.parse("-log(1-z)")
    z = 0.95 * np.exp(0.3j)
    assert volterra_apply(g, AnalyticFn.constant(1.0), z) == pytest.approx(complex(g(z)), rel=1e-9)


@pytest.mark.parametrize("expr, fn", [
    ("z**2 + 3", lambda z: z**2 + 3),
    ("z/(1-z)", lambda z: z / (1 - z)),
    ("-log(1-z)", lambda z: -np.log(1 - z)),
    ("(1-z)**-0.5", lambda z: (1 - z) ** -0.5),
    ("2*z**3 - z + 1j", lambda z: 2 * z**3 - z + 1j),
    ("(1 - 0.5*z)**-2", lambda z: (1 - 0.5 * z) ** -2),
])
def test_parser(expr, fn):
    f = AnalyticFn.parse(expr)
    z = _samples(50, 0.99)
    assert np.allclose(f(z), fn(z), rtol=1e-12)


def test_parser_first_derivative():
    f = AnalyticFn.parse("z/(1-z)")
    z = _samples(20, 0.9)
    assert np.allclose(f.eval(z, 1), (1 - z) ** -2, rtol=1e-12)


def test_parser_rejects():
    for bad in ("sin(z)", "z**z", "import os", "exp(z)"):
        with pytest.raises(DomainError):
            AnalyticFn.parse(bad)


def test_spec_round_trip():
    f = AnalyticFn.parse("z**2 + 3") + AnalyticFn.atom_sum([1.0], [0.5j], 2.0, 0.5)
    g = AnalyticFn.from_spec(f.to_dict())
    z = _samples(20)
    assert np.allclose(f(z), g(z), rtol=1e-14)
