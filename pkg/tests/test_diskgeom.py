import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from tentlab import DomainError, build_lattice, pseudo_disk, pseudo_dist
from tentlab.diskgeom import (Lattice, carleson_square_contains, koranyi_contains, koranyi_halfwidth,
                              lattice_multiplicity, mobius, tilde_point, verification_grid)

disk_points = st.builds(lambda r, t: r * np.exp(1j * t), st.floats(0, 0.995), st.floats(-np.pi, np.pi))


def test_pseudo_dist_examples():
    assert pseudo_dist(0, 0.3 + 0.4j) == pytest.approx(0.5, rel=1e-15)
    assert pseudo_dist(0.5, 0.5) == 0.0
    assert pseudo_dist(0.5, -0.5) == pytest.approx(0.8, rel=1e-15)


def test_pseudo_dist_rejects_boundary():
    with pytest.raises(DomainError):
        pseudo_dist(1.0, 0.0)


def test_pseudo_disk_examples():
    d = pseudo_disk(0, 0.3)
    assert d.center == 0 and d.radius == pytest.approx(0.3, rel=1e-15)
    d = pseudo_disk(0.5, 0.5)
    assert d.center == pytest.approx(0.4, rel=1e-14) and d.radius == pytest.approx(0.4, rel=1e-14)
    assert pseudo_dist(0.5, 0.0) == pytest.approx(0.5) and pseudo_dist(0.5, 0.8) == pytest.approx(0.5)


def test_pseudo_disk_boundary_samples():
    d = pseudo_disk(0.9, 0.2)
    u = d.center + d.radius * np.exp(2j * np.pi * np.arange(64) / 64)
    assert np.max(np.abs(pseudo_dist(0.9, u) - 0.2)) < 1e-10


@settings(max_examples=60, deadline=None)
@given(disk_points, disk_points, st.floats(0.05, 0.9))
def test_pseudo_disk_membership_matches_metric(z, u, r):
    d = pseudo_disk(z, r)
    dist = pseudo_dist(z, u)
    if abs(dist - r) > 1e-9:
        assert bool(d.contains(u)) == (dist < r)


@settings(max_examples=60, deadline=None)
@given(disk_points, disk_points, st.floats(0, 0.95), st.floats(-np.pi, np.pi))
def test_metric_symmetry_and_mobius_invariance(z, u, ra, ta):
    a = ra * np.exp(1j * ta)
    assert pseudo_dist(z, u) == pytest.approx(pseudo_dist(u, z), abs=1e-12)
    pz, pu = mobius(a, z), mobius(a, u)
    if abs(pz) < 1 and abs(pu) < 1:
        assert pseudo_dist(pz, pu) == pytest.approx(pseudo_dist(z, u), abs=1e-8)


def test_carleson_square_examples():
    assert carleson_square_contains(0, 0.99j)
    assert carleson_square_contains(0.5, 0.75)
    assert not carleson_square_contains(0.5, 0.75 * np.exp(0.3j))


def test_koranyi_examples():
    # strict inequality: at z = 0 both sides equal 1
    assert not koranyi_contains(1, 0)
    assert koranyi_contains(1, 0.5)
    assert not koranyi_contains(1, 0.9j)


def test_koranyi_halfwidth_matches_membership():
    rho = 0.7
    t = koranyi_halfwidth(rho)
    assert koranyi_contains(1, rho * np.exp(1j * 0.999 * t))
    assert not koranyi_contains(1, rho * np.exp(1j * 1.001 * t))


def test_tilde_point():
    assert tilde_point(0.75) == pytest.approx(0.5)
    assert tilde_point(0.9j) == pytest.approx(0.8j)
    with pytest.raises(DomainError):
        tilde_point(0.3)


def test_pseudo_disk_inside_square_of_tilde_point():
    rng = np.random.default_rng(1)
    d = pseudo_disk(0.75, 0.2)
    rad = d.radius * np.sqrt(rng.uniform(size=1000))
    u = d.center + rad * np.exp(2j * np.pi * rng.uniform(size=1000))
    assert np.all(carleson_square_contains(tilde_point(0.75), u))


def brute_cover(points, samples, chunk=2000):
    # exhaustive minimum pseudohyperbolic distance, no tree
    best = np.empty(samples.size)
    for i in range(0, samples.size, chunk):
        s = samples[i:i + chunk, None]
        best[i:i + chunk] = np.min(np.abs(s - points[None, :]) / np.abs(1 - s * np.conj(points[None, :])), axis=1)
    return best


@pytest.fixture(scope="module")
def lat6():
    return build_lattice(0.2, 2.0**-6)


def test_lattice_covers_and_separates(lat6):
    rng = np.random.default_rng(7)
    n = 100_000
    rho = 1 - (1 - 2.0**-6) * rng.uniform(size=n) ** 0.5  # uniform in area, then mirrored toward the edge
    rho = np.clip(1 - rho, 0, 1 - 2.0**-6)
    samples = rho * np.exp(2j * np.pi * rng.uniform(size=n))
    assert np.max(brute_cover(lat6.points, samples)) < 0.2
    p = lat6.points
    d = np.abs(p[:, None] - p[None, :]) / np.abs(1 - p[:, None] * np.conj(p[None, :]))
    np.fill_diagonal(d, 1.0)
    assert d.min() >= 0.1
    assert lat6.min_separation == pytest.approx(d.min(), rel=1e-12)


def test_lattice_multiplicity_stable(lat6):
    finer = verification_grid(2.0**-6, 200_000)
    assert lat6.multiplicity >= 1
    assert lattice_multiplicity(lat6, finer) == lat6.multiplicity


def test_degenerate_lattice():
    lat = build_lattice(0.2, 0.5)
    assert 0j in lat.points
    assert np.all(np.abs(lat.points) <= 0.5 + 1e-12)
    p = lat.points
    d = np.abs(p[:, None] - p[None, :]) / np.abs(1 - p[:, None] * np.conj(p[None, :]))
    np.fill_diagonal(d, 1.0)
    assert d.min() >= 0.1


def test_lattice_round_trip(lat6):
    back = Lattice.from_dict(lat6.to_dict())
    assert np.array_equal(back.points, lat6.points)
    assert back.multiplicity == lat6.multiplicity
    assert np.allclose(back.cell_areas(1.0), lat6.cell_areas(1.0))


def test_cell_areas_tile_the_truncated_disk(lat6):
    outer = max(g.outer for g in lat6.rings)
    assert lat6.cell_areas(0.0).sum() == pytest.approx(np.pi * outer**2, rel=1e-12)


def test_lattice_parameter_checks():
    with pytest.raises(DomainError):
        build_lattice(0.3, 2.0**-4)
