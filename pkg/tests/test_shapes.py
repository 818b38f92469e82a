import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fracarea.curvature import QuadratureSpec, fmc_estimate, fmc_polar_2d
from fracarea.errors import DegenerateFacet, PointNotOnSurface
from fracarea.geometry import Params, sphere_measure
from fracarea.shapes import (
    BarrierSpec,
    ConeSpec,
    barrier_apex,
    barrier_constants,
    barrier_profile,
    cone_regular_points,
    hessian_sup,
    make_barrier,
    make_cone_2d,
    make_cone_nd,
    make_dented_disk,
    make_flat_disk,
    make_neck_arcs,
    phi_inverse,
    plateau_bump,
    well,
    well_derivatives,
)
from fracarea.sides import normal_at

P2 = Params(2, 0.5)


def boundary_points(M):
    return np.vstack([M.vertices[b] for b in M.boundary])


def test_flat_disk():
    M = make_flat_disk(1.0)
    np.testing.assert_array_equal(M.vertices, [[-1, 0], [1, 0]])
    np.testing.assert_allclose(M.facet_normals, [[0, 1]])
    D = make_flat_disk(1.0, n_facets=512, N=3)
    ring = D.vertices[D.boundary[0]]
    assert np.linalg.norm(np.roll(ring, -1, 0) - ring, axis=1).sum() == pytest.approx(2 * np.pi, rel=1e-4)
    np.testing.assert_allclose(D.facet_normals, np.tile([0, 0, 1.0], (512, 1)))
    with pytest.raises(DegenerateFacet):
        make_flat_disk(0.0)


def test_cone_2d():
    M = make_cone_2d(1.0)
    got = sorted(map(tuple, boundary_points(M)))
    assert got == [(-1, -1), (-1, 1), (1, -1), (1, 1)]
    M2 = make_cone_2d(2.0)
    E = M2.vertices[M2.facets[:, 1]] - M2.vertices[M2.facets[:, 0]]
    np.testing.assert_allclose(np.abs(E[:, 1] / E[:, 0]), 2.0)
    # every normal points into the double wedge around the vertical axis
    for z, nu in zip(M2.barycenters, M2.facet_normals):
        assert np.sign(nu[1]) == np.sign(z[1])
    with pytest.raises(PointNotOnSurface):
        normal_at(M2, [0.0, 0.0])
    with pytest.raises(ValueError):
        ConeSpec(d=0.0)


def test_cone_nd():
    M = make_cone_nd(32)
    assert len(M.boundary) == 2
    for ring in M.boundary:
        P = M.vertices[ring]
        np.testing.assert_allclose(np.hypot(P[:, 0], P[:, 1]), 1.0)
        assert np.allclose(np.abs(P[:, 2]), 1.0)
    idx = cone_regular_points(M, 8)
    assert np.all(np.linalg.norm(M.barycenters[idx], axis=1) > 1e-3)
    with pytest.raises(ValueError):
        make_cone_nd(8)


def test_barrier_profile_values():
    eps = 1e-3
    bs = BarrierSpec(eps)
    assert barrier_profile(bs, 0.0, P2, with_bump=False) == pytest.approx(-eps)
    assert barrier_profile(bs, bs.delta, P2, with_bump=False) == 0.0
    phi = hessian_sup(eps, 2)
    beta = bs.resolved_beta(P2)
    assert barrier_profile(bs, 0.75, P2) >= min(1.0, phi ** beta) * (1 - 1e-12)
    # plateau of radius 1/16 and support of radius 1/8
    assert plateau_bump(1 / 16, 1.0) == pytest.approx(1.0)
    assert plateau_bump(1 / 8, 1.0) == 0.0


def test_barrier_constants():
    bs = BarrierSpec(math.exp(-16))
    assert bs.delta == pytest.approx(0.25)
    c = barrier_constants(BarrierSpec(1e-3), P2)
    assert c["c_bound"] == pytest.approx(2 ** 0.5 * sphere_measure(2) / 0.25)
    assert c["r_eps"] == pytest.approx(1 / (2 * c["phi"]))
    assert c["d_eps"] == pytest.approx(2 * c["r_eps"])
    phis = [hessian_sup(e, 2) for e in (1e-2, 1e-4, 1e-8)]
    assert phis[0] > phis[1] > phis[2] > 0


def test_barrier_spec_validation():
    with pytest.raises(ValueError):
        BarrierSpec(0.5)
    with pytest.raises(ValueError):
        BarrierSpec(1e-3, t=2e-3)
    with pytest.raises(ValueError):
        BarrierSpec(1e-3, beta=0.7).resolved_beta(P2)


def test_hessian_sup_against_dense_differences():
    eps = 1e-2
    delta = (-math.log(eps)) ** -0.5
    x = np.linspace(-delta, delta, 400001)
    h = x[1] - x[0]
    w = well(x[None], eps)
    d2 = (w[2:] - 2 * w[1:-1] + w[:-2]) / h ** 2
    assert hessian_sup(eps, 2) == pytest.approx(np.abs(d2).max(), rel=1e-5)


def test_well_derivatives_match_differences():
    eps = 1e-3
    r = np.linspace(0.01, 0.35, 50)
    h = 1e-5
    w1, w2 = well_derivatives(r, eps)
    f = lambda x: well(x[None], eps)
    np.testing.assert_allclose(w1, (f(r + h) - f(r - h)) / (2 * h), rtol=1e-5, atol=1e-12)
    np.testing.assert_allclose(w2, (f(r + h) - 2 * f(r) + f(r - h)) / h ** 2, rtol=1e-3, atol=1e-9)


def test_phi_inverse_roundtrip():
    target = hessian_sup(1e-5, 2)
    assert phi_inverse(target, 2) == pytest.approx(1e-5, rel=1e-6)
    assert phi_inverse(1e9, 2) is None


@pytest.mark.parametrize("r0", ["delta", 5 / 8, 7 / 8])
def test_profile_smooth_at_stitching(r0):
    bs = BarrierSpec(1e-3)
    r0 = bs.delta if r0 == "delta" else r0
    h = 1e-4
    x = r0 + h * np.arange(-3, 4)
    y = barrier_profile(bs, x[None], P2)
    d1 = np.diff(y) / h
    d2 = np.diff(y, 2) / h ** 2
    assert np.max(np.abs(np.diff(d1))) < 1e-6 / h * 10
    assert np.max(np.abs(np.diff(d2))) * h < 1e-6 * 1e2


def test_make_barrier_geometry():
    eps = 1e-3
    bs = BarrierSpec(eps)
    c = barrier_constants(bs, P2)
    M = make_barrier(bs, P2)
    chains = M.chains
    flat = M.vertices[chains[1]]
    np.testing.assert_array_equal(flat[:, 1], eps - c["d_eps"])
    apex = barrier_apex(M)
    # the central facet is a short chord of the well, lifted by t = eps
    assert abs(apex[1]) < 1e-5 * eps
    assert apex[0] == pytest.approx(0.0, abs=1e-12)
    ends = boundary_points(M)
    assert sorted(set(np.round(ends[:, 1], 12))) == sorted({round(eps - c["d_eps"], 12), round(eps, 12)})


def test_make_barrier_3d_apex():
    P3 = Params(3, 0.5)
    bs = BarrierSpec(1e-3)
    M = make_barrier(bs, P3, n_rings=20, n_azimuthal=32)
    apex = barrier_apex(M)
    np.testing.assert_allclose(apex, [0, 0, 0], atol=1e-12)
    assert len(M.boundary) == 2


def test_bump_free_apex_within_bound():
    bs = BarrierSpec(1e-3)
    M = make_barrier(bs, P2)
    z = barrier_apex(M)
    c = barrier_constants(bs, P2)
    bound = c["c_bound"] * c["phi"] ** 0.5
    e = fmc_polar_2d(M, z, np.array([0.0, 1.0]), P2)
    assert abs(e.value) <= 1.05 * bound
    mc = fmc_estimate(M, z, np.array([0.0, 1.0]), P2, QuadratureSpec(n_samples=50000, seed=1))
    assert mc.contains(e.value)


def test_dented_disk_and_neck():
    D = make_dented_disk()
    assert D.vertices[:, 1].min() == pytest.approx(-0.2)
    inner = D.vertices[np.abs(D.vertices[:, 0]) <= 0.15]
    np.testing.assert_allclose(inner[:, 1], -0.2)
    assert np.all(D.vertices[np.abs(D.vertices[:, 0]) >= 0.4, 1] == 0.0)
    N = make_neck_arcs(1.0)
    assert len(N.chains) == 2
    assert np.abs(N.vertices[:, 0]).min() == pytest.approx(0.5)


@settings(max_examples=25, deadline=None)
@given(st.floats(1e-12, 1e-2, allow_nan=False), st.floats(0.0, 0.99))
def test_well_bounds(eps, frac):
    delta = (-math.log(eps)) ** -0.5
    v = float(well(np.array([frac * delta]), eps))
    assert -eps * (1 + 1e-12) <= v <= 0.0
