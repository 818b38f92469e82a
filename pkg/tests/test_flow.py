import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fracarea import _kernels
from fracarea.curvature import QuadratureSpec, fmc_polar_2d
from fracarea.errors import ConfigError, InvalidState
from fracarea.flow import (
    TRACE_COLUMNS,
    FlowConfig,
    FlowState,
    _gmax,
    audit_state,
    connectivity_report,
    flow_run,
    flow_step,
    initial_state,
    polyline_curvature,
    regime_scan,
)
from fracarea.geometry import Params, build_polylines

P = Params(2, 0.5)


def test_config_validation():
    for kw in ({"d": 0.0}, {"d": 1.0, "dt_safety": 1.0}, {"d": 1.0, "h_target": 0.0},
               {"d": 1.0, "topology_merge_dist": 0.1}):
        with pytest.raises(ConfigError):
            FlowConfig(**kw)


def test_flat_segment_is_fixed():
    st0 = FlowState((np.c_[np.linspace(-1, 1, 21), np.zeros(21)],), 1.0)
    cfg = FlowConfig(d=1.0, h_target=0.1)
    new = flow_step(st0, cfg, P)
    np.testing.assert_allclose(new.chains[0], st0.chains[0], atol=1e-14)
    assert max(np.abs(new.per_vertex_H)) < 1e-12


def test_fixed_end_points():
    st0 = initial_state("cone", 1.0, 0.1)
    new = flow_step(st0, FlowConfig(d=1.0, h_target=0.1), P, dt=1e-4)
    # surgery at the apex may regroup the chains; the ring points stay put
    ends = lambda st: sorted(tuple(p) for c in st.chains for p in (c[0], c[-1]))
    assert ends(new) == ends(st0)


def test_slab_clamp():
    x = np.linspace(-1, 1, 21)
    bump = np.c_[x, 0.3 * (1 - x ** 2)]
    new = flow_step(FlowState((bump,), 1.0), FlowConfig(d=1.0, h_target=0.1), P)
    assert new.n_projections > 0
    assert np.all(new.chains[0][:, 1] <= 0.0)


def test_step_is_deterministic():
    st0 = initial_state("wall-chords", 2.0, 0.1)
    cfg = FlowConfig(d=2.0, h_target=0.1)
    a, b = flow_step(st0, cfg, P), flow_step(st0, cfg, P)
    for c1, c2 in zip(a.chains, b.chains):
        np.testing.assert_array_equal(c1, c2)


def test_connectivity_examples():
    r = connectivity_report(initial_state("flat-sheets", 3.0, 0.1))
    assert r["n_components"] == 2
    assert sorted(map(tuple, r["boundary_attachment"].values())) == [("Gamma1",), ("Gamma2",)]
    assert r["min_pair_distance"] == pytest.approx(3.0)
    r = connectivity_report(initial_state("wall-chords", 3.0, 0.1))
    assert all(v == ["Gamma1", "Gamma2"] for v in r["boundary_attachment"].values())
    assert r["min_pair_distance"] == pytest.approx(2.0)
    r = connectivity_report(initial_state("cone", 1.0, 0.1))
    assert r["n_components"] == 1 and r["min_pair_distance"] == np.inf
    with pytest.raises(InvalidState):
        connectivity_report(FlowState((), 1.0))


def test_chain_must_join_rings():
    bad = FlowState((np.array([[-1.0, 0.0], [0.0, -0.5]]),), 1.0)
    with pytest.raises(InvalidState):
        flow_run(bad, FlowConfig(d=1.0, max_steps=1), P)


def test_lone_wall_chord_is_stationary():
    # a straight chord is symmetric under reflection in its own line
    st0 = initial_state("wall-chord", 1.0, 0.05)
    new = flow_step(st0, FlowConfig(d=1.0, h_target=0.05), P)
    assert max(np.abs(new.per_vertex_H)) < 1e-10
    np.testing.assert_allclose(new.chains[0][:, 0], 1.0, atol=1e-12)


def test_wall_chords_leave_the_wall():
    st0 = initial_state("wall-chords", 1.0, 0.05)
    new = flow_step(st0, FlowConfig(d=1.0, h_target=0.05), P)
    for c in new.chains:
        x = np.abs(c[1:-1, 0])
        assert np.all(x < 1.0)


def test_cone_apex_not_converged():
    st0 = initial_state("cone", 1.0, 0.05)
    cfg = FlowConfig(d=1.0, h_target=0.05, max_steps=1, log_every=1)
    r = flow_run(st0, cfg, P)
    assert r.verdict == "MaxSteps"
    assert r.rows[-1]["sup_H"] > 1.0


def test_trace_columns():
    cfg = FlowConfig(d=1.0, h_target=0.1, max_steps=3, log_every=1)
    r = flow_run(initial_state("flat-sheets", 1.0, 0.1), cfg, P)
    assert list(r.rows[0]) == TRACE_COLUMNS
    assert r.trace.splitlines()[0] == ",".join(TRACE_COLUMNS)
    assert [row["step"] for row in r.rows] == [1, 2, 3]


def test_far_sheets_converge_apart():
    cfg = FlowConfig(d=3.0, h_target=0.1, max_steps=400, stop_tol=0.005, log_every=50)
    r = flow_run(initial_state("flat-sheets", 3.0, 0.1), cfg, P)
    assert r.verdict == "ConvergedCritical"
    rep = connectivity_report(r.final)
    assert rep["n_components"] == 2 and rep["min_pair_distance"] > 2.0
    res, ok = audit_state(r.final, P, 4, QuadratureSpec(n_samples=40000, seed=3))
    assert ok and len(res) == 4


def test_regime_scan_small():
    rows, (lo, hi) = regime_scan([0.5, 3.0], P, h=0.1, max_steps=800, stop_tol=0.005)
    assert [r["regime"] for r in rows] == ["joined", "separate"]
    assert (lo, hi) == (0.5, 3.0)


def test_polyline_curvature_matches_polar_routine():
    chains = [np.array([[-1.0, 0.0], [-0.2, -0.3], [0.4, -0.1], [1.0, 0.0]])]
    M = build_polylines(chains)
    z = M.barycenters[1]
    nu = M.facet_normals[1]
    H = polyline_curvature(chains, z[None], nu[None], [1], P)[0]
    assert H == pytest.approx(fmc_polar_2d(M, z, nu, P).value, rel=1e-7)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2 ** 31 - 1), st.floats(0.2, 0.9))
def test_sweep_kernel_equals_direct(seed, s):
    rng = np.random.default_rng(seed)
    t = np.sort(rng.uniform(0, 2 * np.pi, 12))
    r = 1 + 0.3 * rng.uniform(-1, 1, 12)
    pts = np.c_[r * np.cos(t), r * np.sin(t)]
    P_, Q_ = pts[:-1].copy(), pts[1:].copy()
    Z = 0.5 * (P_ + Q_)
    e = Q_ - P_
    NU = np.stack([-e[:, 1], e[:, 0]], axis=1) / np.linalg.norm(e, axis=1)[:, None]
    own = np.arange(len(Z), dtype=np.int64)
    a = _kernels.polar_curvature_2d(Z, NU, own, P_, Q_, s, _gmax(s), 1e-14)
    b = _kernels.polar_curvature_2d_direct(Z, NU, own, P_, Q_, s, _gmax(s), 1e-14)
    np.testing.assert_allclose(a, b, rtol=1e-10, atol=1e-10)


@pytest.mark.parametrize("s", [0.1, 0.5, 0.9])
def test_int_cos_pow_against_quadrature(s):
    from scipy import integrate
    for psi in (-1.2, 0.3, 0.78, 1.5, np.pi / 2):
        ref = integrate.quad(lambda x: np.cos(x) ** s, 0.0, psi, epsabs=1e-13, epsrel=1e-12)[0]
        assert _kernels._int_cos_pow(psi, s, _gmax(s)) == pytest.approx(ref, rel=1e-10)
