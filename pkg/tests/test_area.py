import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from scipy import integrate

from fracarea.area import (
    Domain,
    Region,
    area_constant,
    area_limit_scan,
    classical_ps_oracle,
    classical_ps_quadrature,
    per_s_estimate,
    richardson_weights,
)
from fracarea.curvature import QuadratureSpec
from fracarea.errors import ConfigError, NotContained
from fracarea.geometry import Params, build_polyline

# P_s(B_1; B_3) at s = 1/2 by brute-force 4D midpoint quadrature in polar
# coordinates, computed once outside this package
BRUTE_B1_B3 = 62.1306387777

P = Params(2, 0.5)
PH = Params(2, 0.5, cN=0.5)
OMEGA = Domain.ball((0, 0), 3)


def circle(n=512, r=1.0):
    t = 2 * np.pi * np.arange(n) / n
    return build_polyline(np.c_[r * np.cos(t), r * np.sin(t)], closed=True)


def test_quadrature_matches_frozen_value():
    q = classical_ps_quadrature(Region.ball((0, 0), 1), OMEGA, P)
    assert q.value == pytest.approx(BRUTE_B1_B3, rel=1e-6)


def test_line_oracle_matches_frozen_value():
    e = classical_ps_oracle(Region.ball((0, 0), 1), OMEGA, P, QuadratureSpec(n_samples=100000, seed=3))
    assert abs(e.value - BRUTE_B1_B3) <= 4 * e.std_error


def test_per_s_half_constant_matches_classical():
    e = per_s_estimate(circle(), OMEGA, PH, QuadratureSpec(n_samples=200000, seed=4))
    # inscribed polygon is slightly smaller than the disk
    assert abs(e.value - BRUTE_B1_B3) <= 4 * e.std_error + 0.01 * BRUTE_B1_B3


def test_per_s_is_twice_classical_with_unit_constant():
    a = per_s_estimate(circle(256), OMEGA, P, QuadratureSpec(n_samples=100000, seed=5))
    b = per_s_estimate(circle(256), OMEGA, PH, QuadratureSpec(n_samples=100000, seed=5))
    assert a.value == pytest.approx(2 * b.value, rel=1e-12)


def test_empty_set():
    e = classical_ps_oracle(Region.empty(), OMEGA, P)
    assert e.value == 0.0 and e.std_error == 0.0


def test_whole_domain_single_term():
    # E = Omega: only pairs with one point inside and one outside remain,
    # and on each chord of length L this is 2 g(L) with g(t) = t^(1-s)/(s(1-s))
    om = Domain.ball((0, 0), 1)
    q = classical_ps_quadrature(Region.ball((0, 0), 1), om, P)
    s = P.s
    ref = math.pi * integrate.quad(lambda p: 2 * (2 * math.sqrt(1 - p * p)) ** (1 - s) / (s * (1 - s)), -1, 1)[0]
    assert q.value == pytest.approx(ref, rel=1e-7)


def test_not_contained():
    with pytest.raises(NotContained):
        per_s_estimate(circle(64, 2.0), Domain.ball((0, 0), 1.5), P, QuadratureSpec(n_samples=100, seed=1))


def test_domain_kinds():
    with pytest.raises(ConfigError):
        Domain.polygon([(0, 0), (1, 0), (0, 1)])
    with pytest.raises(ConfigError):
        Domain.box((0, 0), (0, 1))


def test_box_region_against_surface_estimator():
    # two different routes to P_s of the unit square
    E = Region.box((0, 0), (1, 1))
    om = Domain.box((-1, -1), (2, 2))
    q = classical_ps_oracle(E, om, P, QuadratureSpec(n_samples=100000, seed=8))
    sq = build_polyline([(0, 0), (1, 0), (1, 1), (0, 1)], closed=True)
    e = per_s_estimate(sq, om, PH, QuadratureSpec(n_samples=200000, seed=6))
    assert abs(e.value - q.value) <= 4 * math.hypot(e.std_error, q.std_error)


def test_translation_invariance():
    M = circle(128)
    spec = QuadratureSpec(n_samples=20000, seed=7)
    a = per_s_estimate(M, OMEGA, P, spec)
    t = np.array([3.0, -2.0])
    M2 = build_polyline(M.vertices[M.facets[:, 0]] + t, closed=True)
    b = per_s_estimate(M2, OMEGA.translated(t), P, spec)
    assert b.value == pytest.approx(a.value, rel=1e-9)


def test_debug_switch_diverges_with_cutoff():
    M = build_polyline([(-1.0, 0.0), (1.0, 0.0)])
    om = Domain.ball((0, 0), 2)
    with pytest.raises(ConfigError):
        per_s_estimate(M, om, P, QuadratureSpec(n_samples=100, seed=1), max_factor=False)
    vals = [per_s_estimate(M, om, P, QuadratureSpec(n_samples=40000, seed=2, R_far=R), max_factor=False).value
            for R in (4.0, 16.0, 64.0)]
    assert vals[0] < vals[1] < vals[2]
    bounded = per_s_estimate(M, om, P, QuadratureSpec(n_samples=40000, seed=2))
    assert bounded.value < vals[2]


def test_area_constant():
    assert area_constant(P) == pytest.approx(4.0)
    assert area_constant(Params(3, 0.5)) == pytest.approx(2 * math.pi)
    assert area_constant(PH) == pytest.approx(2.0)


def test_scan_single_row_and_ordering():
    M = build_polyline([(-1.0, 0.0), (1.0, 0.0)])
    om = Domain.ball((0, 0), 2)
    spec = QuadratureSpec(n_samples=2000, seed=1)
    r = area_limit_scan(M, om, [Params(2, 0.5)], spec)
    assert r.limit is None and len(r.rows) == 1
    with pytest.raises(ConfigError):
        area_limit_scan(M, om, [Params(2, 0.7), Params(2, 0.5)], spec)


def test_scan_csv_columns():
    M = build_polyline([(-1.0, 0.0), (1.0, 0.0)])
    r = area_limit_scan(M, Domain.ball((0, 0), 2), [Params(2, 0.5), Params(2, 0.7)],
                        QuadratureSpec(n_samples=2000, seed=1))
    head = r.to_csv().splitlines()[0]
    assert head == "s,estimate,std_error,trunc_bound,n_eval,seed"
    assert r.trend in ("increasing", "decreasing", "mixed")


@settings(max_examples=20, deadline=None)
@given(st.lists(st.floats(0.01, 0.99), min_size=2, max_size=5, unique=True))
def test_richardson_reproduces_polynomials(xs):
    xs = sorted(xs)
    if min(np.diff(xs)) < 1e-2:
        return
    w = richardson_weights(xs)
    coef = np.arange(1, len(xs) + 1, dtype=float)
    f = np.polyval(coef, np.array(xs))
    assert w @ f == pytest.approx(coef[-1], rel=1e-6, abs=1e-6)
