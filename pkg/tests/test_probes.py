import math

import numpy as np
import pytest

from fracarea.curvature import QuadratureSpec
from fracarea.errors import ConfigError
from fracarea.geometry import Params, build_polyline, build_polylines
from fracarea.probes import ContactReport, Verdict, closest_point, slide_ball, slide_hyperplane
from fracarea.shapes import make_cone_2d, make_dented_disk, make_flat_disk, make_neck_arcs

P = Params(2, 0.5)
SPEC = QuadratureSpec(n_samples=40000, seed=11)


def two_sheets(d):
    return build_polylines([np.c_[np.linspace(-1, 1, 21), np.zeros(21)],
                            np.c_[np.linspace(1, -1, 21), np.full(21, -d)]])


def test_flat_plane_probe():
    M = make_flat_disk(1.0, n_facets=20)
    r = slide_hyperplane(M, [0, 1], 1, P, SPEC)
    assert r.lambda_star == 0.0
    assert r.verdict == Verdict.CONSISTENT
    assert len(r.fmc_at_contact) == 1
    # the whole segment touches; its endpoints are boundary contacts
    assert len(r.contact_points) == 21 and len(r.boundary_contacts) == 2


def test_cone_from_below_touches_only_boundary():
    r = slide_hyperplane(make_cone_2d(1.0), [0, 1], 1, P, SPEC)
    assert r.lambda_star == -1.0
    assert r.verdict == Verdict.NO_CONTACT and r.fmc_at_contact == []
    assert sorted(map(tuple, r.boundary_contacts)) == [(-1.0, -1.0), (1.0, -1.0)]


def test_dented_disk_violates():
    r = slide_hyperplane(make_dented_disk(), [0, 1], 1, P, SPEC)
    assert r.lambda_star == pytest.approx(-0.2)
    assert r.verdict == Verdict.VIOLATES
    z = r.evaluated_points[0]
    assert abs(z[0]) <= 0.15 and z[1] == pytest.approx(-0.2)


def test_exact_support_value():
    M = build_polyline([(-1, 0.3), (0, -0.7), (1, 0.1)])
    assert slide_hyperplane(M, [0, 1], 1, P, SPEC).lambda_star == -0.7
    assert slide_hyperplane(M, [0, 1], -1, P, SPEC).lambda_star == 0.3


def test_two_far_sheets_ball_passes_between():
    d = 10.0
    r = slide_ball(two_sheets(d), math.sqrt(d) / 2, -d / 2, P, SPEC)
    assert r.verdict == Verdict.NO_CONTACT and r.lambda_star is None


def test_ball_touches_neck():
    M = make_neck_arcs(1.0)
    r = slide_ball(M, 0.2, -0.5, P, SPEC)
    assert r.lambda_star is not None
    q = r.contact_points[0]
    c = np.array([r.lambda_star, -0.5])
    assert np.linalg.norm(q - c) == pytest.approx(0.2, abs=1e-5)
    assert len(r.fmc_at_contact) == 1
    assert q[0] < 0


def test_ball_radius_must_be_positive():
    with pytest.raises(ConfigError):
        slide_ball(two_sheets(1.0), 0.0, 0.0)
    with pytest.raises(ConfigError):
        slide_hyperplane(two_sheets(1.0), [0, 1], 0)


def test_report_json_roundtrip():
    r = slide_hyperplane(make_dented_disk(), [0, 1], 1, P, QuadratureSpec(n_samples=5000, seed=2))
    r2 = ContactReport.from_json(r.to_json())
    assert r2.verdict == r.verdict
    assert r2.lambda_star == r.lambda_star
    assert r2.fmc_at_contact[0].value == r.fmc_at_contact[0].value


def test_closest_point():
    M = build_polyline([(-1, 0), (1, 0)])
    np.testing.assert_allclose(closest_point(M, [0.3, 2.0]), [0.3, 0.0])
    np.testing.assert_allclose(closest_point(M, [3.0, 1.0]), [1.0, 0.0])
