import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from leocoop.geometry import (
    R_EARTH_KM,
    ConstellationConfig,
    GroundUser,
    SatelliteState,
    coverage_angle,
    elevation_matrix,
    generate_walker,
    geodetic_to_ecef,
    great_circle_km,
    look_angles,
    propagate,
    satellite_frame,
    visibility,
)


def test_walker_48_6_1_layout():
    els = generate_walker(ConstellationConfig(48, 6, 1, 45.0))
    assert len(els) == 48
    raans = sorted({round(e.raan, 12) for e in els})
    assert np.allclose(raans, [2 * math.pi * i / 6 for i in range(6)])
    plane0 = [e.phase_at_epoch for e in els if e.plane == 0]
    assert np.allclose(np.diff(plane0), 2 * math.pi / 8)
    # inter-plane phase offset 2*pi*F/T
    assert els[8].phase_at_epoch == pytest.approx(2 * math.pi / 48)


@pytest.mark.parametrize("args", [(50, 6, 1, 45.0), (48, 0, 1, 45.0), (48, 6, -1, 45.0), (48, 6, 1, 190.0),
                                  (48, 6, 1, 45.0, -5.0)])
def test_constellation_validation(args):
    with pytest.raises(ValueError):
        ConstellationConfig(*args)


def test_notation_round_trip():
    cc = ConstellationConfig.from_notation("48/6/1", 45.0)
    assert (cc.total_sats, cc.planes, cc.phasing, cc.notation) == (48, 6, 1, "48/6/1")
    with pytest.raises(ValueError):
        ConstellationConfig.from_notation("48-6-1", 45.0)


def test_period_at_1200km():
    el = generate_walker(ConstellationConfig(1, 1, 0, 0.0, 1200.0))[0]
    assert el.period_s == pytest.approx(6556.03, abs=0.05)


def test_equatorial_start_point():
    el = generate_walker(ConstellationConfig(1, 1, 0, 0.0, 1200.0))[0]
    st0 = propagate(el, 0.0)
    assert np.allclose(st0.position, [R_EARTH_KM + 1200.0, 0.0, 0.0])


def test_equatorial_ground_track_stays_on_equator():
    el = generate_walker(ConstellationConfig(1, 1, 0, 0.0, 1200.0))[0]
    for t in np.linspace(0, 86400, 97):
        assert abs(propagate(el, t).position[2]) < 1e-9


def test_negative_time_rejected():
    el = generate_walker(ConstellationConfig(1, 1, 0, 0.0))[0]
    with pytest.raises(ValueError):
        propagate(el, -1.0)


@given(st.floats(0, 180), st.floats(0, 2e5))
@settings(max_examples=60, deadline=None)
def test_orbit_radius_and_speed_constant(inc, t):
    el = generate_walker(ConstellationConfig(6, 2, 1, inc))[3]
    s = propagate(el, t)
    assert np.linalg.norm(s.position) == pytest.approx(el.semi_major_axis, rel=1e-12)
    assert np.linalg.norm(s.velocity) == pytest.approx(math.sqrt(398600.4418 / el.semi_major_axis), rel=1e-12)


@given(st.floats(0, 180), st.floats(0, 2e5))
@settings(max_examples=60, deadline=None)
def test_satellite_frame_orthonormal(inc, t):
    el = generate_walker(ConstellationConfig(4, 1, 0, inc))[1]
    m = satellite_frame(propagate(el, t))
    assert np.allclose(m @ m.T, np.eye(3), atol=1e-12)
    assert np.linalg.det(m) == pytest.approx(1.0, abs=1e-12)


def test_nadir_gu_has_zenith_elevation_and_nadir_direction():
    sat = SatelliteState(0, np.array([R_EARTH_KM + 1200.0, 0, 0]), np.array([0, 7.0, 0]))
    g = look_angles(sat, GroundUser(0, 0.0, 0.0))
    assert g.elevation_deg == pytest.approx(90.0)
    assert g.range_km == pytest.approx(1200.0)
    assert g.sat_elevation == pytest.approx(math.pi / 2)


def test_steering_angles_reconstruct_direction():
    sat = SatelliteState(0, np.array([R_EARTH_KM + 1200.0, 0, 0]), np.array([0, 7.0, 0]))
    gu = GroundUser(0, 3.0, 4.0)
    g = look_angles(sat, gu)
    d = satellite_frame(sat) @ (-g.direction)
    rebuilt = [math.cos(g.sat_elevation) * math.cos(g.sat_azimuth),
               math.cos(g.sat_elevation) * math.sin(g.sat_azimuth), math.sin(g.sat_elevation)]
    assert np.allclose(d, rebuilt)


@pytest.mark.parametrize("h,th,expected", [(1200.0, 10.0, 24.033), (600.0, 10.0, 15.836)])
def test_coverage_angle(h, th, expected):
    assert coverage_angle(h, th) == pytest.approx(expected, abs=1e-3)


def test_coverage_angle_matches_elevation_at_edge():
    phi = coverage_angle(1200.0, 10.0)
    sat = SatelliteState(0, np.array([R_EARTH_KM + 1200.0, 0, 0]), np.array([0, 7.0, 0]))
    el = elevation_matrix([sat], [GroundUser(0, 0.0, phi)])[0, 0]
    assert el == pytest.approx(10.0, abs=1e-9)


@given(st.floats(100, 3000), st.floats(0, 80), st.floats(0, 80))
@settings(max_examples=80)
def test_coverage_angle_monotone_in_threshold(h, a, b):
    lo, hi = sorted((a, b))
    assert coverage_angle(h, hi) <= coverage_angle(h, lo) + 1e-12


def test_visibility_threshold_is_closed():
    phi = coverage_angle(1200.0, 10.0)
    sat = SatelliteState(0, np.array([R_EARTH_KM + 1200.0, 0, 0]), np.array([0, 7.0, 0]))
    edge = GroundUser(0, 0.0, phi)
    el = elevation_matrix([sat], [edge])[0, 0]
    assert visibility([sat], [edge], theta_min_deg=el).mask[0, 0]
    assert not visibility([sat], [edge], theta_min_deg=el + 1e-9).sat_ids


def test_visibility_drops_unseen_satellites():
    near = SatelliteState(5, np.array([R_EARTH_KM + 1200.0, 0, 0]), np.array([0, 7.0, 0]))
    far = SatelliteState(9, np.array([-(R_EARTH_KM + 1200.0), 0, 0]), np.array([0, 7.0, 0]))
    vm = visibility([near, far], [GroundUser(0, 0.0, 0.0)])
    assert vm.sat_ids == [5]
    assert vm.visible_sats(0) == [5] and vm.candidate_gus(5) == [0]


def test_geodetic_and_haversine():
    assert np.allclose(geodetic_to_ecef(90.0, 0.0), [0, 0, R_EARTH_KM], atol=1e-9)
    assert great_circle_km(0, 0, 0, 90) == pytest.approx(math.pi / 2 * R_EARTH_KM)
    with pytest.raises(ValueError):
        geodetic_to_ecef(91.0, 0.0)


def test_epoch_shifts_propagation():
    a = generate_walker(ConstellationConfig(4, 2, 1, 53.0, epoch_s=600.0))[2]
    b = generate_walker(ConstellationConfig(4, 2, 1, 53.0))[2]
    assert np.allclose(propagate(a, 0.0).position, propagate(b, 600.0).position)
