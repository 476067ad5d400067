import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qcs_sim.geodesy import (
    ECEF,
    ECI,
    EarthModel,
    GroundStation,
    Vec3,
    ecef_position,
    ecef_to_eci,
    eci_to_ecef,
    great_circle_distance,
    load_station_catalog,
    station_eci_state,
)

R_E = 6_371_000.0


def gs(lat, lon, alt=0.0, name="x"):
    return GroundStation(name, lat, lon, alt)


class TestEcefPosition:
    def test_equator_prime_meridian(self, earth):
        p = ecef_position(gs(0, 0), earth)
        assert (p.x, p.y, p.z) == pytest.approx((R_E, 0, 0), abs=1e-6)

    def test_north_pole(self, earth):
        p = ecef_position(gs(90, 0), earth)
        assert (p.x, p.y, p.z) == pytest.approx((0, 0, R_E), abs=1e-6)

    def test_mid_latitude(self, earth):
        # hand evaluation: R cos45 cos45 = R/2, z = R sin45
        p = ecef_position(gs(45, 45), earth)
        assert p.x == pytest.approx(3_185_500.0, abs=1.0)
        assert p.y == pytest.approx(3_185_500.0, abs=1.0)
        assert p.z == pytest.approx(4_504_977.3, abs=1.0)

    @given(
        lat=st.floats(-90, 90),
        lon=st.floats(-179.999, 180),
        alt=st.floats(0, 10_000),
    )
    @settings(max_examples=100, deadline=None)
    def test_norm_is_radius_plus_altitude(self, lat, lon, alt):
        earth = EarthModel()
        p = ecef_position(gs(lat, lon, alt), earth)
        assert p.norm() == pytest.approx(R_E + alt, rel=1e-12)


class TestFrameRotation:
    def test_identity_at_epoch(self, earth):
        v = Vec3(1.0, 2.0, 3.0, ECEF)
        r = ecef_to_eci(v, 0.0, earth)
        assert (r.x, r.y, r.z) == (1.0, 2.0, 3.0)
        assert r.frame == ECI

    def test_quarter_sidereal_day(self, earth):
        quarter = (2 * math.pi / earth.rotation_rate_rad_s) / 4
        r = ecef_to_eci(Vec3(R_E, 0, 0, ECEF), quarter, earth)
        assert abs(r.x) < 1e-6 * R_E
        assert r.y == pytest.approx(R_E, rel=1e-9)

    def test_equatorial_station_speed(self, earth):
        # omega_E * R_E = 7.2921159e-5 * 6371e3 = 464.58 m/s
        _, vel = station_eci_state(gs(0, 0), 1234.5, earth)
        assert vel.norm() == pytest.approx(464.6, abs=0.1)

    @given(
        lat=st.floats(-90, 90),
        lon=st.floats(-179.999, 180),
        t=st.floats(0, 2 * 86400),
    )
    @settings(max_examples=100, deadline=None)
    def test_round_trip(self, lat, lon, t):
        earth = EarthModel()
        p = ecef_position(gs(lat, lon), earth)
        back = eci_to_ecef(ecef_to_eci(p, t, earth), t, earth)
        assert np.allclose(back.as_array(), p.as_array(), rtol=1e-9, atol=1e-3)

    def test_frame_mismatch_rejected(self, earth):
        with pytest.raises(ValueError):
            ecef_to_eci(Vec3(1, 0, 0, ECI), 0.0, earth)
        with pytest.raises(ValueError):
            Vec3(1, 0, 0, ECI).dot(Vec3(1, 0, 0, ECEF))


class TestGreatCircle:
    def test_identical_stations(self, earth):
        a = gs(12.3, 45.6)
        assert great_circle_distance(a, a, earth) == 0.0

    def test_antipodes(self, earth):
        d = great_circle_distance(gs(0, 0), gs(0, 180), earth)
        assert d == pytest.approx(math.pi * R_E, rel=1e-12)

    def test_new_york_to_beijing(self, earth):
        # public geodata: roughly 11 000 km between the two cities
        d = great_circle_distance(gs(40.7128, -74.006), gs(39.9042, 116.4074), earth)
        assert d == pytest.approx(11_000e3, rel=0.05)

    @given(
        lats=st.lists(st.floats(-89, 89), min_size=3, max_size=3),
        lons=st.lists(st.floats(-179, 180), min_size=3, max_size=3),
    )
    @settings(max_examples=100, deadline=None)
    def test_symmetry_and_triangle_inequality(self, lats, lons):
        earth = EarthModel()
        a, b, c = (gs(lats[i], lons[i]) for i in range(3))
        dab = great_circle_distance(a, b, earth)
        assert dab == great_circle_distance(b, a, earth)
        assert dab <= great_circle_distance(a, c, earth) + great_circle_distance(c, b, earth) + 1e-6


class TestValidation:
    def test_latitude_range(self):
        with pytest.raises(ValueError):
            gs(91, 0)

    def test_longitude_half_open(self):
        with pytest.raises(ValueError):
            gs(0, -180)
        gs(0, 180)  # the closed end is valid

    def test_earth_positivity(self):
        with pytest.raises(ValueError):
            EarthModel(radius_m=-1)
        with pytest.raises(ValueError):
            EarthModel(atmosphere_thickness_m=1e6)


class TestCatalog:
    def test_load_catalog(self, tmp_path):
        path = tmp_path / "cat.json"
        path.write_text(json.dumps([{"name": "A", "lat_deg": 1, "lon_deg": 2, "alt_m": 3}]))
        (st0,) = load_station_catalog(path)
        assert st0.name == "A" and st0.altitude_m == 3

    def test_bundled_cities(self):
        from qcs_sim.scenario import bundled_city_catalog_path

        cities = load_station_catalog(bundled_city_catalog_path())
        names = {c.name for c in cities}
        assert {"NewYork", "Beijing", "PuertoMontt", "Sydney"} <= names

    def test_duplicate_names_rejected(self, tmp_path):
        path = tmp_path / "cat.json"
        rec = {"name": "A", "lat_deg": 1, "lon_deg": 2, "alt_m": 0}
        path.write_text(json.dumps([rec, rec]))
        with pytest.raises(ValueError):
            load_station_catalog(path)
