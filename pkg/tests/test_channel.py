import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qcs_sim.channel import (
    ChannelParams,
    LinkDirection,
    eta_atmosphere,
    eta_free_space,
    gs_eta_two_way_arrays,
    intersat_eta_arrays,
    link_budget,
    two_way_ground_eta,
)
from qcs_sim.errors import NotVisibleError
from qcs_sim.linkgeom import LinkGeometry


def geom(range_m=500e3, elevation=90.0, visible=True):
    return LinkGeometry(visible=visible, range_m=range_m, v_rel_rad_m_s=0.0, elevation_deg=elevation)


class TestFreeSpace:
    def test_table_geometry(self):
        # theta = 810e-9/(pi*0.1) = 2.578e-6 rad; spot at 500 km = 1.289 m;
        # capture (0.6/1.289)^2 = 0.2166
        eta = eta_free_space(500e3, 0.10, 0.60, 810e-9)
        assert eta == pytest.approx(0.2166, abs=1e-3)

    def test_clamps_to_one(self):
        assert eta_free_space(10.0, 0.10, 0.60, 810e-9) == 1.0
        assert eta_free_space(0.0, 0.10, 0.60, 810e-9) == 1.0

    def test_inverse_square(self):
        e1 = eta_free_space(500e3, 0.10, 0.60, 810e-9)
        e4 = eta_free_space(2000e3, 0.10, 0.60, 810e-9)
        assert e1 / e4 == pytest.approx(16.0, rel=1e-12)


class TestAtmosphere:
    def test_zenith(self):
        assert eta_atmosphere(0.0, 0.5) == 0.5

    def test_sixty_degrees(self):
        # sec 60 = 2, so 0.5^2
        assert eta_atmosphere(math.radians(60), 0.5) == pytest.approx(0.25, rel=1e-12)

    def test_lossless(self):
        for z in np.linspace(0, math.radians(89), 20):
            assert eta_atmosphere(float(z), 1.0) == 1.0

    def test_below_horizon_rejected(self):
        with pytest.raises(ValueError):
            eta_atmosphere(math.pi / 2, 0.5)


class TestLinkBudget:
    def test_intersat_has_unit_atmosphere(self):
        b = link_budget(geom(4000e3, elevation=None), LinkDirection.INTERSAT, ChannelParams())
        assert b.eta_atm == 1.0
        assert b.eta_total == pytest.approx(b.eta_fs * 0.25, rel=1e-12)

    def test_downlink_at_zenith(self):
        # 0.2166 * 0.5 * 0.5 * 0.5 with the default channel constants
        b = link_budget(geom(), LinkDirection.DOWNLINK, ChannelParams())
        assert b.eta_total == pytest.approx(0.0271, abs=1e-3)

    def test_uplink_beats_downlink_with_bigger_ground_aperture(self):
        p = ChannelParams()  # r_tx_gs > r_tx_sat
        up = link_budget(geom(1000e3, 45.0), LinkDirection.UPLINK, p)
        down = link_budget(geom(1000e3, 45.0), LinkDirection.DOWNLINK, p)
        assert up.eta_fs >= down.eta_fs
        assert up.eta_total >= down.eta_total

    def test_symmetric_radii_make_directions_equal(self):
        p = ChannelParams(r_tx_sat_m=0.3, r_rx_sat_m=0.3, r_tx_gs_m=0.3, r_rx_gs_m=0.3)
        up = link_budget(geom(800e3, 30.0), LinkDirection.UPLINK, p)
        down = link_budget(geom(800e3, 30.0), LinkDirection.DOWNLINK, p)
        assert up.eta_total == pytest.approx(down.eta_total, rel=1e-12)

    def test_invisible_rejected(self):
        with pytest.raises(NotVisibleError):
            link_budget(geom(visible=False), LinkDirection.DOWNLINK, ChannelParams())

    @given(
        rng=st.floats(10e3, 4000e3),
        elev=st.floats(0.5, 90.0),
    )
    @settings(max_examples=200, deadline=None)
    def test_total_in_unit_interval(self, rng, elev):
        p = ChannelParams()
        for d in (LinkDirection.UPLINK, LinkDirection.DOWNLINK, LinkDirection.INTERSAT):
            b = link_budget(geom(rng, elev), d, p)
            assert 0.0 < b.eta_total <= 1.0
            assert not math.isnan(b.eta_total)
            assert b.eta_total <= min(b.eta_fs, b.eta_atm) + 1e-15

    def test_monotone_in_range(self):
        p = ChannelParams()
        etas = [
            link_budget(geom(r, 45.0), LinkDirection.DOWNLINK, p).eta_total
            for r in np.linspace(200e3, 3000e3, 50)
        ]
        assert all(a >= b for a, b in zip(etas, etas[1:]))


class TestArrayKernels:
    def test_two_way_matches_scalar(self):
        p = ChannelParams()
        rng = np.array([500e3, 900e3, 2200e3])
        cos_zen = np.array([1.0, 0.6, 0.2])
        arr = gs_eta_two_way_arrays(rng, cos_zen, p)
        for i in range(3):
            elev = math.degrees(math.asin(cos_zen[i]))
            g = geom(float(rng[i]), elev)
            assert arr[i] == pytest.approx(two_way_ground_eta(g, p), rel=1e-12)

    def test_two_way_zero_below_horizon(self):
        arr = gs_eta_two_way_arrays(np.array([1e6]), np.array([-0.1]), ChannelParams())
        assert arr[0] == 0.0

    def test_intersat_matches_scalar(self):
        p = ChannelParams()
        rng = np.array([30e3, 500e3, 4246e3])
        arr = intersat_eta_arrays(rng, p)
        for i in range(3):
            b = link_budget(geom(float(rng[i]), None), LinkDirection.INTERSAT, p)
            assert arr[i] == pytest.approx(b.eta_total, rel=1e-12)

    def test_params_validation(self):
        with pytest.raises(ValueError):
            ChannelParams(kappa_sat=0.0)
        with pytest.raises(ValueError):
            ChannelParams(eta_atm_zenith=1.5)
        with pytest.raises(ValueError):
            ChannelParams(wavelength_m=-1)
