"""Optical link transmittance: diffraction spread, atmosphere, detector losses.

The free-space and atmospheric forms are deliberately simple and isolated
here so they can be swapped without touching any other module: far-field
divergence theta = lambda / (pi * r_tx) with aperture capture clamped to 1,
and a flat-slab airmass law eta_zenith ** sec(zenith).
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from qcs_sim.errors import NotVisibleError
from qcs_sim.linkgeom import LinkGeometry


class LinkDirection(enum.Enum):
    UPLINK = "uplink"
    DOWNLINK = "downlink"
    INTERSAT = "intersat"


@dataclass(frozen=True)
class ChannelParams:
    """Optical loss constants for ground and satellite terminals."""

    wavelength_m: float = 810e-9
    r_tx_sat_m: float = 0.10
    r_rx_sat_m: float = 0.10
    r_tx_gs_m: float = 0.60
    r_rx_gs_m: float = 0.60
    kappa_sat: float = 0.5
    kappa_gs: float = 0.5
    eta_atm_zenith: float = 0.5
    pair_rate_hz: float = 1e7

    def __post_init__(self) -> None:
        for name in ("wavelength_m", "r_tx_sat_m", "r_rx_sat_m", "r_tx_gs_m", "r_rx_gs_m", "pair_rate_hz"):
            if not getattr(self, name) > 0:
                raise ValueError(f"ChannelParams.{name} must be positive")
        for name in ("kappa_sat", "kappa_gs", "eta_atm_zenith"):
            v = getattr(self, name)
            if not 0.0 < v <= 1.0:
                raise ValueError(f"ChannelParams.{name} must be in (0, 1]")


@dataclass(frozen=True)
class LinkBudget:
    """Composed transmittance factors for one link direction."""

    eta_fs: float
    eta_atm: float
    eta_total: float
    direction: LinkDirection


def eta_free_space(L: float, r_tx: float, r_rx: float, wavelength: float) -> float:
    """Diffraction-limited capture fraction of the receive aperture.

    Clamps to 1 when the beam spot is smaller than the receiver (including
    the degenerate co-located case L = 0).
    """
    if min(r_tx, r_rx, wavelength) <= 0 or L < 0:
        raise ValueError("apertures, wavelength must be positive and L >= 0")
    if L == 0.0:
        return 1.0
    theta = wavelength / (math.pi * r_tx)
    spot = L * theta
    return min(1.0, (r_rx / spot) ** 2)


def eta_atmosphere(zenith_angle_rad: float, eta_zenith: float) -> float:
    """Atmospheric transmittance along a slant path, flat-slab airmass model."""
    if not 0.0 < eta_zenith <= 1.0:
        raise ValueError("eta_zenith must be in (0, 1]")
    if not 0.0 <= zenith_angle_rad < math.pi / 2:
        raise ValueError("zenith angle must be in [0, pi/2); link is below the horizon")
    airmass = 1.0 / math.cos(zenith_angle_rad)
    return eta_zenith**airmass


def link_budget(geom: LinkGeometry, direction: LinkDirection, params: ChannelParams) -> LinkBudget:
    """Overall transmittance for a visible link in the given direction."""
    if not geom.visible:
        raise NotVisibleError("cannot budget an invisible link")
    if direction is LinkDirection.INTERSAT:
        fs = eta_free_space(geom.range_m, params.r_tx_sat_m, params.r_rx_sat_m, params.wavelength_m)
        return LinkBudget(fs, 1.0, fs * params.kappa_sat**2, direction)
    if geom.elevation_deg is None:
        raise ValueError("ground link budget needs an elevation angle")
    zenith = math.radians(90.0 - geom.elevation_deg)
    atm = eta_atmosphere(zenith, params.eta_atm_zenith)
    if direction is LinkDirection.UPLINK:
        fs = eta_free_space(geom.range_m, params.r_tx_gs_m, params.r_rx_sat_m, params.wavelength_m)
    else:
        fs = eta_free_space(geom.range_m, params.r_tx_sat_m, params.r_rx_gs_m, params.wavelength_m)
    return LinkBudget(fs, atm, fs * atm * params.kappa_sat * params.kappa_gs, direction)


def two_way_ground_eta(geom: LinkGeometry, params: ChannelParams) -> float:
    """Effective eta for the bidirectional pair exchange on a ground link.

    Both directions contribute one correlation peak each, so the geometric
    mean of the uplink and downlink budgets is used.
    """
    up = link_budget(geom, LinkDirection.UPLINK, params)
    down = link_budget(geom, LinkDirection.DOWNLINK, params)
    return math.sqrt(up.eta_total * down.eta_total)


# Vectorized kernels for the grid engine.

def gs_eta_two_way_arrays(rng: np.ndarray, cos_zen: np.ndarray, params: ChannelParams) -> np.ndarray:
    """Two-way effective eta on ground links; 0 where below horizon or underflowed."""
    theta_gs = params.wavelength_m / (math.pi * params.r_tx_gs_m)
    theta_sat = params.wavelength_m / (math.pi * params.r_tx_sat_m)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore", under="ignore"):
        fs_up = np.minimum(1.0, (params.r_rx_sat_m / (rng * theta_gs)) ** 2)
        fs_dn = np.minimum(1.0, (params.r_rx_gs_m / (rng * theta_sat)) ** 2)
        atm = np.where(cos_zen > 0.0, params.eta_atm_zenith ** (1.0 / np.maximum(cos_zen, 1e-300)), 0.0)
        eta = np.sqrt(fs_up * fs_dn) * atm * params.kappa_sat * params.kappa_gs
    return np.where(cos_zen > 0.0, eta, 0.0)


def intersat_eta_arrays(rng: np.ndarray, params: ChannelParams) -> np.ndarray:
    """One-way (= two-way) eta on inter-satellite links; atmosphere factor is 1."""
    theta_sat = params.wavelength_m / (math.pi * params.r_tx_sat_m)
    with np.errstate(divide="ignore", invalid="ignore"):
        fs = np.minimum(1.0, (params.r_rx_sat_m / (rng * theta_sat)) ** 2)
    fs = np.where(rng > 0.0, fs, 1.0)
    return fs * params.kappa_sat**2
