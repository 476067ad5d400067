"""Per-instant link geometry: visibility, slant range, relative radial velocity."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from qcs_sim.errors import NotVisibleError
from qcs_sim.geodesy import EarthModel, Vec3


@dataclass(frozen=True)
class EndpointState:
    """Resolved inertial state of one party (satellite or ground station)."""

    name: str
    position: Vec3
    velocity: Vec3
    is_ground: bool


@dataclass(frozen=True)
class LinkEndpoints:
    a: EndpointState
    b: EndpointState

    def __post_init__(self) -> None:
        if self.a.name == self.b.name:
            raise ValueError("link endpoints must be distinct")


@dataclass(frozen=True)
class LinkGeometry:
    """Geometric evaluation of a link at one instant.

    ``elevation_deg`` is only meaningful for ground-satellite links. When
    ``visible`` is False the downstream channel quantities are undefined.
    """

    visible: bool
    range_m: float
    v_rel_rad_m_s: float  # positive when the range is increasing
    elevation_deg: float | None = None


def shadow_angle(h: float, earth: EarthModel) -> float:
    """Half-angle (degrees) below which the Earth blocks a ring neighbor.

    Defined by arcsin(R_E / (R_E + h)); governs how many satellites a ring
    needs for uninterrupted nearest-neighbor visibility.
    """
    if h <= 0:
        raise ValueError("h must be positive")
    return math.degrees(math.asin(earth.radius_m / (earth.radius_m + h)))


def gs_sat_visible(gs_pos: Vec3, sat_pos: Vec3) -> bool:
    """True when the satellite sits strictly above the station's horizon plane."""
    d = sat_pos - gs_pos
    return d.dot(gs_pos) > 0.0


def sat_sat_visible(a_pos: Vec3, b_pos: Vec3, earth: EarthModel) -> bool:
    """True when the sight line clears the atmosphere shell.

    The minimum distance from Earth's center to the segment joining the
    satellites must exceed R_E + atmosphere thickness. For equal altitudes
    the closest point is the segment midpoint.
    """
    p = a_pos.as_array()
    q = b_pos.as_array()
    d = q - p
    dd = float(d @ d)
    if dd == 0.0:
        return True
    t = float(np.clip(-(p @ d) / dd, 0.0, 1.0))
    closest = p + t * d
    return float(np.linalg.norm(closest)) > earth.radius_m + earth.atmosphere_thickness_m


def relative_radial_velocity(a: EndpointState, b: EndpointState) -> float:
    """Range rate between two parties, positive when receding.

    Equals d|r_a - r_b|/dt with each party's velocity generated by its own
    rotation (omega x r): the orbital motion for satellites, Earth rotation
    for ground stations.
    """
    d = a.position - b.position
    dist = d.norm()
    if dist == 0.0:
        raise ValueError("endpoints are coincident; radial velocity undefined")
    dv = a.velocity - b.velocity
    return dv.dot(d) / dist


def gs_sat_geometry(gs: EndpointState, sat: EndpointState) -> LinkGeometry:
    """Geometry of a ground-satellite link (elevation included)."""
    d = sat.position - gs.position
    dist = d.norm()
    cos_zenith = d.dot(gs.position) / (dist * gs.position.norm())
    visible = cos_zenith > 0.0
    elevation = math.degrees(math.asin(max(-1.0, min(1.0, cos_zenith))))
    return LinkGeometry(
        visible=visible,
        range_m=dist,
        v_rel_rad_m_s=relative_radial_velocity(gs, sat),
        elevation_deg=elevation,
    )


def sat_sat_geometry(a: EndpointState, b: EndpointState, earth: EarthModel) -> LinkGeometry:
    """Geometry of an inter-satellite link."""
    d = a.position - b.position
    return LinkGeometry(
        visible=sat_sat_visible(a.position, b.position, earth),
        range_m=d.norm(),
        v_rel_rad_m_s=relative_radial_velocity(a, b),
        elevation_deg=None,
    )


def require_visible(geom: LinkGeometry, what: str = "link") -> LinkGeometry:
    if not geom.visible:
        raise NotVisibleError(f"{what} is not visible")
    return geom


# Vectorized kernels shared by the grid engine. Shapes: ground arrays are
# (T, 3); satellite arrays are (S, T, 3). Outputs are (S, T).

def gs_sat_link_arrays(
    gs_pos: np.ndarray,
    gs_vel: np.ndarray,
    sat_pos: np.ndarray,
    sat_vel: np.ndarray,
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Visibility mask, slant range, radial velocity, and zenith cosine."""
    d = sat_pos - gs_pos[None, :, :]
    rng = np.linalg.norm(d, axis=-1)
    gs_r = np.linalg.norm(gs_pos, axis=-1)
    cos_zen = np.einsum("stk,tk->st", d, gs_pos) / (rng * gs_r[None, :])
    visible = cos_zen > 0.0
    v_rad = np.einsum("stk,stk->st", sat_vel - gs_vel[None, :, :], d) / rng
    return visible, rng, v_rad, cos_zen


def sat_sat_link_arrays(
    a_pos: np.ndarray,
    a_vel: np.ndarray,
    b_pos: np.ndarray,
    b_vel: np.ndarray,
    earth: EarthModel,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Visibility mask, range, and radial velocity for paired satellite arrays.

    ``a_pos`` and ``b_pos`` must have matching shapes (..., 3).
    """
    d = b_pos - a_pos
    dd = np.einsum("...k,...k->...", d, d)
    rng = np.sqrt(dd)
    with np.errstate(invalid="ignore", divide="ignore"):
        t = np.clip(-np.einsum("...k,...k->...", a_pos, d) / dd, 0.0, 1.0)
    t = np.where(dd > 0.0, t, 0.0)
    closest = a_pos + t[..., None] * d
    min_center_dist = np.linalg.norm(closest, axis=-1)
    visible = min_center_dist > earth.radius_m + earth.atmosphere_thickness_m
    with np.errstate(invalid="ignore", divide="ignore"):
        v_rad = np.einsum("...k,...k->...", a_vel - b_vel, a_pos - b_pos) / rng
    v_rad = np.where(rng > 0.0, v_rad, 0.0)
    return visible, rng, v_rad
