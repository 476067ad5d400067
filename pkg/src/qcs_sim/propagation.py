"""Constellation generation and closed-form circular-orbit propagation."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from qcs_sim.geodesy import ECI, EarthModel, Vec3


@dataclass(frozen=True)
class OrbitSpec:
    """A ring of equally spaced satellites on one circular orbit."""

    altitude_m: float
    num_sats: int
    inclination_deg: float = 90.0
    raan_deg: float = 0.0
    phase_offset_deg: float = 0.0  # initial polar angle of satellite 0

    def __post_init__(self) -> None:
        if self.altitude_m <= 0:
            raise ValueError("altitude_m must be positive")
        if self.num_sats < 1:
            raise ValueError("num_sats must be >= 1")


@dataclass(frozen=True)
class ConstellationSpec:
    """Ordered set of orbits, with a cumulative phase stagger between them."""

    orbits: tuple[OrbitSpec, ...]
    inter_orbit_phase_offset_deg: float = 0.0

    def __post_init__(self) -> None:
        if not self.orbits:
            raise ValueError("constellation needs at least one orbit")
        object.__setattr__(self, "orbits", tuple(self.orbits))

    @property
    def num_sats(self) -> int:
        return sum(o.num_sats for o in self.orbits)

    def sat_ids(self) -> list[tuple[int, int]]:
        return [(k, j) for k, o in enumerate(self.orbits) for j in range(o.num_sats)]

    def max_adjacent_raan_gap_deg(self) -> float:
        if len(self.orbits) < 2:
            return 0.0
        gaps = [
            abs(self.orbits[k + 1].raan_deg - self.orbits[k].raan_deg)
            for k in range(len(self.orbits) - 1)
        ]
        return max(gaps)

    def check_inter_orbit_visibility(self, earth: EarthModel) -> None:
        """Verify adjacent orbits are close enough for conjugate-pair visibility.

        The worst case is near the equator, where conjugate satellites are
        separated by roughly the RAAN gap; that central angle must stay below
        the same-altitude visibility threshold.
        """
        for k in range(len(self.orbits) - 1):
            a, b = self.orbits[k], self.orbits[k + 1]
            if a.num_sats != b.num_sats:
                raise ValueError(
                    f"orbits {k} and {k + 1} have different satellite counts; "
                    "conjugate pairing requires equal counts"
                )
            h = min(a.altitude_m, b.altitude_m)
            limit = 2.0 * math.degrees(
                math.acos(
                    (earth.radius_m + earth.atmosphere_thickness_m) / (earth.radius_m + h)
                )
            )
            gap = abs(b.raan_deg - a.raan_deg)
            if gap > limit:
                raise ValueError(
                    f"RAAN gap {gap:.2f} deg between orbits {k} and {k + 1} exceeds the "
                    f"conjugate visibility limit {limit:.2f} deg at {h / 1e3:.0f} km"
                )


@dataclass(frozen=True)
class SatelliteState:
    """Instantaneous inertial state of one satellite."""

    sat_id: tuple[int, int]
    position: Vec3
    velocity: Vec3
    angular_velocity: Vec3


def orbital_period(spec: OrbitSpec, earth: EarthModel) -> float:
    """Keplerian period of a circular orbit: 2*pi*sqrt(a^3/mu)."""
    a = earth.radius_m + spec.altitude_m
    return 2.0 * math.pi * math.sqrt(a**3 / earth.mu_m3_s2)


def _plane_basis(orbit: OrbitSpec) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """In-plane unit vectors (toward ascending node, 90 deg ahead) and the normal."""
    raan = math.radians(orbit.raan_deg)
    inc = math.radians(orbit.inclination_deg)
    p = np.array([math.cos(raan), math.sin(raan), 0.0])
    q = np.array([-math.sin(raan) * math.cos(inc), math.cos(raan) * math.cos(inc), math.sin(inc)])
    w = np.cross(p, q)
    return p, q, w


def _initial_phases_rad(spec: ConstellationSpec, orbit_index: int) -> np.ndarray:
    orbit = spec.orbits[orbit_index]
    base = orbit.phase_offset_deg + orbit_index * spec.inter_orbit_phase_offset_deg
    slots = base + 360.0 * np.arange(orbit.num_sats) / orbit.num_sats
    return np.radians(slots)


def propagate_grid(
    spec: ConstellationSpec, times: np.ndarray, earth: EarthModel
) -> tuple[np.ndarray, np.ndarray]:
    """Positions and velocities for every satellite at every sample time.

    Returns (pos, vel) with shape (num_sats, len(times), 3), satellites ordered
    as in ``spec.sat_ids()``. Closed-form evaluation; bitwise deterministic.
    """
    times = np.asarray(times, dtype=float)
    pos = np.empty((spec.num_sats, times.size, 3))
    vel = np.empty_like(pos)
    row = 0
    for k, orbit in enumerate(spec.orbits):
        a = earth.radius_m + orbit.altitude_m
        n = math.sqrt(earth.mu_m3_s2 / a**3)
        p, q, _ = _plane_basis(orbit)
        u = _initial_phases_rad(spec, k)[:, None] + n * times[None, :]
        cu, su = np.cos(u), np.sin(u)
        pos[row : row + orbit.num_sats] = a * (cu[..., None] * p + su[..., None] * q)
        vel[row : row + orbit.num_sats] = a * n * (-su[..., None] * p + cu[..., None] * q)
        row += orbit.num_sats
    return pos, vel


def propagate(spec: ConstellationSpec, t: float, earth: EarthModel) -> list[SatelliteState]:
    """Constellation state at a single time, as frame-tagged satellite states."""
    if t < 0:
        raise ValueError("t must be >= 0")
    pos, vel = propagate_grid(spec, np.array([t]), earth)
    states = []
    for row, sat_id in enumerate(spec.sat_ids()):
        orbit = spec.orbits[sat_id[0]]
        a = earth.radius_m + orbit.altitude_m
        n = math.sqrt(earth.mu_m3_s2 / a**3)
        _, _, w = _plane_basis(orbit)
        states.append(
            SatelliteState(
                sat_id=sat_id,
                position=Vec3.from_array(pos[row, 0], ECI),
                velocity=Vec3.from_array(vel[row, 0], ECI),
                angular_velocity=Vec3.from_array(n * w, ECI),
            )
        )
    return states
