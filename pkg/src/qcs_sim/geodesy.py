"""Spherical Earth model, reference frames, and ground stations.

Two frames are used throughout: ECI (inertial, orbit planes fixed) and ECEF
(rotating with the Earth, stations fixed). The frames coincide at t = 0 and
ECEF rotates about +z at the sidereal rate.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

ECI = "ECI"
ECEF = "ECEF"


@dataclass(frozen=True)
class EarthModel:
    """Spherical Earth with a thin absorbing atmosphere shell."""

    radius_m: float = 6_371_000.0
    rotation_rate_rad_s: float = 7.2921159e-5  # sidereal
    mu_m3_s2: float = 3.986004418e14
    atmosphere_thickness_m: float = 10_000.0

    def __post_init__(self) -> None:
        for name in ("radius_m", "rotation_rate_rad_s", "mu_m3_s2", "atmosphere_thickness_m"):
            if not getattr(self, name) > 0:
                raise ValueError(f"EarthModel.{name} must be strictly positive")
        if self.atmosphere_thickness_m >= 0.01 * self.radius_m:
            raise ValueError("atmosphere_thickness_m must be small compared to radius_m")


@dataclass(frozen=True)
class Vec3:
    """Frame-tagged 3-vector (meters or m/s)."""

    x: float
    y: float
    z: float
    frame: str = ECI

    def __add__(self, other: "Vec3") -> "Vec3":
        self._check_frame(other)
        return Vec3(self.x + other.x, self.y + other.y, self.z + other.z, self.frame)

    def __sub__(self, other: "Vec3") -> "Vec3":
        self._check_frame(other)
        return Vec3(self.x - other.x, self.y - other.y, self.z - other.z, self.frame)

    def dot(self, other: "Vec3") -> float:
        self._check_frame(other)
        return self.x * other.x + self.y * other.y + self.z * other.z

    def cross(self, other: "Vec3") -> "Vec3":
        self._check_frame(other)
        return Vec3(
            self.y * other.z - self.z * other.y,
            self.z * other.x - self.x * other.z,
            self.x * other.y - self.y * other.x,
            self.frame,
        )

    def norm(self) -> float:
        return math.sqrt(self.x * self.x + self.y * self.y + self.z * self.z)

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z])

    @classmethod
    def from_array(cls, a, frame: str) -> "Vec3":
        return cls(float(a[0]), float(a[1]), float(a[2]), frame)

    def _check_frame(self, other: "Vec3") -> None:
        if self.frame != other.frame:
            raise ValueError(f"frame mismatch: {self.frame} vs {other.frame}")


@dataclass(frozen=True)
class GroundStation:
    """Named site fixed to the rotating Earth."""

    name: str
    latitude_deg: float
    longitude_deg: float
    altitude_m: float = 0.0

    def __post_init__(self) -> None:
        if not self.name:
            raise ValueError("ground station needs a non-empty name")
        if not -90.0 <= self.latitude_deg <= 90.0:
            raise ValueError(f"latitude_deg out of range for {self.name!r}: {self.latitude_deg}")
        if not -180.0 < self.longitude_deg <= 180.0:
            raise ValueError(f"longitude_deg out of range for {self.name!r}: {self.longitude_deg}")
        if self.altitude_m < 0:
            raise ValueError(f"altitude_m must be >= 0 for {self.name!r}")


def ecef_position(gs: GroundStation, earth: EarthModel) -> Vec3:
    """Earth-fixed position of a station on the spherical Earth."""
    r = earth.radius_m + gs.altitude_m
    lat = math.radians(gs.latitude_deg)
    lon = math.radians(gs.longitude_deg)
    return Vec3(
        r * math.cos(lat) * math.cos(lon),
        r * math.cos(lat) * math.sin(lon),
        r * math.sin(lat),
        ECEF,
    )


def ecef_to_eci(v: Vec3, t: float, earth: EarthModel) -> Vec3:
    """Rotate an Earth-fixed vector into the inertial frame at time t."""
    if v.frame != ECEF:
        raise ValueError("ecef_to_eci expects an ECEF vector")
    a = earth.rotation_rate_rad_s * t
    c, s = math.cos(a), math.sin(a)
    return Vec3(c * v.x - s * v.y, s * v.x + c * v.y, v.z, ECI)


def eci_to_ecef(v: Vec3, t: float, earth: EarthModel) -> Vec3:
    """Inverse of :func:`ecef_to_eci`."""
    if v.frame != ECI:
        raise ValueError("eci_to_ecef expects an ECI vector")
    a = earth.rotation_rate_rad_s * t
    c, s = math.cos(a), math.sin(a)
    return Vec3(c * v.x + s * v.y, -s * v.x + c * v.y, v.z, ECEF)


def station_eci_state(gs: GroundStation, t: float, earth: EarthModel) -> tuple[Vec3, Vec3]:
    """Inertial position and velocity of a station carried by Earth rotation.

    Velocity is omega x r for the Earth-fixed point.
    """
    pos = ecef_to_eci(ecef_position(gs, earth), t, earth)
    w = earth.rotation_rate_rad_s
    vel = Vec3(-w * pos.y, w * pos.x, 0.0, ECI)
    return pos, vel


def great_circle_distance(a: GroundStation, b: GroundStation, earth: EarthModel) -> float:
    """Spherical central-angle distance between two stations, in meters."""
    la, lb = math.radians(a.latitude_deg), math.radians(b.latitude_deg)
    dlon = math.radians(b.longitude_deg - a.longitude_deg)
    dlat = lb - la
    h = math.sin(dlat / 2) ** 2 + math.cos(la) * math.cos(lb) * math.sin(dlon / 2) ** 2
    return 2.0 * earth.radius_m * math.asin(min(1.0, math.sqrt(h)))


def load_station_catalog(path: str | Path) -> list[GroundStation]:
    """Load a JSON array of {name, lat_deg, lon_deg, alt_m} records."""
    raw = json.loads(Path(path).read_text())
    if not isinstance(raw, list):
        raise ValueError(f"station catalog {path} must be a JSON array")
    stations = []
    for i, rec in enumerate(raw):
        extra = set(rec) - {"name", "lat_deg", "lon_deg", "alt_m"}
        if extra:
            raise ValueError(f"station catalog entry {i} has unknown keys: {sorted(extra)}")
        stations.append(
            GroundStation(
                name=rec["name"],
                latitude_deg=rec["lat_deg"],
                longitude_deg=rec["lon_deg"],
                altitude_m=rec.get("alt_m", 0.0),
            )
        )
    names = [s.name for s in stations]
    if len(set(names)) != len(names):
        raise ValueError("station catalog contains duplicate names")
    return stations


# Array helpers used by the grid engine. All angles in radians internally.

def station_ecef_array(gs: GroundStation, earth: EarthModel) -> np.ndarray:
    p = ecef_position(gs, earth)
    return np.array([p.x, p.y, p.z])


def station_eci_arrays(
    gs: GroundStation, times: np.ndarray, earth: EarthModel
) -> tuple[np.ndarray, np.ndarray]:
    """Station inertial position and velocity sampled at an array of times.

    Returns (pos, vel) with shape (len(times), 3).
    """
    p = station_ecef_array(gs, earth)
    a = earth.rotation_rate_rad_s * np.asarray(times, dtype=float)
    c, s = np.cos(a), np.sin(a)
    pos = np.stack([c * p[0] - s * p[1], s * p[0] + c * p[1], np.full_like(a, p[2])], axis=-1)
    w = earth.rotation_rate_rad_s
    vel = np.stack([-w * pos[..., 1], w * pos[..., 0], np.zeros_like(a)], axis=-1)
    return pos, vel
