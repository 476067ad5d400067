"""Scenario configuration: JSON schema, strict validation, and hashing."""
from __future__ import annotations

import dataclasses
import hashlib
import json
import math
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from qcs_sim.channel import ChannelParams
from qcs_sim.errors import ScenarioError
from qcs_sim.geodesy import EarthModel, GroundStation
from qcs_sim.propagation import ConstellationSpec, OrbitSpec
from qcs_sim.qcsprotocol import PrecisionParams
from qcs_sim.syncnet import ClockModel


@dataclass(frozen=True)
class SimWindow:
    """Simulation time grid and RNG seed."""

    t_start_s: float = 0.0
    t_end_s: float = 86400.0
    dt_s: float = 1.0
    rng_seed: int = 0

    def __post_init__(self) -> None:
        if self.t_end_s <= self.t_start_s:
            raise ValueError("t_end_s must exceed t_start_s")
        if self.dt_s <= 0:
            raise ValueError("dt_s must be positive")

    def time_grid(self) -> np.ndarray:
        n = int(math.floor((self.t_end_s - self.t_start_s) / self.dt_s)) + 1
        return self.t_start_s + self.dt_s * np.arange(n)


@dataclass(frozen=True)
class Scenario:
    """Validated, immutable description of one simulation run."""

    earth: EarthModel
    constellation: ConstellationSpec
    stations: tuple[GroundStation, ...]
    channel: ChannelParams
    precision: PrecisionParams
    clock: ClockModel
    sim: SimWindow

    def station(self, name: str) -> GroundStation:
        for s in self.stations:
            if s.name == name:
                return s
        raise ScenarioError(f"scenario has no ground station named {name!r}")

    def with_sim(self, **kwargs) -> "Scenario":
        return dataclasses.replace(self, sim=dataclasses.replace(self.sim, **kwargs))

    def with_clock(self, **kwargs) -> "Scenario":
        return dataclasses.replace(self, clock=dataclasses.replace(self.clock, **kwargs))

    def to_dict(self) -> dict:
        return {
            "earth": dataclasses.asdict(self.earth),
            "constellation": {
                "orbits": [dataclasses.asdict(o) for o in self.constellation.orbits],
                "inter_orbit_phase_offset_deg": self.constellation.inter_orbit_phase_offset_deg,
            },
            "stations": [
                {
                    "name": s.name,
                    "lat_deg": s.latitude_deg,
                    "lon_deg": s.longitude_deg,
                    "alt_m": s.altitude_m,
                }
                for s in self.stations
            ],
            "channel": dataclasses.asdict(self.channel),
            "precision": dataclasses.asdict(self.precision),
            "clock": dataclasses.asdict(self.clock),
            "sim": dataclasses.asdict(self.sim),
        }

    def hash(self) -> str:
        canon = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canon.encode()).hexdigest()[:16]


_EARTH_KEYS = {"radius_m", "rotation_rate_rad_s", "mu_m3_s2", "atmosphere_thickness_m"}
_ORBIT_KEYS = {"altitude_m", "num_sats", "inclination_deg", "raan_deg", "phase_offset_deg"}
_CONST_KEYS = {"orbits", "inter_orbit_phase_offset_deg"}
_STATION_KEYS = {"name", "lat_deg", "lon_deg", "alt_m"}
_CHANNEL_KEYS = {
    "wavelength_m",
    "r_tx_sat_m",
    "r_rx_sat_m",
    "r_tx_gs_m",
    "r_rx_gs_m",
    "kappa_sat",
    "kappa_gs",
    "eta_atm_zenith",
    "pair_rate_hz",
}
_PRECISION_KEYS = {"n_min", "pair_rate_hz", "timestamp_jitter_s", "acquisition_time_s"}
_CLOCK_KEYS = {"holdover_s", "precision_s"}
_SIM_KEYS = {"t_start_s", "t_end_s", "dt_s", "rng_seed"}
_TOP_KEYS = {"earth", "constellation", "stations", "channel", "precision", "clock", "sim"}


def _check_keys(d: dict, allowed: set[str], path: str) -> None:
    if not isinstance(d, dict):
        raise ScenarioError(f"{path}: expected an object")
    unknown = set(d) - allowed
    if unknown:
        raise ScenarioError(f"{path}: unknown keys {sorted(unknown)}")


def _build(cls, d: dict, path: str):
    try:
        return cls(**d)
    except (TypeError, ValueError) as e:
        raise ScenarioError(f"{path}: {e}") from e


def scenario_from_dict(raw: dict, source: str = "<dict>") -> Scenario:
    _check_keys(raw, _TOP_KEYS, source)
    missing = {"constellation", "sim"} - set(raw)
    if missing:
        raise ScenarioError(f"{source}: missing required sections {sorted(missing)}")

    if "earth" in raw:
        _check_keys(raw["earth"], _EARTH_KEYS, f"{source}:earth")
    earth = _build(EarthModel, raw.get("earth", {}), f"{source}:earth")

    const_raw = raw["constellation"]
    _check_keys(const_raw, _CONST_KEYS, f"{source}:constellation")
    orbits_raw = const_raw.get("orbits")
    if not isinstance(orbits_raw, list) or not orbits_raw:
        raise ScenarioError(f"{source}:constellation.orbits must be a non-empty array")
    orbits = []
    for i, od in enumerate(orbits_raw):
        p = f"{source}:constellation.orbits[{i}]"
        _check_keys(od, _ORBIT_KEYS, p)
        for key in ("altitude_m", "num_sats"):
            if key not in od:
                raise ScenarioError(f"{p}.{key} is required")
        try:
            orbits.append(OrbitSpec(**od))
        except (TypeError, ValueError) as e:
            raise ScenarioError(f"{p}: {e}") from e
    constellation = _build(
        ConstellationSpec,
        {
            "orbits": tuple(orbits),
            "inter_orbit_phase_offset_deg": const_raw.get("inter_orbit_phase_offset_deg", 0.0),
        },
        f"{source}:constellation",
    )

    stations = []
    for i, sd in enumerate(raw.get("stations", [])):
        p = f"{source}:stations[{i}]"
        _check_keys(sd, _STATION_KEYS, p)
        try:
            stations.append(
                GroundStation(
                    name=sd.get("name", ""),
                    latitude_deg=sd.get("lat_deg", 0.0),
                    longitude_deg=sd.get("lon_deg", 0.0),
                    altitude_m=sd.get("alt_m", 0.0),
                )
            )
        except ValueError as e:
            raise ScenarioError(f"{p}: {e}") from e
    names = [s.name for s in stations]
    if len(set(names)) != len(names):
        raise ScenarioError(f"{source}:stations contains duplicate names")

    if "channel" in raw:
        _check_keys(raw["channel"], _CHANNEL_KEYS, f"{source}:channel")
    channel = _build(ChannelParams, raw.get("channel", {}), f"{source}:channel")
    if "precision" in raw:
        _check_keys(raw["precision"], _PRECISION_KEYS, f"{source}:precision")
    precision = _build(PrecisionParams, raw.get("precision", {}), f"{source}:precision")
    if "clock" in raw:
        _check_keys(raw["clock"], _CLOCK_KEYS, f"{source}:clock")
    clock = _build(ClockModel, raw.get("clock", {}), f"{source}:clock")
    _check_keys(raw["sim"], _SIM_KEYS, f"{source}:sim")
    sim = _build(SimWindow, raw["sim"], f"{source}:sim")

    return Scenario(
        earth=earth,
        constellation=constellation,
        stations=tuple(stations),
        channel=channel,
        precision=precision,
        clock=clock,
        sim=sim,
    )


def load_scenario(path: str | Path) -> Scenario:
    """Load and validate a scenario JSON file; unknown keys are rejected."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as e:
        raise ScenarioError(f"cannot read scenario file {path}: {e}") from e
    if not text.strip():
        raise ScenarioError(f"scenario file {path} is empty")
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as e:
        raise ScenarioError(f"scenario file {path} is not valid JSON: {e}") from e
    return scenario_from_dict(raw, source=str(path))


def bundled_scenario_path(name: str) -> Path:
    """Path of a scenario file shipped with the package (name without .json)."""
    base = resources.files("qcs_sim").joinpath("data", "scenarios", f"{name}.json")
    with resources.as_file(base) as p:
        return Path(p)


def bundled_city_catalog_path() -> Path:
    base = resources.files("qcs_sim").joinpath("data", "cities.json")
    with resources.as_file(base) as p:
        return Path(p)
