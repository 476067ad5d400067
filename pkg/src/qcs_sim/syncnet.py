"""Network-level synchronization: holdover windows, relay chains, and traces.

The grid engine evaluates, for every simulation step, the best achievable
pair precision under three relay policies: a single common satellite, any
satellites sharing one orbit (ring synced at the jitter floor), and the full
constellation bridged through conjugate-pair inter-orbit links. Effective
chain precision is the worst link of the chain; holdover lets the two
ground-link events sit anywhere inside a centered time window.

Inter-orbit sync opportunities can be much narrower than the sampling step
(the radial-velocity zero crossings near the equator last well under a
second), so event detection refines every sign change of the conjugate-pair
radial velocity instead of trusting grid samples alone.
"""
from __future__ import annotations

import enum
import math
import re
from dataclasses import dataclass, field

import numpy as np

from qcs_sim.channel import gs_eta_two_way_arrays, intersat_eta_arrays, two_way_ground_eta
from qcs_sim.errors import NoPathError, NotVisibleError
from qcs_sim.geodesy import ECI, Vec3, station_eci_arrays
from qcs_sim.linkgeom import (
    EndpointState,
    gs_sat_geometry,
    gs_sat_link_arrays,
    sat_sat_link_arrays,
    sat_sat_visible,
)
from qcs_sim.propagation import _initial_phases_rad, _plane_basis, propagate_grid
from qcs_sim.qcsprotocol import t_bin, t_bin_arrays
from qcs_sim.sliding import rolling_any, rolling_min_argmin


@dataclass(frozen=True)
class ClockModel:
    """Worst-case clock: precision C inside any interval <= tau, unusable beyond."""

    holdover_s: float = 0.0
    precision_s: float = 1e-9

    def __post_init__(self) -> None:
        if self.holdover_s < 0:
            raise ValueError("holdover_s must be >= 0")
        if self.precision_s <= 0:
            raise ValueError("precision_s must be > 0")


class SyncMode(enum.Enum):
    SINGLE_SATELLITE = "single"
    INTRA_ORBIT = "intra"
    FULL = "full"


class StatusCode(enum.Enum):
    OK = "OK"
    NOT_VISIBLE = "NOT_VISIBLE"
    NO_PATH = "NO_PATH"


_STATUS_BY_INT = {0: StatusCode.OK, 1: StatusCode.NOT_VISIBLE, 2: StatusCode.NO_PATH}


@dataclass(frozen=True)
class WitnessLink:
    """One link of a sync chain, replayable from its stated time."""

    kind: str  # "gs" | "ring" | "isl"
    station: str | None
    sat_a: tuple[int, int] | None
    sat_b: tuple[int, int] | None
    t_s: float | None
    t_bin_s: float = 0.0

    def to_string(self) -> str:
        if self.kind == "gs":
            return f"{self.station}~s{self.sat_a[0]}:{self.sat_a[1]}@{self.t_s!r}={self.t_bin_s!r}"
        if self.kind == "ring":
            return f"ring{self.sat_a[0]}={self.t_bin_s!r}"
        return (
            f"s{self.sat_a[0]}:{self.sat_a[1]}~s{self.sat_b[0]}:{self.sat_b[1]}"
            f"@{self.t_s!r}={self.t_bin_s!r}"
        )

    _GS_RE = re.compile(r"^(?P<gs>[^~@=]+)~s(?P<o>\d+):(?P<j>\d+)@(?P<t>[^=]+)=(?P<v>.+)$")
    _RING_RE = re.compile(r"^ring(?P<o>\d+)=(?P<v>.+)$")
    _ISL_RE = re.compile(
        r"^s(?P<oa>\d+):(?P<ja>\d+)~s(?P<ob>\d+):(?P<jb>\d+)@(?P<t>[^=]+)=(?P<v>.+)$"
    )

    @classmethod
    def from_string(cls, s: str) -> "WitnessLink":
        m = cls._RING_RE.match(s)
        if m:
            return cls("ring", None, (int(m["o"]), 0), None, None, float(m["v"]))
        m = cls._ISL_RE.match(s)
        if m:
            return cls(
                "isl",
                None,
                (int(m["oa"]), int(m["ja"])),
                (int(m["ob"]), int(m["jb"])),
                float(m["t"]),
                float(m["v"]),
            )
        m = cls._GS_RE.match(s)
        if m:
            return cls("gs", m["gs"], (int(m["o"]), int(m["j"])), None, float(m["t"]), float(m["v"]))
        raise ValueError(f"unparseable witness link: {s!r}")


@dataclass(frozen=True)
class PrecisionSample:
    """Pair precision at one instant, with the chain that achieves it."""

    t_s: float
    t_bin_s: float  # +inf when status is not OK
    status: StatusCode
    witness: tuple[WitnessLink, ...] = ()


@dataclass
class PrecisionTrace:
    """Time series of pair precision over the simulation window."""

    station_a: str
    station_b: str
    mode: SyncMode
    holdover_s: float
    dt_s: float
    t_s: np.ndarray
    t_bin_s: np.ndarray
    status: np.ndarray  # int8 codes, see _STATUS_BY_INT
    scenario_hash: str = ""
    _witness: "_WitnessData | None" = None

    def __len__(self) -> int:
        return self.t_s.size

    def neg_log10(self) -> np.ndarray:
        with np.errstate(divide="ignore"):
            return np.where(np.isfinite(self.t_bin_s), -np.log10(self.t_bin_s), np.nan)

    def status_at(self, i: int) -> StatusCode:
        return _STATUS_BY_INT[int(self.status[i])]

    def witness_at(self, i: int) -> tuple[WitnessLink, ...]:
        if self.status[i] != 0 or self._witness is None:
            return ()
        return self._witness.links(i)

    def sample(self, i: int) -> PrecisionSample:
        return PrecisionSample(
            t_s=float(self.t_s[i]),
            t_bin_s=float(self.t_bin_s[i]),
            status=self.status_at(i),
            witness=self.witness_at(i),
        )

    def samples(self):
        for i in range(len(self)):
            yield self.sample(i)

    def write_csv(self, path, header_lines: tuple[str, ...] = ()) -> None:
        neg = self.neg_log10()
        with open(path, "w") as f:
            for line in header_lines:
                f.write(f"# {line}\n")
            f.write("t_s,t_bin_s,neg_log10_tbin,status,witness\n")
            for i in range(len(self)):
                ok = self.status[i] == 0
                tb = f"{float(self.t_bin_s[i])!r}" if ok else ""
                nl = f"{float(neg[i])!r}" if ok else ""
                wit = "|".join(l.to_string() for l in self.witness_at(i))
                f.write(f"{float(self.t_s[i])!r},{tb},{nl},{self.status_at(i).value},{wit}\n")


@dataclass
class _WitnessData:
    """Argmin bookkeeping to reconstruct the winning chain of any sample."""

    engine: "SyncEngine"
    station_a: str
    station_b: str
    family: np.ndarray  # 0 single-sat, 1 intra, 2 full
    # single-satellite family
    sat_best: np.ndarray
    ia: np.ndarray
    ib: np.ndarray
    va: np.ndarray
    vb: np.ndarray
    # intra / full families (orbit-level windows)
    o1: np.ndarray
    o2: np.ndarray
    oa_idx: np.ndarray  # (O, T_day) windowed argmin time index (extended-grid coords)
    ob_idx: np.ndarray
    oa_sat: np.ndarray  # (O, T_ext) slot achieving the per-orbit minimum at each instant
    ob_sat: np.ndarray
    oa_val: np.ndarray
    ob_val: np.ndarray
    bridge_idx: np.ndarray | None  # (P, T)
    bridge_k: np.ndarray | None
    bridge_val: np.ndarray | None

    def links(self, i: int) -> tuple[WitnessLink, ...]:
        eng = self.engine
        times = eng.times
        fam = int(self.family[i])
        floor = eng.precision.timestamp_jitter_s
        if fam == 0:
            sid = eng.sat_ids[int(self.sat_best[i])]
            ta, tb = float(times[self.ia[i]]), float(times[self.ib[i]])
            return (
                WitnessLink("gs", self.station_a, sid, None, ta, float(self.va[i])),
                WitnessLink("gs", self.station_b, sid, None, tb, float(self.vb[i])),
            )
        o1, o2 = int(self.o1[i]), int(self.o2[i])
        ja = int(self.oa_sat[o1, self.oa_idx[o1, i]])
        jb = int(self.ob_sat[o2, self.ob_idx[o2, i]])
        links = [
            WitnessLink(
                "gs",
                self.station_a,
                (o1, ja),
                None,
                float(times[self.oa_idx[o1, i]]),
                float(self.oa_val[o1, i]),
            )
        ]
        lo, hi = min(o1, o2), max(o1, o2)
        links.append(WitnessLink("ring", None, (o1, 0), None, None, floor))
        if o1 != o2:
            for p in range(lo, hi):
                k = int(self.bridge_k[p, i])
                tb = float(times[self.bridge_idx[p, i]])
                links.append(
                    WitnessLink("isl", None, (p, k), (p + 1, k), tb, float(self.bridge_val[p, i]))
                )
            links.append(WitnessLink("ring", None, (o2, 0), None, None, floor))
        links.append(
            WitnessLink(
                "gs",
                self.station_b,
                (o2, jb),
                None,
                float(times[self.ob_idx[o2, i]]),
                float(self.ob_val[o2, i]),
            )
        )
        return tuple(links)


@dataclass
class _StationGrid:
    tbin: np.ndarray  # (S, T), +inf where link unusable
    visible_any: np.ndarray  # (T,)


@dataclass
class _IntersatSeries:
    tbin_best: np.ndarray  # (T,)
    best_k: np.ndarray  # (T,)
    v_rad: np.ndarray  # (K, T) float32, for event bracketing
    visible: np.ndarray  # (K, T)


class SyncEngine:
    """Caches per-scenario grids so repeated pair/mode/holdover queries are cheap."""

    CHUNK = 16384

    def __init__(self, scenario):
        from qcs_sim.propagation import orbital_period

        self.sc = scenario
        self.earth = scenario.earth
        self.const = scenario.constellation
        self.channel = scenario.channel
        self.precision = scenario.precision
        self.day_times = scenario.sim.time_grid()
        self.dt = scenario.sim.dt_s
        # The constellation is periodic, so holdover windows near the day
        # edges legitimately rest on sync moments just outside the simulated
        # day. Grids carry one orbital period of padding on each side and
        # results are reported on the day slice only.
        pad_s = max(orbital_period(o, self.earth) for o in self.const.orbits)
        self.pad_n = int(math.ceil(pad_s / self.dt))
        n_ext = self.day_times.size + 2 * self.pad_n
        self.times = (self.day_times[0] - self.pad_n * self.dt) + self.dt * np.arange(n_ext)
        self.day = slice(self.pad_n, self.pad_n + self.day_times.size)
        self.sat_ids = self.const.sat_ids()
        self.orbit_rows = []
        row = 0
        for o in self.const.orbits:
            self.orbit_rows.append((row, row + o.num_sats))
            row += o.num_sats
        self._stations = {s.name: s for s in scenario.stations}
        self._grids: dict[str, _StationGrid] = {}
        self._intersat: dict[int, _IntersatSeries] = {}
        self._events: dict[tuple[int, float], np.ndarray] = {}
        self._rings: list[bool] | None = None

    # -- grids ------------------------------------------------------------

    def station(self, name: str):
        try:
            return self._stations[name]
        except KeyError:
            raise NoPathError(f"unknown ground station {name!r}") from None

    def station_grid(self, name: str) -> _StationGrid:
        if name not in self._grids:
            gs = self.station(name)
            T = self.times.size
            S = self.const.num_sats
            tbin = np.empty((S, T))
            vis_any = np.zeros(T, dtype=bool)
            for lo in range(0, T, self.CHUNK):
                sl = slice(lo, min(lo + self.CHUNK, T))
                spos, svel = propagate_grid(self.const, self.times[sl], self.earth)
                gpos, gvel = station_eci_arrays(gs, self.times[sl], self.earth)
                visible, rng, v_rad, cos_zen = gs_sat_link_arrays(gpos, gvel, spos, svel)
                eta = gs_eta_two_way_arrays(rng, cos_zen, self.channel)
                tb = t_bin_arrays(v_rad, eta, self.precision)
                tb[~visible] = np.inf
                tbin[:, sl] = tb
                vis_any[sl] = visible.any(axis=0)
            self._grids[name] = _StationGrid(tbin=tbin, visible_any=vis_any)
        return self._grids[name]

    def intersat_series(self, pair_index: int) -> _IntersatSeries:
        """Best conjugate-pair precision between orbits pair_index and pair_index + 1."""
        if pair_index not in self._intersat:
            if not 0 <= pair_index < len(self.const.orbits) - 1:
                raise ValueError(f"adjacent orbit pair index out of range: {pair_index}")
            self.const.check_inter_orbit_visibility(self.earth)
            a0, a1 = self.orbit_rows[pair_index]
            b0, b1 = self.orbit_rows[pair_index + 1]
            K = a1 - a0
            T = self.times.size
            tb_all = np.empty((K, T))
            v_all = np.empty((K, T), dtype=np.float32)
            vis_all = np.empty((K, T), dtype=bool)
            for lo in range(0, T, self.CHUNK):
                sl = slice(lo, min(lo + self.CHUNK, T))
                spos, svel = propagate_grid(self.const, self.times[sl], self.earth)
                visible, rng, v_rad = sat_sat_link_arrays(
                    spos[a0:a1], svel[a0:a1], spos[b0:b1], svel[b0:b1], self.earth
                )
                eta = intersat_eta_arrays(rng, self.channel)
                tb = t_bin_arrays(v_rad, eta, self.precision)
                tb[~visible] = np.inf
                tb_all[:, sl] = tb
                v_all[:, sl] = v_rad
                vis_all[:, sl] = visible
            best_k = np.argmin(tb_all, axis=0)
            tbin_best = tb_all[best_k, np.arange(T)]
            self._intersat[pair_index] = _IntersatSeries(
                tbin_best=tbin_best,
                best_k=best_k.astype(np.int16),
                v_rad=v_all,
                visible=vis_all,
            )
        return self._intersat[pair_index]

    def rings_connected(self) -> list[bool]:
        """Nearest-neighbor ring visibility per orbit (static for equal spacing)."""
        if self._rings is None:
            self._rings = []
            for k in range(len(self.const.orbits)):
                try:
                    intra_orbit_sync_precision(self.sc, k, float(self.times[0]))
                    self._rings.append(True)
                except NoPathError:
                    self._rings.append(False)
        return self._rings

    def half_width(self, holdover_s: float) -> int:
        return int(math.floor(holdover_s / 2.0 / self.dt))

    # -- pair evaluation ---------------------------------------------------

    def pair_trace(
        self, station_a: str, station_b: str, mode: SyncMode, holdover_s: float
    ) -> PrecisionTrace:
        """Full-series pair precision under one relay policy and holdover."""
        g1 = self.station_grid(station_a)
        g2 = self.station_grid(station_b)
        half = self.half_width(holdover_s)
        T = self.times.size
        O = len(self.const.orbits)

        best = np.full(T, np.inf)
        family = np.zeros(T, dtype=np.int8)
        sat_best = np.zeros(T, dtype=np.int32)
        ia = np.zeros(T, dtype=np.int64)
        ib = np.zeros(T, dtype=np.int64)
        va = np.full(T, np.inf)
        vb = np.full(T, np.inf)

        # Single common satellite, possibly at two different window instants.
        for s in range(self.const.num_sats):
            wa, iwa = rolling_min_argmin(g1.tbin[s], half)
            wb, iwb = rolling_min_argmin(g2.tbin[s], half)
            m = np.maximum(wa, wb)
            better = m < best
            if np.any(better):
                best[better] = m[better]
                sat_best[better] = s
                ia[better] = iwa[better]
                ib[better] = iwb[better]
                va[better] = wa[better]
                vb[better] = wb[better]

        o1 = np.zeros(T, dtype=np.int8)
        o2 = np.zeros(T, dtype=np.int8)
        oa_idx = ob_idx = oa_sat = ob_sat = oa_val = ob_val = None
        bridge_idx = bridge_k = bridge_val = None

        if mode is not SyncMode.SINGLE_SATELLITE:
            rings = self.rings_connected()
            oa_val = np.empty((O, T))
            ob_val = np.empty((O, T))
            oa_idx = np.empty((O, T), dtype=np.int64)
            ob_idx = np.empty((O, T), dtype=np.int64)
            oa_sat = np.empty((O, T), dtype=np.int16)
            ob_sat = np.empty((O, T), dtype=np.int16)
            for o, (r0, r1) in enumerate(self.orbit_rows):
                a_rows = g1.tbin[r0:r1]
                b_rows = g2.tbin[r0:r1]
                a_min = np.min(a_rows, axis=0)
                b_min = np.min(b_rows, axis=0)
                oa_sat[o] = np.argmin(a_rows, axis=0).astype(np.int16)
                ob_sat[o] = np.argmin(b_rows, axis=0).astype(np.int16)
                oa_val[o], oa_idx[o] = rolling_min_argmin(a_min, half)
                ob_val[o], ob_idx[o] = rolling_min_argmin(b_min, half)

            floor = self.precision.timestamp_jitter_s
            if mode is SyncMode.INTRA_ORBIT:
                for o in range(O):
                    if not rings[o]:
                        continue
                    m = np.maximum(np.maximum(oa_val[o], ob_val[o]), floor)
                    better = m < best
                    if np.any(better):
                        best[better] = m[better]
                        family[better] = 1
                        o1[better] = o
                        o2[better] = o
            else:  # FULL
                P = O - 1
                if P > 0:
                    bridge_idx = np.empty((P, T), dtype=np.int64)
                    bridge_k = np.empty((P, T), dtype=np.int16)
                    bridge_val = np.empty((P, T))
                    wib = np.empty((P, T))
                    for p in range(P):
                        series = self.intersat_series(p)
                        wib[p], bridge_idx[p] = rolling_min_argmin(series.tbin_best, half)
                        bridge_val[p] = wib[p]
                        bridge_k[p] = series.best_k[bridge_idx[p]]
                    path_max: dict[tuple[int, int], np.ndarray] = {}
                    for lo in range(O):
                        cur = None
                        for hi in range(lo + 1, O):
                            cur = wib[hi - 1] if cur is None else np.maximum(cur, wib[hi - 1])
                            path_max[(lo, hi)] = cur
                for ca in range(O):
                    for cb in range(O):
                        lo, hi = min(ca, cb), max(ca, cb)
                        if not all(rings[lo : hi + 1]):
                            continue
                        m = np.maximum(np.maximum(oa_val[ca], ob_val[cb]), floor)
                        if ca != cb:
                            m = np.maximum(m, path_max[(lo, hi)])
                        better = m < best
                        if np.any(better):
                            best[better] = m[better]
                            family[better] = 2 if ca != cb else 1
                            o1[better] = ca
                            o2[better] = cb

        vis1 = rolling_any(g1.visible_any, half)
        vis2 = rolling_any(g2.visible_any, half)
        status = np.zeros(T, dtype=np.int8)
        status[np.isinf(best)] = 2
        status[~(vis1 & vis2)] = 1
        best = np.where(status == 0, best, np.inf)

        day = self.day
        zero_t = np.zeros((O, self.day_times.size))
        zero_i = np.zeros((O, self.day_times.size), dtype=np.int64)
        zero_s = np.zeros((O, self.day_times.size), dtype=np.int16)
        witness = _WitnessData(
            engine=self,
            station_a=station_a,
            station_b=station_b,
            family=family[day],
            sat_best=sat_best[day],
            ia=ia[day],
            ib=ib[day],
            va=va[day],
            vb=vb[day],
            o1=o1[day],
            o2=o2[day],
            oa_idx=oa_idx[:, day] if oa_idx is not None else zero_i,
            ob_idx=ob_idx[:, day] if ob_idx is not None else zero_i.copy(),
            oa_sat=oa_sat if oa_sat is not None else zero_s,
            ob_sat=ob_sat if ob_sat is not None else zero_s.copy(),
            oa_val=oa_val[:, day] if oa_val is not None else zero_t,
            ob_val=ob_val[:, day] if ob_val is not None else zero_t.copy(),
            bridge_idx=bridge_idx[:, day] if bridge_idx is not None else None,
            bridge_k=bridge_k[:, day] if bridge_k is not None else None,
            bridge_val=bridge_val[:, day] if bridge_val is not None else None,
        )
        return PrecisionTrace(
            station_a=station_a,
            station_b=station_b,
            mode=mode,
            holdover_s=holdover_s,
            dt_s=self.dt,
            t_s=self.day_times,
            t_bin_s=best[day],
            status=status[day],
            _witness=witness,
        )

    # -- inter-orbit events -------------------------------------------------

    def conjugate_sync_events(self, pair_index: int, target_s: float) -> np.ndarray:
        """Times of sub-target conjugate-pair sync opportunities, refined off-grid.

        Every sub-target interval of a conjugate link contains a zero crossing
        of its relative radial velocity, so sign changes on a coarse scan grid
        are bracketed and bisected to locate each opportunity exactly. The scan
        extends one orbital period past both day edges: the constellation is
        periodic, so holdover windows near the edges may rest on events just
        outside the simulated day. Opportunities of different conjugate pairs
        can coincide (a north and a south crossing); those merge into one event.
        """
        key = (pair_index, target_s)
        if key not in self._events:
            series = self.intersat_series(pair_index)
            scan = self.times
            K = self.const.orbits[pair_index].num_sats
            events: list[float] = []
            for k in range(K):
                v = series.v_rad[k].astype(float)
                flip = np.nonzero(np.signbit(v[:-1]) != np.signbit(v[1:]))[0]
                for i in flip:
                    t_star = self._refine_crossing(pair_index, k, float(scan[i]), float(scan[i + 1]))
                    tb = self._intersat_tbin_scalar(pair_index, k, t_star)
                    if tb is not None and tb <= target_s:
                        events.append(t_star)
                for i in np.nonzero(v == 0.0)[0]:
                    tb = self._intersat_tbin_scalar(pair_index, k, float(scan[i]))
                    if tb is not None and tb <= target_s:
                        events.append(float(scan[i]))
            merged: list[float] = []
            for t in sorted(events):
                if not merged or t - merged[-1] > 1e-3:
                    merged.append(t)
            self._events[key] = np.asarray(merged)
        return self._events[key]

    def _conjugate_states(self, pair_index: int, k: int, t: float):
        sa = _sat_pos_vel(self.sc, pair_index, k, t)
        sb = _sat_pos_vel(self.sc, pair_index + 1, k, t)
        return sa, sb

    def _pair_vrad(self, pair_index: int, k: int, t: float) -> float:
        (pa, va), (pb, vb) = self._conjugate_states(pair_index, k, t)
        d = pa - pb
        return float((va - vb) @ d / np.linalg.norm(d))

    def _pair_vrad_grid(self, pair_index: int, k: int, ts: np.ndarray) -> np.ndarray:
        pa, va = _sat_pos_vel_grid(self.sc, pair_index, k, ts)
        pb, vb = _sat_pos_vel_grid(self.sc, pair_index + 1, k, ts)
        d = pa - pb
        return np.einsum("tk,tk->t", va - vb, d) / np.linalg.norm(d, axis=-1)

    def _refine_crossing(self, pair_index: int, k: int, t0: float, t1: float) -> float:
        f0 = self._pair_vrad(pair_index, k, t0)
        for _ in range(50):
            tm = 0.5 * (t0 + t1)
            fm = self._pair_vrad(pair_index, k, tm)
            if (fm < 0) == (f0 < 0):
                t0, f0 = tm, fm
            else:
                t1 = tm
        return 0.5 * (t0 + t1)

    def _intersat_tbin_scalar(self, pair_index: int, k: int, t: float) -> float | None:
        (pa, va), (pb, vb) = self._conjugate_states(pair_index, k, t)
        if not sat_sat_visible(Vec3.from_array(pa, ECI), Vec3.from_array(pb, ECI), self.earth):
            return None
        rng = float(np.linalg.norm(pa - pb))
        eta = float(intersat_eta_arrays(np.array(rng), self.channel))
        if eta <= 0.0:
            return None
        v = float((va - vb) @ (pa - pb) / rng)
        return t_bin(v, eta, self.precision)


# -- scalar endpoint resolution & spec-level operations ----------------------


def _sat_pos_vel(scenario, orbit_index: int, slot: int, t: float) -> tuple[np.ndarray, np.ndarray]:
    orbit = scenario.constellation.orbits[orbit_index]
    a = scenario.earth.radius_m + orbit.altitude_m
    n = math.sqrt(scenario.earth.mu_m3_s2 / a**3)
    p, q, _ = _plane_basis(orbit)
    u = float(_initial_phases_rad(scenario.constellation, orbit_index)[slot]) + n * t
    cu, su = math.cos(u), math.sin(u)
    return a * (cu * p + su * q), a * n * (-su * p + cu * q)


def _sat_pos_vel_grid(
    scenario, orbit_index: int, slot: int, ts: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    orbit = scenario.constellation.orbits[orbit_index]
    a = scenario.earth.radius_m + orbit.altitude_m
    n = math.sqrt(scenario.earth.mu_m3_s2 / a**3)
    p, q, _ = _plane_basis(orbit)
    u = float(_initial_phases_rad(scenario.constellation, orbit_index)[slot]) + n * np.asarray(ts)
    cu, su = np.cos(u)[:, None], np.sin(u)[:, None]
    return a * (cu * p + su * q), a * n * (-su * p + cu * q)


def sat_endpoint(scenario, sat_id: tuple[int, int], t: float) -> EndpointState:
    pos, vel = _sat_pos_vel(scenario, sat_id[0], sat_id[1], t)
    return EndpointState(
        name=f"s{sat_id[0]}:{sat_id[1]}",
        position=Vec3.from_array(pos, ECI),
        velocity=Vec3.from_array(vel, ECI),
        is_ground=False,
    )


def station_endpoint(scenario, name: str, t: float) -> EndpointState:
    gs = next(s for s in scenario.stations if s.name == name)
    pos, vel = station_eci_arrays(gs, np.array([t]), scenario.earth)
    return EndpointState(
        name=name,
        position=Vec3.from_array(pos[0], ECI),
        velocity=Vec3.from_array(vel[0], ECI),
        is_ground=True,
    )


def gs_sat_precision(scenario, station_name: str, sat_id: tuple[int, int], t: float) -> float:
    """Two-way pair-exchange precision of one ground-satellite link at time t.

    The bidirectional exchange uses the geometric mean of the uplink and
    downlink budgets. Raises :class:`NotVisibleError` below the horizon.
    """
    gs = station_endpoint(scenario, station_name, t)
    sat = sat_endpoint(scenario, sat_id, t)
    geom = gs_sat_geometry(gs, sat)
    if not geom.visible:
        raise NotVisibleError(f"{station_name} cannot see satellite {sat_id} at t={t}")
    eta = two_way_ground_eta(geom, scenario.channel)
    if eta <= 0.0:
        raise NotVisibleError(f"{station_name}-{sat_id} link underflows to zero transmittance")
    return t_bin(geom.v_rel_rad_m_s, eta, scenario.precision)


def intra_orbit_sync_precision(scenario, orbit_index: int, t: float) -> float:
    """Ring sync precision: the jitter floor, provided the ring is closed.

    Same-orbit satellites have zero relative radial velocity, so only the
    time-stamping precision limits them; a break in nearest-neighbor
    visibility makes the whole ring unusable.
    """
    orbit = scenario.constellation.orbits[orbit_index]
    n = orbit.num_sats
    if n == 1:
        return scenario.precision.timestamp_jitter_s
    states = [_sat_pos_vel(scenario, orbit_index, j, t)[0] for j in range(n)]
    for j in range(n):
        a = Vec3.from_array(states[j], ECI)
        b = Vec3.from_array(states[(j + 1) % n], ECI)
        if not sat_sat_visible(a, b, scenario.earth):
            raise NoPathError(
                f"ring {orbit_index} broken: satellites ({orbit_index},{j}) and "
                f"({orbit_index},{(j + 1) % n}) cannot see each other"
            )
    return scenario.precision.timestamp_jitter_s


def pair_precision(
    scenario, station_a: str, station_b: str, t: float, mode: SyncMode, clock: ClockModel
) -> PrecisionSample:
    """Pair precision at a single instant, computed directly on the window.

    Straightforward brute-force over window samples and satellites; serves as
    the reference implementation the vectorized trace is checked against.
    """
    times = scenario.sim.time_grid()
    dt = scenario.sim.dt_s
    half = int(math.floor(clock.holdover_s / 2.0 / dt))
    i = int(round((t - times[0]) / dt))
    if not 0 <= i < times.size:
        raise ValueError(f"t={t} outside the simulation window")
    lo, hi = max(0, i - half), min(times.size, i + half + 1)
    window = times[lo:hi]

    earth = scenario.earth
    spos, svel = propagate_grid(scenario.constellation, window, earth)
    per_station = {}
    vis_any = {}
    for name in (station_a, station_b):
        gs = next(s for s in scenario.stations if s.name == name)
        gpos, gvel = station_eci_arrays(gs, window, earth)
        visible, rng, v_rad, cos_zen = gs_sat_link_arrays(gpos, gvel, spos, svel)
        eta = gs_eta_two_way_arrays(rng, cos_zen, scenario.channel)
        tb = t_bin_arrays(v_rad, eta, scenario.precision)
        tb[~visible] = np.inf
        per_station[name] = tb
        vis_any[name] = bool(visible.any())

    if not (vis_any[station_a] and vis_any[station_b]):
        return PrecisionSample(t, math.inf, StatusCode.NOT_VISIBLE)

    ta = per_station[station_a]
    tbv = per_station[station_b]
    floor = scenario.precision.timestamp_jitter_s
    sat_ids = scenario.constellation.sat_ids()
    orbit_of = [sid[0] for sid in sat_ids]
    O = len(scenario.constellation.orbits)

    def ring_ok(o: int) -> bool:
        try:
            intra_orbit_sync_precision(scenario, o, t)
            return True
        except NoPathError:
            return False

    best = math.inf
    witness: tuple[WitnessLink, ...] = ()

    a_sat_best = ta.min(axis=1)
    b_sat_best = tbv.min(axis=1)
    for s in range(len(sat_ids)):
        m = max(a_sat_best[s], b_sat_best[s])
        if m < best:
            best = m
            ja = int(np.argmin(ta[s]))
            jb = int(np.argmin(tbv[s]))
            witness = (
                WitnessLink("gs", station_a, sat_ids[s], None, float(window[ja]), float(a_sat_best[s])),
                WitnessLink("gs", station_b, sat_ids[s], None, float(window[jb]), float(b_sat_best[s])),
            )

    if mode is not SyncMode.SINGLE_SATELLITE:
        rings = [ring_ok(o) for o in range(O)]
        rows = [np.array([s for s, o in enumerate(orbit_of) if o == oo]) for oo in range(O)]
        a_orb = [ta[rows[o]].min() if rows[o].size else math.inf for o in range(O)]
        b_orb = [tbv[rows[o]].min() if rows[o].size else math.inf for o in range(O)]

        def gs_link(name, arr, rows_o, o) -> WitnessLink:
            flat = int(np.argmin(arr[rows_o]))
            s_local, j = divmod(flat, arr.shape[1])
            sid = sat_ids[rows_o[s_local]]
            return WitnessLink("gs", name, sid, None, float(window[j]), float(arr[rows_o][s_local, j]))

        if mode is SyncMode.INTRA_ORBIT:
            combos = [(o, o) for o in range(O) if rings[o]]
        else:
            scenario.constellation.check_inter_orbit_visibility(earth)
            combos = [
                (oa, ob)
                for oa in range(O)
                for ob in range(O)
                if all(rings[min(oa, ob) : max(oa, ob) + 1])
            ]
        bridge_cache: dict[int, tuple[float, int, int]] = {}

        def bridge(p: int) -> tuple[float, int, int]:
            if p not in bridge_cache:
                numk = scenario.constellation.orbits[p].num_sats
                bbest, bk, bj = math.inf, -1, -1
                for k in range(numk):
                    for j in range(window.size):
                        pa, va = _sat_pos_vel(scenario, p, k, float(window[j]))
                        pb, vb = _sat_pos_vel(scenario, p + 1, k, float(window[j]))
                        if not sat_sat_visible(
                            Vec3.from_array(pa, ECI), Vec3.from_array(pb, ECI), earth
                        ):
                            continue
                        rng = float(np.linalg.norm(pa - pb))
                        eta = float(intersat_eta_arrays(np.array(rng), scenario.channel))
                        if eta <= 0:
                            continue
                        v = float((va - vb) @ (pa - pb) / rng)
                        tb = t_bin(v, eta, scenario.precision)
                        if tb < bbest:
                            bbest, bk, bj = tb, k, j
                bridge_cache[p] = (bbest, bk, bj)
            return bridge_cache[p]

        for oa, ob in combos:
            m = max(a_orb[oa], b_orb[ob], floor)
            blinks = []
            for p in range(min(oa, ob), max(oa, ob)):
                bb, bk, bj = bridge(p)
                m = max(m, bb)
                blinks.append(WitnessLink("isl", None, (p, bk), (p + 1, bk), float(window[bj]), bb))
            if m < best:
                best = m
                chain = [gs_link(station_a, ta, rows[oa], oa)]
                chain.append(WitnessLink("ring", None, (oa, 0), None, None, floor))
                chain.extend(blinks)
                if oa != ob:
                    chain.append(WitnessLink("ring", None, (ob, 0), None, None, floor))
                chain.append(gs_link(station_b, tbv, rows[ob], ob))
                witness = tuple(chain)

    if math.isinf(best):
        return PrecisionSample(t, math.inf, StatusCode.NO_PATH)
    return PrecisionSample(t, best, StatusCode.OK, witness)


def inter_orbit_sync_trace(
    scenario, orbit_a: int, orbit_b: int, t_start: float | None = None,
    t_end: float | None = None, dt: float | None = None,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Best conjugate-pair precision between two adjacent orbits over time.

    Returns (times, t_bin, best_pair_index); +inf where no pair is visible.
    """
    if abs(orbit_a - orbit_b) != 1:
        raise ValueError("inter-orbit traces are defined for adjacent orbits")
    p = min(orbit_a, orbit_b)
    if dt is None and t_start is None and t_end is None:
        eng = SyncEngine(scenario)
        series = eng.intersat_series(p)
        return eng.day_times, series.tbin_best[eng.day], series.best_k[eng.day].astype(int)
    t0 = scenario.sim.t_start_s if t_start is None else t_start
    t1 = scenario.sim.t_end_s if t_end is None else t_end
    step = scenario.sim.dt_s if dt is None else dt
    n = int(math.floor((t1 - t0) / step)) + 1
    sub = scenario.with_sim(t_start_s=t0, t_end_s=t0 + (n - 1) * step, dt_s=step)
    eng = SyncEngine(sub)
    series = eng.intersat_series(p)
    return eng.day_times, series.tbin_best[eng.day], series.best_k[eng.day].astype(int)


def master_clock_available(scenario, t: float, clock: ClockModel, engine: SyncEngine | None = None) -> bool:
    """Whether the constellation holds one common time at instant t.

    Requires every ring to be closed and, for every adjacent orbit pair, an
    inter-orbit sync event better than the clock precision inside the
    holdover window around t.
    """
    eng = engine if engine is not None else SyncEngine(scenario)
    if not all(eng.rings_connected()):
        return False
    half = clock.holdover_s / 2.0
    for p in range(len(scenario.constellation.orbits) - 1):
        events = eng.conjugate_sync_events(p, clock.precision_s)
        i = int(np.searchsorted(events, t - half, side="right"))
        if i >= events.size or not events[i] < t + half:
            return False
    return True


def master_clock_availability(
    scenario, clock: ClockModel, engine: SyncEngine | None = None
) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized :func:`master_clock_available` over the whole simulation grid."""
    eng = engine if engine is not None else SyncEngine(scenario)
    times = eng.day_times
    if not all(eng.rings_connected()):
        return times, np.zeros(times.size, dtype=bool)
    half = clock.holdover_s / 2.0
    avail = np.ones(times.size, dtype=bool)
    for p in range(len(scenario.constellation.orbits) - 1):
        events = eng.conjugate_sync_events(p, clock.precision_s)
        idx = np.searchsorted(events, times - half, side="right")
        ok = (idx < events.size) & (events[np.minimum(idx, events.size - 1)] < times + half)
        avail &= ok
    return times, avail
