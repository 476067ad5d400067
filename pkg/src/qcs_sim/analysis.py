"""Derived products: precision-shadow grids, figures of merit, scenario sweeps."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from qcs_sim.channel import gs_eta_two_way_arrays
from qcs_sim.errors import NoPathError
from qcs_sim.geodesy import EarthModel
from qcs_sim.linkgeom import gs_sat_link_arrays
from qcs_sim.propagation import propagate_grid
from qcs_sim.qcsprotocol import t_bin_arrays
from qcs_sim.syncnet import ClockModel, PrecisionTrace, SyncEngine, SyncMode

FALLBACK_THRESHOLD_S = 10e-6  # reporting convention when no sub-threshold events exist

STATUS_OK = "OK"
STATUS_BELOW_THRESHOLD = "BELOW_THRESHOLD"
STATUS_INVISIBLE = "INVISIBLE"


@dataclass(frozen=True)
class ShadowGrid:
    """Lat/lon map of achievable link precision around one epoch.

    ``best_t_bin_s`` is +inf where no admissible satellite is ever visible
    inside the holdover window; ``best_sat`` holds the flat satellite row of
    the winning link (-1 where undefined).
    """

    t_s: float
    resolution_deg: float
    target_precision_s: float
    holdover_s: float
    lat_deg: np.ndarray  # (n_lat,)
    lon_deg: np.ndarray  # (n_lon,)
    in_shadow: np.ndarray  # (n_lat, n_lon) bool
    best_t_bin_s: np.ndarray  # (n_lat, n_lon)
    best_sat: np.ndarray  # (n_lat, n_lon) int

    def write_csv(self, path, header_lines: tuple[str, ...] = ()) -> None:
        with open(path, "w") as f:
            for line in header_lines:
                f.write(f"# {line}\n")
            f.write("lat_deg,lon_deg,in_shadow,best_t_bin_s,best_sat\n")
            for i, lat in enumerate(self.lat_deg):
                for j, lon in enumerate(self.lon_deg):
                    tb = self.best_t_bin_s[i, j]
                    tb_str = f"{float(tb)!r}" if np.isfinite(tb) else ""
                    f.write(
                        f"{float(lat)!r},{float(lon)!r},{int(self.in_shadow[i, j])},"
                        f"{tb_str},{int(self.best_sat[i, j])}\n"
                    )


@dataclass(frozen=True)
class FiguresOfMerit:
    """Table-style summary of one full-day pair trace."""

    status: str
    average_precision: float | None  # mean of -log10(t_bin) over qualifying samples
    largest_gap_min: float | None
    connected_fraction_pct: float | None
    threshold_s: float
    qualifying_samples: int
    visible_samples: int
    total_samples: int

    def to_json_dict(self) -> dict:
        return {
            "status": self.status,
            "average_precision": self.average_precision,
            "largest_gap_min": self.largest_gap_min,
            "connected_fraction_pct": self.connected_fraction_pct,
            "threshold_s": self.threshold_s,
            "qualifying_samples": self.qualifying_samples,
            "visible_samples": self.visible_samples,
            "total_samples": self.total_samples,
        }


def largest_gap_s(t: np.ndarray, qualifying: np.ndarray, dt: float) -> float:
    """Longest span without a qualifying sample, truncated at the day edges.

    Interior gaps measure the missing span between consecutive qualifying
    samples; the leading and trailing edges count from the window bounds.
    """
    idx = np.nonzero(qualifying)[0]
    if idx.size == 0:
        return float(t[-1] - t[0])
    leading = float(t[idx[0]] - t[0])
    trailing = float(t[-1] - t[idx[-1]])
    interior = 0.0
    if idx.size > 1:
        interior = float(np.max(np.diff(t[idx])) - dt)
    return max(leading, trailing, interior)


def figures_of_merit(trace: PrecisionTrace, threshold_s: float = 1e-9) -> FiguresOfMerit:
    """Summarize a pair trace the way the coverage tables report it.

    Falls back to a 10 us threshold for the average when the pair is visible
    but never reaches the requested precision; gap and fraction are then not
    reported.
    """
    if len(trace) == 0:
        raise ValueError("cannot summarize an empty trace")
    finite = np.isfinite(trace.t_bin_s)
    total = len(trace)
    visible = int(finite.sum())
    if visible == 0:
        return FiguresOfMerit(
            status=STATUS_INVISIBLE,
            average_precision=None,
            largest_gap_min=None,
            connected_fraction_pct=None,
            threshold_s=threshold_s,
            qualifying_samples=0,
            visible_samples=0,
            total_samples=total,
        )
    qualifying = finite & (trace.t_bin_s <= threshold_s)
    n_q = int(qualifying.sum())
    if n_q == 0:
        fallback = finite & (trace.t_bin_s <= FALLBACK_THRESHOLD_S)
        avg = (
            float(np.mean(-np.log10(trace.t_bin_s[fallback]))) if fallback.any() else None
        )
        return FiguresOfMerit(
            status=STATUS_BELOW_THRESHOLD,
            average_precision=avg,
            largest_gap_min=None,
            connected_fraction_pct=None,
            threshold_s=threshold_s,
            qualifying_samples=0,
            visible_samples=visible,
            total_samples=total,
        )
    avg = float(np.mean(-np.log10(trace.t_bin_s[qualifying])))
    gap = largest_gap_s(trace.t_s, qualifying, trace.dt_s) / 60.0
    frac = 100.0 * n_q / total
    return FiguresOfMerit(
        status=STATUS_OK,
        average_precision=avg,
        largest_gap_min=gap,
        connected_fraction_pct=frac,
        threshold_s=threshold_s,
        qualifying_samples=n_q,
        visible_samples=visible,
        total_samples=total,
    )


def precision_shadow(
    scenario,
    t: float,
    clock: ClockModel,
    target_precision_s: float = 1e-9,
    resolution_deg: float = 1.0,
    sat_rows: list[int] | None = None,
    engine: SyncEngine | None = None,
) -> ShadowGrid:
    """Ground region able to sync with the selected satellites at the target.

    A cell is in shadow when some admissible satellite gives it a link
    precision at or better than the target at some instant of the holdover
    window around t. Cells are evaluated at sea level on the sampling grid.
    """
    earth: EarthModel = scenario.earth
    times = scenario.sim.time_grid()
    dt = scenario.sim.dt_s
    i0 = int(round((t - times[0]) / dt))
    if not 0 <= i0 < times.size:
        raise ValueError(f"epoch {t} outside the simulation window")
    half = int(math.floor(clock.holdover_s / 2.0 / dt))
    window = times[max(0, i0 - half) : min(times.size, i0 + half + 1)]

    lats = np.arange(-90.0, 90.0 + 0.5 * resolution_deg, resolution_deg)
    lons = np.arange(-180.0 + resolution_deg, 180.0 + 0.5 * resolution_deg, resolution_deg)
    lat_r = np.radians(lats)[:, None]
    lon_r = np.radians(lons)[None, :]
    cells = np.stack(
        [
            np.broadcast_to(np.cos(lat_r) * np.cos(lon_r), (lats.size, lons.size)),
            np.broadcast_to(np.cos(lat_r) * np.sin(lon_r), (lats.size, lons.size)),
            np.broadcast_to(np.sin(lat_r) * np.ones_like(lon_r), (lats.size, lons.size)),
        ],
        axis=-1,
    ).reshape(-1, 3) * earth.radius_m  # ECEF unit cells at sea level
    n_cells = cells.shape[0]

    best = np.full(n_cells, np.inf)
    best_sat = np.full(n_cells, -1, dtype=np.int32)

    w = earth.rotation_rate_rad_s
    for j, tw in enumerate(window):
        ang = w * tw
        c, s = math.cos(ang), math.sin(ang)
        gpos = np.empty_like(cells)
        gpos[:, 0] = c * cells[:, 0] - s * cells[:, 1]
        gpos[:, 1] = s * cells[:, 0] + c * cells[:, 1]
        gpos[:, 2] = cells[:, 2]
        gvel = np.empty_like(gpos)
        gvel[:, 0] = -w * gpos[:, 1]
        gvel[:, 1] = w * gpos[:, 0]
        gvel[:, 2] = 0.0
        spos, svel = propagate_grid(scenario.constellation, np.array([tw]), earth)
        rows = range(spos.shape[0]) if sat_rows is None else sat_rows
        for r in rows:
            d = spos[r, 0][None, :] - gpos
            rng = np.linalg.norm(d, axis=-1)
            cos_zen = np.einsum("ck,ck->c", d, gpos) / (rng * earth.radius_m)
            visible = cos_zen > 0.0
            eta = gs_eta_two_way_arrays(rng, cos_zen, scenario.channel)
            v_rad = np.einsum("ck,ck->c", svel[r, 0][None, :] - gvel, d) / rng
            tb = t_bin_arrays(v_rad, eta, scenario.precision)
            tb = np.where(visible, tb, np.inf)
            improved = tb < best
            best[improved] = tb[improved]
            best_sat[improved] = r
    best = best.reshape(lats.size, lons.size)
    best_sat = best_sat.reshape(lats.size, lons.size)
    return ShadowGrid(
        t_s=t,
        resolution_deg=resolution_deg,
        target_precision_s=target_precision_s,
        holdover_s=clock.holdover_s,
        lat_deg=lats,
        lon_deg=lons,
        in_shadow=best <= target_precision_s,
        best_t_bin_s=best,
        best_sat=best_sat,
    )


@dataclass(frozen=True)
class SweepCell:
    station_a: str
    station_b: str
    mode: SyncMode
    holdover_s: float
    fom: FiguresOfMerit | None
    error: str | None = None

    def to_json_dict(self) -> dict:
        return {
            "pair": [self.station_a, self.station_b],
            "mode": self.mode.value,
            "holdover_s": self.holdover_s,
            "fom": self.fom.to_json_dict() if self.fom else None,
            "error": self.error,
        }


def sweep(
    scenario,
    pairs: list[tuple[str, str]],
    holdovers_s: list[float],
    modes: list[SyncMode],
    threshold_s: float = 1e-9,
    engine: SyncEngine | None = None,
) -> list[SweepCell]:
    """Figures of merit over the cross product of pairs, holdovers, and modes.

    Per-cell failures are captured in the cell, never aborting the sweep.
    Ordering is deterministic: pairs, then holdovers, then modes.
    """
    eng = engine if engine is not None else SyncEngine(scenario)
    cells = []
    for a, b in pairs:
        for tau in holdovers_s:
            for mode in modes:
                try:
                    trace = eng.pair_trace(a, b, mode, tau)
                    fom = figures_of_merit(trace, threshold_s)
                    cells.append(SweepCell(a, b, mode, tau, fom))
                except (NoPathError, ValueError) as e:
                    cells.append(SweepCell(a, b, mode, tau, None, error=str(e)))
    return cells
