import { COASTLINES } from "./coastlines.js";
import {
  parseFom,
  parseMasterclock,
  parseShadow,
  parseTrace,
  requireSameHash,
} from "./parse.js";
import { SERIES_COLORS, SvgDoc, axisTicks, esc, linearScale } from "./svg.js";
import type { FomCell, PlotJob, TraceArtifact } from "./types.js";

const W = 900;
const H = 480;
const MARGIN = { left: 70, right: 30, top: 40, bottom: 50 };

function plotArea() {
  return {
    x0: MARGIN.left,
    x1: W - MARGIN.right,
    y0: H - MARGIN.bottom,
    y1: MARGIN.top,
  };
}

function timeAxis(doc: SvgDoc, tLo: number, tHi: number, x: (v: number) => number): void {
  const { y0 } = plotArea();
  doc.line(x(tLo), y0, x(tHi), y0, "stroke:#000");
  for (const tick of axisTicks(tLo / 3600, tHi / 3600)) {
    const px = x(tick * 3600);
    doc.line(px, y0, px, y0 + 5, "stroke:#000");
    doc.text(px, y0 + 18, tick.toString(), "font:11px sans-serif", "middle");
  }
  doc.text((x(tLo) + x(tHi)) / 2, H - 10, "time (hours)", "font:12px sans-serif", "middle");
}

function precisionAxis(doc: SvgDoc, lo: number, hi: number, y: (v: number) => number): void {
  const { x0, y0, y1 } = plotArea();
  doc.line(x0, y0, x0, y1, "stroke:#000");
  for (const tick of axisTicks(lo, hi)) {
    const py = y(tick);
    doc.line(x0 - 5, py, x0, py, "stroke:#000");
    doc.text(x0 - 8, py + 4, tick.toString(), "font:11px sans-serif", "end");
  }
  doc.add(
    `<text x="18" y="${(y(lo) + y(hi)) / 2}" text-anchor="middle" ` +
      `style="font:12px sans-serif" transform="rotate(-90 18 ${(y(lo) + y(hi)) / 2})">` +
      `-log10(sync precision / s)</text>`,
  );
}

function thresholdLine(
  doc: SvgDoc,
  value: number,
  x0: number,
  x1: number,
  y: (v: number) => number,
): void {
  // the clock-precision cut-off; 9 is the 1 ns level of the reference plots
  const py = y(value);
  doc.line(x0, py, x1, py, "stroke:#2ca02c;stroke-width:2", "threshold-line");
  doc.text(x1 - 4, py - 5, `${value} (clock precision)`, "font:11px sans-serif;fill:#2ca02c", "end");
}

function renderTitle(doc: SvgDoc, title: string | undefined, fallback: string): void {
  doc.text(W / 2, 22, title ?? fallback, "font:bold 14px sans-serif", "middle");
}

export function renderTrace(job: PlotJob): string {
  const traces: TraceArtifact[] = job.inputs.map(parseTrace);
  requireSameHash(
    traces.map((t) => t.scenarioHash),
    job.inputs,
  );
  const doc = new SvgDoc(W, H);
  renderTitle(doc, job.title, `sync trace (${traces[0].scenarioHash})`);
  const { x0, x1, y0, y1 } = plotArea();

  const allOk = traces.flatMap((t) => t.rows.filter((r) => r.status === "OK"));
  const tLo = Math.min(...traces.map((t) => t.rows[0]?.tS ?? 0));
  const tHi = Math.max(...traces.map((t) => t.rows.at(-1)?.tS ?? 1));
  const x = linearScale([tLo, tHi], [x0, x1]);

  if (allOk.length === 0) {
    const y = linearScale([0, 12], [y0, y1]);
    timeAxis(doc, tLo, tHi, x);
    precisionAxis(doc, 0, 12, y);
    thresholdLine(doc, job.thresholdLine, x0, x1, y);
    doc.text(W / 2, (y0 + y1) / 2, "NOT_VISIBLE", "font:bold 20px sans-serif;fill:#888", "middle");
    return doc.render();
  }

  const vals = allOk.map((r) => r.negLog10 ?? 0);
  const lo = Math.min(Math.floor(Math.min(...vals)), job.thresholdLine - 1);
  const hi = Math.max(Math.ceil(Math.max(...vals)), job.thresholdLine + 1);
  const y = linearScale([lo, hi], [y0, y1]);
  timeAxis(doc, tLo, tHi, x);
  precisionAxis(doc, lo, hi, y);

  traces.forEach((t, i) => {
    const color = SERIES_COLORS[i % SERIES_COLORS.length];
    // draw contiguous OK runs as separate segments; gaps stay blank
    let run: Array<[number, number]> = [];
    const flush = () => {
      if (run.length === 1) {
        doc.rect(run[0][0] - 0.75, run[0][1] - 0.75, 1.5, 1.5, `fill:${color}`);
      } else if (run.length > 1) {
        doc.polyline(run, `stroke:${color};stroke-width:1`);
      }
      run = [];
    };
    for (const row of t.rows) {
      if (row.status === "OK" && row.negLog10 !== null) {
        run.push([x(row.tS), y(row.negLog10)]);
      } else {
        flush();
      }
    }
    flush();
    doc.text(x1 - 4, y1 + 14 + 14 * i, t.label, `font:11px sans-serif;fill:${color}`, "end");
  });
  thresholdLine(doc, job.thresholdLine, x0, x1, y);
  return doc.render();
}

export function renderShadowMap(job: PlotJob): string {
  const shadows = job.inputs.map(parseShadow);
  requireSameHash(
    shadows.map((s) => s.scenarioHash),
    job.inputs,
  );
  const doc = new SvgDoc(W, H);
  renderTitle(doc, job.title, `precision shadow (${shadows[0].scenarioHash})`);
  const { x0, x1, y0, y1 } = plotArea();
  const x = linearScale([-180, 180], [x0, x1]);
  const y = linearScale([-90, 90], [y0, y1]);

  shadows.forEach((shadow, i) => {
    const color = SERIES_COLORS[i % SERIES_COLORS.length];
    const dLat = shadow.lats.length > 1 ? shadow.lats[1] - shadow.lats[0] : 1;
    const dLon = shadow.lons.length > 1 ? shadow.lons[1] - shadow.lons[0] : 1;
    const w = Math.abs(x(dLon) - x(0));
    const h = Math.abs(y(0) - y(dLat));
    for (const cell of shadow.cells) {
      if (!cell.inShadow) continue;
      doc.rect(
        x(cell.lonDeg - dLon / 2),
        y(cell.latDeg + dLat / 2),
        w,
        h,
        `fill:${color};fill-opacity:0.45;stroke:none`,
        "shadow-cell",
      );
    }
  });

  for (const line of COASTLINES) {
    doc.polyline(
      line.map(([lon, lat]) => [x(lon), y(lat)] as [number, number]),
      "stroke:#444;stroke-width:0.8",
      "coastline",
    );
  }
  for (const lon of [-120, -60, 0, 60, 120]) {
    doc.line(x(lon), y(-90), x(lon), y(90), "stroke:#ccc;stroke-width:0.5");
  }
  for (const lat of [-60, -30, 0, 30, 60]) {
    doc.line(x(-180), y(lat), x(180), y(lat), "stroke:#ccc;stroke-width:0.5");
  }
  doc.rect(x0, y1, x1 - x0, y0 - y1, "fill:none;stroke:#000");
  doc.text(W / 2, H - 10, "longitude (deg)", "font:12px sans-serif", "middle");
  return doc.render();
}

export function renderMasterclock(job: PlotJob): string {
  const arts = job.inputs.map(parseMasterclock);
  requireSameHash(
    arts.map((a) => a.scenarioHash),
    job.inputs,
  );
  const art = arts[0];
  const doc = new SvgDoc(W, H);
  renderTitle(doc, job.title, `inter-orbit sync peaks (${art.scenarioHash})`);
  const { x0, x1, y0, y1 } = plotArea();
  const ts = art.rows.map((r) => r.tS);
  const x = linearScale([Math.min(...ts), Math.max(...ts)], [x0, x1]);
  const finite = art.rows.filter((r) => r.tBinS !== null);
  const negLog = (v: number) => -Math.log10(v);
  const vals = finite.map((r) => negLog(r.tBinS as number));
  const lo = Math.min(Math.floor(vals.length ? Math.min(...vals) : 0), job.thresholdLine - 1);
  const hi = Math.max(Math.ceil(vals.length ? Math.max(...vals) : 12), job.thresholdLine + 1);
  const y = linearScale([lo, hi], [y0, y1]);
  timeAxis(doc, Math.min(...ts), Math.max(...ts), x);
  precisionAxis(doc, lo, hi, y);
  art.pairs.forEach((pair, i) => {
    const color = SERIES_COLORS[i % SERIES_COLORS.length];
    const pts = art.rows
      .filter((r) => r.orbitPair === pair && r.tBinS !== null)
      .map((r) => [x(r.tS), y(negLog(r.tBinS as number))] as [number, number]);
    doc.polyline(pts, `stroke:${color};stroke-width:0.8`);
    doc.text(x1 - 4, y1 + 14 + 14 * i, `orbits ${pair}`, `font:11px sans-serif;fill:${color}`, "end");
  });
  thresholdLine(doc, job.thresholdLine, x0, x1, y);
  return doc.render();
}

function fmt(v: number | null, digits = 2): string {
  return v === null ? "n/a" : v.toFixed(digits);
}

export function renderFomTable(job: PlotJob): string {
  const arts = job.inputs.map(parseFom);
  requireSameHash(
    arts.map((a) => a.scenarioHash),
    job.inputs,
  );
  const cells: FomCell[] = arts.flatMap((a) => a.cells);
  const rows = cells
    .map((c) => {
      const name = `${c.pair[0]}-${c.pair[1]}`;
      const f = c.fom;
      const data = f
        ? `<td>${esc(f.status)}</td><td>${fmt(f.average_precision)}</td>` +
          `<td>${fmt(f.largest_gap_min, 1)}</td><td>${fmt(f.connected_fraction_pct, 1)}</td>`
        : `<td colspan="4">${esc(c.error ?? "error")}</td>`;
      return (
        `<tr><td>${esc(name)}</td><td>${esc(c.mode)}</td>` +
        `<td>${(c.holdover_s / 60).toFixed(0)}</td>${data}</tr>`
      );
    })
    .join("\n");
  const title = esc(job.title ?? `figures of merit (${arts[0].scenarioHash})`);
  return `<!DOCTYPE html>
<html><head><meta charset="utf-8"><title>${title}</title>
<style>
table { border-collapse: collapse; font: 13px sans-serif; }
th, td { border: 1px solid #999; padding: 4px 10px; text-align: center; }
th { background: #eee; }
caption { font: bold 15px sans-serif; padding: 8px; }
</style></head><body>
<table>
<caption>${title}</caption>
<tr><th>pair</th><th>mode</th><th>holdover (min)</th><th>status</th>
<th>avg precision</th><th>largest gap (min)</th><th>connected (%)</th></tr>
${rows}
</table>
</body></html>
`;
}

export function render(job: PlotJob): string {
  switch (job.kind) {
    case "trace":
      return renderTrace(job);
    case "shadow_map":
      return renderShadowMap(job);
    case "masterclock":
      return renderMasterclock(job);
    case "fom_table":
      return renderFomTable(job);
  }
}
