import { readFileSync } from "node:fs";
import { basename } from "node:path";
import type {
  FomArtifact,
  MasterclockArtifact,
  ShadowArtifact,
  TraceArtifact,
  TraceRow,
} from "./types.js";

interface CsvFile {
  scenarioHash: string;
  seed: string;
  header: string[];
  rows: string[][];
}

/** Parse a qcs-sim CSV: '#' comment lines carry the reproducibility header. */
export function readCsv(path: string): CsvFile {
  const text = readFileSync(path, "utf-8");
  const lines = text.split("\n").filter((l) => l.length > 0);
  let scenarioHash = "";
  let seed = "";
  let headerIdx = 0;
  for (const [i, line] of lines.entries()) {
    if (!line.startsWith("#")) {
      headerIdx = i;
      break;
    }
    const m = line.match(/^#\s*(scenario_hash|seed)=(.+)$/);
    if (m) {
      if (m[1] === "scenario_hash") scenarioHash = m[2].trim();
      else seed = m[2].trim();
    }
  }
  if (!scenarioHash) {
    throw new Error(`${path}: missing scenario_hash header`);
  }
  const header = lines[headerIdx].split(",");
  const rows = lines.slice(headerIdx + 1).map((l) => l.split(","));
  for (const [i, row] of rows.entries()) {
    if (row.length !== header.length) {
      throw new Error(`${path}: row ${i + 1} has ${row.length} fields, expected ${header.length}`);
    }
  }
  return { scenarioHash, seed, header, rows };
}

function num(field: string): number | null {
  return field === "" ? null : Number(field);
}

export function parseTrace(path: string): TraceArtifact {
  const csv = readCsv(path);
  const expect = ["t_s", "t_bin_s", "neg_log10_tbin", "status", "witness"];
  if (csv.header.join(",") !== expect.join(",")) {
    throw new Error(`${path}: not a trace artifact (columns ${csv.header.join(",")})`);
  }
  const rows: TraceRow[] = csv.rows.map((r) => ({
    tS: Number(r[0]),
    tBinS: num(r[1]),
    negLog10: num(r[2]),
    status: r[3] as TraceRow["status"],
    witness: r[4],
  }));
  return {
    scenarioHash: csv.scenarioHash,
    seed: csv.seed,
    label: basename(path).replace(/\.csv$/, ""),
    rows,
  };
}

export function parseShadow(path: string): ShadowArtifact {
  const csv = readCsv(path);
  const expect = ["lat_deg", "lon_deg", "in_shadow", "best_t_bin_s", "best_sat"];
  if (csv.header.join(",") !== expect.join(",")) {
    throw new Error(`${path}: not a shadow artifact (columns ${csv.header.join(",")})`);
  }
  const cells = csv.rows.map((r) => ({
    latDeg: Number(r[0]),
    lonDeg: Number(r[1]),
    inShadow: r[2] === "1",
    bestTBinS: num(r[3]),
    bestSat: Number(r[4]),
  }));
  const lats = [...new Set(cells.map((c) => c.latDeg))].sort((a, b) => a - b);
  const lons = [...new Set(cells.map((c) => c.lonDeg))].sort((a, b) => a - b);
  return { scenarioHash: csv.scenarioHash, seed: csv.seed, cells, lats, lons };
}

export function parseMasterclock(path: string): MasterclockArtifact {
  const csv = readCsv(path);
  const expect = ["t_s", "orbit_pair", "t_bin_s", "best_conjugate"];
  if (csv.header.join(",") !== expect.join(",")) {
    throw new Error(`${path}: not a masterclock artifact (columns ${csv.header.join(",")})`);
  }
  const rows = csv.rows.map((r) => ({
    tS: Number(r[0]),
    orbitPair: r[1],
    tBinS: num(r[2]),
    bestConjugate: Number(r[3]),
  }));
  const pairs = [...new Set(rows.map((r) => r.orbitPair))];
  return { scenarioHash: csv.scenarioHash, seed: csv.seed, rows, pairs };
}

export function parseFom(path: string): FomArtifact {
  const payload = JSON.parse(readFileSync(path, "utf-8"));
  if (!payload.scenario_hash || !Array.isArray(payload.cells)) {
    throw new Error(`${path}: not a figures-of-merit artifact`);
  }
  return { scenarioHash: payload.scenario_hash, cells: payload.cells };
}

/** All inputs of one figure must come from the same scenario run. */
export function requireSameHash(hashes: string[], paths: string[]): void {
  const distinct = new Set(hashes);
  if (distinct.size > 1) {
    throw new Error(
      `mixed scenario hashes across inputs: ${paths
        .map((p, i) => `${basename(p)}=${hashes[i]}`)
        .join(", ")}`,
    );
  }
}
