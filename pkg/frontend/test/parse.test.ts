import { mkdtempSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { describe, expect, it } from "vitest";
import {
  parseFom,
  parseMasterclock,
  parseShadow,
  parseTrace,
  readCsv,
  requireSameHash,
} from "../src/parse.js";

const TD = join(__dirname, "..", "testdata");

describe("trace parsing", () => {
  it("reads rows and the reproducibility header", () => {
    const art = parseTrace(join(TD, "trace_ok.csv"));
    expect(art.scenarioHash).toMatch(/^[0-9a-f]{16}$/);
    expect(art.seed).toBe("7");
    expect(art.rows.length).toBe(15001);
    const ok = art.rows.filter((r) => r.status === "OK");
    expect(ok.length).toBeGreaterThan(0);
    expect(ok[0].negLog10).toBeGreaterThan(6);
  });

  it("handles traces with no reachable samples", () => {
    const art = parseTrace(join(TD, "trace_empty.csv"));
    expect(art.rows.every((r) => r.status !== "OK")).toBe(true);
    expect(art.rows.every((r) => r.tBinS === null)).toBe(true);
  });

  it("rejects files without a scenario hash", () => {
    const dir = mkdtempSync(join(tmpdir(), "plotqcs-"));
    const bad = join(dir, "bad.csv");
    writeFileSync(bad, "t_s,t_bin_s,neg_log10_tbin,status,witness\n0.0,,,NO_PATH,\n");
    expect(() => parseTrace(bad)).toThrow(/scenario_hash/);
  });

  it("rejects column mismatches", () => {
    const dir = mkdtempSync(join(tmpdir(), "plotqcs-"));
    const bad = join(dir, "bad2.csv");
    writeFileSync(bad, "# scenario_hash=abc\nt_s,other\n1,2\n");
    expect(() => parseTrace(bad)).toThrow(/not a trace artifact/);
  });
});

describe("shadow parsing", () => {
  it("reconstructs the full grid", () => {
    const art = parseShadow(join(TD, "shadow_band.csv"));
    expect(art.lats.length).toBe(181);
    expect(art.lons.length).toBe(360);
    expect(art.cells.length).toBe(181 * 360);
    expect(art.cells.some((c) => c.inShadow)).toBe(true);
  });
});

describe("masterclock parsing", () => {
  it("collects orbit pairs", () => {
    const art = parseMasterclock(join(TD, "masterclock_trace.csv"));
    expect(art.pairs).toEqual(["0-1"]);
    expect(art.rows.length).toBe(15001);
  });
});

describe("fom parsing", () => {
  it("keeps cells and hash", () => {
    const art = parseFom(join(TD, "fom.json"));
    expect(art.cells.length).toBe(12);
    expect(art.scenarioHash).toMatch(/^[0-9a-f]{16}$/);
  });
});

describe("hash discipline", () => {
  it("rejects mixed scenario hashes", () => {
    const a = parseTrace(join(TD, "trace_ok.csv"));
    const b = parseTrace(join(TD, "trace_empty.csv"));
    expect(a.scenarioHash).not.toBe(b.scenarioHash);
    expect(() =>
      requireSameHash([a.scenarioHash, b.scenarioHash], ["trace_ok.csv", "trace_empty.csv"]),
    ).toThrow(/mixed scenario hashes/);
  });

  it("accepts matching hashes", () => {
    const csv = readCsv(join(TD, "trace_ok.csv"));
    requireSameHash([csv.scenarioHash, csv.scenarioHash], ["a", "b"]);
  });
});
