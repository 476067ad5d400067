export type FigureKind = "trace" | "shadow_map" | "masterclock" | "fom_table";

export interface TraceRow {
  tS: number;
  tBinS: number | null;
  negLog10: number | null;
  status: "OK" | "NOT_VISIBLE" | "NO_PATH";
  witness: string;
}

export interface TraceArtifact {
  scenarioHash: string;
  seed: string;
  label: string;
  rows: TraceRow[];
}

export interface ShadowCell {
  latDeg: number;
  lonDeg: number;
  inShadow: boolean;
  bestTBinS: number | null;
  bestSat: number;
}

export interface ShadowArtifact {
  scenarioHash: string;
  seed: string;
  cells: ShadowCell[];
  lats: number[];
  lons: number[];
}

export interface MasterclockRow {
  tS: number;
  orbitPair: string;
  tBinS: number | null;
  bestConjugate: number;
}

export interface MasterclockArtifact {
  scenarioHash: string;
  seed: string;
  rows: MasterclockRow[];
  pairs: string[];
}

export interface FomCell {
  pair: [string, string];
  mode: string;
  holdover_s: number;
  fom: {
    status: string;
    average_precision: number | null;
    largest_gap_min: number | null;
    connected_fraction_pct: number | null;
  } | null;
  error: string | null;
}

export interface FomArtifact {
  scenarioHash: string;
  cells: FomCell[];
}

export interface PlotJob {
  kind: FigureKind;
  inputs: string[];
  out: string;
  /** -log10 seconds of the clock-precision reference line (9 = 1 ns). */
  thresholdLine: number;
  title?: string;
}
