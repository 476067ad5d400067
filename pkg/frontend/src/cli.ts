#!/usr/bin/env node
import { writeFileSync } from "node:fs";
import yargs from "yargs";
import { hideBin } from "yargs/helpers";
import { render } from "./render.js";
import type { FigureKind, PlotJob } from "./types.js";

const KINDS: FigureKind[] = ["trace", "shadow_map", "masterclock", "fom_table"];

export function main(argv: string[]): number {
  const args = yargs(argv)
    .scriptName("plot-qcs")
    .option("kind", {
      choices: KINDS,
      demandOption: true,
      describe: "figure kind to render",
    })
    .option("in", {
      type: "array",
      demandOption: true,
      describe: "input artifact paths (same scenario hash)",
    })
    .option("out", {
      type: "string",
      demandOption: true,
      describe: "output file (SVG, or HTML for fom_table)",
    })
    .option("threshold", {
      type: "number",
      default: 9,
      describe: "-log10 seconds of the clock-precision reference line",
    })
    .option("title", { type: "string" })
    .strict()
    .parseSync();

  const job: PlotJob = {
    kind: args.kind,
    inputs: (args.in as Array<string | number>).map(String),
    out: args.out,
    thresholdLine: args.threshold,
    title: args.title,
  };
  try {
    writeFileSync(job.out, render(job));
    console.log(`wrote ${job.out}`);
    return 0;
  } catch (err) {
    console.error(String(err instanceof Error ? err.message : err));
    return 1;
  }
}

const invokedDirectly = process.argv[1]?.endsWith("cli.js");
if (invokedDirectly) {
  process.exit(main(hideBin(process.argv)));
}
