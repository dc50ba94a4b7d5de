#!/usr/bin/env node
/** `plot curves` and `plot sweep`: turn harness CSVs into SVG charts. */

import { writeFileSync } from "node:fs";
import { parseArgs } from "node:util";

import { CsvFormatError } from "./csv.js";
import { BandKind, DEFAULT_WINDOW, buildCurveFigure } from "./curves.js";
import { expandGlob } from "./glob.js";
import { UnknownMetricError, buildSweepFigure } from "./sweep.js";

const USAGE = `usage:
  plot curves --in <glob> [--in <glob> ...] --out <path> [--window N] [--band std|minmax]
  plot sweep --in <csv> --metric <name>[,<name>...] --out <path>`;

export function main(argv: string[]): number {
  const command = argv[0];
  try {
    if (command === "curves") return curves(argv.slice(1));
    if (command === "sweep") return sweep(argv.slice(1));
  } catch (err) {
    if (
      err instanceof CsvFormatError ||
      err instanceof UnknownMetricError ||
      err instanceof Error
    ) {
      console.error(`error: ${(err as Error).message}`);
      return 1;
    }
    throw err;
  }
  console.error(USAGE);
  return 2;
}

function curves(argv: string[]): number {
  const { values } = parseArgs({
    args: argv,
    options: {
      in: { type: "string", multiple: true },
      out: { type: "string" },
      window: { type: "string" },
      band: { type: "string", default: "std" },
    },
  });
  if (!values.in?.length || !values.out) {
    console.error(USAGE);
    return 2;
  }
  const band = values.band as BandKind;
  if (band !== "std" && band !== "minmax") {
    console.error(`error: --band must be std or minmax, got ${values.band}`);
    return 2;
  }
  const window = values.window ? Number(values.window) : DEFAULT_WINDOW;
  if (!Number.isFinite(window) || window <= 0) {
    console.error(`error: --window must be a positive integer, got ${values.window}`);
    return 2;
  }
  const paths = values.in.flatMap(expandGlob);
  if (paths.length === 0) {
    console.error(`error: no files match ${values.in.join(", ")}`);
    return 1;
  }
  const figure = buildCurveFigure(paths, window, band);
  writeFileSync(values.out, figure.svg);
  console.log(
    `wrote ${values.out}: ${figure.series.length} algorithm(s), ${paths.length} run file(s)`,
  );
  return 0;
}

function sweep(argv: string[]): number {
  const { values } = parseArgs({
    args: argv,
    options: {
      in: { type: "string" },
      metric: { type: "string" },
      out: { type: "string" },
    },
  });
  if (!values.in || !values.metric || !values.out) {
    console.error(USAGE);
    return 2;
  }
  const metrics = values.metric.split(",").map((m) => m.trim()).filter(Boolean);
  const figure = buildSweepFigure(values.in, metrics);
  writeFileSync(values.out, figure.svg);
  console.log(`wrote ${values.out}: ${figure.param} sweep, ${metrics.join(", ")}`);
  return 0;
}

const invokedDirectly =
  process.argv[1] !== undefined &&
  import.meta.url === new URL(`file://${process.argv[1]}`).href;
if (invokedDirectly) {
  process.exit(main(process.argv.slice(2)));
}
