/** Strict readers for the two CSV contracts emitted by the training harness. */

import { readFileSync } from "node:fs";

export const METRICS_HEADER =
  "epoch,reward,ma_reward,aoi,energy,traffic,alpha,loss_q,loss_pi,loss_alpha";
export const SWEEP_HEADER = "param,param_value,seed,metric,value";

export class CsvFormatError extends Error {}

export interface MetricsTable {
  path: string;
  epoch: number[];
  reward: number[];
  ma_reward: number[];
  aoi: number[];
  energy: number[];
  traffic: number[];
  alpha: number[];
  loss_q: number[];
  loss_pi: number[];
  loss_alpha: number[];
}

export interface SweepRow {
  param: string;
  paramValue: number;
  seed: number;
  metric: string;
  value: number;
}

/** Python float reprs include bare "nan"/"inf"; map them onto JS numbers. */
export function parseNumber(text: string, path: string, line: number): number {
  const t = text.trim();
  if (t === "nan" || t === "NaN") return NaN;
  if (t === "inf" || t === "Infinity") return Infinity;
  if (t === "-inf" || t === "-Infinity") return -Infinity;
  if (t === "") throw new CsvFormatError(`${path}:${line}: empty numeric field`);
  const value = Number(t);
  if (Number.isNaN(value)) {
    throw new CsvFormatError(`${path}:${line}: not a number: ${JSON.stringify(t)}`);
  }
  return value;
}

function readLines(path: string, expectedHeader: string): string[] {
  let text: string;
  try {
    text = readFileSync(path, "utf8");
  } catch {
    throw new CsvFormatError(`cannot read ${path}`);
  }
  const lines = text.split("\n").filter((l) => l.length > 0);
  if (lines.length === 0 || lines[0] !== expectedHeader) {
    throw new CsvFormatError(
      `${path}: expected header ${JSON.stringify(expectedHeader)}, got ${JSON.stringify(lines[0] ?? "")}`,
    );
  }
  return lines.slice(1);
}

export function readMetricsCsv(path: string): MetricsTable {
  const rows = readLines(path, METRICS_HEADER);
  const columns = METRICS_HEADER.split(",");
  const table: MetricsTable = {
    path,
    epoch: [], reward: [], ma_reward: [], aoi: [], energy: [],
    traffic: [], alpha: [], loss_q: [], loss_pi: [], loss_alpha: [],
  };
  rows.forEach((row, i) => {
    const parts = row.split(",");
    if (parts.length !== columns.length) {
      throw new CsvFormatError(`${path}:${i + 2}: expected ${columns.length} fields`);
    }
    columns.forEach((name, j) => {
      (table as unknown as Record<string, number[]>)[name].push(
        parseNumber(parts[j], path, i + 2),
      );
    });
  });
  return table;
}

export function readSweepCsv(path: string): SweepRow[] {
  const rows = readLines(path, SWEEP_HEADER);
  return rows.map((row, i) => {
    const parts = row.split(",");
    if (parts.length !== 5) {
      throw new CsvFormatError(`${path}:${i + 2}: expected 5 fields`);
    }
    return {
      param: parts[0],
      paramValue: parseNumber(parts[1], path, i + 2),
      seed: parseNumber(parts[2], path, i + 2),
      metric: parts[3],
      value: parseNumber(parts[4], path, i + 2),
    };
  });
}

/** Pull the algorithm name out of a harness metrics filename. */
export function algorithmOf(path: string): string {
  const base = path.split("/").pop() ?? path;
  const match = base.match(/^metrics_(.+)_(\d+)\.csv$/);
  return match ? match[1] : base.replace(/\.csv$/, "");
}
