/** Learning-curve figures: one mean line per algorithm with a deviation
 * band across seeds. */

import { MetricsTable, algorithmOf, readMetricsCsv } from "./csv.js";
import {
  maxAcross,
  meanAcross,
  minAcross,
  movingAverage,
  stdAcross,
} from "./stats.js";
import {
  PALETTE,
  SeriesArt,
  bandPath,
  linearScale,
  plotArea,
  polylinePoints,
  renderFigure,
} from "./svg.js";

export const DEFAULT_WINDOW = 5000;

export type BandKind = "std" | "minmax";

export interface CurveSeries {
  label: string;
  epochs: number[];
  mean: number[];
  lo: number[];
  hi: number[];
}

export interface CurveFigure {
  svg: string;
  series: CurveSeries[];
}

/** The smoothed reward column: the pre-computed one at the default
 * window, otherwise re-smoothed from raw rewards (pure arithmetic on
 * CSV cells). */
export function smoothedRewards(table: MetricsTable, window: number): number[] {
  if (window === DEFAULT_WINDOW) return table.ma_reward;
  return movingAverage(table.reward, window);
}

export function buildCurveFigure(
  paths: string[],
  window: number = DEFAULT_WINDOW,
  band: BandKind = "std",
): CurveFigure {
  if (paths.length === 0) throw new Error("no input CSV files");
  const groups = new Map<string, MetricsTable[]>();
  for (const path of paths.slice().sort()) {
    const table = readMetricsCsv(path);
    const algo = algorithmOf(path);
    if (!groups.has(algo)) groups.set(algo, []);
    groups.get(algo)!.push(table);
  }
  const series: CurveSeries[] = [];
  for (const [label, tables] of groups) {
    const epochs = tables[0].epoch;
    for (const t of tables) {
      if (t.epoch.length !== epochs.length || t.epoch.some((e, i) => e !== epochs[i])) {
        throw new Error(`${t.path}: epoch column differs from ${tables[0].path}`);
      }
    }
    const smoothed = tables.map((t) => smoothedRewards(t, window));
    const mean = meanAcross(smoothed);
    let lo: number[];
    let hi: number[];
    if (band === "minmax") {
      lo = minAcross(smoothed);
      hi = maxAcross(smoothed);
    } else {
      const sd = stdAcross(smoothed);
      lo = mean.map((m, i) => m - sd[i]);
      hi = mean.map((m, i) => m + sd[i]);
    }
    series.push({ label, epochs, mean, lo, hi });
  }

  const area = plotArea();
  const allX = series.flatMap((s) => [s.epochs[0], s.epochs[s.epochs.length - 1]]);
  const allY = series.flatMap((s) => [...s.lo, ...s.hi]).filter(Number.isFinite);
  const x = linearScale(Math.min(...allX), Math.max(...allX), area.left, area.right);
  const pad = 0.05 * (Math.max(...allY) - Math.min(...allY) || 1);
  const y = linearScale(Math.min(...allY) - pad, Math.max(...allY) + pad, area.bottom, area.top);

  const art: SeriesArt[] = series.map((s, i) => ({
    label: s.label,
    colour: PALETTE[i % PALETTE.length],
    line: polylinePoints(s.epochs, s.mean, x, y),
    band: bandPath(s.epochs, s.lo, s.hi, x, y),
    values: s.mean,
  }));
  const svg = renderFigure({
    title: "Learning curves",
    xLabel: "epoch",
    yLabel: "average reward",
    x,
    y,
    series: art,
  });
  return { svg, series };
}
