/** Sweep figures: metric means versus the swept parameter with error
 * bars across seeds. */

import { SweepRow, readSweepCsv } from "./csv.js";
import { mean, std } from "./stats.js";
import {
  PALETTE,
  SeriesArt,
  linearScale,
  plotArea,
  polylinePoints,
  renderFigure,
} from "./svg.js";

export class UnknownMetricError extends Error {
  constructor(metric: string, available: string[]) {
    super(`unknown metric ${JSON.stringify(metric)}; available: ${available.sort().join(", ")}`);
  }
}

export interface SweepPoint {
  paramValue: number;
  mean: number;
  std: number;
  seeds: number;
}

export interface SweepSeries {
  metric: string;
  points: SweepPoint[];
}

export interface SweepFigure {
  svg: string;
  param: string;
  series: SweepSeries[];
}

export function aggregate(rows: SweepRow[], metric: string): SweepPoint[] {
  const byValue = new Map<number, number[]>();
  for (const row of rows) {
    if (row.metric !== metric) continue;
    if (!byValue.has(row.paramValue)) byValue.set(row.paramValue, []);
    byValue.get(row.paramValue)!.push(row.value);
  }
  return [...byValue.entries()]
    .sort((a, b) => a[0] - b[0])
    .map(([paramValue, values]) => ({
      paramValue,
      mean: mean(values),
      std: std(values),
      seeds: values.length,
    }));
}

export function buildSweepFigure(path: string, metrics: string[]): SweepFigure {
  const rows = readSweepCsv(path);
  if (rows.length === 0) throw new Error(`${path}: no sweep rows`);
  const available = [...new Set(rows.map((r) => r.metric))];
  const param = rows[0].param;
  const series: SweepSeries[] = metrics.map((metric) => {
    if (!available.includes(metric)) throw new UnknownMetricError(metric, available);
    return { metric, points: aggregate(rows, metric) };
  });

  const area = plotArea();
  const xs = series[0].points.map((p) => p.paramValue);
  const ys = series.flatMap((s) => s.points.flatMap((p) => [p.mean - p.std, p.mean + p.std]));
  const padX = 0.05 * (Math.max(...xs) - Math.min(...xs) || 1);
  const padY = 0.08 * (Math.max(...ys) - Math.min(...ys) || 1);
  const x = linearScale(Math.min(...xs) - padX, Math.max(...xs) + padX, area.left, area.right);
  const y = linearScale(Math.min(...ys) - padY, Math.max(...ys) + padY, area.bottom, area.top);

  const art: SeriesArt[] = series.map((s, i) => {
    const colour = PALETTE[i % PALETTE.length];
    const px = s.points.map((p) => p.paramValue);
    const py = s.points.map((p) => p.mean);
    const bars = s.points
      .map((p) => {
        if (p.std === 0) return "";
        const cx = x.toPx(p.paramValue);
        const yLo = y.toPx(p.mean - p.std);
        const yHi = y.toPx(p.mean + p.std);
        return (
          `<line x1="${cx}" y1="${yLo}" x2="${cx}" y2="${yHi}" stroke="${colour}" stroke-width="1.2"/>` +
          `<line x1="${cx - 4}" y1="${yLo}" x2="${cx + 4}" y2="${yLo}" stroke="${colour}"/>` +
          `<line x1="${cx - 4}" y1="${yHi}" x2="${cx + 4}" y2="${yHi}" stroke="${colour}"/>`
        );
      })
      .join("");
    const markers = s.points
      .map((p) => `<circle cx="${x.toPx(p.paramValue)}" cy="${y.toPx(p.mean)}" r="3.2" fill="${colour}"/>`)
      .join("");
    return {
      label: s.metric,
      colour,
      line: polylinePoints(px, py, x, y),
      errorBars: bars,
      markers,
      values: py,
    };
  });
  const svg = renderFigure({
    title: `Sweep over ${param}`,
    xLabel: param,
    yLabel: metrics.join(" / "),
    x,
    y,
    series: art,
  });
  return { svg, param, series };
}
