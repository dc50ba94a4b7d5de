import { copyFileSync, mkdtempSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

import { describe, expect, it } from "vitest";

import { readMetricsCsv } from "../src/csv.js";
import { buildCurveFigure, smoothedRewards } from "../src/curves.js";

const FIXTURES = new URL("./fixtures/", import.meta.url).pathname;

const seed1 = join(FIXTURES, "metrics_madsac_cc_1.csv");
const seed2 = join(FIXTURES, "metrics_madsac_cc_2.csv");
const rand1 = join(FIXTURES, "metrics_random_1.csv");
const rand2 = join(FIXTURES, "metrics_random_2.csv");

describe("buildCurveFigure", () => {
  it("single seed: the line equals the ma_reward column exactly", () => {
    const figure = buildCurveFigure([seed1]);
    const table = readMetricsCsv(seed1);
    expect(figure.series).toHaveLength(1);
    expect(figure.series[0].mean).toEqual(table.ma_reward);
    expect(figure.series[0].lo).toEqual(table.ma_reward);
    expect(figure.series[0].hi).toEqual(table.ma_reward);
  });

  it("two identical seed files collapse the band to zero width", () => {
    const dir = mkdtempSync(join(tmpdir(), "curves-"));
    const copy = join(dir, "metrics_madsac_cc_9.csv");
    copyFileSync(seed1, copy);
    const figure = buildCurveFigure([seed1, copy], 5000, "std");
    const s = figure.series[0];
    s.mean.forEach((m, i) => {
      expect(s.lo[i]).toBe(m);
      expect(s.hi[i]).toBe(m);
    });
    // the svg band polygon's upper and lower edges coincide
    const band = figure.svg.match(/<polygon points="([^"]+)"/)![1].split(" ");
    const upper = band.slice(0, band.length / 2);
    const lower = band.slice(band.length / 2).reverse();
    expect(upper).toEqual(lower);
  });

  it("mean line equals the recomputed across-seed mean at spot-checked epochs", () => {
    const figure = buildCurveFigure([seed1, seed2, rand1, rand2]);
    const byLabel = new Map(figure.series.map((s) => [s.label, s]));
    const tables = [readMetricsCsv(seed1), readMetricsCsv(seed2)];
    const series = byLabel.get("madsac_cc")!;
    for (const idx of [0, 57, 119]) {
      const recomputed = (tables[0].ma_reward[idx] + tables[1].ma_reward[idx]) / 2;
      expect(series.mean[idx]).toBe(recomputed);
    }
    expect(byLabel.has("random")).toBe(true);
  });

  it("std band uses the across-seed deviation", () => {
    const figure = buildCurveFigure([seed1, seed2], 5000, "std");
    const tables = [readMetricsCsv(seed1), readMetricsCsv(seed2)];
    const s = figure.series[0];
    const idx = 100;
    const m = (tables[0].ma_reward[idx] + tables[1].ma_reward[idx]) / 2;
    const sd = Math.abs(tables[0].ma_reward[idx] - m);
    expect(s.hi[idx]).toBeCloseTo(m + sd, 12);
    expect(s.lo[idx]).toBeCloseTo(m - sd, 12);
  });

  it("minmax band envelopes both seeds", () => {
    const figure = buildCurveFigure([seed1, seed2], 5000, "minmax");
    const tables = [readMetricsCsv(seed1), readMetricsCsv(seed2)];
    const s = figure.series[0];
    for (const idx of [3, 60, 119]) {
      expect(s.lo[idx]).toBe(Math.min(tables[0].ma_reward[idx], tables[1].ma_reward[idx]));
      expect(s.hi[idx]).toBe(Math.max(tables[0].ma_reward[idx], tables[1].ma_reward[idx]));
    }
  });

  it("embeds the plotted values losslessly in the svg", () => {
    const figure = buildCurveFigure([seed1]);
    const match = figure.svg.match(/data-values="([^"]+)"/);
    const embedded = match![1].split(" ").map(Number);
    expect(embedded).toEqual(figure.series[0].mean);
  });

  it("re-smoothing with a custom window stays traceable to the reward column", () => {
    const window = 10;
    const figure = buildCurveFigure([seed1], window);
    const table = readMetricsCsv(seed1);
    expect(figure.series[0].mean).toEqual(smoothedRewards(table, window));
    // spot check one cell against a direct slice mean
    const idx = 42;
    const slice = table.reward.slice(idx - window + 1, idx + 1);
    const direct = slice.reduce((a, b) => a + b, 0) / window;
    expect(figure.series[0].mean[idx]).toBeCloseTo(direct, 10);
  });

  it("is deterministic for identical inputs", () => {
    const a = buildCurveFigure([seed1, seed2]);
    const b = buildCurveFigure([seed1, seed2]);
    expect(a.svg).toBe(b.svg);
  });

  it("rejects runs with mismatched epoch grids", () => {
    const dir = mkdtempSync(join(tmpdir(), "curves-"));
    const truncated = join(dir, "metrics_madsac_cc_7.csv");
    const original = readMetricsCsv(seed1);
    const header =
      "epoch,reward,ma_reward,aoi,energy,traffic,alpha,loss_q,loss_pi,loss_alpha";
    const pyRepr = (v: number) => (Number.isNaN(v) ? "nan" : String(v));
    const lines = [header];
    for (let i = 0; i < 50; i++) {
      lines.push(
        [
          original.epoch[i], original.reward[i], original.ma_reward[i],
          original.aoi[i], original.energy[i], original.traffic[i],
          original.alpha[i], original.loss_q[i], original.loss_pi[i],
          original.loss_alpha[i],
        ].map(pyRepr).join(","),
      );
    }
    writeFileSync(truncated, lines.join("\n") + "\n");
    expect(() => buildCurveFigure([seed1, truncated])).toThrow(/epoch column/);
  });
});
