import { mkdtempSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

import { describe, expect, it } from "vitest";

import { readSweepCsv, SWEEP_HEADER } from "../src/csv.js";
import { buildSweepFigure, UnknownMetricError } from "../src/sweep.js";

const FIXTURES = new URL("./fixtures/", import.meta.url).pathname;
const sweepCsv = join(FIXTURES, "sweep_omega1.csv");

describe("buildSweepFigure", () => {
  it("aggregates cell means exactly from the CSV rows", () => {
    const figure = buildSweepFigure(sweepCsv, ["energy"]);
    const rows = readSweepCsv(sweepCsv);
    const series = figure.series[0];
    expect(series.points.map((p) => p.paramValue)).toEqual([0.1, 1, 10]);
    for (const point of series.points) {
      const cell = rows.filter(
        (r) => r.metric === "energy" && r.paramValue === point.paramValue,
      );
      expect(cell).toHaveLength(2);
      const recomputed = (cell[0].value + cell[1].value) / 2;
      expect(point.mean).toBe(recomputed);
      expect(point.seeds).toBe(2);
    }
  });

  it("supports several metrics as separate series", () => {
    const figure = buildSweepFigure(sweepCsv, ["aoi", "energy", "traffic"]);
    expect(figure.series.map((s) => s.metric)).toEqual(["aoi", "energy", "traffic"]);
    expect(figure.svg).toContain('data-label="aoi"');
    expect(figure.svg).toContain('data-label="traffic"');
  });

  it("rejects unknown metrics listing the available ones", () => {
    expect(() => buildSweepFigure(sweepCsv, ["latency"])).toThrow(UnknownMetricError);
    expect(() => buildSweepFigure(sweepCsv, ["latency"])).toThrow(/aoi/);
  });

  it("degenerate sweep: single value and seed renders without error bars", () => {
    const dir = mkdtempSync(join(tmpdir(), "sweep-"));
    const path = join(dir, "sweep_num_ens.csv");
    writeFileSync(
      path,
      SWEEP_HEADER + "\nnum_ens,1,5,aoi,3.25\nnum_ens,1,5,energy,0.5\n",
    );
    const figure = buildSweepFigure(path, ["aoi"]);
    expect(figure.series[0].points).toEqual([
      { paramValue: 1, mean: 3.25, std: 0, seeds: 1 },
    ]);
    // zero deviation draws no error-bar strokes
    expect(figure.svg).not.toContain("stroke-width=\"1.2\"");
  });

  it("zero traffic at a single EN yields an all-zero series", () => {
    const dir = mkdtempSync(join(tmpdir(), "sweep-"));
    const path = join(dir, "sweep_num_ens.csv");
    const lines = [SWEEP_HEADER];
    for (const seed of [1, 2]) {
      lines.push(`num_ens,1,${seed},traffic,0.0`);
      lines.push(`num_ens,2,${seed},traffic,0.31`);
    }
    writeFileSync(path, lines.join("\n") + "\n");
    const figure = buildSweepFigure(path, ["traffic"]);
    expect(figure.series[0].points[0]).toEqual({
      paramValue: 1, mean: 0, std: 0, seeds: 2,
    });
  });

  it("is deterministic for identical inputs", () => {
    const a = buildSweepFigure(sweepCsv, ["weighted_cost"]);
    const b = buildSweepFigure(sweepCsv, ["weighted_cost"]);
    expect(a.svg).toBe(b.svg);
  });
});
