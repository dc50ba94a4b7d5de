import { describe, expect, it } from "vitest";

import { mean, meanAcross, movingAverage, std, stdAcross } from "../src/stats.js";

function directWindowMean(values: number[], window: number): number[] {
  return values.map((_, i) => {
    const slice = values.slice(Math.max(i - window + 1, 0), i + 1);
    return slice.reduce((a, b) => a + b, 0) / slice.length;
  });
}

describe("movingAverage", () => {
  it("equals the direct window mean, including the growing head", () => {
    const values = Array.from({ length: 500 }, (_, i) => Math.sin(i * 0.7) * 10 + i * 0.01);
    const got = movingAverage(values, 50);
    const want = directWindowMean(values, 50);
    got.forEach((v, i) => expect(v).toBeCloseTo(want[i], 10));
  });

  it("is the identity cumulative mean while the window is not full", () => {
    const got = movingAverage([2, 4, 6], 10);
    expect(got).toEqual([2, 3, 4]);
  });

  it("rejects a non-positive window", () => {
    expect(() => movingAverage([1], 0)).toThrow();
  });
});

describe("mean and std", () => {
  it("computes the arithmetic mean exactly", () => {
    expect(mean([1, 2, 3, 4])).toBe(2.5);
  });

  it("population std of identical values is zero", () => {
    expect(std([3.3, 3.3, 3.3])).toBe(0);
  });

  it("elementwise aggregation across series", () => {
    const series = [
      [1, 10],
      [3, 30],
    ];
    expect(meanAcross(series)).toEqual([2, 20]);
    expect(stdAcross(series)).toEqual([1, 10]);
  });
});
