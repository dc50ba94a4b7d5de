/** Small numeric helpers shared by the chart builders. */

/**
 * Moving average with a growing head: entry t averages the last
 * min(window, t+1) values, matching the harness's definition.
 */
export function movingAverage(values: number[], window: number): number[] {
  if (window <= 0) throw new Error("window must be positive");
  const out = new Array<number>(values.length);
  let sum = 0;
  for (let i = 0; i < values.length; i++) {
    sum += values[i];
    if (i >= window) sum -= values[i - window];
    const n = Math.min(window, i + 1);
    // refresh the sliding sum periodically so rounding drift cannot build up
    if ((i & 0xfff) === 0xfff) {
      sum = 0;
      for (let j = i - n + 1; j <= i; j++) sum += values[j];
    }
    out[i] = sum / n;
  }
  return out;
}

/** Left-to-right arithmetic mean. */
export function mean(values: number[]): number {
  let sum = 0;
  for (const v of values) sum += v;
  return sum / values.length;
}

/** Population standard deviation (matches shaded-band conventions).
 * Identical inputs return exactly zero so degenerate bands collapse. */
export function std(values: number[]): number {
  if (values.every((v) => v === values[0])) return 0;
  const m = mean(values);
  let acc = 0;
  for (const v of values) acc += (v - m) * (v - m);
  return Math.sqrt(acc / values.length);
}

/** Elementwise mean across equally long series. */
export function meanAcross(series: number[][]): number[] {
  const n = series[0].length;
  return Array.from({ length: n }, (_, i) => mean(series.map((s) => s[i])));
}

export function stdAcross(series: number[][]): number[] {
  const n = series[0].length;
  return Array.from({ length: n }, (_, i) => std(series.map((s) => s[i])));
}

export function minAcross(series: number[][]): number[] {
  const n = series[0].length;
  return Array.from({ length: n }, (_, i) => Math.min(...series.map((s) => s[i])));
}

export function maxAcross(series: number[][]): number[] {
  const n = series[0].length;
  return Array.from({ length: n }, (_, i) => Math.max(...series.map((s) => s[i])));
}
