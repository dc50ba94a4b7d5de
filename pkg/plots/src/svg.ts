/** Deterministic SVG assembly: fixed canvas, no timestamps, data values
 * attached to each series so plotted numbers stay machine-traceable. */

export const WIDTH = 800;
export const HEIGHT = 500;
export const MARGIN = { left: 70, right: 20, top: 40, bottom: 55 };

export const PALETTE = [
  "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b",
];

export interface Scale {
  min: number;
  max: number;
  toPx(v: number): number;
}

export function linearScale(min: number, max: number, pxLo: number, pxHi: number): Scale {
  const span = max - min || 1;
  return {
    min,
    max,
    toPx: (v: number) => pxLo + ((v - min) / span) * (pxHi - pxLo),
  };
}

/** Round tick positions: 1/2/5 steps covering [lo, hi]. */
export function niceTicks(lo: number, hi: number, target = 6): number[] {
  if (!(hi > lo)) return [lo];
  const rawStep = (hi - lo) / target;
  const mag = 10 ** Math.floor(Math.log10(rawStep));
  const step = [1, 2, 5, 10].map((m) => m * mag).find((s) => s >= rawStep) ?? rawStep;
  const first = Math.ceil(lo / step) * step;
  const ticks: number[] = [];
  for (let v = first; v <= hi + step * 1e-9; v += step) ticks.push(Number(v.toPrecision(12)));
  return ticks;
}

const px = (v: number) => (Math.round(v * 100) / 100).toString();

export function polylinePoints(xs: number[], ys: number[], x: Scale, y: Scale): string {
  return xs.map((v, i) => `${px(x.toPx(v))},${px(y.toPx(ys[i]))}`).join(" ");
}

export function bandPath(xs: number[], lo: number[], hi: number[], x: Scale, y: Scale): string {
  const upper = xs.map((v, i) => `${px(x.toPx(v))},${px(y.toPx(hi[i]))}`);
  const lower = xs
    .map((v, i) => `${px(x.toPx(v))},${px(y.toPx(lo[i]))}`)
    .reverse();
  return [...upper, ...lower].join(" ");
}

export interface SeriesArt {
  label: string;
  colour: string;
  line: string;
  band?: string;
  errorBars?: string;
  markers?: string;
  values: number[];
}

export function renderFigure(opts: {
  title: string;
  xLabel: string;
  yLabel: string;
  x: Scale;
  y: Scale;
  series: SeriesArt[];
}): string {
  const { x, y } = opts;
  const plotLeft = MARGIN.left;
  const plotRight = WIDTH - MARGIN.right;
  const plotTop = MARGIN.top;
  const plotBottom = HEIGHT - MARGIN.bottom;
  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 ${WIDTH} ${HEIGHT}" font-family="sans-serif" font-size="13">`,
    `<rect width="${WIDTH}" height="${HEIGHT}" fill="white"/>`,
    `<text x="${WIDTH / 2}" y="22" text-anchor="middle" font-size="16">${escapeXml(opts.title)}</text>`,
  );
  for (const tick of niceTicks(x.min, x.max)) {
    const tx = px(x.toPx(tick));
    parts.push(
      `<line x1="${tx}" y1="${plotTop}" x2="${tx}" y2="${plotBottom}" stroke="#dddddd"/>`,
      `<text x="${tx}" y="${plotBottom + 18}" text-anchor="middle">${formatTick(tick)}</text>`,
    );
  }
  for (const tick of niceTicks(y.min, y.max)) {
    const ty = px(y.toPx(tick));
    parts.push(
      `<line x1="${plotLeft}" y1="${ty}" x2="${plotRight}" y2="${ty}" stroke="#dddddd"/>`,
      `<text x="${plotLeft - 8}" y="${ty}" text-anchor="end" dominant-baseline="middle">${formatTick(tick)}</text>`,
    );
  }
  parts.push(
    `<rect x="${plotLeft}" y="${plotTop}" width="${plotRight - plotLeft}" height="${plotBottom - plotTop}" fill="none" stroke="#333333"/>`,
    `<text x="${(plotLeft + plotRight) / 2}" y="${HEIGHT - 14}" text-anchor="middle">${escapeXml(opts.xLabel)}</text>`,
    `<text transform="rotate(-90 18 ${(plotTop + plotBottom) / 2})" x="18" y="${(plotTop + plotBottom) / 2}" text-anchor="middle">${escapeXml(opts.yLabel)}</text>`,
  );
  opts.series.forEach((s, i) => {
    if (s.band) {
      parts.push(`<polygon points="${s.band}" fill="${s.colour}" fill-opacity="0.18" stroke="none"/>`);
    }
    if (s.errorBars) parts.push(s.errorBars);
    parts.push(
      `<polyline points="${s.line}" fill="none" stroke="${s.colour}" stroke-width="1.8" data-label="${escapeXml(s.label)}" data-values="${s.values.map(String).join(" ")}"/>`,
    );
    if (s.markers) parts.push(s.markers);
    const ly = plotTop + 16 + i * 18;
    parts.push(
      `<line x1="${plotRight - 130}" y1="${ly}" x2="${plotRight - 104}" y2="${ly}" stroke="${s.colour}" stroke-width="1.8"/>`,
      `<text x="${plotRight - 98}" y="${ly + 4}">${escapeXml(s.label)}</text>`,
    );
  });
  parts.push("</svg>");
  return parts.join("\n");
}

export function plotArea() {
  return {
    left: MARGIN.left,
    right: WIDTH - MARGIN.right,
    top: MARGIN.top,
    bottom: HEIGHT - MARGIN.bottom,
  };
}

function formatTick(v: number): string {
  if (v !== 0 && (Math.abs(v) >= 1e5 || Math.abs(v) < 1e-3)) return v.toExponential(1);
  return String(Number(v.toPrecision(10)));
}

function escapeXml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}
