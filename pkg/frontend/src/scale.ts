/** Linear scales, tick picking, color ramps and path helpers. */

export interface LinearScale {
  (value: number): number;
  invert(pixel: number): number;
  domain: [number, number];
  range: [number, number];
}

export function linearScale(d0: number, d1: number, r0: number, r1: number): LinearScale {
  const span = d1 - d0 || 1;
  const scale = ((value: number) => r0 + ((value - d0) / span) * (r1 - r0)) as LinearScale;
  scale.invert = (pixel: number) => d0 + ((pixel - r0) / (r1 - r0 || 1)) * span;
  scale.domain = [d0, d1];
  scale.range = [r0, r1];
  return scale;
}

/** Round tick values covering [lo, hi], at most `count` of them. */
export function ticks(lo: number, hi: number, count = 5): number[] {
  if (!(hi > lo)) return [lo];
  const rawStep = (hi - lo) / Math.max(count, 1);
  const power = Math.pow(10, Math.floor(Math.log10(rawStep)));
  const candidates = [1, 2, 5, 10].map((m) => m * power);
  const step = candidates.find((c) => (hi - lo) / c <= count) ?? candidates[3];
  const start = Math.ceil(lo / step) * step;
  const out: number[] = [];
  for (let v = start; v <= hi + 1e-9; v += step) out.push(Number(v.toPrecision(12)));
  return out;
}

/** Blue-to-yellow similarity ramp on [0, 1]. */
export function rampBlueYellow(v: number): string {
  const t = Math.min(Math.max(v, 0), 1);
  const r = Math.round(40 + t * (245 - 40));
  const g = Math.round(70 + t * (220 - 70));
  const b = Math.round(200 + t * (50 - 200));
  return `rgb(${r},${g},${b})`;
}

export const PALETTE = [
  "#4878b0", "#d65f5f", "#6aa56a", "#b292c8", "#c2a04d",
  "#7f7f7f", "#57a7b5", "#c97fb5", "#8c6d31", "#393b79",
];

export const STATE_COLORS = [
  "#5b8fc9", "#e0b13f", "#c9473f", "#7d5ba6", "#5faa5f", "#888888",
];

export function seriesColor(index: number): string {
  return PALETTE[index % PALETTE.length];
}

export function pointsAttr(pts: [number, number][]): string {
  return pts.map(([x, y]) => `${x.toFixed(1)},${y.toFixed(1)}`).join(" ");
}
