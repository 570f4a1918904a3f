/** Colormaps with hard clamping: projector densities are probabilities, so
 * the sequential scale is pinned to [0, 1] by default and every value is
 * clamped into the limits before the lookup. */

const VIRIDIS: [number, number, number][] = [
  [68, 1, 84], [71, 25, 112], [70, 47, 124], [64, 70, 136],
  [56, 90, 140], [48, 108, 142], [41, 125, 142], [34, 141, 141],
  [30, 157, 137], [35, 172, 127], [55, 188, 113], [92, 201, 91],
  [132, 212, 65], [175, 220, 43], [220, 227, 25], [253, 231, 37],
];

const DIVERGING: [number, number, number][] = [
  [33, 102, 172], [67, 147, 195], [146, 197, 222], [209, 229, 240],
  [247, 247, 247], [253, 219, 199], [244, 165, 130], [214, 96, 77],
  [178, 24, 43],
];

export function clamp(x: number, lo: number, hi: number): number {
  return Math.min(hi, Math.max(lo, x));
}

function lookup(table: [number, number, number][], u: number): string {
  const s = clamp(u, 0, 1) * (table.length - 1);
  const k = Math.min(Math.floor(s), table.length - 2);
  const f = s - k;
  const mix = (a: number, b: number) => Math.round(a + f * (b - a));
  const [r0, g0, b0] = table[k];
  const [r1, g1, b1] = table[k + 1];
  return `rgb(${mix(r0, r1)},${mix(g0, g1)},${mix(b0, b1)})`;
}

export type ColorScale = (value: number) => string;

/** value -> color, clamped into [lo, hi]; NaN renders as light gray. */
export function makeScale(lo: number, hi: number, diverging = false): ColorScale {
  const table = diverging ? DIVERGING : VIRIDIS;
  return (value: number) => {
    if (!Number.isFinite(value)) return "rgb(225,225,225)";
    return lookup(table, (clamp(value, lo, hi) - lo) / (hi - lo));
  };
}
