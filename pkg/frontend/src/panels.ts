/** Panel renderers: density heat maps (bond x time), observable traces with
 * error bands and reference overlays, and post-selection acceptance curves
 * with an exponential comparison line. */

import { Grid, Row, SchemaError, toGrid } from "./csv.js";
import { ColorScale, clamp, makeScale } from "./color.js";
import { Box, SvgBuilder, fmt, linScale, ticks } from "./svg.js";

const TRACE_COLORS = [
  "rgb(31,119,180)", "rgb(255,127,14)", "rgb(44,160,44)",
  "rgb(214,39,40)", "rgb(148,103,189)", "rgb(140,86,75)",
];

export interface HeatmapPanel {
  kind: "heatmap";
  csv: string;
  label: string;
  /** optional second label subtracted from the first (wall-type contrast) */
  minus_label?: string;
  title?: string;
  clim?: [number, number];
}

export interface TracesPanel {
  kind: "traces";
  csv: string;
  labels: string[];
  title?: string;
  ylim?: [number, number];
  /** horizontal reference lines, e.g. a predicted oscillation bound */
  overlays?: { value: number; text: string }[];
  /** overlay exp(-rate t) scaled to the first point of the first label */
  exp_rate?: number;
}

export type PanelSpec = HeatmapPanel | TracesPanel;

function frame(svg: SvgBuilder, box: Box, title: string | undefined): Box {
  const inner: Box = { x: box.x + 46, y: box.y + 22, w: box.w - 100, h: box.h - 56 };
  if (title) svg.text(box.x + box.w / 2, box.y + 13, title, 12, "middle");
  svg.line(inner.x, inner.y, inner.x, inner.y + inner.h, "black");
  svg.line(inner.x, inner.y + inner.h, inner.x + inner.w, inner.y + inner.h, "black");
  return inner;
}

function axisLabels(svg: SvgBuilder, inner: Box, xlab: string, ylab: string): void {
  svg.text(inner.x + inner.w / 2, inner.y + inner.h + 28, xlab, 11, "middle");
  svg.text(inner.x - 34, inner.y + inner.h / 2, ylab, 11, "middle", -90);
}

function colorbar(svg: SvgBuilder, box: Box, inner: Box, scale: ColorScale,
                  lo: number, hi: number): void {
  const x = inner.x + inner.w + 12;
  const n = 24;
  for (let i = 0; i < n; i++) {
    const v = lo + ((i + 0.5) / n) * (hi - lo);
    const y = inner.y + inner.h - ((i + 1) / n) * inner.h;
    svg.rect(x, y, 12, inner.h / n + 0.5, scale(v));
  }
  svg.text(x + 16, inner.y + 10, fmt(hi), 10);
  svg.text(x + 16, inner.y + inner.h, fmt(lo), 10);
}

export function renderHeatmap(svg: SvgBuilder, box: Box, rows: Row[],
                              spec: HeatmapPanel, source: string): void {
  const grid = toGrid(rows, spec.label, source);
  let values = grid.values;
  let diverging = false;
  if (spec.minus_label) {
    const other = toGrid(rows, spec.minus_label, source);
    values = grid.values.map((row, i) => row.map((v, j) => v - other.values[i][j]));
    diverging = true;
  }
  const [lo, hi] = spec.clim ?? (diverging ? [-1, 1] : [0, 1]);
  const scale = makeScale(lo, hi, diverging);
  const inner = frame(svg, box, spec.title ?? spec.label);
  const nx = grid.indices.length;
  const nt = grid.times.length;
  const cw = inner.w / nx;
  const ch = inner.h / nt;
  for (let i = 0; i < nt; i++) {
    for (let j = 0; j < nx; j++) {
      // time flows upward, index left to right
      svg.rect(inner.x + j * cw, inner.y + inner.h - (i + 1) * ch,
               cw + 0.3, ch + 0.3, scale(values[i][j]));
    }
  }
  const tmax = grid.times[nt - 1];
  for (const tv of ticks(0, tmax, 4)) {
    const y = inner.y + inner.h - (tv / (tmax || 1)) * inner.h;
    svg.text(inner.x - 4, y + 3, fmt(tv), 9, "end");
  }
  const idxLo = grid.indices[0];
  const idxHi = grid.indices[nx - 1];
  svg.text(inner.x + cw / 2, inner.y + inner.h + 12, String(idxLo), 9, "middle");
  svg.text(inner.x + inner.w - cw / 2, inner.y + inner.h + 12, String(idxHi), 9, "middle");
  axisLabels(svg, inner, "bond / site", "time (1/V)");
  colorbar(svg, box, inner, scale, lo, hi);
}

export function renderTraces(svg: SvgBuilder, box: Box, rows: Row[],
                             spec: TracesPanel, source: string): void {
  const grids = new Map<string, Grid>();
  for (const label of spec.labels) {
    grids.set(label, toGrid(rows, label, source));
  }
  let lo = Infinity;
  let hi = -Infinity;
  for (const g of grids.values()) {
    for (const row of g.values) {
      for (const v of row) {
        if (Number.isFinite(v)) {
          lo = Math.min(lo, v);
          hi = Math.max(hi, v);
        }
      }
    }
  }
  if (spec.ylim) [lo, hi] = spec.ylim;
  if (!(hi > lo)) hi = lo + 1;
  const pad = spec.ylim ? 0 : 0.08 * (hi - lo);
  lo -= pad;
  hi += pad;
  const inner = frame(svg, box, spec.title ?? spec.labels.join(", "));
  const tmax = Math.max(...[...grids.values()].map((g) => g.times[g.times.length - 1]));
  const sx = linScale(0, tmax, inner.x, inner.x + inner.w);
  const sy = linScale(lo, hi, inner.y + inner.h, inner.y);

  for (const tv of ticks(0, tmax, 5)) {
    svg.text(sx(tv), inner.y + inner.h + 12, fmt(tv), 9, "middle");
  }
  for (const yv of ticks(lo, hi, 4)) {
    svg.text(inner.x - 4, sy(yv) + 3, fmt(yv), 9, "end");
  }

  let ci = 0;
  for (const [label, g] of grids) {
    const color = TRACE_COLORS[ci % TRACE_COLORS.length];
    const mean = g.times.map((_, i) => g.values[i][0]);
    if (g.stderr) {
      const band: [number, number][] = [];
      for (let i = 0; i < g.times.length; i++) {
        band.push([sx(g.times[i]), sy(clamp(mean[i] + 2 * g.stderr[i][0], lo, hi))]);
      }
      for (let i = g.times.length - 1; i >= 0; i--) {
        band.push([sx(g.times[i]), sy(clamp(mean[i] - 2 * g.stderr[i][0], lo, hi))]);
      }
      svg.polygon(band, color, 0.2);
    }
    svg.polyline(
      g.times.map((t, i) => [sx(t), sy(clamp(mean[i], lo, hi))] as [number, number]),
      color,
    );
    svg.text(inner.x + inner.w - 4, inner.y + 12 + 12 * ci, label, 10, "end");
    svg.line(inner.x + inner.w - 60, inner.y + 8 + 12 * ci,
             inner.x + inner.w - 48, inner.y + 8 + 12 * ci, color, 2);
    ci += 1;
  }

  for (const ov of spec.overlays ?? []) {
    svg.line(sx(0), sy(ov.value), sx(tmax), sy(ov.value), "gray", 1);
    svg.text(sx(tmax * 0.02), sy(ov.value) - 4, ov.text, 9);
  }
  if (spec.exp_rate !== undefined) {
    const g0 = grids.get(spec.labels[0])!;
    const a0 = g0.values[0][0];
    const pts: [number, number][] = g0.times.map((t) => [
      sx(t), sy(clamp(a0 * Math.exp(-spec.exp_rate! * t), lo, hi)),
    ]);
    svg.polyline(pts, "black", 1, "4 3");
  }
  axisLabels(svg, inner, "time (1/V)", "");
}
