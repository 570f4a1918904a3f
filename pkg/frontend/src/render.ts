/** Figure composition: validate the spec against the CSV contents, lay the
 * panels out on a grid, and write one deterministic SVG file. */

import { mkdirSync, writeFileSync } from "node:fs";
import { dirname, resolve } from "node:path";

import { Row, SchemaError, labelsOf, readTimeseries } from "./csv.js";
import { PanelSpec, renderHeatmap, renderTraces } from "./panels.js";
import { SvgBuilder } from "./svg.js";

export interface FigureSpec {
  title?: string;
  output: string;
  columns?: number;
  panel_width?: number;
  panel_height?: number;
  panels: PanelSpec[];
  /** base directory for relative CSV paths (defaults to the spec's dir) */
  base?: string;
}

function panelLabels(p: PanelSpec): string[] {
  if (p.kind === "heatmap") {
    return p.minus_label ? [p.label, p.minus_label] : [p.label];
  }
  return p.labels;
}

export function validateSpec(spec: FigureSpec, data: Map<string, Row[]>): void {
  if (!spec.panels || spec.panels.length === 0) {
    throw new SchemaError("figure spec has no panels");
  }
  for (const p of spec.panels) {
    const rows = data.get(p.csv);
    if (!rows) throw new SchemaError(`no data loaded for ${p.csv}`);
    const present = labelsOf(rows);
    for (const label of panelLabels(p)) {
      if (!present.has(label)) {
        throw new SchemaError(
          `${p.csv}: label '${label}' not present (have: ${[...present].sort().join(", ")})`,
        );
      }
    }
    if (p.kind === "heatmap" && p.clim && !(p.clim[0] < p.clim[1])) {
      throw new SchemaError(`bad color limits [${p.clim}] for '${p.label}'`);
    }
  }
}

/** Render to an SVG string (pure: inputs are never mutated). */
export function renderToString(spec: FigureSpec, data: Map<string, Row[]>): string {
  validateSpec(spec, data);
  const cols = spec.columns ?? Math.min(2, spec.panels.length);
  const rows = Math.ceil(spec.panels.length / cols);
  const pw = spec.panel_width ?? 320;
  const ph = spec.panel_height ?? 240;
  const top = spec.title ? 24 : 0;
  const svg = new SvgBuilder(cols * pw, rows * ph + top);
  if (spec.title) svg.text((cols * pw) / 2, 16, spec.title, 14, "middle");
  spec.panels.forEach((panel, k) => {
    const box = {
      x: (k % cols) * pw,
      y: top + Math.floor(k / cols) * ph,
      w: pw,
      h: ph,
    };
    const panelRows = data.get(panel.csv)!;
    if (panel.kind === "heatmap") {
      renderHeatmap(svg, box, panelRows, panel, panel.csv);
    } else {
      renderTraces(svg, box, panelRows, panel, panel.csv);
    }
  });
  return svg.toString();
}

/** Load the CSVs named by the panels, validate, render, write the file.
 * Nothing is written when validation fails. */
export function render(spec: FigureSpec, baseDir = "."): string {
  const base = spec.base ? resolve(baseDir, spec.base) : baseDir;
  const data = new Map<string, Row[]>();
  for (const p of spec.panels ?? []) {
    if (!data.has(p.csv)) {
      data.set(p.csv, readTimeseries(resolve(base, p.csv)));
    }
  }
  const text = renderToString(spec, data);
  const out = resolve(baseDir, spec.output);
  mkdirSync(dirname(out), { recursive: true });
  writeFileSync(out, text);
  return out;
}
