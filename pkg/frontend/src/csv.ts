/**
 * Reader for the long-format time-series CSV emitted by the simulation
 * runner: columns `t,label,index,value[,stderr]`, one observable component
 * per row.  The `index` column carries the bond/site/cut argument and is
 * empty for scalar observables.
 */

import { readFileSync } from "node:fs";

export interface Row {
  t: number;
  label: string;
  index: string; // "" for scalars, integer text for bonds/sites/cuts
  value: number;
  stderr?: number;
}

export class SchemaError extends Error {}

const REQUIRED = ["t", "label", "index", "value"];

export function parseTimeseries(text: string, source = "<string>"): Row[] {
  const lines = text.split("\n").filter((l) => l.trim().length > 0);
  if (lines.length === 0) {
    throw new SchemaError(`${source}: empty file`);
  }
  const header = lines[0].split(",").map((h) => h.trim());
  for (let i = 0; i < REQUIRED.length; i++) {
    if (header[i] !== REQUIRED[i]) {
      throw new SchemaError(
        `${source}: expected column ${i + 1} to be '${REQUIRED[i]}', ` +
          `found '${header[i] ?? "<missing>"}'`,
      );
    }
  }
  const hasStderr = header.length > 4;
  if (hasStderr && header[4] !== "stderr") {
    throw new SchemaError(
      `${source}: expected column 5 to be 'stderr', found '${header[4]}'`,
    );
  }
  const rows: Row[] = [];
  for (let k = 1; k < lines.length; k++) {
    const parts = lines[k].split(",");
    if (parts.length < 4) {
      throw new SchemaError(`${source}: line ${k + 1} has ${parts.length} fields`);
    }
    const t = Number(parts[0]);
    const value = Number(parts[3]);
    if (!Number.isFinite(t)) {
      throw new SchemaError(`${source}: line ${k + 1}: bad t '${parts[0]}'`);
    }
    const row: Row = { t, label: parts[1], index: parts[2], value };
    if (hasStderr && parts[4] !== undefined && parts[4] !== "") {
      row.stderr = Number(parts[4]);
    }
    rows.push(row);
  }
  if (rows.length === 0) {
    throw new SchemaError(`${source}: no data rows`);
  }
  return rows;
}

export function readTimeseries(path: string): Row[] {
  return parseTimeseries(readFileSync(path, "utf8"), path);
}

export function labelsOf(rows: Row[]): Set<string> {
  return new Set(rows.map((r) => r.label));
}

/** Rows of one label arranged as a (time) x (index) grid. */
export interface Grid {
  times: number[];
  indices: number[];
  values: number[][]; // [time][index]
  stderr?: number[][];
}

export function toGrid(rows: Row[], label: string, source = "<rows>"): Grid {
  const sel = rows.filter((r) => r.label === label);
  if (sel.length === 0) {
    throw new SchemaError(`${source}: no rows with label '${label}'`);
  }
  const times = [...new Set(sel.map((r) => r.t))].sort((a, b) => a - b);
  const indices = [...new Set(sel.map((r) => r.index))]
    .map((s) => (s === "" ? 0 : Number(s)))
    .sort((a, b) => a - b);
  const ti = new Map(times.map((t, i) => [t, i]));
  const xi = new Map(indices.map((x, i) => [x, i]));
  const values = times.map(() => indices.map(() => NaN));
  const errs = times.map(() => indices.map(() => NaN));
  let sawErr = false;
  for (const r of sel) {
    const i = ti.get(r.t)!;
    const j = xi.get(r.index === "" ? 0 : Number(r.index))!;
    values[i][j] = r.value;
    if (r.stderr !== undefined) {
      errs[i][j] = r.stderr;
      sawErr = true;
    }
  }
  const grid: Grid = { times, indices, values };
  if (sawErr) grid.stderr = errs;
  return grid;
}
