import { mkdtempSync, readFileSync, readdirSync, statSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join, resolve } from "node:path";

import { describe, expect, it } from "vitest";

import { makeScale } from "../src/color.js";
import { SchemaError, parseTimeseries } from "../src/csv.js";
import { FigureSpec, render, renderToString } from "../src/render.js";

const FIGURES = resolve(__dirname, "..", "figures");
const DATA = resolve(__dirname, "..", "..", "data", "acceptance");

function loadSpec(name: string): FigureSpec {
  return JSON.parse(readFileSync(join(FIGURES, name), "utf8")) as FigureSpec;
}

describe("figure classes render from the checked-in acceptance CSVs", () => {
  for (const name of ["walls.json", "meson.json", "strings.json", "lossy.json"]) {
    it(`renders ${name} without error`, () => {
      const spec = loadSpec(name);
      const out = mkdtempSync(join(tmpdir(), "fig-"));
      spec.output = join(out, name.replace(".json", ".svg"));
      const path = render(spec, FIGURES);
      const text = readFileSync(path, "utf8");
      expect(text.startsWith("<svg")).toBe(true);
      expect(text.length).toBeGreaterThan(2000);
      expect(text).toContain("</svg>");
    });
  }

  it("is deterministic and leaves inputs untouched", () => {
    const spec = loadSpec("meson.json");
    const csvPath = join(DATA, "meson_resonant.csv");
    const before = readFileSync(csvPath, "utf8");
    const out = mkdtempSync(join(tmpdir(), "fig-"));
    spec.output = join(out, "a.svg");
    const a = readFileSync(render(spec, FIGURES), "utf8");
    spec.output = join(out, "b.svg");
    const b = readFileSync(render(spec, FIGURES), "utf8");
    expect(a).toEqual(b);
    expect(readFileSync(csvPath, "utf8")).toEqual(before);
  });
});

describe("validation", () => {
  it("rejects empty time series without writing a file", () => {
    const dir = mkdtempSync(join(tmpdir(), "fig-"));
    writeFileSync(join(dir, "empty.csv"), "t,label,index,value\n");
    const spec: FigureSpec = {
      output: join(dir, "out.svg"),
      panels: [{ kind: "heatmap", csv: "empty.csv", label: "dw_a" }],
    };
    expect(() => render(spec, dir)).toThrowError(SchemaError);
    expect(readdirSync(dir)).not.toContain("out.svg");
  });

  it("reports unknown labels with the available ones", () => {
    const rows = parseTimeseries("t,label,index,value\n0,dw_a,0,0.5\n");
    const spec: FigureSpec = {
      output: "x.svg",
      panels: [{ kind: "heatmap", csv: "d.csv", label: "dw_b" }],
    };
    expect(() => renderToString(spec, new Map([["d.csv", rows]])))
      .toThrowError(/label 'dw_b' not present.*dw_a/);
  });
});

describe("density colors are clamped to [0, 1]", () => {
  it("clamps the scale itself", () => {
    const scale = makeScale(0, 1);
    expect(scale(1.7)).toEqual(scale(1.0));
    expect(scale(-0.4)).toEqual(scale(0.0));
  });

  it("out-of-range densities render with the edge colors", () => {
    const mk = (v: number) =>
      parseTimeseries(`t,label,index,value\n0,dw_a,0,${v}\n1,dw_a,0,${v}\n`);
    const spec = (csv: string): FigureSpec => ({
      output: "x.svg",
      panels: [{ kind: "heatmap", csv, label: "dw_a" }],
    });
    const hot = renderToString(spec("h.csv"), new Map([["h.csv", mk(1.7)]]));
    const one = renderToString(spec("h.csv"), new Map([["h.csv", mk(1.0)]]));
    expect(hot).toEqual(one);
  });
});
