import { describe, expect, it } from "vitest";

import { SchemaError, labelsOf, parseTimeseries, toGrid } from "../src/csv.js";

const GOOD = `t,label,index,value
0,n_ph,,0.5
0,dw_a,0,0
0,dw_a,1,1
2,n_ph,,0.25
2,dw_a,0,0.5
2,dw_a,1,0.5
`;

const WITH_ERR = `t,label,index,value,stderr
0,n_ph,,0.5,0.01
1,n_ph,,0.4,0.02
`;

describe("timeseries parsing", () => {
  it("reads long-format rows", () => {
    const rows = parseTimeseries(GOOD);
    expect(rows).toHaveLength(6);
    expect(labelsOf(rows)).toEqual(new Set(["n_ph", "dw_a"]));
    expect(rows[0]).toMatchObject({ t: 0, label: "n_ph", index: "", value: 0.5 });
  });

  it("reads the stderr column when present", () => {
    const rows = parseTimeseries(WITH_ERR);
    expect(rows[1].stderr).toBeCloseTo(0.02);
  });

  it("names the offending column on schema mismatch", () => {
    expect(() => parseTimeseries("t,name,index,value\n0,a,,1\n", "x.csv"))
      .toThrowError(/column 2.*'label'.*'name'/);
    expect(() => parseTimeseries("t,label,index,value,sigma\n0,a,,1,0\n"))
      .toThrowError(/column 5.*'stderr'/);
  });

  it("rejects empty inputs", () => {
    expect(() => parseTimeseries("", "e.csv")).toThrowError(SchemaError);
    expect(() => parseTimeseries("t,label,index,value\n", "e.csv"))
      .toThrowError(/no data rows/);
  });

  it("arranges one label as a time-by-index grid", () => {
    const grid = toGrid(parseTimeseries(GOOD), "dw_a");
    expect(grid.times).toEqual([0, 2]);
    expect(grid.indices).toEqual([0, 1]);
    expect(grid.values).toEqual([[0, 1], [0.5, 0.5]]);
  });

  it("reports missing labels", () => {
    expect(() => toGrid(parseTimeseries(GOOD), "meson_a", "g.csv"))
      .toThrowError(/meson_a/);
  });
});
