export { Row, SchemaError, parseTimeseries, readTimeseries, toGrid, labelsOf } from "./csv.js";
export { makeScale, clamp, ColorScale } from "./color.js";
export { SvgBuilder, linScale, ticks } from "./svg.js";
export { PanelSpec, HeatmapPanel, TracesPanel, renderHeatmap, renderTraces } from "./panels.js";
export { FigureSpec, render, renderToString, validateSpec } from "./render.js";
