/**
 * Figure renderers over the simulator's documented CSV schemas.
 *
 * Kinds:
 *  - growth:         columns vs time, log-log by default, optional fitted
 *    slope annotation and t / t^2 reference guides
 *  - heatmap:        a value column pivoted over two coordinate columns
 *  - weight-profile: weight columns vs t from weights_audit.csv, filtered
 *    to one (k, eta)
 *  - gain-ladder:    per-k echo gains with the predicted ladder overlaid
 */

import { Table, column, parseCsv, requireColumns } from "./csv.js";
import { fitPowerLaw } from "./fit.js";
import { Axis, HEIGHT, MARGIN, PALETTE, Svg, WIDTH, dataRange, fmt, Scale } from "./svg.js";

export interface FigureSpec {
  kind: "growth" | "heatmap" | "weight-profile" | "gain-ladder";
  input: string;
  output: string;
  title?: string;
  x?: string;
  y?: string | string[];
  value?: string;
  x_scale?: Scale;
  y_scale?: Scale;
  fit_window?: [number, number];
  annotate_fit?: boolean;
  reference_slopes?: number[];
  filter?: Record<string, number>;
}

export interface RenderResult {
  svg: string;
  annotations: Record<string, number>;
}

export function renderFigure(spec: FigureSpec, csvText: string): RenderResult {
  const table = parseCsv(csvText, spec.input);
  switch (spec.kind) {
    case "growth":
      return renderGrowth(spec, table);
    case "heatmap":
      return renderHeatmap(spec, table);
    case "weight-profile":
      return renderProfile(spec, table);
    case "gain-ladder":
      return renderLadder(spec, table);
    default:
      throw new Error(`unknown figure kind '${(spec as FigureSpec).kind}'`);
  }
}

function plotArea(): { x0: number; x1: number; y0: number; y1: number } {
  return {
    x0: MARGIN.left,
    x1: WIDTH - MARGIN.right,
    y0: HEIGHT - MARGIN.bottom,
    y1: MARGIN.top,
  };
}

function applyFilter(table: Table, spec: FigureSpec): Table {
  if (!spec.filter) return table;
  requireColumns(table, Object.keys(spec.filter), spec.input);
  const rows = table.rows.filter((r) =>
    Object.entries(spec.filter!).every(([k, v]) => Math.abs(r[k] - v) < 1e-9),
  );
  if (rows.length === 0) {
    throw new Error(`${spec.input}: filter matches no rows`);
  }
  return { columns: table.columns, rows };
}

function renderGrowth(spec: FigureSpec, table: Table): RenderResult {
  const xcol = spec.x ?? "t";
  const ycols = typeof spec.y === "string" ? [spec.y] : spec.y ?? ["norm_j"];
  requireColumns(table, [xcol, ...ycols], spec.input);
  const filtered = applyFilter(table, spec);
  const xs = column(filtered, xcol);
  const xScale = spec.x_scale ?? "log";
  const yScale = spec.y_scale ?? "log";
  const area = plotArea();
  const allY = ycols.flatMap((c) => column(filtered, c));
  const xa = new Axis(...dataRange(xs, xScale), xScale, area.x0, area.x1);
  const ya = new Axis(...dataRange(allY, yScale), yScale, area.y0, area.y1);
  const svg = new Svg();
  svg.axes(xa, ya, xcol, ycols.join(", "), spec.title ?? `growth: ${ycols.join(", ")}`);
  const annotations: Record<string, number> = {};
  const legend: [string, string][] = [];
  ycols.forEach((col, i) => {
    const ys = column(filtered, col);
    const pts: [number, number][] = [];
    for (let j = 0; j < xs.length; j++) {
      if (xScale === "log" && xs[j] <= 0) continue;
      if (yScale === "log" && ys[j] <= 0) continue;
      pts.push([xa.pos(xs[j]), ya.pos(ys[j])]);
    }
    const color = PALETTE[i % PALETTE.length];
    svg.polyline(pts, color);
    legend.push([col, color]);
    if (spec.annotate_fit ?? true) {
      const fit = fitPowerLaw(xs, ys, spec.fit_window);
      annotations[`${col}_exponent`] = fit.exponent;
      annotations[`${col}_r2`] = fit.rSquared;
      legend[legend.length - 1][0] = `${col}  (slope ${fit.exponent.toFixed(2)})`;
    }
  });
  // reference guides t^p anchored at the first plottable sample and
  // clipped where they exit the plotted y-range
  if (xScale === "log" && yScale === "log") {
    const slopes = spec.reference_slopes ?? [1, 2];
    const first = xs.findIndex((x, j) => x > 0 && column(filtered, ycols[0])[j] > 0);
    if (first >= 0) {
      const x0 = xs[first];
      const y0 = column(filtered, ycols[0])[first];
      for (const p of slopes) {
        if (p === 0) continue;
        const xExit = x0 * (ya.hi / y0) ** (1 / p);
        const xEnd = Math.min(xa.hi, xExit);
        if (xEnd <= x0) continue;
        const yEnd = y0 * (xEnd / x0) ** p;
        const pts: [number, number][] = [
          [xa.pos(x0), ya.pos(y0)],
          [xa.pos(xEnd), ya.pos(yEnd)],
        ];
        svg.polyline(pts, "#999999", 1);
        svg.text(pts[1][0] - 24, pts[1][1] - 4, `t^${p}`, `fill="#666666"`);
      }
    }
  }
  svg.legend(legend);
  return { svg: svg.render(), annotations };
}

function renderProfile(spec: FigureSpec, table: Table): RenderResult {
  const xcol = spec.x ?? "t";
  const ycols = typeof spec.y === "string" ? [spec.y]
    : spec.y ?? ["log_q", "dq_ratio"];
  requireColumns(table, [xcol, ...ycols], spec.input);
  const filtered = applyFilter(table, spec);
  const xs = column(filtered, xcol);
  const area = plotArea();
  const allY = ycols.flatMap((c) => column(filtered, c));
  const xa = new Axis(...dataRange(xs, "linear"), "linear", area.x0, area.x1);
  const ya = new Axis(...dataRange(allY, "linear"), "linear", area.y0, area.y1);
  const svg = new Svg();
  const tag = spec.filter
    ? Object.entries(spec.filter).map(([k, v]) => `${k}=${fmt(v)}`).join(", ")
    : "";
  svg.axes(xa, ya, xcol, ycols.join(", "),
           spec.title ?? `weights ${tag}`.trim());
  const legend: [string, string][] = [];
  ycols.forEach((col, i) => {
    const ys = column(filtered, col);
    const color = PALETTE[i % PALETTE.length];
    svg.polyline(xs.map((x, j) => [xa.pos(x), ya.pos(ys[j])]), color);
    legend.push([col, color]);
  });
  svg.legend(legend);
  return { svg: svg.render(), annotations: {} };
}

function renderHeatmap(spec: FigureSpec, table: Table): RenderResult {
  const xcol = spec.x ?? "t";
  const ycol = typeof spec.y === "string" ? spec.y : "k";
  const vcol = spec.value ?? "dq_ratio";
  requireColumns(table, [xcol, ycol, vcol], spec.input);
  const filtered = applyFilter(table, spec);
  const xs = uniqueSorted(column(filtered, xcol));
  const ys = uniqueSorted(column(filtered, ycol));
  const grid = new Map<string, number>();
  let vmin = Infinity;
  let vmax = -Infinity;
  for (const row of filtered.rows) {
    const v = row[vcol];
    grid.set(`${row[xcol]}|${row[ycol]}`, v);
    vmin = Math.min(vmin, v);
    vmax = Math.max(vmax, v);
  }
  if (!(vmax > vmin)) vmax = vmin + 1;
  const area = plotArea();
  const svg = new Svg();
  const cw = (area.x1 - area.x0) / xs.length;
  const ch = (area.y1 - area.y0) / ys.length; // negative (y grows upward)
  for (let i = 0; i < xs.length; i++) {
    for (let j = 0; j < ys.length; j++) {
      const v = grid.get(`${xs[i]}|${ys[j]}`);
      if (v === undefined) continue;
      const f = (v - vmin) / (vmax - vmin);
      svg.rect(area.x0 + i * cw, area.y0 + (j + 1) * ch, cw + 0.5, -ch + 0.5,
               viridis(f));
    }
  }
  const xa = new Axis(xs[0], xs[xs.length - 1], "linear", area.x0, area.x1);
  const ya = new Axis(ys[0], ys[ys.length - 1], "linear", area.y0, area.y1);
  svg.axes(xa, ya, xcol, ycol,
           spec.title ?? `${vcol} over (${xcol}, ${ycol})`);
  svg.text(WIDTH - MARGIN.right - 150, MARGIN.top + 10,
           `${vcol}: ${fmt(vmin)} .. ${fmt(vmax)}`);
  return { svg: svg.render(), annotations: { vmin, vmax } };
}

function renderLadder(spec: FigureSpec, table: Table): RenderResult {
  requireColumns(table, ["eta", "k", "gain_down", "predicted"], spec.input);
  const filtered = applyFilter(table, spec);
  const etas = uniqueSorted(column(filtered, "eta"));
  const area = plotArea();
  const ks = column(filtered, "k");
  const gains = column(filtered, "gain_down").concat(column(filtered, "predicted"));
  const xa = new Axis(...dataRange(ks, "linear"), "linear", area.x0, area.x1);
  const ya = new Axis(...dataRange(gains.filter((g) => g > 0), "log"), "log",
                      area.y0, area.y1);
  const svg = new Svg();
  svg.axes(xa, ya, "k", "gain per link",
           spec.title ?? "echo gain ladder vs eta^(1/2)/k^(3/2)");
  const legend: [string, string][] = [];
  etas.forEach((eta, i) => {
    const rows = filtered.rows
      .filter((r) => r.eta === eta)
      .sort((a, b) => a.k - b.k);
    const color = PALETTE[i % PALETTE.length];
    svg.polyline(rows.map((r) => [xa.pos(r.k), ya.pos(r.gain_down)]), color);
    svg.polyline(rows.map((r) => [xa.pos(r.k), ya.pos(r.predicted)]),
                 color, 0.8);
    legend.push([`eta = ${fmt(eta)}`, color]);
  });
  svg.legend(legend);
  return { svg: svg.render(), annotations: {} };
}

function uniqueSorted(values: number[]): number[] {
  return [...new Set(values)].sort((a, b) => a - b);
}

function viridis(f: number): string {
  // five-stop approximation, linear in between
  const stops: [number, number, number][] = [
    [68, 1, 84], [59, 82, 139], [33, 145, 140], [94, 201, 98], [253, 231, 37],
  ];
  const x = Math.min(Math.max(f, 0), 1) * (stops.length - 1);
  const i = Math.min(Math.floor(x), stops.length - 2);
  const u = x - i;
  const c = stops[i].map((a, j) => Math.round(a + u * (stops[i + 1][j] - a)));
  return `rgb(${c[0]},${c[1]},${c[2]})`;
}
