import assert from "node:assert/strict";
import { readFileSync, mkdtempSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { test } from "node:test";

import { parseCsv, requireColumns } from "../src/csv.js";
import { fitPowerLaw } from "../src/fit.js";
import { FigureSpec, renderFigure } from "../src/figures.js";
import { runSpec } from "../src/main.js";

const FIXTURES = join(import.meta.dirname, "..", "..", "fixtures");

function fixture(name: string): string {
  return readFileSync(join(FIXTURES, name), "utf-8");
}

test("csv parser round trip and errors", () => {
  const table = parseCsv("a,b\n1,2\n3,4\n", "test.csv");
  assert.deepEqual(table.columns, ["a", "b"]);
  assert.equal(table.rows[1].b, 4);
  assert.throws(() => parseCsv("a,b\n1\n", "bad.csv"), /row 1 has 1 fields/);
  assert.throws(() => parseCsv("a,b\n1,x\n", "bad.csv"), /column 'b' is not numeric/);
  assert.throws(
    () => requireColumns(table, ["a", "missing"], "test.csv"),
    /missing required column 'missing'/,
  );
});

test("power-law fit recovers an exact slope", () => {
  const t = [1, 2, 4, 8, 16];
  const v = t.map((x) => 3 * x * x);
  const fit = fitPowerLaw(t, v);
  assert.ok(Math.abs(fit.exponent - 2) < 1e-12);
  assert.ok(Math.abs(fit.prefactor - 3) < 1e-9);
  assert.ok(fit.rSquared > 0.999999);
});

test("synthetic t^2 fixture is annotated with slope 2.00", () => {
  const spec: FigureSpec = {
    kind: "growth",
    input: "synthetic_t2.csv",
    output: "unused.svg",
    y: ["value"],
    annotate_fit: true,
  };
  const { svg, annotations } = renderFigure(spec, fixture("synthetic_t2.csv"));
  assert.ok(Math.abs(annotations.value_exponent - 2.0) <= 0.01);
  assert.match(svg, /slope 2\.00/);
});

test("growth figure renders the inflation diagnostics fixture", () => {
  const spec: FigureSpec = {
    kind: "growth",
    input: "inflation_diagnostics.csv",
    output: "unused.svg",
    y: ["norm_j", "norm_b"],
    fit_window: [5, 25],
    reference_slopes: [1, 2],
  };
  const { svg, annotations } = renderFigure(
    spec,
    fixture("inflation_diagnostics.csv"),
  );
  assert.match(svg, /<svg /);
  assert.match(svg, /t\^2/); // the reference guide is drawn
  assert.ok(annotations.norm_j_exponent > 1.5);
});

test("weight profile and heatmap render the audit fixture", () => {
  const profile: FigureSpec = {
    kind: "weight-profile",
    input: "weights_audit.csv",
    output: "unused.svg",
    y: ["log_q", "dq_ratio"],
    filter: { k: 1, eta: 50 },
  };
  const out = renderFigure(profile, fixture("weights_audit.csv"));
  assert.match(out.svg, /log_q/);
  const heat: FigureSpec = {
    kind: "heatmap",
    input: "weights_audit.csv",
    output: "unused.svg",
    x: "t",
    y: "k",
    value: "dq_ratio",
  };
  const hm = renderFigure(heat, fixture("weights_audit.csv"));
  assert.match(hm.svg, /rgb\(/);
  assert.ok(hm.annotations.vmax > hm.annotations.vmin);
});

test("heatmap dq_ratio peaks sit at the critical times t = eta/k", () => {
  // read the audit fixture and locate, for each k, the t of max dq_ratio
  const table = parseCsv(fixture("weights_audit.csv"), "weights_audit.csv");
  const eta = 50;
  for (const k of [1, 2, 3]) {
    const rows = table.rows.filter((r) => r.k === k && r.eta === eta);
    assert.ok(rows.length > 0);
    let best = rows[0];
    for (const r of rows) if (r.dq_ratio > best.dq_ratio) best = r;
    // dq_ratio concentrates like 1/(1 + |t - eta/k|): the sampled peak
    // lies within the resonant interval around eta/k
    const half = eta / (2 * k ** 3);
    assert.ok(
      Math.abs(best.t - eta / k) <= half + 1.0,
      `k=${k}: peak at ${best.t}, critical time ${eta / k}`,
    );
  }
});

test("gain ladder renders the echo fixture", () => {
  const spec: FigureSpec = {
    kind: "gain-ladder",
    input: "echo.csv",
    output: "unused.svg",
  };
  const { svg } = renderFigure(spec, fixture("echo.csv"));
  assert.match(svg, /gain per link/);
});

test("rendering is deterministic", () => {
  const spec: FigureSpec = {
    kind: "growth",
    input: "synthetic_t2.csv",
    output: "unused.svg",
    y: ["value"],
  };
  const a = renderFigure(spec, fixture("synthetic_t2.csv")).svg;
  const b = renderFigure(spec, fixture("synthetic_t2.csv")).svg;
  assert.equal(a, b);
});

test("missing column is reported by name", () => {
  const spec: FigureSpec = {
    kind: "growth",
    input: "synthetic_t2.csv",
    output: "unused.svg",
    y: ["nonexistent"],
  };
  assert.throws(
    () => renderFigure(spec, fixture("synthetic_t2.csv")),
    /missing required column 'nonexistent'/,
  );
});

test("runSpec end to end writes the SVG next to the spec", () => {
  const dir = mkdtempSync(join(tmpdir(), "plots-"));
  writeFileSync(join(dir, "data.csv"), fixture("synthetic_t2.csv"));
  const spec = {
    kind: "growth",
    input: "data.csv",
    output: "figure.svg",
    y: ["value"],
    annotate_fit: true,
  };
  writeFileSync(join(dir, "spec.json"), JSON.stringify(spec));
  const annotations = runSpec(join(dir, "spec.json"));
  assert.ok(Math.abs(annotations.value_exponent - 2.0) <= 0.01);
  const svg = readFileSync(join(dir, "figure.svg"), "utf-8");
  assert.match(svg, /<svg /);
});
