/**
 * plot --spec PATH
 *
 * Reads a FigureSpec JSON (kind, input CSV, output SVG path, axis and
 * annotation options; see README), renders deterministically, writes
 * the SVG, and prints the annotation map to stdout.
 */

import { readFileSync, writeFileSync } from "fs";
import { dirname, resolve } from "path";
import { FigureSpec, renderFigure } from "./figures.js";

export function runSpec(specPath: string): Record<string, number> {
  const spec = JSON.parse(readFileSync(specPath, "utf-8")) as FigureSpec;
  for (const field of ["kind", "input", "output"] as const) {
    if (!spec[field]) {
      throw new Error(`${specPath}: spec is missing '${field}'`);
    }
  }
  const base = dirname(resolve(specPath));
  const inputPath = resolve(base, spec.input);
  const outputPath = resolve(base, spec.output);
  const csvText = readFileSync(inputPath, "utf-8");
  const { svg, annotations } = renderFigure({ ...spec, input: inputPath }, csvText);
  writeFileSync(outputPath, svg);
  return annotations;
}

function main(argv: string[]): number {
  const idx = argv.indexOf("--spec");
  if (idx < 0 || idx + 1 >= argv.length) {
    console.error("usage: plot --spec figure.json");
    return 2;
  }
  try {
    const annotations = runSpec(argv[idx + 1]);
    console.log(JSON.stringify(annotations));
    return 0;
  } catch (err) {
    console.error(String(err instanceof Error ? err.message : err));
    return 1;
  }
}

if (process.argv[1] && process.argv[1].endsWith("main.js")) {
  process.exit(main(process.argv.slice(2)));
}
