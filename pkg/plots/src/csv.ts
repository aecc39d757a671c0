/**
 * Minimal CSV reader for the simulator's numeric outputs.
 *
 * All files are plain comma-separated numerics with a single header
 * row (see docs/formats.md in the repository root); schema problems
 * are reported by column name.
 */

export interface Table {
  columns: string[];
  rows: Record<string, number>[];
}

export function parseCsv(text: string, path = "<string>"): Table {
  const lines = text.split(/\r?\n/).filter((line) => line.trim() !== "");
  if (lines.length < 2) {
    throw new Error(`${path}: expected a header row and at least one data row`);
  }
  const columns = lines[0].split(",").map((c) => c.trim());
  const rows: Record<string, number>[] = [];
  for (let i = 1; i < lines.length; i++) {
    const parts = lines[i].split(",");
    if (parts.length !== columns.length) {
      throw new Error(
        `${path}: row ${i} has ${parts.length} fields, header has ${columns.length}`,
      );
    }
    const row: Record<string, number> = {};
    for (let j = 0; j < columns.length; j++) {
      const v = Number(parts[j]);
      if (Number.isNaN(v)) {
        throw new Error(`${path}: row ${i}, column '${columns[j]}' is not numeric`);
      }
      row[columns[j]] = v;
    }
    rows.push(row);
  }
  return { columns, rows };
}

export function requireColumns(table: Table, wanted: string[], path: string): void {
  for (const name of wanted) {
    if (!table.columns.includes(name)) {
      throw new Error(`${path}: missing required column '${name}'`);
    }
  }
}

export function column(table: Table, name: string): number[] {
  return table.rows.map((r) => r[name]);
}
