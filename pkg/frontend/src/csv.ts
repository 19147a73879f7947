/** Parsing for the experiment runner's result files (plain CSV, no quoting). */

export interface Table {
  header: string[];
  rows: string[][];
}

export function parseCsv(text: string): Table {
  const lines = text.split("\n").filter((line) => line.length > 0);
  if (lines.length === 0) {
    throw new Error("empty CSV input");
  }
  const header = lines[0].split(",");
  const rows = lines.slice(1).map((line) => line.split(","));
  for (const row of rows) {
    if (row.length !== header.length) {
      throw new Error(
        `malformed CSV row: expected ${header.length} cells, got ${row.length}`,
      );
    }
  }
  return { header, rows };
}

/** Parse a headerless numeric grid (solution heatmap files). */
export function parseGrid(text: string): number[][] {
  const lines = text.split("\n").filter((line) => line.length > 0);
  if (lines.length === 0) {
    throw new Error("empty grid input");
  }
  return lines.map((line) => line.split(",").map(toNumber));
}

export function requireColumns(table: Table, names: string[]): Map<string, number> {
  const index = new Map<string, number>();
  for (const name of names) {
    const at = table.header.indexOf(name);
    if (at < 0) {
      throw new Error(`missing column: ${name}`);
    }
    index.set(name, at);
  }
  return index;
}

export function toNumber(cell: string): number {
  const value = Number(cell);
  if (!Number.isFinite(value)) {
    throw new Error(`not a finite number: ${cell}`);
  }
  return value;
}

export function column(table: Table, name: string): number[] {
  const at = requireColumns(table, [name]).get(name)!;
  return table.rows.map((row) => toNumber(row[at]));
}
