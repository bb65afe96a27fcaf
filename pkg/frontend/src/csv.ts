/** Strict CSV handling for pqcbench exports (plain comma-separated, no quoting). */

export interface Table {
  columns: string[];
  rows: Record<string, string>[];
}

export class DataError extends Error {}

export function parseCsv(text: string): Table {
  const lines = text.split(/\r?\n/).filter((line) => line.trim().length > 0);
  if (lines.length === 0) {
    throw new DataError("empty input: no header row");
  }
  const columns = lines[0].split(",").map((c) => c.trim());
  const rows = lines.slice(1).map((line, i) => {
    const cells = line.split(",");
    if (cells.length !== columns.length) {
      throw new DataError(
        `row ${i + 2}: expected ${columns.length} cells, got ${cells.length}`,
      );
    }
    const row: Record<string, string> = {};
    columns.forEach((col, j) => (row[col] = cells[j].trim()));
    return row;
  });
  return { columns, rows };
}

export function requireColumns(table: Table, needed: string[], kind: string): void {
  const missing = needed.filter((c) => !table.columns.includes(c));
  if (missing.length > 0) {
    throw new DataError(`${kind}: input is missing column(s): ${missing.join(", ")}`);
  }
  if (table.rows.length === 0) {
    throw new DataError(`${kind}: input has no data rows`);
  }
}

export function num(row: Record<string, string>, col: string): number {
  const value = Number(row[col]);
  if (!Number.isFinite(value)) {
    throw new DataError(`column ${col}: non-numeric value ${JSON.stringify(row[col])}`);
  }
  return value;
}

/** Group rows by a key, preserving first-seen order. */
export function groupBy<T>(
  items: T[],
  key: (item: T) => string,
): Map<string, T[]> {
  const out = new Map<string, T[]>();
  for (const item of items) {
    const k = key(item);
    const bucket = out.get(k);
    if (bucket) bucket.push(item);
    else out.set(k, [item]);
  }
  return out;
}

export function mean(xs: number[]): number {
  return xs.reduce((a, b) => a + b, 0) / xs.length;
}

export function sampleStd(xs: number[]): number {
  if (xs.length < 2) return 0;
  const m = mean(xs);
  return Math.sqrt(xs.reduce((a, x) => a + (x - m) ** 2, 0) / (xs.length - 1));
}
