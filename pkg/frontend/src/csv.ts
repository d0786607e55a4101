/**
 * Reader for the versioned CSV files written by the simulation package.
 *
 * Files must start with the header line `# phi4 csv v1 <columns>`, may carry
 * `# meta key=value` lines, and then hold comma-separated rows. Anything else
 * is rejected: the renderer fails closed on schema drift.
 */

import { readFileSync } from "node:fs";

export const CSV_VERSION = "phi4 csv v1";

export interface CsvTable {
  columns: string[];
  meta: Record<string, string>;
  /** raw cells; use `numeric` for parsed columns */
  rows: string[][];
}

export class CsvFormatError extends Error {}

export function parseCsv(text: string, path = "<memory>"): CsvTable {
  const lines = text.split(/\r?\n/).filter((l) => l.length > 0);
  if (lines.length === 0) {
    throw new CsvFormatError(`${path}: empty file`);
  }
  const head = lines[0];
  const prefix = `# ${CSV_VERSION} `;
  if (!head.startsWith(prefix)) {
    throw new CsvFormatError(`${path}: missing version header "${CSV_VERSION}"`);
  }
  const columns = head.slice(prefix.length).split(",").map((c) => c.trim());
  if (columns.length === 0 || columns.some((c) => c.length === 0)) {
    throw new CsvFormatError(`${path}: malformed column list`);
  }
  const meta: Record<string, string> = {};
  const rows: string[][] = [];
  for (const line of lines.slice(1)) {
    if (line.startsWith("# meta ")) {
      const body = line.slice("# meta ".length);
      const eq = body.indexOf("=");
      if (eq <= 0) {
        throw new CsvFormatError(`${path}: malformed meta line: ${line}`);
      }
      meta[body.slice(0, eq)] = body.slice(eq + 1);
      continue;
    }
    if (line.startsWith("#")) {
      continue; // stray comment
    }
    const cells = line.split(",");
    if (cells.length !== columns.length) {
      throw new CsvFormatError(
        `${path}: row has ${cells.length} cells, expected ${columns.length}: ${line}`,
      );
    }
    rows.push(cells);
  }
  return { columns, meta, rows };
}

export function readCsv(path: string): CsvTable {
  return parseCsv(readFileSync(path, "utf-8"), path);
}

export function columnIndex(table: CsvTable, name: string): number {
  const i = table.columns.indexOf(name);
  if (i < 0) {
    throw new CsvFormatError(`missing required column "${name}" (have: ${table.columns.join(",")})`);
  }
  return i;
}

/** Parse one column as numbers; non-numeric cells become NaN. */
export function numeric(table: CsvTable, name: string): number[] {
  const i = columnIndex(table, name);
  return table.rows.map((r) => Number(r[i]));
}

export function metaNumber(table: CsvTable, key: string): number | undefined {
  const raw = table.meta[key];
  if (raw === undefined) return undefined;
  const v = Number(raw);
  return Number.isFinite(v) ? v : undefined;
}
