/**
 * Batch renderer: scan a directory of simulation reports and write the
 * standard figure set as PNGs next to the CSVs they come from.
 *
 * Usage: node dist/main.js <reports-directory>
 *
 * Recognized files (anywhere under the directory):
 *   report.csv with a `lambda` column  -> <dir>/coming_down.png
 *   regularity.csv                     -> <dir>/regularity.png
 *   traces.csv (+ report.csv summary)  -> <dir>/invariant_traces.png
 *   inequalities.csv                   -> <dir>/inequality_fits.png
 *
 * Exit codes: 0 all figures written, 1 nothing to render, 2 bad input.
 */

import { existsSync, readdirSync, statSync, writeFileSync } from "node:fs";
import { join } from "node:path";

import { CsvFormatError, readCsv } from "./csv.js";
import { FigureDataError, FigureSpec, renderFigure } from "./figures.js";

function* walk(dir: string): Generator<string> {
  for (const name of readdirSync(dir).sort()) {
    const path = join(dir, name);
    if (statSync(path).isDirectory()) {
      yield* walk(path);
    } else {
      yield path;
    }
  }
}

export function plan(root: string): FigureSpec[] {
  const specs: FigureSpec[] = [];
  for (const path of walk(root)) {
    if (!path.endsWith(".csv")) continue;
    const dir = path.slice(0, path.lastIndexOf("/"));
    const base = path.slice(path.lastIndexOf("/") + 1);
    try {
      const table = readCsv(path);
      if (base === "report.csv" && table.columns.includes("lambda")) {
        specs.push({ kind: "coming_down", input: path, output: join(dir, "coming_down.png") });
      } else if (base === "regularity.csv") {
        specs.push({ kind: "regularity", input: path, output: join(dir, "regularity.png") });
      } else if (base === "traces.csv") {
        const summary = join(dir, "report.csv");
        specs.push({
          kind: "invariant_traces",
          input: path,
          summary: existsSync(summary) ? summary : undefined,
          output: join(dir, "invariant_traces.png"),
        });
      } else if (base === "inequalities.csv") {
        specs.push({ kind: "inequality_fits", input: path, output: join(dir, "inequality_fits.png") });
      }
    } catch (err) {
      if (err instanceof CsvFormatError) {
        throw new CsvFormatError(`${path}: ${err.message}`);
      }
      throw err;
    }
  }
  return specs;
}

export function main(argv: string[]): number {
  const root = argv[0];
  if (!root) {
    console.error("usage: node dist/main.js <reports-directory>");
    return 2;
  }
  if (!existsSync(root) || !statSync(root).isDirectory()) {
    console.error(`not a directory: ${root}`);
    return 2;
  }
  let specs: FigureSpec[];
  try {
    specs = plan(root);
  } catch (err) {
    console.error(String(err));
    return 2;
  }
  if (specs.length === 0) {
    console.error(`no renderable reports under ${root}`);
    return 1;
  }
  for (const spec of specs) {
    try {
      const png = renderFigure(spec);
      writeFileSync(spec.output, png);
      console.log(`wrote ${spec.output}`);
    } catch (err) {
      if (err instanceof FigureDataError || err instanceof CsvFormatError) {
        console.error(`skipping nothing -- failing closed on ${spec.input}: ${String(err)}`);
        return 2;
      }
      throw err;
    }
  }
  return 0;
}

if (process.argv[1] && process.argv[1].endsWith("main.js")) {
  process.exit(main(process.argv.slice(2)));
}
