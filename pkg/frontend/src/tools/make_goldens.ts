/**
 * Regenerate the golden PNGs from the committed fixture CSVs.
 * Run after an intentional rendering change:  npm run build && npm run goldens
 */

import { mkdirSync, writeFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

import { renderFigure } from "../figures.js";

const here = dirname(fileURLToPath(import.meta.url));
const testDir = join(here, "..", "..", "test");
const fixtures = join(testDir, "fixtures");
const golden = join(testDir, "golden");
mkdirSync(golden, { recursive: true });

const jobs = [
  { kind: "coming_down" as const, input: join(fixtures, "coming_down_report.csv"), output: join(golden, "coming_down.png") },
  { kind: "regularity" as const, input: join(fixtures, "regularity.csv"), output: join(golden, "regularity.png") },
  {
    kind: "invariant_traces" as const,
    input: join(fixtures, "traces.csv"),
    summary: join(fixtures, "invariant_report.csv"),
    output: join(golden, "invariant_traces.png"),
  },
  { kind: "inequality_fits" as const, input: join(fixtures, "inequalities.csv"), output: join(golden, "inequality_fits.png") },
];

for (const job of jobs) {
  writeFileSync(job.output, renderFigure(job));
  console.log(`wrote ${job.output}`);
}
