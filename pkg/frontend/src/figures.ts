/**
 * The standard figure set over the simulation package's CSV reports.
 *
 * - coming_down: log-log decay curves of the low-regularity norm per initial
 *   amplitude, with the reference power law from the CSV metadata.
 * - regularity: bar chart of measured diagram norms, labeled with their
 *   nominal regularity exponents.
 * - invariant_traces: observable traces of the two runs with batch-mean
 *   error bands from the summary table.
 * - inequality_fits: fitted exponents and worst constants per inequality.
 *
 * Rendering is deterministic: same inputs give byte-identical images.
 */

import { CsvFormatError, CsvTable, columnIndex, metaNumber, numeric, readCsv } from "./csv.js";
import {
  BLACK,
  GRAY,
  Raster,
  Scale,
  SERIES_COLORS,
  drawFrame,
  formatTick,
  textWidth,
} from "./raster.js";
import { encodePng } from "./png.js";

export type FigureKind = "coming_down" | "regularity" | "invariant_traces" | "inequality_fits";

export interface FigureSpec {
  kind: FigureKind;
  /** main CSV input */
  input: string;
  /** summary table for error bands (invariant_traces only) */
  summary?: string;
  output: string;
  width?: number;
  height?: number;
}

export class FigureDataError extends Error {}

const W = 640;
const H = 440;
const MARGIN = { left: 64, right: 16, top: 32, bottom: 36 };

function frameScales(
  img: Raster,
  xLo: number,
  xHi: number,
  yLo: number,
  yHi: number,
  logX = false,
  logY = false,
): { xs: Scale; ys: Scale } {
  const xs = logX
    ? Scale.logarithmic(xLo, xHi, MARGIN.left, img.width - MARGIN.right)
    : Scale.linear(xLo, xHi, MARGIN.left, img.width - MARGIN.right);
  const ys = logY
    ? Scale.logarithmic(yLo, yHi, img.height - MARGIN.bottom, MARGIN.top)
    : Scale.linear(yLo, yHi, img.height - MARGIN.bottom, MARGIN.top);
  return { xs, ys };
}

function finitePositive(values: number[], what: string): number[] {
  const out = values.filter((v) => Number.isFinite(v) && v > 0);
  if (out.length === 0) throw new FigureDataError(`no positive finite ${what}`);
  return out;
}

/** coming_down report: rows (lambda, t, median_sqrt_t_xnorm, count). */
export function renderComingDown(table: CsvTable, width = W, height = H): Raster {
  const li = columnIndex(table, "lambda");
  const ti = columnIndex(table, "t");
  const si = columnIndex(table, "median_sqrt_t_xnorm");
  const series = new Map<string, { t: number; y: number }[]>();
  for (const row of table.rows) {
    const lam = row[li];
    if (lam.startsWith("ratio")) continue;
    const t = Number(row[ti]);
    const stat = Number(row[si]);
    if (!Number.isFinite(t) || !Number.isFinite(stat) || t <= 0 || stat <= 0) continue;
    const y = stat / Math.sqrt(t); // back to the plain norm for the decay plot
    if (!series.has(lam)) series.set(lam, []);
    series.get(lam)!.push({ t, y });
  }
  if (series.size === 0) throw new FigureDataError("coming_down table has no usable rows");
  const allT = [...series.values()].flat().map((p) => p.t);
  const allY = [...series.values()].flat().map((p) => p.y);
  const img = new Raster(width, height);
  const tLo = Math.min(...allT);
  const tHi = Math.max(...allT);
  const yLo = Math.min(...allY);
  const yHi = Math.max(...allY);
  const { xs, ys } = frameScales(img, tLo / 1.3, tHi * 1.3, yLo / 1.6, yHi * 2.0, true, true);
  drawFrame(img, "coming down from infinity", "t", "norm", xs, ys);

  const refExp = metaNumber(table, "reference_exponent") ?? -0.5;
  // reference power law anchored at the median of the cloud
  const anchorY = allY.sort((a, b) => a - b)[Math.floor(allY.length / 2)];
  const anchorT = tHi;
  const refAt = (t: number) => anchorY * (t / anchorT) ** refExp;
  img.line(
    xs.map(tLo),
    ys.map(refAt(tLo)),
    xs.map(tHi),
    ys.map(refAt(tHi)),
    GRAY,
    1,
  );
  img.text(xs.map(tLo) + 4, ys.map(refAt(tLo)) + 4, `slope ${formatTick(refExp)}`, GRAY);

  let s = 0;
  const keys = [...series.keys()].sort((a, b) => Number(a) - Number(b));
  for (const lam of keys) {
    const pts = series.get(lam)!.sort((a, b) => a.t - b.t);
    const color = SERIES_COLORS[s % SERIES_COLORS.length];
    for (let i = 1; i < pts.length; i++) {
      img.line(xs.map(pts[i - 1].t), ys.map(pts[i - 1].y), xs.map(pts[i].t), ys.map(pts[i].y), color, 2);
    }
    for (const p of pts) img.disc(xs.map(p.t), ys.map(p.y), 3, color);
    img.text(width - MARGIN.right - 120, MARGIN.top + 4 + 10 * s, `amplitude ${lam}`, color);
    s += 1;
  }
  return img;
}

/** regularity report: rows (diagram, alpha_tau, measured_norm). */
export function renderRegularity(table: CsvTable, width = W, height = H): Raster {
  const di = columnIndex(table, "diagram");
  const ai = columnIndex(table, "alpha_tau");
  const mi = columnIndex(table, "measured_norm");
  if (table.rows.length === 0) throw new FigureDataError("empty regularity table");
  const norms = table.rows.map((r) => Number(r[mi]));
  if (norms.some((v) => !Number.isFinite(v))) throw new FigureDataError("non-finite norm");
  const img = new Raster(width, height);
  const yHi = Math.max(...norms, 1e-12) * 1.2;
  const { xs, ys } = frameScales(img, 0, table.rows.length, 0, yHi);
  drawFrame(img, "diagram sizes vs nominal exponents", "", "sup norm", xs, ys);
  const bw = (xs.map(1) - xs.map(0)) * 0.6;
  table.rows.forEach((row, i) => {
    const x0 = xs.map(i + 0.2);
    const yTop = ys.map(Number(row[mi]));
    const base = ys.map(0);
    img.fillRect(x0, yTop, bw, base - yTop, SERIES_COLORS[i % SERIES_COLORS.length]);
    img.text(x0 + bw / 2 - textWidth(row[di]) / 2, base + 7, row[di], BLACK);
    const alpha = `a=${row[ai]}`;
    img.text(x0 + bw / 2 - textWidth(alpha) / 2, yTop - 10, alpha, GRAY);
  });
  return img;
}

/** invariant-measure traces (t, run, wick_x2, wick_x4) + summary bands. */
export function renderInvariantTraces(
  traces: CsvTable,
  summary: CsvTable | undefined,
  width = W,
  height = H,
): Raster {
  const ti = columnIndex(traces, "t");
  const ri = columnIndex(traces, "run");
  const oi = columnIndex(traces, "wick_x2");
  const runs = new Map<string, { t: number; y: number }[]>();
  for (const row of traces.rows) {
    const t = Number(row[ti]);
    const y = Number(row[oi]);
    if (!Number.isFinite(t) || !Number.isFinite(y)) continue;
    const key = row[ri];
    if (!runs.has(key)) runs.set(key, []);
    runs.get(key)!.push({ t, y });
  }
  if (runs.size === 0) throw new FigureDataError("no usable trace rows");
  const pts = [...runs.values()].flat();
  const img = new Raster(width, height);
  const tLo = Math.min(...pts.map((p) => p.t));
  const tHi = Math.max(...pts.map((p) => p.t));
  let yLo = Math.min(...pts.map((p) => p.y));
  let yHi = Math.max(...pts.map((p) => p.y));
  const pad = 0.1 * (yHi - yLo || 1);
  yLo -= pad;
  yHi += pad;
  const { xs, ys } = frameScales(img, tLo, tHi, yLo, yHi);
  drawFrame(img, "wick square averages", "t", "obs", xs, ys);

  if (summary) {
    const names = summary.rows.map((r) => r[columnIndex(summary, "observable")]);
    const idx = names.indexOf("wick_x2");
    if (idx >= 0) {
      const row = summary.rows[idx];
      const m0 = Number(row[columnIndex(summary, "mean_run0")]);
      const s0 = Number(row[columnIndex(summary, "stderr_run0")]);
      const m1 = Number(row[columnIndex(summary, "mean_run1")]);
      const s1 = Number(row[columnIndex(summary, "stderr_run1")]);
      const bands: Array<[number, number, number]> = [
        [m0, s0, 0],
        [m1, s1, 1],
      ];
      for (const [m, se, j] of bands) {
        const yA = ys.map(m - 3 * se);
        const yB = ys.map(m + 3 * se);
        const color = SERIES_COLORS[j % SERIES_COLORS.length];
        const band: readonly [number, number, number, number] = [color[0], color[1], color[2], 60];
        img.fillRect(xs.pixLo, Math.min(yA, yB), xs.pixHi - xs.pixLo, Math.abs(yA - yB), band);
        img.line(xs.pixLo, ys.map(m), xs.pixHi, ys.map(m), color, 1);
      }
    }
  }
  let j = 0;
  for (const key of [...runs.keys()].sort()) {
    const color = SERIES_COLORS[j % SERIES_COLORS.length];
    const seq = runs.get(key)!.sort((a, b) => a.t - b.t);
    for (let i = 1; i < seq.length; i++) {
      img.line(xs.map(seq[i - 1].t), ys.map(seq[i - 1].y), xs.map(seq[i].t), ys.map(seq[i].y), color, 1);
    }
    img.text(width - MARGIN.right - 90, MARGIN.top + 4 + 10 * j, `run ${key}`, color);
    j += 1;
  }
  return img;
}

/** inequality fits: rows (inequality_tag, param, fitted_exponent, worst_constant, n, seed). */
export function renderInequalityFits(table: CsvTable, width = W, height = H): Raster {
  if (table.rows.length === 0) throw new FigureDataError("empty inequality table");
  const tags = table.rows.map((r) => r[columnIndex(table, "inequality_tag")]);
  const exps = numeric(table, "fitted_exponent");
  const consts = numeric(table, "worst_constant");
  finitePositive(consts, "constants");
  const img = new Raster(width, height);
  const n = table.rows.length;
  const yVals = consts.concat(exps.filter((v) => Number.isFinite(v)));
  const yLo = Math.min(...yVals, 0) - 0.2;
  const yHi = Math.max(...yVals) + 0.4;
  const { xs, ys } = frameScales(img, -0.5, n - 0.5, yLo, yHi);
  drawFrame(img, "inequality fits", "case", "value", xs, ys);
  img.line(xs.pixLo, ys.map(0), xs.pixHi, ys.map(0), GRAY);
  for (let i = 0; i < n; i++) {
    const x = xs.map(i);
    img.disc(x, ys.map(consts[i]), 4, SERIES_COLORS[0]);
    if (Number.isFinite(exps[i])) {
      img.disc(x, ys.map(exps[i]), 4, SERIES_COLORS[1]);
    }
    const label = tags[i].slice(0, 9);
    img.text(x - textWidth(label) / 2, ys.pixLo + 7 + 9 * (i % 2), label, BLACK);
  }
  img.text(width - MARGIN.right - 150, MARGIN.top + 4, "worst constant", SERIES_COLORS[0]);
  img.text(width - MARGIN.right - 150, MARGIN.top + 14, "fitted exponent", SERIES_COLORS[1]);
  return img;
}

export function renderFigure(spec: FigureSpec): Uint8Array {
  const table = readCsv(spec.input);
  const width = spec.width ?? W;
  const height = spec.height ?? H;
  let img: Raster;
  switch (spec.kind) {
    case "coming_down":
      img = renderComingDown(table, width, height);
      break;
    case "regularity":
      img = renderRegularity(table, width, height);
      break;
    case "invariant_traces": {
      const summary = spec.summary ? readCsv(spec.summary) : undefined;
      img = renderInvariantTraces(table, summary, width, height);
      break;
    }
    case "inequality_fits":
      img = renderInequalityFits(table, width, height);
      break;
    default:
      throw new FigureDataError(`unknown figure kind ${(spec as { kind: string }).kind}`);
  }
  return encodePng(img.width, img.height, img.data);
}

export { CsvFormatError };
