/**
 * The six figure kinds, each a pure consumer of run-directory files.
 * Fitted exponents are annotated exactly as the JSON reports state them;
 * nothing numerical is recomputed here.
 */
import * as fs from "node:fs";
import * as path from "node:path";

import { RunDir, column, latestRun, listFiles, readCsv, readJson } from "./data.js";
import { Series, barChart, lineChart } from "./svg.js";

export class SkipFigure extends Error {}

export const FIGURE_KINDS = [
  "norms",
  "tails",
  "smoothing",
  "absorbing",
  "attractor",
  "bounds",
] as const;

export type FigureKind = (typeof FIGURE_KINDS)[number];

function need(runs: RunDir[], subcommand: string, kind: string): RunDir {
  const run = latestRun(runs, subcommand);
  if (!run) throw new SkipFigure(`${kind}: no ${subcommand} run found`);
  return run;
}

function needFile(file: string, kind: string): string {
  if (!fs.existsSync(file)) throw new SkipFigure(`${kind}: missing ${path.basename(file)}`);
  return file;
}

function mean(values: number[]): number {
  return values.reduce((a, b) => a + b, 0) / values.length;
}

// ---------------------------------------------------------------------------

function figNorms(runs: RunDir[]): string {
  const run = need(runs, "simulate", "norms");
  const table = readCsv(needFile(path.join(run.dir, "diagnostics.csv"), "norms"));
  const t = column(table, "t");
  const series: Series[] = table.columns
    .filter((c) => c !== "t")
    .map((c) => ({ label: c, x: t, y: column(table, c) }));
  return lineChart(series, {
    title: "Conserved quantities and Sobolev norms along the run",
    xLabel: "t",
    yLabel: "value",
  });
}

function figTails(runs: RunDir[]): string {
  const run = need(runs, "simulate", "tails");
  const table = readCsv(needFile(path.join(run.dir, "trajectory.csv"), "tails"));
  const t = column(table, "t");
  const tLast = t[t.length - 1];
  const k = column(table, "k");
  const reU = column(table, "re_u");
  const imU = column(table, "im_u");
  const xs: number[] = [];
  const ys: number[] = [];
  for (let i = 0; i < t.length; i++) {
    if (t[i] === tLast && k[i] > 0) {
      xs.push(k[i]);
      ys.push(Math.hypot(reU[i], imU[i]));
    }
  }
  const series: Series[] = [{ label: "|u_k| at final time", x: xs, y: ys, markers: true }];
  const annotations: string[] = [];
  const summary = readJson(needFile(path.join(run.dir, "summary.json"), "tails"));
  const fit = summary.tail_fit_u;
  if (fit) {
    // anchor the fitted slope at the start of the fit window
    const k0 = fit.fit_kmin;
    const anchorIdx = xs.findIndex((v) => v >= k0);
    if (anchorIdx >= 0) {
      const a = ys[anchorIdx] * Math.pow(xs[anchorIdx], fit.sigma_hat);
      const lx = xs.filter((v) => v >= k0);
      const ly = lx.map((v) => a * Math.pow(v, -fit.sigma_hat));
      series.push({ label: "fitted decay", x: lx, y: ly, dashed: true, color: "#d62728" });
    }
    annotations.push(`fitted s_hat = ${fit.s_hat}`, `amplitude exponent sigma_hat = ${fit.sigma_hat}`);
  }
  return lineChart(series, {
    title: "Spectral tail with fitted decay",
    xLabel: "k",
    yLabel: "|u_k|",
    xScale: "log",
    yScale: "log",
    annotations,
  });
}

function figSmoothing(runs: RunDir[]): string {
  const run = need(runs, "smoothing", "smoothing");
  const report = readJson(needFile(path.join(run.dir, "report.json"), "smoothing")).main;
  const times: number[] = report.times;
  const perSeed: any[] = report.per_seed;
  const avg = (key: string) => times.map((_, i) => mean(perSeed.map((e) => e[key][i])));
  const series: Series[] = [
    { label: "residue regularity (u)", x: times, y: avg("reg_residue_u"), markers: true },
    { label: "solution regularity (u)", x: times, y: avg("reg_u"), markers: true },
    { label: "residue regularity (n)", x: times, y: avg("reg_residue_n"), markers: true, dashed: true },
    { label: "solution regularity (n)", x: times, y: avg("reg_n"), markers: true, dashed: true },
  ];
  return lineChart(series, {
    title: "Nonlinear smoothing: residue sits above the solution",
    xLabel: "t",
    yLabel: "fitted Sobolev regularity",
    annotations: [
      `measured a0 = ${report.ensemble.measured_a0}`,
      `measured a1 = ${report.ensemble.measured_a1}`,
      `theory ceilings: a0 <= ${report.theory.a0}, a1 <= ${report.theory.a1}`,
    ],
  });
}

function figAbsorbing(runs: RunDir[]): string {
  const run = need(runs, "attractor", "absorbing");
  const files = listFiles(run.dir, /^absorbing-seed.*\.csv$/);
  if (files.length === 0) throw new SkipFigure("absorbing: no absorbing-seed CSVs");
  const summary = readJson(needFile(path.join(run.dir, "summary.json"), "absorbing"));
  const series: Series[] = files.map((file) => {
    const table = readCsv(file);
    return {
      label: path.basename(file, ".csv"),
      x: column(table, "t"),
      y: column(table, "Q"),
    };
  });
  const t = series[0].x;
  const fitCurve = t.map((tt) => summary.C1 + summary.C2 * Math.exp(-summary.C3 * tt));
  series.push({ label: "C1 + C2 exp(-C3 t)", x: t, y: fitCurve, dashed: true, color: "#111" });
  return lineChart(series, {
    title: "Absorbing-set decay of Q(t) = |u|_H1 + 2|n_+|_L2",
    xLabel: "t",
    yLabel: "Q(t)",
    annotations: [
      `C1 = ${summary.C1}`,
      `C2 = ${summary.C2}`,
      `C3 = ${summary.C3}`,
    ],
  });
}

function figAttractor(runs: RunDir[]): string {
  const run = need(runs, "attractor", "attractor");
  const summary = readJson(needFile(path.join(run.dir, "summary.json"), "attractor"));
  const rhat: Record<string, number> = summary.R_hat;
  const labels = Object.keys(rhat).sort((a, b) => Number(a) - Number(b));
  const values = labels.map((a) => rhat[a]);
  const annotations = [`late-window smooth-part radii; diameters: ${summary.diameters
    .map((d: number) => Number(d.toPrecision(3)))
    .join(", ")}`];
  if (summary.R_hat_second) {
    annotations.push(
      `second ensemble: ${labels.map((a) => `${a}:${Number(summary.R_hat_second[a].toPrecision(3))}`).join(" ")}`,
    );
  }
  return barChart(labels.map((a) => `a = ${a}`), values, {
    title: "Attractor-radius proxy R_hat(a) in H^{1+a} x H^a",
    xLabel: "smoothing index a",
    yLabel: "R_hat",
    annotations,
  });
}

function figBounds(runs: RunDir[]): string {
  const run = need(runs, "bounds", "bounds");
  const verdicts = readJson(needFile(path.join(run.dir, "verdicts.json"), "bounds"));
  const sweeps: any[] = verdicts.supsums ?? [];
  if (sweeps.length === 0) throw new SkipFigure("bounds: no sup-sum sweeps in verdicts.json");
  const series: Series[] = sweeps.map((sweep) => ({
    label: `${sweep.label} (slope ${sweep.slope})`,
    x: sweep.rows.map((r: any) => r.k),
    y: sweep.rows.map((r: any) => r.sum),
    markers: true,
  }));
  return lineChart(series, {
    title: "Sup-sum sweeps: bounded at admissible s, growing above",
    xLabel: "k",
    yLabel: "inner sum",
    xScale: "log",
    yScale: "log",
    annotations: sweeps.map((s) => `${s.label}: slope = ${s.slope}`),
  });
}

// ---------------------------------------------------------------------------

const BUILDERS: Record<FigureKind, (runs: RunDir[]) => string> = {
  norms: figNorms,
  tails: figTails,
  smoothing: figSmoothing,
  absorbing: figAbsorbing,
  attractor: figAttractor,
  bounds: figBounds,
};

export interface RenderResult {
  written: string[];
  skipped: { kind: string; reason: string }[];
}

export function renderFigures(
  runs: RunDir[],
  kinds: FigureKind[],
  outDir: string,
): RenderResult {
  fs.mkdirSync(outDir, { recursive: true });
  const written: string[] = [];
  const skipped: { kind: string; reason: string }[] = [];
  for (const kind of kinds) {
    try {
      const svg = BUILDERS[kind](runs);
      const file = path.join(outDir, `${kind}.svg`);
      fs.writeFileSync(file, svg);
      written.push(file);
    } catch (err) {
      if (err instanceof SkipFigure) {
        skipped.push({ kind, reason: err.message });
      } else {
        skipped.push({ kind, reason: `${kind}: ${(err as Error).message}` });
      }
    }
  }
  return { written, skipped };
}
