/**
 * Run-directory access: manifests, CSV tables, JSON reports.
 *
 * A "run root" is either a single run directory (contains manifest.json)
 * or a directory of run directories; figure builders ask for the newest
 * run of a given subcommand.
 */
import * as fs from "node:fs";
import * as path from "node:path";

export interface Manifest {
  artifact: string;
  subcommand: string;
  created: string;
  [key: string]: unknown;
}

export interface RunDir {
  dir: string;
  manifest: Manifest;
}

export interface Table {
  columns: string[];
  rows: number[][];
}

export function readJson(file: string): any {
  return JSON.parse(fs.readFileSync(file, "utf-8"));
}

/** Parse a numeric CSV with a header line (the workbench writes no quoting). */
export function readCsv(file: string): Table {
  const text = fs.readFileSync(file, "utf-8").trim();
  const lines = text.split(/\r?\n/);
  if (lines.length < 2) throw new Error(`empty CSV: ${file}`);
  const columns = lines[0].split(",").map((c) => c.trim());
  const rows = lines.slice(1).map((line) => line.split(",").map(Number));
  return { columns, rows };
}

export function column(table: Table, name: string): number[] {
  const idx = table.columns.indexOf(name);
  if (idx < 0) throw new Error(`CSV has no column "${name}" (has ${table.columns.join(", ")})`);
  return table.rows.map((r) => r[idx]);
}

export function discoverRuns(root: string): RunDir[] {
  const manifestAt = (dir: string) => path.join(dir, "manifest.json");
  if (fs.existsSync(manifestAt(root))) {
    return [{ dir: root, manifest: readJson(manifestAt(root)) }];
  }
  if (!fs.existsSync(root) || !fs.statSync(root).isDirectory()) {
    throw new Error(`not a directory: ${root}`);
  }
  const out: RunDir[] = [];
  for (const entry of fs.readdirSync(root)) {
    const dir = path.join(root, entry);
    if (fs.existsSync(manifestAt(dir))) {
      out.push({ dir, manifest: readJson(manifestAt(dir)) });
    }
  }
  return out;
}

/** Newest run of the given subcommand under the root, if any. */
export function latestRun(runs: RunDir[], subcommand: string): RunDir | undefined {
  const matching = runs.filter((r) => r.manifest.subcommand === subcommand);
  matching.sort((a, b) => String(a.manifest.created).localeCompare(String(b.manifest.created)));
  return matching[matching.length - 1];
}

export function listFiles(dir: string, pattern: RegExp): string[] {
  return fs
    .readdirSync(dir)
    .filter((f) => pattern.test(f))
    .sort()
    .map((f) => path.join(dir, f));
}
