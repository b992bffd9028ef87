#!/usr/bin/env node
/**
 * plots render <run_dir> [--kinds a,b,c] [--out dir]
 *
 * run_dir is a single run directory or a root containing several; each
 * requested figure kind uses the newest run that can serve it.  Missing
 * series skip that figure with a warning; the exit code is nonzero only
 * when every requested figure fails.
 */
import * as path from "node:path";

import { discoverRuns } from "./data.js";
import { FIGURE_KINDS, FigureKind, renderFigures } from "./figures.js";

function usage(): never {
  process.stderr.write(
    `usage: plots render <run_dir> [--kinds ${FIGURE_KINDS.join(",")}|all] [--out dir]\n`,
  );
  process.exit(2);
}

export function main(argv: string[]): number {
  if (argv.length < 2 || argv[0] !== "render") usage();
  const target = argv[1];
  let kinds: FigureKind[] = [...FIGURE_KINDS];
  let outDir: string | undefined;
  for (let i = 2; i < argv.length; i++) {
    if (argv[i] === "--kinds" && argv[i + 1]) {
      const requested = argv[++i];
      if (requested !== "all") {
        const parts = requested.split(",").map((s) => s.trim());
        for (const part of parts) {
          if (!FIGURE_KINDS.includes(part as FigureKind)) {
            process.stderr.write(`unknown figure kind: ${part}\n`);
            return 2;
          }
        }
        kinds = parts as FigureKind[];
      }
    } else if (argv[i] === "--out" && argv[i + 1]) {
      outDir = argv[++i];
    } else {
      usage();
    }
  }

  let runs;
  try {
    runs = discoverRuns(target);
  } catch (err) {
    process.stderr.write(`error: ${(err as Error).message}\n`);
    return 1;
  }
  if (runs.length === 0) {
    process.stderr.write(`error: no run directories (manifest.json) under ${target}\n`);
    return 1;
  }

  const result = renderFigures(runs, kinds, outDir ?? path.join(target, "figures"));
  for (const skip of result.skipped) {
    process.stderr.write(`warning: skipped ${skip.kind}: ${skip.reason}\n`);
  }
  for (const file of result.written) {
    process.stdout.write(`${file}\n`);
  }
  if (result.written.length === 0) {
    process.stderr.write("error: every requested figure failed\n");
    return 1;
  }
  return 0;
}

const isDirectCall =
  process.argv[1] !== undefined &&
  import.meta.url === new URL(`file://${path.resolve(process.argv[1])}`).href;
if (isDirectCall) {
  process.exit(main(process.argv.slice(2)));
}
