#!/usr/bin/env node
/**
 * plots render --kind <rel_error|grad_norm|rho> --out <path> <csv...>
 *              [--fstar <value>] [--linear-y]
 */

import { renderFigure } from "./render.js";
import { FigureKind } from "./transform.js";

const KINDS = new Set(["rel_error", "grad_norm", "rho"]);

function usage(): never {
  process.stderr.write(
    "usage: plots render --kind <rel_error|grad_norm|rho> --out <path> <csv...> [--fstar <v>] [--linear-y]\n",
  );
  process.exit(1);
}

export function run(argv: string[]): number {
  if (argv.length === 0 || argv[0] !== "render") {
    usage();
  }
  let kind: string | undefined;
  let out: string | undefined;
  let fstar: number | undefined;
  let linearY = false;
  const inputs: string[] = [];
  for (let i = 1; i < argv.length; i++) {
    const a = argv[i];
    if (a === "--kind") kind = argv[++i];
    else if (a === "--out") out = argv[++i];
    else if (a === "--fstar") fstar = Number(argv[++i]);
    else if (a === "--linear-y") linearY = true;
    else if (a.startsWith("--")) usage();
    else inputs.push(a);
  }
  if (!kind || !KINDS.has(kind) || !out || inputs.length === 0) {
    usage();
  }
  if (fstar !== undefined && Number.isNaN(fstar)) {
    usage();
  }
  try {
    renderFigure({ kind: kind as FigureKind, out, inputs, fstar, linearY });
  } catch (err) {
    process.stderr.write(`error: ${err instanceof Error ? err.message : String(err)}\n`);
    return 1;
  }
  process.stdout.write(`${kind} figure (${inputs.length} curve${inputs.length > 1 ? "s" : ""}) -> ${out}\n`);
  return 0;
}

if (process.argv[1] && process.argv[1].endsWith("main.js")) {
  process.exit(run(process.argv.slice(2)));
}
