import { readFileSync, writeFileSync } from "fs";
import { basename } from "path";

import { parseLog, RunLog } from "./csv.js";
import { defaultLogY, FigureKind, FigureSpec, toSeries } from "./transform.js";
import { renderSvg } from "./svg.js";

export interface RenderOptions {
  kind: FigureKind;
  out: string;
  inputs: string[];
  fstar?: number;
  linearY?: boolean;
}

export function loadLogs(paths: string[]): RunLog[] {
  return paths.map((p) => parseLog(basename(p).replace(/\.csv$/, ""), readFileSync(p, "utf-8")));
}

export function renderFigure(opts: RenderOptions): string {
  if (opts.inputs.length === 0) {
    throw new Error("at least one input log is required");
  }
  const logs = loadLogs(opts.inputs);
  const spec: FigureSpec = { kind: opts.kind, fstar: opts.fstar };
  const logY = opts.linearY ? false : defaultLogY(opts.kind);
  const svg = renderSvg(toSeries(logs, spec), opts.kind, logY);
  writeFileSync(opts.out, svg, "utf-8");
  return svg;
}
