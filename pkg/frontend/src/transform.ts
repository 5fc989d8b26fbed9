/**
 * Turns run logs into plottable series for the three figure kinds.
 *
 *  - rel_error:  (f - f*) / max(f*, 1) vs oracle calls
 *  - grad_norm:  ||grad f|| vs oracle calls
 *  - rho:        descent diagnostic vs oracle calls, with one star marker
 *                per rejected step
 */

import { RunLog } from "./csv.js";

export type FigureKind = "rel_error" | "grad_norm" | "rho";

export interface Point {
  x: number;
  y: number;
}

export interface Series {
  label: string;
  points: Point[];
  stars: Point[]; // rejected-step markers (rho kind only)
}

export interface FigureSpec {
  kind: FigureKind;
  fstar?: number; // overrides the global minimum
  logY?: boolean; // defaults per kind
}

export function defaultLogY(kind: FigureKind): boolean {
  return kind !== "rho";
}

/** f*: the best value seen across every provided log, unless overridden. */
export function resolveFstar(logs: RunLog[], override?: number): number {
  if (override !== undefined) {
    return override;
  }
  let best = Infinity;
  for (const log of logs) {
    for (const row of log.rows) {
      if (row.f < best) best = row.f;
    }
  }
  return best;
}

export function toSeries(logs: RunLog[], spec: FigureSpec): Series[] {
  const fstar = resolveFstar(logs, spec.fstar);
  return logs.map((log) => {
    const points: Point[] = [];
    const stars: Point[] = [];
    for (const row of log.rows) {
      switch (spec.kind) {
        case "rel_error":
          points.push({ x: row.oracleCalls, y: (row.f - fstar) / Math.max(fstar, 1) });
          break;
        case "grad_norm":
          points.push({ x: row.oracleCalls, y: row.gradNorm });
          break;
        case "rho": {
          if (row.rho !== null) {
            points.push({ x: row.oracleCalls, y: row.rho });
          }
          if (!row.accepted) {
            stars.push({ x: row.oracleCalls, y: row.rho ?? 0 });
          }
          break;
        }
      }
    }
    return { label: log.name, points, stars };
  });
}
