export { parseLog, EXPECTED_COLUMNS } from "./csv.js";
export type { LogRow, RunLog } from "./csv.js";
export { toSeries, resolveFstar, defaultLogY } from "./transform.js";
export type { FigureKind, FigureSpec, Series, Point } from "./transform.js";
export { renderSvg } from "./svg.js";
export { renderFigure, loadLogs } from "./render.js";
export { run } from "./main.js";
