/**
 * Minimal deterministic SVG renderer: axes, polyline curves, star markers
 * for rejected steps, and a legend.  No timestamps or randomness, so equal
 * inputs produce byte-identical files.
 */

import { Series, FigureKind } from "./transform.js";

const WIDTH = 720;
const HEIGHT = 460;
const MARGIN = { left: 78, right: 24, top: 34, bottom: 56 };
const PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf"];

const Y_LABEL: Record<FigureKind, string> = {
  rel_error: "(f - f*) / max(f*, 1)",
  grad_norm: "gradient norm",
  rho: "descent diagnostic",
};

interface Scale {
  (v: number): number;
}

function fmt(v: number): string {
  if (v === 0) return "0";
  const a = Math.abs(v);
  if (a >= 1e4 || a < 1e-3) return v.toExponential(0).replace("e+", "e");
  return String(Number(v.toPrecision(6)));
}

function niceTicks(lo: number, hi: number, n = 6): number[] {
  if (!(hi > lo)) return [lo];
  const span = hi - lo;
  const raw = span / n;
  const mag = Math.pow(10, Math.floor(Math.log10(raw)));
  const norm = raw / mag;
  const step = (norm >= 5 ? 10 : norm >= 2 ? 5 : norm >= 1 ? 2 : 1) * mag;
  const ticks: number[] = [];
  for (let t = Math.ceil(lo / step) * step; t <= hi + 1e-12 * span; t += step) {
    ticks.push(Math.abs(t) < 1e-12 * span ? 0 : t);
  }
  return ticks;
}

function decadeTicks(lo: number, hi: number): number[] {
  const ticks: number[] = [];
  const eLo = Math.ceil(Math.log10(lo) - 1e-9);
  const eHi = Math.floor(Math.log10(hi) + 1e-9);
  const stride = Math.max(1, Math.ceil((eHi - eLo) / 8));
  for (let e = eLo; e <= eHi; e += stride) {
    ticks.push(Math.pow(10, e));
  }
  return ticks;
}

function starPath(cx: number, cy: number, r: number): string {
  const pts: string[] = [];
  for (let i = 0; i < 10; i++) {
    const rad = i % 2 === 0 ? r : 0.4 * r;
    const a = -Math.PI / 2 + (i * Math.PI) / 5;
    pts.push(`${(cx + rad * Math.cos(a)).toFixed(2)},${(cy + rad * Math.sin(a)).toFixed(2)}`);
  }
  return `M${pts.join("L")}Z`;
}

export function renderSvg(series: Series[], kind: FigureKind, logY: boolean): string {
  const xs = series.flatMap((s) => s.points.map((p) => p.x));
  let ys = series.flatMap((s) => s.points.map((p) => p.y));
  if (logY) {
    ys = ys.filter((y) => y > 0);
  }
  const x0 = Math.min(0, ...xs);
  const x1 = Math.max(1, ...xs);
  let yLo = ys.length ? Math.min(...ys) : 0;
  let yHi = ys.length ? Math.max(...ys) : 1;
  if (logY) {
    yLo = yLo > 0 ? yLo : 1e-16;
    yHi = yHi > 0 ? yHi : 1;
    if (yLo === yHi) {
      yLo /= 10;
      yHi *= 10;
    }
  } else if (yLo === yHi) {
    yHi = yLo + 1;
    yLo = Math.min(0, yLo);
  } else {
    const pad = 0.05 * (yHi - yLo);
    yLo = Math.min(0, yLo);
    yHi += pad;
  }

  const plotW = WIDTH - MARGIN.left - MARGIN.right;
  const plotH = HEIGHT - MARGIN.top - MARGIN.bottom;
  const sx: Scale = (v) => MARGIN.left + ((v - x0) / (x1 - x0)) * plotW;
  const sy: Scale = logY
    ? (v) => MARGIN.top + plotH - ((Math.log10(v) - Math.log10(yLo)) / (Math.log10(yHi) - Math.log10(yLo))) * plotH
    : (v) => MARGIN.top + plotH - ((v - yLo) / (yHi - yLo)) * plotH;

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" viewBox="0 0 ${WIDTH} ${HEIGHT}" font-family="Helvetica, Arial, sans-serif" font-size="12">`,
  );
  parts.push(`<rect width="${WIDTH}" height="${HEIGHT}" fill="white"/>`);

  // axes frame
  const axL = MARGIN.left;
  const axR = WIDTH - MARGIN.right;
  const axT = MARGIN.top;
  const axB = HEIGHT - MARGIN.bottom;
  parts.push(
    `<rect x="${axL}" y="${axT}" width="${plotW}" height="${plotH}" fill="none" stroke="#333" stroke-width="1"/>`,
  );

  for (const t of niceTicks(x0, x1)) {
    const px = sx(t).toFixed(2);
    parts.push(`<line x1="${px}" y1="${axB}" x2="${px}" y2="${axB + 5}" stroke="#333"/>`);
    parts.push(`<text x="${px}" y="${axB + 18}" text-anchor="middle">${fmt(t)}</text>`);
  }
  const yTicks = logY ? decadeTicks(yLo, yHi) : niceTicks(yLo, yHi);
  for (const t of yTicks) {
    const py = sy(t).toFixed(2);
    parts.push(`<line x1="${axL - 5}" y1="${py}" x2="${axL}" y2="${py}" stroke="#333"/>`);
    parts.push(`<text x="${axL - 8}" y="${py}" text-anchor="end" dominant-baseline="middle">${fmt(t)}</text>`);
    parts.push(
      `<line x1="${axL}" y1="${py}" x2="${axR}" y2="${py}" stroke="#ddd" stroke-width="0.5"/>`,
    );
  }
  parts.push(
    `<text x="${(axL + axR) / 2}" y="${HEIGHT - 14}" text-anchor="middle">oracle calls</text>`,
  );
  parts.push(
    `<text x="20" y="${(axT + axB) / 2}" text-anchor="middle" transform="rotate(-90 20 ${(axT + axB) / 2})">${Y_LABEL[kind]}</text>`,
  );

  series.forEach((s, i) => {
    const color = PALETTE[i % PALETTE.length];
    const pts = logY ? s.points.filter((p) => p.y > 0) : s.points;
    if (pts.length > 0) {
      const d = pts.map((p) => `${sx(p.x).toFixed(2)},${sy(p.y).toFixed(2)}`).join(" ");
      parts.push(
        `<polyline points="${d}" fill="none" stroke="${color}" stroke-width="1.5" class="curve"/>`,
      );
    }
    for (const st of s.stars) {
      const y = logY && st.y <= 0 ? yLo : st.y;
      parts.push(
        `<path d="${starPath(sx(st.x), sy(Math.max(y, logY ? yLo : y)), 6)}" fill="${color}" stroke="none" class="star"/>`,
      );
    }
  });

  // legend, top-right inside the frame
  series.forEach((s, i) => {
    const color = PALETTE[i % PALETTE.length];
    const ly = axT + 16 + i * 16;
    const lx = axR - 170;
    parts.push(
      `<line x1="${lx}" y1="${ly - 4}" x2="${lx + 24}" y2="${ly - 4}" stroke="${color}" stroke-width="2" class="legend-line"/>`,
    );
    parts.push(`<text x="${lx + 30}" y="${ly}" class="legend-label">${escapeXml(s.label)}</text>`);
  });

  parts.push("</svg>");
  return parts.join("\n") + "\n";
}

function escapeXml(s: string): string {
  return s
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}
