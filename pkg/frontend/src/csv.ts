/**
 * Reader for aagd run logs.
 *
 * Schema (exact header match required):
 *   k,oracle_calls,f,grad_norm,step_kind,accepted,rho_k
 */

export interface LogRow {
  k: number;
  oracleCalls: number;
  f: number;
  gradNorm: number;
  stepKind: string;
  accepted: boolean;
  rho: number | null;
}

export interface RunLog {
  name: string;
  rows: LogRow[];
}

export const EXPECTED_COLUMNS = [
  "k",
  "oracle_calls",
  "f",
  "grad_norm",
  "step_kind",
  "accepted",
  "rho_k",
];

const STEP_KINDS = new Set(["picard_restart", "picard_fallback", "aa"]);

export function parseLog(name: string, text: string): RunLog {
  const lines = text.split(/\r?\n/).filter((l) => l.length > 0);
  if (lines.length === 0) {
    throw new Error(`${name}: empty log file`);
  }
  const header = lines[0].split(",");
  for (let i = 0; i < EXPECTED_COLUMNS.length; i++) {
    if (header[i] !== EXPECTED_COLUMNS[i]) {
      throw new Error(
        `${name}: schema mismatch in column ${i + 1}: expected ` +
          `"${EXPECTED_COLUMNS[i]}", found "${header[i] ?? "<missing>"}"`,
      );
    }
  }
  if (header.length !== EXPECTED_COLUMNS.length) {
    throw new Error(
      `${name}: schema mismatch: unexpected extra column "${header[EXPECTED_COLUMNS.length]}"`,
    );
  }

  const rows: LogRow[] = [];
  for (let ln = 1; ln < lines.length; ln++) {
    const parts = lines[ln].split(",");
    if (parts.length !== EXPECTED_COLUMNS.length) {
      throw new Error(`${name}:${ln + 1}: expected ${EXPECTED_COLUMNS.length} fields, got ${parts.length}`);
    }
    const [k, calls, f, gnorm, kind, accepted, rho] = parts;
    if (!STEP_KINDS.has(kind)) {
      throw new Error(`${name}:${ln + 1}: unknown step_kind "${kind}"`);
    }
    if (accepted !== "true" && accepted !== "false") {
      throw new Error(`${name}:${ln + 1}: accepted must be true/false, got "${accepted}"`);
    }
    rows.push({
      k: requireInt(name, ln, "k", k),
      oracleCalls: requireInt(name, ln, "oracle_calls", calls),
      f: requireFloat(name, ln, "f", f),
      gradNorm: requireFloat(name, ln, "grad_norm", gnorm),
      stepKind: kind,
      accepted: accepted === "true",
      rho: rho === "" ? null : requireFloat(name, ln, "rho_k", rho),
    });
  }
  if (rows.length === 0) {
    throw new Error(`${name}: log has a header but no rows`);
  }
  return { name, rows };
}

function requireInt(name: string, ln: number, col: string, raw: string): number {
  const v = Number(raw);
  if (!Number.isInteger(v)) {
    throw new Error(`${name}:${ln + 1}: column ${col}: not an integer: "${raw}"`);
  }
  return v;
}

function requireFloat(name: string, ln: number, col: string, raw: string): number {
  const v = Number(raw);
  if (raw === "" || Number.isNaN(v)) {
    throw new Error(`${name}:${ln + 1}: column ${col}: not a number: "${raw}"`);
  }
  return v;
}
