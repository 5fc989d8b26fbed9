import { readFileSync } from "fs";
import { join } from "path";
import { describe, expect, it } from "vitest";

import { parseLog } from "../src/csv.js";

const FIXTURES = join(__dirname, "fixtures");

function fixture(name: string): string {
  return readFileSync(join(FIXTURES, name), "utf-8");
}

describe("parseLog", () => {
  it("reads the aa-fv fixture", () => {
    const log = parseLog("aa_fv_nls", fixture("aa_fv_nls.csv"));
    expect(log.rows.length).toBe(63);
    expect(log.rows[0].k).toBe(0);
    expect(log.rows[0].stepKind).toBe("picard_restart");
    expect(log.rows[0].oracleCalls).toBe(1);
    const calls = log.rows.map((r) => r.oracleCalls);
    for (let i = 1; i < calls.length; i++) {
      expect(calls[i]).toBeGreaterThan(calls[i - 1]);
    }
  });

  it("keeps empty rho as null and parses values elsewhere", () => {
    const log = parseLog("aa_fv_nls", fixture("aa_fv_nls.csv"));
    const restartRows = log.rows.filter((r, i) => i < log.rows.length - 1 && r.k % 11 === 0);
    for (const r of restartRows) {
      expect(r.rho).toBeNull();
    }
    expect(log.rows.some((r) => r.rho !== null && r.rho > 0)).toBe(true);
  });

  it("names the offending column on header mismatch", () => {
    const bad = "k,oracle_calls,fval,grad_norm,step_kind,accepted,rho_k\n1,1,0.5,0.1,aa,true,\n";
    expect(() => parseLog("bad", bad)).toThrowError(/column 3.*"f".*"fval"/s);
  });

  it("rejects extra columns", () => {
    const bad = "k,oracle_calls,f,grad_norm,step_kind,accepted,rho_k,extra\n";
    expect(() => parseLog("bad", bad)).toThrowError(/extra/);
  });

  it("rejects unknown step kinds and bad flags", () => {
    const head = "k,oracle_calls,f,grad_norm,step_kind,accepted,rho_k\n";
    expect(() => parseLog("bad", head + "0,1,0.5,0.1,warp,true,\n")).toThrowError(/step_kind/);
    expect(() => parseLog("bad", head + "0,1,0.5,0.1,aa,yes,\n")).toThrowError(/accepted/);
  });

  it("rejects empty files", () => {
    expect(() => parseLog("bad", "")).toThrowError(/empty/);
  });
});
