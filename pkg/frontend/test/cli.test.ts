import { describe, it, expect, beforeAll } from "vitest";
import { execFileSync } from "node:child_process";
import * as fs from "node:fs";
import * as os from "node:os";
import * as path from "node:path";
import { fileURLToPath } from "node:url";

const ROOT = path.join(path.dirname(fileURLToPath(import.meta.url)), "..");
const CLI = path.join(ROOT, "dist", "cli.js");
const FIXTURES = path.join(ROOT, "test", "fixtures");

function run(args: string[]): { status: number; stdout: string; stderr: string } {
  try {
    const stdout = execFileSync("node", [CLI, ...args], { encoding: "utf-8" });
    return { status: 0, stdout, stderr: "" };
  } catch (err) {
    const e = err as { status: number; stdout: string; stderr: string };
    return { status: e.status, stdout: String(e.stdout), stderr: String(e.stderr) };
  }
}

beforeAll(() => {
  if (!fs.existsSync(CLI)) {
    execFileSync("npx", ["tsc"], { cwd: ROOT, encoding: "utf-8" });
  }
});

describe("cli", () => {
  it("render writes figures for one experiment", () => {
    const out = fs.mkdtempSync(path.join(os.tmpdir(), "plots-"));
    const result = run([
      "render",
      "--kind",
      "sso-sweep",
      "--input",
      path.join(FIXTURES, "sso-sweep"),
      "--out",
      out,
    ]);
    expect(result.status).toBe(0);
    expect(fs.existsSync(path.join(out, "sso_sweep.svg"))).toBe(true);
  });

  it("render-all writes one figure set per experiment kind", () => {
    const out = fs.mkdtempSync(path.join(os.tmpdir(), "plots-"));
    const result = run(["render-all", "--input", FIXTURES, "--out", out]);
    expect(result.status).toBe(0);
    const kinds = fs.readdirSync(out).sort();
    expect(kinds).toContain("sso-sweep");
    expect(kinds).toContain("compile-demo");
    expect(kinds.length).toBe(7);
    for (const kind of kinds) {
      expect(fs.readdirSync(path.join(out, kind)).length).toBeGreaterThan(0);
    }
  });

  it("reports a named missing column as an error", () => {
    const input = fs.mkdtempSync(path.join(os.tmpdir(), "plots-in-"));
    fs.writeFileSync(path.join(input, "sso_sweep_summary.csv"), "q,min_error\n10,0.1\n");
    const out = fs.mkdtempSync(path.join(os.tmpdir(), "plots-"));
    const result = run(["render", "--kind", "sso-sweep", "--input", input, "--out", out]);
    expect(result.status).toBe(1);
    expect(result.stderr).toContain("missing column: mean_error");
  });

  it("fails with usage on missing flags", () => {
    const result = run(["render"]);
    expect(result.status).toBe(2);
    expect(result.stderr).toContain("usage:");
  });
});
