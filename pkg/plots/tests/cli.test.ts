import { existsSync, mkdtempSync, readFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

import { describe, expect, it, vi } from "vitest";

import { main } from "../src/cli.js";

const FIXTURES = new URL("./fixtures/", import.meta.url).pathname;

describe("plot cli", () => {
  it("curves: expands globs and writes an svg", () => {
    const dir = mkdtempSync(join(tmpdir(), "cli-"));
    const out = join(dir, "curves.svg");
    const code = main([
      "curves",
      "--in", join(FIXTURES, "metrics_*_1.csv"),
      "--in", join(FIXTURES, "metrics_*_2.csv"),
      "--out", out,
    ]);
    expect(code).toBe(0);
    const svg = readFileSync(out, "utf8");
    expect(svg.startsWith("<svg")).toBe(true);
    expect(svg).toContain('data-label="madsac_cc"');
    expect(svg).toContain('data-label="random"');
  });

  it("sweep: writes an svg for a chosen metric", () => {
    const dir = mkdtempSync(join(tmpdir(), "cli-"));
    const out = join(dir, "sweep.svg");
    const code = main([
      "sweep",
      "--in", join(FIXTURES, "sweep_omega1.csv"),
      "--metric", "energy",
      "--out", out,
    ]);
    expect(code).toBe(0);
    expect(existsSync(out)).toBe(true);
  });

  it("missing csv exits nonzero naming the file", () => {
    const spy = vi.spyOn(console, "error").mockImplementation(() => {});
    const code = main([
      "curves",
      "--in", "/nowhere/metrics_x_1.csv",
      "--out", "/tmp/never.svg",
    ]);
    expect(code).toBe(1);
    expect(spy.mock.calls.flat().join(" ")).toContain("metrics_x_1.csv");
    spy.mockRestore();
  });

  it("unknown metric exits nonzero listing metrics", () => {
    const spy = vi.spyOn(console, "error").mockImplementation(() => {});
    const code = main([
      "sweep",
      "--in", join(FIXTURES, "sweep_omega1.csv"),
      "--metric", "nope",
      "--out", "/tmp/never.svg",
    ]);
    expect(code).toBe(1);
    expect(spy.mock.calls.flat().join(" ")).toContain("weighted_cost");
    spy.mockRestore();
  });

  it("unknown command prints usage", () => {
    const spy = vi.spyOn(console, "error").mockImplementation(() => {});
    expect(main(["scatter"])).toBe(2);
    expect(spy.mock.calls.flat().join(" ")).toContain("usage");
    spy.mockRestore();
  });
});
