#!/usr/bin/env node
/** Command line entry: render SVG figures from experiment result directories. */

import * as fs from "node:fs";
import * as path from "node:path";
import { renderExperiment, KINDS } from "./figures.js";

function usage(): never {
  process.stderr.write(
    [
      "usage:",
      "  qfracflow-plots render --kind KIND --input DIR --out DIR",
      "  qfracflow-plots render-all --input RESULTS_ROOT --out DIR",
      "",
      `kinds: ${KINDS.join(", ")}`,
      "",
    ].join("\n"),
  );
  process.exit(2);
}

function parseArgs(argv: string[]): { command: string; flags: Map<string, string> } {
  if (argv.length === 0) usage();
  const command = argv[0];
  const flags = new Map<string, string>();
  for (let i = 1; i < argv.length; i += 2) {
    if (!argv[i].startsWith("--") || i + 1 >= argv.length) usage();
    flags.set(argv[i].slice(2), argv[i + 1]);
  }
  return { command, flags };
}

function writeFigures(kind: string, input: string, out: string): number {
  const figures = renderExperiment(kind, input);
  fs.mkdirSync(out, { recursive: true });
  for (const figure of figures) {
    fs.writeFileSync(path.join(out, figure.name), figure.svg);
    process.stdout.write(`wrote ${path.join(out, figure.name)}\n`);
  }
  return figures.length;
}

function main(): void {
  const { command, flags } = parseArgs(process.argv.slice(2));
  const input = flags.get("input");
  const out = flags.get("out");
  if (!input || !out) usage();

  if (command === "render") {
    const kind = flags.get("kind");
    if (!kind) usage();
    writeFigures(kind, input, out);
    return;
  }
  if (command === "render-all") {
    let total = 0;
    for (const kind of KINDS) {
      const dir = path.join(input, kind);
      if (!fs.existsSync(dir)) continue;
      total += writeFigures(kind, dir, path.join(out, kind));
    }
    if (total === 0) {
      throw new Error(`no experiment directories found under ${input}`);
    }
    return;
  }
  usage();
}

try {
  main();
} catch (err) {
  process.stderr.write(`error: ${(err as Error).message}\n`);
  process.exit(1);
}
