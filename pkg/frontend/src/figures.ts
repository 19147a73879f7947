/** Figure builders for each experiment result layout. */

import * as fs from "node:fs";
import * as path from "node:path";
import { parseCsv, parseGrid, requireColumns, toNumber, column } from "./csv.js";
import { lineChart, heatmap, barChart, Series } from "./svg.js";

export interface Figure {
  name: string;
  svg: string;
}

const PALETTE = [
  "#1f77b4",
  "#ff7f0e",
  "#2ca02c",
  "#d62728",
  "#9467bd",
  "#8c564b",
  "#e377c2",
  "#7f7f7f",
];

/** Solver error vs step count: exactly min, mean, max and baseline series. */
export function ssoSweepFigure(summaryCsvText: string): string {
  const table = parseCsv(summaryCsvText);
  requireColumns(table, [
    "q",
    "min_error",
    "mean_error",
    "max_error",
    "baseline_error",
  ]);
  const q = column(table, "q");
  const series: Series[] = [
    { name: "min", x: q, y: column(table, "min_error"), color: PALETTE[2] },
    { name: "mean", x: q, y: column(table, "mean_error"), color: PALETTE[0], emphasis: true },
    { name: "max", x: q, y: column(table, "max_error"), color: PALETTE[3] },
    {
      name: "baseline",
      x: q,
      y: column(table, "baseline_error"),
      color: PALETTE[7],
      dashed: true,
    },
  ];
  return lineChart(series, {
    title: "Randomized adiabatic solver error vs step count",
    xLabel: "steps q",
    yLabel: "solution error",
    logX: true,
  });
}

/** Per-restart optimization traces; the best restart is drawn emphasized. */
export function tracesFigure(
  tracesCsvText: string,
  title: string,
  bestRestart: number | null,
  metric: "fidelity" | "cost" = "fidelity",
): string {
  const table = parseCsv(tracesCsvText);
  const cols = requireColumns(table, ["restart", "iteration", metric]);
  const restartAt = cols.get("restart")!;
  const iterAt = cols.get("iteration")!;
  const valueAt = cols.get(metric)!;
  const byRestart = new Map<number, { x: number[]; y: number[] }>();
  for (const row of table.rows) {
    const r = toNumber(row[restartAt]);
    if (!byRestart.has(r)) byRestart.set(r, { x: [], y: [] });
    const trace = byRestart.get(r)!;
    trace.x.push(toNumber(row[iterAt]));
    trace.y.push(toNumber(row[valueAt]));
  }
  const series: Series[] = [...byRestart.entries()]
    .sort((a, b) => a[0] - b[0])
    .map(([r, trace]) => ({
      name: r === bestRestart ? `restart ${r} (best)` : `restart ${r}`,
      x: trace.x,
      y: trace.y,
      color: PALETTE[r % PALETTE.length],
      emphasis: r === bestRestart,
    }));
  return lineChart(series, {
    title,
    xLabel: "iteration",
    yLabel: metric,
  });
}

/** Pressure-field heatmap with fracture cells outlined. */
export function solutionFigure(
  gridCsvText: string,
  maskCsvText: string | null,
  title: string,
): string {
  const grid = parseGrid(gridCsvText);
  let overlay: boolean[][] | null = null;
  if (maskCsvText !== null) {
    const table = parseCsv(maskCsvText);
    const cols = requireColumns(table, ["row", "col", "fracture"]);
    overlay = grid.map((row) => row.map(() => false));
    for (const row of table.rows) {
      const r = toNumber(row[cols.get("row")!]);
      const c = toNumber(row[cols.get("col")!]);
      if (r >= grid.length || c >= grid[0].length) {
        throw new Error(`fracture mask cell (${r},${c}) outside grid`);
      }
      overlay[r][c] = toNumber(row[cols.get("fracture")!]) !== 0;
    }
  }
  return heatmap(grid, overlay, title);
}

/** Trained and baseline fidelity vs problem size in qubits. */
export function scalingFigure(summaryCsvText: string): string {
  const table = parseCsv(summaryCsvText);
  requireColumns(table, ["n_qubits", "best_fidelity", "baseline_fidelity"]);
  const n = column(table, "n_qubits");
  return lineChart(
    [
      { name: "trained", x: n, y: column(table, "best_fidelity"), color: PALETTE[0], emphasis: true },
      {
        name: "mixed-state baseline",
        x: n,
        y: column(table, "baseline_fidelity"),
        color: PALETTE[7],
        dashed: true,
      },
    ],
    {
      title: "Variational solver fidelity vs problem size",
      xLabel: "qubits",
      yLabel: "fidelity",
      yDomain: [0, 1.05],
    },
  );
}

/** Trained fidelity vs right-branch permeability contrast (log x). */
export function permeabilityFigure(summaryCsvText: string): string {
  const table = parseCsv(summaryCsvText);
  requireColumns(table, ["right_branch_multiplier", "best_fidelity"]);
  return lineChart(
    [
      {
        name: "trained",
        x: column(table, "right_branch_multiplier"),
        y: column(table, "best_fidelity"),
        color: PALETTE[0],
        emphasis: true,
      },
    ],
    {
      title: "Variational solver fidelity vs permeability contrast",
      xLabel: "right-branch multiplier",
      yLabel: "fidelity",
      logX: true,
      yDomain: [0, 1.05],
    },
  );
}

/** Inferred fidelity vs noise strength, one series per channel. */
export function noiseFigure(csvText: string): string {
  const table = parseCsv(csvText);
  const cols = requireColumns(table, ["channel", "p", "inferred_fidelity"]);
  const channelAt = cols.get("channel")!;
  const byChannel = new Map<string, { x: number[]; y: number[] }>();
  for (const row of table.rows) {
    const name = row[channelAt];
    if (!byChannel.has(name)) byChannel.set(name, { x: [], y: [] });
    const series = byChannel.get(name)!;
    series.x.push(toNumber(row[cols.get("p")!]));
    series.y.push(toNumber(row[cols.get("inferred_fidelity")!]));
  }
  const series: Series[] = [...byChannel.entries()].map(([name, s], i) => ({
    name,
    x: s.x,
    y: s.y,
    color: PALETTE[i % PALETTE.length],
  }));
  return lineChart(series, {
    title: "Inferred solution fidelity vs noise strength",
    xLabel: "noise parameter p",
    yLabel: "inferred fidelity",
    yDomain: [0, 1.05],
  });
}

/** Readout probabilities from the fracture-aligned basis encoding. */
export function encodingFigure(marginalsCsvText: string): string {
  const table = parseCsv(marginalsCsvText);
  const cols = requireColumns(table, ["quantity", "value"]);
  const labels = table.rows.map((row) => row[cols.get("quantity")!]);
  const values = table.rows.map((row) => toNumber(row[cols.get("value")!]));
  return barChart(
    labels,
    values,
    "Fracture vs matrix readout probabilities",
    "probability",
  );
}

/** Compilation fidelity per target instance, grouped by target kind. */
export function compileFigure(csvText: string): string {
  const table = parseCsv(csvText);
  const cols = requireColumns(table, ["kind", "instance", "fidelity"]);
  const labels = table.rows.map(
    (row) => `${row[cols.get("kind")!]} #${row[cols.get("instance")!]}`,
  );
  const values = table.rows.map((row) => toNumber(row[cols.get("fidelity")!]));
  return barChart(labels, values, "Circuit compilation fidelity", "fidelity");
}

function read(dir: string, file: string): string {
  return fs.readFileSync(path.join(dir, file), "utf-8");
}

function maybeRead(dir: string, file: string): string | null {
  const full = path.join(dir, file);
  return fs.existsSync(full) ? fs.readFileSync(full, "utf-8") : null;
}

interface TrainedArtifacts {
  prefix: string;
  bestRestart: number | null;
}

function trainedPrefixes(dir: string): TrainedArtifacts[] {
  const prefixes = fs
    .readdirSync(dir)
    .filter((f) => f.endsWith("_traces.csv"))
    .map((f) => f.slice(0, -"_traces.csv".length))
    .sort();
  return prefixes.map((prefix) => {
    const paramsText = maybeRead(dir, `${prefix}_params.json`);
    let bestRestart: number | null = null;
    if (paramsText !== null) {
      const params = JSON.parse(paramsText) as { best_restart?: number };
      bestRestart = params.best_restart ?? null;
    }
    return { prefix, bestRestart };
  });
}

function trainedFigures(dir: string): Figure[] {
  const figures: Figure[] = [];
  for (const { prefix, bestRestart } of trainedPrefixes(dir)) {
    const traces = read(dir, `${prefix}_traces.csv`);
    figures.push({
      name: `${prefix}_fidelity_traces.svg`,
      svg: tracesFigure(traces, `${prefix}: fidelity traces`, bestRestart, "fidelity"),
    });
    figures.push({
      name: `${prefix}_cost_traces.svg`,
      svg: tracesFigure(traces, `${prefix}: cost traces`, bestRestart, "cost"),
    });
    const mask = maybeRead(dir, `${prefix}_fracture_mask.csv`);
    for (const which of ["true", "trained"]) {
      const grid = maybeRead(dir, `${prefix}_solution_${which}_grid.csv`);
      if (grid !== null) {
        figures.push({
          name: `${prefix}_solution_${which}.svg`,
          svg: solutionFigure(grid, mask, `${prefix}: ${which} pressure field`),
        });
      }
    }
  }
  return figures;
}

/** All figures for one experiment output directory. */
export function renderExperiment(kind: string, dir: string): Figure[] {
  switch (kind) {
    case "sso-sweep":
      return [
        {
          name: "sso_sweep.svg",
          svg: ssoSweepFigure(read(dir, "sso_sweep_summary.csv")),
        },
      ];
    case "vls-pitchfork-5q":
      return trainedFigures(dir);
    case "vls-scaling":
      return [
        {
          name: "vls_scaling_summary.svg",
          svg: scalingFigure(read(dir, "vls_scaling_summary.csv")),
        },
        ...trainedFigures(dir),
      ];
    case "vls-varying-permeability":
      return [
        {
          name: "vls_varying_permeability_summary.svg",
          svg: permeabilityFigure(
            read(dir, "vls_varying_permeability_summary.csv"),
          ),
        },
        ...trainedFigures(dir),
      ];
    case "noise-resilience-suite":
      return [
        {
          name: "noise_resilience.svg",
          svg: noiseFigure(read(dir, "noise_resilience.csv")),
        },
      ];
    case "smart-encoding-demo":
      return [
        {
          name: "smart_encoding_marginals.svg",
          svg: encodingFigure(read(dir, "smart_encoding_marginals.csv")),
        },
      ];
    case "compile-demo":
      return [
        {
          name: "compile_demo.svg",
          svg: compileFigure(read(dir, "compile_demo.csv")),
        },
      ];
    default:
      throw new Error(`unknown experiment kind: ${kind}`);
  }
}

export const KINDS = [
  "sso-sweep",
  "vls-pitchfork-5q",
  "vls-scaling",
  "vls-varying-permeability",
  "noise-resilience-suite",
  "smart-encoding-demo",
  "compile-demo",
];
