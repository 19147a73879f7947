/** Minimal deterministic SVG chart primitives (no DOM, no randomness). */

export const WIDTH = 720;
export const HEIGHT = 480;
export const MARGIN = { top: 48, right: 160, bottom: 56, left: 72 };

export interface Series {
  name: string;
  x: number[];
  y: number[];
  color: string;
  dashed?: boolean;
  emphasis?: boolean;
}

export interface AxisOptions {
  title: string;
  xLabel: string;
  yLabel: string;
  logX?: boolean;
  xDomain?: [number, number];
  yDomain?: [number, number];
}

function fmt(value: number): string {
  return Number(value.toFixed(3)).toString();
}

export class Scale {
  constructor(
    private lo: number,
    private hi: number,
    private outLo: number,
    private outHi: number,
    private log: boolean = false,
  ) {
    if (log && (lo <= 0 || hi <= 0)) {
      throw new Error("log scale requires positive domain");
    }
  }

  apply(value: number): number {
    const [a, b] = this.log
      ? [Math.log10(this.lo), Math.log10(this.hi)]
      : [this.lo, this.hi];
    const v = this.log ? Math.log10(value) : value;
    const t = b === a ? 0.5 : (v - a) / (b - a);
    return this.outLo + t * (this.outHi - this.outLo);
  }

  ticks(): number[] {
    if (this.log) {
      const result: number[] = [];
      const lo = Math.ceil(Math.log10(this.lo));
      const hi = Math.floor(Math.log10(this.hi));
      for (let e = lo; e <= hi; e += 1) result.push(10 ** e);
      return result.length > 0 ? result : [this.lo, this.hi];
    }
    const count = 5;
    const step = (this.hi - this.lo) / count;
    return Array.from({ length: count + 1 }, (_, i) => this.lo + i * step);
  }
}

function extent(values: number[], pad = 0.05): [number, number] {
  let lo = Math.min(...values);
  let hi = Math.max(...values);
  if (lo === hi) {
    lo -= 0.5;
    hi += 0.5;
  }
  const span = hi - lo;
  return [lo - pad * span, hi + pad * span];
}

/** A line chart with an optional log x axis and a series legend. */
export function lineChart(series: Series[], options: AxisOptions): string {
  if (series.length === 0 || series.every((s) => s.x.length === 0)) {
    throw new Error("no series data to plot");
  }
  const xs = series.flatMap((s) => s.x);
  const ys = series.flatMap((s) => s.y);
  const xDomain = options.xDomain ?? extent(xs, options.logX ? 0 : 0.02);
  const yDomain = options.yDomain ?? extent(ys);
  const sx = new Scale(
    xDomain[0],
    xDomain[1],
    MARGIN.left,
    WIDTH - MARGIN.right,
    options.logX,
  );
  const sy = new Scale(yDomain[0], yDomain[1], HEIGHT - MARGIN.bottom, MARGIN.top);

  const parts: string[] = [];
  parts.push(frame(options));
  for (const tick of sx.ticks()) {
    const px = fmt(sx.apply(tick));
    parts.push(
      `<line x1="${px}" y1="${MARGIN.top}" x2="${px}" y2="${HEIGHT - MARGIN.bottom}" stroke="#e0e0e0"/>`,
      `<text x="${px}" y="${HEIGHT - MARGIN.bottom + 20}" text-anchor="middle" font-size="12">${tick}</text>`,
    );
  }
  for (const tick of sy.ticks()) {
    const py = fmt(sy.apply(tick));
    parts.push(
      `<line x1="${MARGIN.left}" y1="${py}" x2="${WIDTH - MARGIN.right}" y2="${py}" stroke="#e0e0e0"/>`,
      `<text x="${MARGIN.left - 8}" y="${py}" text-anchor="end" dominant-baseline="middle" font-size="12">${fmt(tick)}</text>`,
    );
  }
  series.forEach((s, i) => {
    const points = s.x
      .map((x, j) => `${fmt(sx.apply(x))},${fmt(sy.apply(s.y[j]))}`)
      .join(" ");
    const width = s.emphasis ? 3 : 1.5;
    const dash = s.dashed ? ' stroke-dasharray="6,4"' : "";
    parts.push(
      `<polyline data-series="${s.name}" points="${points}" fill="none" stroke="${s.color}" stroke-width="${width}"${dash}/>`,
    );
    const ly = MARGIN.top + 16 * i;
    parts.push(
      `<line x1="${WIDTH - MARGIN.right + 10}" y1="${ly}" x2="${WIDTH - MARGIN.right + 34}" y2="${ly}" stroke="${s.color}" stroke-width="${width}"${dash}/>`,
      `<text x="${WIDTH - MARGIN.right + 40}" y="${ly + 4}" font-size="12">${s.name}</text>`,
    );
  });
  return svg(parts.join("\n"));
}

/** A grid heatmap with optional cell outlines for the fracture overlay. */
export function heatmap(
  grid: number[][],
  overlay: boolean[][] | null,
  title: string,
): string {
  const rows = grid.length;
  const cols = grid[0].length;
  const plotW = WIDTH - MARGIN.left - MARGIN.right;
  const plotH = HEIGHT - MARGIN.top - MARGIN.bottom;
  const cell = Math.min(plotW / cols, plotH / rows);
  const flat = grid.flat();
  const lo = Math.min(...flat);
  const hi = Math.max(...flat);
  const parts: string[] = [
    frame({ title, xLabel: "column", yLabel: "row" }),
  ];
  for (let r = 0; r < rows; r += 1) {
    for (let c = 0; c < cols; c += 1) {
      const t = hi === lo ? 0.5 : (grid[r][c] - lo) / (hi - lo);
      const shade = Math.round(255 * (1 - t));
      const color = `rgb(${shade},${shade},255)`;
      const x = fmt(MARGIN.left + c * cell);
      const y = fmt(MARGIN.top + r * cell);
      const stroke = overlay && overlay[r][c] ? "#d62728" : "#ffffff";
      const sw = overlay && overlay[r][c] ? 2 : 0.5;
      parts.push(
        `<rect x="${x}" y="${y}" width="${fmt(cell)}" height="${fmt(cell)}" fill="${color}" stroke="${stroke}" stroke-width="${sw}"/>`,
      );
    }
  }
  parts.push(
    `<text x="${WIDTH - MARGIN.right + 10}" y="${MARGIN.top}" font-size="12">max ${fmt(hi)}</text>`,
    `<text x="${WIDTH - MARGIN.right + 10}" y="${MARGIN.top + 18}" font-size="12">min ${fmt(lo)}</text>`,
  );
  return svg(parts.join("\n"));
}

/** Labeled horizontal bars (small categorical summaries). */
export function barChart(
  labels: string[],
  values: number[],
  title: string,
  xLabel: string,
): string {
  if (labels.length === 0) {
    throw new Error("no bars to plot");
  }
  const hi = Math.max(...values, 0);
  const plotW = WIDTH - MARGIN.left - MARGIN.right;
  const rowH = Math.min(
    36,
    (HEIGHT - MARGIN.top - MARGIN.bottom) / labels.length,
  );
  const parts: string[] = [frame({ title, xLabel, yLabel: "" })];
  labels.forEach((label, i) => {
    const w = hi === 0 ? 0 : (values[i] / hi) * plotW;
    const y = MARGIN.top + i * rowH;
    parts.push(
      `<rect x="${MARGIN.left}" y="${fmt(y)}" width="${fmt(w)}" height="${fmt(rowH * 0.7)}" fill="#1f77b4"/>`,
      `<text x="${MARGIN.left - 8}" y="${fmt(y + rowH * 0.35)}" text-anchor="end" dominant-baseline="middle" font-size="11">${label}</text>`,
      `<text x="${fmt(MARGIN.left + w + 6)}" y="${fmt(y + rowH * 0.35)}" dominant-baseline="middle" font-size="11">${Number(values[i].toPrecision(5))}</text>`,
    );
  });
  return svg(parts.join("\n"));
}

function frame(options: { title: string; xLabel: string; yLabel: string }): string {
  return [
    `<rect x="0" y="0" width="${WIDTH}" height="${HEIGHT}" fill="#ffffff"/>`,
    `<text x="${WIDTH / 2}" y="24" text-anchor="middle" font-size="16" font-weight="bold">${options.title}</text>`,
    `<text x="${WIDTH / 2}" y="${HEIGHT - 12}" text-anchor="middle" font-size="13">${options.xLabel}</text>`,
    `<text x="18" y="${HEIGHT / 2}" text-anchor="middle" font-size="13" transform="rotate(-90 18 ${HEIGHT / 2})">${options.yLabel}</text>`,
  ].join("\n");
}

function svg(body: string): string {
  return (
    `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" font-family="sans-serif">\n` +
    body +
    "\n</svg>\n"
  );
}
