/**
 * Minimal SVG chart builder: line/scatter/bar series on linear or log axes.
 * No DOM, no dependencies — figures are assembled as strings so the
 * renderer runs anywhere node runs.
 */

export type Scale = "linear" | "log";

export interface Series {
  label: string;
  x: number[];
  y: number[];
  color?: string;
  dashed?: boolean;
  markers?: boolean;
}

export interface ChartOptions {
  title: string;
  xLabel: string;
  yLabel: string;
  xScale?: Scale;
  yScale?: Scale;
  width?: number;
  height?: number;
  annotations?: string[];
}

const PALETTE = [
  "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
  "#8c564b", "#17becf", "#7f7f7f", "#bcbd22", "#e377c2",
];

const MARGIN = { top: 48, right: 24, bottom: 52, left: 72 };

function esc(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

function finite(values: number[], scale: Scale): number[] {
  return values.filter((v) => Number.isFinite(v) && (scale === "linear" || v > 0));
}

function makeScale(domain: [number, number], range: [number, number], kind: Scale) {
  let [d0, d1] = domain;
  if (kind === "log") {
    d0 = Math.log10(d0);
    d1 = Math.log10(d1);
  }
  if (d0 === d1) {
    d0 -= 0.5;
    d1 += 0.5;
  }
  const [r0, r1] = range;
  return (v: number) => {
    const t = kind === "log" ? Math.log10(v) : v;
    return r0 + ((t - d0) / (d1 - d0)) * (r1 - r0);
  };
}

function ticks(domain: [number, number], kind: Scale, count = 6): number[] {
  const [lo, hi] = domain;
  if (kind === "log") {
    const p0 = Math.floor(Math.log10(lo));
    const p1 = Math.ceil(Math.log10(hi));
    const out: number[] = [];
    const step = Math.max(1, Math.round((p1 - p0) / count));
    for (let p = p0; p <= p1; p += step) out.push(10 ** p);
    return out.filter((v) => v >= lo / 1.001 && v <= hi * 1.001);
  }
  const span = hi - lo;
  if (span <= 0) return [lo];
  const raw = span / count;
  const mag = 10 ** Math.floor(Math.log10(raw));
  const step = [1, 2, 5, 10].map((m) => m * mag).find((s) => span / s <= count) ?? mag * 10;
  const out: number[] = [];
  for (let v = Math.ceil(lo / step) * step; v <= hi + step / 1e6; v += step) {
    out.push(Math.abs(v) < step / 1e6 ? 0 : v);
  }
  return out;
}

function fmtTick(v: number): string {
  if (v === 0) return "0";
  const a = Math.abs(v);
  if (a >= 1e5 || a < 1e-3) return v.toExponential(0);
  return `${Number(v.toPrecision(4))}`;
}

/** Render a chart with line/marker series. */
export function lineChart(series: Series[], opts: ChartOptions): string {
  const width = opts.width ?? 840;
  const height = opts.height ?? 520;
  const xScaleKind = opts.xScale ?? "linear";
  const yScaleKind = opts.yScale ?? "linear";

  const xs = series.flatMap((s) => finite(s.x, xScaleKind));
  const ys = series.flatMap((s) => finite(s.y, yScaleKind));
  if (xs.length === 0 || ys.length === 0) {
    throw new Error(`no drawable data for figure "${opts.title}"`);
  }
  const xDom: [number, number] = [Math.min(...xs), Math.max(...xs)];
  const yDom: [number, number] = [Math.min(...ys), Math.max(...ys)];
  if (yScaleKind === "linear" && yDom[0] > 0 && yDom[0] < yDom[1] * 0.5) yDom[0] = 0;

  const plotW: [number, number] = [MARGIN.left, width - MARGIN.right];
  const plotH: [number, number] = [height - MARGIN.bottom, MARGIN.top];
  const sx = makeScale(xDom, plotW, xScaleKind);
  const sy = makeScale(yDom, plotH, yScaleKind);

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" ` +
      `viewBox="0 0 ${width} ${height}" font-family="Helvetica, Arial, sans-serif">`,
    `<rect width="${width}" height="${height}" fill="white"/>`,
    `<text x="${width / 2}" y="24" text-anchor="middle" font-size="16" font-weight="bold">` +
      `${esc(opts.title)}</text>`,
  );

  // axes + grid
  for (const tv of ticks(xDom, xScaleKind)) {
    const px = sx(tv);
    parts.push(
      `<line x1="${px}" y1="${plotH[0]}" x2="${px}" y2="${plotH[1]}" stroke="#eee"/>`,
      `<text x="${px}" y="${plotH[0] + 18}" text-anchor="middle" font-size="11">${fmtTick(tv)}</text>`,
    );
  }
  for (const tv of ticks(yDom, yScaleKind)) {
    const py = sy(tv);
    parts.push(
      `<line x1="${plotW[0]}" y1="${py}" x2="${plotW[1]}" y2="${py}" stroke="#eee"/>`,
      `<text x="${plotW[0] - 6}" y="${py + 4}" text-anchor="end" font-size="11">${fmtTick(tv)}</text>`,
    );
  }
  parts.push(
    `<rect x="${plotW[0]}" y="${plotH[1]}" width="${plotW[1] - plotW[0]}" ` +
      `height="${plotH[0] - plotH[1]}" fill="none" stroke="#333"/>`,
    `<text x="${(plotW[0] + plotW[1]) / 2}" y="${height - 12}" text-anchor="middle" ` +
      `font-size="13">${esc(opts.xLabel)}</text>`,
    `<text x="18" y="${(plotH[0] + plotH[1]) / 2}" text-anchor="middle" font-size="13" ` +
      `transform="rotate(-90 18 ${(plotH[0] + plotH[1]) / 2})">${esc(opts.yLabel)}</text>`,
  );

  series.forEach((s, i) => {
    const color = s.color ?? PALETTE[i % PALETTE.length];
    const pts: string[] = [];
    for (let j = 0; j < s.x.length; j++) {
      const vx = s.x[j];
      const vy = s.y[j];
      if (!Number.isFinite(vx) || !Number.isFinite(vy)) continue;
      if (xScaleKind === "log" && vx <= 0) continue;
      if (yScaleKind === "log" && vy <= 0) continue;
      pts.push(`${sx(vx).toFixed(2)},${sy(vy).toFixed(2)}`);
    }
    if (pts.length === 0) return;
    const dash = s.dashed ? ` stroke-dasharray="6 4"` : "";
    if (pts.length > 1) {
      parts.push(
        `<polyline points="${pts.join(" ")}" fill="none" stroke="${color}" stroke-width="1.8"${dash}/>`,
      );
    }
    if (s.markers || pts.length === 1) {
      for (const p of pts) {
        const [cx, cy] = p.split(",");
        parts.push(`<circle cx="${cx}" cy="${cy}" r="2.6" fill="${color}"/>`);
      }
    }
    parts.push(
      `<text x="${plotW[1] - 6}" y="${plotH[1] + 16 + 15 * i}" text-anchor="end" ` +
        `font-size="12" fill="${color}">${esc(s.label)}</text>`,
    );
  });

  (opts.annotations ?? []).forEach((note, i) => {
    parts.push(
      `<text x="${plotW[0] + 8}" y="${plotH[1] + 16 + 15 * i}" font-size="12" ` +
        `fill="#333">${esc(note)}</text>`,
    );
  });

  parts.push("</svg>");
  return parts.join("\n");
}

/** Render a labeled vertical bar chart. */
export function barChart(
  labels: string[],
  values: number[],
  opts: ChartOptions,
): string {
  const width = opts.width ?? 840;
  const height = opts.height ?? 520;
  const plotW: [number, number] = [MARGIN.left, width - MARGIN.right];
  const plotH: [number, number] = [height - MARGIN.bottom, MARGIN.top];
  const vmax = Math.max(...values.filter(Number.isFinite), 0);
  if (!(vmax > 0)) throw new Error(`no drawable data for figure "${opts.title}"`);
  const sy = makeScale([0, vmax * 1.1], plotH, "linear");
  const band = (plotW[1] - plotW[0]) / labels.length;

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" ` +
      `viewBox="0 0 ${width} ${height}" font-family="Helvetica, Arial, sans-serif">`,
    `<rect width="${width}" height="${height}" fill="white"/>`,
    `<text x="${width / 2}" y="24" text-anchor="middle" font-size="16" font-weight="bold">` +
      `${esc(opts.title)}</text>`,
  );
  for (const tv of ticks([0, vmax * 1.1], "linear")) {
    const py = sy(tv);
    parts.push(
      `<line x1="${plotW[0]}" y1="${py}" x2="${plotW[1]}" y2="${py}" stroke="#eee"/>`,
      `<text x="${plotW[0] - 6}" y="${py + 4}" text-anchor="end" font-size="11">${fmtTick(tv)}</text>`,
    );
  }
  labels.forEach((label, i) => {
    const v = values[i];
    if (!Number.isFinite(v)) return;
    const x0 = plotW[0] + band * (i + 0.2);
    const y0 = sy(v);
    parts.push(
      `<rect x="${x0}" y="${y0}" width="${band * 0.6}" height="${plotH[0] - y0}" ` +
        `fill="${PALETTE[i % PALETTE.length]}"/>`,
      `<text x="${x0 + band * 0.3}" y="${plotH[0] + 18}" text-anchor="middle" ` +
        `font-size="12">${esc(label)}</text>`,
      `<text x="${x0 + band * 0.3}" y="${y0 - 6}" text-anchor="middle" ` +
        `font-size="11">${Number(v.toPrecision(4))}</text>`,
    );
  });
  parts.push(
    `<rect x="${plotW[0]}" y="${plotH[1]}" width="${plotW[1] - plotW[0]}" ` +
      `height="${plotH[0] - plotH[1]}" fill="none" stroke="#333"/>`,
    `<text x="${(plotW[0] + plotW[1]) / 2}" y="${height - 12}" text-anchor="middle" ` +
      `font-size="13">${esc(opts.xLabel)}</text>`,
    `<text x="18" y="${(plotH[0] + plotH[1]) / 2}" text-anchor="middle" font-size="13" ` +
      `transform="rotate(-90 18 ${(plotH[0] + plotH[1]) / 2})">${esc(opts.yLabel)}</text>`,
  );
  (opts.annotations ?? []).forEach((note, i) => {
    parts.push(
      `<text x="${plotW[0] + 8}" y="${plotH[1] + 16 + 15 * i}" font-size="12" ` +
        `fill="#333">${esc(note)}</text>`,
    );
  });
  parts.push("</svg>");
  return parts.join("\n");
}
