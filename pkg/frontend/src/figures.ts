/** Figure renderers: each takes CSV text and returns a complete SVG string. */

import {
  DataError,
  groupBy,
  mean,
  num,
  parseCsv,
  requireColumns,
  sampleStd,
} from "./csv.js";
import {
  LAYER_COLORS,
  Margins,
  Svg,
  drawFrame,
  drawYTicks,
  errorBar,
  fmt,
  linearScale,
  linearTicks,
  logScale,
  logTicks,
} from "./svg.js";

const SIZE = { width: 760, height: 420 };
const MARGINS: Margins = { top: 28, right: 24, bottom: 58, left: 64 };

interface CircuitPoint {
  circuit: string;
  layer: number;
  value: number;
}

/** Circuits sorted ascending by their value at the lowest layer count present. */
function circuitOrder(points: CircuitPoint[]): string[] {
  const baseLayer = Math.min(...points.map((p) => p.layer));
  const base = new Map<string, number>();
  for (const p of points) {
    if (p.layer === baseLayer && !base.has(p.circuit)) base.set(p.circuit, p.value);
  }
  for (const p of points) {
    if (!base.has(p.circuit)) {
      throw new DataError(`circuit ${p.circuit} has no rows at L=${baseLayer}`);
    }
  }
  return [...base.keys()].sort((a, b) => base.get(a)! - base.get(b)!);
}

function layerLegend(svg: Svg, layers: number[], x: number): void {
  layers.forEach((layer, i) => {
    const y = MARGINS.top + 14 + 16 * i;
    svg.circle(x, y - 4, 4, `fill="${LAYER_COLORS[(layer - 1) % LAYER_COLORS.length]}"`);
    svg.text(x + 8, y, `L=${layer}`);
  });
}

function descriptorByCircuit(
  csvText: string,
  column: "expr" | "ent",
  opts: { logY: boolean; title: string; reference?: { value: number; label: string } },
): string {
  const table = parseCsv(csvText);
  requireColumns(table, ["circuit_id", "L", column], `fig-${column}`);
  const points: CircuitPoint[] = table.rows.map((row) => ({
    circuit: row["circuit_id"],
    layer: num(row, "L"),
    value: num(row, column),
  }));

  const order = circuitOrder(points);
  const layers = [...new Set(points.map((p) => p.layer))].sort((a, b) => a - b);
  const { width, height } = SIZE;
  const m = MARGINS;
  const svg = new Svg(width, height);
  svg.text(m.left, 18, opts.title, 'font-size="13"');

  const xs = linearScale(-0.5, order.length - 0.5, m.left, width - m.right);
  let ys;
  let yticks: number[];
  if (opts.logY) {
    const positive = points.map((p) => p.value).filter((v) => v > 0);
    if (positive.length === 0) throw new DataError("log axis needs positive values");
    const lo = Math.min(...positive) / 1.5;
    const hi = Math.max(...positive) * 1.5;
    ys = logScale(lo, hi, height - m.bottom, m.top);
    yticks = logTicks(lo, hi);
  } else {
    ys = linearScale(0, 1, height - m.bottom, m.top);
    yticks = [0, 0.25, 0.5, 0.75, 1.0];
  }

  drawFrame(svg, m, width, height);
  drawYTicks(svg, yticks, ys, m, width, (v) => (opts.logY ? v.toExponential(0) : fmt(v, 2)));

  order.forEach((circuit, i) => {
    const x = xs(i);
    svg.text(
      x,
      height - m.bottom + 14,
      circuit,
      `text-anchor="end" transform="rotate(-55 ${fmt(x)} ${fmt(height - m.bottom + 14)})" data-role="circuit-label"`,
    );
  });

  if (opts.reference) {
    const y = ys(opts.reference.value);
    svg.line(
      m.left,
      y,
      width - m.right,
      y,
      `stroke="#111" stroke-dasharray="6 4" data-ref="haar-mean" data-value="${fmt(opts.reference.value, 6)}"`,
    );
    svg.text(width - m.right - 4, y - 5, opts.reference.label, 'text-anchor="end"');
  }

  for (const p of points) {
    const clamped = opts.logY ? Math.max(p.value, 1e-12) : p.value;
    const color = LAYER_COLORS[(p.layer - 1) % LAYER_COLORS.length];
    svg.circle(
      xs(order.indexOf(p.circuit)),
      ys(clamped),
      3.2,
      `fill="${color}" fill-opacity="0.85" data-circuit="${p.circuit}" data-layer="${p.layer}" data-value="${fmt(p.value, 6)}"`,
    );
  }
  layerLegend(svg, layers, width - m.right - 52);
  return svg.render();
}

export function renderExprByCircuit(csvText: string): string {
  return descriptorByCircuit(csvText, "expr", {
    logY: true,
    title: "Expressibility (KL divergence, lower is better) by circuit and layer count",
  });
}

export function renderEntByCircuit(csvText: string): string {
  const table = parseCsv(csvText);
  requireColumns(table, ["circuit_id", "L", "ent", "n"], "fig-ent");
  const widths = [...new Set(table.rows.map((row) => num(row, "n")))];
  if (widths.length !== 1) {
    throw new DataError(`fig-ent: expected a single width, got n=${widths.join(",")}`);
  }
  const dim = 2 ** widths[0];
  const haarMean = (dim - 2) / (dim + 1);
  return descriptorByCircuit(csvText, "ent", {
    logY: false,
    title: `Entangling capability (mean Q) by circuit and layer count, n=${widths[0]}`,
    reference: { value: haarMean, label: "Haar mean Q" },
  });
}

export function renderLandscape(csvText: string): string {
  const table = parseCsv(csvText);
  requireColumns(table, ["circuit_id", "expr", "ent", "n_params"], "fig-landscape");
  const rows = table.rows.map((row) => ({
    circuit: row["circuit_id"],
    expr: num(row, "expr"),
    ent: num(row, "ent"),
    params: num(row, "n_params"),
  }));

  const { width, height } = SIZE;
  const m = MARGINS;
  const svg = new Svg(width, height);
  svg.text(m.left, 18, "Descriptor landscape: expressibility vs entangling capability", 'font-size="13"');

  const exprs = rows.map((r) => Math.max(r.expr, 1e-12));
  const xs = logScale(Math.min(...exprs) / 1.5, Math.max(...exprs) * 1.5, m.left, width - m.right);
  const ys = linearScale(0, 1, height - m.bottom, m.top);
  drawFrame(svg, m, width, height);
  drawYTicks(svg, [0, 0.25, 0.5, 0.75, 1.0], ys, m, width, (v) => fmt(v, 2));
  for (const t of logTicks(Math.min(...exprs) / 1.5, Math.max(...exprs) * 1.5)) {
    const x = xs(t);
    svg.line(x, height - m.bottom, x, height - m.bottom + 4, 'stroke="#444"');
    svg.text(x, height - m.bottom + 16, t.toExponential(0), 'text-anchor="middle"');
  }

  const pLo = Math.min(...rows.map((r) => r.params));
  const pHi = Math.max(...rows.map((r) => r.params));
  const shade = linearScale(pLo, pHi || 1, 220, 30);
  for (const r of rows) {
    const g = Math.round(shade(r.params));
    const x = xs(Math.max(r.expr, 1e-12));
    const y = ys(r.ent);
    svg.circle(
      x,
      y,
      5,
      `fill="rgb(${g},${Math.round(g * 0.55)},${255 - g})" data-circuit="${r.circuit}" data-params="${r.params}"`,
    );
    svg.text(x + 7, y + 4, r.circuit);
  }
  svg.text(m.left, height - 8, `marker color: parameter count ${pLo} (blue) to ${pHi} (red)`);
  return svg.render();
}

export function renderConvergence(csvText: string): string {
  const table = parseCsv(csvText);
  requireColumns(table, ["pairs", "expr", "ent"], "fig-convergence");
  const bySize = groupBy(table.rows, (row) => row["pairs"]);
  const sizes = [...bySize.keys()].map(Number).sort((a, b) => a - b);

  const { width, height } = SIZE;
  const m = MARGINS;
  const svg = new Svg(width, height);
  svg.text(m.left, 18, "Descriptor convergence with sample size (mean ± std)", 'font-size="13"');

  const xs = logScale(sizes[0] / 1.3, sizes[sizes.length - 1] * 1.3, m.left, width - m.right);
  const panelGap = 26;
  const panelH = (height - m.top - m.bottom - panelGap) / 2;

  const panels: Array<{ column: "expr" | "ent"; y0: number; color: string }> = [
    { column: "expr", y0: m.top, color: "#1f77b4" },
    { column: "ent", y0: m.top + panelH + panelGap, color: "#d62728" },
  ];
  for (const panel of panels) {
    const stats = sizes.map((size) => {
      const values = bySize.get(String(size))!.map((row) => num(row, panel.column));
      return { size, mean: mean(values), std: sampleStd(values) };
    });
    const lo = Math.min(...stats.map((s) => s.mean - s.std));
    const hi = Math.max(...stats.map((s) => s.mean + s.std));
    const pad = (hi - lo || 0.1) * 0.15;
    const ys = linearScale(lo - pad, hi + pad, panel.y0 + panelH, panel.y0);
    svg.raw(
      `<rect x="${m.left}" y="${panel.y0}" width="${width - m.left - m.right}" height="${fmt(panelH)}" fill="none" stroke="#444"/>`,
    );
    for (const t of linearTicks(lo - pad, hi + pad, 4)) {
      const y = ys(t);
      svg.line(m.left - 4, y, m.left, y, 'stroke="#444"');
      svg.text(m.left - 8, y + 4, fmt(t, 3), 'text-anchor="end"');
    }
    svg.text(m.left + 6, panel.y0 + 14, panel.column === "expr" ? "expressibility" : "entangling capability");
    let prev: [number, number] | null = null;
    for (const s of stats) {
      const x = xs(s.size);
      const y = ys(s.mean);
      errorBar(svg, x, ys(s.mean - s.std), ys(s.mean + s.std), panel.color);
      svg.circle(x, y, 3.5, `fill="${panel.color}" data-size="${s.size}" data-mean="${fmt(s.mean, 6)}"`);
      if (prev) svg.line(prev[0], prev[1], x, y, `stroke="${panel.color}" stroke-width="1"`);
      prev = [x, y];
    }
  }
  for (const size of sizes) {
    const x = xs(size);
    svg.text(x, height - m.bottom + 16, String(size), 'text-anchor="middle"');
  }
  svg.text((m.left + width - m.right) / 2, height - 12, "sampled pairs", 'text-anchor="middle"');
  return svg.render();
}

export function renderSaturation(csvText: string, baselineCsv?: string): string {
  const table = parseCsv(csvText);
  requireColumns(table, ["circuit_id", "L", "n_2q", "expr"], "fig-saturation");
  let bias: number | null = null;
  if (baselineCsv !== undefined) {
    const baseline = parseCsv(baselineCsv);
    requireColumns(baseline, ["bias_mean"], "fig-saturation baseline");
    bias = num(baseline.rows[0], "bias_mean");
  } else if (table.columns.includes("bias")) {
    bias = num(table.rows[0], "bias");
  }

  const byCircuit = groupBy(table.rows, (row) => row["circuit_id"]);
  const circuits = [...byCircuit.keys()];
  const { width } = SIZE;
  const panelW = (width - 40) / circuits.length;
  const height = 300;
  const m: Margins = { top: 30, right: 10, bottom: 44, left: 54 };
  const svg = new Svg(width, height);
  svg.text(20, 18, "Expressibility saturation vs two-qubit gate count", 'font-size="13"');

  const values = table.rows.map((row) => num(row, "expr"));
  const lows = values.filter((v) => v > 0);
  const lo = Math.min(...lows, bias ?? Infinity) / 1.5;
  const hi = Math.max(...values) * 1.5;

  circuits.forEach((circuit, idx) => {
    const x0 = 20 + idx * panelW + (idx === 0 ? m.left : 28);
    const x1 = 20 + (idx + 1) * panelW - m.right;
    const rows = byCircuit
      .get(circuit)!
      .map((row) => ({ L: num(row, "L"), n2q: num(row, "n_2q"), expr: num(row, "expr") }))
      .sort((a, b) => a.L - b.L);
    const xs = linearScale(0, Math.max(...rows.map((r) => r.n2q)) * 1.1, x0, x1);
    const ys = logScale(lo, hi, height - m.bottom, m.top);
    svg.raw(
      `<rect x="${fmt(x0)}" y="${m.top}" width="${fmt(x1 - x0)}" height="${fmt(height - m.top - m.bottom)}" fill="none" stroke="#444"/>`,
    );
    if (idx === 0) {
      drawYTicks(svg, logTicks(lo, hi), ys, { ...m, left: x0 }, x1 + m.right, (v) =>
        v.toExponential(0),
      );
    }
    if (bias !== null) {
      const y = ys(bias);
      svg.line(
        x0,
        y,
        x1,
        y,
        `stroke="#d62728" stroke-dasharray="2 3" data-ref="bias-floor" data-value="${fmt(bias, 6)}"`,
      );
    }
    let prev: [number, number] | null = null;
    for (const r of rows) {
      const x = xs(r.n2q);
      const y = ys(Math.max(r.expr, lo));
      if (prev) svg.line(prev[0], prev[1], x, y, 'stroke="#1f77b4"');
      svg.circle(x, y, 3, `fill="#1f77b4" data-circuit="${circuit}" data-layer="${r.L}"`);
      prev = [x, y];
    }
    svg.text((x0 + x1) / 2, height - m.bottom + 16, circuit, 'text-anchor="middle"');
    svg.text((x0 + x1) / 2, height - 10, "two-qubit gates", 'text-anchor="middle"');
  });
  return svg.render();
}
