/** Deterministic SVG assembly: fixed sizes, fixed fonts, fixed number
 * formatting, no randomness, so identical inputs yield identical bytes. */

export const LAYER_COLORS = [
  "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
  "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
];

export function fmt(x: number, digits = 3): string {
  const out = x.toFixed(digits);
  return out === "-0." + "0".repeat(digits) ? out.slice(1) : out;
}

export function esc(text: string): string {
  return text.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

export type Scale = (x: number) => number;

export function linearScale(d0: number, d1: number, r0: number, r1: number): Scale {
  const span = d1 - d0 || 1;
  return (x) => r0 + ((x - d0) / span) * (r1 - r0);
}

export function logScale(d0: number, d1: number, r0: number, r1: number): Scale {
  const l0 = Math.log10(d0);
  const span = Math.log10(d1) - l0 || 1;
  return (x) => r0 + ((Math.log10(x) - l0) / span) * (r1 - r0);
}

/** Round-numbered tick positions covering [lo, hi]. */
export function linearTicks(lo: number, hi: number, count = 5): number[] {
  const raw = (hi - lo) / Math.max(1, count);
  const mag = 10 ** Math.floor(Math.log10(raw || 1));
  const step = [1, 2, 5, 10].map((m) => m * mag).find((s) => (hi - lo) / s <= count) ?? mag * 10;
  const start = Math.ceil(lo / step) * step;
  const ticks: number[] = [];
  for (let v = start; v <= hi + 1e-12; v += step) ticks.push(Number(v.toPrecision(12)));
  return ticks;
}

export function logTicks(lo: number, hi: number): number[] {
  const ticks: number[] = [];
  for (let e = Math.floor(Math.log10(lo)); e <= Math.ceil(Math.log10(hi)); e++) {
    const v = 10 ** e;
    if (v >= lo / 1.0001 && v <= hi * 1.0001) ticks.push(v);
  }
  return ticks.length >= 2 ? ticks : [lo, hi];
}

export interface Margins {
  top: number;
  right: number;
  bottom: number;
  left: number;
}

export class Svg {
  private parts: string[] = [];

  constructor(
    readonly width: number,
    readonly height: number,
  ) {
    this.parts.push(
      `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" ` +
        `viewBox="0 0 ${width} ${height}" font-family="Helvetica, Arial, sans-serif">`,
      `<rect width="${width}" height="${height}" fill="white"/>`,
    );
  }

  raw(fragment: string): void {
    this.parts.push(fragment);
  }

  line(x1: number, y1: number, x2: number, y2: number, attrs = ""): void {
    this.parts.push(
      `<line x1="${fmt(x1)}" y1="${fmt(y1)}" x2="${fmt(x2)}" y2="${fmt(y2)}" ${attrs}/>`,
    );
  }

  circle(cx: number, cy: number, r: number, attrs = ""): void {
    this.parts.push(`<circle cx="${fmt(cx)}" cy="${fmt(cy)}" r="${r}" ${attrs}/>`);
  }

  text(x: number, y: number, content: string, attrs = ""): void {
    this.parts.push(
      `<text x="${fmt(x)}" y="${fmt(y)}" font-size="11" fill="#222" ${attrs}>` +
        `${esc(content)}</text>`,
    );
  }

  render(): string {
    return this.parts.join("\n") + "\n</svg>\n";
  }
}

export function drawFrame(svg: Svg, m: Margins, w: number, h: number): void {
  svg.raw(
    `<rect x="${m.left}" y="${m.top}" width="${w - m.left - m.right}" ` +
      `height="${h - m.top - m.bottom}" fill="none" stroke="#444" stroke-width="1"/>`,
  );
}

export function drawYTicks(
  svg: Svg,
  ticks: number[],
  scale: Scale,
  m: Margins,
  width: number,
  label: (v: number) => string,
): void {
  for (const v of ticks) {
    const y = scale(v);
    svg.line(m.left - 4, y, m.left, y, 'stroke="#444"');
    svg.line(m.left, y, width - m.right, y, 'stroke="#eee"');
    svg.text(m.left - 8, y + 4, label(v), 'text-anchor="end"');
  }
}

export function errorBar(svg: Svg, x: number, y0: number, y1: number, color: string): void {
  svg.line(x, y0, x, y1, `stroke="${color}" stroke-width="1.2" data-role="errbar"`);
  svg.line(x - 3, y0, x + 3, y0, `stroke="${color}" stroke-width="1.2"`);
  svg.line(x - 3, y1, x + 3, y1, `stroke="${color}" stroke-width="1.2"`);
}
