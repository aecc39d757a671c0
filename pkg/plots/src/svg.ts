/**
 * Small deterministic SVG builder: fixed style, fixed float formatting,
 * no timestamps, so identical inputs give identical bytes.
 */

export const WIDTH = 720;
export const HEIGHT = 480;
export const MARGIN = { left: 72, right: 24, top: 40, bottom: 56 };

export type Scale = "linear" | "log";

export const PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd",
  "#ff7f0e", "#8c564b", "#17becf"];

export function fmt(x: number): string {
  if (!Number.isFinite(x)) return "0";
  if (x === 0) return "0";
  const s = x.toPrecision(6);
  return s.includes(".") ? s.replace(/\.?0+($|e)/, "$1") : s;
}

export class Axis {
  constructor(
    readonly lo: number,
    readonly hi: number,
    readonly scale: Scale,
    readonly pixLo: number,
    readonly pixHi: number,
  ) {
    if (scale === "log" && (lo <= 0 || hi <= 0)) {
      throw new Error("log scale requires positive data");
    }
  }

  pos(x: number): number {
    const [a, b] =
      this.scale === "log"
        ? [Math.log(this.lo), Math.log(this.hi)]
        : [this.lo, this.hi];
    const v = this.scale === "log" ? Math.log(x) : x;
    const frac = b > a ? (v - a) / (b - a) : 0.5;
    return this.pixLo + frac * (this.pixHi - this.pixLo);
  }

  ticks(): number[] {
    if (this.scale === "log") {
      const out: number[] = [];
      const d0 = Math.ceil(Math.log10(this.lo) - 1e-9);
      const d1 = Math.floor(Math.log10(this.hi) + 1e-9);
      for (let d = d0; d <= d1; d++) out.push(10 ** d);
      if (out.length === 0) out.push(this.lo, this.hi);
      return out;
    }
    const span = this.hi - this.lo;
    if (span <= 0) return [this.lo];
    const step = 10 ** Math.floor(Math.log10(span / 4));
    const mult = span / step > 20 ? 5 : span / step > 8 ? 2 : 1;
    const s = step * mult;
    const out: number[] = [];
    for (let v = Math.ceil(this.lo / s) * s; v <= this.hi + 1e-12 * span; v += s) {
      out.push(v);
    }
    return out;
  }
}

export function dataRange(values: number[], scale: Scale): [number, number] {
  const ok = values.filter((v) => Number.isFinite(v) && (scale !== "log" || v > 0));
  if (ok.length === 0) throw new Error("no plottable values for the axis");
  let lo = Math.min(...ok);
  let hi = Math.max(...ok);
  if (lo === hi) {
    lo = scale === "log" ? lo / 2 : lo - 1;
    hi = scale === "log" ? hi * 2 : hi + 1;
  }
  return [lo, hi];
}

export class Svg {
  private parts: string[] = [];

  constructor(readonly width = WIDTH, readonly height = HEIGHT) {
    this.parts.push(
      `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" ` +
        `height="${height}" viewBox="0 0 ${width} ${height}" ` +
        `font-family="Helvetica,Arial,sans-serif" font-size="12">`,
      `<rect width="${width}" height="${height}" fill="#ffffff"/>`,
    );
  }

  raw(s: string): void {
    this.parts.push(s);
  }

  text(x: number, y: number, s: string, opts = ""): void {
    this.parts.push(`<text x="${fmt(x)}" y="${fmt(y)}" ${opts}>${escape(s)}</text>`);
  }

  line(x1: number, y1: number, x2: number, y2: number, stroke: string, dash = ""): void {
    const d = dash ? ` stroke-dasharray="${dash}"` : "";
    this.parts.push(
      `<line x1="${fmt(x1)}" y1="${fmt(y1)}" x2="${fmt(x2)}" y2="${fmt(y2)}" ` +
        `stroke="${stroke}" stroke-width="1"${d}/>`,
    );
  }

  polyline(pts: [number, number][], stroke: string, width = 1.5): void {
    const d = pts.map(([x, y]) => `${fmt(x)},${fmt(y)}`).join(" ");
    this.parts.push(
      `<polyline points="${d}" fill="none" stroke="${stroke}" stroke-width="${width}"/>`,
    );
  }

  rect(x: number, y: number, w: number, h: number, fill: string): void {
    this.parts.push(
      `<rect x="${fmt(x)}" y="${fmt(y)}" width="${fmt(w)}" height="${fmt(h)}" fill="${fill}"/>`,
    );
  }

  axes(xa: Axis, ya: Axis, xlabel: string, ylabel: string, title: string): void {
    const { left, top } = MARGIN;
    const bottom = this.height - MARGIN.bottom;
    const right = this.width - MARGIN.right;
    this.line(left, bottom, right, bottom, "#000000");
    this.line(left, top, left, bottom, "#000000");
    for (const t of xa.ticks()) {
      const x = xa.pos(t);
      this.line(x, bottom, x, bottom + 4, "#000000");
      this.text(x, bottom + 18, tickLabel(t, xa.scale), `text-anchor="middle"`);
    }
    for (const t of ya.ticks()) {
      const y = ya.pos(t);
      this.line(left - 4, y, left, y, "#000000");
      this.text(left - 8, y + 4, tickLabel(t, ya.scale), `text-anchor="end"`);
    }
    this.text((left + right) / 2, this.height - 12, xlabel, `text-anchor="middle"`);
    this.raw(
      `<text x="16" y="${fmt((top + bottom) / 2)}" text-anchor="middle" ` +
        `transform="rotate(-90 16 ${fmt((top + bottom) / 2)})">${escape(ylabel)}</text>`,
    );
    this.text((left + right) / 2, 22, title, `text-anchor="middle" font-size="14"`);
  }

  legend(entries: [string, string][]): void {
    const x = MARGIN.left + 10;
    let y = MARGIN.top + 10;
    for (const [label, color] of entries) {
      this.line(x, y - 4, x + 22, y - 4, color);
      this.text(x + 28, y, label);
      y += 16;
    }
  }

  render(): string {
    return this.parts.join("\n") + "\n</svg>\n";
  }
}

function tickLabel(v: number, scale: Scale): string {
  if (scale === "log") {
    const d = Math.log10(v);
    if (Number.isInteger(d)) return d >= 0 && d <= 4 ? fmt(v) : `1e${d}`;
  }
  if (Math.abs(v) >= 1e5 || (v !== 0 && Math.abs(v) < 1e-3)) {
    return v.toExponential(0);
  }
  return fmt(Number(v.toFixed(6)));
}

function escape(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}
