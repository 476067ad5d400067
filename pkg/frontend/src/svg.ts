/** Minimal deterministic SVG assembly: no DOM, no timestamps, plain strings. */

export interface Scale {
  (v: number): number;
  domain: [number, number];
}

export function linearScale(domain: [number, number], range: [number, number]): Scale {
  const [d0, d1] = domain;
  const [r0, r1] = range;
  const span = d1 - d0 || 1;
  const f = ((v: number) => r0 + ((v - d0) / span) * (r1 - r0)) as Scale;
  f.domain = domain;
  return f;
}

export function esc(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;").replace(/"/g, "&quot;");
}

export class SvgDoc {
  private parts: string[] = [];

  constructor(
    readonly width: number,
    readonly height: number,
  ) {}

  add(fragment: string): void {
    this.parts.push(fragment);
  }

  line(x1: number, y1: number, x2: number, y2: number, style: string, cls = ""): void {
    this.add(
      `<line ${cls ? `class="${cls}" ` : ""}x1="${r(x1)}" y1="${r(y1)}" x2="${r(x2)}" y2="${r(y2)}" style="${style}"/>`,
    );
  }

  polyline(points: Array<[number, number]>, style: string, cls = ""): void {
    const pts = points.map(([x, y]) => `${r(x)},${r(y)}`).join(" ");
    this.add(`<polyline ${cls ? `class="${cls}" ` : ""}points="${pts}" fill="none" style="${style}"/>`);
  }

  rect(x: number, y: number, w: number, h: number, style: string, cls = ""): void {
    this.add(
      `<rect ${cls ? `class="${cls}" ` : ""}x="${r(x)}" y="${r(y)}" width="${r(w)}" height="${r(h)}" style="${style}"/>`,
    );
  }

  text(x: number, y: number, content: string, style = "font:12px sans-serif", anchor = "start"): void {
    this.add(
      `<text x="${r(x)}" y="${r(y)}" text-anchor="${anchor}" style="${style}">${esc(content)}</text>`,
    );
  }

  render(): string {
    return (
      `<svg xmlns="http://www.w3.org/2000/svg" width="${this.width}" height="${this.height}" ` +
      `viewBox="0 0 ${this.width} ${this.height}">\n<rect width="100%" height="100%" fill="white"/>\n` +
      this.parts.join("\n") +
      "\n</svg>\n"
    );
  }
}

function r(v: number): string {
  return (Math.round(v * 100) / 100).toString();
}

export function axisTicks(lo: number, hi: number, n = 6): number[] {
  const span = hi - lo || 1;
  const step = Math.pow(10, Math.floor(Math.log10(span / n)));
  const mult = [1, 2, 5, 10].find((m) => span / (step * m) <= n) ?? 10;
  const s = step * mult;
  const start = Math.ceil(lo / s) * s;
  const ticks: number[] = [];
  for (let v = start; v <= hi + 1e-9; v += s) ticks.push(Number(v.toFixed(10)));
  return ticks;
}

export const SERIES_COLORS = [
  "#1f77b4",
  "#d62728",
  "#2ca02c",
  "#9467bd",
  "#ff7f0e",
  "#8c564b",
  "#e377c2",
  "#7f7f7f",
  "#bcbd22",
  "#17becf",
];
