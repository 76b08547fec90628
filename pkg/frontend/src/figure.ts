/**
 * Minimal figure model rendered to standalone SVG.  The data a figure holds
 * is exactly what gets drawn, so tests can assert CSV round-trips against
 * `figure.series` / `figure.bars` without parsing image output.
 */

export interface Point {
  x: number
  y: number
}

export interface Series {
  label: string
  points: Point[]
}

export interface Bar {
  label: string
  value: number
}

const WIDTH = 720
const HEIGHT = 480
const MARGIN = { left: 80, right: 160, top: 40, bottom: 60 }
const PALETTE = ['#1f77b4', '#d62728', '#2ca02c', '#9467bd', '#ff7f0e', '#8c564b']

function linScale(domain: [number, number], range: [number, number]) {
  const [d0, d1] = domain
  const [r0, r1] = range
  const span = d1 - d0 || 1
  return (v: number) => r0 + ((v - d0) / span) * (r1 - r0)
}

function extent(values: number[]): [number, number] {
  let lo = Infinity
  let hi = -Infinity
  for (const v of values) {
    if (v < lo) lo = v
    if (v > hi) hi = v
  }
  if (!Number.isFinite(lo)) throw new Error('no finite values to plot')
  if (lo === hi) {
    lo -= Math.abs(lo) * 0.05 + 1e-12
    hi += Math.abs(hi) * 0.05 + 1e-12
  }
  return [lo, hi]
}

function esc(s: string): string {
  return s.replace(/&/g, '&amp;').replace(/</g, '&lt;').replace(/>/g, '&gt;').replace(/"/g, '&quot;')
}

function axisTicks(lo: number, hi: number, n = 5): number[] {
  const ticks: number[] = []
  for (let i = 0; i <= n; i++) ticks.push(lo + ((hi - lo) * i) / n)
  return ticks
}

function frame(xLabel: string, yLabel: string, sx: (v: number) => number, sy: (v: number) => number, xDom: [number, number], yDom: [number, number]): string[] {
  const parts: string[] = []
  const x0 = MARGIN.left
  const x1 = WIDTH - MARGIN.right
  const y0 = HEIGHT - MARGIN.bottom
  const y1 = MARGIN.top
  parts.push(`<line x1="${x0}" y1="${y0}" x2="${x1}" y2="${y0}" stroke="black"/>`)
  parts.push(`<line x1="${x0}" y1="${y0}" x2="${x0}" y2="${y1}" stroke="black"/>`)
  for (const t of axisTicks(xDom[0], xDom[1])) {
    parts.push(`<text x="${sx(t).toFixed(1)}" y="${y0 + 20}" font-size="11" text-anchor="middle">${t.toPrecision(3)}</text>`)
  }
  for (const t of axisTicks(yDom[0], yDom[1])) {
    parts.push(`<text x="${x0 - 8}" y="${(sy(t) + 4).toFixed(1)}" font-size="11" text-anchor="end">${t.toPrecision(3)}</text>`)
  }
  parts.push(`<text x="${(x0 + x1) / 2}" y="${HEIGHT - 15}" font-size="13" text-anchor="middle">${esc(xLabel)}</text>`)
  parts.push(`<text x="20" y="${(y0 + y1) / 2}" font-size="13" text-anchor="middle" transform="rotate(-90 20 ${(y0 + y1) / 2})">${esc(yLabel)}</text>`)
  return parts
}

/** Trade-off curves: one polyline per series plus dashed constraint levels. */
export class TradeoffFigure {
  constructor(
    public readonly series: Series[],
    public readonly constraintLines: number[],
    public readonly xLabel: string,
    public readonly yLabel: string,
  ) {
    if (series.length === 0 || series.every((s) => s.points.length === 0)) {
      throw new Error('refusing to render an empty figure')
    }
  }

  render(): string {
    const xs = this.series.flatMap((s) => s.points.map((p) => p.x))
    const ys = this.series
      .flatMap((s) => s.points.map((p) => p.y))
      .concat(this.constraintLines)
    const xDom = extent(xs)
    const yDom = extent(ys)
    const sx = linScale(xDom, [MARGIN.left, WIDTH - MARGIN.right])
    const sy = linScale(yDom, [HEIGHT - MARGIN.bottom, MARGIN.top])
    const parts = [
      `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}">`,
      `<rect width="${WIDTH}" height="${HEIGHT}" fill="white"/>`,
      ...frame(this.xLabel, this.yLabel, sx, sy, xDom, yDom),
    ]
    this.series.forEach((s, i) => {
      const color = PALETTE[i % PALETTE.length]
      const pts = s.points.map((p) => `${sx(p.x).toFixed(2)},${sy(p.y).toFixed(2)}`).join(' ')
      parts.push(`<polyline fill="none" stroke="${color}" stroke-width="1.5" points="${pts}" data-label="${esc(s.label)}"/>`)
      for (const p of s.points) {
        parts.push(`<circle cx="${sx(p.x).toFixed(2)}" cy="${sy(p.y).toFixed(2)}" r="3" fill="${color}"/>`)
      }
      const ly = MARGIN.top + 16 * i
      parts.push(`<line x1="${WIDTH - MARGIN.right + 10}" y1="${ly}" x2="${WIDTH - MARGIN.right + 30}" y2="${ly}" stroke="${color}" stroke-width="1.5"/>`)
      parts.push(`<text x="${WIDTH - MARGIN.right + 35}" y="${ly + 4}" font-size="11">${esc(s.label)}</text>`)
    })
    for (const level of this.constraintLines) {
      parts.push(`<line x1="${MARGIN.left}" y1="${sy(level).toFixed(2)}" x2="${WIDTH - MARGIN.right}" y2="${sy(level).toFixed(2)}" stroke="black" stroke-dasharray="6 4" data-constraint="${level}"/>`)
    }
    parts.push('</svg>')
    return parts.join('\n')
  }
}

/** One bar per device, values as percentages in [0, 100]. */
export class HistFigure {
  constructor(
    public readonly bars: Bar[],
    public readonly yLabel: string,
  ) {
    if (bars.length === 0) throw new Error('refusing to render an empty figure')
    for (const b of bars) {
      if (b.value < 0 || b.value > 100) {
        throw new Error(`bar ${b.label} outside [0, 100]: ${b.value}`)
      }
    }
  }

  render(): string {
    const x0 = MARGIN.left
    const x1 = WIDTH - MARGIN.right
    const y0 = HEIGHT - MARGIN.bottom
    const sy = linScale([0, 100], [y0, MARGIN.top])
    const slot = (x1 - x0) / this.bars.length
    const parts = [
      `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}">`,
      `<rect width="${WIDTH}" height="${HEIGHT}" fill="white"/>`,
      `<line x1="${x0}" y1="${y0}" x2="${x1}" y2="${y0}" stroke="black"/>`,
      `<line x1="${x0}" y1="${y0}" x2="${x0}" y2="${MARGIN.top}" stroke="black"/>`,
    ]
    for (const t of [0, 25, 50, 75, 100]) {
      parts.push(`<text x="${x0 - 8}" y="${(sy(t) + 4).toFixed(1)}" font-size="11" text-anchor="end">${t}</text>`)
    }
    this.bars.forEach((b, i) => {
      const bx = x0 + slot * i + slot * 0.2
      const bw = slot * 0.6
      const by = sy(b.value)
      parts.push(`<rect x="${bx.toFixed(1)}" y="${by.toFixed(2)}" width="${bw.toFixed(1)}" height="${(y0 - by).toFixed(2)}" fill="${PALETTE[i % PALETTE.length]}" data-label="${esc(b.label)}" data-value="${b.value}"/>`)
      parts.push(`<text x="${(bx + bw / 2).toFixed(1)}" y="${y0 + 18}" font-size="12" text-anchor="middle">${esc(b.label)}</text>`)
    })
    parts.push(`<text x="20" y="${(y0 + MARGIN.top) / 2}" font-size="13" text-anchor="middle" transform="rotate(-90 20 ${(y0 + MARGIN.top) / 2})">${esc(this.yLabel)}</text>`)
    parts.push('</svg>')
    return parts.join('\n')
  }
}
