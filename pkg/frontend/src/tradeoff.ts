import { Row, numberColumn, readCsv } from './csv.js'
import { Series, TradeoffFigure } from './figure.js'

export interface TradeoffOptions {
  xMetric: string
  yMetric: string
  groupBy?: string
  constraintLines?: number[]
  xLabel?: string
  yLabel?: string
}

/**
 * Build a trade-off figure from a sweep CSV: one curve per distinct value of
 * the group column (single curve when ungrouped), points ordered by the
 * trade-off parameter V.
 */
export function tradeoffFromRows(rows: Row[], opts: TradeoffOptions): TradeoffFigure {
  const groups = new Map<string, Row[]>()
  for (const row of rows) {
    const key = opts.groupBy ? String(row[opts.groupBy]) : 'sweep'
    const bucket = groups.get(key)
    if (bucket) bucket.push(row)
    else groups.set(key, [row])
  }
  const series: Series[] = []
  for (const [label, bucket] of groups) {
    const sorted = [...bucket].sort((a, b) => Number(a.v) - Number(b.v))
    const xs = numberColumn(sorted, opts.xMetric)
    const ys = numberColumn(sorted, opts.yMetric)
    series.push({
      label: opts.groupBy ? `${opts.groupBy}=${label}` : label,
      points: xs.map((x, i) => ({ x, y: ys[i] })),
    })
  }
  return new TradeoffFigure(
    series,
    opts.constraintLines ?? [],
    opts.xLabel ?? opts.xMetric,
    opts.yLabel ?? opts.yMetric,
  )
}

export function plotTradeoff(csvPath: string, opts: TradeoffOptions): TradeoffFigure {
  return tradeoffFromRows(readCsv(csvPath), opts)
}
