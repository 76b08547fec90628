import { dirname, join } from 'path'
import { fileURLToPath } from 'url'
import { describe, expect, it } from 'vitest'
import { numberColumn, readCsv } from '../src/csv.js'
import { plotOffloadHist } from '../src/offloadHist.js'
import { plotTradeoff } from '../src/tradeoff.js'

// real outputs of `goedge paper --experiment meda_opportunistic`
const FIXTURES = join(dirname(fileURLToPath(import.meta.url)), 'fixtures')

describe('experiment bundle CSVs', () => {
  it('tradeoff figure data equals the sweep CSV exactly', () => {
    const path = join(FIXTURES, 'tradeoff_opportunistic.csv')
    const rows = readCsv(path)
    const fig = plotTradeoff(path, {
      xMetric: 'ue_delay_s_mean',
      yMetric: 'ue_energy_j_mean',
      groupBy: 'g_avg',
      constraintLines: [0.2],
    })
    const allPoints = fig.series.flatMap((s) => s.points)
    expect(allPoints).toHaveLength(rows.length)
    const byV = [...rows].sort((a, b) => Number(a.v) - Number(b.v))
    expect(allPoints.map((p) => p.x)).toEqual(numberColumn(byV, 'ue_delay_s_mean'))
    expect(allPoints.map((p) => p.y)).toEqual(numberColumn(byV, 'ue_energy_j_mean'))
    const svg = fig.render()
    expect(svg).toContain('<polyline')
    expect(svg).toContain('stroke-dasharray')
    expect(svg.length).toBeGreaterThan(1000)
  })

  it('histogram figure data equals the hist CSV exactly', () => {
    const path = join(FIXTURES, 'offload_hist.csv')
    const rows = readCsv(path)
    const fig = plotOffloadHist(path)
    expect(fig.bars.map((b) => b.value)).toEqual(
      numberColumn(rows, 'offload_pct'),
    )
    expect(fig.render()).toContain('<rect')
  })
})
