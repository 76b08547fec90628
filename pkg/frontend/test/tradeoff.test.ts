import { mkdtempSync, writeFileSync } from 'fs'
import { tmpdir } from 'os'
import { join } from 'path'
import { describe, expect, it } from 'vitest'
import { readCsv } from '../src/csv.js'
import { plotTradeoff, tradeoffFromRows } from '../src/tradeoff.js'

const HEADER =
  'policy,v,seed,g_avg,d_avg_s,e_avg_j,es_energy_j,ue_energy_j_mean,ue_delay_s_mean,ue_accuracy_mean,ue_offload_frac_mean'

function sweepCsv(gLevels: number[], pointsPerCurve = 4): string {
  const lines = [HEADER]
  for (const g of gLevels) {
    for (let i = 0; i < pointsPerCurve; i++) {
      const v = 10 ** (2 + i)
      const energy = 0.02 - 0.003 * i + g * 0.001
      const delay = 0.05 + 0.03 * i
      lines.push(
        `mu_meda,${v},1,${g},0.2,,0.005,${energy},${delay},${g + 0.01},0.5`,
      )
    }
  }
  return lines.join('\n') + '\n'
}

function writeTmp(name: string, text: string): string {
  const dir = mkdtempSync(join(tmpdir(), 'goedge-plots-'))
  const path = join(dir, name)
  writeFileSync(path, text)
  return path
}

describe('plotTradeoff', () => {
  it('makes one curve per group plus dashed constraint lines', () => {
    const path = writeTmp('sweep.csv', sweepCsv([0.7, 0.8, 0.915]))
    const fig = plotTradeoff(path, {
      xMetric: 'ue_delay_s_mean',
      yMetric: 'ue_energy_j_mean',
      groupBy: 'g_avg',
      constraintLines: [0.2],
    })
    expect(fig.series).toHaveLength(3)
    const svg = fig.render()
    expect((svg.match(/<polyline/g) ?? []).length).toBe(3)
    expect((svg.match(/stroke-dasharray/g) ?? []).length).toBe(1)
    expect(svg.length).toBeGreaterThan(500)
  })

  it('round-trips the CSV values into the figure data', () => {
    const path = writeTmp('sweep.csv', sweepCsv([0.7]))
    const rows = readCsv(path)
    const fig = plotTradeoff(path, {
      xMetric: 'ue_delay_s_mean',
      yMetric: 'ue_energy_j_mean',
      groupBy: 'g_avg',
    })
    const points = fig.series[0].points
    expect(points.map((p) => p.x)).toEqual(rows.map((r) => r.ue_delay_s_mean))
    expect(points.map((p) => p.y)).toEqual(rows.map((r) => r.ue_energy_j_mean))
  })

  it('orders points by the trade-off parameter', () => {
    // shuffled input rows still render as a V-ordered polyline
    const rows = readCsv(writeTmp('sweep.csv', sweepCsv([0.8], 5)))
    const shuffled = [rows[3], rows[0], rows[4], rows[2], rows[1]]
    const fig = tradeoffFromRows(shuffled, {
      xMetric: 'ue_delay_s_mean',
      yMetric: 'ue_energy_j_mean',
    })
    const xs = fig.series[0].points.map((p) => p.x)
    expect(xs).toEqual([...xs].sort((a, b) => a - b))
  })

  it('refuses an empty CSV instead of writing an empty image', () => {
    const path = writeTmp('sweep.csv', HEADER + '\n')
    expect(() =>
      plotTradeoff(path, { xMetric: 'ue_delay_s_mean', yMetric: 'ue_energy_j_mean' }),
    ).toThrow(/no data rows/)
  })
})
