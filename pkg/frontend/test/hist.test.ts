import { mkdtempSync, writeFileSync } from 'fs'
import { tmpdir } from 'os'
import { join } from 'path'
import { describe, expect, it } from 'vitest'
import { plotOffloadHist } from '../src/offloadHist.js'

function writeHist(values: number[]): string {
  const dir = mkdtempSync(join(tmpdir(), 'goedge-plots-'))
  const path = join(dir, 'offload_hist.csv')
  const lines = ['ue,offload_pct']
  values.forEach((v, i) => lines.push(`${i},${v}`))
  writeFileSync(path, lines.join('\n') + '\n')
  return path
}

describe('plotOffloadHist', () => {
  it('draws one bar per device with the CSV values', () => {
    const values = [16.7, 10.7, 8.0, 14.0, 12.7]
    const fig = plotOffloadHist(writeHist(values))
    expect(fig.bars.map((b) => b.value)).toEqual(values)
    expect(fig.bars.map((b) => b.label)).toEqual(
      values.map((_, i) => `UE-${i}`),
    )
    const svg = fig.render()
    expect((svg.match(/<rect [^>]*data-label/g) ?? []).length).toBe(5)
  })

  it('handles the all-offload and all-local corners', () => {
    for (const v of [0, 100]) {
      const fig = plotOffloadHist(writeHist([v, v, v]))
      expect(fig.bars.every((b) => b.value === v)).toBe(true)
      expect(fig.render()).toContain('svg')
    }
  })

  it('rejects values outside the percentage range', () => {
    expect(() => plotOffloadHist(writeHist([12, 104]))).toThrow(/\[0, 100\]/)
  })
})
