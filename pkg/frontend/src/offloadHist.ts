import { Row, readCsv } from './csv.js'
import { Bar, HistFigure } from './figure.js'

/** Build the per-device offloading histogram from its two-column CSV. */
export function histFromRows(rows: Row[]): HistFigure {
  const bars: Bar[] = rows.map((row, i) => {
    const ue = row.ue
    const pct = row.offload_pct
    if (typeof ue !== 'number' || typeof pct !== 'number') {
      throw new Error(`row ${i}: expected numeric ue and offload_pct`)
    }
    return { label: `UE-${ue}`, value: pct }
  })
  return new HistFigure(bars, '% of offloading')
}

export function plotOffloadHist(csvPath: string): HistFigure {
  return histFromRows(readCsv(csvPath))
}
