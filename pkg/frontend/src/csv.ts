import { readFileSync } from 'fs'
import Papa from 'papaparse'

export type Row = Record<string, string | number | null>

/** Parse one of the simulator's CSV outputs into typed rows. */
export function readCsv(path: string): Row[] {
  const text = readFileSync(path, 'utf8')
  const parsed = Papa.parse<Record<string, string>>(text.trim(), {
    header: true,
    skipEmptyLines: true,
  })
  if (parsed.errors.length > 0) {
    throw new Error(`${path}: ${parsed.errors[0].message}`)
  }
  const rows = parsed.data.map((raw) => {
    const row: Row = {}
    for (const [key, value] of Object.entries(raw)) {
      if (key === 'policy') {
        row[key] = value
      } else if (value === '' || value === undefined) {
        row[key] = null
      } else {
        const num = Number(value)
        if (Number.isNaN(num)) throw new Error(`${path}: bad number in ${key}: ${value}`)
        row[key] = num
      }
    }
    return row
  })
  if (rows.length === 0) {
    throw new Error(`${path}: no data rows`)
  }
  return rows
}

export function numberColumn(rows: Row[], name: string): number[] {
  return rows.map((r, i) => {
    const v = r[name]
    if (typeof v !== 'number') {
      throw new Error(`row ${i}: column ${name} is not numeric (${v})`)
    }
    return v
  })
}
