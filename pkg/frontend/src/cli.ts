import { writeFileSync } from 'fs'
import yargs from 'yargs'
import { hideBin } from 'yargs/helpers'
import { plotOffloadHist } from './offloadHist.js'
import { plotTradeoff } from './tradeoff.js'

yargs(hideBin(process.argv))
  .command(
    'tradeoff',
    'render trade-off curves from a sweep CSV',
    (y) =>
      y
        .option('csv', { type: 'string', demandOption: true })
        .option('out', { type: 'string', demandOption: true })
        .option('x', { type: 'string', default: 'ue_delay_s_mean' })
        .option('y', { type: 'string', default: 'ue_energy_j_mean' })
        .option('group-by', { type: 'string' })
        .option('constraint', { type: 'number', array: true, default: [] as number[] }),
    (argv) => {
      const fig = plotTradeoff(argv.csv, {
        xMetric: argv.x,
        yMetric: argv.y,
        groupBy: argv['group-by'],
        constraintLines: argv.constraint,
      })
      writeFileSync(argv.out, fig.render())
      console.log(`wrote ${argv.out} (${fig.series.length} curves)`)
    },
  )
  .command(
    'hist',
    'render the per-device offloading histogram CSV',
    (y) =>
      y
        .option('csv', { type: 'string', demandOption: true })
        .option('out', { type: 'string', demandOption: true }),
    (argv) => {
      const fig = plotOffloadHist(argv.csv)
      writeFileSync(argv.out, fig.render())
      console.log(`wrote ${argv.out} (${fig.bars.length} bars)`)
    },
  )
  .demandCommand(1)
  .strict()
  .parse()
