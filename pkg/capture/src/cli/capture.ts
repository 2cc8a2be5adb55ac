#!/usr/bin/env node
/**
 * lp-capture: run a denoising pipeline once and record the per-step
 * predicted-original latents as a (T, C, H, W) float32 NPY tensor.
 */

import yargs from 'yargs'
import { hideBin } from 'yargs/helpers'

import { captureTrajectory } from '../capture.js'
import { backendFromFlags, backendOptions, parseArgs, runCli } from './common.js'

await runCli(async () => {
  const parser = yargs(hideBin(process.argv))
    .scriptName('lp-capture')
    .usage(
      '$0 --prompt <text> --steps <n> --seed <n> --out <file.npy>\n\n' +
        'Record per-step predicted-original latents to an NPY tensor.',
    )
    .option('prompt', {
      type: 'string',
      demandOption: true,
      describe: 'text prompt for the run',
    })
    .option('steps', {
      type: 'number',
      demandOption: true,
      describe: 'number of denoising steps',
    })
    .option('seed', {
      type: 'number',
      demandOption: true,
      describe: 'generator seed',
    })
    .option('out', {
      type: 'string',
      demandOption: true,
      describe: 'destination NPY path',
    })
    .options(backendOptions)
    .strict()
    .fail(false)
    .help()
  const argv = await parseArgs(parser)

  const backend = await backendFromFlags({
    backend: argv.backend as string | undefined,
    model: argv.model as string | undefined,
    scheduler: argv.scheduler as string,
    latentShape: argv['latent-shape'] as string,
  })
  const result = await captureTrajectory(backend, {
    prompt: argv.prompt as string,
    steps: argv.steps as number,
    seed: argv.seed as number,
    outPath: argv.out as string,
  })
  console.log(`backend ${backend.name}`)
  console.log(`shape ${result.shape.join(' ')}`)
  console.log(`out ${result.outPath}`)
})
