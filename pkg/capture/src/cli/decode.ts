#!/usr/bin/env node
/**
 * lp-decode: decode a captured or painted latent tensor to numbered
 * PNG frames, or to an MP4 when the output path ends in `.mp4`.
 */

import yargs from 'yargs'
import { hideBin } from 'yargs/helpers'

import { decodeFrames } from '../decode.js'
import { backendFromFlags, backendOptions, parseArgs, runCli } from './common.js'

await runCli(async () => {
  const parser = yargs(hideBin(process.argv))
    .scriptName('lp-decode')
    .usage(
      '$0 --frames <file.npy> --out <dir|file.mp4> [--fps <n>]\n\n' +
        'Decode (F, C, H, W) float32 latents to RGB frames.',
    )
    .option('frames', {
      type: 'string',
      demandOption: true,
      describe: 'NPY tensor of latent frames',
    })
    .option('out', {
      type: 'string',
      demandOption: true,
      describe: 'output PNG directory, or an .mp4 path',
    })
    .option('fps', {
      type: 'number',
      default: 12,
      describe: 'video frame rate (.mp4 output only)',
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
  const result = await decodeFrames(backend, {
    framesPath: argv.frames as string,
    out: argv.out as string,
    fps: argv.fps as number,
  })
  console.log(`backend ${backend.name}`)
  console.log(`frames ${result.frames}`)
  console.log(`out ${argv.out}`)
})
