/**
 * Shared command-line plumbing: backend selection flags and the
 * error-to-exit-code policy.
 *
 * Exit codes follow the painting engine's convention: 0 on success,
 * 2 for usage, validation, and format problems, 1 for environment and
 * I/O failures (missing checkpoint, missing runtime, unsupported
 * scheduler, unreadable files).
 */

import type { Options } from 'yargs'

import type { PipelineBackend } from '../backend.js'
import { loadPretrainedBackend } from '../backend.js'
import {
  FormatError,
  SetupError,
  UnsupportedSchedulerError,
  ValidationError,
} from '../errors.js'
import type { SyntheticScheduler } from '../synthetic.js'
import { SyntheticDiffusionBackend } from '../synthetic.js'

export const SCHEDULER_CHOICES: readonly SyntheticScheduler[] = [
  'alpha-bar',
  'sigma',
  'v',
  'sample',
  'exposed',
  'opaque',
]

export const backendOptions: Record<string, Options> = {
  backend: {
    type: 'string',
    choices: ['synthetic', 'pretrained'],
    describe:
      'pipeline backend; defaults to pretrained when --model is given, synthetic otherwise',
  },
  model: {
    type: 'string',
    describe: 'converted ONNX checkpoint directory (pretrained backend)',
  },
  scheduler: {
    type: 'string',
    choices: SCHEDULER_CHOICES as string[],
    default: 'alpha-bar',
    describe: 'how the synthetic backend reports its steps',
  },
  'latent-shape': {
    type: 'string',
    default: '4,8,8',
    describe: 'synthetic latent geometry as C,H,W',
  },
}

export interface BackendFlags {
  backend?: string
  model?: string
  scheduler: string
  latentShape: string
}

function parseLatentShape(text: string): [number, number, number] {
  const match = /^(\d+),(\d+),(\d+)$/.exec(text.trim())
  if (!match) {
    throw new ValidationError(
      `--latent-shape must be three comma-separated sizes, got ${text!}`,
    )
  }
  const dims = [match[1], match[2], match[3]].map((part) =>
    Number.parseInt(part!, 10),
  )
  if (dims.some((d) => d < 1)) {
    throw new ValidationError(`--latent-shape sizes must be positive, got ${text}`)
  }
  return dims as [number, number, number]
}

/** Build the backend the flags ask for. */
export async function backendFromFlags(
  flags: BackendFlags,
): Promise<PipelineBackend> {
  const chosen = flags.backend ?? (flags.model !== undefined ? 'pretrained' : 'synthetic')
  if (chosen === 'pretrained') {
    if (flags.model === undefined) {
      throw new ValidationError('--model is required with the pretrained backend')
    }
    return loadPretrainedBackend(flags.model)
  }
  return new SyntheticDiffusionBackend({
    scheduler: flags.scheduler as SyntheticScheduler,
    latentShape: parseLatentShape(flags.latentShape),
  })
}

/**
 * Parse argv, mapping every parser failure (missing or unknown flags,
 * bad choices) onto ValidationError so it exits with the usage code.
 */
export async function parseArgs<T>(parser: {
  parseAsync: () => Promise<T>
}): Promise<T> {
  try {
    return await parser.parseAsync()
  } catch (error) {
    const message = error instanceof Error ? error.message : String(error)
    throw new ValidationError(message)
  }
}

function exitCodeFor(error: unknown): number {
  if (error instanceof ValidationError || error instanceof FormatError) {
    return 2
  }
  if (
    error instanceof SetupError ||
    error instanceof UnsupportedSchedulerError
  ) {
    return 1
  }
  return 1
}

/** Run a CLI body, mapping failures to stderr text and exit codes. */
export async function runCli(main: () => Promise<void>): Promise<void> {
  try {
    await main()
  } catch (error) {
    const message = error instanceof Error ? error.message : String(error)
    console.error(`error: ${message}`)
    process.exitCode = exitCodeFor(error)
  }
}
