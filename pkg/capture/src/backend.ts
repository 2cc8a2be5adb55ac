/**
 * Integration point between the capture adapter and a denoising
 * pipeline.
 *
 * A backend owns the model, the scheduler, and the latent decoder; the
 * adapter only observes each denoising step through `onStep` and turns
 * final latents into pixels through `decode`.  This package ships a
 * deterministic synthetic backend for tests and demos; hooking up a
 * real ONNX checkpoint means implementing this interface around an
 * existing pipeline (see the README) and passing it to the capture and
 * decode entry points.
 */

import { existsSync, statSync } from 'node:fs'
import { join } from 'node:path'

import { SetupError } from './errors.js'
import type { StepCoefficients } from './predicted-original.js'

/** One observed denoising step. */
export interface DenoiseStep {
  /** 0-based position in the denoising loop. */
  stepIndex: number
  /** Scheduler timestep the step ran at. */
  timestep: number
  /** Latent entering the step, flattened C*H*W, row-major. */
  sample: Float32Array
  /** Raw network output for the step, same layout as `sample`. */
  modelOutput: Float32Array
  /**
   * Predicted original latent when the scheduler exposes it as an
   * internal; preferred over recomputation when present.
   */
  predictedOriginal?: Float32Array
  /**
   * Signal/noise coefficients for this step when the scheduler reports
   * them; used to compute the predicted original when it is not
   * exposed directly.
   */
  coefficients?: StepCoefficients
}

export interface RunOptions {
  prompt: string
  steps: number
  seed: number
  onStep: (step: DenoiseStep) => void
}

/** Decoded RGB image, values in [-1, 1], pixel-major RGB triples. */
export interface DecodedImage {
  width: number
  height: number
  rgb: Float32Array
}

export interface PipelineBackend {
  readonly name: string
  /** Latent geometry as [channels, height, width]. */
  readonly latentShape: readonly [number, number, number]
  /** Run the denoising loop, reporting every step in order. */
  run(options: RunOptions): void | Promise<void>
  /** Decode one latent (flattened C*H*W) to RGB; must be stateless. */
  decode(latent: Float32Array): DecodedImage
}

const CHECKPOINT_FILES = [
  join('unet', 'model.onnx'),
  join('text_encoder', 'model.onnx'),
  join('vae_decoder', 'model.onnx'),
]

/**
 * Load a converted ONNX checkpoint as a pipeline backend.
 *
 * Validates the checkpoint layout and the inference runtime before
 * anything else, so misconfiguration surfaces as a SetupError with a
 * concrete remedy rather than a deep stack trace.  Model execution
 * requires the optional `onnxruntime-node` runtime and a directory
 * containing `unet/model.onnx`, `text_encoder/model.onnx`, and
 * `vae_decoder/model.onnx`.
 */
export async function loadPretrainedBackend(
  modelPath: string,
): Promise<PipelineBackend> {
  if (!existsSync(modelPath) || !statSync(modelPath).isDirectory()) {
    throw new SetupError(
      `checkpoint directory not found: ${modelPath} ` +
        '(pass --model pointing at a converted ONNX checkpoint)',
    )
  }
  const missing = CHECKPOINT_FILES.filter(
    (name) => !existsSync(join(modelPath, name)),
  )
  if (missing.length > 0) {
    throw new SetupError(
      `checkpoint at ${modelPath} is missing ${missing.join(', ')}`,
    )
  }
  let runtime: unknown
  try {
    runtime = await import('onnxruntime-node' as string)
  } catch {
    throw new SetupError(
      'the onnxruntime-node runtime is not installed; ' +
        'install it to run pretrained checkpoints, or use the synthetic backend',
    )
  }
  return createOnnxBackend(modelPath, runtime)
}

function createOnnxBackend(modelPath: string, _runtime: unknown): PipelineBackend {
  // Wiring a concrete ONNX pipeline (text encode, scheduler loop, VAE)
  // is host-specific and out of scope here; integrators implement
  // PipelineBackend around their pipeline of choice and feed it to the
  // capture and decode entry points directly.
  throw new SetupError(
    `no ONNX pipeline is bundled for ${modelPath}; ` +
      'implement PipelineBackend around your pipeline and pass it to ' +
      'captureTrajectory / decodeFrames',
  )
}
