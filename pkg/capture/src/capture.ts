/**
 * Record a denoising run's predicted-original trajectory to an NPY
 * tensor.
 *
 * The capture hook observes every step the backend reports.  For each
 * step it takes the predicted original the scheduler exposes, or —
 * when only the raw network output is available — computes it from the
 * step's signal/noise coefficients.  A backend that provides neither
 * cannot be captured and raises UnsupportedSchedulerError.
 *
 * The result is a (T, C, H, W) float32 tensor, one snapshot per step
 * in loop order, written with the strict NPY writer so downstream
 * tools can consume it directly.
 */

import { UnsupportedSchedulerError, ValidationError } from './errors.js'
import type { DenoiseStep, PipelineBackend } from './backend.js'
import { predictedOriginal } from './predicted-original.js'
import { writeNpy } from './npy.js'

export interface CaptureOptions {
  prompt: string
  steps: number
  seed: number
  /** Destination NPY path. */
  outPath: string
}

export interface CaptureResult {
  /** Snapshot tensor shape, [T, C, H, W]. */
  shape: [number, number, number, number]
  outPath: string
}

function snapshotFromStep(
  step: DenoiseStep,
  backendName: string,
  expected: number,
): Float32Array {
  let snapshot: Float32Array
  if (step.predictedOriginal !== undefined) {
    snapshot = step.predictedOriginal
  } else if (step.coefficients !== undefined) {
    snapshot = predictedOriginal(step.sample, step.modelOutput, step.coefficients)
  } else {
    throw new UnsupportedSchedulerError(
      `backend ${backendName} exposes neither the predicted original nor ` +
        'signal/noise coefficients; its scheduler cannot be captured',
    )
  }
  if (snapshot.length !== expected) {
    throw new ValidationError(
      `step ${step.stepIndex} produced ${snapshot.length} values, ` +
        `latent shape wants ${expected}`,
    )
  }
  return snapshot
}

/** Run the backend once and write its predicted-original trajectory. */
export async function captureTrajectory(
  backend: PipelineBackend,
  options: CaptureOptions,
): Promise<CaptureResult> {
  const { prompt, steps, seed, outPath } = options
  if (!Number.isInteger(steps) || steps < 1) {
    throw new ValidationError(`steps must be a positive integer, got ${steps}`)
  }
  const [c, h, w] = backend.latentShape
  const count = c * h * w
  const snapshots: Float32Array[] = []
  await backend.run({
    prompt,
    steps,
    seed,
    onStep: (step) => {
      if (step.stepIndex !== snapshots.length) {
        throw new ValidationError(
          `backend reported step ${step.stepIndex} out of order ` +
            `(expected ${snapshots.length})`,
        )
      }
      // Copy so later scheduler mutations cannot reach recorded state.
      snapshots.push(snapshotFromStep(step, backend.name, count).slice())
    },
  })
  if (snapshots.length !== steps) {
    throw new ValidationError(
      `backend reported ${snapshots.length} steps, expected ${steps}`,
    )
  }
  const data = new Float32Array(steps * count)
  snapshots.forEach((snapshot, index) => {
    data.set(snapshot, index * count)
  })
  writeNpy(outPath, { shape: [steps, c, h, w], data })
  return { shape: [steps, c, h, w], outPath }
}
