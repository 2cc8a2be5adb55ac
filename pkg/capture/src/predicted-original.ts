/**
 * Recover the denoiser's predicted original sample (the "x-hat-zero"
 * estimate of the clean latent) from one step's inputs, using the
 * signal/noise coefficients the scheduler family reports.
 *
 * Two coefficient families cover the common scheduler zoo:
 *
 * - `sigma`: noise-magnitude parameterization (Euler / Heun / DPM
 *   solvers).  The step's latent is `x = x0 + sigmaHat * eps`, the
 *   model output is the noise estimate, so
 *   `x0 = sample - sigmaHat * modelOutput`.
 *
 * - `alpha-bar`: cumulative signal-retention parameterization
 *   (DDPM / DDIM lineage), with the model output's meaning given by
 *   `prediction`:
 *     - `epsilon`: `x0 = (sample - sqrt(1 - alphaBar) * out) / sqrt(alphaBar)`
 *     - `v`:       `x0 = sqrt(alphaBar) * sample - sqrt(1 - alphaBar) * out`
 *     - `sample`:  the model already outputs `x0` directly.
 *
 * Arithmetic runs in double precision and rounds once to float32 on
 * store, so results are reproducible across runs and platforms.
 */

import { ValidationError } from './errors.js'

export type StepCoefficients =
  | { family: 'sigma'; sigmaHat: number }
  | {
      family: 'alpha-bar'
      alphaBar: number
      prediction: 'epsilon' | 'v' | 'sample'
    }

function checkLengths(sample: Float32Array, modelOutput: Float32Array): void {
  if (sample.length !== modelOutput.length) {
    throw new ValidationError(
      `sample has ${sample.length} values but model output has ${modelOutput.length}`,
    )
  }
  if (sample.length === 0) {
    throw new ValidationError('empty latent')
  }
}

/** Compute the predicted original latent for one denoising step. */
export function predictedOriginal(
  sample: Float32Array,
  modelOutput: Float32Array,
  coefficients: StepCoefficients,
): Float32Array {
  checkLengths(sample, modelOutput)
  const out = new Float32Array(sample.length)
  if (coefficients.family === 'sigma') {
    const sigmaHat = coefficients.sigmaHat
    if (!Number.isFinite(sigmaHat) || sigmaHat < 0) {
      throw new ValidationError(`sigmaHat must be finite and >= 0, got ${sigmaHat}`)
    }
    for (let i = 0; i < sample.length; i += 1) {
      out[i] = sample[i]! - sigmaHat * modelOutput[i]!
    }
    return out
  }
  const alphaBar = coefficients.alphaBar
  if (!Number.isFinite(alphaBar) || alphaBar <= 0 || alphaBar > 1) {
    throw new ValidationError(
      `alphaBar must be finite and in (0, 1], got ${alphaBar}`,
    )
  }
  const signal = Math.sqrt(alphaBar)
  const noise = Math.sqrt(1 - alphaBar)
  switch (coefficients.prediction) {
    case 'epsilon':
      for (let i = 0; i < sample.length; i += 1) {
        out[i] = (sample[i]! - noise * modelOutput[i]!) / signal
      }
      return out
    case 'v':
      for (let i = 0; i < sample.length; i += 1) {
        out[i] = signal * sample[i]! - noise * modelOutput[i]!
      }
      return out
    case 'sample':
      out.set(modelOutput)
      return out
    default: {
      const never: never = coefficients.prediction
      throw new ValidationError(`unknown prediction kind ${String(never)}`)
    }
  }
}
