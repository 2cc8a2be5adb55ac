/**
 * Deterministic stand-in for a real denoising pipeline.
 *
 * The backend fabricates a plausible denoising run: a fixed "clean"
 * latent per (prompt, seed), noisy step samples along a standard
 * signal-retention schedule, and per-step predicted originals that
 * wander early and converge onto the clean latent, with all of the
 * change front-loaded the way real runs behave.  Every value derives
 * from a seeded generator, so two runs with the same inputs produce
 * identical trajectories byte for byte — which is what the capture
 * tests and the downstream painting engine need.
 *
 * The `scheduler` option selects how each step reports itself:
 * coefficient families (`alpha-bar`, `sigma`, `v`, `sample`), the
 * `exposed` path (the step carries the predicted original directly),
 * or `opaque` (neither internals nor coefficients — the unsupported
 * case).
 */

import { ValidationError } from './errors.js'
import type {
  DecodedImage,
  DenoiseStep,
  PipelineBackend,
  RunOptions,
} from './backend.js'
import type { StepCoefficients } from './predicted-original.js'

export type SyntheticScheduler =
  | 'alpha-bar'
  | 'sigma'
  | 'v'
  | 'sample'
  | 'exposed'
  | 'opaque'

export interface SyntheticBackendOptions {
  scheduler?: SyntheticScheduler
  /** Latent geometry as [channels, height, width]; default [4, 8, 8]. */
  latentShape?: readonly [number, number, number]
  /** Resolution of the signal-retention schedule; default 1000. */
  trainingSteps?: number
  /** How far early predictions wander from the clean latent; default 0.9. */
  wanderAmplitude?: number
}

// --- seeded number streams ------------------------------------------------

function fnv1a(text: string): number {
  let hash = 0x811c9dc5
  for (let i = 0; i < text.length; i += 1) {
    hash ^= text.charCodeAt(i)
    hash = Math.imul(hash, 0x01000193)
  }
  return hash >>> 0
}

function mix32(a: number, b: number): number {
  let h = (a ^ Math.imul(b, 0x9e3779b1)) >>> 0
  h = Math.imul(h ^ (h >>> 16), 0x85ebca6b) >>> 0
  h = Math.imul(h ^ (h >>> 13), 0xc2b2ae35) >>> 0
  return (h ^ (h >>> 16)) >>> 0
}

/** mulberry32: small, fast, deterministic uniform generator. */
function uniformStream(seed: number): () => number {
  let state = seed >>> 0
  return () => {
    state = (state + 0x6d2b79f5) >>> 0
    let t = state
    t = Math.imul(t ^ (t >>> 15), t | 1)
    t ^= t + Math.imul(t ^ (t >>> 7), t | 61)
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296
  }
}

function normalField(seed: number, count: number): Float64Array {
  const next = uniformStream(seed)
  const out = new Float64Array(count)
  for (let i = 0; i < count; i += 2) {
    const u1 = next()
    const u2 = next()
    const radius = Math.sqrt(-2 * Math.log(1 - u1))
    out[i] = radius * Math.cos(2 * Math.PI * u2)
    if (i + 1 < count) {
      out[i + 1] = radius * Math.sin(2 * Math.PI * u2)
    }
  }
  return out
}

// --- field shaping --------------------------------------------------------

/** One 3x3 box-blur pass per channel, clamped at the borders. */
function blurChannels(
  field: Float64Array,
  channels: number,
  height: number,
  width: number,
): Float64Array {
  const out = new Float64Array(field.length)
  for (let c = 0; c < channels; c += 1) {
    const base = c * height * width
    for (let y = 0; y < height; y += 1) {
      for (let x = 0; x < width; x += 1) {
        let sum = 0
        let n = 0
        for (let dy = -1; dy <= 1; dy += 1) {
          const yy = y + dy
          if (yy < 0 || yy >= height) continue
          for (let dx = -1; dx <= 1; dx += 1) {
            const xx = x + dx
            if (xx < 0 || xx >= width) continue
            sum += field[base + yy * width + xx]!
            n += 1
          }
        }
        out[base + y * width + x] = sum / n
      }
    }
  }
  return out
}

function structuredField(
  seed: number,
  channels: number,
  height: number,
  width: number,
): Float64Array {
  let field = normalField(seed, channels * height * width)
  field = blurChannels(field, channels, height, width)
  field = blurChannels(field, channels, height, width)
  // Blurring shrinks the variance; rescale so the field keeps unit-ish
  // contrast.
  for (let i = 0; i < field.length; i += 1) {
    field[i]! *= 2.0
  }
  return field
}

// --- the backend ----------------------------------------------------------

export class SyntheticDiffusionBackend implements PipelineBackend {
  readonly name: string
  readonly latentShape: readonly [number, number, number]
  readonly scheduler: SyntheticScheduler

  private readonly trainingSteps: number
  private readonly wanderAmplitude: number
  private readonly alphaBar: Float64Array

  constructor(options: SyntheticBackendOptions = {}) {
    this.scheduler = options.scheduler ?? 'alpha-bar'
    this.latentShape = options.latentShape ?? [4, 8, 8]
    this.trainingSteps = options.trainingSteps ?? 1000
    this.wanderAmplitude = options.wanderAmplitude ?? 0.9
    this.name = `synthetic-${this.scheduler}`
    if (this.latentShape.length !== 3 || this.latentShape.some((d) => d < 1)) {
      throw new ValidationError(
        `latentShape must be three positive sizes, got ${this.latentShape}`,
      )
    }
    if (this.trainingSteps < 2) {
      throw new ValidationError('trainingSteps must be at least 2')
    }
    // Standard linear-beta schedule; alphaBar[t] is the cumulative
    // signal retention after t training steps.
    const betas = new Float64Array(this.trainingSteps)
    for (let j = 0; j < this.trainingSteps; j += 1) {
      betas[j] = 1e-4 + ((0.02 - 1e-4) * j) / (this.trainingSteps - 1)
    }
    this.alphaBar = new Float64Array(this.trainingSteps)
    let product = 1
    for (let j = 0; j < this.trainingSteps; j += 1) {
      product *= 1 - betas[j]!
      this.alphaBar[j] = product
    }
  }

  private elementCount(): number {
    const [c, h, w] = this.latentShape
    return c * h * w
  }

  /** The clean latent this (prompt, seed) pair converges onto. */
  cleanLatent(prompt: string, seed: number): Float32Array {
    const base = mix32(seed >>> 0, fnv1a(prompt))
    const [c, h, w] = this.latentShape
    return Float32Array.from(structuredField(mix32(base, 1), c, h, w))
  }

  run(options: RunOptions): void {
    const { prompt, steps, seed, onStep } = options
    if (!Number.isInteger(steps) || steps < 1) {
      throw new ValidationError(`steps must be a positive integer, got ${steps}`)
    }
    if (!Number.isInteger(seed) || seed < 0) {
      throw new ValidationError(`seed must be a non-negative integer, got ${seed}`)
    }
    const [c, h, w] = this.latentShape
    const count = this.elementCount()
    const base = mix32(seed >>> 0, fnv1a(prompt))
    const clean = structuredField(mix32(base, 1), c, h, w)

    for (let i = 0; i < steps; i += 1) {
      const fraction = steps > 1 ? i / (steps - 1) : 1
      const timestep = Math.round((this.trainingSteps - 1) * (1 - fraction))
      const alphaBar = this.alphaBar[timestep]!
      const signal = Math.sqrt(alphaBar)
      const noise = Math.sqrt(1 - alphaBar)

      // Predicted original: the clean latent plus a wander term that
      // decays quadratically to exactly zero at the final step.
      const decay = this.wanderAmplitude * (1 - fraction) * (1 - fraction)
      const wander = structuredField(mix32(base, 1000 + i), c, h, w)
      const predicted = new Float32Array(count)
      for (let k = 0; k < count; k += 1) {
        predicted[k] = clean[k]! + decay * wander[k]!
      }

      const eps = normalField(mix32(base, 2000 + i), count)
      const step = this.buildStep(i, timestep, signal, noise, predicted, eps)
      onStep(step)
    }
  }

  private buildStep(
    stepIndex: number,
    timestep: number,
    signal: number,
    noise: number,
    predicted: Float32Array,
    eps: Float64Array,
  ): DenoiseStep {
    const count = predicted.length
    const sample = new Float32Array(count)
    const modelOutput = new Float32Array(count)
    const alphaBar = signal * signal
    let coefficients: StepCoefficients | undefined
    switch (this.scheduler) {
      case 'sigma': {
        // Noise-magnitude parameterization: x = x0 + sigma * eps.
        const sigmaHat = noise / signal
        for (let k = 0; k < count; k += 1) {
          sample[k] = predicted[k]! + sigmaHat * eps[k]!
        }
        for (let k = 0; k < count; k += 1) {
          modelOutput[k] = (sample[k]! - predicted[k]!) / sigmaHat
        }
        coefficients = { family: 'sigma', sigmaHat }
        break
      }
      case 'v': {
        for (let k = 0; k < count; k += 1) {
          sample[k] = signal * predicted[k]! + noise * eps[k]!
        }
        for (let k = 0; k < count; k += 1) {
          modelOutput[k] = (signal * sample[k]! - predicted[k]!) / noise
        }
        coefficients = { family: 'alpha-bar', alphaBar, prediction: 'v' }
        break
      }
      case 'sample': {
        for (let k = 0; k < count; k += 1) {
          sample[k] = signal * predicted[k]! + noise * eps[k]!
        }
        modelOutput.set(predicted)
        coefficients = { family: 'alpha-bar', alphaBar, prediction: 'sample' }
        break
      }
      default: {
        // alpha-bar, exposed, opaque: epsilon-style model output.
        for (let k = 0; k < count; k += 1) {
          sample[k] = signal * predicted[k]! + noise * eps[k]!
        }
        for (let k = 0; k < count; k += 1) {
          modelOutput[k] = (sample[k]! - signal * predicted[k]!) / noise
        }
        if (this.scheduler === 'alpha-bar') {
          coefficients = { family: 'alpha-bar', alphaBar, prediction: 'epsilon' }
        }
        break
      }
    }
    const step: DenoiseStep = { stepIndex, timestep, sample, modelOutput }
    if (coefficients !== undefined) {
      step.coefficients = coefficients
    }
    if (this.scheduler === 'exposed') {
      step.predictedOriginal = predicted
    }
    return step
  }

  /**
   * Stateless latent decoder: a fixed channel mix squashed to [-1, 1],
   * upsampled 8x to pixels.  Identical latents decode to identical
   * images, which is what ties painted frames back to the trajectory.
   */
  decode(latent: Float32Array): DecodedImage {
    const [c, h, w] = this.latentShape
    if (latent.length !== c * h * w) {
      throw new ValidationError(
        `latent has ${latent.length} values, backend expects ${c * h * w}`,
      )
    }
    const scale = 8
    const width = w * scale
    const height = h * scale
    const rgb = new Float32Array(width * height * 3)
    const norm = 0.9 / Math.sqrt(c)
    for (let y = 0; y < height; y += 1) {
      const sy = Math.floor(y / scale)
      for (let x = 0; x < width; x += 1) {
        const sx = Math.floor(x / scale)
        const pixel = (y * width + x) * 3
        for (let r = 0; r < 3; r += 1) {
          let acc = 0.1 * Math.sin(r + 1)
          for (let ch = 0; ch < c; ch += 1) {
            const weight = Math.cos(0.7 + 1.3 * r + 2.1 * ch) * norm
            acc += weight * latent[(ch * h + sy) * w + sx]!
          }
          rgb[pixel + r] = Math.tanh(acc)
        }
      }
    }
    return { width, height, rgb }
  }
}
