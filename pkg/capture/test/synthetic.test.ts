import { describe, expect, it } from 'vitest'

import type { DenoiseStep } from '../src/backend.js'
import { ValidationError } from '../src/errors.js'
import { predictedOriginal } from '../src/predicted-original.js'
import { SyntheticDiffusionBackend } from '../src/synthetic.js'
import type { SyntheticScheduler } from '../src/synthetic.js'

function collectSteps(
  backend: SyntheticDiffusionBackend,
  prompt: string,
  steps: number,
  seed: number,
): DenoiseStep[] {
  const out: DenoiseStep[] = []
  backend.run({ prompt, steps, seed, onStep: (step) => out.push(step) })
  return out
}

function recoveredOriginal(step: DenoiseStep): Float32Array {
  if (step.predictedOriginal !== undefined) return step.predictedOriginal
  return predictedOriginal(step.sample, step.modelOutput, step.coefficients!)
}

describe('determinism', () => {
  it('replays identically for the same prompt, steps, and seed', () => {
    const a = collectSteps(new SyntheticDiffusionBackend(), 'reef', 5, 3)
    const b = collectSteps(new SyntheticDiffusionBackend(), 'reef', 5, 3)
    expect(a.length).toBe(5)
    for (let i = 0; i < a.length; i += 1) {
      expect(a[i]!.timestep).toBe(b[i]!.timestep)
      expect(a[i]!.sample).toEqual(b[i]!.sample)
      expect(a[i]!.modelOutput).toEqual(b[i]!.modelOutput)
    }
  })

  it('varies with the seed and with the prompt', () => {
    const base = collectSteps(new SyntheticDiffusionBackend(), 'reef', 3, 3)
    const otherSeed = collectSteps(new SyntheticDiffusionBackend(), 'reef', 3, 4)
    const otherPrompt = collectSteps(new SyntheticDiffusionBackend(), 'dune', 3, 3)
    expect(base[0]!.sample).not.toEqual(otherSeed[0]!.sample)
    expect(base[0]!.sample).not.toEqual(otherPrompt[0]!.sample)
  })
})

describe('trajectory structure', () => {
  it('reports steps in order with descending timesteps', () => {
    const steps = collectSteps(new SyntheticDiffusionBackend(), 'reef', 6, 1)
    expect(steps.map((s) => s.stepIndex)).toEqual([0, 1, 2, 3, 4, 5])
    for (let i = 1; i < steps.length; i += 1) {
      expect(steps[i]!.timestep).toBeLessThan(steps[i - 1]!.timestep)
    }
  })

  it('converges onto the clean latent, front-loading the change', () => {
    const backend = new SyntheticDiffusionBackend()
    const clean = backend.cleanLatent('reef', 9)
    const steps = collectSteps(backend, 'reef', 6, 9)
    const gaps = steps.map((step) => {
      const predicted = recoveredOriginal(step)
      let gap = 0
      for (let i = 0; i < predicted.length; i += 1) {
        gap += Math.abs(predicted[i]! - clean[i]!)
      }
      return gap / predicted.length
    })
    // Early steps wander, later ones settle, the last lands on target.
    expect(gaps[0]!).toBeGreaterThan(0.1)
    expect(gaps[gaps.length - 1]!).toBeLessThan(1e-5)
    const firstDrop = gaps[0]! - gaps[1]!
    const lastDrop = gaps[gaps.length - 2]! - gaps[gaps.length - 1]!
    expect(firstDrop).toBeGreaterThan(lastDrop)
  })

  it('lands on the same final latent regardless of step count', () => {
    const backend = new SyntheticDiffusionBackend({ scheduler: 'exposed' })
    const short = collectSteps(backend, 'reef', 1, 9)
    const long = collectSteps(backend, 'reef', 7, 9)
    expect(short[0]!.predictedOriginal).toEqual(
      long[6]!.predictedOriginal,
    )
    expect(short[0]!.predictedOriginal).toEqual(backend.cleanLatent('reef', 9))
  })
})

describe('scheduler reporting styles', () => {
  const families: SyntheticScheduler[] = ['alpha-bar', 'sigma', 'v', 'sample']

  it.each(families.map((f) => [f]))(
    '%s steps carry coefficients that recover the same original',
    (family) => {
      const exposed = new SyntheticDiffusionBackend({ scheduler: 'exposed' })
      const coefficient = new SyntheticDiffusionBackend({ scheduler: family })
      const reference = collectSteps(exposed, 'reef', 4, 21)
      const steps = collectSteps(coefficient, 'reef', 4, 21)
      for (let i = 0; i < steps.length; i += 1) {
        expect(steps[i]!.predictedOriginal).toBeUndefined()
        expect(steps[i]!.coefficients).toBeDefined()
        const recovered = recoveredOriginal(steps[i]!)
        const expected = reference[i]!.predictedOriginal!
        for (let k = 0; k < recovered.length; k += 1) {
          expect(Math.abs(recovered[k]! - expected[k]!)).toBeLessThan(1e-3)
        }
      }
    },
  )

  it('the opaque style reports neither internals nor coefficients', () => {
    const steps = collectSteps(
      new SyntheticDiffusionBackend({ scheduler: 'opaque' }),
      'reef',
      2,
      1,
    )
    for (const step of steps) {
      expect(step.predictedOriginal).toBeUndefined()
      expect(step.coefficients).toBeUndefined()
      expect(step.modelOutput.length).toBe(step.sample.length)
    }
  })
})

describe('latent decoding', () => {
  it('is stateless: identical latents give identical pixels', () => {
    const backend = new SyntheticDiffusionBackend()
    const latent = backend.cleanLatent('reef', 2)
    const first = backend.decode(latent)
    backend.decode(backend.cleanLatent('dune', 5)) // unrelated call between
    const second = backend.decode(latent)
    expect(second.rgb).toEqual(first.rgb)
    expect(second.width).toBe(first.width)
  })

  it('upsamples 8x and stays within [-1, 1]', () => {
    const backend = new SyntheticDiffusionBackend({ latentShape: [4, 6, 5] })
    const image = backend.decode(new Float32Array(4 * 6 * 5).fill(0.7))
    expect(image.width).toBe(40)
    expect(image.height).toBe(48)
    expect(image.rgb.length).toBe(40 * 48 * 3)
    for (const value of image.rgb) {
      expect(value).toBeGreaterThanOrEqual(-1)
      expect(value).toBeLessThanOrEqual(1)
    }
  })

  it('rejects latents of the wrong size', () => {
    const backend = new SyntheticDiffusionBackend()
    expect(() => backend.decode(new Float32Array(7))).toThrow(ValidationError)
  })
})

describe('run validation', () => {
  it('rejects non-positive step counts and negative seeds', () => {
    const backend = new SyntheticDiffusionBackend()
    const sink = () => undefined
    expect(() =>
      backend.run({ prompt: 'x', steps: 0, seed: 1, onStep: sink }),
    ).toThrow(ValidationError)
    expect(() =>
      backend.run({ prompt: 'x', steps: 2.5, seed: 1, onStep: sink }),
    ).toThrow(ValidationError)
    expect(() =>
      backend.run({ prompt: 'x', steps: 2, seed: -1, onStep: sink }),
    ).toThrow(ValidationError)
  })

  it('rejects degenerate construction options', () => {
    expect(() => new SyntheticDiffusionBackend({ latentShape: [0, 4, 4] })).toThrow(
      ValidationError,
    )
    expect(() => new SyntheticDiffusionBackend({ trainingSteps: 1 })).toThrow(
      ValidationError,
    )
  })
})
