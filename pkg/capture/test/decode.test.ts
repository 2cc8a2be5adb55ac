import { existsSync, mkdirSync, readFileSync, readdirSync, writeFileSync } from 'node:fs'
import { join } from 'node:path'

import { afterAll, describe, expect, it } from 'vitest'

import { loadPretrainedBackend } from '../src/backend.js'
import { decodeFrames } from '../src/decode.js'
import { SetupError, ValidationError } from '../src/errors.js'
import { writeNpy } from '../src/npy.js'
import { SyntheticDiffusionBackend } from '../src/synthetic.js'
import { FFMPEG_OK, makeTempDir } from './helpers.js'

const temp = makeTempDir()
afterAll(temp.cleanup)

function framesFixture(name: string, frames: number): string {
  const path = join(temp.dir, name)
  const count = 4 * 8 * 8
  const data = new Float32Array(frames * count)
  for (let i = 0; i < data.length; i += 1) {
    data[i] = Math.sin(i * 0.37) * 1.5
  }
  writeNpy(path, { shape: [frames, 4, 8, 8], data })
  return path
}

describe('decoding to PNG frames', () => {
  it('writes one numbered PNG per frame', async () => {
    const backend = new SyntheticDiffusionBackend()
    const outDir = join(temp.dir, 'frames')
    const result = await decodeFrames(backend, {
      framesPath: framesFixture('three.npy', 3),
      out: outDir,
    })
    expect(result.frames).toBe(3)
    expect(result.files.map((f) => f.split('/').pop())).toEqual([
      'frame_00000.png',
      'frame_00001.png',
      'frame_00002.png',
    ])
    expect(readdirSync(outDir).sort()).toEqual([
      'frame_00000.png',
      'frame_00001.png',
      'frame_00002.png',
    ])
    for (const file of result.files) {
      const blob = readFileSync(file)
      expect(blob.subarray(1, 4).toString('latin1')).toBe('PNG')
    }
  })

  it('is stateless: decoding twice writes identical bytes', async () => {
    const backend = new SyntheticDiffusionBackend()
    const framesPath = framesFixture('twice.npy', 2)
    const dirA = join(temp.dir, 'pass-a')
    const dirB = join(temp.dir, 'pass-b')
    await decodeFrames(backend, { framesPath, out: dirA })
    await decodeFrames(backend, { framesPath, out: dirB })
    for (const name of readdirSync(dirA)) {
      expect(
        readFileSync(join(dirA, name)).equals(readFileSync(join(dirB, name))),
      ).toBe(true)
    }
  })

  it('rejects tensors whose geometry disagrees with the backend', async () => {
    const backend = new SyntheticDiffusionBackend() // expects (4, 8, 8)
    const path = join(temp.dir, 'wrong.npy')
    writeNpy(path, { shape: [2, 4, 6, 6], data: new Float32Array(2 * 4 * 36) })
    await expect(
      decodeFrames(backend, { framesPath: path, out: join(temp.dir, 'x') }),
    ).rejects.toThrow(ValidationError)
  })

  it('rejects non-4D tensors and empty stacks', async () => {
    const backend = new SyntheticDiffusionBackend()
    const flat = join(temp.dir, 'flat.npy')
    writeNpy(flat, { shape: [4, 8, 8], data: new Float32Array(256) })
    await expect(
      decodeFrames(backend, { framesPath: flat, out: join(temp.dir, 'y') }),
    ).rejects.toThrow(/4-dimensional/)
    const empty = join(temp.dir, 'empty.npy')
    writeNpy(empty, { shape: [0, 4, 8, 8], data: new Float32Array(0) })
    await expect(
      decodeFrames(backend, { framesPath: empty, out: join(temp.dir, 'z') }),
    ).rejects.toThrow(/no frames/)
  })

  it('rejects bad frame rates', async () => {
    const backend = new SyntheticDiffusionBackend()
    await expect(
      decodeFrames(backend, {
        framesPath: framesFixture('fps.npy', 1),
        out: join(temp.dir, 'f'),
        fps: 0,
      }),
    ).rejects.toThrow(/fps/)
  })
})

describe.skipIf(FFMPEG_OK)('video output without ffmpeg', () => {
  it('reports a setup problem instead of failing deep inside', async () => {
    const backend = new SyntheticDiffusionBackend()
    await expect(
      decodeFrames(backend, {
        framesPath: framesFixture('video.npy', 2),
        out: join(temp.dir, 'movie.mp4'),
      }),
    ).rejects.toThrow(SetupError)
    expect(existsSync(join(temp.dir, 'movie.mp4'))).toBe(false)
  })
})

describe('pretrained checkpoints', () => {
  it('reports a missing checkpoint directory as a setup problem', async () => {
    await expect(
      loadPretrainedBackend(join(temp.dir, 'no-such-model')),
    ).rejects.toThrow(SetupError)
    await expect(
      loadPretrainedBackend(join(temp.dir, 'no-such-model')),
    ).rejects.toThrow(/checkpoint directory not found/)
  })

  it('names the files missing from an incomplete checkpoint', async () => {
    const model = join(temp.dir, 'half-model')
    mkdirSync(join(model, 'unet'), { recursive: true })
    writeFileSync(join(model, 'unet', 'model.onnx'), 'stub')
    await expect(loadPretrainedBackend(model)).rejects.toThrow(
      /text_encoder.*vae_decoder|missing/,
    )
  })

  it('reports a missing inference runtime as a setup problem', async () => {
    const model = join(temp.dir, 'full-model')
    for (const part of ['unet', 'text_encoder', 'vae_decoder']) {
      mkdirSync(join(model, part), { recursive: true })
      writeFileSync(join(model, part, 'model.onnx'), 'stub')
    }
    // onnxruntime-node is not installed in this environment, so the
    // runtime probe is the step that fails.
    await expect(loadPretrainedBackend(model)).rejects.toThrow(
      /onnxruntime-node/,
    )
  })
})
