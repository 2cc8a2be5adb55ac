/**
 * Turn a captured or painted latent tensor into viewable pixels.
 *
 * Input is an (F, C, H, W) float32 NPY whose per-frame geometry must
 * match the backend's latent shape.  Each frame decodes independently
 * through the backend — decoding is stateless, so the same latent
 * always yields the same image.  Output is a directory of numbered
 * PNGs, or a video file when the destination ends in `.mp4` (which
 * needs an ffmpeg binary on PATH).
 */

import { spawnSync } from 'node:child_process'
import { mkdirSync, mkdtempSync, rmSync, writeFileSync } from 'node:fs'
import { tmpdir } from 'node:os'
import { join } from 'node:path'

import { SetupError, ValidationError } from './errors.js'
import type { PipelineBackend } from './backend.js'
import { readNpy } from './npy.js'
import { encodePng, rgbBytesFromFloats } from './png.js'

export interface DecodeOptions {
  /** Path of the (F, C, H, W) float32 NPY to decode. */
  framesPath: string
  /** Output directory for PNGs, or an `.mp4` path for video. */
  out: string
  /** Video frame rate; PNG-only output ignores it. Default 12. */
  fps?: number
}

export interface DecodeResult {
  frames: number
  /** Written PNG paths, or the single video path. */
  files: string[]
}

function frameName(index: number): string {
  return `frame_${String(index).padStart(5, '0')}.png`
}

function decodeToPngs(
  backend: PipelineBackend,
  tensor: { shape: number[]; data: Float32Array },
  directory: string,
): string[] {
  const [frames, , ,] = tensor.shape as [number, number, number, number]
  const count = tensor.data.length / frames
  const files: string[] = []
  for (let f = 0; f < frames; f += 1) {
    const latent = tensor.data.subarray(f * count, (f + 1) * count)
    const image = backend.decode(latent)
    const png = encodePng(image.width, image.height, rgbBytesFromFloats(image.rgb))
    const path = join(directory, frameName(f))
    writeFileSync(path, png)
    files.push(path)
  }
  return files
}

/** Decode every frame of a latent tensor to PNGs or an MP4 video. */
export async function decodeFrames(
  backend: PipelineBackend,
  options: DecodeOptions,
): Promise<DecodeResult> {
  const tensor = readNpy(options.framesPath)
  if (tensor.shape.length !== 4) {
    throw new ValidationError(
      `${options.framesPath}: frames must be 4-dimensional, got shape (${tensor.shape.join(', ')})`,
    )
  }
  const [frames, c, h, w] = tensor.shape as [number, number, number, number]
  if (frames < 1) {
    throw new ValidationError(`${options.framesPath}: no frames to decode`)
  }
  const [bc, bh, bw] = backend.latentShape
  if (c !== bc || h !== bh || w !== bw) {
    throw new ValidationError(
      `${options.framesPath}: frame shape (${c}, ${h}, ${w}) does not match ` +
        `backend latent shape (${bc}, ${bh}, ${bw})`,
    )
  }
  const fps = options.fps ?? 12
  if (!Number.isInteger(fps) || fps < 1) {
    throw new ValidationError(`fps must be a positive integer, got ${fps}`)
  }

  if (options.out.endsWith('.mp4')) {
    const probe = spawnSync('ffmpeg', ['-version'], { stdio: 'ignore' })
    if (probe.error !== undefined || probe.status !== 0) {
      throw new SetupError(
        'video output needs an ffmpeg binary on PATH; ' +
          'decode to a PNG directory instead, or install ffmpeg',
      )
    }
    const staging = mkdtempSync(join(tmpdir(), 'lp-decode-'))
    try {
      decodeToPngs(backend, tensor, staging)
      const encode = spawnSync(
        'ffmpeg',
        [
          '-y',
          '-framerate',
          String(fps),
          '-i',
          join(staging, 'frame_%05d.png'),
          '-pix_fmt',
          'yuv420p',
          options.out,
        ],
        { stdio: 'ignore' },
      )
      if (encode.error !== undefined || encode.status !== 0) {
        throw new SetupError(`ffmpeg failed to encode ${options.out}`)
      }
    } finally {
      rmSync(staging, { recursive: true, force: true })
    }
    return { frames, files: [options.out] }
  }

  mkdirSync(options.out, { recursive: true })
  const files = decodeToPngs(backend, tensor, options.out)
  return { frames, files }
}
