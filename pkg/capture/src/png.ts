/**
 * Minimal 8-bit RGB PNG encoder: IHDR + one zlib-deflated IDAT of
 * filter-0 scanlines + IEND.  Deterministic for identical input, which
 * lets callers compare decoded frames byte for byte.
 */

import { deflateSync } from 'node:zlib'

import { ValidationError } from './errors.js'

const SIGNATURE = Buffer.from([0x89, 0x50, 0x4e, 0x47, 0x0d, 0x0a, 0x1a, 0x0a])

const CRC_TABLE = (() => {
  const table = new Uint32Array(256)
  for (let n = 0; n < 256; n += 1) {
    let c = n
    for (let k = 0; k < 8; k += 1) {
      c = c & 1 ? 0xedb88320 ^ (c >>> 1) : c >>> 1
    }
    table[n] = c >>> 0
  }
  return table
})()

function crc32(data: Buffer): number {
  let crc = 0xffffffff
  for (let i = 0; i < data.length; i += 1) {
    crc = CRC_TABLE[(crc ^ data[i]!) & 0xff]! ^ (crc >>> 8)
  }
  return (crc ^ 0xffffffff) >>> 0
}

function chunk(type: string, payload: Buffer): Buffer {
  const head = Buffer.alloc(4)
  head.writeUInt32BE(payload.length, 0)
  const body = Buffer.concat([Buffer.from(type, 'latin1'), payload])
  const tail = Buffer.alloc(4)
  tail.writeUInt32BE(crc32(body), 0)
  return Buffer.concat([head, body, tail])
}

/** Encode pixel-major RGB bytes (length width*height*3) as a PNG. */
export function encodePng(
  width: number,
  height: number,
  rgb: Uint8Array,
): Buffer {
  if (!Number.isInteger(width) || !Number.isInteger(height) || width < 1 || height < 1) {
    throw new ValidationError(`bad image size ${width}x${height}`)
  }
  if (rgb.length !== width * height * 3) {
    throw new ValidationError(
      `pixel payload holds ${rgb.length} bytes, ${width}x${height} RGB wants ${width * height * 3}`,
    )
  }
  const ihdr = Buffer.alloc(13)
  ihdr.writeUInt32BE(width, 0)
  ihdr.writeUInt32BE(height, 4)
  ihdr[8] = 8 // bit depth
  ihdr[9] = 2 // color type: truecolor
  ihdr[10] = 0 // compression
  ihdr[11] = 0 // filter method
  ihdr[12] = 0 // no interlace

  const stride = width * 3
  const raw = Buffer.alloc((stride + 1) * height)
  for (let y = 0; y < height; y += 1) {
    raw[y * (stride + 1)] = 0 // filter type 0 (none)
    raw.set(rgb.subarray(y * stride, (y + 1) * stride), y * (stride + 1) + 1)
  }

  return Buffer.concat([
    SIGNATURE,
    chunk('IHDR', ihdr),
    chunk('IDAT', deflateSync(raw)),
    chunk('IEND', Buffer.alloc(0)),
  ])
}

/** Map decoder output in [-1, 1] to 8-bit channel values. */
export function rgbBytesFromFloats(rgb: Float32Array): Uint8Array {
  const out = new Uint8Array(rgb.length)
  for (let i = 0; i < rgb.length; i += 1) {
    const scaled = Math.round(((rgb[i]! + 1) / 2) * 255)
    out[i] = Math.min(255, Math.max(0, scaled))
  }
  return out
}
