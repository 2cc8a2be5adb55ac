import { inflateSync } from 'node:zlib'

import { describe, expect, it } from 'vitest'

import { ValidationError } from '../src/errors.js'
import { encodePng, rgbBytesFromFloats } from '../src/png.js'

/** Minimal independent PNG reader for filter-0 truecolor images. */
function parsePng(blob: Buffer): {
  width: number
  height: number
  pixels: Uint8Array
} {
  const signature = Buffer.from([0x89, 0x50, 0x4e, 0x47, 0x0d, 0x0a, 0x1a, 0x0a])
  expect(blob.subarray(0, 8).equals(signature)).toBe(true)
  let offset = 8
  let width = 0
  let height = 0
  const idat: Buffer[] = []
  let sawEnd = false
  while (offset < blob.length) {
    const length = blob.readUInt32BE(offset)
    const type = blob.subarray(offset + 4, offset + 8).toString('latin1')
    const payload = blob.subarray(offset + 8, offset + 8 + length)
    const crc = blob.readUInt32BE(offset + 8 + length)
    expect(crc).toBe(crc32Reference(blob.subarray(offset + 4, offset + 8 + length)))
    if (type === 'IHDR') {
      width = payload.readUInt32BE(0)
      height = payload.readUInt32BE(4)
      expect(payload[8]).toBe(8) // bit depth
      expect(payload[9]).toBe(2) // truecolor
      expect(payload[12]).toBe(0) // no interlace
    } else if (type === 'IDAT') {
      idat.push(Buffer.from(payload))
    } else if (type === 'IEND') {
      sawEnd = true
    }
    offset += 12 + length
  }
  expect(sawEnd).toBe(true)
  const raw = inflateSync(Buffer.concat(idat))
  const stride = width * 3
  expect(raw.length).toBe((stride + 1) * height)
  const pixels = new Uint8Array(stride * height)
  for (let y = 0; y < height; y += 1) {
    expect(raw[y * (stride + 1)]).toBe(0) // filter type none
    pixels.set(raw.subarray(y * (stride + 1) + 1, (y + 1) * (stride + 1)), y * stride)
  }
  return { width, height, pixels }
}

function crc32Reference(data: Buffer): number {
  let crc = 0xffffffff
  for (const byte of data) {
    crc ^= byte
    for (let k = 0; k < 8; k += 1) {
      crc = crc & 1 ? 0xedb88320 ^ (crc >>> 1) : crc >>> 1
    }
  }
  return (crc ^ 0xffffffff) >>> 0
}

describe('PNG encoding', () => {
  it('round-trips pixels through an independent decoder', () => {
    const width = 5
    const height = 3
    const pixels = new Uint8Array(width * height * 3)
    for (let i = 0; i < pixels.length; i += 1) {
      pixels[i] = (i * 37 + 11) % 256
    }
    const decoded = parsePng(encodePng(width, height, pixels))
    expect(decoded.width).toBe(width)
    expect(decoded.height).toBe(height)
    expect(decoded.pixels).toEqual(pixels)
  })

  it('is deterministic for identical input', () => {
    const pixels = new Uint8Array(4 * 4 * 3).fill(200)
    expect(encodePng(4, 4, pixels).equals(encodePng(4, 4, pixels))).toBe(true)
  })

  it('rejects bad sizes and payload lengths', () => {
    expect(() => encodePng(0, 4, new Uint8Array(0))).toThrow(ValidationError)
    expect(() => encodePng(2, 2, new Uint8Array(11))).toThrow(/wants 12/)
  })
})

describe('float-to-byte mapping', () => {
  it('maps [-1, 1] onto the full byte range with clamping', () => {
    const bytes = rgbBytesFromFloats(
      Float32Array.from([-1, 0, 1, -1.5, 1.5, 0.5]),
    )
    expect(Array.from(bytes)).toEqual([0, 128, 255, 0, 255, 191])
  })
})
