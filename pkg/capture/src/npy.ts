/**
 * Strict NPY 1.0 codec for little-endian float32 tensors in C order.
 *
 * The writer produces files byte-for-byte the way `numpy.save` writes
 * them (same header text, space padding to a 64-byte boundary, trailing
 * newline), so captured trajectories are drop-in inputs for any NPY
 * consumer.  The reader accepts only that shape of file: NPY version
 * 1.0, dtype `<f4`, C order, payload length exactly matching the
 * header's shape.  Anything else raises FormatError.
 */

import { readFileSync, writeFileSync } from 'node:fs'

import { FormatError, SetupError } from './errors.js'

const MAGIC = Buffer.from('\x93NUMPY', 'latin1')

const hostIsLittleEndian =
  new Uint8Array(new Uint32Array([1]).buffer)[0] === 1

function requireLittleEndianHost(): void {
  if (!hostIsLittleEndian) {
    throw new SetupError('NPY I/O requires a little-endian host')
  }
}

export interface FloatTensor {
  /** Dimension sizes, outermost first. */
  shape: number[]
  /** Row-major (C order) payload, length = product of shape. */
  data: Float32Array
}

function elementCount(shape: readonly number[]): number {
  let n = 1
  for (const dim of shape) {
    if (!Number.isInteger(dim) || dim < 0) {
      throw new FormatError(`bad tensor dimension ${dim}`)
    }
    n *= dim
  }
  return n
}

function headerText(shape: readonly number[]): string {
  const shapeRepr =
    shape.length === 1 ? `(${shape[0]},)` : `(${shape.join(', ')})`
  const body = `{'descr': '<f4', 'fortran_order': False, 'shape': ${shapeRepr}, }`
  // Pad with spaces so magic + version + length + header is a multiple
  // of 64 bytes, terminated by a newline.
  const base = MAGIC.length + 2 + 2 + body.length + 1
  const pad = (64 - (base % 64)) % 64
  return body + ' '.repeat(pad) + '\n'
}

/** Serialize a float32 tensor as an NPY 1.0 buffer. */
export function encodeNpy(tensor: FloatTensor): Buffer {
  requireLittleEndianHost()
  const count = elementCount(tensor.shape)
  if (tensor.data.length !== count) {
    throw new FormatError(
      `payload holds ${tensor.data.length} values, shape wants ${count}`,
    )
  }
  const header = Buffer.from(headerText(tensor.shape), 'latin1')
  const prefix = Buffer.alloc(MAGIC.length + 2 + 2)
  MAGIC.copy(prefix, 0)
  prefix[6] = 1
  prefix[7] = 0
  prefix.writeUInt16LE(header.length, 8)
  const payload = Buffer.from(
    tensor.data.buffer,
    tensor.data.byteOffset,
    tensor.data.byteLength,
  )
  return Buffer.concat([prefix, header, payload])
}

interface ParsedHeader {
  descr: string
  fortranOrder: boolean
  shape: number[]
}

function parseHeader(source: string, context: string): ParsedHeader {
  const trimmed = source.trim()
  if (!trimmed.startsWith('{') || !trimmed.endsWith('}')) {
    throw new FormatError(`${context}: malformed header: ${trimmed.slice(0, 40)}`)
  }
  const descrMatch = /'descr'\s*:\s*'([^']*)'/.exec(trimmed)
  const orderMatch = /'fortran_order'\s*:\s*(True|False)/.exec(trimmed)
  const shapeMatch = /'shape'\s*:\s*\(([^)]*)\)/.exec(trimmed)
  if (!descrMatch || !orderMatch || !shapeMatch) {
    throw new FormatError(`${context}: header is missing required fields`)
  }
  const entries = shapeMatch[1]
    .split(',')
    .map((part) => part.trim())
    .filter((part) => part.length > 0)
  const shape: number[] = []
  for (const entry of entries) {
    if (!/^\d+$/.test(entry)) {
      throw new FormatError(`${context}: bad shape entry ${entry!}`)
    }
    shape.push(Number.parseInt(entry, 10))
  }
  return {
    descr: descrMatch[1]!,
    fortranOrder: orderMatch[1] === 'True',
    shape,
  }
}

/** Strictly parse an NPY 1.0 buffer holding a little-endian float32 tensor. */
export function decodeNpy(blob: Buffer, context = 'buffer'): FloatTensor {
  requireLittleEndianHost()
  if (blob.length < 10 || !blob.subarray(0, 6).equals(MAGIC)) {
    throw new FormatError(`${context}: not an NPY file (bad magic)`)
  }
  const major = blob[6]!
  const minor = blob[7]!
  if (major !== 1 || minor !== 0) {
    throw new FormatError(`${context}: unsupported NPY version ${major}.${minor}`)
  }
  const headerLen = blob.readUInt16LE(8)
  const headerEnd = 10 + headerLen
  if (blob.length < headerEnd) {
    throw new FormatError(`${context}: truncated header`)
  }
  const header = parseHeader(
    blob.subarray(10, headerEnd).toString('latin1'),
    context,
  )
  if (header.descr !== '<f4') {
    throw new FormatError(
      `${context}: expected dtype '<f4', found '${header.descr}'`,
    )
  }
  if (header.fortranOrder) {
    throw new FormatError(`${context}: expected C-order payload`)
  }
  const count = elementCount(header.shape)
  const payload = blob.subarray(headerEnd)
  if (payload.length !== count * 4) {
    throw new FormatError(
      `${context}: payload is ${payload.length} bytes, expected ${count * 4}`,
    )
  }
  // Copy into a fresh allocation so the view is 4-byte aligned and
  // independent of the read buffer.
  const data = new Float32Array(count)
  Buffer.from(data.buffer).set(payload)
  return { shape: header.shape, data }
}

/** Write a float32 tensor to `path` as an NPY 1.0 file. */
export function writeNpy(path: string, tensor: FloatTensor): void {
  writeFileSync(path, encodeNpy(tensor))
}

/** Read a little-endian float32 NPY 1.0 file from `path`. */
export function readNpy(path: string): FloatTensor {
  return decodeNpy(readFileSync(path), path)
}
