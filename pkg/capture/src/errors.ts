/**
 * Error taxonomy shared across the capture adapter.
 *
 * - SetupError: the host is missing something the operation needs
 *   (checkpoint directory, inference runtime, ffmpeg).
 * - UnsupportedSchedulerError: the denoising loop exposes neither the
 *   predicted original nor the coefficients needed to compute it.
 * - FormatError: a file is not in the expected on-disk format.
 * - ValidationError: well-formed inputs that violate a contract
 *   (shape mismatches, bad flag values).
 */

export class SetupError extends Error {
  constructor(message: string) {
    super(message)
    this.name = 'SetupError'
  }
}

export class UnsupportedSchedulerError extends Error {
  constructor(message: string) {
    super(message)
    this.name = 'UnsupportedSchedulerError'
  }
}

export class FormatError extends Error {
  constructor(message: string) {
    super(message)
    this.name = 'FormatError'
  }
}

export class ValidationError extends Error {
  constructor(message: string) {
    super(message)
    this.name = 'ValidationError'
  }
}
