/**
 * Capture adapter: record a denoising pipeline's per-step
 * predicted-original latents to NPY tensors, and decode latent tensors
 * back to RGB frames.
 */

export {
  FormatError,
  SetupError,
  UnsupportedSchedulerError,
  ValidationError,
} from './errors.js'
export type {
  DecodedImage,
  DenoiseStep,
  PipelineBackend,
  RunOptions,
} from './backend.js'
export { loadPretrainedBackend } from './backend.js'
export type { StepCoefficients } from './predicted-original.js'
export { predictedOriginal } from './predicted-original.js'
export type {
  SyntheticBackendOptions,
  SyntheticScheduler,
} from './synthetic.js'
export { SyntheticDiffusionBackend } from './synthetic.js'
export type { CaptureOptions, CaptureResult } from './capture.js'
export { captureTrajectory } from './capture.js'
export type { DecodeOptions, DecodeResult } from './decode.js'
export { decodeFrames } from './decode.js'
export type { FloatTensor } from './npy.js'
export { decodeNpy, encodeNpy, readNpy, writeNpy } from './npy.js'
export { encodePng, rgbBytesFromFloats } from './png.js'
