import { execFileSync, spawnSync } from 'node:child_process'
import { mkdtempSync, rmSync } from 'node:fs'
import { tmpdir } from 'node:os'
import { dirname, join, resolve } from 'node:path'
import { fileURLToPath } from 'node:url'

const here = dirname(fileURLToPath(import.meta.url))

/** Compiled CLI entry points (npm test builds before running). */
export const CAPTURE_CLI = resolve(here, '..', 'dist', 'cli', 'capture.js')
export const DECODE_CLI = resolve(here, '..', 'dist', 'cli', 'decode.js')

/** Whether python3 plus the painting engine are importable on this host. */
export const PYTHON_OK =
  spawnSync('python3', ['-c', 'import numpy, latentbrush'], {
    stdio: 'ignore',
  }).status === 0

/** Whether an ffmpeg binary is on PATH. */
export const FFMPEG_OK =
  spawnSync('ffmpeg', ['-version'], { stdio: 'ignore' }).status === 0

export function makeTempDir(): { dir: string; cleanup: () => void } {
  const dir = mkdtempSync(join(tmpdir(), 'lp-capture-test-'))
  return {
    dir,
    cleanup: () => rmSync(dir, { recursive: true, force: true }),
  }
}

export function python(code: string): string {
  return execFileSync('python3', ['-c', code], { encoding: 'utf-8' })
}

export interface CliResult {
  status: number
  stdout: string
  stderr: string
}

export function runNode(script: string, args: string[]): CliResult {
  const result = spawnSync('node', [script, ...args], { encoding: 'utf-8' })
  return {
    status: result.status ?? -1,
    stdout: result.stdout,
    stderr: result.stderr,
  }
}
