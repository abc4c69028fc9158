/** Test helpers: PGM fixtures and spawning the Python stack for the
 *  end-to-end smoke test. */

import { spawn, spawnSync, type ChildProcess } from 'node:child_process';

export function encodePgm(width: number, height: number, samples: number[]): Uint8Array {
  const header = new TextEncoder().encode(`P5\n${width} ${height}\n255\n`);
  const out = new Uint8Array(header.length + samples.length);
  out.set(header, 0);
  out.set(samples, header.length);
  return out;
}

/** 8x8 image with two 2x2 bright blobs (area 4 each: both survive the
 *  scaffolded detector's default min_area). */
export function twoBlobPgm(): Uint8Array {
  const samples = new Array(64).fill(0);
  for (const [r, c] of [[0, 0], [0, 1], [1, 0], [1, 1], [5, 5], [5, 6], [6, 5], [6, 6]]) {
    samples[r * 8 + c] = 255;
  }
  return encodePgm(8, 8, samples);
}

export interface ManagedProcess {
  child: ChildProcess;
  url: string;
}

const LISTEN_RE = /listening on (http:\/\/[\d.]+:\d+)/;

export function runCli(args: string[]): void {
  const result = spawnSync('python3', ['-m', 'mxserve', ...args], { encoding: 'utf-8' });
  if (result.status !== 0) {
    throw new Error(`mx ${args.join(' ')} failed: ${result.stdout}${result.stderr}`);
  }
}

/** Spawn a long-running `mx` command and wait for its listening line. */
export function spawnService(args: string[], timeoutMs = 20_000): Promise<ManagedProcess> {
  const child = spawn('python3', ['-m', 'mxserve', ...args], {
    stdio: ['ignore', 'pipe', 'pipe'],
  });
  return new Promise((resolve, reject) => {
    let output = '';
    const timer = setTimeout(() => {
      child.kill('SIGKILL');
      reject(new Error(`no listening URL from mx ${args.join(' ')}:\n${output}`));
    }, timeoutMs);
    const scan = (chunk: Buffer) => {
      output += chunk.toString();
      const match = LISTEN_RE.exec(output);
      if (match) {
        clearTimeout(timer);
        resolve({ child, url: match[1] });
      }
    };
    child.stdout?.on('data', scan);
    child.stderr?.on('data', scan);
    child.on('exit', (code) => {
      clearTimeout(timer);
      reject(new Error(`mx ${args.join(' ')} exited with ${code}:\n${output}`));
    });
  });
}

export function stopProcess(managed: ManagedProcess | undefined): Promise<void> {
  if (!managed || managed.child.exitCode !== null) return Promise.resolve();
  return new Promise((resolve) => {
    managed.child.once('exit', () => resolve());
    managed.child.kill('SIGTERM');
    setTimeout(() => managed.child.kill('SIGKILL'), 5_000).unref();
  });
}
