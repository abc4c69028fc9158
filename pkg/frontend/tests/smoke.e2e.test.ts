/** End-to-end smoke test against a live exchange: scaffolds and serves the
 *  two reference models through the real `mx` CLI, registers them, and
 *  drives the frontend's api + view-model modules exactly as the page
 *  does. Requires python3 with the mxserve package installed. */

import { mkdtempSync, rmSync } from 'node:fs';
import { tmpdir } from 'node:os';
import { join } from 'node:path';
import { afterAll, beforeAll, describe, expect, it } from 'vitest';

import { listModels, predictImage, predictText } from '../src/api.js';
import { toCatalogRows } from '../src/catalog.js';
import { formatScore } from '../src/format.js';
import { buildInferenceView } from '../src/inference.js';
import { decodePgm, displayZoom } from '../src/pgm.js';
import type { OkEnvelope } from '../src/types.js';
import { runCli, spawnService, stopProcess, twoBlobPgm, type ManagedProcess } from './helpers.js';

let workDir: string;
let registryUrl: string;
const processes: ManagedProcess[] = [];

beforeAll(async () => {
  workDir = mkdtempSync(join(tmpdir(), 'mx-frontend-'));
  runCli(['new', 'text-classifier', 'smoke-text', join(workDir, 'text')]);
  runCli(['new', 'object-detector', 'smoke-det', join(workDir, 'det')]);

  const text = await spawnService(['serve', '--model-dir', join(workDir, 'text'), '--port', '0']);
  const det = await spawnService(['serve', '--model-dir', join(workDir, 'det'), '--port', '0']);
  const registry = await spawnService([
    'registry', 'serve',
    '--store', join(workDir, 'store.json'),
    '--port', '0',
    '--poll-interval', '1',
  ]);
  processes.push(text, det, registry);
  registryUrl = registry.url;

  for (const [id, service] of [['smoke-text', text], ['smoke-det', det]] as const) {
    const response = await fetch(`${registryUrl}/v1/models`, {
      method: 'POST',
      headers: { 'Content-Type': 'application/json' },
      body: JSON.stringify({ id, url: service.url }),
    });
    if (response.status !== 201) {
      throw new Error(`registration of ${id} failed: ${await response.text()}`);
    }
  }
});

afterAll(async () => {
  await Promise.all(processes.map((p) => stopProcess(p)));
  rmSync(workDir, { recursive: true, force: true });
});

describe('webapp smoke against a live exchange', () => {
  it('renders one catalog row per registered model', async () => {
    const rows = toCatalogRows(await listModels(registryUrl));
    expect(rows).toHaveLength(2);
    expect(rows.map((row) => row.id)).toEqual(['smoke-det', 'smoke-text']);
    expect(rows.every((row) => row.health === 'healthy' || row.health === 'unknown')).toBe(true);
  });

  it('renders exactly 2 overlay rectangles for the two-blob image', async () => {
    const bytes = twoBlobPgm();
    const decoded = decodePgm(bytes);
    const zoom = displayZoom(decoded.width, decoded.height);
    const display = { width: decoded.width * zoom, height: decoded.height * zoom };

    const envelope = await predictImage(
      registryUrl,
      'smoke-det',
      new Blob([bytes.buffer as ArrayBuffer], { type: 'image/x-portable-graymap' }),
      'two-blob.pgm',
    );
    expect(envelope.status).toBe('ok');

    const view = buildInferenceView('smoke-det', envelope, display);
    expect(view.error).toBeNull();
    expect(view.rects).toHaveLength(2);
    // 8x8 at zoom 40 -> 320px; blob 1 covers rows/cols 0..1, blob 2 rows/cols 5..6.
    expect(view.rects[0]).toMatchObject({ x: 0, y: 0, width: 80, height: 80 });
    expect(view.rects[1]).toMatchObject({ x: 200, y: 200, width: 80, height: 80 });
  });

  it('displays the sentiment score exactly as the envelope value, 3 decimals', async () => {
    const envelope = await predictText(registryUrl, 'smoke-text', ['good']);
    expect(envelope.status).toBe('ok');

    const ok = envelope as OkEnvelope;
    const [instanceValues] = ok.predictions as [{ positive: number; negative: number }[]];
    const score = instanceValues[0];

    const view = buildInferenceView('smoke-text', envelope);
    const positiveBar = view.bars.find((bar) => bar.label === 'positive');
    expect(positiveBar).toBeDefined();
    expect(positiveBar!.value).toBe(formatScore(score.positive));
    expect(positiveBar!.value).toBe('0.881');
  });

  it('relays upstream error envelopes for display', async () => {
    const envelope = await predictText(registryUrl, 'smoke-text', []);
    expect(envelope.status).toBe('error');
    const view = buildInferenceView('smoke-text', envelope);
    expect(view.error?.code).toBe(422);
    expect(view.rects).toEqual([]);
  });
});
