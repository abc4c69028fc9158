/** Typed fetch client for the exchange. The UI talks only to the
 *  registry; predictions go through its proxy endpoint. */

import type { ModelRecord, PredictionEnvelope } from './types.js';

export async function listModels(baseUrl: string): Promise<ModelRecord[]> {
  const response = await fetch(`${baseUrl}/v1/models`);
  if (!response.ok) {
    throw new Error(`registry answered HTTP ${response.status}`);
  }
  return (await response.json()) as ModelRecord[];
}

/** Parse a predict response. Error statuses still carry a valid envelope
 *  body, so they resolve rather than reject; only transport-level
 *  failures (network down, non-JSON body) throw. */
async function envelopeFrom(response: Response): Promise<PredictionEnvelope> {
  let body: unknown;
  try {
    body = await response.json();
  } catch {
    throw new Error(`model service answered HTTP ${response.status} with a non-JSON body`);
  }
  const envelope = body as PredictionEnvelope;
  if (envelope.status !== 'ok' && envelope.status !== 'error') {
    throw new Error('response is not a prediction envelope');
  }
  return envelope;
}

export async function predictText(
  baseUrl: string,
  modelId: string,
  texts: string[],
): Promise<PredictionEnvelope> {
  const response = await fetch(`${baseUrl}/v1/models/${encodeURIComponent(modelId)}/predict`, {
    method: 'POST',
    headers: { 'Content-Type': 'application/json' },
    body: JSON.stringify({ text: texts }),
  });
  return envelopeFrom(response);
}

export async function predictImage(
  baseUrl: string,
  modelId: string,
  image: Blob,
  filename = 'upload.pgm',
): Promise<PredictionEnvelope> {
  const form = new FormData();
  form.append('image', image, filename);
  const response = await fetch(`${baseUrl}/v1/models/${encodeURIComponent(modelId)}/predict`, {
    method: 'POST',
    body: form,
  });
  return envelopeFrom(response);
}
