/** DOM wiring. All rendering logic lives in the pure modules; this file
 *  only moves their outputs into the page. */

import { listModels, predictImage, predictText } from './api.js';
import { submitPolicy, toCatalogRows, type CatalogRow } from './catalog.js';
import { registryBaseUrl } from './config.js';
import { buildInferenceView, InferenceSequencer, type InferenceView } from './inference.js';
import { drawOverlay } from './overlay.js';
import { decodePgm, displayZoom, type GrayPixels } from './pgm.js';

const baseUrl = registryBaseUrl();
const sequencer = new InferenceSequencer();

let selectedRow: CatalogRow | null = null;
let overrideUnhealthy = false;
let uploadedImage: { bytes: Uint8Array; name: string } | null = null;

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

function setBanner(message: string | null): void {
  const banner = el<HTMLDivElement>('banner');
  banner.textContent = message ?? '';
  banner.hidden = message === null;
}

async function loadCatalog(): Promise<void> {
  const table = el<HTMLTableSectionElement>('catalog-body');
  const empty = el<HTMLParagraphElement>('catalog-empty');
  try {
    const rows = toCatalogRows(await listModels(baseUrl));
    setBanner(null);
    table.replaceChildren(
      ...rows.map((row) => {
        const tr = document.createElement('tr');
        tr.className = row.id === selectedRow?.id ? 'selected' : '';
        const health = `<span class="badge badge-${row.health}">${row.health}</span>`;
        tr.innerHTML = `<td>${row.id}</td><td>${row.name}</td><td>${row.modelType}</td><td>${health}</td>`;
        tr.addEventListener('click', () => selectModel(row));
        return tr;
      }),
    );
    empty.hidden = rows.length > 0;
  } catch (error) {
    setBanner(`cannot load the catalog from ${baseUrl}: ${error}`);
  }
}

function selectModel(row: CatalogRow): void {
  selectedRow = row;
  overrideUnhealthy = false;
  el<HTMLElement>('selected-model').textContent = `${row.name} (${row.id})`;
  const warning = el<HTMLDivElement>('unhealthy-warning');
  warning.hidden = submitPolicy(row.health) === 'enabled';
  (el<HTMLInputElement>('override')).checked = false;
  updateSubmitState();
  void loadCatalog(); // refresh row highlighting
}

function updateSubmitState(): void {
  const allowed =
    selectedRow !== null &&
    (submitPolicy(selectedRow.health) === 'enabled' || overrideUnhealthy);
  el<HTMLButtonElement>('submit-text').disabled = !allowed;
  el<HTMLButtonElement>('submit-image').disabled = !allowed || uploadedImage === null;
}

function renderView(view: InferenceView, image: GrayPixels | null): void {
  el<HTMLPreElement>('raw-panel').textContent = view.rawJson;

  const errorBox = el<HTMLDivElement>('inference-error');
  if (view.error) {
    errorBox.textContent = `error ${view.error.code}: ${view.error.message}`;
    errorBox.hidden = false;
  } else {
    errorBox.hidden = true;
  }

  const bars = el<HTMLDivElement>('bars');
  bars.replaceChildren(
    ...view.bars.map((bar) => {
      const row = document.createElement('div');
      row.className = 'bar-row';
      row.innerHTML =
        `<span class="bar-label">${bar.label}</span>` +
        `<span class="bar-track"><span class="bar-fill" style="width:${bar.width}"></span></span>` +
        `<span class="bar-value">${bar.value}</span>`;
      return row;
    }),
  );

  const canvas = el<HTMLCanvasElement>('image-canvas');
  const ctx = canvas.getContext('2d');
  if (image && ctx) {
    const zoom = displayZoom(image.width, image.height);
    canvas.width = image.width * zoom;
    canvas.height = image.height * zoom;
    canvas.hidden = false;
    const pixel = new ImageData(image.width, image.height);
    for (let i = 0; i < image.samples.length; i++) {
      const v = image.samples[i];
      pixel.data.set([v, v, v, 255], i * 4);
    }
    // Paint at native size, then rescale without smoothing.
    const raw = document.createElement('canvas');
    raw.width = image.width;
    raw.height = image.height;
    raw.getContext('2d')?.putImageData(pixel, 0, 0);
    ctx.imageSmoothingEnabled = false;
    ctx.drawImage(raw, 0, 0, canvas.width, canvas.height);
    drawOverlay(ctx, view.rects);
  } else {
    canvas.hidden = true;
  }
}

async function submitText(): Promise<void> {
  if (!selectedRow) return;
  const text = el<HTMLTextAreaElement>('text-input').value;
  const instances = text.split('\n').filter((line) => line.trim().length > 0);
  if (instances.length === 0) {
    setBanner('enter at least one non-empty line of text');
    return;
  }
  setBanner(null);
  const modelId = selectedRow.id;
  try {
    const view = await sequencer.run(async () => {
      const envelope = await predictText(baseUrl, modelId, instances);
      return buildInferenceView(modelId, envelope);
    });
    if (view) renderView(view, null);
  } catch (error) {
    setBanner(`inference failed: ${error}`);
  }
}

async function submitImage(): Promise<void> {
  if (!selectedRow || !uploadedImage) return;
  setBanner(null);
  const modelId = selectedRow.id;
  const { bytes, name } = uploadedImage;
  let decoded: GrayPixels;
  try {
    decoded = decodePgm(bytes);
  } catch (error) {
    setBanner(`cannot decode ${name}: ${error}`);
    return;
  }
  const zoom = displayZoom(decoded.width, decoded.height);
  const display = { width: decoded.width * zoom, height: decoded.height * zoom };
  try {
    const view = await sequencer.run(async () => {
      const blob = new Blob([bytes.buffer as ArrayBuffer], { type: 'image/x-portable-graymap' });
      const envelope = await predictImage(baseUrl, modelId, blob, name);
      return buildInferenceView(modelId, envelope, display);
    });
    if (view) renderView(view, view.error ? null : decoded);
  } catch (error) {
    setBanner(`inference failed: ${error}`);
  }
}

function wireEvents(): void {
  el<HTMLButtonElement>('reload-catalog').addEventListener('click', () => void loadCatalog());
  el<HTMLButtonElement>('submit-text').addEventListener('click', () => void submitText());
  el<HTMLButtonElement>('submit-image').addEventListener('click', () => void submitImage());
  el<HTMLInputElement>('override').addEventListener('change', (event) => {
    overrideUnhealthy = (event.target as HTMLInputElement).checked;
    updateSubmitState();
  });
  el<HTMLInputElement>('image-input').addEventListener('change', async (event) => {
    const file = (event.target as HTMLInputElement).files?.[0];
    uploadedImage = file
      ? { bytes: new Uint8Array(await file.arrayBuffer()), name: file.name }
      : null;
    updateSubmitState();
  });
}

wireEvents();
updateSubmitState();
void loadCatalog();
