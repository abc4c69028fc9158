/** Inference view-model: turn an envelope into renderable pieces without
 *  recomputing anything — displayed numbers are envelope values run
 *  through the fixed formatters, rectangles are coordinate scaling only. */

import { formatScore, barWidth } from './format.js';
import { overlayRects, type PixelRect } from './overlay.js';
import { isDetection, type Detection, type PredictionEnvelope } from './types.js';

export interface ScoreBar {
  label: string;
  /** Exact envelope value formatted to 3 decimals. */
  value: string;
  /** CSS width of the bar. */
  width: string;
}

export interface InferenceView {
  modelId: string;
  /** The envelope exactly as received, pretty-printed. */
  rawJson: string;
  error: { code: number; message: string } | null;
  bars: ScoreBar[];
  rects: PixelRect[];
}

export interface DisplaySize {
  width: number;
  height: number;
}

function collectBars(predictions: unknown[][]): ScoreBar[] {
  const bars: ScoreBar[] = [];
  predictions.forEach((values, index) => {
    for (const value of values) {
      if (typeof value !== 'object' || value === null || isDetection(value)) continue;
      for (const [key, raw] of Object.entries(value)) {
        if (typeof raw !== 'number') continue;
        const prefix = predictions.length > 1 ? `#${index + 1} ` : '';
        bars.push({ label: `${prefix}${key}`, value: formatScore(raw), width: barWidth(raw) });
      }
    }
  });
  return bars;
}

function collectDetections(predictions: unknown[][]): Detection[] {
  const detections: Detection[] = [];
  for (const values of predictions) {
    for (const value of values) {
      if (isDetection(value)) detections.push(value);
    }
  }
  return detections;
}

export function buildInferenceView(
  modelId: string,
  envelope: PredictionEnvelope,
  display?: DisplaySize,
): InferenceView {
  const rawJson = JSON.stringify(envelope, null, 2);
  if (envelope.status === 'error') {
    return { modelId, rawJson, error: envelope.error, bars: [], rects: [] };
  }
  const detections = collectDetections(envelope.predictions);
  const rects =
    display !== undefined ? overlayRects(detections, display.width, display.height) : [];
  return {
    modelId,
    rawJson,
    error: null,
    bars: collectBars(envelope.predictions),
    rects,
  };
}

/** At most one in-flight inference per view: responses arriving for a
 *  superseded submission are discarded. */
export class InferenceSequencer {
  private current = 0;

  begin(): number {
    return ++this.current;
  }

  isCurrent(token: number): boolean {
    return token === this.current;
  }

  /** Run `task`; resolve null when another submission started meanwhile. */
  async run<T>(task: () => Promise<T>): Promise<T | null> {
    const token = this.begin();
    const result = await task();
    return this.isCurrent(token) ? result : null;
  }
}
