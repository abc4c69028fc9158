/** Wire types for the exchange REST API. */

export type HealthState = 'unknown' | 'healthy' | 'unhealthy';

export interface ModelMetadata {
  id: string;
  name: string;
  description: string;
  model_type: string;
  license: string;
  source: string;
}

export interface ModelRecord {
  id: string;
  url: string;
  metadata: ModelMetadata | null;
  health: HealthState;
  consecutive_failures: number;
  last_checked: string | null;
}

export interface ErrorBody {
  code: number;
  message: string;
}

/** The standardized response wrapper every model service returns. */
export interface OkEnvelope {
  status: 'ok';
  predictions: unknown[][];
}

export interface ErrorEnvelope {
  status: 'error';
  error: ErrorBody;
}

export type PredictionEnvelope = OkEnvelope | ErrorEnvelope;

/** Per-instance prediction value of the object-detection schema. */
export interface Detection {
  label_id: string;
  label: string;
  probability: number;
  detection_box: [number, number, number, number]; // ymin, xmin, ymax, xmax
}

export function isDetection(value: unknown): value is Detection {
  return (
    typeof value === 'object' &&
    value !== null &&
    Array.isArray((value as Detection).detection_box) &&
    (value as Detection).detection_box.length === 4
  );
}
