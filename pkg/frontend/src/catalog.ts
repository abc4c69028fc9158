/** Catalog view-model: one row per registry record. */

import type { HealthState, ModelRecord } from './types.js';

export interface CatalogRow {
  id: string;
  name: string;
  modelType: string;
  health: HealthState;
}

export function toCatalogRows(records: ModelRecord[]): CatalogRow[] {
  return records.map((record) => ({
    id: record.id,
    name: record.metadata?.name ?? record.id,
    modelType: record.metadata?.model_type ?? '(unknown)',
    health: record.health,
  }));
}

export type SubmitPolicy = 'enabled' | 'override-required';

/** Health is advisory: an unhealthy model's form is disabled unless the
 *  user explicitly overrides, but submission is never impossible. */
export function submitPolicy(health: HealthState): SubmitPolicy {
  return health === 'unhealthy' ? 'override-required' : 'enabled';
}
