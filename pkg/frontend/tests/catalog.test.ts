import { describe, expect, it } from 'vitest';

import { submitPolicy, toCatalogRows } from '../src/catalog.js';
import type { ModelRecord } from '../src/types.js';

function record(id: string, health: ModelRecord['health'], named = true): ModelRecord {
  return {
    id,
    url: `http://127.0.0.1:5000/${id}`,
    metadata: named
      ? {
          id,
          name: id.toUpperCase(),
          description: 'd',
          model_type: 'text-classification',
          license: 'Apache-2.0',
          source: 'local',
        }
      : null,
    health,
    consecutive_failures: 0,
    last_checked: null,
  };
}

describe('toCatalogRows', () => {
  it('maps one row per record, preserving order', () => {
    const rows = toCatalogRows([record('a', 'healthy'), record('b', 'unhealthy')]);
    expect(rows).toEqual([
      { id: 'a', name: 'A', modelType: 'text-classification', health: 'healthy' },
      { id: 'b', name: 'B', modelType: 'text-classification', health: 'unhealthy' },
    ]);
  });

  it('falls back to the id when no metadata snapshot exists', () => {
    const [row] = toCatalogRows([record('ghost', 'unknown', false)]);
    expect(row.name).toBe('ghost');
    expect(row.modelType).toBe('(unknown)');
  });

  it('yields no rows for an empty registry', () => {
    expect(toCatalogRows([])).toEqual([]);
  });
});

describe('submitPolicy', () => {
  it('enables healthy and unknown models', () => {
    expect(submitPolicy('healthy')).toBe('enabled');
    expect(submitPolicy('unknown')).toBe('enabled');
  });

  it('requires an override for unhealthy models', () => {
    expect(submitPolicy('unhealthy')).toBe('override-required');
  });
});
