/** Display formatting. The UI never recomputes scores: every number shown
 *  is an envelope value passed through these fixed formatters. */

export function formatScore(value: number): string {
  return value.toFixed(3);
}

/** CSS width for a probability bar (presentation scaling only). */
export function barWidth(value: number): string {
  const clamped = Math.min(1, Math.max(0, value));
  return `${(clamped * 100).toFixed(1)}%`;
}
