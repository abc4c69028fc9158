/** Bounding-box overlay geometry and canvas painting. */

import type { Detection } from './types.js';
import { formatScore } from './format.js';

export interface PixelRect {
  x: number;
  y: number;
  width: number;
  height: number;
  label: string;
  probability: number;
}

/** Map normalized [ymin, xmin, ymax, xmax] boxes into pixel space:
 *  each coordinate is multiplied by the displayed height/width and
 *  rounded to the nearest pixel. One rectangle per detection. */
export function overlayRects(
  detections: Detection[],
  displayWidth: number,
  displayHeight: number,
): PixelRect[] {
  return detections.map((detection) => {
    const [ymin, xmin, ymax, xmax] = detection.detection_box;
    const top = Math.round(ymin * displayHeight);
    const left = Math.round(xmin * displayWidth);
    const bottom = Math.round(ymax * displayHeight);
    const right = Math.round(xmax * displayWidth);
    return {
      x: left,
      y: top,
      width: right - left,
      height: bottom - top,
      label: detection.label,
      probability: detection.probability,
    };
  });
}

export function drawOverlay(ctx: CanvasRenderingContext2D, rects: PixelRect[]): void {
  ctx.lineWidth = 2;
  ctx.font = '12px sans-serif';
  for (const rect of rects) {
    ctx.strokeStyle = '#00e0a0';
    ctx.strokeRect(rect.x, rect.y, rect.width, rect.height);
    const tag = `${rect.label} ${formatScore(rect.probability)}`;
    const textWidth = ctx.measureText(tag).width + 6;
    ctx.fillStyle = 'rgba(0, 0, 0, 0.65)';
    ctx.fillRect(rect.x, Math.max(0, rect.y - 16), textWidth, 16);
    ctx.fillStyle = '#fff';
    ctx.fillText(tag, rect.x + 3, Math.max(12, rect.y - 4));
  }
}
