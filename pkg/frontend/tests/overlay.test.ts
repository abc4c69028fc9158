import { describe, expect, it } from 'vitest';

import { overlayRects } from '../src/overlay.js';
import type { Detection } from '../src/types.js';

function detection(box: [number, number, number, number], probability = 1.0): Detection {
  return { label_id: '1', label: 'object', probability, detection_box: box };
}

describe('overlayRects', () => {
  it('emits one rectangle per detection', () => {
    const detections = [detection([0, 0, 0.25, 0.25]), detection([0.5, 0.5, 1, 1])];
    expect(overlayRects(detections, 320, 320)).toHaveLength(2);
  });

  it('scales normalized boxes by the displayed size', () => {
    const [rect] = overlayRects([detection([0.0, 0.0, 0.25, 0.25])], 8, 8);
    expect(rect).toMatchObject({ x: 0, y: 0, width: 2, height: 2 });
  });

  it('rounds each scaled coordinate to the nearest pixel', () => {
    // ymin*h = 0.33*100 = 33, ymax*h = 0.66*100 = 66 (after rounding)
    const [rect] = overlayRects([detection([0.333, 0.1, 0.666, 0.9])], 200, 100);
    expect(rect.y).toBe(33);
    expect(rect.height).toBe(67 - 33);
    expect(rect.x).toBe(20);
    expect(rect.width).toBe(180 - 20);
  });

  it('uses height for y and width for x on non-square displays', () => {
    const [rect] = overlayRects([detection([0.5, 0.25, 1, 0.5])], 400, 100);
    expect(rect).toMatchObject({ x: 100, y: 50, width: 100, height: 50 });
  });

  it('keeps detection order', () => {
    const rects = overlayRects(
      [detection([0, 0, 0.5, 0.5], 0.9), detection([0.5, 0.5, 1, 1], 0.4)],
      10,
      10,
    );
    expect(rects.map((r) => r.probability)).toEqual([0.9, 0.4]);
  });
});
