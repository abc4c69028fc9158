import { describe, expect, it } from 'vitest';

import { decodePgm, displayZoom } from '../src/pgm.js';
import { encodePgm } from './helpers.js';

describe('decodePgm', () => {
  it('decodes a binary image', () => {
    const image = decodePgm(encodePgm(2, 2, [0, 255, 255, 0]));
    expect(image.width).toBe(2);
    expect(image.height).toBe(2);
    expect(Array.from(image.samples)).toEqual([0, 255, 255, 0]);
  });

  it('decodes an ASCII image with comments', () => {
    const text = 'P2\n# note\n2 1\n255\n128 255\n';
    const image = decodePgm(new TextEncoder().encode(text));
    expect(Array.from(image.samples)).toEqual([128, 255]);
  });

  it('rescales small maxval to display range', () => {
    const image = decodePgm(new TextEncoder().encode('P2 1 2 100\n50 100\n'));
    expect(Array.from(image.samples)).toEqual([128, 255]);
  });

  it('rejects color images', () => {
    expect(() => decodePgm(new TextEncoder().encode('P6 1 1 255\nxyz'))).toThrow(/magic/);
  });

  it('rejects truncated rasters', () => {
    expect(() => decodePgm(encodePgm(4, 4, new Array(16).fill(0)).slice(0, 12))).toThrow(
      /truncated/,
    );
  });

  it('rejects out-of-range ASCII samples', () => {
    expect(() => decodePgm(new TextEncoder().encode('P2 1 1 100\n101'))).toThrow(/out of range/);
  });
});

describe('displayZoom', () => {
  it('scales tiny images up to a visible size', () => {
    expect(displayZoom(8, 8)).toBe(40);
    expect(displayZoom(32, 16)).toBe(10);
  });

  it('never scales below 1', () => {
    expect(displayZoom(1000, 1000)).toBe(1);
  });
});
