/** Minimal PGM (P5/P2) decoder so uploaded images can be painted onto a
 *  canvas — browsers do not render netpbm natively. */

export interface GrayPixels {
  width: number;
  height: number;
  /** One byte per pixel, scaled to 0..255. */
  samples: Uint8ClampedArray;
}

const WHITESPACE = new Set([0x20, 0x09, 0x0a, 0x0d, 0x0b, 0x0c]);
const HASH = 0x23;

class TokenReader {
  pos = 0;

  constructor(private readonly data: Uint8Array) {}

  private skipSeparators(): void {
    while (this.pos < this.data.length) {
      const byte = this.data[this.pos];
      if (byte === HASH) {
        while (this.pos < this.data.length && this.data[this.pos] !== 0x0a) this.pos++;
      } else if (WHITESPACE.has(byte)) {
        this.pos++;
      } else {
        return;
      }
    }
  }

  nextToken(): string {
    this.skipSeparators();
    if (this.pos >= this.data.length) throw new Error('unexpected end of PGM header');
    const start = this.pos;
    while (
      this.pos < this.data.length &&
      !WHITESPACE.has(this.data[this.pos]) &&
      this.data[this.pos] !== HASH
    ) {
      this.pos++;
    }
    return new TextDecoder('latin1').decode(this.data.subarray(start, this.pos));
  }

  nextInt(what: string): number {
    const token = this.nextToken();
    const value = Number(token);
    if (!Number.isInteger(value)) throw new Error(`${what} is not an integer: ${token}`);
    return value;
  }
}

export function decodePgm(data: Uint8Array): GrayPixels {
  const reader = new TokenReader(data);
  const magic = reader.nextToken();
  if (magic !== 'P5' && magic !== 'P2') {
    throw new Error(`unsupported magic ${magic}; expected P5 or P2`);
  }
  const width = reader.nextInt('width');
  const height = reader.nextInt('height');
  const maxval = reader.nextInt('maxval');
  if (width < 1 || height < 1) throw new Error(`bad dimensions ${width}x${height}`);
  if (maxval < 1 || maxval > 255) throw new Error(`maxval must be 1..255, got ${maxval}`);

  const count = width * height;
  const samples = new Uint8ClampedArray(count);
  if (magic === 'P5') {
    const start = reader.pos + 1; // single whitespace after maxval
    if (data.length - start < count) throw new Error('truncated PGM raster');
    for (let i = 0; i < count; i++) {
      samples[i] = Math.round((data[start + i] / maxval) * 255);
    }
  } else {
    for (let i = 0; i < count; i++) {
      const value = reader.nextInt('pixel value');
      if (value < 0 || value > maxval) throw new Error(`pixel value ${value} out of range`);
      samples[i] = Math.round((value / maxval) * 255);
    }
  }
  return { width, height, samples };
}

/** Integer zoom that keeps tiny desk-scale images visible. */
export function displayZoom(width: number, height: number, target = 320): number {
  return Math.max(1, Math.floor(target / Math.max(width, height)));
}
