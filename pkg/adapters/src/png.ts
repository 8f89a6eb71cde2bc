/**
 * Minimal PNG codec for the adapter wire format: 8-bit depth, grayscale /
 * RGB / RGBA, no interlacing. Decoding handles all five scanline filters;
 * encoding writes unfiltered scanlines. No dependencies beyond node:zlib.
 */

import * as zlib from 'node:zlib';

export interface Image {
  width: number;
  height: number;
  channels: 1 | 3 | 4;
  data: Uint8Array; // row-major, width*height*channels bytes
}

const SIGNATURE = Uint8Array.from([0x89, 0x50, 0x4e, 0x47, 0x0d, 0x0a, 0x1a, 0x0a]);

const COLOR_TYPE_TO_CHANNELS: Record<number, 1 | 3 | 4> = { 0: 1, 2: 3, 6: 4 };
const CHANNELS_TO_COLOR_TYPE: Record<number, number> = { 1: 0, 3: 2, 4: 6 };

export class PngError extends Error {}

export function decodePng(buf: Uint8Array): Image {
  if (buf.length < 8 || !SIGNATURE.every((b, i) => buf[i] === b)) {
    throw new PngError('not a PNG file');
  }
  const view = new DataView(buf.buffer, buf.byteOffset, buf.byteLength);
  let pos = 8;
  let width = 0;
  let height = 0;
  let channels: 1 | 3 | 4 = 3;
  const idat: Uint8Array[] = [];
  let sawIhdr = false;
  let sawIend = false;

  while (pos + 8 <= buf.length && !sawIend) {
    const length = view.getUint32(pos);
    const type = Buffer.from(buf.subarray(pos + 4, pos + 8)).toString('latin1');
    const data = buf.subarray(pos + 8, pos + 8 + length);
    if (pos + 12 + length > buf.length) throw new PngError('truncated chunk');
    pos += 12 + length;

    if (type === 'IHDR') {
      const dv = new DataView(data.buffer, data.byteOffset, data.byteLength);
      width = dv.getUint32(0);
      height = dv.getUint32(4);
      const bitDepth = data[8];
      const colorType = data[9];
      const interlace = data[12];
      if (bitDepth !== 8) throw new PngError(`unsupported bit depth ${bitDepth}`);
      if (!(colorType in COLOR_TYPE_TO_CHANNELS)) {
        throw new PngError(`unsupported color type ${colorType}`);
      }
      if (interlace !== 0) throw new PngError('interlaced PNG not supported');
      channels = COLOR_TYPE_TO_CHANNELS[colorType];
      sawIhdr = true;
    } else if (type === 'IDAT') {
      idat.push(data);
    } else if (type === 'IEND') {
      sawIend = true;
    }
    // ancillary chunks ignored
  }
  if (!sawIhdr || width === 0 || height === 0) throw new PngError('missing or empty IHDR');
  if (idat.length === 0) throw new PngError('missing image data');

  let raw: Uint8Array;
  try {
    raw = zlib.inflateSync(Buffer.concat(idat.map((d) => Buffer.from(d))));
  } catch {
    throw new PngError('corrupt compressed payload');
  }
  const stride = width * channels;
  if (raw.length !== (stride + 1) * height) throw new PngError('payload size mismatch');

  const out = new Uint8Array(stride * height);
  let prev: Uint8Array | null = null;
  for (let y = 0; y < height; y++) {
    const filter = raw[(stride + 1) * y];
    const line = raw.subarray((stride + 1) * y + 1, (stride + 1) * (y + 1));
    const row = out.subarray(stride * y, stride * (y + 1));
    unfilterRow(filter, line, row, prev, channels);
    prev = row;
  }
  return { width, height, channels, data: out };
}

function unfilterRow(
  filter: number,
  line: Uint8Array,
  row: Uint8Array,
  prev: Uint8Array | null,
  bpp: number,
): void {
  const n = line.length;
  switch (filter) {
    case 0:
      row.set(line);
      return;
    case 1:
      for (let i = 0; i < n; i++) {
        row[i] = (line[i] + (i >= bpp ? row[i - bpp] : 0)) & 0xff;
      }
      return;
    case 2:
      for (let i = 0; i < n; i++) {
        row[i] = (line[i] + (prev ? prev[i] : 0)) & 0xff;
      }
      return;
    case 3:
      for (let i = 0; i < n; i++) {
        const left = i >= bpp ? row[i - bpp] : 0;
        const up = prev ? prev[i] : 0;
        row[i] = (line[i] + ((left + up) >> 1)) & 0xff;
      }
      return;
    case 4:
      for (let i = 0; i < n; i++) {
        const left = i >= bpp ? row[i - bpp] : 0;
        const up = prev ? prev[i] : 0;
        const upLeft = prev && i >= bpp ? prev[i - bpp] : 0;
        row[i] = (line[i] + paeth(left, up, upLeft)) & 0xff;
      }
      return;
    default:
      throw new PngError(`unknown scanline filter ${filter}`);
  }
}

function paeth(a: number, b: number, c: number): number {
  const p = a + b - c;
  const pa = Math.abs(p - a);
  const pb = Math.abs(p - b);
  const pc = Math.abs(p - c);
  if (pa <= pb && pa <= pc) return a;
  return pb <= pc ? b : c;
}

export function encodePng(img: Image): Uint8Array {
  const { width, height, channels, data } = img;
  if (data.length !== width * height * channels) {
    throw new PngError('image buffer size mismatch');
  }
  const stride = width * channels;
  const raw = new Uint8Array((stride + 1) * height);
  for (let y = 0; y < height; y++) {
    raw[(stride + 1) * y] = 0; // unfiltered
    raw.set(data.subarray(stride * y, stride * (y + 1)), (stride + 1) * y + 1);
  }
  const ihdr = new Uint8Array(13);
  const dv = new DataView(ihdr.buffer);
  dv.setUint32(0, width);
  dv.setUint32(4, height);
  ihdr[8] = 8; // bit depth
  ihdr[9] = CHANNELS_TO_COLOR_TYPE[channels];
  // compression 0, filter 0, interlace 0

  const idat = zlib.deflateSync(raw);
  return Buffer.concat([
    Buffer.from(SIGNATURE),
    chunk('IHDR', ihdr),
    chunk('IDAT', idat),
    chunk('IEND', new Uint8Array(0)),
  ]);
}

function chunk(type: string, data: Uint8Array): Buffer {
  const head = Buffer.alloc(8);
  head.writeUInt32BE(data.length, 0);
  head.write(type, 4, 'latin1');
  const body = Buffer.concat([head.subarray(4), Buffer.from(data)]);
  const crc = Buffer.alloc(4);
  crc.writeUInt32BE(zlib.crc32(body) >>> 0, 0);
  return Buffer.concat([head, Buffer.from(data), crc]);
}

/** Drop alpha / expand grayscale so downstream code sees 3 channels. */
export function toRgb(img: Image): Image {
  if (img.channels === 3) return img;
  const out = new Uint8Array(img.width * img.height * 3);
  const n = img.width * img.height;
  for (let i = 0; i < n; i++) {
    if (img.channels === 1) {
      out[3 * i] = out[3 * i + 1] = out[3 * i + 2] = img.data[i];
    } else {
      out[3 * i] = img.data[4 * i];
      out[3 * i + 1] = img.data[4 * i + 1];
      out[3 * i + 2] = img.data[4 * i + 2];
    }
  }
  return { width: img.width, height: img.height, channels: 3, data: out };
}
