/**
 * Image features and the HNCGFEAT container.
 *
 * Extractor: 64-bin normalized histogram per RGB channel (192) plus an 8x8
 * box-downsampled luma grid (64), 256 values per image.
 *
 * File format (little-endian): magic "HNCGFEAT", uint32 N, uint32 D, then
 * N*D float32 values row-major.
 */

import { ValidationError } from './exit.js';
import type { Image } from './png.js';

export const FEATURE_DIM = 256;
const MAGIC = 'HNCGFEAT';

export function extractFeatures(img: Image): Float64Array {
  if (img.channels !== 3) throw new ValidationError('feature extraction needs RGB input');
  const { width, height, data } = img;
  const n = width * height;
  const out = new Float64Array(FEATURE_DIM);
  for (let i = 0; i < n; i++) {
    for (let c = 0; c < 3; c++) {
      const v = data[3 * i + c] / 255;
      const bin = Math.min(Math.floor(v * 64), 63);
      out[c * 64 + bin] += 1 / n;
    }
  }
  // 8x8 box means of luma, block edges at floor(k*size/8)
  const yb = blockEdges(height);
  const xb = blockEdges(width);
  for (let bi = 0; bi < 8; bi++) {
    for (let bj = 0; bj < 8; bj++) {
      let sum = 0;
      let count = 0;
      const y1 = Math.max(yb[bi + 1], yb[bi] + 1);
      const x1 = Math.max(xb[bj + 1], xb[bj] + 1);
      for (let y = Math.min(yb[bi], height - 1); y < y1; y++) {
        for (let x = Math.min(xb[bj], width - 1); x < x1; x++) {
          const k = 3 * (y * width + x);
          sum += (0.299 * data[k] + 0.587 * data[k + 1] + 0.114 * data[k + 2]) / 255;
          count++;
        }
      }
      out[192 + bi * 8 + bj] = sum / count;
    }
  }
  return out;
}

function blockEdges(size: number): number[] {
  const edges: number[] = [];
  for (let k = 0; k <= 8; k++) edges.push(Math.floor((k * size) / 8));
  return edges;
}

export function encodeFeatureFile(rows: Float64Array[]): Buffer {
  if (rows.length === 0) throw new ValidationError('no feature rows');
  const d = rows[0].length;
  const buf = Buffer.alloc(16 + 4 * rows.length * d);
  buf.write(MAGIC, 0, 'latin1');
  buf.writeUInt32LE(rows.length, 8);
  buf.writeUInt32LE(d, 12);
  let pos = 16;
  for (const row of rows) {
    if (row.length !== d) throw new ValidationError('inconsistent feature dimensions');
    for (let j = 0; j < d; j++) {
      buf.writeFloatLE(row[j], pos);
      pos += 4;
    }
  }
  return buf;
}

export function decodeFeatureFile(buf: Buffer): { n: number; d: number; values: Float32Array } {
  if (buf.length < 16 || buf.toString('latin1', 0, 8) !== MAGIC) {
    throw new ValidationError('bad feature file magic');
  }
  const n = buf.readUInt32LE(8);
  const d = buf.readUInt32LE(12);
  if (buf.length !== 16 + 4 * n * d) throw new ValidationError('feature file size mismatch');
  const values = new Float32Array(n * d);
  for (let i = 0; i < n * d; i++) values[i] = buf.readFloatLE(16 + 4 * i);
  return { n, d, values };
}
