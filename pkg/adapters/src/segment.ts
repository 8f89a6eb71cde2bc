#!/usr/bin/env node
/**
 * Segmenter adapter: RGB image in, raw-id label image out.
 *
 * usage: node segment.js <in_rgb.png> <out_label.png> --config <config.json>
 *
 * Models:
 *   nearest-color - test model; weights JSON holds {palette, classMap}.
 *     Each pixel maps to the nearest palette color (Chebyshev distance),
 *     then through the declared class map into scene ids. classMap is
 *     either the string "identity" or an object {modelId: sceneId}; scene
 *     ids must be 8-bit.
 */

import * as fs from 'node:fs';

import { loadConfig, parseArgs, readWeightsJson } from './config.js';
import { ModelError, ValidationError, runAdapter } from './exit.js';
import { nearestClassId, validatePalette } from './palette.js';
import { decodePng, encodePng, toRgb } from './png.js';

const MODELS = ['nearest-color'];

function buildClassMap(spec: any, paletteIds: number[]): Map<number, number> {
  const map = new Map<number, number>();
  if (spec === undefined || spec === 'identity') {
    for (const id of paletteIds) map.set(id, id);
    return map;
  }
  if (typeof spec !== 'object' || spec === null || Array.isArray(spec)) {
    throw new ValidationError(`unknown class map ${JSON.stringify(spec)}`);
  }
  for (const [from, to] of Object.entries(spec)) {
    const f = Number(from);
    const t = Number(to);
    if (!Number.isInteger(f) || !Number.isInteger(t) || t < 0 || t > 255) {
      throw new ValidationError(`class map entry ${from} -> ${String(to)} is not an 8-bit id pair`);
    }
    map.set(f, t);
  }
  for (const id of paletteIds) {
    if (!map.has(id)) throw new ValidationError(`class map misses palette id ${id}`);
  }
  return map;
}

function main(): void {
  const { args, config } = parseArgs(process.argv.slice(2), ['in_rgb', 'out_label']);
  const cfg = loadConfig(config, MODELS);
  const weights = readWeightsJson(cfg);
  const palette = validatePalette(weights.palette);
  const classMap = buildClassMap(weights.classMap, palette.map((e) => e.id));

  let input;
  try {
    input = toRgb(decodePng(fs.readFileSync(args.in_rgb)));
  } catch (err) {
    throw new ValidationError(`cannot read input ${args.in_rgb}: ${(err as Error).message}`);
  }

  const ids = new Uint8Array(input.width * input.height);
  for (let i = 0; i < ids.length; i++) {
    const raw = nearestClassId(palette, input.data[3 * i], input.data[3 * i + 1], input.data[3 * i + 2]);
    ids[i] = classMap.get(raw)!;
  }

  try {
    fs.writeFileSync(
      args.out_label,
      encodePng({ width: input.width, height: input.height, channels: 1, data: ids }),
    );
  } catch (err) {
    throw new ModelError(`cannot write output ${args.out_label}: ${(err as Error).message}`);
  }
}

runAdapter(main);
