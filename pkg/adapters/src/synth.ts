#!/usr/bin/env node
/**
 * Synthesizer adapter: semantic labels in, RGB image out.
 *
 * usage: node synth.js <in_label.png> <out_rgb.png> --config <config.json>
 *
 * Models:
 *   passthrough-colorize - test model; weights file is a palette JSON and
 *     the output is the color-coded rendering of the labels. With
 *     labelEncoding "raw-id" the input is a single-channel id image; with
 *     "color-coded" the input is already RGB and passes through validated.
 *
 * A real neural synthesizer slots in as another model id with the same
 * command line; nothing on the calling side changes.
 */

import * as fs from 'node:fs';

import { loadConfig, parseArgs, readWeightsJson } from './config.js';
import { ModelError, ValidationError, runAdapter } from './exit.js';
import { colorOf, validatePalette } from './palette.js';
import { decodePng, encodePng, toRgb } from './png.js';

const MODELS = ['passthrough-colorize'];

function main(): void {
  const { args, config } = parseArgs(process.argv.slice(2), ['in_label', 'out_rgb']);
  const cfg = loadConfig(config, MODELS);
  const palette = validatePalette(readWeightsJson(cfg));

  let input;
  try {
    input = decodePng(fs.readFileSync(args.in_label));
  } catch (err) {
    throw new ValidationError(`cannot read input ${args.in_label}: ${(err as Error).message}`);
  }

  let out;
  if (cfg.labelEncoding === 'raw-id') {
    if (input.channels !== 1) {
      throw new ValidationError('raw-id encoding expects a single-channel label image');
    }
    const rgb = new Uint8Array(input.width * input.height * 3);
    const colorById = new Map<number, [number, number, number]>();
    for (let i = 0; i < input.data.length; i++) {
      const id = input.data[i];
      let color = colorById.get(id);
      if (!color) {
        color = colorOf(palette, id);
        colorById.set(id, color);
      }
      rgb[3 * i] = color[0];
      rgb[3 * i + 1] = color[1];
      rgb[3 * i + 2] = color[2];
    }
    out = { width: input.width, height: input.height, channels: 3 as const, data: rgb };
  } else {
    if (input.channels === 1) {
      throw new ValidationError('color-coded encoding expects an RGB label image');
    }
    out = toRgb(input);
  }

  try {
    fs.writeFileSync(args.out_rgb, encodePng(out));
  } catch (err) {
    throw new ModelError(`cannot write output ${args.out_rgb}: ${(err as Error).message}`);
  }
}

runAdapter(main);
