#!/usr/bin/env node
/**
 * Blender adapter: naive copy-paste composite plus coverage mask in,
 * refined RGB image out.
 *
 * usage: node blend.js <in_composite.png> <in_mask.png> <out_rgb.png> --config <config.json>
 *
 * Models:
 *   identity-blend - test model; returns the composite unchanged (the
 *     weights file must still exist and parse, standing in for a real
 *     network checkpoint). The mask is decoded and dimension-checked so
 *     protocol violations surface here rather than downstream.
 */

import * as fs from 'node:fs';

import { loadConfig, parseArgs, readWeightsJson } from './config.js';
import { ModelError, ValidationError, runAdapter } from './exit.js';
import { decodePng, encodePng, toRgb } from './png.js';

const MODELS = ['identity-blend'];

function main(): void {
  const { args, config } = parseArgs(process.argv.slice(2), ['in_composite', 'in_mask', 'out_rgb']);
  const cfg = loadConfig(config, MODELS);
  readWeightsJson(cfg); // checkpoint must load even for the identity model

  let composite;
  let mask;
  try {
    composite = toRgb(decodePng(fs.readFileSync(args.in_composite)));
  } catch (err) {
    throw new ValidationError(`cannot read composite ${args.in_composite}: ${(err as Error).message}`);
  }
  try {
    mask = decodePng(fs.readFileSync(args.in_mask));
  } catch (err) {
    throw new ValidationError(`cannot read mask ${args.in_mask}: ${(err as Error).message}`);
  }
  if (mask.width !== composite.width || mask.height !== composite.height) {
    throw new ValidationError(
      `mask ${mask.width}x${mask.height} does not match composite ${composite.width}x${composite.height}`,
    );
  }

  try {
    fs.writeFileSync(args.out_rgb, encodePng(composite));
  } catch (err) {
    throw new ModelError(`cannot write output ${args.out_rgb}: ${(err as Error).message}`);
  }
}

runAdapter(main);
