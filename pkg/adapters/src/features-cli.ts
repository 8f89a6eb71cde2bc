#!/usr/bin/env node
/**
 * Feature-extractor adapter: directory of PNG images in, HNCGFEAT file out.
 *
 * usage: node features-cli.js <image_dir> <out.feat> --config <config.json>
 *
 * Models:
 *   hist-luma-256 - test model; weights JSON must declare {"dim": 256}.
 *     Emits channel histograms plus a luma grid per image, in sorted
 *     filename order. At least two images are required (downstream
 *     covariance needs N >= 2).
 */

import * as fs from 'node:fs';
import * as path from 'node:path';

import { loadConfig, parseArgs, readWeightsJson } from './config.js';
import { ModelError, ValidationError, runAdapter } from './exit.js';
import { FEATURE_DIM, encodeFeatureFile, extractFeatures } from './features.js';
import { decodePng, toRgb } from './png.js';

const MODELS = ['hist-luma-256'];

function main(): void {
  const { args, config } = parseArgs(process.argv.slice(2), ['image_dir', 'out_feat']);
  const cfg = loadConfig(config, MODELS);
  const weights = readWeightsJson(cfg);
  if (weights.dim !== FEATURE_DIM) {
    throw new ModelError(`weights declare dim ${weights.dim}, extractor emits ${FEATURE_DIM}`);
  }

  let names: string[];
  try {
    names = fs.readdirSync(args.image_dir).filter((n) => n.toLowerCase().endsWith('.png'));
  } catch {
    throw new ValidationError(`cannot read image directory ${args.image_dir}`);
  }
  names.sort();
  if (names.length < 2) {
    throw new ValidationError(
      `need at least 2 images for a feature set, found ${names.length} in ${args.image_dir}`,
    );
  }

  const rows: Float64Array[] = [];
  for (const name of names) {
    const file = path.join(args.image_dir, name);
    try {
      rows.push(extractFeatures(toRgb(decodePng(fs.readFileSync(file)))));
    } catch (err) {
      throw new ValidationError(`unreadable image ${file}: ${(err as Error).message}`);
    }
  }

  try {
    fs.writeFileSync(args.out_feat, encodeFeatureFile(rows));
  } catch (err) {
    throw new ModelError(`cannot write ${args.out_feat}: ${(err as Error).message}`);
  }
}

runAdapter(main);
