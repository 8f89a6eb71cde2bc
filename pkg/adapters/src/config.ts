/**
 * Adapter configuration files.
 *
 * JSON: { "model": id, "weights": path, "device": "cpu"|"cuda"|"auto",
 *         "labelEncoding": "raw-id"|"color-coded" }
 *
 * Paths resolve relative to the config file. The weights file must exist
 * (a missing one is a model failure, exit 3); everything model-specific
 * lives inside the weights payload so the calling side stays agnostic.
 */

import * as fs from 'node:fs';
import * as path from 'node:path';

import { ModelError, ValidationError } from './exit.js';

export type LabelEncoding = 'raw-id' | 'color-coded';

export interface AdapterConfig {
  model: string;
  weightsPath: string;
  device: 'cpu' | 'cuda' | 'auto';
  labelEncoding: LabelEncoding;
}

const DEVICES = new Set(['cpu', 'cuda', 'auto']);
const ENCODINGS = new Set(['raw-id', 'color-coded']);

export function loadConfig(configPath: string, knownModels: string[]): AdapterConfig {
  let text: string;
  try {
    text = fs.readFileSync(configPath, 'utf8');
  } catch {
    throw new ValidationError(`cannot read config file ${configPath}`);
  }
  let doc: any;
  try {
    doc = JSON.parse(text);
  } catch {
    throw new ValidationError(`config file ${configPath} is not valid JSON`);
  }
  if (typeof doc.model !== 'string' || typeof doc.weights !== 'string') {
    throw new ValidationError('config needs string fields "model" and "weights"');
  }
  if (!knownModels.includes(doc.model)) {
    throw new ValidationError(
      `unknown model ${JSON.stringify(doc.model)}; this adapter provides: ${knownModels.join(', ')}`,
    );
  }
  const device = doc.device ?? 'cpu';
  if (!DEVICES.has(device)) throw new ValidationError(`unknown device ${JSON.stringify(device)}`);
  const labelEncoding = doc.labelEncoding ?? 'raw-id';
  if (!ENCODINGS.has(labelEncoding)) {
    throw new ValidationError(`unknown labelEncoding ${JSON.stringify(labelEncoding)}`);
  }
  const weightsPath = path.resolve(path.dirname(configPath), doc.weights);
  if (!fs.existsSync(weightsPath)) {
    throw new ModelError(`weights file not found: ${weightsPath}`);
  }
  return { model: doc.model, weightsPath, device, labelEncoding };
}

export function readWeightsJson(cfg: AdapterConfig): any {
  let text: string;
  try {
    text = fs.readFileSync(cfg.weightsPath, 'utf8');
  } catch {
    throw new ModelError(`cannot read weights file ${cfg.weightsPath}`);
  }
  try {
    return JSON.parse(text);
  } catch {
    throw new ModelError(`weights file ${cfg.weightsPath} is not valid JSON`);
  }
}

/** Tiny positional/flag argv parser shared by the adapter CLIs. */
export function parseArgs(
  argv: string[],
  positional: string[],
): { args: Record<string, string>; config: string } {
  const pos: string[] = [];
  let config: string | null = null;
  for (let i = 0; i < argv.length; i++) {
    if (argv[i] === '--config') {
      config = argv[++i];
    } else if (argv[i].startsWith('--')) {
      throw new ValidationError(`unknown flag ${argv[i]}`);
    } else {
      pos.push(argv[i]);
    }
  }
  if (pos.length !== positional.length || config == null) {
    throw new ValidationError(
      `usage: ${positional.map((p) => `<${p}>`).join(' ')} --config <config.json>`,
    );
  }
  const args: Record<string, string> = {};
  positional.forEach((name, i) => (args[name] = pos[i]));
  return { args, config };
}
