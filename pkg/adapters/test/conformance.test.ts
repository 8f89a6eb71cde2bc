/**
 * Protocol conformance against the primary pipeline CLI.
 *
 * Drives a 4-frame run whose synthesizer, segmenter, and blender are all
 * these adapters, checks a dimension-violating plug is rejected, and
 * verifies the feature-file contract end to end: features written here
 * parse in the primary, and two splits of the same "real" image set sit
 * closer together (FID) than real vs stub-synthesized images.
 */

import assert from 'node:assert/strict';
import { spawnSync, type SpawnSyncReturns } from 'node:child_process';
import * as fs from 'node:fs';
import * as os from 'node:os';
import * as path from 'node:path';
import { test } from 'node:test';
import { fileURLToPath } from 'node:url';

import { encodePng, type Image } from '../src/png.js';

const SRC = fileURLToPath(new URL('../src/', import.meta.url));
const PYTHON = process.env.HNCG_PYTHON ?? 'python3';

function primary(args: string[], timeoutMs = 120_000): SpawnSyncReturns<string> {
  return spawnSync(PYTHON, ['-m', 'hncg.cli', ...args], { encoding: 'utf8', timeout: timeoutMs });
}

function primaryAvailable(): boolean {
  return spawnSync(PYTHON, ['-c', 'import hncg'], { encoding: 'utf8' }).status === 0;
}

function mkdtemp(tag: string): string {
  return fs.mkdtempSync(path.join(os.tmpdir(), `hncg_conf_${tag}_`));
}

function writeConfigs(dir: string, scenePalettePath: string): {
  synth: string;
  segment: string;
  blend: string;
  features: string;
} {
  const palette = JSON.parse(fs.readFileSync(scenePalettePath, 'utf8'));
  fs.writeFileSync(path.join(dir, 'palette.json'), JSON.stringify(palette));
  fs.writeFileSync(
    path.join(dir, 'seg_weights.json'),
    JSON.stringify({ palette, classMap: 'identity' }),
  );
  fs.writeFileSync(path.join(dir, 'feat_weights.json'), JSON.stringify({ dim: 256 }));
  const write = (name: string, doc: unknown) => {
    const p = path.join(dir, name);
    fs.writeFileSync(p, JSON.stringify(doc));
    return p;
  };
  return {
    synth: write('synth_cfg.json', {
      model: 'passthrough-colorize',
      weights: 'palette.json',
      labelEncoding: 'raw-id',
    }),
    segment: write('seg_cfg.json', { model: 'nearest-color', weights: 'seg_weights.json' }),
    blend: write('blend_cfg.json', { model: 'identity-blend', weights: 'palette.json' }),
    features: write('feat_cfg.json', { model: 'hist-luma-256', weights: 'feat_weights.json' }),
  };
}

test('four-frame run driven by the primary CLI uses all adapters', (t) => {
  if (!primaryAvailable()) {
    assert.fail('primary CLI unavailable: install the Python package (pip install -e ..)');
  }
  const dir = mkdtemp('run');
  const sceneDir = path.join(dir, 'scene');
  let proc = primary(['demo', '--out', sceneDir]);
  assert.equal(proc.status, 0, proc.stderr);
  const cfgs = writeConfigs(dir, path.join(sceneDir, 'palette.json'));

  const node = process.execPath;
  const out = path.join(dir, 'out');
  proc = primary([
    'run',
    '--scene', path.join(sceneDir, 'scene.json'),
    '--out', out,
    '--frames', '4',
    '--synth', `plug:${node} ${path.join(SRC, 'synth.js')} {in} {out} --config ${cfgs.synth}`,
    '--segment', `plug:${node} ${path.join(SRC, 'segment.js')} {in} {out} --config ${cfgs.segment}`,
    '--blend', 'gan-plug',
    '--blend-plug', `${node} ${path.join(SRC, 'blend.js')} {in} {mask} {out} --config ${cfgs.blend}`,
  ]);
  assert.equal(proc.status, 0, proc.stderr);
  for (let k = 0; k < 4; k++) {
    for (const stage of ['semantic', 'synthesized', 'partial', 'hybrid']) {
      assert.ok(
        fs.existsSync(path.join(out, `frame_${k}_${stage}.png`)),
        `missing frame_${k}_${stage}.png`,
      );
    }
  }
  assert.ok(fs.existsSync(path.join(out, 'report.json')));
  // the colorize synthesizer + nearest-color segmenter keep the layout exact
  const report = JSON.parse(fs.readFileSync(path.join(out, 'report.json'), 'utf8'));
  assert.equal(report.rows[0].retention, 1.0);
});

test('primary rejects a dimension-violating blend plug with exit 3', () => {
  if (!primaryAvailable()) {
    assert.fail('primary CLI unavailable: install the Python package (pip install -e ..)');
  }
  const dir = mkdtemp('dims');
  const sceneDir = path.join(dir, 'scene');
  assert.equal(primary(['demo', '--out', sceneDir]).status, 0);
  const bad = path.join(dir, 'wrong_size.mjs');
  fs.writeFileSync(
    bad,
    `import * as fs from 'node:fs';\n` +
      `import { encodePng } from '${path.join(SRC, 'png.js')}';\n` +
      `fs.writeFileSync(process.argv[4], Buffer.from(encodePng({` +
      `width: 8, height: 8, channels: 3, data: new Uint8Array(192) })));\n`,
  );
  const proc = primary([
    'blend',
    '--scene', path.join(sceneDir, 'scene.json'),
    '--out', path.join(dir, 'out'),
    '--blend', 'gan-plug',
    '--blend-plug', `${process.execPath} ${bad} {in} {mask} {out}`,
  ]);
  assert.equal(proc.status, 3, proc.stderr);
});

function gradientImage(seed: number, size = 64): Image {
  // smooth ramp plus deterministic LCG noise: a stand-in for "real" photos
  let state = (seed * 2654435761) >>> 0;
  const next = () => {
    state = (state * 1664525 + 1013904223) >>> 0;
    return (state >>> 8) / 0x1000000;
  };
  const data = new Uint8Array(size * size * 3);
  const phase = next() * Math.PI;
  for (let y = 0; y < size; y++) {
    for (let x = 0; x < size; x++) {
      const k = 3 * (y * size + x);
      const ramp = (x + y) / (2 * size - 2);
      const wave = 0.5 + 0.5 * Math.sin(phase + (x / size) * 4);
      data[k] = Math.round(255 * Math.min(1, 0.7 * ramp + 0.3 * next()));
      data[k + 1] = Math.round(255 * Math.min(1, 0.6 * wave + 0.4 * next()));
      data[k + 2] = Math.round(255 * Math.min(1, 0.5 * (1 - ramp) + 0.5 * next()));
    }
  }
  return { width: size, height: size, channels: 3, data };
}

test('feature files parse in the primary and FID orders real vs synthesized', () => {
  if (!primaryAvailable()) {
    assert.fail('primary CLI unavailable: install the Python package (pip install -e ..)');
  }
  const dir = mkdtemp('fid');
  const cfgs = writeConfigs(dir, writeDemoPalette(dir));

  // 20 "real" images split into two halves
  const realAll = path.join(dir, 'real');
  const realA = path.join(dir, 'real_a');
  const realB = path.join(dir, 'real_b');
  for (const d of [realAll, realA, realB]) fs.mkdirSync(d);
  for (let k = 0; k < 20; k++) {
    const png = Buffer.from(encodePng(gradientImage(k)));
    fs.writeFileSync(path.join(realAll, `img_${String(k).padStart(2, '0')}.png`), png);
    const split = k % 2 === 0 ? realA : realB;
    fs.writeFileSync(path.join(split, `img_${String(k).padStart(2, '0')}.png`), png);
  }

  // stub-synthesized images from the primary, one per seed
  const sceneDir = path.join(dir, 'scene');
  assert.equal(primary(['demo', '--out', sceneDir]).status, 0);
  const synthDir = path.join(dir, 'synth');
  fs.mkdirSync(synthDir);
  for (let seed = 0; seed < 10; seed++) {
    const out = path.join(dir, `synth_run_${seed}`);
    const proc = primary([
      'synthesize',
      '--scene', path.join(sceneDir, 'scene.json'),
      '--out', out,
      '--seed', String(seed),
    ]);
    assert.equal(proc.status, 0, proc.stderr);
    fs.copyFileSync(
      path.join(out, 'frame_0_synthesized.png'),
      path.join(synthDir, `synth_${seed}.png`),
    );
  }

  // features via this package's adapter, consumed by the primary's metric
  const feat = (imgDir: string, name: string) => {
    const out = path.join(dir, name);
    const proc = spawnSync(
      process.execPath,
      [path.join(SRC, 'features-cli.js'), imgDir, out, '--config', cfgs.features],
      { encoding: 'utf8' },
    );
    assert.equal(proc.status, 0, proc.stderr);
    return out;
  };
  const fAll = feat(realAll, 'real.feat');
  const fA = feat(realA, 'real_a.feat');
  const fB = feat(realB, 'real_b.feat');
  const fSynth = feat(synthDir, 'synth.feat');

  const fid = (real: string, fake: string) => {
    const proc = primary(['metrics', 'fid', '--real', real, '--fake', fake]);
    assert.equal(proc.status, 0, proc.stderr);
    return parseFloat(proc.stdout.trim());
  };
  const fidSplit = fid(fA, fB);
  const fidSynth = fid(fAll, fSynth);
  assert.ok(Number.isFinite(fidSplit) && Number.isFinite(fidSynth));
  assert.ok(
    fidSplit < fidSynth,
    `expected FID(real-A, real-B)=${fidSplit} < FID(real, stub-synth)=${fidSynth}`,
  );
});

function writeDemoPalette(dir: string): string {
  const p = path.join(dir, 'demo_palette.json');
  fs.writeFileSync(
    p,
    JSON.stringify([
      { id: 0, color: [0, 0, 0], name: 'void' },
      { id: 1, color: [64, 64, 192], name: 'backdrop' },
      { id: 2, color: [64, 160, 64], name: 'ground' },
      { id: 3, color: [200, 64, 64], name: 'box' },
      { id: 4, color: [224, 224, 64], name: 'marking' },
    ]),
  );
  return p;
}
