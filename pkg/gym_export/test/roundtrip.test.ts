import { spawnSync } from 'node:child_process';
import fs from 'node:fs';
import os from 'node:os';
import path from 'node:path';

import { afterEach, beforeEach, describe, expect, it } from 'vitest';

import { exportTrajectories } from '../src/exporter.js';

let dir: string;

beforeEach(() => {
  dir = fs.mkdtempSync(path.join(os.tmpdir(), 'gym-export-rt-'));
});

afterEach(() => {
  fs.rmSync(dir, { recursive: true, force: true });
});

function estimate(file: string, out: string) {
  return spawnSync('python3', [
    '-m', 'taumix.cli', 'estimate', '--input', file,
    '--r', '5', '--K', '5', '--out', out,
  ], { encoding: 'utf8', timeout: 120_000 });
}

describe('round-trip into the taumix estimator', () => {
  it('16-state export parses under estimate with zero format errors', () => {
    const out = path.join(dir, 'lake.jsonl');
    exportTrajectories({
      envId: 'FrozenLake-v1', episodes: 20, maxSteps: 100,
      policy: 'random', seed: 0, outPath: out, concat: true,
    });
    const rows = fs.readFileSync(out, 'utf8').trim().split('\n');
    expect(rows.length).toBeGreaterThan(30);
    expect((JSON.parse(rows[0]) as { x: number[] }).x).toHaveLength(17);

    const curve = path.join(dir, 'curve.csv');
    const res = estimate(out, curve);
    expect(res.status, res.stderr).toBe(0);
    // The estimator writes RFC 4180 CSV, so lines end in CRLF.
    const header = fs.readFileSync(curve, 'utf8').split(/\r?\n/)[0];
    expect(header).toBe('k,mean,se,n_replicates');
  });

  it('cart-pole export parses under estimate as well', () => {
    const out = path.join(dir, 'cart.jsonl');
    exportTrajectories({
      envId: 'CartPole-v1', episodes: 5, maxSteps: 200,
      policy: 'random', seed: 3, outPath: out, concat: true,
    });
    const res = estimate(out, path.join(dir, 'curve.csv'));
    expect(res.status, res.stderr).toBe(0);
  });
});
