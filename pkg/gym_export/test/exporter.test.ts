import fs from 'node:fs';
import os from 'node:os';
import path from 'node:path';

import { afterEach, beforeEach, describe, expect, it } from 'vitest';

import { episodePath, exportTrajectories } from '../src/exporter.js';

let dir: string;

beforeEach(() => {
  dir = fs.mkdtempSync(path.join(os.tmpdir(), 'gym-export-'));
});

afterEach(() => {
  fs.rmSync(dir, { recursive: true, force: true });
});

interface Row {
  t: number;
  x: number[];
}

function readRows(file: string): Row[] {
  return fs.readFileSync(file, 'utf8').trim().split('\n')
    .map((line) => JSON.parse(line) as Row);
}

function spec(overrides: object) {
  return {
    envId: 'FrozenLake-v1', episodes: 1, maxSteps: 100,
    policy: 'random' as const, seed: 0,
    outPath: path.join(dir, 'traj.jsonl'), concat: false,
    ...overrides,
  };
}

describe('exportTrajectories', () => {
  it('writes one schema-clean file per episode', () => {
    const files = exportTrajectories(spec({ episodes: 3 }));
    expect(files).toBe(3);
    for (let ep = 1; ep <= 3; ep++) {
      const rows = readRows(path.join(dir, `traj.ep00${ep}.jsonl`));
      expect(rows.length).toBeGreaterThan(0);
      rows.forEach((row, i) => {
        expect(row.t).toBe(i + 1);
        expect(row.x).toHaveLength(17);
        for (const v of row.x) expect(Number.isFinite(v)).toBe(true);
      });
    }
  });

  it('concatenates with t strictly increasing across episodes', () => {
    const out = path.join(dir, 'all.jsonl');
    const files = exportTrajectories(
      spec({ episodes: 5, concat: true, outPath: out }));
    expect(files).toBe(1);
    const rows = readRows(out);
    rows.forEach((row, i) => expect(row.t).toBe(i + 1));
    // five random-walk episodes produce more steps than any single one
    expect(rows.length).toBeGreaterThan(5);
  });

  it('reproduces byte-identical files for a seed', () => {
    const a = path.join(dir, 'a.jsonl');
    const b = path.join(dir, 'b.jsonl');
    const c = path.join(dir, 'c.jsonl');
    exportTrajectories(
      spec({ envId: 'CartPole-v1', concat: true, outPath: a, seed: 9 }));
    exportTrajectories(
      spec({ envId: 'CartPole-v1', concat: true, outPath: b, seed: 9 }));
    exportTrajectories(
      spec({ envId: 'CartPole-v1', concat: true, outPath: c, seed: 10 }));
    expect(fs.readFileSync(a)).toEqual(fs.readFileSync(b));
    expect(fs.readFileSync(a)).not.toEqual(fs.readFileSync(c));
  });

  it('caps episode length at max-steps', () => {
    const out = path.join(dir, 'cap.jsonl');
    exportTrajectories(
      spec({ envId: 'CartPole-v1', maxSteps: 7, concat: true, outPath: out }));
    expect(readRows(out).length).toBeLessThanOrEqual(7);
  });

  it('follows a greedy table along the safe path', () => {
    // down, down, right, right, down, right: 0->4->8->9->10->14->15
    const best: Record<number, number> = { 0: 1, 4: 1, 8: 3, 9: 3, 10: 1, 14: 3 };
    const params = Array.from({ length: 16 }, (_, s) => {
      const row = [0, 0, 0, 0];
      if (s in best) row[best[s]] = 1;
      return row;
    });
    const table = path.join(dir, 'table.json');
    fs.writeFileSync(table, JSON.stringify(
      { env: 'gridworld', kind: 'tabular', params }));
    const out = path.join(dir, 'greedy.jsonl');
    exportTrajectories(spec({
      policy: 'greedy', tablePath: table, concat: true, outPath: out,
    }));
    const rows = readRows(out);
    expect(rows).toHaveLength(6);
    const states = rows.map((row) => row.x.findIndex((v) => v === 1));
    expect(states).toEqual([0, 4, 8, 9, 10, 14]);
  });

  it('rejects bad specs and mismatched tables', () => {
    expect(() => exportTrajectories(spec({ episodes: 0 })))
      .toThrow('episodes');
    expect(() => exportTrajectories(spec({ maxSteps: 0 })))
      .toThrow('max-steps');
    expect(() => exportTrajectories(spec({ envId: 'Breakout-v4' })))
      .toThrow('unknown env');
    expect(() => exportTrajectories(spec({ policy: 'greedy' })))
      .toThrow('--table');
    const table = path.join(dir, 'cart.json');
    fs.writeFileSync(table, JSON.stringify(
      { env: 'cartpole', kind: 'tabular', params: [[0, 0, 0, 0]] }));
    expect(() => exportTrajectories(
      spec({ policy: 'greedy', tablePath: table })))
      .toThrow("written for env 'cartpole'");
    const linear = path.join(dir, 'linear.json');
    fs.writeFileSync(linear, JSON.stringify(
      { env: 'gridworld', kind: 'linear', params: [[0, 0, 0, 0]] }));
    expect(() => exportTrajectories(
      spec({ policy: 'greedy', tablePath: linear })))
      .toThrow('tabular');
  });

  it('derives per-episode file names that sort in order', () => {
    expect(episodePath('runs/out.jsonl', 2, 12)).toBe('runs/out.ep002.jsonl');
    expect(episodePath('plain', 7, 7)).toBe('plain.ep007');
    expect(episodePath('x.jsonl', 3, 1500)).toBe('x.ep0003.jsonl');
  });
});
