/**
 * Episode runner and JSONL writer. Rows follow the taumix trajectory
 * schema: {"t": <1-based step>, "x": [numbers]} with t strictly
 * increasing per file.
 */
import fs from 'node:fs';
import path from 'node:path';

import { Env, makeEnv } from './envs.js';
import { Policy, RandomPolicy, loadGreedyTable } from './policy.js';
import { Rng } from './rng.js';

export interface ExportSpec {
  envId: string;
  episodes: number;
  maxSteps: number;
  policy: 'random' | 'greedy';
  /** Action-value table file; required for the greedy policy. */
  tablePath?: string;
  seed: number;
  outPath: string;
  /** Write one concatenated file instead of one file per episode. */
  concat: boolean;
}

function rollEpisode(env: Env, policy: Policy, rng: Rng,
                     maxSteps: number): number[][] {
  const rows: number[][] = [];
  let state = env.reset(rng);
  for (let step = 0; step < maxSteps; step++) {
    const action = policy.act(state, rng);
    const row = env.encode(state, action);
    if (row.length !== env.rowLength) {
      throw new Error(
        `encoding dimension drift: expected ${env.rowLength} values, ` +
        `got ${row.length} at step ${step + 1}`);
    }
    rows.push(row);
    const result = env.step(state, action, rng);
    state = result.state;
    if (result.done) break;
  }
  return rows;
}

function writeJsonl(filePath: string, rows: number[][], tStart: number): void {
  const lines = rows.map(
    (x, i) => JSON.stringify({ t: tStart + i, x }));
  fs.writeFileSync(filePath, lines.join('\n') + '\n');
}

/** Per-episode output name: inserts .epNNN before the extension. */
export function episodePath(outPath: string, episode: number,
                            episodes: number): string {
  const width = Math.max(3, String(episodes).length);
  const tag = `.ep${String(episode).padStart(width, '0')}`;
  const ext = path.extname(outPath);
  if (ext === '') return outPath + tag;
  return outPath.slice(0, -ext.length) + tag + ext;
}

/** Run the configured episodes and write JSONL; returns files written. */
export function exportTrajectories(spec: ExportSpec): number {
  if (!Number.isInteger(spec.episodes) || spec.episodes < 1) {
    throw new Error(`episodes must be >= 1, got ${spec.episodes}`);
  }
  if (!Number.isInteger(spec.maxSteps) || spec.maxSteps < 1) {
    throw new Error(`max-steps must be >= 1, got ${spec.maxSteps}`);
  }
  const env = makeEnv(spec.envId);
  let policy: Policy;
  if (spec.policy === 'random') {
    policy = new RandomPolicy(env.nActions);
  } else if (spec.policy === 'greedy') {
    if (!spec.tablePath) {
      throw new Error('greedy policy needs --table <action-value file>');
    }
    policy = loadGreedyTable(spec.tablePath, env);
  } else {
    throw new Error(`unknown policy '${spec.policy}'`);
  }

  const rng = new Rng(spec.seed);
  if (spec.concat) {
    const all: number[][] = [];
    for (let ep = 0; ep < spec.episodes; ep++) {
      all.push(...rollEpisode(env, policy, rng, spec.maxSteps));
    }
    writeJsonl(spec.outPath, all, 1);
    return 1;
  }
  for (let ep = 1; ep <= spec.episodes; ep++) {
    const rows = rollEpisode(env, policy, rng, spec.maxSteps);
    writeJsonl(episodePath(spec.outPath, ep, spec.episodes), rows, 1);
  }
  return spec.episodes;
}
