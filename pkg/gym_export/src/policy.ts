/**
 * Episode policies. Deliberately minimal: uniform-random actions, or a
 * greedy lookup in a tabular action-value file written by the taumix
 * trainer ({"env": ..., "kind": "tabular", "params": [[...], ...]}).
 */
import fs from 'node:fs';

import { Env, EnvState } from './envs.js';
import { Rng } from './rng.js';

export interface Policy {
  act(state: EnvState, rng: Rng): number;
}

export class RandomPolicy implements Policy {
  constructor(private readonly nActions: number) {}

  act(_state: EnvState, rng: Rng): number {
    return rng.int(this.nActions);
  }
}

export class GreedyTablePolicy implements Policy {
  private readonly table: number[][];

  constructor(table: number[][]) {
    this.table = table;
  }

  act(state: EnvState, _rng: Rng): number {
    if (typeof state !== 'number') {
      throw new Error('greedy table policy needs a discrete state');
    }
    const row = this.table[state];
    if (!row) {
      throw new Error(`state ${state} outside the ${this.table.length}-row table`);
    }
    let best = 0;
    for (let a = 1; a < row.length; a++) {
      if (row[a] > row[best]) best = a;
    }
    return best;
  }
}

const TABLE_ENV_ALIASES: Record<string, string[]> = {
  'FrozenLake-v1': ['gridworld', 'frozenlake', 'frozenlake-v1'],
  'CartPole-v1': ['cartpole', 'cartpole-v1'],
};

/** Load and validate a greedy action-value table for the given env. */
export function loadGreedyTable(path: string, env: Env): GreedyTablePolicy {
  let parsed: unknown;
  try {
    parsed = JSON.parse(fs.readFileSync(path, 'utf8'));
  } catch (e) {
    throw new Error(`cannot read table file ${path}: ${e}`);
  }
  const rec = parsed as Record<string, unknown>;
  if (typeof rec !== 'object' || rec === null) {
    throw new Error(`table file ${path} is not a JSON object`);
  }
  for (const key of ['env', 'kind', 'params']) {
    if (!(key in rec)) {
      throw new Error(`table file ${path} is missing field '${key}'`);
    }
  }
  if (rec.kind !== 'tabular') {
    throw new Error(
      `greedy table policy requires a tabular table, got kind '${rec.kind}'`);
  }
  const accepted = TABLE_ENV_ALIASES[env.id] ?? [];
  if (typeof rec.env !== 'string'
      || !accepted.includes(rec.env.toLowerCase())) {
    throw new Error(
      `table file ${path} was written for env '${rec.env}', not ${env.id}`);
  }
  const params = rec.params;
  if (!Array.isArray(params) || params.length === 0
      || !params.every(
        (row) => Array.isArray(row) && row.length === env.nActions
          && row.every((v) => typeof v === 'number' && Number.isFinite(v)))) {
    throw new Error(
      `table file ${path} needs a finite matrix with ${env.nActions} columns`);
  }
  return new GreedyTablePolicy(params as number[][]);
}
