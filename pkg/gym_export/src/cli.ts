#!/usr/bin/env node
/**
 * gym-export: run seeded episodes in a native environment and write
 * taumix-format trajectory JSONL.
 */
import { parseArgs } from 'node:util';

import { UnknownEnvError } from './envs.js';
import { ExportSpec, exportTrajectories } from './exporter.js';

export const USAGE = `usage: gym-export --env <id> --out <path> [options]

  --env <id>        environment id (FrozenLake-v1, CartPole-v1)
  --out <path>      output path (per-episode files derive .epNNN names)
  --episodes <n>    episodes to run (default 1)
  --max-steps <n>   per-episode step cap (default 500)
  --policy <name>   random | greedy (default random)
  --table <path>    tabular action-value JSON for --policy greedy
  --seed <n>        integer seed (default 0)
  --concat          single concatenated file instead of one per episode
  --help            show this message`;

function intFlag(raw: string | undefined, name: string, fallback: number): number {
  if (raw === undefined) return fallback;
  const value = Number(raw);
  if (!Number.isInteger(value)) {
    throw new Error(`--${name} must be an integer, got '${raw}'`);
  }
  return value;
}

/** Parse argv into an ExportSpec; throws on usage errors. */
export function parseSpec(argv: string[]): ExportSpec | null {
  const { values } = parseArgs({
    args: argv,
    options: {
      env: { type: 'string' },
      out: { type: 'string' },
      episodes: { type: 'string' },
      'max-steps': { type: 'string' },
      policy: { type: 'string', default: 'random' },
      table: { type: 'string' },
      seed: { type: 'string' },
      concat: { type: 'boolean', default: false },
      help: { type: 'boolean', default: false },
    },
    strict: true,
  });
  if (values.help) return null;
  if (!values.env) throw new Error('--env is required');
  if (!values.out) throw new Error('--out is required');
  if (values.policy !== 'random' && values.policy !== 'greedy') {
    throw new Error(`--policy must be random or greedy, got '${values.policy}'`);
  }
  return {
    envId: values.env,
    episodes: intFlag(values.episodes, 'episodes', 1),
    maxSteps: intFlag(values['max-steps'], 'max-steps', 500),
    policy: values.policy,
    tablePath: values.table,
    seed: intFlag(values.seed, 'seed', 0),
    outPath: values.out,
    concat: values.concat,
  };
}

export function main(argv: string[]): number {
  const spec = parseSpec(argv);
  if (spec === null) {
    console.log(USAGE);
    return 0;
  }
  const files = exportTrajectories(spec);
  console.log(`wrote ${files} file(s) to ${spec.outPath}`);
  return 0;
}

const entry = process.argv[1] ?? '';
if (entry.endsWith('cli.js') || entry.endsWith('gym-export')) {
  try {
    process.exit(main(process.argv.slice(2)));
  } catch (err) {
    console.error(String(err instanceof Error ? err.message : err));
    process.exit(err instanceof UnknownEnvError ? 2 : 1);
  }
}
