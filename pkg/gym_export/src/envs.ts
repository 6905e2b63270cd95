/**
 * Native environment implementations with the taumix row encoding:
 * discrete states become one-hot vectors, continuous states stay raw,
 * and the chosen action is appended as the last coordinate.
 */
import { Rng } from './rng.js';

export type EnvState = number | number[];

export interface StepResult {
  state: EnvState;
  reward: number;
  done: boolean;
}

export interface Env {
  readonly id: string;
  readonly nActions: number;
  /** Encoded row length; constant per environment. */
  readonly rowLength: number;
  readonly maxEpisodeSteps: number;
  reset(rng: Rng): EnvState;
  step(state: EnvState, action: number, rng: Rng): StepResult;
  encode(state: EnvState, action: number): number[];
}

export class UnknownEnvError extends Error {}

/**
 * 4x4 frozen-lake grid, row-major cells 0..15: start top-left, goal
 * bottom-right (reward 1), holes at 5, 7, 11, 12 (episode ends, no
 * reward). Actions: 0 up, 1 down, 2 left, 3 right; walls clamp.
 * Deterministic transitions.
 */
export class FrozenLake implements Env {
  readonly id = 'FrozenLake-v1';
  readonly nStates = 16;
  readonly nActions = 4;
  readonly rowLength = 17;
  readonly maxEpisodeSteps = 100;
  readonly holes = new Set([5, 7, 11, 12]);
  readonly goal = 15;

  reset(_rng: Rng): number {
    return 0;
  }

  step(state: EnvState, action: number, _rng: Rng): StepResult {
    const s = this.checkState(state);
    if (!Number.isInteger(action) || action < 0 || action >= this.nActions) {
      throw new Error(`invalid action ${action}`);
    }
    if (this.holes.has(s) || s === this.goal) {
      return { state: s, reward: 0, done: true };
    }
    let row = Math.floor(s / 4);
    let col = s % 4;
    if (action === 0) row = Math.max(0, row - 1);
    else if (action === 1) row = Math.min(3, row + 1);
    else if (action === 2) col = Math.max(0, col - 1);
    else col = Math.min(3, col + 1);
    const nxt = 4 * row + col;
    if (nxt === this.goal) return { state: nxt, reward: 1, done: true };
    if (this.holes.has(nxt)) return { state: nxt, reward: 0, done: true };
    return { state: nxt, reward: 0, done: false };
  }

  encode(state: EnvState, action: number): number[] {
    const s = this.checkState(state);
    const row = new Array<number>(this.rowLength).fill(0);
    row[s] = 1;
    row[this.rowLength - 1] = action;
    return row;
  }

  private checkState(state: EnvState): number {
    if (typeof state !== 'number' || !Number.isInteger(state)
        || state < 0 || state >= this.nStates) {
      throw new Error(`invalid state ${state}`);
    }
    return state;
  }
}

/**
 * Classic cart-pole balancing task: 4-dimensional continuous state
 * [x, xDot, theta, thetaDot], two actions pushing left/right, Euler
 * integration at dt=0.02. Episode ends when |x| > 2.4 or |theta| > 12
 * degrees.
 */
export class CartPole implements Env {
  readonly id = 'CartPole-v1';
  readonly nActions = 2;
  readonly rowLength = 5;
  readonly maxEpisodeSteps = 500;

  private readonly gravity = 9.8;
  private readonly massCart = 1.0;
  private readonly massPole = 0.1;
  private readonly halfLength = 0.5;
  private readonly forceMag = 10.0;
  private readonly dt = 0.02;
  private readonly xThreshold = 2.4;
  private readonly thetaThreshold = (12 * 2 * Math.PI) / 360;

  reset(rng: Rng): number[] {
    const state = new Array<number>(4);
    for (let i = 0; i < 4; i++) state[i] = rng.uniform(-0.05, 0.05);
    return state;
  }

  step(state: EnvState, action: number, _rng: Rng): StepResult {
    const [x, xDot, theta, thetaDot] = this.checkState(state);
    if (action !== 0 && action !== 1) {
      throw new Error(`invalid action ${action}`);
    }
    const totalMass = this.massCart + this.massPole;
    const poleMassLength = this.massPole * this.halfLength;
    const force = action === 1 ? this.forceMag : -this.forceMag;
    const cos = Math.cos(theta);
    const sin = Math.sin(theta);
    const temp =
      (force + poleMassLength * thetaDot * thetaDot * sin) / totalMass;
    const thetaAcc =
      (this.gravity * sin - cos * temp) /
      (this.halfLength * (4.0 / 3.0 - (this.massPole * cos * cos) / totalMass));
    const xAcc = temp - (poleMassLength * thetaAcc * cos) / totalMass;
    const nxt = [
      x + this.dt * xDot,
      xDot + this.dt * xAcc,
      theta + this.dt * thetaDot,
      thetaDot + this.dt * thetaAcc,
    ];
    const done =
      Math.abs(nxt[0]) > this.xThreshold ||
      Math.abs(nxt[2]) > this.thetaThreshold;
    return { state: nxt, reward: 1, done };
  }

  encode(state: EnvState, action: number): number[] {
    return [...this.checkState(state), action];
  }

  private checkState(state: EnvState): number[] {
    if (!Array.isArray(state) || state.length !== 4
        || state.some((v) => typeof v !== 'number' || !Number.isFinite(v))) {
      throw new Error(`invalid state ${JSON.stringify(state)}`);
    }
    return state;
  }
}

const ALIASES: Record<string, () => Env> = {
  'frozenlake-v1': () => new FrozenLake(),
  frozenlake: () => new FrozenLake(),
  gridworld: () => new FrozenLake(),
  'cartpole-v1': () => new CartPole(),
  cartpole: () => new CartPole(),
};

/** Resolve an environment id (case-insensitive, version suffix optional). */
export function makeEnv(envId: string): Env {
  const factory = ALIASES[envId.toLowerCase()];
  if (!factory) {
    throw new UnknownEnvError(
      `unknown env id '${envId}' (known: FrozenLake-v1, CartPole-v1)`);
  }
  return factory();
}
