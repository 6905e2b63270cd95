/**
 * Deterministic 32-bit PRNG (mulberry32).
 *
 * A local generator keeps exports byte-reproducible under a seed without
 * pulling in a dependency; statistical quality is more than enough for
 * episode rollouts.
 */
export class Rng {
  private state: number;

  constructor(seed: number) {
    if (!Number.isInteger(seed)) {
      throw new Error(`seed must be an integer, got ${seed}`);
    }
    this.state = seed >>> 0;
  }

  /** Uniform double in [0, 1). */
  next(): number {
    this.state = (this.state + 0x6d2b79f5) >>> 0;
    let t = this.state;
    t = Math.imul(t ^ (t >>> 15), t | 1);
    t ^= t + Math.imul(t ^ (t >>> 7), t | 61);
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  }

  /** Uniform double in [lo, hi). */
  uniform(lo: number, hi: number): number {
    return lo + (hi - lo) * this.next();
  }

  /** Uniform integer in 0..n-1. */
  int(n: number): number {
    if (!Number.isInteger(n) || n <= 0) {
      throw new Error(`int() needs a positive integer bound, got ${n}`);
    }
    return Math.floor(this.next() * n);
  }
}
