"""A DQN-style training loop at desk scale.

The data path matches the standard deep-Q recipe: epsilon-greedy acting with
linear decay, FIFO replay, minibatch Bellman regression against a target
network with periodic interpolation sync.  Q is tabular for discrete states
and linear-in-features for continuous ones; every sampled minibatch is logged
before its gradient step so the dependence structure of the training stream
can be studied offline.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .estimator import ObservationSequence
from .samplers import (
    InfeasibleConfigError,
    ReplayBuffer,
    _check_block_shape,
    gather_minibatch,
    plan_blocks,
    sample_contiguous_blocks,
    sample_contiguous_blocks_wraparound,
    sample_uniform_with_replacement,
    sample_uniform_without_replacement_sorted,
)
from .envs import Transition


@dataclass(frozen=True)
class TrainConfig:
    gamma: float = 0.99
    buffer_capacity: int = 50_000
    max_episodes: int = 500
    minibatch_size: int = 128
    eps_initial: float = 1.0
    eps_min: float = 0.05
    exploration_fraction: float = 0.3
    learning_rate: float = 1e-3
    tau_target: float = 1.0
    target_period: int = 100
    start_time: int = 1000
    update_frequency: int = 128
    num_updates: int = 1
    sampler_kind: str = "uniform_with_replacement"
    sampler_params: dict = field(default_factory=dict)
    seed: int = 0

    def __post_init__(self):
        # gamma=0 (pure one-step rewards) is a supported degenerate case used
        # to sanity-check the update rule
        if not 0.0 <= self.gamma < 1.0:
            raise ValueError("gamma must be in [0, 1)")
        if self.start_time > self.buffer_capacity:
            raise ValueError("start_time cannot exceed buffer_capacity")


# Per-environment defaults for the full-scale experiments; tests override the
# sizes down.  Network-specific fields are reinterpreted for tabular/linear Q.
PRESETS = {
    "cartpole": TrainConfig(
        gamma=0.99, buffer_capacity=100_000, max_episodes=1000,
        minibatch_size=128, eps_initial=0.99, eps_min=0.05,
        exploration_fraction=0.2, learning_rate=1e-3, tau_target=1.0,
        target_period=10, update_frequency=256),
    "gridworld": TrainConfig(
        gamma=0.99, buffer_capacity=50_000, max_episodes=5000,
        minibatch_size=128, eps_initial=0.999, eps_min=0.05,
        exploration_fraction=0.3, learning_rate=1e-3, tau_target=1.0,
        target_period=1000, update_frequency=128),
}


class QFunction:
    """Action-value function: a table over discrete states or linear weights
    over continuous features, one column per action."""

    def __init__(self, kind, n_actions, n_states=None, n_features=None):
        self.kind = kind
        self.n_actions = n_actions
        if kind == "tabular":
            self.params = np.zeros((n_states, n_actions))
        elif kind == "linear":
            self.params = np.zeros((n_features, n_actions))
        else:
            raise ValueError(f"unknown QFunction kind {kind!r}")

    @classmethod
    def for_env(cls, env):
        if env.kind == "gridworld":
            return cls("tabular", env.n_actions, n_states=env.n_states)
        return cls("linear", env.n_actions, n_features=4)

    def values(self, s):
        if self.kind == "tabular":
            return self.params[int(s)]
        return np.asarray(s, dtype=np.float64) @ self.params

    def greedy_action(self, s):
        return int(np.argmax(self.values(s)))

    def copy(self):
        out = object.__new__(QFunction)
        out.kind = self.kind
        out.n_actions = self.n_actions
        out.params = self.params.copy()
        return out

    def sgd_step(self, transitions, targets, learning_rate):
        """One pass of per-sample gradient steps on the squared error."""
        if self.kind == "tabular":
            for tr, y in zip(transitions, targets):
                s, a = int(tr.s), tr.a
                self.params[s, a] += learning_rate * (y - self.params[s, a])
        else:
            for tr, y in zip(transitions, targets):
                phi = np.asarray(tr.s, dtype=np.float64)
                pred = phi @ self.params[:, tr.a]
                self.params[:, tr.a] += learning_rate * (y - pred) * phi

    def interpolate_from(self, other, tau):
        """theta <- tau * other + (1 - tau) * theta; tau=1 is a hard copy."""
        self.params *= 1.0 - tau
        self.params += tau * other.params


@dataclass
class LoggedUpdate:
    update: int
    sampler_kind: str
    params: dict
    indices: np.ndarray
    rows: np.ndarray


@dataclass
class TrainResult:
    q: QFunction
    minibatch_log: list
    episode_returns: list
    skipped_updates: int
    config: TrainConfig
    trajectory: list


SAMPLER_KINDS = (
    "uniform_with_replacement",
    "without_replacement_sorted",
    "contiguous_blocks",
    "contiguous_blocks_wraparound",
)


def _block_footprint(n, b, a):
    q, rem = divmod(n, b)
    return (q - 1) * (a + b) + b if rem == 0 else q * (a + b) + rem


def validate_sampler_config(config):
    """Reject sampler settings that could never produce a batch, before any
    training work happens."""
    n = config.minibatch_size
    kind = config.sampler_kind
    if kind not in SAMPLER_KINDS:
        raise ValueError(f"unknown sampler kind {kind!r}")
    if kind == "uniform_with_replacement":
        return
    if n > config.buffer_capacity:
        raise InfeasibleConfigError(
            f"minibatch size {n} exceeds buffer capacity "
            f"{config.buffer_capacity}")
    if kind in ("contiguous_blocks", "contiguous_blocks_wraparound"):
        b = config.sampler_params.get("b", n)
        a = config.sampler_params.get("a", 0)
        _check_block_shape(n, b, a)
        if kind == "contiguous_blocks":
            footprint = _block_footprint(n, b, a)
            if footprint > config.buffer_capacity:
                raise InfeasibleConfigError(
                    f"block plan footprint {footprint} exceeds buffer "
                    f"capacity {config.buffer_capacity}")


def _draw_batch(config, buffer_size, rng):
    """Sample an index batch for the current buffer size, or None if the
    sampler configuration cannot fit yet."""
    n = config.minibatch_size
    kind = config.sampler_kind
    p = config.sampler_params
    if kind == "uniform_with_replacement":
        return sample_uniform_with_replacement(buffer_size, n, rng)
    if kind == "without_replacement_sorted":
        if n > buffer_size:
            return None
        return sample_uniform_without_replacement_sorted(buffer_size, n, rng)
    if kind == "contiguous_blocks":
        b = p.get("b", n)
        a = p.get("a", 0)
        footprint = _block_footprint(n, b, a)
        if footprint > buffer_size:
            return None
        t0 = int(rng.integers(0, buffer_size - footprint + 1))
        return sample_contiguous_blocks(plan_blocks(buffer_size, n, b, a, t0))
    if kind == "contiguous_blocks_wraparound":
        if n > buffer_size:
            return None
        b = p.get("b", n)
        a = p.get("a", 0)
        t0 = int(rng.integers(0, buffer_size))
        try:
            return sample_contiguous_blocks_wraparound(buffer_size, n, b, a, t0)
        except InfeasibleConfigError:
            return None
    raise ValueError(f"unknown sampler kind {kind!r}")


def _epsilon(step, config, total_steps):
    decay_steps = max(1, int(config.exploration_fraction * total_steps))
    frac = min(step / decay_steps, 1.0)
    return config.eps_initial + (config.eps_min - config.eps_initial) * frac


def bellman_targets(transitions, q_target, gamma):
    """y = r + gamma * max_a Q_target(s', a), or y = r at terminal steps."""
    out = np.empty(len(transitions))
    for j, tr in enumerate(transitions):
        if tr.done:
            out[j] = tr.r
        else:
            out[j] = tr.r + gamma * float(np.max(q_target.values(tr.s_next)))
    return out


def dqn_train(env, config: TrainConfig) -> TrainResult:
    validate_sampler_config(config)
    rng = np.random.default_rng(config.seed)
    q = QFunction.for_env(env)
    target = q.copy()
    buffer = ReplayBuffer(config.buffer_capacity, env_kind=env.kind)
    log = []
    returns = []
    trajectory = []
    skipped = 0
    total_steps = config.max_episodes * env.max_episode_steps
    global_step = 0
    update_counter = 0

    for _ in range(config.max_episodes):
        s = env.reset(rng)
        ep_return = 0.0
        for _ in range(env.max_episode_steps):
            eps = _epsilon(global_step, config, total_steps)
            if rng.random() < eps:
                a = int(rng.integers(0, env.n_actions))
            else:
                a = q.greedy_action(s)
            s_next, r, done = env.step(s, a, rng)
            buffer.append(Transition(s, a, r, s_next, done))
            trajectory.append(env.encode(s, a))
            global_step += 1
            ep_return += r

            if buffer.size >= config.start_time and global_step % config.update_frequency == 0:
                for _ in range(config.num_updates):
                    batch = _draw_batch(config, buffer.size, rng)
                    if batch is None:
                        skipped += 1
                        continue
                    update_counter += 1
                    encoded, transitions = gather_minibatch(buffer, batch)
                    log.append(LoggedUpdate(
                        update=update_counter,
                        sampler_kind=batch.sampler_kind,
                        params=dict(batch.params),
                        indices=batch.indices.copy(),
                        rows=encoded.data,
                    ))
                    targets = bellman_targets(transitions, target, config.gamma)
                    q.sgd_step(transitions, targets, config.learning_rate)

            if global_step % config.target_period == 0:
                target.interpolate_from(q, config.tau_target)
            s = s_next
            if done:
                break
        returns.append(ep_return)
    return TrainResult(q=q, minibatch_log=log, episode_returns=returns,
                       skipped_updates=skipped, config=config,
                       trajectory=trajectory)


def greedy_rollout(env, q: QFunction, T_max, seed=0, stop_at_terminal=False) -> ObservationSequence:
    """Encoded state-action rows under the greedy policy, episodes
    concatenated across resets until T_max rows (or first terminal)."""
    rng = np.random.default_rng(seed)
    rows = []
    s = env.reset(rng)
    steps_in_episode = 0
    while len(rows) < T_max:
        a = q.greedy_action(s)
        rows.append(env.encode(s, a))
        s_next, _, done = env.step(s, a, rng)
        steps_in_episode += 1
        if done or steps_in_episode >= env.max_episode_steps:
            if stop_at_terminal:
                break
            s = env.reset(rng)
            steps_in_episode = 0
        else:
            s = s_next
    return ObservationSequence(np.vstack(rows), label=f"{env.kind}-greedy")
