"""Toy environments and the state-action encoding the estimator consumes."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .validation import as_rng

UP, DOWN, LEFT, RIGHT = 0, 1, 2, 3
_PERPENDICULAR = {UP: (LEFT, RIGHT), DOWN: (LEFT, RIGHT),
                  LEFT: (UP, DOWN), RIGHT: (UP, DOWN)}


@dataclass
class Transition:
    s: object
    a: int
    r: float
    s_next: object
    done: bool


def encode_state_action(env_kind, s, a) -> np.ndarray:
    """Fixed-width vector: raw continuous state or one-hot discrete state,
    with the action index appended as the last coordinate."""
    if env_kind == "gridworld":
        a = int(a)
        if not 0 <= a < GridWorld.n_actions:
            raise ValueError(f"action {a} out of range for gridworld")
        s = int(s)
        if not 0 <= s < GridWorld.n_states:
            raise ValueError(f"state {s} out of range for gridworld")
        out = np.zeros(GridWorld.n_states + 1)
        out[s] = 1.0
        out[-1] = float(a)
        return out
    if env_kind == "cartpole":
        a = int(a)
        if not 0 <= a < CartPole.n_actions:
            raise ValueError(f"action {a} out of range for cartpole")
        s = np.asarray(s, dtype=np.float64).ravel()
        if s.shape != (4,):
            raise ValueError(f"cartpole state must have 4 components, got {s.shape}")
        return np.concatenate([s, [float(a)]])
    raise ValueError(f"unknown env kind {env_kind!r}")


def gridworld_step(state, action, slip_prob, rng):
    """One move on the 4x4 grid.  With probability slip_prob the action is
    replaced by a uniformly random perpendicular one; walls clamp; holes and
    the goal terminate."""
    rng = as_rng(rng)
    action = int(action)
    if not 0 <= action < 4:
        raise ValueError(f"invalid action {action}")
    if slip_prob > 0 and rng.random() < slip_prob:
        action = int(rng.choice(_PERPENDICULAR[action]))
    row, col = divmod(int(state), 4)
    if action == UP:
        row = max(row - 1, 0)
    elif action == DOWN:
        row = min(row + 1, 3)
    elif action == LEFT:
        col = max(col - 1, 0)
    else:
        col = min(col + 1, 3)
    nxt = row * 4 + col
    if nxt == GridWorld.goal_state:
        return nxt, 1.0, True
    if nxt in GridWorld.holes:
        return nxt, 0.0, True
    return nxt, 0.0, False


class GridWorld:
    """4x4 grid with four holes and a rewarding terminal goal.

    Cells are indexed row-major 0..15; start is the top-left corner, the goal
    the bottom-right.  Reaching the goal pays 1; holes end the episode with
    no reward.
    """

    kind = "gridworld"
    n_states = 16
    n_actions = 4
    R_max = 1.0
    max_episode_steps = 100
    start_state = 0
    goal_state = 15
    holes = frozenset({5, 7, 11, 12})

    def __init__(self, slip_prob=0.0):
        if not 0.0 <= slip_prob <= 1.0:
            raise ValueError("slip_prob must be in [0, 1]")
        self.slip_prob = slip_prob

    def reset(self, rng=None):
        return self.start_state

    def step(self, state, action, rng=None):
        return gridworld_step(state, action, self.slip_prob, rng)

    def encode(self, s, a):
        return encode_state_action(self.kind, s, a)


def cartpole_step(state, action):
    """One Euler step of the classic cart-pole dynamics (0.02 s)."""
    state = np.asarray(state, dtype=np.float64)
    if state.shape != (4,) or not np.isfinite(state).all():
        raise ValueError("state must be 4 finite reals")
    action = int(action)
    if action not in (0, 1):
        raise ValueError(f"invalid action {action}")
    x, x_dot, theta, theta_dot = state
    force = 10.0 if action == 1 else -10.0
    gravity = 9.8
    mass_cart = 1.0
    mass_pole = 0.1
    total_mass = mass_cart + mass_pole
    half_length = 0.5
    pole_mass_length = mass_pole * half_length
    dt = 0.02

    cos_t = np.cos(theta)
    sin_t = np.sin(theta)
    temp = (force + pole_mass_length * theta_dot ** 2 * sin_t) / total_mass
    theta_acc = (gravity * sin_t - cos_t * temp) / (
        half_length * (4.0 / 3.0 - mass_pole * cos_t ** 2 / total_mass))
    x_acc = temp - pole_mass_length * theta_acc * cos_t / total_mass

    x = x + dt * x_dot
    x_dot = x_dot + dt * x_acc
    theta = theta + dt * theta_dot
    theta_dot = theta_dot + dt * theta_acc
    nxt = np.array([x, x_dot, theta, theta_dot])
    done = bool(abs(x) > 2.4 or abs(theta) > CartPole.theta_threshold)
    return nxt, 1.0, done


class CartPole:
    """Cart-pole balancing with the standard constants and thresholds."""

    kind = "cartpole"
    n_actions = 2
    R_max = 1.0
    max_episode_steps = 500
    theta_threshold = 12.0 * np.pi / 180.0

    def reset(self, rng=None):
        rng = as_rng(rng)
        return rng.uniform(-0.05, 0.05, size=4)

    def step(self, state, action, rng=None):
        return cartpole_step(state, action)

    def encode(self, s, a):
        return encode_state_action(self.kind, s, a)


ENVIRONMENTS = {"gridworld": GridWorld, "cartpole": CartPole}


def make_env(kind, **kwargs):
    try:
        cls = ENVIRONMENTS[kind]
    except KeyError:
        raise ValueError(f"unknown env kind {kind!r}; choose from {sorted(ENVIRONMENTS)}")
    return cls(**kwargs)
