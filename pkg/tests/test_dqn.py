"""Q-learning harness: schedules, update rules, logging, rollouts."""

import numpy as np
import pytest

from taumix.dqn import (
    PRESETS,
    QFunction,
    TrainConfig,
    _epsilon,
    bellman_targets,
    dqn_train,
    greedy_rollout,
    validate_sampler_config,
)
from taumix.envs import CartPole, GridWorld, Transition
from taumix.samplers import InfeasibleConfigError


def test_epsilon_linear_decay():
    cfg = TrainConfig(eps_initial=1.0, eps_min=0.1, exploration_fraction=0.5)
    total = 100  # decay completes at step 50
    assert _epsilon(0, cfg, total) == 1.0
    assert _epsilon(25, cfg, total) == pytest.approx(0.55)
    assert _epsilon(50, cfg, total) == pytest.approx(0.1)
    assert _epsilon(80, cfg, total) == pytest.approx(0.1)
    values = [_epsilon(t, cfg, total) for t in range(0, 100, 5)]
    assert all(b <= a for a, b in zip(values, values[1:]))


def test_bellman_targets_hand_values():
    q = QFunction("tabular", n_actions=4, n_states=16)
    q.params[1] = [0.2, 0.7, 0.1, 0.0]
    ts = [Transition(s=0, a=0, r=1.0, s_next=1, done=False),
          Transition(s=0, a=1, r=2.0, s_next=1, done=True)]
    y = bellman_targets(ts, q, gamma=0.5)
    assert y.tolist() == [1.0 + 0.5 * 0.7, 2.0]
    y0 = bellman_targets(ts, q, gamma=0.0)
    assert y0.tolist() == [1.0, 2.0]


def test_linear_sgd_hand_computed():
    q = QFunction("linear", n_actions=2, n_features=2)
    tr = Transition(s=np.array([1.0, 2.0]), a=1, r=0.0, s_next=None, done=True)
    q.sgd_step([tr], np.array([1.0]), learning_rate=0.5)
    assert q.params[:, 1].tolist() == [0.5, 1.0]
    assert q.params[:, 0].tolist() == [0.0, 0.0]
    q.sgd_step([tr], np.array([1.0]), learning_rate=0.5)
    # pred was 2.5, so the column moves by 0.5*(1-2.5)*phi
    assert q.params[:, 1].tolist() == [-0.25, -0.5]


def test_tabular_sgd_geometric_approach():
    q = QFunction("tabular", n_actions=4, n_states=16)
    tr = Transition(s=3, a=2, r=0.0, s_next=None, done=True)
    for _ in range(3):
        q.sgd_step([tr], np.array([1.0]), learning_rate=0.5)
    assert q.params[3, 2] == pytest.approx(1.0 - 0.5 ** 3)
    assert np.count_nonzero(q.params) == 1


def test_copy_and_interpolate():
    q = QFunction("tabular", n_actions=2, n_states=3)
    q.params[:] = np.arange(6).reshape(3, 2)
    frozen = q.copy()
    q.params[0, 0] = 99.0
    assert frozen.params[0, 0] == 0.0

    target = QFunction("tabular", n_actions=2, n_states=3)
    target.interpolate_from(q, tau=1.0)
    np.testing.assert_array_equal(target.params, q.params)
    target.params[:] = 0.0
    target.interpolate_from(q, tau=0.5)
    np.testing.assert_allclose(target.params, 0.5 * q.params)


def test_for_env_shapes_and_greedy():
    tab = QFunction.for_env(GridWorld())
    assert tab.kind == "tabular" and tab.params.shape == (16, 4)
    lin = QFunction.for_env(CartPole())
    assert lin.kind == "linear" and lin.params.shape == (4, 2)
    lin.params[:, 1] = 1.0
    assert lin.greedy_action(np.array([1.0, 0.0, 0.0, 0.0])) == 1
    with pytest.raises(ValueError):
        QFunction("deep", n_actions=2)


def test_train_config_validation():
    with pytest.raises(ValueError):
        TrainConfig(gamma=1.0)
    with pytest.raises(ValueError):
        TrainConfig(start_time=100, buffer_capacity=50)
    assert TrainConfig(gamma=0.0).gamma == 0.0
    assert set(PRESETS) == {"cartpole", "gridworld"}


def test_validate_sampler_config_errors():
    with pytest.raises(ValueError):
        validate_sampler_config(TrainConfig(sampler_kind="prioritized"))
    with pytest.raises(InfeasibleConfigError):
        validate_sampler_config(TrainConfig(
            sampler_kind="without_replacement_sorted", minibatch_size=64,
            buffer_capacity=50, start_time=10))
    with pytest.raises(ValueError):
        validate_sampler_config(TrainConfig(
            sampler_kind="contiguous_blocks", minibatch_size=64,
            sampler_params={"b": 4, "a": 4}))
    with pytest.raises(InfeasibleConfigError):
        validate_sampler_config(TrainConfig(
            sampler_kind="contiguous_blocks", minibatch_size=64,
            sampler_params={"b": 8, "a": 6}, buffer_capacity=100,
            start_time=50))


def _small_config(**overrides):
    base = dict(gamma=0.0, learning_rate=0.5, buffer_capacity=2000,
                max_episodes=500, minibatch_size=64, eps_initial=1.0,
                eps_min=1.0, exploration_fraction=0.5, start_time=500,
                update_frequency=16, target_period=50, seed=0)
    base.update(overrides)
    return TrainConfig(**base)


def test_gamma_zero_learns_one_step_rewards():
    env = GridWorld(slip_prob=0.0)
    res = dqn_train(env, _small_config())
    for s in range(16):
        if s in GridWorld.holes or s == GridWorld.goal_state:
            continue
        for a in range(4):
            _, r, _ = env.step(s, a)
            assert abs(res.q.params[s, a] - r) <= 1e-3, (s, a)


def test_training_log_structure():
    env = GridWorld(slip_prob=0.0)
    res = dqn_train(env, _small_config(max_episodes=200))
    assert len(res.minibatch_log) > 0
    assert [u.update for u in res.minibatch_log] == list(
        range(1, len(res.minibatch_log) + 1))
    for u in res.minibatch_log:
        assert u.sampler_kind == "uniform_with_replacement"
        assert u.rows.shape == (64, 17)
        assert u.indices.shape == (64,)
        assert np.all((u.indices >= 0) & (u.indices < 2000))
    assert len(res.episode_returns) == 200
    assert len(res.trajectory) >= 500  # ran past the warmup fill
    assert all(row.shape == (17,) for row in res.trajectory)


def test_skipped_updates_counted_not_fatal():
    # without-replacement batches of 50 are infeasible until the buffer
    # holds 50 rows; early update slots must be skipped, later ones drawn
    env = GridWorld(slip_prob=0.0)
    cfg = _small_config(sampler_kind="without_replacement_sorted",
                        minibatch_size=50, start_time=1, update_frequency=5,
                        max_episodes=60)
    res = dqn_train(env, cfg)
    assert res.skipped_updates >= 1
    assert len(res.minibatch_log) >= 1
    for u in res.minibatch_log:
        assert len(np.unique(u.indices)) == 50


def test_tabular_values_stay_bounded():
    env = GridWorld(slip_prob=0.0)
    res = dqn_train(env, _small_config(gamma=0.9, max_episodes=200))
    bound = GridWorld.R_max / (1.0 - 0.9)
    assert np.all(res.q.params >= 0.0)
    assert np.all(res.q.params <= bound + 1e-9)


def test_greedy_rollout_concatenates_episodes():
    env = GridWorld(slip_prob=0.0)
    q = QFunction.for_env(env)
    # all-zero table: greedy picks action 0 (UP), pinned at the start cell,
    # so episodes only end at the step cap and the rollout spans resets
    seq = greedy_rollout(env, q, T_max=250, seed=0)
    assert seq.data.shape == (250, 17)
    assert np.all(seq.data == seq.data[0])


def test_greedy_rollout_stop_at_terminal():
    env = GridWorld(slip_prob=0.0)
    q = QFunction.for_env(env)
    q.params[:, 1] = 1.0  # always DOWN: 0 -> 4 -> 8 -> 12 (hole)
    seq = greedy_rollout(env, q, T_max=100, seed=0, stop_at_terminal=True)
    assert seq.data.shape == (3, 17)
    assert np.argmax(seq.data[0][:16]) == 0
    assert np.argmax(seq.data[2][:16]) == 8


def test_greedy_rollout_cartpole_fixed_length():
    env = CartPole()
    q = QFunction.for_env(env)
    a = greedy_rollout(env, q, T_max=600, seed=4)
    b = greedy_rollout(env, q, T_max=600, seed=4)
    assert a.data.shape == (600, 5)
    np.testing.assert_array_equal(a.data, b.data)
