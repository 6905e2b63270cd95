"""Dependence estimation for ordered data, with replay-sampler tooling.

The core estimator measures serial dependence at each lag as the largest
Wasserstein-1 gap between conditional and marginal laws of lagged targets,
bias-corrected by a permutation baseline.  Around it: synthetic process
generators, replay-buffer samplers with order guarantees, a small Q-learning
harness that logs every sampled minibatch, effective-sample-size math, and
JSONL/CSV formats tying them together.
"""

from .estimator import (
    AggregatedCurve,
    EstimatorConfig,
    ObservationSequence,
    PairSet,
    TauCurve,
    TauMixingEstimator,
    aggregate_curves,
    build_pairs,
    knn_indices,
    per_local_w1,
    tau_curve,
    tau_hat,
    tau_obs,
    tau_perm_baseline,
)
from .transport import DiscreteMeasure, w1_discrete, w1_sorted_1d, w1_uniform
from .samplers import (
    BlockPlan,
    IndexBatch,
    InfeasibleConfigError,
    OrderReport,
    ReplayBuffer,
    gather_minibatch,
    plan_blocks,
    sample_contiguous_blocks,
    sample_contiguous_blocks_wraparound,
    sample_uniform_with_replacement,
    sample_uniform_without_replacement_sorted,
    verify_order_preserving,
)
from .processes import ProcessSpec, gen_ar1, gen_iid, gen_ma, gen_markov_chain
from .envs import CartPole, GridWorld, Transition, encode_state_action, make_env
from .dqn import (
    PRESETS,
    LoggedUpdate,
    QFunction,
    TrainConfig,
    TrainResult,
    bellman_targets,
    dqn_train,
    greedy_rollout,
)
from .mixing import (
    DecayFit,
    MixingBound,
    fit_exponential_decay,
    n_eff_lower_bound,
    n_eff_search,
    tau_bound_from_beta,
)
from .io import (
    FormatError,
    MinibatchRecord,
    read_curve_csv,
    read_minibatch_log,
    read_policy,
    read_trajectory,
    write_curve_csv,
    write_minibatch_log,
    write_policy,
    write_returns_csv,
    write_trajectory,
)

__version__ = "0.1.0"

__all__ = [
    "AggregatedCurve", "BlockPlan", "CartPole", "DecayFit", "DiscreteMeasure",
    "EstimatorConfig", "FormatError", "GridWorld", "IndexBatch",
    "InfeasibleConfigError", "LoggedUpdate", "MinibatchRecord", "MixingBound",
    "ObservationSequence", "OrderReport", "PRESETS", "PairSet", "ProcessSpec",
    "QFunction", "ReplayBuffer", "TauCurve", "TauMixingEstimator",
    "TrainConfig", "TrainResult", "Transition", "aggregate_curves",
    "bellman_targets", "build_pairs", "dqn_train", "encode_state_action",
    "fit_exponential_decay", "gather_minibatch", "gen_ar1", "gen_iid",
    "gen_ma", "gen_markov_chain", "greedy_rollout", "knn_indices", "make_env",
    "n_eff_lower_bound", "n_eff_search", "per_local_w1", "plan_blocks",
    "read_curve_csv", "read_minibatch_log", "read_policy", "read_trajectory",
    "sample_contiguous_blocks", "sample_contiguous_blocks_wraparound",
    "sample_uniform_with_replacement",
    "sample_uniform_without_replacement_sorted", "tau_bound_from_beta",
    "tau_curve", "tau_hat", "tau_obs", "tau_perm_baseline",
    "verify_order_preserving", "w1_discrete", "w1_sorted_1d", "w1_uniform",
    "write_curve_csv", "write_minibatch_log", "write_policy",
    "write_returns_csv", "write_trajectory",
]
