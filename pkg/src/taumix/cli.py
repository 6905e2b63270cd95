"""Command-line pipeline: generate, train, estimate, aggregate, fit, verify.

Exit codes: 0 success, 1 usage error, 2 data-format error, 3 infeasible
configuration.  Every randomized command takes --seed and is bit-reproducible
under it.  `--config <path>` names a flat key=value file whose entries
override the flags given on the command line.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import sys

import numpy as np

from .dqn import PRESETS, QFunction, dqn_train, greedy_rollout
from .envs import make_env
from .estimator import EstimatorConfig, aggregate_curves, tau_curve
from .io import (
    FormatError,
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
from .mixing import fit_exponential_decay, n_eff_lower_bound, n_eff_search
from .processes import ProcessSpec
from .samplers import IndexBatch, InfeasibleConfigError, verify_order_preserving
from .estimator import AggregatedCurve


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """argparse variant that raises instead of exiting, so usage problems
    can map to exit code 1."""

    def error(self, message):
        raise _UsageError(f"{self.prog}: error: {message}")


def _add_config_flag(p):
    p.add_argument("--config", default=None,
                   help="flat key=value file; entries override flags")


def build_parser() -> _Parser:
    parser = _Parser(prog="taumix", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True,
                                parser_class=_Parser)

    p = sub.add_parser("gen",
                       help="generate a synthetic sequence as trajectory JSONL")
    _add_config_flag(p)
    p.add_argument("--kind", required=True, choices=ProcessSpec.KINDS)
    p.add_argument("--T", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--dim", type=int, default=1, help="iid kinds only")
    p.add_argument("--rho", type=float, default=None, help="ar1 only")
    p.add_argument("--innovation-sd", type=float, default=1.0, help="ar1 only")
    p.add_argument("--coeffs", default=None,
                   help="ma_q only: comma-separated moving-average weights")
    p.add_argument("--P", default=None,
                   help="finite_markov only: rows 'p,p,..;p,p,..'")
    p.add_argument("--one-hot", action="store_true",
                   help="finite_markov only: emit one-hot state vectors")

    p = sub.add_parser("train",
                       help="train a Q function, logging trajectory and minibatches")
    _add_config_flag(p)
    p.add_argument("--env", required=True, choices=sorted(PRESETS))
    p.add_argument("--out-prefix", required=True)
    p.add_argument("--slip-prob", type=float, default=0.0)
    for name, typ in [
            ("gamma", float), ("buffer-capacity", int), ("max-episodes", int),
            ("minibatch-size", int), ("eps-initial", float),
            ("eps-min", float), ("exploration-fraction", float),
            ("learning-rate", float), ("tau-target", float),
            ("target-period", int), ("start-time", int),
            ("update-frequency", int), ("num-updates", int), ("seed", int)]:
        p.add_argument(f"--{name}", type=typ, default=None)
    p.add_argument("--sampler", default=None, help="replay sampler kind")
    p.add_argument("--block-b", type=int, default=None,
                   help="block length for block samplers")
    p.add_argument("--block-a", type=int, default=None,
                   help="gap between blocks for block samplers")

    p = sub.add_parser("rollout",
                       help="run the greedy policy and write trajectory JSONL")
    _add_config_flag(p)
    p.add_argument("--policy", required=True)
    p.add_argument("--T", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--slip-prob", type=float, default=0.0)
    p.add_argument("--stop-at-terminal", action="store_true")
    p.add_argument("--out", required=True)

    p = sub.add_parser("estimate",
                       help="dependence curve from trajectory or minibatch JSONL")
    _add_config_flag(p)
    p.add_argument("--input", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--m", "--history-length", dest="m", type=int, default=1)
    p.add_argument("--r", "--n-neighbors", dest="r", type=int, default=20)
    p.add_argument("--B", "--n-permutations", dest="B", type=int, default=1)
    p.add_argument("--K", "--max-lag", dest="max_lag", type=int, default=None,
                   help="largest lag; default T - m")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--per-minibatch", action="store_true",
                   help="input is a minibatch log; estimate each record, "
                        "then aggregate")

    p = sub.add_parser("aggregate",
                       help="average curve CSVs; each file is one replicate")
    _add_config_flag(p)
    p.add_argument("--inputs", nargs="+", required=True)
    p.add_argument("--out", required=True)

    p = sub.add_parser("fit",
                       help="exponential-decay fit of a curve CSV")
    _add_config_flag(p)
    p.add_argument("--input", required=True)
    p.add_argument("--out", default=None,
                   help="also write the JSON record here")

    p = sub.add_parser("effsize",
                       help="effective sample size for exponential decay")
    _add_config_flag(p)
    p.add_argument("--c0", type=float, required=True)
    p.add_argument("--c1", type=float, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--B-bound", dest="B_bound", type=float, default=1.0)
    p.add_argument("--sigma", type=float, default=1.0)

    p = sub.add_parser("verify-batch",
                       help="order-preservation report for a minibatch log")
    _add_config_flag(p)
    p.add_argument("--input", required=True)
    return parser


def _config_tokens(path):
    """Translate a flat key=value file into argv tokens."""
    tokens = []
    try:
        fh = open(path)
    except OSError as exc:
        raise FormatError(f"cannot read config file: {exc}", path)
    with fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" in line:
                key, _, value = line.partition("=")
            else:
                parts = line.split(None, 1)
                key, value = parts[0], parts[1] if len(parts) > 1 else ""
            key, value = key.strip(), value.strip()
            if not key:
                raise FormatError("config line has no key", path, lineno)
            flag = "--" + key.replace("_", "-").lstrip("-")
            if value.lower() == "true":
                tokens.append(flag)
            elif value.lower() == "false":
                continue
            else:
                tokens.extend([flag, value])
    return tokens


# -- subcommand implementations ---------------------------------------------

def _cmd_gen(args):
    params = {}
    if args.kind in ("iid_gaussian", "iid_uniform"):
        params["dim"] = args.dim
    elif args.kind == "ar1":
        if args.rho is None:
            raise _UsageError("taumix gen: error: --rho is required for ar1")
        params["rho"] = args.rho
        params["innovation_sd"] = args.innovation_sd
    elif args.kind == "ma_q":
        if args.coeffs is None:
            raise _UsageError("taumix gen: error: --coeffs is required for ma_q")
        params["coeffs"] = [float(c) for c in args.coeffs.split(",")]
    elif args.kind == "finite_markov":
        if args.P is None:
            raise _UsageError(
                "taumix gen: error: --P is required for finite_markov")
        params["P"] = [[float(v) for v in row.split(",")]
                       for row in args.P.split(";")]
        params["one_hot"] = args.one_hot
    spec = ProcessSpec(kind=args.kind, T=args.T, seed=args.seed, params=params)
    write_trajectory(args.out, spec.generate())
    print(f"wrote {args.T} rows to {args.out}")
    return 0


def _train_config(args):
    cfg = PRESETS[args.env]
    overrides = {}
    for name in ("gamma", "buffer_capacity", "max_episodes", "minibatch_size",
                 "eps_initial", "eps_min", "exploration_fraction",
                 "learning_rate", "tau_target", "target_period", "start_time",
                 "update_frequency", "num_updates", "seed"):
        val = getattr(args, name)
        if val is not None:
            overrides[name] = val
    if args.sampler is not None:
        overrides["sampler_kind"] = args.sampler
    sampler_params = {}
    if args.block_b is not None:
        sampler_params["b"] = args.block_b
    if args.block_a is not None:
        sampler_params["a"] = args.block_a
    if sampler_params:
        overrides["sampler_params"] = sampler_params
    return dataclasses.replace(cfg, **overrides)


def _cmd_train(args):
    env_kwargs = {"slip_prob": args.slip_prob} if args.env == "gridworld" else {}
    env = make_env(args.env, **env_kwargs)
    result = dqn_train(env, _train_config(args))
    prefix = args.out_prefix
    write_trajectory(f"{prefix}.trajectory.jsonl", np.vstack(result.trajectory))
    write_minibatch_log(f"{prefix}.minibatches.jsonl", result.minibatch_log)
    write_returns_csv(f"{prefix}.returns.csv", result.episode_returns)
    write_policy(f"{prefix}.policy.json", env.kind, result.q)
    print(f"trained {len(result.episode_returns)} episodes, "
          f"{len(result.minibatch_log)} updates "
          f"({result.skipped_updates} skipped); outputs at {prefix}.*")
    return 0


def _cmd_rollout(args):
    env_kind, q_kind, params = read_policy(args.policy)
    env_kwargs = {"slip_prob": args.slip_prob} if env_kind == "gridworld" else {}
    env = make_env(env_kind, **env_kwargs)
    if q_kind == "tabular":
        q = QFunction("tabular", env.n_actions, n_states=params.shape[0])
    else:
        q = QFunction("linear", env.n_actions, n_features=params.shape[0])
    if q.params.shape != params.shape:
        raise FormatError(
            f"policy shape {params.shape} does not match environment "
            f"{env_kind}", args.policy)
    q.params = params
    seq = greedy_rollout(env, q, args.T, seed=args.seed,
                         stop_at_terminal=args.stop_at_terminal)
    write_trajectory(args.out, seq.data)
    print(f"wrote {seq.data.shape[0]} rows to {args.out}")
    return 0


def _estimate_config(args, T):
    max_lag = args.max_lag if args.max_lag is not None else T - args.m
    if max_lag < 1:
        raise _UsageError(
            "taumix estimate: error: sequence too short for any lag")
    return EstimatorConfig(history_length=args.m, n_neighbors=args.r,
                           n_permutations=args.B, max_lag=max_lag,
                           seed=args.seed)


def _cmd_estimate(args):
    if args.per_minibatch:
        records = read_minibatch_log(args.input)
        cfg = _estimate_config(args, records[0].rows.shape[0])
        curves = [tau_curve(rec.rows, cfg, source_label=f"update-{rec.update}")
                  for rec in records]
        curve = aggregate_curves(curves) if len(curves) > 1 else curves[0]
    else:
        data = read_trajectory(args.input)
        cfg = _estimate_config(args, data.shape[0])
        curve = tau_curve(data, cfg, source_label=args.input)
    write_curve_csv(args.out, curve)
    print(f"wrote curve ({cfg.max_lag} lags) to {args.out}")
    return 0


def _cmd_aggregate(args):
    lags_ref = None
    means = []
    for path in args.inputs:
        lags, mean, _, _ = read_curve_csv(path)
        if lags_ref is None:
            lags_ref = lags
        elif not np.array_equal(lags, lags_ref):
            raise FormatError("curve lags disagree with the first input", path)
        means.append(mean)
    stack = np.vstack(means)
    M = stack.shape[0]
    mean = stack.mean(axis=0)
    se = (stack.std(axis=0, ddof=1) / math.sqrt(M) if M > 1
          else np.full(lags_ref.shape[0], np.nan))
    curve = AggregatedCurve(lags=lags_ref, mean=mean, se=se, n_replicates=M)
    write_curve_csv(args.out, curve)
    print(f"aggregated {M} curves to {args.out}")
    return 0


def _cmd_fit(args):
    lags, mean, _, _ = read_curve_csv(args.input)
    try:
        fit = fit_exponential_decay((lags, mean))
    except ValueError as exc:
        raise FormatError(str(exc), args.input)
    rec = json.dumps({"c0_hat": fit.c0_hat, "c1_hat": fit.c1_hat,
                      "rmse": fit.rmse, "n_points_used": fit.n_points_used})
    print(rec)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(rec + "\n")
    return 0


def _cmd_effsize(args):
    if args.c0 <= 0 or args.c1 <= 0:
        raise _UsageError("taumix effsize: error: --c0 and --c1 must be positive")
    c0, c1 = args.c0, args.c1
    n_eff = n_eff_search(lambda k: c0 * math.exp(-c1 * k), args.n,
                         args.B_bound, args.sigma)
    lower = n_eff_lower_bound(c0, c1, args.B_bound, args.n)
    print(json.dumps({"n": args.n, "n_eff": n_eff, "lower_bound": lower}))
    return 0


_ORDER_GUARANTEED_KINDS = {
    "without_replacement_sorted",
    "contiguous_blocks",
    "contiguous_blocks_wraparound",
}


def _cmd_verify_batch(args):
    records = read_minibatch_log(args.input)
    checked = 0
    failed = []
    for rec in records:
        if rec.sampler_kind == "uniform_with_replacement":
            ok = bool(np.all(np.diff(rec.indices) >= 0))
        elif rec.sampler_kind in _ORDER_GUARANTEED_KINDS:
            batch = IndexBatch(indices=rec.indices,
                               sampler_kind=rec.sampler_kind,
                               params=rec.params, order_guaranteed=True)
            ok = verify_order_preserving(batch).ok
        else:
            ok = False
        checked += 1
        if not ok:
            failed.append(rec.update)
    print(json.dumps({"records": len(records), "checked": checked,
                      "passed": checked - len(failed),
                      "failed_updates": failed}))
    if failed:
        raise FormatError(
            f"{len(failed)} record(s) violate sampler order guarantees",
            args.input)
    return 0


_COMMANDS = {
    "gen": _cmd_gen,
    "train": _cmd_train,
    "rollout": _cmd_rollout,
    "estimate": _cmd_estimate,
    "aggregate": _cmd_aggregate,
    "fit": _cmd_fit,
    "effsize": _cmd_effsize,
    "verify-batch": _cmd_verify_batch,
}


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if getattr(args, "config", None):
            args = parser.parse_args(argv + _config_tokens(args.config))
        return _COMMANDS[args.command](args)
    except _UsageError as exc:
        print(exc, file=sys.stderr)
        return 1
    except FormatError as exc:
        print(f"data format error: {exc}", file=sys.stderr)
        return 2
    except InfeasibleConfigError as exc:
        print(f"infeasible configuration: {exc}", file=sys.stderr)
        return 3
    except ValueError as exc:
        print(f"invalid parameter: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"file error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
