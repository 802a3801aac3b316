"""Group-relative policy optimization: advantages, clipped objective, trainer.

Advantages standardize each group's rewards by the group mean and population
standard deviation; a degenerate group (variance below 1e-8) gets all-zero
advantages instead of a division blowup.  The surrogate is the standard
clipped form ``min(rho*A, clip(rho, 1-eps, 1+eps)*A)`` with a sequence-level
probability ratio; ``eps = inf`` disables clipping.  The trainer snapshots
the policy every update, accumulates gradients over a fixed number of
prompts, and ascends with a linear-warmup learning rate.  Everything is
deterministic in the seed and independent of worker-thread count.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import GroupTooSmall, InvalidConfig
from .maze import encode_features
from .policy import (
    Gradients,
    PolicyParams,
    Rollout,
    init_params,
    input_dim_for,
    sample_rollout,
    sequence_logprob_and_grad,
)
from .reward import score_group
from .sampler import DatasetRecord
from .util import derive_rng, fmt_float, parallel_map

DEGENERATE_STD = 1e-8


def compute_advantages(rewards) -> np.ndarray:
    """Standardize rewards within a group: (r - mean) / population std."""
    rewards = np.asarray(rewards, dtype=np.float64)
    if rewards.size < 2:
        raise GroupTooSmall(f"need at least 2 rewards, got {rewards.size}")
    std = rewards.std()  # population std (ddof=0)
    if std < DEGENERATE_STD:
        return np.zeros_like(rewards)
    return (rewards - rewards.mean()) / std


def clipped_term(ratio: float, advantage: float, epsilon: float) -> float:
    """min(ratio * A, clip(ratio, 1-eps, 1+eps) * A)."""
    clipped_ratio = min(max(ratio, 1.0 - epsilon), 1.0 + epsilon)
    return min(ratio * advantage, clipped_ratio * advantage)


@dataclass
class GroupSample:
    """One prompt's G rollouts with rewards, advantages, and features."""

    prompt_id: int
    rollouts: list[Rollout]
    rewards: np.ndarray
    advantages: np.ndarray
    features: np.ndarray

    def __post_init__(self):
        if not (len(self.rollouts) == len(self.rewards) == len(self.advantages)):
            raise InvalidConfig("rollouts, rewards, and advantages must align")


@dataclass(frozen=True)
class TrainConfig:
    group_size: int = 8
    clip_epsilon: float = 0.2
    learning_rate: float = 1e-6
    warmup_ratio: float = 0.05
    grad_accum: int = 16
    temperature: float = 1.0
    total_updates: int = 100
    seed: int = 0
    hidden_dim: int = 64
    kl_beta: float = 0.0
    turn_floor: bool = False

    def __post_init__(self):
        if self.group_size < 2:
            raise InvalidConfig(f"group_size must be >= 2, got {self.group_size}")
        if not (0.0 < self.clip_epsilon < 1.0 or math.isinf(self.clip_epsilon)):
            raise InvalidConfig(
                f"clip_epsilon must be in (0, 1) or inf, got {self.clip_epsilon}"
            )
        if not 0.0 <= self.warmup_ratio < 1.0:
            raise InvalidConfig(f"warmup_ratio must be in [0, 1), got {self.warmup_ratio}")
        if self.learning_rate <= 0:
            raise InvalidConfig(f"learning_rate must be positive, got {self.learning_rate}")
        if self.grad_accum < 1 or self.total_updates < 1:
            raise InvalidConfig("grad_accum and total_updates must be >= 1")
        if self.temperature <= 0:
            raise InvalidConfig(f"temperature must be positive, got {self.temperature}")
        if self.kl_beta < 0:
            raise InvalidConfig(f"kl_beta must be >= 0, got {self.kl_beta}")


def _group_objective(
    params_current: PolicyParams, group: GroupSample, config: TrainConfig
) -> tuple[float, Gradients, int]:
    """Objective value, gradient, and the number of clip-suppressed rollouts.

    The gradient of each term flows only through the unclipped branch; where
    the clipped branch is active the term is constant in the parameters.
    """
    g = len(group.rollouts)
    total = 0.0
    grads = Gradients.zeros(params_current)
    n_clipped = 0
    eps = config.clip_epsilon
    for rollout, advantage in zip(group.rollouts, group.advantages):
        logprob, grad_lp = sequence_logprob_and_grad(
            params_current, rollout.tokens, group.features, config.temperature
        )
        ratio = math.exp(logprob - rollout.logprob_old)
        term = clipped_term(ratio, advantage, eps)
        total += term / g
        # min() returns one argument exactly, so equality identifies the branch.
        unclipped = ratio * advantage
        if unclipped <= term:
            grads.add_scaled(grad_lp, advantage * ratio / g)
        else:
            n_clipped += 1
        if config.kl_beta > 0:
            delta = rollout.logprob_old - logprob
            total -= config.kl_beta * (math.exp(delta) - delta - 1.0) / g
            grads.add_scaled(grad_lp, config.kl_beta * (math.exp(delta) - 1.0) / g)
    return total, grads, n_clipped


def group_objective_and_grad(
    params_current: PolicyParams, group: GroupSample, config: TrainConfig
) -> tuple[float, Gradients]:
    """Mean clipped surrogate over the group and its parameter gradient."""
    value, grads, _ = _group_objective(params_current, group, config)
    return value, grads


@dataclass(frozen=True)
class TrainLogRow:
    update: int
    mean_reward: float
    mean_abs_advantage: float
    clip_fraction: float
    lr: float


@dataclass
class TrainLog:
    """Per-update training statistics, serializable as CSV."""

    rows: list[TrainLogRow] = field(default_factory=list)

    HEADER = "update,mean_reward,mean_abs_advantage,clip_fraction,lr"

    def to_csv(self) -> str:
        lines = [self.HEADER]
        for r in self.rows:
            lines.append(
                f"{r.update},{fmt_float(r.mean_reward)},"
                f"{fmt_float(r.mean_abs_advantage)},{fmt_float(r.clip_fraction)},"
                f"{fmt_float(r.lr)}"
            )
        return "\n".join(lines) + "\n"

    def write_csv(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.to_csv())

    def mean_reward_slice(self, start: int, stop: int) -> float:
        chunk = self.rows[start:stop]
        return sum(r.mean_reward for r in chunk) / len(chunk)


def warmup_lr(config: TrainConfig, update: int) -> float:
    """Linear ramp to the configured rate over the warmup window."""
    n_warm = int(math.floor(config.warmup_ratio * config.total_updates))
    if n_warm > 0 and update < n_warm:
        return config.learning_rate * (update + 1) / n_warm
    return config.learning_rate


def sample_group(
    params_current: PolicyParams,
    params_old: PolicyParams,
    record: DatasetRecord,
    config: TrainConfig,
    rng_key: tuple[int, ...],
) -> GroupSample:
    """Sample G rollouts for one prompt and score them."""
    features = encode_features(record.maze)
    rollouts = [
        sample_rollout(
            params_current,
            params_old,
            features,
            temperature=config.temperature,
            rng=derive_rng(*rng_key, r),
        )
        for r in range(config.group_size)
    ]
    breakdowns = score_group(
        [ro.completion_text for ro in rollouts],
        record.solution,
        turn_floor=config.turn_floor,
    )
    rewards = np.array([b.total for b in breakdowns])
    return GroupSample(
        prompt_id=record.id,
        rollouts=rollouts,
        rewards=rewards,
        advantages=compute_advantages(rewards),
        features=features,
    )


def train(
    dataset: list[DatasetRecord],
    config: TrainConfig,
    eval_hook=None,
    threads: int = 1,
    start_params: PolicyParams | None = None,
) -> tuple[PolicyParams, TrainLog]:
    """Run GRPO over the dataset; returns final params and the training log.

    Each update snapshots the policy, samples ``grad_accum`` prompts with
    ``group_size`` rollouts apiece, averages the per-group surrogate
    gradients in slot order, and takes one ascent step.  Prompt choice and
    every rollout derive their RNG from (seed, update, slot, rollout), so
    the result is bit-identical for any thread count.
    """
    if not dataset:
        raise InvalidConfig("dataset must be non-empty")
    maze0 = dataset[0].maze
    if start_params is not None:
        params = start_params.copy()
    else:
        params = init_params(
            input_dim_for(maze0.width, maze0.height),
            hidden_dim=config.hidden_dim,
            seed=config.seed,
        )

    log = TrainLog()
    for update in range(config.total_updates):
        params_old = params.copy()
        picker = derive_rng(config.seed, update)
        indices = picker.integers(0, len(dataset), size=config.grad_accum)

        def run_slot(slot: int):
            record = dataset[int(indices[slot])]
            group = sample_group(
                params_old, params_old, record, config,
                rng_key=(config.seed, update, slot),
            )
            value, grads, n_clipped = _group_objective(params_old, group, config)
            return group, grads, n_clipped

        results = parallel_map(run_slot, range(config.grad_accum), threads=threads)

        acc = Gradients.zeros(params)
        reward_sum = 0.0
        abs_adv_sum = 0.0
        n_rollouts = 0
        n_clipped_total = 0
        for group, grads, n_clipped in results:
            acc.add_scaled(grads, 1.0 / config.grad_accum)
            reward_sum += float(group.rewards.sum())
            abs_adv_sum += float(np.abs(group.advantages).sum())
            n_rollouts += len(group.rollouts)
            n_clipped_total += n_clipped

        lr_t = warmup_lr(config, update)
        params.w1 = params.w1 + lr_t * acc.w1
        params.b1 = params.b1 + lr_t * acc.b1
        params.w2 = params.w2 + lr_t * acc.w2
        params.b2 = params.b2 + lr_t * acc.b2

        row = TrainLogRow(
            update=update,
            mean_reward=reward_sum / n_rollouts,
            mean_abs_advantage=abs_adv_sum / n_rollouts,
            clip_fraction=n_clipped_total / n_rollouts,
            lr=lr_t,
        )
        log.rows.append(row)
        if eval_hook is not None:
            eval_hook(update, params)
    return params, log
