"""Ariadne: a desk-scale maze RLVR laboratory.

Difficulty-controlled maze generation, a turn-scaled verifiable reward, a
GRPO trainer over a small autoregressive move-token policy, and evaluation
tooling that measures where success collapses as mazes get harder.
"""

__version__ = "0.1.0"

from .boundary import (
    SuccessCurve,
    detect_collapse,
    evaluate,
    path_efficiency,
    read_curve_csv,
    write_curve_csv,
)
from .grpo import (
    GroupSample,
    TrainConfig,
    TrainLog,
    clipped_term,
    compute_advantages,
    group_objective_and_grad,
    train,
)
from .maze import (
    Maze,
    count_shortest_paths,
    encode_features,
    generate,
    max_steps_for_turns,
    parse_ascii,
    render_ascii,
    solve,
    spec_feasible,
)
from .policy import (
    PolicyParams,
    Rollout,
    init_params,
    load_checkpoint,
    sample_rollout,
    save_checkpoint,
    sequence_logprob_and_grad,
    token_logits,
)
from .reward import (
    RewardBreakdown,
    correctness_reward,
    format_rewards,
    score_completion,
    score_group,
)
from .sampler import (
    DatasetRecord,
    DifficultySpec,
    SamplerConfig,
    build_dataset,
    profile_config,
    read_records,
    sample_spec,
    step_distribution,
    write_records,
)
from .trace import (
    MoveSequence,
    ParsedCompletion,
    count_turns,
    extract_format,
    serialize_moves,
    token_length,
)

__all__ = [name for name in dir() if not name.startswith("_")]
