"""Difficulty sampling and dataset construction.

Three step-count distributions are supported:

* ``formula`` — the inverted-Gaussian weighting ``1 - exp(-(s-mu)^2/(2*sigma^2))``
  normalized over the step range.  With the default mu=3 this assigns
  probability 0 to the midpoint step count.
* ``empirical`` — weights proportional to the nominal percentages
  (21, 18, 16, 18, 21) for steps 1..5.  These sum to 94, so the sampler
  normalizes them; the formula and empirical modes disagree at the midpoint
  by construction, which is why empirical is the default.
* ``uniform`` — even sampling, used by the test profile.

Turns are drawn uniformly from the feasible intersection of the configured
turn range, ``[0, steps-1]``, and (when a grid size is given) the grid's
geometric limits.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import Infeasible, InvalidConfig, ParseError
from .maze import Maze, generate, solve, spec_feasible
from .trace import MoveSequence, serialize_moves
from .util import derive_rng, parallel_map

# Nominal step-count percentages for steps 1..5 in empirical mode.  They sum
# to 94, not 100; sampling uses them proportionally (normalized).
EMPIRICAL_STEP_PERCENTS = (21.0, 18.0, 16.0, 18.0, 21.0)

MODES = ("formula", "empirical", "uniform")


@dataclass(frozen=True)
class DifficultySpec:
    """Ground-truth solution complexity: move count and turn count."""

    steps: int
    turns: int

    def __post_init__(self):
        if self.steps < 1:
            raise InvalidConfig(f"steps must be >= 1, got {self.steps}")
        if not 0 <= self.turns <= self.steps - 1:
            raise InvalidConfig(
                f"turns must be in [0, steps-1], got {self.turns} for {self.steps} steps"
            )


@dataclass(frozen=True)
class SamplerConfig:
    mu: float = 3.0
    sigma: float = 2.0
    step_range: tuple[int, int] = (1, 5)
    turn_range: tuple[int, int] = (0, 2)
    mode: str = "empirical"

    def __post_init__(self):
        if self.sigma <= 0:
            raise InvalidConfig(f"sigma must be positive, got {self.sigma}")
        lo, hi = self.step_range
        if not (1 <= lo <= hi <= 10):
            raise InvalidConfig(f"step_range must lie within [1, 10], got {self.step_range}")
        lo, hi = self.turn_range
        if not (0 <= lo <= hi <= 4):
            raise InvalidConfig(f"turn_range must lie within [0, 4], got {self.turn_range}")
        if self.mode not in MODES:
            raise InvalidConfig(f"mode must be one of {MODES}, got {self.mode!r}")

    @property
    def steps(self) -> range:
        return range(self.step_range[0], self.step_range[1] + 1)


TRAIN_PROFILE = SamplerConfig(step_range=(1, 5), turn_range=(0, 2), mode="empirical")
TEST_PROFILE = SamplerConfig(step_range=(1, 10), turn_range=(0, 4), mode="uniform")


def profile_config(name: str) -> SamplerConfig:
    if name == "train":
        return TRAIN_PROFILE
    if name == "test":
        return TEST_PROFILE
    raise InvalidConfig(f"unknown profile {name!r} (expected 'train' or 'test')")


def step_distribution(config: SamplerConfig) -> np.ndarray:
    """Probability vector over the configured step range; sums to 1."""
    steps = np.array(config.steps, dtype=np.float64)
    if config.mode == "formula":
        weights = 1.0 - np.exp(-((steps - config.mu) ** 2) / (2.0 * config.sigma**2))
        if not weights.any():
            raise InvalidConfig("formula weights are all zero over this step range")
    elif config.mode == "empirical":
        if steps.max() > len(EMPIRICAL_STEP_PERCENTS):
            raise InvalidConfig(
                "empirical mode only defines weights for steps 1..5; "
                f"got range {config.step_range}"
            )
        weights = np.array([EMPIRICAL_STEP_PERCENTS[int(s) - 1] for s in steps])
    else:
        weights = np.ones_like(steps)
    return weights / weights.sum()


def _turn_options(steps: int, config: SamplerConfig, size: tuple[int, int] | None) -> list[int]:
    lo, hi = config.turn_range
    options = range(max(lo, 0), min(hi, steps - 1) + 1)
    if size is None:
        return list(options)
    return [t for t in options if spec_feasible(steps, t, size[0], size[1])]


def sample_spec(
    config: SamplerConfig,
    rng: np.random.Generator,
    size: tuple[int, int] | None = None,
) -> DifficultySpec:
    """Draw a (steps, turns) pair; turns are uniform over the feasible set."""
    probs = step_distribution(config)
    steps = int(rng.choice(list(config.steps), p=probs))
    options = _turn_options(steps, config, size)
    if not options:
        raise Infeasible(
            f"no feasible turn count for steps={steps} with turn_range={config.turn_range}"
        )
    turns = int(options[rng.integers(len(options))])
    return DifficultySpec(steps, turns)


@dataclass(frozen=True)
class DatasetRecord:
    """One training/eval sample: maze, oracle solution, and its difficulty."""

    id: int
    maze: Maze
    solution: MoveSequence
    spec: DifficultySpec


def _pruned(config: SamplerConfig, size: tuple[int, int]) -> tuple[list[int], np.ndarray]:
    """Step support restricted to counts with at least one feasible turn."""
    probs = step_distribution(config)
    support, weights = [], []
    for s, p in zip(config.steps, probs):
        if _turn_options(s, config, size):
            support.append(s)
            weights.append(p)
    if not support:
        raise Infeasible(
            f"no feasible (steps, turns) under {config} on grid {size[0]}x{size[1]}"
        )
    weights = np.array(weights)
    return support, weights / weights.sum()


def build_dataset(
    config: SamplerConfig,
    count: int,
    size: tuple[int, int] = (5, 5),
    seed: int = 0,
    threads: int = 1,
) -> list[DatasetRecord]:
    """Generate ``count`` records, each deterministic in (seed, index).

    The step distribution is renormalized over the grid-feasible support, so
    geometrically impossible pairs (e.g. five straight moves on a 5x5 grid)
    are never requested.
    """
    if count < 1:
        raise InvalidConfig(f"count must be >= 1, got {count}")
    support, probs = _pruned(config, size)

    def make(index: int) -> DatasetRecord:
        rng = derive_rng(seed, index)
        steps = int(rng.choice(support, p=probs))
        options = _turn_options(steps, config, size)
        spec = DifficultySpec(steps, int(options[rng.integers(len(options))]))
        maze = generate(spec, size, rng_seed=rng)
        return DatasetRecord(index, maze, solve(maze), spec)

    return parallel_map(make, range(count), threads=threads)


# --- dataset file format -----------------------------------------------
# One record per line, tab-separated:
#   id  width  height  grid_hex  start_row,start_col  target_row,target_col
#   solution_tokens  steps  turns
# grid_hex is one lowercase hex digit per cell, row-major (N=1 E=2 S=4 W=8).
# Lines starting with '#' are comments and are skipped on read.


def record_to_line(record: DatasetRecord) -> str:
    m = record.maze
    return "\t".join(
        (
            str(record.id),
            str(m.width),
            str(m.height),
            m.grid_hex(),
            f"{m.start[0]},{m.start[1]}",
            f"{m.target[0]},{m.target[1]}",
            record.solution.serialize(),
            str(record.spec.steps),
            str(record.spec.turns),
        )
    )


def write_records(records: list[DatasetRecord], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for record in records:
            fh.write(record_to_line(record) + "\n")


def _parse_cell(field: str, line_no: int, name: str) -> tuple[int, int]:
    parts = field.split(",")
    if len(parts) != 2:
        raise ParseError(f"{name} must be 'row,col', got {field!r}", line=line_no)
    try:
        return int(parts[0]), int(parts[1])
    except ValueError:
        raise ParseError(f"{name} has non-integer coordinates {field!r}", line=line_no)


def parse_record_line(line: str, line_no: int = 1) -> DatasetRecord:
    fields = line.rstrip("\n").split("\t")
    if len(fields) != 9:
        raise ParseError(f"expected 9 tab-separated fields, got {len(fields)}", line=line_no)
    try:
        rec_id, width, height = int(fields[0]), int(fields[1]), int(fields[2])
        steps, turns = int(fields[7]), int(fields[8])
    except ValueError:
        raise ParseError("non-integer id/size/steps/turns field", line=line_no)

    grid_hex = fields[3]
    if len(grid_hex) != width * height:
        raise ParseError(
            f"grid_hex length {len(grid_hex)} != width*height {width * height}",
            line=line_no,
        )
    masks = []
    for ch in grid_hex:
        if ch not in "0123456789abcdef":
            raise ParseError(f"bad hex digit {ch!r} in grid_hex", line=line_no)
        masks.append(int(ch, 16))
    walls = np.array(masks, dtype=np.uint8).reshape(height, width)

    start = _parse_cell(fields[4], line_no, "start")
    target = _parse_cell(fields[5], line_no, "target")
    try:
        maze = Maze(width, height, walls, start=start, target=target)
    except ValueError as exc:
        raise ParseError(str(exc), line=line_no)

    solution = MoveSequence.from_text(fields[6])
    if serialize_moves(solution.moves) != fields[6]:
        raise ParseError("solution field contains non-token text", line=line_no)
    if len(solution) != steps or solution.turns != turns:
        raise ParseError(
            f"declared steps/turns {steps}/{turns} do not match solution "
            f"{len(solution)}/{solution.turns}",
            line=line_no,
        )
    return DatasetRecord(rec_id, maze, solution, DifficultySpec(steps, turns))


def read_records(path) -> list[DatasetRecord]:
    records = []
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            stripped = line.strip()
            if not stripped or stripped.startswith("#"):
                continue
            records.append(parse_record_line(line, line_no))
    return records
