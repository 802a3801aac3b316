"""Turn-scaled correctness reward plus answer/reasoning format rewards.

A full match earns ``0.2 * len(answer) * turns(answer)``; a partial match
earns ``0.1 * k * turns(answer[:k])`` where ``k`` is the longest common
prefix.  Turns are always counted on the ground-truth side.  Note the faithful
consequence: a fully correct zero-turn answer earns correctness 0.  The
``turn_floor`` flag substitutes ``max(turns, 1)`` to make straight-path
training feasible; it is off by default.
"""

from __future__ import annotations

from dataclasses import dataclass

from .trace import MoveSequence, ParsedCompletion, extract_format, turns_of

# Rates 0.2 (full match) and 0.1 (prefix) applied as exact divisions so that
# e.g. a 3-move, 1-turn full match scores exactly 0.6.
FULL_MATCH_DIVISOR = 5.0
PREFIX_DIVISOR = 10.0
ANSWER_FORMAT_REWARD = 0.5
REASONING_FORMAT_REWARD = 0.5


@dataclass(frozen=True)
class RewardBreakdown:
    """Per-completion reward components; ``total`` is their sum."""

    correctness: float
    answer_format: float
    reasoning_format: float

    @property
    def total(self) -> float:
        return self.correctness + self.answer_format + self.reasoning_format


def _prefix_length(predicted: tuple[str, ...], answer: tuple[str, ...]) -> int:
    k = 0
    for p, a in zip(predicted, answer):
        if p != a:
            break
        k += 1
    return k


def correctness_reward(
    completion: ParsedCompletion | MoveSequence | list[str] | tuple[str, ...],
    answer: MoveSequence | list[str] | tuple[str, ...],
    turn_floor: bool = False,
) -> float:
    """Score predicted moves against the ground truth answer.

    Accepts a ParsedCompletion or a bare move list on the prediction side.
    """
    predicted = tuple(completion.moves if hasattr(completion, "moves") else completion)
    truth = tuple(answer.moves if hasattr(answer, "moves") else answer)

    def scale(turns: int) -> int:
        return max(turns, 1) if turn_floor else turns

    if predicted == truth:
        return len(truth) * scale(turns_of(truth)) / FULL_MATCH_DIVISOR
    k = _prefix_length(predicted, truth)
    return k * scale(turns_of(truth[:k])) / PREFIX_DIVISOR if k > 0 else 0.0


def format_rewards(completion: ParsedCompletion) -> tuple[float, float]:
    """(answer_format, reasoning_format): 0.5 per satisfied flag."""
    answer = ANSWER_FORMAT_REWARD if completion.format_ok_answer else 0.0
    reasoning = REASONING_FORMAT_REWARD if completion.format_ok_reasoning else 0.0
    return answer, reasoning


def score_completion(
    completion_text: str,
    answer: MoveSequence | list[str] | tuple[str, ...],
    turn_floor: bool = False,
) -> RewardBreakdown:
    """Full breakdown for one raw completion string."""
    parsed = extract_format(completion_text)
    answer_fmt, reasoning_fmt = format_rewards(parsed)
    return RewardBreakdown(
        correctness=correctness_reward(parsed, answer, turn_floor=turn_floor),
        answer_format=answer_fmt,
        reasoning_format=reasoning_fmt,
    )


def score_group(
    completions: list[str],
    answer: MoveSequence | list[str] | tuple[str, ...],
    turn_floor: bool = False,
) -> list[RewardBreakdown]:
    """Score each completion in a group; order is preserved."""
    return [score_completion(c, answer, turn_floor=turn_floor) for c in completions]
