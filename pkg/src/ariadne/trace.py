"""Move-token parsing: extract move sequences from completions and count turns.

The token grammar is bit-exact and case-sensitive: ``<|up|>``, ``<|down|>``,
``<|left|>``, ``<|right|>`` for moves, plus ``<think>``/``</think>`` delimiting
the reasoning block.  A *turn* is a transition between consecutive distinct
moves, so a straight path has zero turns.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

DIRECTIONS = ("up", "down", "left", "right")

MOVE_TOKENS = {d: f"<|{d}|>" for d in DIRECTIONS}

_MOVE_RE = re.compile(r"<\|(up|down|left|right)\|>")
# Any <|...|> special token, known or not (unknown ones break answer format).
_SPECIAL_RE = re.compile(r"<\|[^<>|]*\|>")
_THINK_OPEN = "<think>"
_THINK_CLOSE = "</think>"


def turns_of(moves: list[str] | tuple[str, ...]) -> int:
    """Number of adjacent unequal pairs in a move list."""
    return sum(1 for a, b in zip(moves, moves[1:]) if a != b)


def count_turns(text: str) -> tuple[list[str], int]:
    """Extract direction tokens left-to-right and count their turns.

    Non-token text is ignored; empty input yields ``([], 0)``.
    """
    moves = _MOVE_RE.findall(text)
    return moves, turns_of(moves)


def serialize_moves(moves: list[str] | tuple[str, ...]) -> str:
    """Render a move list back into its token form, e.g. ``<|up|><|right|>``."""
    return "".join(MOVE_TOKENS[m] for m in moves)


@dataclass(frozen=True)
class MoveSequence:
    """An ordered move list with its derived turn count."""

    moves: tuple[str, ...]

    @property
    def turns(self) -> int:
        return turns_of(self.moves)

    def __len__(self) -> int:
        return len(self.moves)

    def serialize(self) -> str:
        return serialize_moves(self.moves)

    @classmethod
    def from_text(cls, text: str) -> "MoveSequence":
        moves, _ = count_turns(text)
        return cls(tuple(moves))


@dataclass(frozen=True)
class ParsedCompletion:
    """A completion standardized into reasoning block, answer text, and moves.

    ``format_ok_reasoning`` holds iff exactly one well-formed
    ``<think>...</think>`` block precedes the answer text.
    ``format_ok_answer`` holds iff the answer text is a non-empty movement
    sequence: solely move tokens and whitespace, at least one move (unknown
    ``<|...|>`` tokens or prose break it).
    """

    raw_text: str
    think_block: str | None
    answer_text: str
    moves: tuple[str, ...]
    format_ok_answer: bool
    format_ok_reasoning: bool
    turns: int = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "turns", turns_of(self.moves))


def extract_format(completion_text: str) -> ParsedCompletion:
    """Split a completion into think block and answer, then parse the moves.

    The answer is the text after ``</think>`` when the completion carries
    exactly one well-formed think block; malformed or nested tags leave the
    whole text as the answer with ``format_ok_reasoning`` false.
    """
    opens = completion_text.count(_THINK_OPEN)
    closes = completion_text.count(_THINK_CLOSE)
    think_block = None
    answer_text = completion_text
    format_ok_reasoning = False

    if opens == 1 and closes == 1:
        open_at = completion_text.index(_THINK_OPEN)
        close_at = completion_text.index(_THINK_CLOSE)
        if open_at < close_at:
            think_block = completion_text[open_at + len(_THINK_OPEN): close_at]
            answer_text = completion_text[close_at + len(_THINK_CLOSE):]
            format_ok_reasoning = True

    moves, _ = count_turns(answer_text)
    leftover = _SPECIAL_RE.sub(" ", answer_text)
    specials = _SPECIAL_RE.findall(answer_text)
    format_ok_answer = (
        leftover.strip() == "" and len(moves) == len(specials) and len(moves) > 0
    )

    return ParsedCompletion(
        raw_text=completion_text,
        think_block=think_block,
        answer_text=answer_text,
        moves=tuple(moves),
        format_ok_answer=format_ok_answer,
        format_ok_reasoning=format_ok_reasoning,
    )


def token_length(completion_text: str) -> int:
    """Length proxy: whitespace-delimited words plus embedded special tokens.

    Each ``<|...|>`` occurrence counts as one token even when glued to other
    text; the remaining fragments are counted as whitespace-split words.  The
    true model tokenizer is out of scope, so curves built on this proxy are
    only comparable to each other.
    """
    specials = _SPECIAL_RE.findall(completion_text)
    remainder = _SPECIAL_RE.sub(" ", completion_text)
    return len(specials) + len(remainder.split())
