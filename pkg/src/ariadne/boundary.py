"""Boundary probing: success curves across difficulty, collapse detection.

A record counts as a success only when a rollout's extracted moves equal the
ground-truth solution exactly; prefix overlap earns reward during training
but zero success here.  Curves bucket records by either their move count or
their turn count.  The collapse point is the smallest bucket at or below the
threshold whose larger evaluated buckets are all at or below it too, so a
single noisy zero inside an otherwise alive range does not define the
boundary.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidLength, ParseError
from .maze import encode_features
from .policy import PolicyParams, sample_rollout
from .sampler import DatasetRecord
from .trace import extract_format, token_length
from .util import derive_rng, fmt_float, parallel_map

AXES = ("moves", "turns")


@dataclass(frozen=True)
class BucketStats:
    success_rate: float
    mean_tokens: float
    n_samples: int


@dataclass(frozen=True)
class SuccessCurve:
    """Per-difficulty-bucket success rate and token-length statistics."""

    axis: str
    buckets: dict[int, BucketStats]

    def sorted_items(self) -> list[tuple[int, BucketStats]]:
        return sorted(self.buckets.items())


def _bucket_key(record: DatasetRecord, axis: str) -> int:
    return record.spec.steps if axis == "moves" else record.spec.turns


def evaluate(
    policy,
    testset: list[DatasetRecord],
    rollouts: int = 8,
    temperature: float = 1.0,
    axis: str = "moves",
    seed: int = 0,
    threads: int = 1,
) -> SuccessCurve:
    """Sample completions per record and aggregate success by difficulty.

    ``policy`` is either PolicyParams or a callable ``(record, rng) -> str``
    returning completion text (used for scripted reference policies).  Each
    (record index, rollout index) pair derives its own RNG stream, so the
    curve is reproducible and independent of thread count.
    """
    if axis not in AXES:
        raise ValueError(f"axis must be one of {AXES}, got {axis!r}")
    if rollouts < 1 or not testset:
        raise ValueError("need rollouts >= 1 and a non-empty testset")

    scripted = callable(policy)

    def run_record(index: int) -> tuple[int, int, int]:
        record = testset[index]
        features = None if scripted else encode_features(record.maze)
        successes = 0
        tokens_total = 0
        for k in range(rollouts):
            rng = derive_rng(seed, index, k)
            if scripted:
                text = policy(record, rng)
            else:
                text = sample_rollout(
                    policy, policy, features, temperature=temperature, rng=rng
                ).completion_text
            parsed = extract_format(text)
            if parsed.moves == record.solution.moves:
                successes += 1
            tokens_total += token_length(text)
        return _bucket_key(record, axis), successes, tokens_total

    results = parallel_map(run_record, range(len(testset)), threads=threads)

    acc: dict[int, list[int]] = {}
    for key, successes, tokens_total in results:
        slot = acc.setdefault(key, [0, 0, 0])
        slot[0] += successes
        slot[1] += tokens_total
        slot[2] += 1
    buckets = {
        key: BucketStats(
            success_rate=successes / (n * rollouts),
            mean_tokens=tokens_total / (n * rollouts),
            n_samples=n,
        )
        for key, (successes, tokens_total, n) in acc.items()
    }
    return SuccessCurve(axis=axis, buckets=buckets)


def detect_collapse(curve: SuccessCurve, threshold: float = 0.0) -> int | None:
    """Smallest bucket from which success stays at or below the threshold."""
    items = curve.sorted_items()
    if not items:
        raise ValueError("curve has no buckets")
    collapse = None
    for key, stats in reversed(items):
        if stats.success_rate <= threshold:
            collapse = key
        else:
            break
    return collapse


def path_efficiency(model_path_length: int, shortest_path_length: int) -> float:
    """Ratio of generated-path length to shortest-path length."""
    if model_path_length <= 0 or shortest_path_length <= 0:
        raise InvalidLength(
            f"lengths must be positive, got {model_path_length}/{shortest_path_length}"
        )
    return model_path_length / shortest_path_length


CURVE_HEADER = "bucket,success_rate,mean_tokens,n"


def write_curve_csv(curve: SuccessCurve, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(CURVE_HEADER + "\n")
        for key, stats in curve.sorted_items():
            fh.write(
                f"{key},{fmt_float(stats.success_rate)},"
                f"{fmt_float(stats.mean_tokens)},{stats.n_samples}\n"
            )


def read_curve_csv(path, axis: str = "moves") -> SuccessCurve:
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines or lines[0] != CURVE_HEADER:
        raise ParseError(f"expected header {CURVE_HEADER!r}", line=1)
    buckets = {}
    for line_no, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        fields = line.split(",")
        if len(fields) != 4:
            raise ParseError(f"expected 4 fields, got {len(fields)}", line=line_no)
        try:
            buckets[int(fields[0])] = BucketStats(
                success_rate=float(fields[1]),
                mean_tokens=float(fields[2]),
                n_samples=int(fields[3]),
            )
        except ValueError:
            raise ParseError(f"unparsable row {line!r}", line=line_no)
    return SuccessCurve(axis=axis, buckets=buckets)
