"""Deterministic RNG derivation and order-preserving parallel map."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, Sequence, TypeVar

import numpy as np

T = TypeVar("T")
R = TypeVar("R")


def derive_rng(*key: int) -> np.random.Generator:
    """Generator seeded from an integer key tuple, e.g. (seed, record_index).

    Uses SeedSequence so streams derived from distinct keys are independent
    and identical keys reproduce identical streams across runs and platforms.
    """
    return np.random.default_rng(np.random.SeedSequence(list(key)))


def as_rng(seed) -> np.random.Generator:
    """Coerce an int seed, SeedSequence, or Generator into a Generator."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def parallel_map(fn: Callable[[T], R], items: Sequence[T], threads: int = 1) -> list[R]:
    """Map preserving input order; results are identical for any thread count.

    Work items must not share mutable state (callers pass frozen params and
    per-item derived RNG streams), so the only threading requirement is the
    ordered reduction this provides.
    """
    if threads <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def fmt_float(x: float) -> str:
    """Shortest decimal that round-trips the exact float64 value."""
    return repr(float(x))
