"""Small autoregressive move-token policy with analytic gradients.

One tanh hidden layer maps ``concat(maze features, one-hot previous token,
one-hot position)`` to six logits: the four moves, an end-of-answer token,
and a think-filler token.  Filler tokens serialize into a single
``<think>...</think>`` block so the policy can earn the reasoning-format
reward and produce nonzero token-length curves.  All gradients are
backpropagated by hand and checked against finite differences in the tests.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import CorruptCheckpoint, DimensionMismatch, VersionMismatch
from .maze import Maze, encode_features
from .trace import DIRECTIONS, MOVE_TOKENS
from .util import as_rng

TOKEN_NAMES = DIRECTIONS + ("end", "filler")
N_TOKENS = len(TOKEN_NAMES)  # 6
END_TOKEN = 4
FILLER_TOKEN = 5
MAX_ROLLOUT_TOKENS = 16
FILLER_WORD = "hm"

CHECKPOINT_MAGIC = "ARIADNE-POLICY v1"


@dataclass
class PolicyParams:
    """Weights of the two-layer policy network."""

    input_dim: int
    hidden_dim: int
    w1: np.ndarray  # (hidden_dim, input_dim)
    b1: np.ndarray  # (hidden_dim,)
    w2: np.ndarray  # (N_TOKENS, hidden_dim)
    b2: np.ndarray  # (N_TOKENS,)
    version: str = "v1"

    def __post_init__(self):
        expect = {
            "w1": (self.hidden_dim, self.input_dim),
            "b1": (self.hidden_dim,),
            "w2": (N_TOKENS, self.hidden_dim),
            "b2": (N_TOKENS,),
        }
        for name, shape in expect.items():
            arr = getattr(self, name)
            if arr.shape != shape:
                raise DimensionMismatch(f"{name} has shape {arr.shape}, expected {shape}")
            if not np.isfinite(arr).all():
                raise ValueError(f"{name} contains non-finite values")

    def copy(self) -> "PolicyParams":
        return PolicyParams(
            self.input_dim,
            self.hidden_dim,
            self.w1.copy(),
            self.b1.copy(),
            self.w2.copy(),
            self.b2.copy(),
            self.version,
        )

    @property
    def n_params(self) -> int:
        return self.w1.size + self.b1.size + self.w2.size + self.b2.size

    def to_vector(self) -> np.ndarray:
        return np.concatenate(
            [self.w1.ravel(), self.b1, self.w2.ravel(), self.b2]
        )

    def from_vector(self, vec: np.ndarray) -> "PolicyParams":
        """New params object with the same shapes filled from a flat vector."""
        if vec.size != self.n_params:
            raise DimensionMismatch(f"vector size {vec.size} != {self.n_params}")
        i = 0
        parts = []
        for arr in (self.w1, self.b1, self.w2, self.b2):
            parts.append(vec[i: i + arr.size].reshape(arr.shape).copy())
            i += arr.size
        return PolicyParams(self.input_dim, self.hidden_dim, *parts, self.version)


@dataclass
class Gradients:
    """Parameter-shaped gradient accumulator."""

    w1: np.ndarray
    b1: np.ndarray
    w2: np.ndarray
    b2: np.ndarray

    @classmethod
    def zeros(cls, params: PolicyParams) -> "Gradients":
        return cls(
            np.zeros_like(params.w1),
            np.zeros_like(params.b1),
            np.zeros_like(params.w2),
            np.zeros_like(params.b2),
        )

    def add_scaled(self, other: "Gradients", coef: float = 1.0) -> None:
        self.w1 += coef * other.w1
        self.b1 += coef * other.b1
        self.w2 += coef * other.w2
        self.b2 += coef * other.b2

    def scale(self, coef: float) -> None:
        self.w1 *= coef
        self.b1 *= coef
        self.w2 *= coef
        self.b2 *= coef

    def to_vector(self) -> np.ndarray:
        return np.concatenate([self.w1.ravel(), self.b1, self.w2.ravel(), self.b2])


def feature_dim(width: int, height: int) -> int:
    return width * height * 6


def input_dim_for(width: int, height: int) -> int:
    return feature_dim(width, height) + N_TOKENS + MAX_ROLLOUT_TOKENS


def init_params(input_dim: int, hidden_dim: int = 64, seed: int = 0) -> PolicyParams:
    """Uniform [-0.05, 0.05] weights, zero biases, reproducible per seed."""
    rng = as_rng(seed)
    return PolicyParams(
        input_dim=input_dim,
        hidden_dim=hidden_dim,
        w1=rng.uniform(-0.05, 0.05, size=(hidden_dim, input_dim)),
        b1=np.zeros(hidden_dim),
        w2=rng.uniform(-0.05, 0.05, size=(N_TOKENS, hidden_dim)),
        b2=np.zeros(N_TOKENS),
    )


def _input_vector(
    params: PolicyParams,
    features: np.ndarray,
    prev_token: int | None,
    position: int,
) -> np.ndarray:
    n_feat = params.input_dim - N_TOKENS - MAX_ROLLOUT_TOKENS
    if features.shape != (n_feat,):
        raise DimensionMismatch(
            f"feature vector has shape {features.shape}, expected ({n_feat},)"
        )
    if not 0 <= position < MAX_ROLLOUT_TOKENS:
        raise DimensionMismatch(f"position {position} outside [0, {MAX_ROLLOUT_TOKENS})")
    if prev_token is not None and not 0 <= prev_token < N_TOKENS:
        raise DimensionMismatch(f"prev_token {prev_token} outside [0, {N_TOKENS})")
    x = np.zeros(params.input_dim)
    x[:n_feat] = features
    if prev_token is not None:
        x[n_feat + prev_token] = 1.0
    x[n_feat + N_TOKENS + position] = 1.0
    return x


def token_logits(
    params: PolicyParams,
    maze_features: np.ndarray,
    prev_token: int | None,
    position: int,
) -> np.ndarray:
    """Deterministic logits over the six tokens at one generation step."""
    x = _input_vector(params, maze_features, prev_token, position)
    h = np.tanh(params.w1 @ x + params.b1)
    return params.w2 @ h + params.b2


def softmax(logits: np.ndarray) -> np.ndarray:
    shifted = logits - logits.max()
    e = np.exp(shifted)
    return e / e.sum()


def _as_features(maze_or_features) -> np.ndarray:
    if isinstance(maze_or_features, Maze):
        return encode_features(maze_or_features)
    return np.asarray(maze_or_features, dtype=np.float64)


def serialize_tokens(tokens) -> str:
    """Render a token-id sequence as completion text.

    All filler tokens collapse into one think block of filler words; moves
    keep their order; the end token renders as nothing.
    """
    n_filler = sum(1 for t in tokens if t == FILLER_TOKEN)
    answer = "".join(
        MOVE_TOKENS[TOKEN_NAMES[t]] for t in tokens if t < len(DIRECTIONS)
    )
    if n_filler == 0:
        return answer
    return "<think>" + " ".join([FILLER_WORD] * n_filler) + "</think>" + answer


@dataclass(frozen=True)
class Rollout:
    """One sampled completion with its sequence log-probabilities."""

    tokens: tuple[int, ...]
    logprob_current: float
    logprob_old: float
    completion_text: str


def sample_rollout(
    params_current: PolicyParams,
    params_old: PolicyParams,
    maze,
    temperature: float = 1.0,
    rng: np.random.Generator | None = None,
    greedy: bool = False,
) -> Rollout:
    """Autoregressively sample up to 16 tokens, stopping at the end token.

    Sampling follows ``softmax(logits / temperature)``; both log-probability
    fields are evaluated at the same temperature so that identical current
    and snapshot parameters yield identical fields.  ``greedy`` takes the
    argmax instead (the temperature-to-zero limit) and records temperature-1
    log-probabilities.
    """
    if not greedy and temperature <= 0:
        raise ValueError("temperature must be positive (use greedy for the limit)")
    rng = as_rng(rng if rng is not None else 0)
    features = _as_features(maze)
    tau = 1.0 if greedy else temperature

    tokens: list[int] = []
    lp_cur = 0.0
    lp_old = 0.0
    prev: int | None = None
    for position in range(MAX_ROLLOUT_TOKENS):
        probs_cur = softmax(token_logits(params_current, features, prev, position) / tau)
        if greedy:
            tok = int(np.argmax(probs_cur))
        else:
            tok = int(rng.choice(N_TOKENS, p=probs_cur))
        probs_old = softmax(token_logits(params_old, features, prev, position) / tau)
        lp_cur += math.log(probs_cur[tok])
        lp_old += math.log(probs_old[tok])
        tokens.append(tok)
        prev = tok
        if tok == END_TOKEN:
            break
    return Rollout(
        tokens=tuple(tokens),
        logprob_current=lp_cur,
        logprob_old=lp_old,
        completion_text=serialize_tokens(tokens),
    )


def sequence_logprob_and_grad(
    params: PolicyParams,
    rollout_tokens,
    maze_features: np.ndarray,
    temperature: float = 1.0,
) -> tuple[float, Gradients]:
    """Teacher-forced sequence log-probability and its parameter gradient.

    Backpropagates ``d log softmax(logits/tau)[token] / d logits =
    (onehot - probs)/tau`` through the output layer and the tanh hidden
    layer.  An empty token list yields (0, zero gradient).
    """
    features = _as_features(maze_features)
    grads = Gradients.zeros(params)
    logprob = 0.0
    prev: int | None = None
    for position, tok in enumerate(rollout_tokens):
        x = _input_vector(params, features, prev, position)
        pre = params.w1 @ x + params.b1
        h = np.tanh(pre)
        logits = params.w2 @ h + params.b2
        probs = softmax(logits / temperature)
        logprob += math.log(probs[tok])

        g_logits = -probs / temperature
        g_logits[tok] += 1.0 / temperature
        grads.w2 += np.outer(g_logits, h)
        grads.b2 += g_logits
        g_pre = (params.w2.T @ g_logits) * (1.0 - h * h)
        grads.w1 += np.outer(g_pre, x)
        grads.b1 += g_pre
        prev = tok
    return logprob, grads


def sequence_logprob(
    params: PolicyParams,
    rollout_tokens,
    maze_features: np.ndarray,
    temperature: float = 1.0,
) -> float:
    """Log-probability only (no gradient bookkeeping)."""
    features = _as_features(maze_features)
    logprob = 0.0
    prev: int | None = None
    for position, tok in enumerate(rollout_tokens):
        probs = softmax(token_logits(params, features, prev, position) / temperature)
        logprob += math.log(probs[tok])
        prev = tok
    return logprob


def save_checkpoint(params: PolicyParams, path) -> None:
    """Text checkpoint: magic line, dims line, one parameter per line."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(CHECKPOINT_MAGIC + "\n")
        fh.write(f"{params.input_dim} {params.hidden_dim}\n")
        for value in params.to_vector():
            fh.write(f"{value:.17g}\n")


def load_checkpoint(path) -> PolicyParams:
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines or lines[0] != CHECKPOINT_MAGIC:
        raise VersionMismatch(
            f"bad magic header {lines[0]!r}" if lines else "empty checkpoint file"
        )
    if len(lines) < 2:
        raise CorruptCheckpoint("missing dimensions line")
    try:
        input_dim, hidden_dim = (int(v) for v in lines[1].split())
    except ValueError:
        raise CorruptCheckpoint(f"bad dimensions line {lines[1]!r}")
    if input_dim < 1 or hidden_dim < 1:
        raise CorruptCheckpoint(f"non-positive dimensions {lines[1]!r}")
    expected = hidden_dim * input_dim + hidden_dim + N_TOKENS * hidden_dim + N_TOKENS
    values = lines[2:]
    if len(values) != expected:
        raise CorruptCheckpoint(
            f"expected {expected} parameter lines, found {len(values)}"
        )
    try:
        vec = np.array([float(v) for v in values])
    except ValueError:
        raise CorruptCheckpoint("unparsable parameter value")
    if not np.isfinite(vec).all():
        raise CorruptCheckpoint("non-finite parameter value")
    template = PolicyParams(
        input_dim=input_dim,
        hidden_dim=hidden_dim,
        w1=np.zeros((hidden_dim, input_dim)),
        b1=np.zeros(hidden_dim),
        w2=np.zeros((N_TOKENS, hidden_dim)),
        b2=np.zeros(N_TOKENS),
    )
    return template.from_vector(vec)
