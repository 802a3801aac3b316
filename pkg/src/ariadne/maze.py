"""Rectangular wall mazes with a difficulty-targeted generator.

Walls live in a per-cell 4-bit mask (N=1, E=2, S=4, W=8) kept consistent
across neighboring cells; the outer boundary is always walled.  The generator
carves a self-avoiding walk with an exact (steps, turns) signature, then opens
distractor corridors one wall at a time, keeping only removals that preserve
both the shortest-path length and its uniqueness.  ``solve`` is the
deterministic ground-truth oracle used for reward answers.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from .errors import Infeasible, ParseError, Unreachable
from .trace import MoveSequence
from .util import as_rng

N_BIT, E_BIT, S_BIT, W_BIT = 1, 2, 4, 8
FULL_MASK = N_BIT | E_BIT | S_BIT | W_BIT

# Tie-break priority for the BFS oracle, mirroring the move-token listing
# order; deltas are (row, col) with row 0 at the top.
DIRECTION_ORDER = ("up", "down", "left", "right")
DELTAS = {"up": (-1, 0), "down": (1, 0), "left": (0, -1), "right": (0, 1)}
WALL_BIT = {"up": N_BIT, "down": S_BIT, "left": W_BIT, "right": E_BIT}
OPPOSITE = {"up": "down", "down": "up", "left": "right", "right": "left"}


@dataclass(frozen=True)
class Maze:
    """Immutable maze: wall grid plus start and target cells."""

    width: int
    height: int
    walls: np.ndarray  # uint8, shape (height, width)
    start: tuple[int, int]
    target: tuple[int, int]

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise ValueError("maze dimensions must be >= 1")
        walls = np.asarray(self.walls, dtype=np.uint8).copy()
        if walls.shape != (self.height, self.width):
            raise ValueError("wall grid shape does not match dimensions")
        walls.setflags(write=False)
        object.__setattr__(self, "walls", walls)
        for name, (r, c) in (("start", self.start), ("target", self.target)):
            if not (0 <= r < self.height and 0 <= c < self.width):
                raise ValueError(f"{name} cell {r},{c} out of bounds")
        if self.start == self.target:
            raise ValueError("start and target must differ")
        self._check_wall_consistency()

    def _check_wall_consistency(self):
        w = self.walls
        if not (w[0, :] & N_BIT).all() or not (w[-1, :] & S_BIT).all():
            raise ValueError("missing boundary wall on top or bottom row")
        if not (w[:, 0] & W_BIT).all() or not (w[:, -1] & E_BIT).all():
            raise ValueError("missing boundary wall on left or right column")
        if self.width > 1:
            east = (w[:, :-1] & E_BIT).astype(bool)
            west = (w[:, 1:] & W_BIT).astype(bool)
            if not (east == west).all():
                raise ValueError("E/W wall bits disagree between neighbors")
        if self.height > 1:
            south = (w[:-1, :] & S_BIT).astype(bool)
            north = (w[1:, :] & N_BIT).astype(bool)
            if not (south == north).all():
                raise ValueError("N/S wall bits disagree between neighbors")

    def blocked(self, cell: tuple[int, int], direction: str) -> bool:
        """True when moving from ``cell`` in ``direction`` crosses a wall."""
        r, c = cell
        return bool(self.walls[r, c] & WALL_BIT[direction])

    def open_neighbors(self, cell: tuple[int, int]):
        r, c = cell
        mask = int(self.walls[r, c])
        for d in DIRECTION_ORDER:
            if not mask & WALL_BIT[d]:
                dr, dc = DELTAS[d]
                yield d, (r + dr, c + dc)

    def grid_hex(self) -> str:
        """Row-major wall masks as lowercase hex digits."""
        return "".join(format(v, "x") for v in self.walls.ravel())


def _bfs_parents(maze: Maze):
    """BFS from start; parents resolve ties by direction priority."""
    dist = {maze.start: 0}
    parent: dict[tuple[int, int], tuple[tuple[int, int], str]] = {}
    queue = deque([maze.start])
    while queue:
        cell = queue.popleft()
        for d, nxt in maze.open_neighbors(cell):
            if nxt not in dist:
                dist[nxt] = dist[cell] + 1
                parent[nxt] = (cell, d)
                queue.append(nxt)
    return dist, parent


def solve(maze: Maze) -> MoveSequence:
    """Shortest start-to-target path as moves (deterministic tie-break)."""
    dist, parent = _bfs_parents(maze)
    if maze.target not in dist:
        raise Unreachable(f"no path from {maze.start} to {maze.target}")
    moves: list[str] = []
    cell = maze.target
    while cell != maze.start:
        cell, d = parent[cell]
        moves.append(d)
    moves.reverse()
    return MoveSequence(tuple(moves))


def count_shortest_paths(maze: Maze) -> int:
    """Number of distinct shortest start-to-target paths (BFS layer counts)."""
    masks = [int(v) for v in maze.walls.ravel()]
    dist, count = _flat_dist_count(
        masks, maze.width, maze.height, maze.start, maze.target
    )
    if dist is None:
        raise Unreachable(f"no path from {maze.start} to {maze.target}")
    return count


# --- generation internals on a flat mask list (fast to mutate and scan) ---

_FLAT_STEPS = {"up": None, "down": None, "left": None, "right": None}


def _flat_dist_count(masks, width, height, start, target):
    """Single BFS returning (distance to target, #shortest paths) or (None, 0)."""
    start_i = start[0] * width + start[1]
    target_i = target[0] * width + target[1]
    steps = ((N_BIT, -width), (S_BIT, width), (W_BIT, -1), (E_BIT, 1))
    dist = [-1] * (width * height)
    ways = [0] * (width * height)
    dist[start_i] = 0
    ways[start_i] = 1
    queue = deque([start_i])
    while queue:
        i = queue.popleft()
        d = dist[i]
        mask = masks[i]
        for bit, off in steps:
            if mask & bit:
                continue
            j = i + off
            if dist[j] == -1:
                dist[j] = d + 1
                ways[j] = ways[i]
                queue.append(j)
            elif dist[j] == d + 1:
                ways[j] += ways[i]
    if dist[target_i] == -1:
        return None, 0
    return dist[target_i], ways[target_i]


def _flat_toggle(masks, width, r, c, direction, closed: bool):
    dr, dc = DELTAS[direction]
    i = r * width + c
    j = (r + dr) * width + (c + dc)
    if closed:
        masks[i] |= WALL_BIT[direction]
        masks[j] |= WALL_BIT[OPPOSITE[direction]]
    else:
        masks[i] &= ~WALL_BIT[direction] & 0xF
        masks[j] &= ~WALL_BIT[OPPOSITE[direction]] & 0xF


def _spiral_caps(width: int, height: int) -> list[int]:
    """Maximal alternating segment lengths, longest axis first."""
    a, b = max(width, height) - 1, min(width, height) - 1
    caps = []
    if a > 0:
        caps.append(a)
    while b > 0:
        caps.append(b)
        if a <= 0:
            break
        caps.append(a)
        b -= 1
        a -= 1
    return caps


def max_steps_for_turns(turns: int, width: int, height: int) -> int:
    """Longest realizable walk with exactly ``turns`` turns on this grid.

    Uses the shrinking-spiral construction; self-avoiding segments alternate
    axes, so a walk with t turns has t+1 segments.  Grids with a unit
    dimension only support straight walks.
    """
    if min(width, height) == 1:
        return max(width, height) - 1 if turns == 0 else 0
    caps = _spiral_caps(width, height)
    return sum(caps[: turns + 1])


def spec_feasible(steps: int, turns: int, width: int, height: int) -> bool:
    """Quick check that a (steps, turns) pair fits the grid."""
    if steps < 1 or turns < 0 or turns > steps - 1:
        return False
    return steps <= max_steps_for_turns(turns, width, height)


_PERPENDICULAR = {
    "up": ("left", "right"),
    "down": ("left", "right"),
    "left": ("up", "down"),
    "right": ("up", "down"),
}


def _random_walk(steps, turns, width, height, rng) -> list[tuple[int, int]] | None:
    """One attempt at a self-avoiding walk with the exact turn signature."""
    if turns > 0:
        gaps = rng.choice(steps - 1, size=turns, replace=False)
        turn_at = set(int(g) + 1 for g in gaps)  # move indices where direction flips
    else:
        turn_at = set()
    direction = DIRECTION_ORDER[rng.integers(4)]
    cell = (int(rng.integers(height)), int(rng.integers(width)))
    visited = {cell}
    path = [cell]
    for i in range(steps):
        if i in turn_at:
            direction = _PERPENDICULAR[direction][rng.integers(2)]
        dr, dc = DELTAS[direction]
        cell = (cell[0] + dr, cell[1] + dc)
        if not (0 <= cell[0] < height and 0 <= cell[1] < width) or cell in visited:
            return None
        visited.add(cell)
        path.append(cell)
    return path


def _interior_walls(width: int, height: int) -> list[tuple[int, int, str]]:
    candidates = []
    for r in range(height):
        for c in range(width):
            if c + 1 < width:
                candidates.append((r, c, "right"))
            if r + 1 < height:
                candidates.append((r, c, "down"))
    return candidates


def generate(
    spec,
    size: tuple[int, int] = (5, 5),
    rng_seed=0,
    max_attempts: int = 10_000,
) -> Maze:
    """Build a maze whose unique shortest path realizes ``spec`` exactly.

    ``spec`` is anything with ``steps`` and ``turns`` attributes.  The carved
    walk fixes the ground truth; distractor corridors are then opened wall by
    wall, rejecting any removal that shortens the path or makes the shortest
    path ambiguous.  Deterministic for a fixed seed.
    """
    width, height = size
    steps, turns = spec.steps, spec.turns
    if not spec_feasible(steps, turns, width, height):
        raise Infeasible(
            f"spec steps={steps} turns={turns} impossible on {width}x{height}"
        )
    rng = as_rng(rng_seed)

    for _ in range(max_attempts):
        path = _random_walk(steps, turns, width, height, rng)
        if path is None:
            continue
        masks = [FULL_MASK] * (width * height)
        for a, b in zip(path, path[1:]):
            delta = (b[0] - a[0], b[1] - a[1])
            for d, dd in DELTAS.items():
                if dd == delta:
                    _flat_toggle(masks, width, a[0], a[1], d, closed=False)
                    break
        start, target = path[0], path[-1]

        candidates = _interior_walls(width, height)
        rng.shuffle(candidates)
        for r, c, d in candidates:
            if not masks[r * width + c] & WALL_BIT[d]:
                continue
            _flat_toggle(masks, width, r, c, d, closed=False)
            dist, count = _flat_dist_count(masks, width, height, start, target)
            if dist != steps or count != 1:
                _flat_toggle(masks, width, r, c, d, closed=True)

        grid = np.array(masks, dtype=np.uint8).reshape(height, width)
        maze = Maze(width, height, grid, start=start, target=target)
        oracle = solve(maze)
        if len(oracle) == steps and oracle.turns == turns:
            return maze
    raise Infeasible(
        f"no maze found for steps={steps} turns={turns} "
        f"on {width}x{height} within {max_attempts} attempts"
    )


def render_ascii(maze: Maze) -> str:
    """(2h+1) x (2w+1) character picture: '#' walls, 'O' start, 'T' target."""
    rows, cols = 2 * maze.height + 1, 2 * maze.width + 1
    grid = [[" "] * cols for _ in range(rows)]
    for gr in range(0, rows, 2):
        for gc in range(0, cols, 2):
            grid[gr][gc] = "#"
    for r in range(maze.height):
        for c in range(maze.width):
            mask = int(maze.walls[r, c])
            if mask & N_BIT:
                grid[2 * r][2 * c + 1] = "#"
            if mask & S_BIT:
                grid[2 * r + 2][2 * c + 1] = "#"
            if mask & W_BIT:
                grid[2 * r + 1][2 * c] = "#"
            if mask & E_BIT:
                grid[2 * r + 1][2 * c + 2] = "#"
    sr, sc = maze.start
    tr, tc = maze.target
    grid[2 * sr + 1][2 * sc + 1] = "O"
    grid[2 * tr + 1][2 * tc + 1] = "T"
    return "\n".join("".join(row) for row in grid)


def parse_ascii(text: str) -> Maze:
    """Inverse of :func:`render_ascii`."""
    lines = text.splitlines()
    if not lines or len(lines) % 2 == 0 or len(lines[0]) % 2 == 0:
        raise ParseError("ascii maze must be (2h+1) x (2w+1)")
    height, width = len(lines) // 2, len(lines[0]) // 2
    if any(len(line) != 2 * width + 1 for line in lines):
        raise ParseError("ragged ascii maze lines")
    walls = np.zeros((height, width), dtype=np.uint8)
    start = target = None
    for r in range(height):
        for c in range(width):
            if lines[2 * r][2 * c + 1] == "#":
                walls[r, c] |= N_BIT
            if lines[2 * r + 2][2 * c + 1] == "#":
                walls[r, c] |= S_BIT
            if lines[2 * r + 1][2 * c] == "#":
                walls[r, c] |= W_BIT
            if lines[2 * r + 1][2 * c + 2] == "#":
                walls[r, c] |= E_BIT
            marker = lines[2 * r + 1][2 * c + 1]
            if marker == "O":
                start = (r, c)
            elif marker == "T":
                target = (r, c)
            elif marker != " ":
                raise ParseError(f"unexpected cell marker {marker!r}", line=2 * r + 2)
    if start is None or target is None:
        raise ParseError("missing start 'O' or target 'T' marker")
    return Maze(width, height, walls, start=start, target=target)


def encode_features(maze: Maze) -> np.ndarray:
    """Per-cell observation: 4 wall bits, is-start, is-target; row-major.

    Length ``width * height * 6``, each component in {0, 1}.  Stands in for
    the maze image a vision policy would consume.
    """
    feats = np.zeros((maze.height, maze.width, 6), dtype=np.float64)
    for bit_index, bit in enumerate((N_BIT, E_BIT, S_BIT, W_BIT)):
        feats[:, :, bit_index] = (maze.walls & bit).astype(bool)
    feats[maze.start[0], maze.start[1], 4] = 1.0
    feats[maze.target[0], maze.target[1], 5] = 1.0
    return feats.ravel()


def apply_moves(maze: Maze, moves) -> tuple[int, int] | None:
    """Walk the moves from start; None as soon as a wall or boundary blocks."""
    cell = maze.start
    for m in moves:
        if maze.blocked(cell, m):
            return None
        dr, dc = DELTAS[m]
        cell = (cell[0] + dr, cell[1] + dc)
    return cell
