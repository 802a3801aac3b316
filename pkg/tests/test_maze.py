"""Maze representation, BFS oracle, and the difficulty-targeted generator."""

import numpy as np
import pytest

from ariadne.errors import Infeasible, ParseError, Unreachable
from ariadne.maze import (
    E_BIT,
    FULL_MASK,
    Maze,
    N_BIT,
    S_BIT,
    W_BIT,
    apply_moves,
    count_shortest_paths,
    encode_features,
    generate,
    max_steps_for_turns,
    parse_ascii,
    render_ascii,
    solve,
    spec_feasible,
)
from ariadne.sampler import DifficultySpec
from ariadne.trace import turns_of
from oracles import oracle_count_paths_dfs, oracle_distance


def corridor_1x3():
    walls = np.array([[N_BIT | S_BIT | W_BIT, N_BIT | S_BIT, N_BIT | S_BIT | E_BIT]],
                     dtype=np.uint8)
    return Maze(3, 1, walls, start=(0, 0), target=(0, 2))


def open_2x2():
    walls = np.array(
        [
            [N_BIT | W_BIT, N_BIT | E_BIT],
            [S_BIT | W_BIT, S_BIT | E_BIT],
        ],
        dtype=np.uint8,
    )
    return Maze(2, 2, walls, start=(0, 0), target=(1, 1))


class TestMazeInvariants:
    def test_rejects_start_equals_target(self):
        walls = np.array([[N_BIT | S_BIT | W_BIT, N_BIT | S_BIT | E_BIT]], dtype=np.uint8)
        with pytest.raises(ValueError):
            Maze(2, 1, walls, start=(0, 0), target=(0, 0))

    def test_rejects_missing_boundary(self):
        walls = np.zeros((2, 2), dtype=np.uint8)
        with pytest.raises(ValueError):
            Maze(2, 2, walls, start=(0, 0), target=(1, 1))

    def test_rejects_inconsistent_interior_walls(self):
        walls = np.array(
            [
                [N_BIT | W_BIT | E_BIT, N_BIT | E_BIT],  # E set, neighbor W missing
                [S_BIT | W_BIT, S_BIT | E_BIT],
            ],
            dtype=np.uint8,
        )
        with pytest.raises(ValueError):
            Maze(2, 2, walls, start=(0, 0), target=(1, 1))

    def test_walls_are_frozen_copies(self):
        source = np.array([[N_BIT | S_BIT | W_BIT, N_BIT | S_BIT | E_BIT]], dtype=np.uint8)
        maze = Maze(2, 1, source, start=(0, 0), target=(0, 1))
        source[0, 0] = 0
        assert maze.walls[0, 0] == (N_BIT | S_BIT | W_BIT)
        with pytest.raises(ValueError):
            maze.walls[0, 0] = 0


class TestSolve:
    def test_corridor(self):
        assert solve(corridor_1x3()).moves == ("right", "right")

    def test_single_forced_move(self):
        walls = np.array(
            [[N_BIT | E_BIT | W_BIT], [S_BIT | E_BIT | W_BIT]], dtype=np.uint8
        )
        maze = Maze(1, 2, walls, start=(0, 0), target=(1, 0))
        assert solve(maze).moves == ("down",)

    def test_l_shaped_corridor(self):
        # 5x5 fully walled except an L: right 2 then down 2
        walls = np.full((5, 5), FULL_MASK, dtype=np.uint8)
        maze_cells = [(0, 0), (0, 1), (0, 2), (1, 2), (2, 2)]
        for a, b in zip(maze_cells, maze_cells[1:]):
            if b[1] > a[1]:
                walls[a] &= ~E_BIT & 0xF
                walls[b] &= ~W_BIT & 0xF
            else:
                walls[a] &= ~S_BIT & 0xF
                walls[b] &= ~N_BIT & 0xF
        maze = Maze(5, 5, walls, start=(0, 0), target=(2, 2))
        path = solve(maze)
        assert path.moves == ("right", "right", "down", "down")
        assert len(path) == oracle_distance(maze)
        assert path.turns == 1

    def test_unreachable(self):
        walls = np.array(
            [[FULL_MASK, FULL_MASK]], dtype=np.uint8
        )
        maze = Maze(2, 1, walls, start=(0, 0), target=(0, 1))
        with pytest.raises(Unreachable):
            solve(maze)

    def test_tie_break_prefers_up_over_left(self):
        # open 2x2, start bottom-right, target top-left: up-then-left wins
        walls = np.array(
            [
                [N_BIT | W_BIT, N_BIT | E_BIT],
                [S_BIT | W_BIT, S_BIT | E_BIT],
            ],
            dtype=np.uint8,
        )
        maze = Maze(2, 2, walls, start=(1, 1), target=(0, 0))
        assert solve(maze).moves == ("up", "left")


class TestCountShortestPaths:
    def test_corridor_unique(self):
        assert count_shortest_paths(corridor_1x3()) == 1

    def test_open_2x2_has_two(self):
        maze = open_2x2()
        assert count_shortest_paths(maze) == 2
        assert oracle_count_paths_dfs(maze, oracle_distance(maze)) == 2

    def test_generator_outputs_unique(self):
        for seed in range(25):
            maze = generate(DifficultySpec(4, 2), (5, 5), rng_seed=seed)
            assert count_shortest_paths(maze) == 1
            assert oracle_count_paths_dfs(maze, oracle_distance(maze)) == 1

    def test_unreachable(self):
        walls = np.array([[FULL_MASK, FULL_MASK]], dtype=np.uint8)
        maze = Maze(2, 1, walls, start=(0, 0), target=(0, 1))
        with pytest.raises(Unreachable):
            count_shortest_paths(maze)


class TestGenerate:
    def test_single_move_spec(self):
        maze = generate(DifficultySpec(1, 0), (5, 5), rng_seed=0)
        assert solve(maze).moves in (("up",), ("down",), ("left",), ("right",))

    def test_three_steps_one_turn(self):
        maze = generate(DifficultySpec(3, 1), (5, 5), rng_seed=11)
        path = solve(maze)
        assert len(path) == 3
        assert turns_of(path.moves) == 1

    def test_deterministic_per_seed(self):
        a = generate(DifficultySpec(5, 2), (5, 5), rng_seed=42)
        b = generate(DifficultySpec(5, 2), (5, 5), rng_seed=42)
        assert a.grid_hex() == b.grid_hex()
        assert (a.start, a.target) == (b.start, b.target)

    def test_different_seeds_differ(self):
        a = generate(DifficultySpec(5, 2), (5, 5), rng_seed=1)
        b = generate(DifficultySpec(5, 2), (5, 5), rng_seed=2)
        assert (a.grid_hex(), a.start) != (b.grid_hex(), b.start)

    def test_infeasible_spec_raises(self):
        with pytest.raises(Infeasible):
            generate(DifficultySpec(5, 0), (5, 5), rng_seed=0)
        with pytest.raises(Infeasible):
            generate(DifficultySpec(9, 1), (5, 5), rng_seed=0)

    def test_solution_never_crosses_walls(self):
        for seed in range(20):
            maze = generate(DifficultySpec(6, 2), (5, 5), rng_seed=seed)
            assert apply_moves(maze, solve(maze).moves) == maze.target

    def test_contract_against_oracle_sampled(self):
        rng = np.random.default_rng(202)
        for _ in range(60):
            steps = int(rng.integers(1, 11))
            feasible = [t for t in range(0, min(5, steps)) if spec_feasible(steps, t, 5, 5)]
            if not feasible:
                continue
            turns = int(feasible[rng.integers(len(feasible))])
            maze = generate(DifficultySpec(steps, turns), (5, 5), rng_seed=int(rng.integers(1 << 31)))
            path = solve(maze)
            assert len(path) == steps == oracle_distance(maze)
            assert turns_of(path.moves) == turns
            assert count_shortest_paths(maze) == 1


class TestFeasibility:
    def test_straight_walks_capped_by_grid(self):
        assert max_steps_for_turns(0, 5, 5) == 4
        assert max_steps_for_turns(1, 5, 5) == 8
        assert max_steps_for_turns(2, 5, 5) == 12
        assert max_steps_for_turns(0, 3, 1) == 2
        assert max_steps_for_turns(1, 3, 1) == 0

    def test_spec_feasible(self):
        assert spec_feasible(4, 0, 5, 5)
        assert not spec_feasible(5, 0, 5, 5)
        assert spec_feasible(10, 2, 5, 5)
        assert not spec_feasible(10, 1, 5, 5)
        assert not spec_feasible(2, 2, 5, 5)  # turns > steps-1


GOLDEN_ASCII = (
    "###########\n"
    "#         #\n"
    "# # # # # #\n"
    "#         #\n"
    "# # # # # #\n"
    "#     #  O#\n"
    "# # # ### #\n"
    "#         #\n"
    "# # ### # #\n"
    "#  T  #   #\n"
    "###########"
)


class TestAscii:
    def test_smallest_legal_render(self):
        walls = np.array(
            [[N_BIT | S_BIT | W_BIT, N_BIT | S_BIT | E_BIT]], dtype=np.uint8
        )
        maze = Maze(2, 1, walls, start=(0, 0), target=(0, 1))
        text = render_ascii(maze)
        lines = text.splitlines()
        assert len(lines) == 3
        assert all(len(line) == 5 for line in lines)
        assert "O" in text and "T" in text

    def test_round_trip(self):
        for seed in range(10):
            maze = generate(DifficultySpec(5, 2), (5, 5), rng_seed=seed)
            back = parse_ascii(render_ascii(maze))
            assert back.grid_hex() == maze.grid_hex()
            assert (back.start, back.target) == (maze.start, maze.target)

    def test_golden_render(self):
        maze = generate(DifficultySpec(5, 2), (5, 5), rng_seed=42)
        assert render_ascii(maze) == GOLDEN_ASCII

    def test_parse_rejects_garbage(self):
        with pytest.raises(ParseError):
            parse_ascii("###\n#x#\n###")
        with pytest.raises(ParseError):
            parse_ascii("not a maze")


class TestEncodeFeatures:
    def test_open_pair(self):
        walls = np.array(
            [[N_BIT | S_BIT | W_BIT, N_BIT | S_BIT | E_BIT]], dtype=np.uint8
        )
        maze = Maze(2, 1, walls, start=(0, 0), target=(0, 1))
        feats = encode_features(maze)
        assert feats.shape == (12,)
        assert feats[4] == 1.0 and feats[5] == 0.0  # start bit on cell 0
        assert feats[10] == 0.0 and feats[11] == 1.0  # target bit on cell 1
        assert set(feats.tolist()) <= {0.0, 1.0}

    def test_fully_walled_cell_has_four_bits(self):
        maze = generate(DifficultySpec(2, 1), (3, 3), rng_seed=5)
        feats = encode_features(maze).reshape(3, 3, 6)
        for r in range(3):
            for c in range(3):
                expected = [
                    bool(int(maze.walls[r, c]) & bit)
                    for bit in (N_BIT, E_BIT, S_BIT, W_BIT)
                ]
                assert feats[r, c, :4].tolist() == [float(x) for x in expected]

    def test_pure(self):
        maze = generate(DifficultySpec(3, 1), (5, 5), rng_seed=3)
        assert np.array_equal(encode_features(maze), encode_features(maze))
