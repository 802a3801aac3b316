"""Move-token parsing and turn counting."""

import itertools

import pytest
from hypothesis import given, strategies as st

from ariadne.trace import (
    DIRECTIONS,
    MoveSequence,
    count_turns,
    extract_format,
    serialize_moves,
    token_length,
    turns_of,
)


class TestCountTurns:
    def test_empty_input(self):
        assert count_turns("") == ([], 0)

    def test_one_turn(self):
        assert count_turns("<|up|><|up|><|right|>") == (["up", "up", "right"], 1)

    def test_tokens_with_prose(self):
        moves, turns = count_turns("go <|up|> then <|right|> then <|up|>")
        assert moves == ["up", "right", "up"]
        assert turns == 2

    def test_unknown_special_tokens_ignored(self):
        moves, turns = count_turns("<|stop|><|up|><|go|><|up|>")
        assert moves == ["up", "up"]
        assert turns == 0

    def test_case_sensitive(self):
        assert count_turns("<|UP|><|Up|>") == ([], 0)

    @given(
        st.lists(st.sampled_from(DIRECTIONS), max_size=8),
        st.lists(st.text(alphabet="abc XYZ.,", max_size=6), max_size=9),
    )
    def test_invariant_under_prose_insertion(self, moves, fillers):
        plain = serialize_moves(moves)
        pieces = []
        for i, m in enumerate(moves):
            if i < len(fillers):
                pieces.append(fillers[i])
            pieces.append(serialize_moves([m]))
        noisy = "".join(pieces)
        assert count_turns(noisy) == count_turns(plain)

    def test_prefix_turn_monotonicity_exhaustive(self):
        for length in range(7):
            for seq in itertools.product(DIRECTIONS, repeat=length):
                full = turns_of(seq)
                for k in range(length + 1):
                    assert turns_of(seq[:k]) <= full

    def test_serialize_round_trip(self):
        for length in range(5):
            for seq in itertools.product(DIRECTIONS, repeat=length):
                moves, turns = count_turns(serialize_moves(seq))
                assert tuple(moves) == seq
                assert turns == turns_of(seq)


class TestMoveSequence:
    def test_turns_derived(self):
        assert MoveSequence(("up", "right", "right")).turns == 1

    def test_from_text(self):
        seq = MoveSequence.from_text("<|left|><|left|>")
        assert seq.moves == ("left", "left")
        assert len(seq) == 2


class TestExtractFormat:
    def test_well_formed(self):
        parsed = extract_format("<think>x</think><|up|>")
        assert parsed.think_block == "x"
        assert parsed.moves == ("up",)
        assert parsed.format_ok_reasoning
        assert parsed.format_ok_answer

    def test_missing_think_block(self):
        parsed = extract_format("<|up|>")
        assert not parsed.format_ok_reasoning
        assert parsed.format_ok_answer
        assert parsed.answer_text == "<|up|>"

    def test_nested_think_malformed(self):
        parsed = extract_format("<think>a<think>b</think>")
        assert not parsed.format_ok_reasoning
        assert parsed.answer_text == "<think>a<think>b</think>"

    def test_close_before_open_malformed(self):
        parsed = extract_format("</think>x<think>")
        assert not parsed.format_ok_reasoning

    def test_answer_is_text_after_close(self):
        parsed = extract_format("<think>go up</think> <|up|> <|down|>")
        assert parsed.answer_text == " <|up|> <|down|>"
        assert parsed.moves == ("up", "down")
        assert parsed.turns == 1

    def test_tokens_inside_think_not_answer_moves(self):
        parsed = extract_format("<think><|left|></think><|right|>")
        assert parsed.moves == ("right",)

    def test_trailing_prose_breaks_answer_format(self):
        parsed = extract_format("<think>t</think><|up|> done")
        assert parsed.format_ok_reasoning
        assert not parsed.format_ok_answer

    def test_unknown_token_breaks_answer_format(self):
        parsed = extract_format("<think>t</think><|up|><|stop|>")
        assert not parsed.format_ok_answer
        assert parsed.moves == ("up",)

    def test_empty_string(self):
        parsed = extract_format("")
        assert parsed.moves == ()
        assert not parsed.format_ok_reasoning


class TestTokenLength:
    @pytest.mark.parametrize(
        "text,expected",
        [
            ("", 0),
            ("<|up|><|down|>", 2),
            ("a b c", 3),
            ("go <|up|> now", 3),
            ("<think>hm hm</think><|up|>", 3),
            ("<think>hm hm hm</think><|up|>", 4),
            ("x<|up|>y", 3),
        ],
    )
    def test_examples(self, text, expected):
        assert token_length(text) == expected

    def test_deterministic(self):
        text = "<think>a b</think><|left|><|left|>"
        assert token_length(text) == token_length(text)
