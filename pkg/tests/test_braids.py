import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fibonav.braids import (
    TAU,
    concat,
    evaluate,
    evaluate_quat,
    evaluate_quat_many,
    format_word,
    free_reduce,
    invert,
    normalize,
    parse_word,
    sigma,
)
from fibonav.quaternions import distance

words = st.lists(st.sampled_from([1, -1, 2, -2]), max_size=12).map(tuple)

S_WORD = parse_word("2 2 -1 -1 -1 2 2 -1 2 1")
T_WORD = parse_word("1 2 2 -1 -1 2 -1 2 -1 2")

S_MATRIX = np.array(
    [
        [0.5 - 0.706298j, -0.428519 - 0.2598349j],
        [0.428519 - 0.2598349j, 0.5 + 0.706298j],
    ]
)
T_MATRIX = np.array(
    [
        [-0.309017 + 0.159002j, -0.414981 + 0.840843j],
        [0.414981 + 0.840843j, -0.309017 - 0.159002j],
    ]
)


def test_generator_entries():
    s1 = sigma(1)
    assert np.isclose(s1[0, 0], np.exp(-7j * np.pi / 10))
    assert np.isclose(s1[0, 0], -0.587785252292 - 0.809016994375j)
    s2 = sigma(2)
    assert np.isclose(s2[0, 1], -1j * np.sqrt(TAU))
    assert np.isclose(np.linalg.det(s1), 1.0) and np.isclose(np.linalg.det(s2), 1.0)
    for m in (s1, s2):
        assert np.allclose(m @ m.conj().T, np.eye(2), atol=1e-14)


def test_generator_inverse_is_adjoint():
    assert np.allclose(sigma(1) @ sigma(1, -1), np.eye(2), atol=1e-15)
    assert np.allclose(sigma(2, -1), sigma(2).conj().T)


def test_braid_relation():
    s1, s2 = sigma(1), sigma(2)
    assert np.max(np.abs(s1 @ s2 @ s1 - s2 @ s1 @ s2)) <= 1e-12


def test_order_ten():
    for i in (1, 2):
        m = np.linalg.matrix_power(sigma(i), 10)
        assert np.max(np.abs(m + np.eye(2))) <= 1e-12


def test_pseudo_generator_fixture_matrices():
    assert np.max(np.abs(evaluate(S_WORD) - S_MATRIX)) <= 5e-6
    assert np.max(np.abs(evaluate(T_WORD) - T_MATRIX)) <= 5e-6


def test_empty_word_is_identity():
    assert np.allclose(evaluate(()), np.eye(2))


def test_reverse_order_evaluation():
    # the concatenation uv evaluates to evaluate(v) @ evaluate(u)
    u, v = (1, 2, -1), (2, 2, 1, -2)
    lhs = evaluate(concat(u, v))
    rhs = evaluate(v) @ evaluate(u)
    assert np.max(np.abs(lhs - rhs)) < 1e-14


@settings(max_examples=40, deadline=None)
@given(words)
def test_invert_gives_matrix_inverse(w):
    lhs = evaluate(invert(w))
    rhs = np.linalg.inv(evaluate(w))
    assert np.max(np.abs(lhs - rhs)) < 1e-12


def test_invert_examples():
    assert invert((1, 2)) == (-2, -1)
    assert invert(()) == ()


def test_invert_of_fixture_word_is_adjoint():
    lhs = evaluate(invert(S_WORD))
    assert np.max(np.abs(lhs - evaluate(S_WORD).conj().T)) < 1e-12


def test_free_reduce():
    assert free_reduce((1, -1)) == ()
    assert free_reduce((1, 2, -2, -1)) == ()
    assert free_reduce((1, 2, -2, 1)) == (1, 1)


class TestNormalize:
    def test_cancel(self):
        assert normalize((1, -1)) == ((), 1)

    def test_order_ten(self):
        assert normalize((1,) * 10) == ((), -1)

    def test_seven_becomes_minus_three(self):
        word, sign = normalize((2,) * 7)
        assert word == (-2, -2, -2) and sign == -1
        lhs = evaluate((2,) * 7)
        rhs = sign * evaluate(word)
        assert np.max(np.abs(lhs - rhs)) < 1e-12

    @settings(max_examples=60, deadline=None)
    @given(words)
    def test_preserves_value_with_sign(self, w):
        word, sign = normalize(w)
        assert np.max(np.abs(evaluate(w) - sign * evaluate(word))) < 1e-12

    @settings(max_examples=30, deadline=None)
    @given(words)
    def test_projectively_invariant(self, w):
        word, _ = normalize(w)
        assert distance(evaluate_quat(w), evaluate_quat(word)) < 1e-6

    def test_long_runs_fold(self):
        word, sign = normalize((1,) * 23)
        assert word == (1, 1, 1) and sign == 1  # 23 = 2*10 + 3


def test_text_round_trip():
    w = (2, 2, -1, -1, -1, 2, 2, -1, 2, 1)
    assert parse_word(format_word(w)) == w
    assert parse_word("") == ()
    assert format_word(()) == ""
    with pytest.raises(ValueError):
        parse_word("1 3")


def test_evaluate_many_matches_loop(rng):
    ws = [tuple(rng.choice([1, -1, 2, -2], size=rng.integers(0, 15)).tolist()) for _ in range(40)]
    batch = evaluate_quat_many(ws)
    for i, w in enumerate(ws):
        assert np.max(np.abs(batch[i] - evaluate_quat(w))) < 1e-13
