"""Braid words over the Fibonacci B3 generators and their SU(2) evaluation.

A braid word is a tuple of signed letters: 1 and -1 for the first generator
and its inverse, 2 and -2 for the second.  The text form is whitespace
separated integers, e.g. "2 2 -1 -1 -1 2 2 -1 2 1"; the empty string is the
empty word.  Letters are listed in time order (leftmost acts first on a
column state), so the evaluated matrix is the product of the letter matrices
in *reversed* order.
"""

from __future__ import annotations

import numpy as np

from fibonav.quaternions import quat_mul, su2_from_quat

#: inverse golden mean, tau**2 + tau == 1.
TAU = (np.sqrt(5.0) - 1.0) / 2.0

Word = tuple[int, ...]

_LETTERS = (1, -1, 2, -2)


def _sigma_matrices():
    s1 = np.array(
        [
            [np.exp(-7j * np.pi / 10), 0.0],
            [0.0, np.exp(7j * np.pi / 10)],
        ]
    )
    s2 = np.array(
        [
            [-TAU * np.exp(-1j * np.pi / 10), -1j * np.sqrt(TAU)],
            [-1j * np.sqrt(TAU), -TAU * np.exp(1j * np.pi / 10)],
        ]
    )
    return {1: s1, -1: s1.conj().T, 2: s2, -2: s2.conj().T}


_SIGMA = _sigma_matrices()


def _quat_of(m) -> np.ndarray:
    return np.array([m[0, 0].real, m[0, 0].imag, m[0, 1].real, m[0, 1].imag])


#: the generators as unit quaternions, keyed by signed letter.
SIGMA_QUAT = {k: _quat_of(m) for k, m in _SIGMA.items()}


def sigma(i: int, sign: int = 1) -> np.ndarray:
    """Generator matrix sigma_i (sign=+1) or its inverse (sign=-1)."""
    if i not in (1, 2) or sign not in (1, -1):
        raise ValueError(f"no generator sigma({i}, {sign})")
    return _SIGMA[sign * i].copy()


def parse_word(text: str) -> Word:
    """Parse the whitespace-separated text form of a braid word."""
    letters = tuple(int(tok) for tok in text.split())
    for l in letters:
        if l not in _LETTERS:
            raise ValueError(f"bad braid letter {l}; expected one of {_LETTERS}")
    return letters


def format_word(word: Word) -> str:
    return " ".join(str(l) for l in word)


def evaluate(word: Word) -> np.ndarray:
    """SU(2) matrix of a braid word (reversed-order product of letters)."""
    return su2_from_quat(evaluate_quat(word))


def evaluate_quat(word: Word) -> np.ndarray:
    """Unit quaternion of a braid word; the empty word gives 1."""
    q = np.array([1.0, 0.0, 0.0, 0.0])
    for l in reversed(word):
        q = quat_mul(q, SIGMA_QUAT[l])
    return q


def evaluate_padded(codes: np.ndarray) -> np.ndarray:
    """Evaluate zero-padded letter rows (n, L) to an (n, 4) quaternion array.

    Letter code 0 is padding (identity); the cost is O(L) vectorized
    products rather than one Python loop per word.
    """
    codes = np.asarray(codes, dtype=np.int8)
    n, maxlen = codes.shape if codes.ndim == 2 else (len(codes), 0)
    out = np.tile(np.array([1.0, 0.0, 0.0, 0.0]), (n, 1))
    table = np.array(
        [
            SIGMA_QUAT[-2],
            SIGMA_QUAT[-1],
            [1.0, 0.0, 0.0, 0.0],
            SIGMA_QUAT[1],
            SIGMA_QUAT[2],
        ]
    )
    # padding columns multiply by the exact identity, which is a no-op
    for k in range(maxlen - 1, -1, -1):
        out = quat_mul(out, table[codes[:, k].astype(np.int64) + 2])
    return out


def evaluate_quat_many(words) -> np.ndarray:
    """Evaluate a sequence of braid words to an (N, 4) quaternion array."""
    n = len(words)
    if n == 0:
        return np.zeros((0, 4))
    maxlen = max((len(w) for w in words), default=0)
    if maxlen == 0:
        return np.tile(np.array([1.0, 0.0, 0.0, 0.0]), (n, 1))
    codes = np.zeros((n, maxlen), dtype=np.int8)
    for i, w in enumerate(words):
        if w:
            codes[i, : len(w)] = w
    return evaluate_padded(codes)


def invert(word: Word) -> Word:
    """Reverse the letters and flip all signs; evaluates to the inverse."""
    return tuple(-l for l in reversed(word))


def concat(*words: Word) -> Word:
    """Concatenate words in time order; evaluates to the reversed product."""
    out: tuple[int, ...] = ()
    for w in words:
        out = out + tuple(w)
    return out


def free_reduce(word: Word) -> Word:
    """Cancel adjacent letter/inverse pairs until none remain."""
    stack: list[int] = []
    for l in word:
        if stack and stack[-1] == -l:
            stack.pop()
        else:
            stack.append(l)
    return tuple(stack)


def normalize(word: Word) -> tuple[Word, int]:
    """Freely reduce and fold runs using sigma_i**10 == -1.

    Runs sigma_i**k are reduced to exponents in (-5, 5]; every wrap by 10
    contributes a factor -1 which is accumulated and returned, so that
    evaluate(word) == sign * evaluate(reduced word).
    """
    sign = 1
    # stack of [generator, exponent] runs; exponent never 0
    runs: list[list[int]] = []

    def push(gen: int, exp: int):
        nonlocal sign
        while runs and runs[-1][0] == gen:
            exp += runs.pop()[1]
        exp10 = exp % 10  # in 0..9
        if exp10 > 5:
            exp10 -= 10
        # each shift by 10 flips the sign once
        if (exp - exp10) % 20 != 0:
            sign = -sign
        if exp10 != 0:
            runs.append([gen, exp10])

    for l in word:
        push(abs(l), 1 if l > 0 else -1)

    out: list[int] = []
    for gen, exp in runs:
        out.extend([gen if exp > 0 else -gen] * abs(exp))
    return tuple(out), sign
