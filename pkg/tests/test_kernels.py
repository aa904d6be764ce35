"""Token edit-distance kernel vs a brute-force DP, across both backends."""

import random

import pytest

from leveltext import _pure, kernels
from support import bf_levenshtein

VOCAB = ["sun", "moon", "rain", "tree", "bird", "rock", "wave", "leaf"]


def _random_seq(rng, max_len=12):
    return [rng.choice(VOCAB) for _ in range(rng.randrange(0, max_len + 1))]


def test_backend_is_declared():
    assert kernels.BACKEND in {"cython", "pure"}


def test_known_values():
    assert kernels.token_edit_distance([], []) == 0
    assert kernels.token_edit_distance(["a"], []) == 1
    assert kernels.token_edit_distance([], ["a", "b"]) == 2
    assert kernels.token_edit_distance(["a", "b", "c"], ["a", "b", "c"]) == 0
    assert kernels.token_edit_distance(["a", "b", "c"], ["a", "c"]) == 1
    assert (
        kernels.token_edit_distance(list("kitten"), list("sitting")) == 3
    )


def test_matches_brute_force_dp():
    rng = random.Random(7)
    for _ in range(500):
        a, b = _random_seq(rng), _random_seq(rng)
        assert kernels.token_edit_distance(a, b) == bf_levenshtein(a, b)


def test_pure_backend_agrees_with_active_backend():
    rng = random.Random(11)
    for _ in range(200):
        a, b = _random_seq(rng), _random_seq(rng)
        enc_a, enc_b = kernels._encode(a, b)
        assert kernels.token_edit_distance(a, b) == _pure.edit_distance_i32(enc_a, enc_b)


def test_arbitrary_string_tokens():
    a = ["éclair", "café", "", "multi word token"]
    b = ["café", "", "multi word token", "extra"]
    assert kernels.token_edit_distance(a, b) == bf_levenshtein(a, b)


def test_symmetry_smoke():
    rng = random.Random(3)
    for _ in range(100):
        a, b = _random_seq(rng), _random_seq(rng)
        assert kernels.token_edit_distance(a, b) == kernels.token_edit_distance(b, a)


@pytest.mark.parametrize("n", [0, 1, 50])
def test_identity_is_zero(n):
    seq = [f"tok{i}" for i in range(n)]
    assert kernels.token_edit_distance(seq, list(seq)) == 0
