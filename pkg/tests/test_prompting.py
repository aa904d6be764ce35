"""Exemplar selection and prompt rendering against checked-in goldens.

Golden files hold the exact expected bytes with no trailing newline, built
by hand-filling the template data files."""

import math
import warnings
from pathlib import Path

import pytest

from leveltext.prompting import (
    PromptBundle,
    ShotSelectionPolicy,
    estimate_tokens,
    pair_token_length,
    qualifies,
    render_few_shot,
    render_zero_shot,
    select_shots,
    task_verb_for,
)
from support import GOLDEN_FEW_PAIR, GOLDEN_TRAIN, GOLDEN_ZERO_PAIR, bf_select_shots, make_pair

GOLDEN_DIR = Path(__file__).parent / "golden"


def _golden(name: str) -> str:
    return (GOLDEN_DIR / name).read_bytes().decode("utf-8")


# --- qualification ----------------------------------------------------------


def test_qualification_window_examples():
    request = make_pair("q:0>1", 800, 600)
    assert qualifies(request, make_pair("t:0>1", 840, 560))
    assert not qualifies(request, make_pair("t:0>2", 860, 600))
    assert not qualifies(request, make_pair("t:0>3", 800, 540))


def test_qualification_boundary_inclusive():
    request = make_pair("q:0>1", 800, 600)
    assert qualifies(request, make_pair("t:0>1", 850, 650))
    assert qualifies(request, make_pair("t:0>2", 750, 550))
    assert not qualifies(request, make_pair("t:0>3", 850.0001, 600))


# --- selection --------------------------------------------------------------


def _train_with_lengths(lengths):
    out = []
    for i, n in enumerate(lengths):
        # Half the tokens on each side; +-50 window trivially satisfied.
        out.append(make_pair(f"t:{i}>x", 800, 600, source_tokens=n // 2, target_tokens=n - n // 2))
    return out


def test_selection_shortest_first_with_id_ties():
    train = _train_with_lengths([120, 80, 200, 80, 150])
    request = make_pair("q:0>1", 800, 600)
    chosen = select_shots(request, train, ShotSelectionPolicy(n_shots=3))
    assert [pair_token_length(p) for p in chosen] == [80, 80, 120]
    # The two 80-token pairs tie; ids break the tie ascending.
    assert [p.pair_id for p in chosen] == ["t:1>x", "t:3>x", "t:0>x"]


def test_selection_excludes_request_itself():
    request = make_pair("t:0>x", 800, 600)
    train = [request, make_pair("t:1>x", 800, 600)]
    with pytest.warns(UserWarning, match="only 1 of 3"):
        chosen = select_shots(request, train, ShotSelectionPolicy(n_shots=3))
    assert [p.pair_id for p in chosen] == ["t:1>x"]


def test_selection_warns_when_short():
    request = make_pair("q:0>1", 800, 600)
    train = [make_pair("t:0>x", 800, 600)]
    with pytest.warns(UserWarning, match="only 1 of 3"):
        chosen = select_shots(request, train, ShotSelectionPolicy(n_shots=3))
    assert len(chosen) == 1


def test_selection_zero_shots_empty():
    request = make_pair("q:0>1", 800, 600)
    assert select_shots(request, [make_pair("t:0>x", 800, 600)], ShotSelectionPolicy(n_shots=0)) == []


def test_selection_matches_linear_scan_oracle():
    import random

    rng = random.Random(23)
    for _ in range(100):
        request = make_pair("q:0>1", rng.uniform(300, 1200), rng.uniform(300, 1200))
        train = [
            make_pair(
                f"t:{i}>x",
                rng.uniform(300, 1200),
                rng.uniform(300, 1200),
                source_tokens=rng.randint(1, 12),
                target_tokens=rng.randint(1, 12),
            )
            for i in range(rng.randint(0, 25))
        ]
        n = rng.randint(0, 6)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            got = select_shots(request, train, ShotSelectionPolicy(n_shots=n))
        assert [p.pair_id for p in got] == bf_select_shots(request, train, n)


def test_policy_validation():
    with pytest.raises(ValueError):
        ShotSelectionPolicy(window=0.0)
    with pytest.raises(ValueError):
        ShotSelectionPolicy(n_shots=-1)
    with pytest.warns(UserWarning, match="unusual shot count"):
        ShotSelectionPolicy(n_shots=2)


# --- rendering --------------------------------------------------------------


def test_task_verb_rule():
    assert task_verb_for(make_pair("p:0>1", 900, 500)) == "simplify it"
    assert task_verb_for(make_pair("p:0>2", 500, 900)) == "complicate it"
    assert task_verb_for(make_pair("p:0>3", 700, 700)) == "complicate it"


def test_zero_shot_matches_golden():
    bundle = render_zero_shot(GOLDEN_ZERO_PAIR)
    assert bundle.rendered_text == _golden("zero_shot.txt")
    assert bundle.shots_used == ()
    assert bundle.method == "zero-shot"
    assert bundle.task_verb == "simplify it"
    assert bundle.pair_id == GOLDEN_ZERO_PAIR.pair_id


def test_three_shot_matches_golden():
    shots = select_shots(GOLDEN_FEW_PAIR, GOLDEN_TRAIN, ShotSelectionPolicy(n_shots=3))
    bundle = render_few_shot(GOLDEN_FEW_PAIR, shots)
    assert bundle.rendered_text == _golden("few_shot_3.txt")
    assert bundle.shots_used == ("12:3>1", "11:2>1", "9:1>0")
    assert bundle.method == "few-shot-3"


def test_few_shot_block_counts():
    shots = select_shots(GOLDEN_FEW_PAIR, GOLDEN_TRAIN, ShotSelectionPolicy(n_shots=3))
    text = render_few_shot(GOLDEN_FEW_PAIR, shots).rendered_text
    assert text.count("Here is an example.") == 3
    assert text.count("Do not include [TEXT START] and [TEXT END] in your response. Thanks.") == 1
    # Two per example block (source and rewritten), one opening the task
    # block, one inside the instruction line.
    assert text.count("[TEXT START]") == 2 * 3 + 1 + 1
    intro = "A Lexile measure is defined as"
    assert text.count(intro) == 1


def test_one_shot_render():
    text = render_few_shot(GOLDEN_FEW_PAIR, [GOLDEN_TRAIN[0]]).rendered_text
    assert text.count("Here is an example.") == 1
    assert "The ancient oak towered" in text


def test_few_shot_requires_shots():
    with pytest.raises(ValueError, match="zero-shot"):
        render_few_shot(GOLDEN_FEW_PAIR, [])


def test_integer_scores_render_without_decimal():
    bundle = render_zero_shot(make_pair("p:0>1", 800.0, 540.0))
    assert "Lexile = 800)" in bundle.rendered_text
    assert "800.0" not in bundle.rendered_text
    assert "Lexile = 540." in bundle.rendered_text


def test_fractional_scores_keep_their_digits():
    bundle = render_zero_shot(make_pair("p:0>1", 812.5, 540))
    assert "Lexile = 812.5)" in bundle.rendered_text


def test_estimated_tokens_contract():
    bundle = render_zero_shot(GOLDEN_ZERO_PAIR)
    assert bundle.estimated_tokens == math.ceil(len(bundle.rendered_text) / 4)
    assert bundle.estimated_tokens >= len(bundle.rendered_text) / 8
    assert estimate_tokens("") == 0
    assert estimate_tokens("abcd") == 1
    assert estimate_tokens("abcde") == 2


def test_distinct_sources_render_distinct_prompts():
    a = render_zero_shot(make_pair("p:0>1", 800, 600, source_tokens=4))
    b = render_zero_shot(make_pair("p:0>2", 800, 600, source_tokens=5))
    assert a.rendered_text != b.rendered_text


def test_bundle_is_frozen():
    bundle = PromptBundle("x", (), "simplify it", 1)
    with pytest.raises(AttributeError):
        bundle.rendered_text = "y"
