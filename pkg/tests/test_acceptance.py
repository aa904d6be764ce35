"""Release gate: one test per published acceptance property.

Each test's first docstring line is the criterion label; the terminal summary
prints one PASS/FAIL line per label.  Tolerances: exact for booleans and
counts, 1e-9 for rationals, stated explicitly where looser.
"""

import random
import socket
import time
import warnings
from pathlib import Path

import pytest

from leveltext.alignment import align, alignment_score, gini
from leveltext.corpus import Article, permute_pairs, split_by_set, split_sizes
from leveltext.harness import RunContext, RunSpec, run_benchmark, scatter_rows
from leveltext.kernels import token_edit_distance
from leveltext.metrics import bert_like_score, lexile_metrics
from leveltext.prompting import (
    ShotSelectionPolicy,
    render_few_shot,
    render_zero_shot,
    select_shots,
)
from leveltext.providers import HttpChatProvider, ProviderConfig, TransportReply
from leveltext.readability import ScorerModel, calibrate, score
from leveltext.textproc import tokenize
from support import (
    GOLDEN_FEW_PAIR,
    GOLDEN_TRAIN,
    GOLDEN_ZERO_PAIR,
    article_text,
    bf_best_alignment_score,
    bf_levenshtein,
    bf_select_shots,
    make_pair,
    random_sentence_text,
    scored_pairs,
)

GOLDEN_DIR = Path(__file__).parent / "golden"

ORACLE_PROVIDER = [{"type": "mock", "mode": "oracle", "name": "oracle"}]
ECHO_PROVIDER = [{"type": "mock", "mode": "echo-source", "name": "echo"}]


def _no_network(monkeypatch):
    def refuse(*args, **kwargs):
        raise AssertionError("network access attempted")

    monkeypatch.setattr(socket.socket, "connect", refuse)
    monkeypatch.setattr(socket, "create_connection", refuse)


def test_shot_selection_oracle_equivalence():
    """Shot selection equals a filter-and-sort oracle on 500 random instances in under 10 s."""
    rng = random.Random(4001)
    started = time.perf_counter()
    for case in range(500):
        train = [
            make_pair(
                f"{i}:0>1",
                float(rng.randrange(400, 1001, 25)),
                float(rng.randrange(400, 1001, 25)),
                source_tokens=rng.randint(3, 20),
                target_tokens=rng.randint(3, 20),
            )
            for i in range(rng.randint(0, 12))
        ]
        request_id = train[0].pair_id if train and rng.random() < 0.2 else "777:0>1"
        request = make_pair(
            request_id,
            float(rng.randrange(400, 1001, 25)),
            float(rng.randrange(400, 1001, 25)),
        )
        n = rng.choice([0, 1, 3, 5])
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            got = [p.pair_id for p in select_shots(request, train, ShotSelectionPolicy(n_shots=n))]
        assert got == bf_select_shots(request, train, n)
    assert time.perf_counter() - started < 10.0


def test_split_and_pair_count_arithmetic():
    """1690 sets split exactly 1521/84/85 and pair totals equal the sum of m(m-1)."""
    assert split_sizes(1690) == (1521, 84, 85)

    singletons = [
        Article(set_id=s, article_id=0, title=f"Topic {s}", text=f"Set {s} text.", score=500.0)
        for s in range(1690)
    ]
    manifest = split_by_set(singletons, seed=9)
    counts = (len(manifest.train), len(manifest.valid), len(manifest.test))
    assert counts == (1521, 84, 85)

    rng = random.Random(55)
    sizes = [rng.randint(1, 5) for _ in range(40)]
    articles = [
        Article(
            set_id=s,
            article_id=level,
            title=f"Topic {s}",
            text=f"Set {s} text at level {level} reads here.",
            score=500.0 + 40.0 * level,
        )
        for s, m in enumerate(sizes)
        for level in range(m)
    ]
    assert len(permute_pairs(articles)) == sum(m * (m - 1) for m in sizes)


def test_oracle_end_to_end(tmp_path, model, freq, monkeypatch):
    """Oracle mock over 50 self-scored pairs: MAE 0, Match 100%, Direction 100%, Support 50, under 60 s, offline."""
    _no_network(monkeypatch)
    pairs = scored_pairs(50, model, freq, seed=5)
    ctx = RunContext(pairs=pairs, train_pairs=[], model=model, freq=freq)
    spec = RunSpec(
        run_id="acceptance-oracle", sample_size=50, providers=ORACLE_PROVIDER, methods=["zero-shot"]
    )
    started = time.perf_counter()
    run = run_benchmark(spec, ctx, workspace=tmp_path)
    elapsed = time.perf_counter() - started

    report = run.report_for("oracle", "zero-shot")
    assert report.support == 50
    assert report.mae == 0.0
    assert report.match_rate == 1.0
    assert report.direction_rate == 1.0
    assert elapsed < 60.0


def test_echo_source_degrades_as_expected(tmp_path, model, freq, monkeypatch):
    """Echo-source mock: edit distance to the source is 0 and Direction is 0% of applicable pairs."""
    _no_network(monkeypatch)
    pairs = scored_pairs(50, model, freq, seed=5)
    ctx = RunContext(pairs=pairs, train_pairs=[], model=model, freq=freq)
    spec = RunSpec(
        run_id="acceptance-echo", sample_size=50, providers=ECHO_PROVIDER, methods=["zero-shot"]
    )
    report = run_benchmark(spec, ctx, workspace=tmp_path).report_for("echo", "zero-shot")
    assert report.support == 50
    assert report.edit_distance == 0.0
    assert report.direction_rate == 0.0
    assert report.mae > 0.0


def test_metric_unit_suite():
    """Match window edges at exactly +/-50, edit-distance axioms vs brute force, P/R swap, Gini closed forms."""
    # Window edges for an intended score of 800.
    assert lexile_metrics(800.0, 700.0, 840.0).match is True
    assert lexile_metrics(800.0, 700.0, 850.0).match is True
    assert lexile_metrics(800.0, 700.0, 851.0).match is False
    assert lexile_metrics(800.0, 700.0, 750.0).match is True
    assert lexile_metrics(800.0, 700.0, 749.0).match is False

    # Metric axioms on 1,000 random short sequences against the full-matrix DP.
    rng = random.Random(77)
    vocab = ["sun", "tree", "moon", "rock", "bird"]
    seqs = [
        [rng.choice(vocab) for _ in range(rng.randint(0, 7))] for _ in range(1000)
    ]
    for i, a in enumerate(seqs):
        b = seqs[(i * 7 + 3) % len(seqs)]
        c = seqs[(i * 13 + 11) % len(seqs)]
        d_ab = token_edit_distance(a, b)
        assert d_ab == bf_levenshtein(a, b)
        assert d_ab == token_edit_distance(b, a)
        assert token_edit_distance(a, c) <= d_ab + token_edit_distance(b, c)

    # Swapping arguments swaps precision and recall exactly.
    for i in range(50):
        pair_rng = random.Random(500 + i)
        a = random_sentence_text(pair_rng, pair_rng.randint(1, 3))
        b = random_sentence_text(pair_rng, pair_rng.randint(1, 3))
        p_ab, r_ab, _ = bert_like_score(a, b)
        p_ba, r_ba, _ = bert_like_score(b, a)
        assert p_ab == r_ba
        assert r_ab == p_ba

    # All weight on one of n sentences concentrates Gini to (n-1)/n.
    for n in (2, 3, 5, 10):
        values = [0.0] * (n - 1) + [3.0]
        assert gini(values) == pytest.approx((n - 1) / n, abs=1e-9)


def test_calibration_recovers_known_coefficients(freq):
    """Calibration recovers known coefficients to 1e-6 relative with near-zero RMSE."""
    truth = ScorerModel(alpha=210.0, beta=-380.0, gamma=-470.0)
    rng = random.Random(17)
    docs = [article_text(rng, level % 3) for level in range(9)]
    labeled = [(doc, score(doc, truth, freq).score) for doc in docs]

    fitted = calibrate(labeled, freq)
    assert fitted.alpha == pytest.approx(truth.alpha, rel=1e-6)
    assert fitted.beta == pytest.approx(truth.beta, rel=1e-6)
    assert fitted.gamma == pytest.approx(truth.gamma, rel=1e-6)
    assert fitted.fit_rmse is not None and fitted.fit_rmse < 1e-6
    for doc, label in labeled:
        assert score(doc, fitted, freq).score == pytest.approx(label, abs=1e-6)


def test_alignment_dp_matches_exhaustive_search():
    """Alignment DP equals exhaustive enumeration on 220 random fixtures up to 6x6 sentences."""
    rng = random.Random(93)
    for _ in range(220):
        a = random_sentence_text(rng, rng.randint(1, 6))
        b = random_sentence_text(rng, rng.randint(1, 6))
        ta, tb = tokenize(a), tokenize(b)
        got = alignment_score(align(ta, tb), ta, tb)
        best = bf_best_alignment_score(ta.sentence_tokens(), tb.sentence_tokens())
        assert got == pytest.approx(best, abs=1e-9)


def test_prompt_goldens_byte_identical():
    """Zero-shot and 3-shot renderings are byte-identical to the checked-in golden files."""
    zero = render_zero_shot(GOLDEN_ZERO_PAIR)
    assert zero.rendered_text.encode("utf-8") == (GOLDEN_DIR / "zero_shot.txt").read_bytes()

    shots = select_shots(GOLDEN_FEW_PAIR, GOLDEN_TRAIN, ShotSelectionPolicy(n_shots=3))
    few = render_few_shot(GOLDEN_FEW_PAIR, shots)
    assert few.rendered_text.encode("utf-8") == (GOLDEN_DIR / "few_shot_3.txt").read_bytes()

    assert few.rendered_text.count("Here is an example.") == 3
    assert zero.rendered_text.count("Here is an example.") == 0
    # Only the few-shot task template carries the marker instruction.
    instruction = "Do not include [TEXT START] and [TEXT END] in your response."
    assert instruction in few.rendered_text
    assert instruction not in zero.rendered_text


def test_scatter_of_exact_run_sits_on_the_diagonal(tmp_path, model, freq):
    """A run with resulting equal to intended puts 100% of scatter points in the +/-50 band on the diagonal."""
    pairs = scored_pairs(12, model, freq, seed=8)
    ctx = RunContext(pairs=pairs, train_pairs=[], model=model, freq=freq)
    spec = RunSpec(
        run_id="acceptance-scatter", sample_size=12, providers=ORACLE_PROVIDER, methods=["zero-shot"]
    )
    run = run_benchmark(spec, ctx, workspace=tmp_path)
    rows = scatter_rows(run, provider="oracle", method="zero-shot")
    assert len(rows) == 12
    assert all(r.match for r in rows)
    assert all(abs(r.resulting_shift - r.intended_shift) <= 50.0 for r in rows)
    assert all(r.resulting_shift == r.intended_shift for r in rows)


class _CountingTransport:
    """Hands out queued replies and records every call."""

    def __init__(self, replies):
        self.replies = list(replies)
        self.calls = []

    def __call__(self, url, payload, headers, timeout):
        self.calls.append(payload)
        return self.replies.pop(0)


def test_context_overflow_fails_closed(tmp_path, model, freq):
    """A prompt past the 4K-token limit yields context_overflow, makes no transport call, and drops Support by one."""
    big_text = ("Word " * 4500).strip() + "."
    small = scored_pairs(2, model, freq, seed=3)[0]
    big = type(small)(
        source_text=big_text,
        source_score=score(big_text, model, freq).score,
        target_text=small.target_text,
        target_score=small.target_score,
        set_id=900,
        pair_id="900:0>1",
    )
    pairs = [big, small]
    ctx = RunContext(pairs=pairs, train_pairs=[], model=model, freq=freq)

    transport = _CountingTransport(
        [TransportReply(200, {"choices": [{"message": {"content": small.target_text}}]})]
    )
    provider = HttpChatProvider(
        ProviderConfig(
            name="svc",
            endpoint="https://example.test/v1/chat",
            model_id="m-1",
            context_limit=4096,
        ),
        transport,
        sleep=lambda s: None,
    )
    spec = RunSpec(run_id="acceptance-overflow", sample_size=2, methods=["zero-shot"])
    run = run_benchmark(spec, ctx, providers=[provider], workspace=tmp_path)

    report = run.report_for("svc", "zero-shot")
    assert report.support == 1
    assert run.failure_count("svc", "zero-shot") == 1
    failed = [e for e in run.evaluations[("svc", "zero-shot")] if e.status != "evaluated"]
    assert failed[0].failure_status == "context_overflow"
    assert failed[0].pair_id == "900:0>1"
    assert len(transport.calls) == 1
