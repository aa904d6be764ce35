"""Shared builders and independent oracles for the test suite.

Oracles here deliberately take a different route from the library code they
check (linear-scan selection instead of a sort, full-matrix DP instead of the
interning kernel, exhaustive recursion instead of the alignment DP, Gaussian
elimination on the normal equations instead of lstsq) so that agreement is
evidence rather than tautology.
"""

import math
import random

from leveltext.corpus import Article, LeveledPair, make_pair_id, permute_pairs
from leveltext.readability import ScorerModel, score
from leveltext.textproc import (
    FrequencyTable,
    mean_log_word_frequency,
    mean_sentence_length,
    tokenize,
)

# Word pools by difficulty tier.  None of these appear in the abbreviation
# list, so a pool word before "." never suppresses a sentence boundary.
EASY_WORDS = (
    "the sun is hot a cat ran fast we go up all day rain falls on them "
    "it was big and red they see one dog run home now"
).split()
MID_WORDS = (
    "river stone cloud maple otter harbor meadow frost garden window "
    "teacher morning valley bridge market signal branch copper"
).split()
HARD_WORDS = (
    "phenomenon interdependent magnitude hypothesis circumference "
    "deliberation infrastructure equilibrium proliferation consolidated "
    "notwithstanding unprecedented configuration substantiated periphery"
).split()


def _sentence(rng: random.Random, words: list[str], low: int, high: int) -> str:
    picked = [rng.choice(words) for _ in range(rng.randint(low, high))]
    return picked[0].capitalize() + " " + " ".join(picked[1:]) + "."


def article_text(rng: random.Random, level: int) -> str:
    """A short text whose structural difficulty grows with ``level`` (0..2)."""
    if level == 0:
        pool, low, high, n = list(EASY_WORDS), 3, 6, rng.randint(2, 3)
    elif level == 1:
        pool, low, high, n = list(EASY_WORDS + MID_WORDS), 6, 10, rng.randint(3, 4)
    else:
        pool, low, high, n = list(MID_WORDS + HARD_WORDS), 10, 16, rng.randint(3, 5)
    return " ".join(_sentence(rng, pool, low, high) for _ in range(n))


def leveled_articles(
    n_sets: int,
    model: ScorerModel,
    freq: FrequencyTable,
    seed: int = 0,
    levels: int = 3,
) -> list[Article]:
    """Synthetic topic sets whose stored scores come from our own scorer, so a
    generation that reproduces an article's text reproduces its score exactly.
    """
    rng = random.Random(seed)
    out = []
    for s in range(n_sets):
        for level in range(levels):
            text = article_text(rng, level if levels == 3 else 2 * level)
            out.append(
                Article(s, level, f"Topic {s}", text, score(text, model, freq).score)
            )
    return out


def scored_pairs(
    n_pairs: int, model: ScorerModel, freq: FrequencyTable, seed: int = 0
) -> list[LeveledPair]:
    """Exactly ``n_pairs`` self-consistent pairs (two articles per set)."""
    if n_pairs % 2:
        raise ValueError("n_pairs must be even")
    articles = leveled_articles(n_pairs // 2, model, freq, seed=seed, levels=2)
    pairs = permute_pairs(articles)
    assert len(pairs) == n_pairs
    return pairs


def words_text(n: int, stem: str = "w") -> str:
    """A one-sentence text with exactly ``n`` tokens."""
    return " ".join(f"{stem}{i}" for i in range(n)).capitalize() + "."


def make_pair(
    pair_id: str,
    source_score: float,
    target_score: float,
    source_tokens: int = 5,
    target_tokens: int = 5,
    set_id: int = 0,
) -> LeveledPair:
    stem = pair_id.replace(":", "x").replace(">", "y")
    return LeveledPair(
        source_text=words_text(source_tokens, f"s{stem}"),
        source_score=source_score,
        target_text=words_text(target_tokens, f"t{stem}"),
        target_score=target_score,
        set_id=set_id,
        pair_id=pair_id,
    )


# ---------------------------------------------------------------------------
# Edit-distance oracle: classic full-matrix DP, no interning, no banding.


def bf_levenshtein(a: list[str], b: list[str]) -> int:
    m, n = len(a), len(b)
    d = [[0] * (n + 1) for _ in range(m + 1)]
    for i in range(m + 1):
        d[i][0] = i
    for j in range(n + 1):
        d[0][j] = j
    for i in range(1, m + 1):
        for j in range(1, n + 1):
            cost = 0 if a[i - 1] == b[j - 1] else 1
            d[i][j] = min(d[i - 1][j] + 1, d[i][j - 1] + 1, d[i - 1][j - 1] + cost)
    return d[m][n]


def bf_ned(a: list[str], b: list[str]) -> float:
    if not a and not b:
        return 0.0
    return bf_levenshtein(a, b) / max(len(a), len(b))


# ---------------------------------------------------------------------------
# Shot-selection oracle: interval filter plus repeated minimum extraction.


def bf_select_shots(
    pair: LeveledPair, train: list[LeveledPair], n: int, window: float = 50.0
) -> list[str]:
    def tok_len(p: LeveledPair) -> int:
        return tokenize(p.source_text).token_count + tokenize(p.target_text).token_count

    pool = []
    for cand in train:
        if cand.pair_id == pair.pair_id:
            continue
        src_ok = (
            pair.source_score - window <= cand.source_score <= pair.source_score + window
        )
        tgt_ok = (
            pair.target_score - window <= cand.target_score <= pair.target_score + window
        )
        if src_ok and tgt_ok:
            pool.append((tok_len(cand), cand.pair_id))
    chosen = []
    while pool and len(chosen) < n:
        best = pool[0]
        for item in pool[1:]:
            if item < best:
                best = item
        pool.remove(best)
        chosen.append(best[1])
    return chosen


# ---------------------------------------------------------------------------
# Alignment oracle: exhaustive recursion over every monotone link structure.


def bf_best_alignment_score(
    sent_tokens_a: list[list[str]],
    sent_tokens_b: list[list[str]],
    gap_penalty: float = 0.35,
) -> float:
    ta = [frozenset(s) for s in sent_tokens_a]
    tb = [frozenset(s) for s in sent_tokens_b]

    def dice(x: frozenset, y: frozenset) -> float:
        if not x and not y:
            return 1.0
        return 2.0 * len(x & y) / (len(x) + len(y))

    def rec(i: int, j: int) -> float:
        if i == len(ta) and j == len(tb):
            return 0.0
        best = -math.inf
        if i < len(ta) and j < len(tb):
            best = max(best, dice(ta[i], tb[j]) + rec(i + 1, j + 1))
        if i + 1 < len(ta) and j < len(tb):
            best = max(best, dice(ta[i] | ta[i + 1], tb[j]) + rec(i + 2, j + 1))
        if i < len(ta) and j + 1 < len(tb):
            best = max(best, dice(ta[i], tb[j] | tb[j + 1]) + rec(i + 1, j + 2))
        if i < len(ta):
            best = max(best, -gap_penalty + rec(i + 1, j))
        if j < len(tb):
            best = max(best, -gap_penalty + rec(i, j + 1))
        return best

    return rec(0, 0)


SENTENCE_VOCAB = MID_WORDS


def random_sentence_text(rng: random.Random, n_sentences: int) -> str:
    """Sentences over a small shared vocabulary so cross-similarities vary."""
    return " ".join(
        _sentence(rng, list(SENTENCE_VOCAB), 2, 5) for _ in range(n_sentences)
    )


# ---------------------------------------------------------------------------
# Calibration oracle: normal equations solved by Gaussian elimination.


def _solve3(a: list[list[float]], b: list[float]) -> list[float]:
    m = [row[:] + [rhs] for row, rhs in zip(a, b)]
    for col in range(3):
        pivot_row = max(range(col, 3), key=lambda r: abs(m[r][col]))
        m[col], m[pivot_row] = m[pivot_row], m[col]
        for r in range(3):
            if r != col:
                f = m[r][col] / m[col][col]
                for c in range(col, 4):
                    m[r][c] -= f * m[col][c]
    return [m[r][3] / m[r][r] for r in range(3)]


def bf_calibrate(
    labeled: list[tuple[str, float]], freq: FrequencyTable
) -> tuple[float, float, float]:
    rows = []
    ys = []
    for text, ref in labeled:
        t = tokenize(text)
        rows.append(
            (math.log10(mean_sentence_length(t)), mean_log_word_frequency(t, freq), 1.0)
        )
        ys.append(float(ref))
    a = [[sum(r[i] * r[j] for r in rows) for j in range(3)] for i in range(3)]
    b = [sum(r[i] * y for r, y in zip(rows, ys)) for i in range(3)]
    coef = _solve3(a, b)
    return coef[0], coef[1], coef[2]


# ---------------------------------------------------------------------------
# Fixed pairs behind the checked-in prompt goldens (tests/golden/).

GOLDEN_ZERO_PAIR = LeveledPair(
    source_text=(
        "The committee approved the funding after a lengthy debate. "
        "Construction begins next month."
    ),
    source_score=820,
    target_text="The group said yes to the money. Building starts next month.",
    target_score=540,
    set_id=7,
    pair_id=make_pair_id(7, 2, 1),
)

GOLDEN_FEW_PAIR = LeveledPair(
    source_text="Scientists observed the comet as it approached the inner solar system.",
    source_score=800,
    target_text="People who study space watched the comet come closer.",
    target_score=560,
    set_id=8,
    pair_id=make_pair_id(8, 2, 1),
)

# Combined token lengths 19 / 18 / 16, so selection order is C, B, A.  Shot C
# sits exactly on the +-50 target boundary (510 vs 560).
GOLDEN_TRAIN = [
    LeveledPair(
        source_text="The ancient oak towered above the quiet village square.",
        source_score=790,
        target_text="A big old oak tree stood over the quiet square.",
        target_score=530,
        set_id=9,
        pair_id=make_pair_id(9, 1, 0),
    ),
    LeveledPair(
        source_text="Persistent rainfall saturated the fields throughout the valley.",
        source_score=840,
        target_text="Rain kept falling and soaked the fields in the valley.",
        target_score=600,
        set_id=11,
        pair_id=make_pair_id(11, 2, 1),
    ),
    LeveledPair(
        source_text="The council postponed the vote until further notice.",
        source_score=760,
        target_text="The council put off the vote for now.",
        target_score=510,
        set_id=12,
        pair_id=make_pair_id(12, 3, 1),
    ),
]
