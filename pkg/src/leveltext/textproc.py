"""Deterministic tokenization, sentence segmentation, and word frequencies.

Everything downstream (scoring, metrics, alignment) builds on this module, so
all rules are fixed and dependency-free: sentences end at terminal punctuation
followed by whitespace and an uppercase letter (or end of text), with an
abbreviation stop-list shipped as a data file; tokens are lowercased runs of
letters, digits, and apostrophes.
"""

import math
import re
import warnings
from collections import Counter
from collections.abc import Iterable
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from leveltext.errors import EmptyTextError

_TERMINALS = ".!?"
# Letters and digits (no underscore), optionally mixed with apostrophes.
_TOKEN_RUN_RE = re.compile(r"(?:[^\W_]|')+")

DEFAULT_SMOOTHING = 0.5


def _load_abbreviations() -> frozenset[str]:
    text = resources.files("leveltext.data").joinpath("abbreviations.txt").read_text("utf-8")
    entries = set()
    for line in text.splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            entries.add(line.lower())
    return frozenset(entries)


ABBREVIATIONS = _load_abbreviations()


@dataclass(frozen=True)
class Token:
    """One lowercased word form with its character span in the source."""

    text: str
    start: int
    end: int


@dataclass(frozen=True)
class Sentence:
    """One sentence: its tokens plus the raw character span in the source."""

    tokens: tuple[Token, ...]
    start: int
    end: int

    @property
    def token_texts(self) -> tuple[str, ...]:
        return tuple(t.text for t in self.tokens)


@dataclass(frozen=True)
class TokenizedText:
    """Sentence-segmented, tokenized view of a source string."""

    text: str
    sentences: tuple[Sentence, ...]

    @property
    def token_count(self) -> int:
        return sum(len(s.tokens) for s in self.sentences)

    @property
    def sentence_count(self) -> int:
        return len(self.sentences)

    def tokens(self) -> list[str]:
        """All token texts in order."""
        return [t.text for s in self.sentences for t in s.tokens]

    def sentence_tokens(self) -> list[list[str]]:
        """Token texts grouped by sentence."""
        return [[t.text for t in s.tokens] for s in self.sentences]

    def sentence_raw(self, index: int) -> str:
        s = self.sentences[index]
        return self.text[s.start : s.end]


def _word_before(text: str, pos: int) -> str:
    """The token-character run ending just before ``pos`` (may be empty)."""
    i = pos
    while i > 0 and _TOKEN_RUN_RE.fullmatch(text[i - 1]):
        i -= 1
    return text[i:pos]


def _segment_spans(text: str) -> list[tuple[int, int]]:
    """Sentence segment spans; each span ends after its terminal punctuation."""
    spans: list[tuple[int, int]] = []
    n = len(text)

    def skip_space(pos: int) -> int:
        while pos < n and text[pos].isspace():
            pos += 1
        return pos

    seg_start = skip_space(0)
    i = seg_start
    while i < n:
        if text[i] not in _TERMINALS:
            i += 1
            continue
        run_start = i
        while i < n and text[i] in _TERMINALS:
            i += 1
        if i >= n:
            boundary = True
        else:
            after = skip_space(i)
            boundary = after > i and after < n and text[after].isupper()
        if boundary and set(text[run_start:i]) == {"."}:
            if _word_before(text, run_start).lower().strip("'") in ABBREVIATIONS:
                boundary = False
        if boundary:
            spans.append((seg_start, i))
            seg_start = skip_space(i)
            i = seg_start
    if seg_start < n:
        end = n
        while end > seg_start and text[end - 1].isspace():
            end -= 1
        if end > seg_start:
            spans.append((seg_start, end))
    return spans


def _sentence_tokens(text: str, start: int, end: int) -> tuple[Token, ...]:
    tokens = []
    for m in _TOKEN_RUN_RE.finditer(text, start, end):
        raw, s = m.group(0), m.start()
        trimmed = raw.strip("'")
        if not trimmed:
            continue
        s += len(raw) - len(raw.lstrip("'"))
        tokens.append(Token(trimmed.lower(), s, s + len(trimmed)))
    return tuple(tokens)


def tokenize(text: str) -> TokenizedText:
    """Segment and tokenize ``text``; empty input yields zero sentences.

    Segments containing no word tokens (stray punctuation) are dropped.
    """
    sentences = []
    for start, end in _segment_spans(text):
        tokens = _sentence_tokens(text, start, end)
        if tokens:
            sentences.append(Sentence(tokens, start, end))
    return TokenizedText(text, tuple(sentences))


def detokenize(t: TokenizedText) -> str:
    """Sentence raw spans joined with single spaces."""
    return " ".join(t.sentence_raw(i) for i in range(t.sentence_count))


@dataclass
class FrequencyTable:
    """Word counts with additive smoothing for unseen words.

    The smoothed relative frequency of a word is
    ``(count + smoothing) / (total + smoothing)``, always in (0, 1].
    """

    entries: dict[str, int]
    total: int
    smoothing: float = DEFAULT_SMOOTHING

    def __post_init__(self):
        if self.smoothing <= 0:
            raise ValueError("smoothing must be positive")

    def count(self, word: str) -> int:
        return self.entries.get(word, 0)

    def rel_freq(self, word: str) -> float:
        return (self.count(word) + self.smoothing) / (self.total + self.smoothing)

    def log_freq(self, word: str) -> float:
        return math.log10(self.rel_freq(word))

    def save(self, path: str | Path) -> None:
        """Write ``word<TAB>count`` lines sorted by descending count."""
        lines = [f"#total\t{self.total}"]
        for word, count in sorted(self.entries.items(), key=lambda kv: (-kv[1], kv[0])):
            lines.append(f"{word}\t{count}")
        Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path, smoothing: float = DEFAULT_SMOOTHING) -> "FrequencyTable":
        entries: dict[str, int] = {}
        total = 0
        for line in Path(path).read_text(encoding="utf-8").splitlines():
            if not line.strip():
                continue
            key, value = line.split("\t")
            if key == "#total":
                total = int(value)
            else:
                entries[key] = int(value)
        return cls(entries, total, smoothing)


def build_frequency_table(
    texts: Iterable[str], smoothing: float = DEFAULT_SMOOTHING
) -> FrequencyTable:
    """Exact token counts over ``texts`` (after :func:`tokenize`)."""
    if smoothing <= 0:
        raise ValueError("smoothing must be positive")
    counts: Counter[str] = Counter()
    for text in texts:
        counts.update(tokenize(text).tokens())
    total = sum(counts.values())
    if total == 0:
        warnings.warn("empty corpus: every lookup degenerates to frequency 1.0")
    return FrequencyTable(dict(counts), total, smoothing)


def mean_sentence_length(t: TokenizedText) -> float:
    """Tokens per sentence."""
    if t.sentence_count == 0:
        raise EmptyTextError("empty text")
    return t.token_count / t.sentence_count


def mean_log_word_frequency(t: TokenizedText, f: FrequencyTable) -> float:
    """Mean of log10 smoothed relative frequency over all tokens; always <= 0."""
    tokens = t.tokens()
    if not tokens:
        raise EmptyTextError("empty text")
    return sum(f.log_freq(tok) for tok in tokens) / len(tokens)
