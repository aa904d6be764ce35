"""Leveled-text corpus: topic sets of articles, set-wise splits, pair permutation.

A corpus archive is UTF-8 JSONL, one object per article:
``{"set_id": int, "article_id": int, "title": str, "text": str, "score": number|null}``.
A null score is computed at ingest time and frozen thereafter.

Splits partition by set id (never by article) so no topic leaks across
train/valid/test.  The shuffle uses a SplitMix64 generator (documented in
docs/formats.md) so a seed reproduces the same split everywhere.
"""

import json
import warnings
from dataclasses import dataclass, field
from pathlib import Path

from leveltext.errors import CorpusError, UnscorableError
from leveltext.readability import ScorerModel, score
from leveltext.textproc import FrequencyTable

SPLIT_RATIOS = (0.90, 0.05, 0.05)
MIN_SETS_FOR_SPLIT = 20

_MASK64 = (1 << 64) - 1


class SplitMix64:
    """Deterministic 64-bit generator used for corpus shuffles."""

    def __init__(self, seed: int):
        self.state = seed & _MASK64

    def next_u64(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & _MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        return z ^ (z >> 31)

    def below(self, bound: int) -> int:
        """Uniform integer in [0, bound) by rejection sampling."""
        if bound <= 0:
            raise ValueError("bound must be positive")
        limit = _MASK64 - (_MASK64 + 1) % bound
        while True:
            value = self.next_u64()
            if value <= limit:
                return value % bound

    def shuffle(self, items: list) -> None:
        """In-place Fisher-Yates from the high end down."""
        for i in range(len(items) - 1, 0, -1):
            j = self.below(i + 1)
            items[i], items[j] = items[j], items[i]


@dataclass(frozen=True)
class Article:
    """One text at one readability level, member of a topic set."""

    set_id: int
    article_id: int
    title: str
    text: str
    score: float


@dataclass(frozen=True)
class LeveledPair:
    """Parallel record: rewrite source_text (at source_score) to target_score."""

    source_text: str
    source_score: float
    target_text: str
    target_score: float
    set_id: int
    pair_id: str


@dataclass
class SplitManifest:
    """Disjoint set-id lists for train/valid/test plus the seed that made them."""

    train: list[int]
    valid: list[int]
    test: list[int]
    ratios: tuple[float, float, float] = SPLIT_RATIOS
    seed: int = 0

    def split_of(self, set_id: int) -> str:
        for name in ("train", "valid", "test"):
            if set_id in getattr(self, name):
                return name
        raise KeyError(set_id)

    def to_json(self) -> str:
        return json.dumps(
            {
                "train": self.train,
                "valid": self.valid,
                "test": self.test,
                "ratios": list(self.ratios),
                "seed": self.seed,
            },
            indent=2,
        )

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.to_json() + "\n", encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> "SplitManifest":
        data = json.loads(Path(path).read_text(encoding="utf-8"))
        return cls(
            train=list(data["train"]),
            valid=list(data["valid"]),
            test=list(data["test"]),
            ratios=tuple(data["ratios"]),
            seed=int(data["seed"]),
        )


@dataclass
class IngestReport:
    """Result of ingesting an archive: kept articles plus skip diagnostics."""

    articles: list[Article]
    skipped: list[tuple[int, str]] = field(default_factory=list)

    @property
    def set_count(self) -> int:
        return len({a.set_id for a in self.articles})

    @property
    def warning_count(self) -> int:
        return len(self.skipped)


def _parse_record(line_no: int, line: str) -> dict:
    try:
        record = json.loads(line)
    except json.JSONDecodeError as exc:
        raise CorpusError(f"line {line_no}: invalid JSON: {exc}") from exc
    for key in ("set_id", "article_id", "title", "text"):
        if key not in record:
            raise CorpusError(f"line {line_no}: missing field {key!r}")
    return record


def ingest(
    path: str | Path,
    model: ScorerModel,
    freq: FrequencyTable,
) -> IngestReport:
    """Read a JSONL archive, scoring any article whose score is null.

    Unscorable articles are skipped with a warning and listed in the report;
    duplicate (set_id, article_id) keys and title mismatches within a set are
    hard errors.
    """
    articles: list[Article] = []
    skipped: list[tuple[int, str]] = []
    seen: set[tuple[int, int]] = set()
    titles: dict[int, str] = {}

    with open(path, encoding="utf-8") as handle:
        for line_no, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            record = _parse_record(line_no, line)
            key = (int(record["set_id"]), int(record["article_id"]))
            if key in seen:
                raise CorpusError(f"line {line_no}: duplicate article {key}")
            seen.add(key)
            title = str(record["title"])
            expected = titles.setdefault(key[0], title)
            if title != expected:
                raise CorpusError(
                    f"line {line_no}: set {key[0]} has conflicting titles "
                    f"{expected!r} vs {title!r}"
                )
            value = record.get("score")
            if value is None:
                try:
                    value = score(record["text"], model, freq).score
                except UnscorableError as exc:
                    skipped.append((line_no, str(exc)))
                    warnings.warn(f"skipping unscorable article at line {line_no}: {exc}")
                    continue
            articles.append(
                Article(key[0], key[1], title, str(record["text"]), float(value))
            )
    return IngestReport(articles, skipped)


def save_articles(articles: list[Article], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        for a in articles:
            handle.write(
                json.dumps(
                    {
                        "set_id": a.set_id,
                        "article_id": a.article_id,
                        "title": a.title,
                        "text": a.text,
                        "score": a.score,
                    },
                    ensure_ascii=False,
                )
                + "\n"
            )


def load_articles(path: str | Path) -> list[Article]:
    """Load an archive whose scores are already assigned (no rescoring)."""
    articles = []
    with open(path, encoding="utf-8") as handle:
        for line_no, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            record = _parse_record(line_no, line)
            if record.get("score") is None:
                raise CorpusError(f"line {line_no}: unscored article; run ingest first")
            articles.append(
                Article(
                    int(record["set_id"]),
                    int(record["article_id"]),
                    str(record["title"]),
                    str(record["text"]),
                    float(record["score"]),
                )
            )
    return articles


def split_sizes(n_sets: int) -> tuple[int, int, int]:
    """(train, valid, test) sizes: floors of 90/5/5 with remainder to test, then valid.

    Integer arithmetic so e.g. 1690 sets yield exactly (1521, 84, 85).
    The remainder is at most 2, so test and valid absorb it all.
    """
    train = 90 * n_sets // 100
    valid = 5 * n_sets // 100
    test = 5 * n_sets // 100
    remainder = n_sets - train - valid - test
    if remainder >= 1:
        test += 1
    if remainder >= 2:
        valid += 1
    return train, valid, test


def split_by_set(articles: list[Article], seed: int) -> SplitManifest:
    """Partition set ids into train/valid/test, deterministic for a given seed."""
    set_ids = sorted({a.set_id for a in articles})
    if len(set_ids) < MIN_SETS_FOR_SPLIT:
        raise CorpusError(
            f"need at least {MIN_SETS_FOR_SPLIT} sets to split, got {len(set_ids)}"
        )
    SplitMix64(seed).shuffle(set_ids)
    n_train, n_valid, _ = split_sizes(len(set_ids))
    return SplitManifest(
        train=set_ids[:n_train],
        valid=set_ids[n_train : n_train + n_valid],
        test=set_ids[n_train + n_valid :],
        seed=seed,
    )


def make_pair_id(set_id: int, source_article: int, target_article: int) -> str:
    return f"{set_id}:{source_article}>{target_article}"


def permute_pairs(articles: list[Article]) -> list[LeveledPair]:
    """All ordered pairs of distinct articles within each set: m*(m-1) per set.

    Pairs whose two texts are identical would be self-rewrites and are skipped
    with a warning.
    """
    by_set: dict[int, list[Article]] = {}
    for a in articles:
        by_set.setdefault(a.set_id, []).append(a)
    pairs: list[LeveledPair] = []
    for set_id in sorted(by_set):
        group = sorted(by_set[set_id], key=lambda a: a.article_id)
        for src in group:
            for tgt in group:
                if src.article_id == tgt.article_id:
                    continue
                if src.text == tgt.text:
                    warnings.warn(
                        f"set {set_id}: articles {src.article_id} and "
                        f"{tgt.article_id} have identical text; pair skipped"
                    )
                    continue
                pairs.append(
                    LeveledPair(
                        source_text=src.text,
                        source_score=src.score,
                        target_text=tgt.text,
                        target_score=tgt.score,
                        set_id=set_id,
                        pair_id=make_pair_id(set_id, src.article_id, tgt.article_id),
                    )
                )
    return pairs


def save_pairs(pairs: list[LeveledPair], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        for p in pairs:
            handle.write(
                json.dumps(
                    {
                        "pair_id": p.pair_id,
                        "set_id": p.set_id,
                        "source_text": p.source_text,
                        "source_score": p.source_score,
                        "target_text": p.target_text,
                        "target_score": p.target_score,
                    },
                    ensure_ascii=False,
                )
                + "\n"
            )


def load_pairs(path: str | Path) -> list[LeveledPair]:
    pairs = []
    with open(path, encoding="utf-8") as handle:
        for line_no, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusError(f"line {line_no}: invalid JSON: {exc}") from exc
            try:
                pairs.append(
                    LeveledPair(
                        source_text=str(record["source_text"]),
                        source_score=float(record["source_score"]),
                        target_text=str(record["target_text"]),
                        target_score=float(record["target_score"]),
                        set_id=int(record["set_id"]),
                        pair_id=str(record["pair_id"]),
                    )
                )
            except KeyError as exc:
                raise CorpusError(f"line {line_no}: missing field {exc}") from exc
    return pairs


def articles_in_split(
    articles: list[Article], manifest: SplitManifest, split: str
) -> list[Article]:
    wanted = set(getattr(manifest, split))
    return [a for a in articles if a.set_id in wanted]
