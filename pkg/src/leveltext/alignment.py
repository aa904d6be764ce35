"""Monotone sentence alignment, edit-dispersion analysis, and lock-aware
sentence merges.

Alignment is a dynamic program over sentence pairs maximizing summed link
similarity (token-set Dice) minus a gap penalty for unmatched sentences.
Dice keeps the editor hot path embedding-free.  Merges splice chosen
candidate sentences into the base text by character span, so untouched
regions survive byte-for-byte; a merge that would touch a locked span fails
atomically before any splicing.
"""

import hashlib
import json
from dataclasses import dataclass, field
from typing import Sequence

from leveltext.errors import MergeConflictError
from leveltext.kernels import token_edit_distance
from leveltext.textproc import TokenizedText, tokenize

# Penalty per unmatched sentence (1-0 or 0-1 link), as a fraction of the
# maximum link similarity (Dice tops out at 1).  Tuned on fixtures: high
# enough that near-paraphrases pair up, low enough that unrelated sentences
# stay unlinked.
GAP_PENALTY = 0.35

LABEL_UNCHANGED = "unchanged"
LABEL_MODIFIED = "modified"
LABEL_INSERTED = "inserted"
LABEL_DELETED = "deleted"

SIDE_BASE = "base"
SIDE_CANDIDATE = "candidate"


@dataclass(frozen=True)
class Link:
    """One alignment unit: a run of source sentence indices matched to a run
    of candidate sentence indices.  Either side may be empty, not both.
    """

    link_id: int
    source: tuple[int, ...]
    candidate: tuple[int, ...]
    label: str
    edit_distance: int

    def to_dict(self) -> dict:
        return {
            "link_id": self.link_id,
            "source": list(self.source),
            "candidate": list(self.candidate),
            "label": self.label,
            "edit_distance": self.edit_distance,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Link":
        return cls(
            link_id=data["link_id"],
            source=tuple(data["source"]),
            candidate=tuple(data["candidate"]),
            label=data["label"],
            edit_distance=data["edit_distance"],
        )


@dataclass
class AlignmentMap:
    """Ordered monotone links covering every sentence on both sides exactly
    once, plus a digest of the pairwise similarity matrix so consumers can
    detect a stale map after either text changes.
    """

    links: list[Link] = field(default_factory=list)
    similarity_matrix_digest: str = ""

    @property
    def source_sentence_count(self) -> int:
        return sum(len(link.source) for link in self.links)

    @property
    def candidate_sentence_count(self) -> int:
        return sum(len(link.candidate) for link in self.links)

    def link_by_id(self, link_id: int) -> Link:
        for link in self.links:
            if link.link_id == link_id:
                return link
        raise ValueError(f"unknown link id {link_id}")

    def validate(self) -> None:
        """Raises ValueError unless links are monotone and partition both
        sides."""
        next_source = 0
        next_candidate = 0
        for link in self.links:
            if not link.source and not link.candidate:
                raise ValueError("empty link")
            if list(link.source) != list(range(next_source, next_source + len(link.source))):
                raise ValueError(f"non-monotone source indices in link {link.link_id}")
            if list(link.candidate) != list(
                range(next_candidate, next_candidate + len(link.candidate))
            ):
                raise ValueError(f"non-monotone candidate indices in link {link.link_id}")
            next_source += len(link.source)
            next_candidate += len(link.candidate)

    def to_dict(self) -> dict:
        return {
            "links": [link.to_dict() for link in self.links],
            "similarity_matrix_digest": self.similarity_matrix_digest,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_dict(cls, data: dict) -> "AlignmentMap":
        return cls(
            links=[Link.from_dict(d) for d in data["links"]],
            similarity_matrix_digest=data.get("similarity_matrix_digest", ""),
        )


@dataclass(frozen=True)
class LockSpan:
    """Character range of the working text that merges must not alter."""

    start: int
    end: int
    reason: str = ""

    def to_dict(self) -> dict:
        return {"start": self.start, "end": self.end, "reason": self.reason}

    @classmethod
    def from_dict(cls, data: dict) -> "LockSpan":
        return cls(start=data["start"], end=data["end"], reason=data.get("reason", ""))


def validate_locks(locks: Sequence[LockSpan], text_length: int) -> None:
    """Locks must be in-bounds, non-empty, and pairwise disjoint."""
    ordered = sorted(locks, key=lambda s: s.start)
    for span in ordered:
        if span.start < 0 or span.end > text_length or span.start >= span.end:
            raise ValueError(f"lock span [{span.start}, {span.end}) out of bounds")
    for left, right in zip(ordered, ordered[1:]):
        if right.start < left.end:
            raise ValueError("overlapping lock spans")


def _dice(set_a: frozenset, set_b: frozenset) -> float:
    total = len(set_a) + len(set_b)
    if total == 0:
        return 1.0
    return 2.0 * len(set_a & set_b) / total


def _sentence_token_sets(text: TokenizedText) -> list[frozenset]:
    return [frozenset(tokens) for tokens in text.sentence_tokens()]


def _similarity_digest(sets_a: list[frozenset], sets_b: list[frozenset]) -> str:
    matrix = [[format(_dice(sa, sb), ".12g") for sb in sets_b] for sa in sets_a]
    payload = json.dumps(matrix, separators=(",", ":")).encode("utf-8")
    return "sha256:" + hashlib.sha256(payload).hexdigest()


# (rows consumed from a, rows consumed from b) for each permitted link shape,
# in tie-break preference order: substantive links before gaps.
_SHAPES = [(1, 1), (2, 1), (1, 2), (1, 0), (0, 1)]


def _labeled_link(
    link_id: int,
    source: tuple[int, ...],
    candidate: tuple[int, ...],
    tok_a: list[list[str]],
    tok_b: list[list[str]],
) -> Link:
    tokens_a: list[str] = []
    for i in source:
        tokens_a.extend(tok_a[i])
    tokens_b: list[str] = []
    for j in candidate:
        tokens_b.extend(tok_b[j])
    distance = token_edit_distance(tokens_a, tokens_b)
    if not source:
        label = LABEL_INSERTED
    elif not candidate:
        label = LABEL_DELETED
    elif distance == 0:
        label = LABEL_UNCHANGED
    else:
        label = LABEL_MODIFIED
    return Link(link_id, source, candidate, label, distance)


def align(a: TokenizedText, b: TokenizedText) -> AlignmentMap:
    """Globally optimal monotone alignment of a's sentences to b's.

    Maximizes sum of Dice similarities over linked groups, minus GAP_PENALTY
    for each 1-0 or 0-1 link.  An empty side yields an all-inserted or
    all-deleted map rather than an error.
    """
    tok_a = a.sentence_tokens()
    tok_b = b.sentence_tokens()
    sets_a = [frozenset(tokens) for tokens in tok_a]
    sets_b = [frozenset(tokens) for tokens in tok_b]
    m, n = len(sets_a), len(sets_b)
    digest = _similarity_digest(sets_a, sets_b)

    def group_sim(i0: int, i1: int, j0: int, j1: int) -> float:
        group_a = frozenset().union(*sets_a[i0:i1]) if i1 > i0 else frozenset()
        group_b = frozenset().union(*sets_b[j0:j1]) if j1 > j0 else frozenset()
        return _dice(group_a, group_b)

    neg_inf = float("-inf")
    score = [[neg_inf] * (n + 1) for _ in range(m + 1)]
    parent: list[list[tuple[int, int] | None]] = [[None] * (n + 1) for _ in range(m + 1)]
    score[0][0] = 0.0
    for i in range(m + 1):
        for j in range(n + 1):
            if i == 0 and j == 0:
                continue
            best, best_shape = neg_inf, None
            for di, dj in _SHAPES:
                if i < di or j < dj:
                    continue
                prev = score[i - di][j - dj]
                if prev == neg_inf:
                    continue
                gain = -GAP_PENALTY if 0 in (di, dj) else group_sim(i - di, i, j - dj, j)
                if prev + gain > best:
                    best, best_shape = prev + gain, (di, dj)
            score[i][j] = best
            parent[i][j] = best_shape

    shapes: list[tuple[int, int]] = []
    i, j = m, n
    while i > 0 or j > 0:
        di, dj = parent[i][j]  # type: ignore[misc]
        shapes.append((di, dj))
        i, j = i - di, j - dj
    shapes.reverse()

    links: list[Link] = []
    i = j = 0
    for link_id, (di, dj) in enumerate(shapes):
        links.append(
            _labeled_link(
                link_id,
                tuple(range(i, i + di)),
                tuple(range(j, j + dj)),
                tok_a,
                tok_b,
            )
        )
        i, j = i + di, j + dj
    return AlignmentMap(links=links, similarity_matrix_digest=digest)


def alignment_score(map_: AlignmentMap, a: TokenizedText, b: TokenizedText) -> float:
    """Objective value of an alignment under the align() scoring rule.
    Useful for comparing against alternative alignments of the same texts.
    """
    sets_a = _sentence_token_sets(a)
    sets_b = _sentence_token_sets(b)
    total = 0.0
    for link in map_.links:
        if not link.source or not link.candidate:
            total -= GAP_PENALTY
        else:
            group_a = frozenset().union(*(sets_a[i] for i in link.source))
            group_b = frozenset().union(*(sets_b[j] for j in link.candidate))
            total += _dice(group_a, group_b)
    return total


def per_source_distances(map_: AlignmentMap) -> list[int]:
    """Edit distance attributed to each source sentence.

    A link's distance lands on its first source sentence; an insertion lands
    on the nearest preceding source sentence, or sentence 0 when it precedes
    all of them.
    """
    count = map_.source_sentence_count
    if count == 0:
        return []
    distances = [0] * count
    last_seen = 0
    for link in map_.links:
        if link.source:
            distances[link.source[0]] += link.edit_distance
            last_seen = link.source[-1]
        else:
            distances[last_seen] += link.edit_distance
    return distances


def gini(values: Sequence[float]) -> float:
    """Gini coefficient; 0 for uniform or all-zero values."""
    n = len(values)
    if n == 0:
        return 0.0
    total = sum(values)
    if total == 0:
        return 0.0
    ordered = sorted(values)
    # G = sum_i (2i - n - 1) x_(i) / (n * sum x) with 1-based ranks over
    # ascending order; equivalent to the mean-absolute-difference form.
    weighted = sum((2 * (rank + 1) - n - 1) * x for rank, x in enumerate(ordered))
    return weighted / (n * total)


def edit_dispersion(map_: AlignmentMap) -> float:
    """How unevenly edits spread across source sentences: the Gini
    coefficient of per-source-sentence edit distances.  0 means perfectly
    even; values near 1 mean almost all edits hit one sentence.
    """
    distances = per_source_distances(map_)
    if len(distances) < 2:
        raise ValueError("edit dispersion needs at least 2 source sentences")
    return gini(distances)


@dataclass(frozen=True)
class Replacement:
    """A curator's choice for one link: keep the base side or take the
    candidate side."""

    link_id: int
    side: str = SIDE_CANDIDATE

    @classmethod
    def from_dict(cls, data: dict) -> "Replacement":
        side = data.get("side", SIDE_CANDIDATE)
        if side not in (SIDE_BASE, SIDE_CANDIDATE):
            raise ValueError(f"unknown side {side!r}")
        return cls(link_id=data["link_id"], side=side)


def _candidate_raw(b: TokenizedText, indices: tuple[int, ...]) -> str:
    return " ".join(b.sentence_raw(j) for j in indices)


def merge(
    base: str,
    candidate: str,
    map_: AlignmentMap,
    replacements: Sequence[Replacement],
    locks: Sequence[LockSpan] = (),
) -> str:
    """Splices candidate sentences for the chosen links into the base text.

    All-or-nothing: unknown or duplicate link ids, or any replacement
    touching a lock, fail the whole merge with the base unchanged.  With zero
    effective replacements the base comes back byte-identical.
    """
    base_tok = tokenize(base)
    cand_tok = tokenize(candidate)
    if map_.source_sentence_count != base_tok.sentence_count:
        raise ValueError("alignment does not match base text")
    if map_.candidate_sentence_count != cand_tok.sentence_count:
        raise ValueError("alignment does not match candidate text")

    seen: set[int] = set()
    for rep in replacements:
        map_.link_by_id(rep.link_id)
        if rep.link_id in seen:
            raise ValueError(f"overlapping replacements for link {rep.link_id}")
        seen.add(rep.link_id)
    chosen = {rep.link_id for rep in replacements if rep.side == SIDE_CANDIDATE}

    spans = [base_tok.sentences[i] for i in range(base_tok.sentence_count)]
    # Each entry: (start, end, replacement text, link_id).
    splices: list[tuple[int, int, str, int]] = []
    last_end: int | None = None
    for link in map_.links:
        if link.source:
            start = spans[link.source[0]].start
            end = spans[link.source[-1]].end
            last_end = end
            if link.link_id not in chosen:
                continue
            text = _candidate_raw(cand_tok, link.candidate)
            if not text:
                # Deleting a sentence: swallow the gap so spacing stays clean.
                if end < len(base):
                    while end < len(base) and base[end].isspace():
                        end += 1
                else:
                    while start > 0 and base[start - 1].isspace():
                        start -= 1
            splices.append((start, end, text, link.link_id))
        elif link.link_id in chosen:
            raw = _candidate_raw(cand_tok, link.candidate)
            if last_end is None:
                anchor = spans[0].start if spans else 0
                splices.append((anchor, anchor, raw + " ", link.link_id))
            else:
                splices.append((last_end, last_end, " " + raw, link.link_id))

    violations = sorted(
        {
            link_id
            for start, end, _, link_id in splices
            for lock in locks
            if (start < lock.end and lock.start < end)
            or (start == end and lock.start < start < lock.end)
        }
    )
    if violations:
        raise MergeConflictError("merge would alter locked spans", violations)

    merged = base
    for start, end, text, _ in sorted(splices, key=lambda s: (s[0], s[3]), reverse=True):
        merged = merged[:start] + text + merged[end:]
    return merged
