"""Evaluation suite: readability-target metrics, content-preservation metrics,
and per-run aggregation in the benchmark-table shape.

Content preservation compares the generated text against the SOURCE text.
The built-in lexical embedder makes every metric computable offline; wiring a
ServiceEmbedder swaps in real embeddings without touching callers.
"""

import csv
import io
import json
import math
from dataclasses import dataclass
from typing import NamedTuple, Protocol

import numpy as np

from leveltext.errors import UnscorableError
from leveltext.kernels import token_edit_distance
from leveltext.providers import EmbeddingClient
from leveltext.textproc import tokenize

# A generation "matches" when its score lands within this many points of the
# intended score, on either side.
MATCH_WINDOW = 50.0

STATUS_EVALUATED = "evaluated"
STATUS_UNSUPPORTED = "unsupported"

REPORT_COLUMNS = [
    "Method",
    "Model",
    "#Shot",
    "Support",
    "MAE",
    "Match",
    "Direction",
    "P",
    "R",
    "F1",
    "SemanticSim",
    "NormEditDist",
]


class LexileMetrics(NamedTuple):
    abs_error: float
    match: bool
    direction_ok: bool | None


def lexile_metrics(intended: float, source: float, resulting: float) -> LexileMetrics:
    """Absolute error, the +/-50 match flag, and whether the score moved the
    intended way.  Direction is not applicable when intended == source.
    """
    abs_error = abs(resulting - intended)
    match = abs_error <= MATCH_WINDOW
    if intended == source:
        direction: bool | None = None
    else:
        wanted = intended - source
        moved = resulting - source
        direction = (moved > 0) == (wanted > 0) and moved != 0
    return LexileMetrics(abs_error, match, direction)


def normalized_edit_distance(a: str, b: str) -> float:
    """Token-level Levenshtein over max token count, in [0, 1]."""
    tokens_a = tokenize(a).tokens()
    tokens_b = tokenize(b).tokens()
    longest = max(len(tokens_a), len(tokens_b))
    if longest == 0:
        return 0.0
    return token_edit_distance(tokens_a, tokens_b) / longest


class PairEmbedder(Protocol):
    """Embeds the two sides of a comparison into one shared vector space."""

    def embed_token_pair(
        self, tokens_a: list[str], tokens_b: list[str]
    ) -> tuple[np.ndarray, np.ndarray]: ...

    def embed_text_pair(self, a: str, b: str) -> tuple[np.ndarray, np.ndarray]: ...


class LexicalEmbedder:
    """Overlap embedder: one-hot token vectors over the pair's joint
    vocabulary, bag-of-token count vectors for whole texts.  Deterministic and
    dependency-free; cosine reduces to exact lexical overlap.
    """

    def embed_token_pair(self, tokens_a, tokens_b):
        vocab = {t: i for i, t in enumerate(dict.fromkeys([*tokens_a, *tokens_b]))}
        dim = len(vocab)
        mat_a = np.zeros((len(tokens_a), dim))
        mat_b = np.zeros((len(tokens_b), dim))
        for row, tok in enumerate(tokens_a):
            mat_a[row, vocab[tok]] = 1.0
        for row, tok in enumerate(tokens_b):
            mat_b[row, vocab[tok]] = 1.0
        return mat_a, mat_b

    def embed_text_pair(self, a, b):
        tokens_a = tokenize(a).tokens()
        tokens_b = tokenize(b).tokens()
        vocab = {t: i for i, t in enumerate(dict.fromkeys([*tokens_a, *tokens_b]))}
        vec_a = np.zeros(max(len(vocab), 1))
        vec_b = np.zeros(max(len(vocab), 1))
        for tok in tokens_a:
            vec_a[vocab[tok]] += 1.0
        for tok in tokens_b:
            vec_b[vocab[tok]] += 1.0
        for vec in (vec_a, vec_b):
            norm = np.linalg.norm(vec)
            if norm > 0:
                vec /= norm
        return vec_a, vec_b


class ServiceEmbedder:
    """PairEmbedder backed by a remote embedding endpoint."""

    def __init__(self, client: EmbeddingClient):
        self.client = client

    def embed_token_pair(self, tokens_a, tokens_b):
        vectors = self.client.embed([*tokens_a, *tokens_b])
        split = len(tokens_a)
        return np.array(vectors[:split]), np.array(vectors[split:])

    def embed_text_pair(self, a, b):
        vec_a, vec_b = self.client.embed([a, b])
        return vec_a, vec_b


def bert_like_score(
    candidate: str, reference: str, embedder: PairEmbedder | None = None
) -> tuple[float, float, float]:
    """Greedy-matching precision/recall/F1 over token embeddings.

    Precision averages, over candidate tokens, the best cosine against any
    reference token; recall is symmetric; negative cosines clamp to 0.
    """
    embedder = embedder or LexicalEmbedder()
    tokens_c = tokenize(candidate).tokens()
    tokens_r = tokenize(reference).tokens()
    if not tokens_c or not tokens_r:
        raise UnscorableError("unscorable: empty")
    mat_c, mat_r = embedder.embed_token_pair(tokens_c, tokens_r)
    cosines = np.clip(mat_c @ mat_r.T, 0.0, None)
    precision = float(cosines.max(axis=1).mean())
    recall = float(cosines.max(axis=0).mean())
    f1 = 0.0 if precision + recall == 0 else 2 * precision * recall / (precision + recall)
    return precision, recall, f1


def semantic_similarity(
    candidate: str, reference: str, embedder: PairEmbedder | None = None
) -> float:
    """Cosine between whole-text embeddings."""
    embedder = embedder or LexicalEmbedder()
    if not tokenize(candidate).tokens() or not tokenize(reference).tokens():
        raise UnscorableError("unscorable: empty")
    vec_a, vec_b = embedder.embed_text_pair(candidate, reference)
    return float(np.dot(vec_a, vec_b))


@dataclass(frozen=True)
class PairEvaluation:
    """Metrics for one generation attempt on one pair.

    For unsupported rows (failed generations) every metric field is None and
    ``failure_status`` holds the provider status. ``direction_ok`` is None when
    intended == source (not applicable).
    """

    pair_id: str
    status: str
    source_score: float | None = None
    intended_score: float | None = None
    resulting_score: float | None = None
    abs_error: float | None = None
    match: bool | None = None
    direction_ok: bool | None = None
    bert_like: tuple[float, float, float] | None = None
    semantic_similarity: float | None = None
    normalized_edit_distance: float | None = None
    failure_status: str | None = None

    def to_dict(self) -> dict:
        return {
            "pair_id": self.pair_id,
            "status": self.status,
            "source_score": self.source_score,
            "intended_score": self.intended_score,
            "resulting_score": self.resulting_score,
            "abs_error": self.abs_error,
            "match": self.match,
            "direction_ok": self.direction_ok,
            "bert_like": list(self.bert_like) if self.bert_like else None,
            "semantic_similarity": self.semantic_similarity,
            "normalized_edit_distance": self.normalized_edit_distance,
            "failure_status": self.failure_status,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "PairEvaluation":
        bert = data.get("bert_like")
        return cls(
            pair_id=data["pair_id"],
            status=data["status"],
            source_score=data.get("source_score"),
            intended_score=data.get("intended_score"),
            resulting_score=data.get("resulting_score"),
            abs_error=data.get("abs_error"),
            match=data.get("match"),
            direction_ok=data.get("direction_ok"),
            bert_like=tuple(bert) if bert else None,
            semantic_similarity=data.get("semantic_similarity"),
            normalized_edit_distance=data.get("normalized_edit_distance"),
            failure_status=data.get("failure_status"),
        )


def evaluate_output(
    pair_id: str,
    source_text: str,
    source_score: float,
    intended_score: float,
    output_text: str,
    resulting_score: float,
    embedder: PairEmbedder | None = None,
) -> PairEvaluation:
    """Full per-pair evaluation of a successful generation.

    Embedding failures leave those metrics absent; the pair still counts as
    evaluated on everything else.
    """
    abs_error, match, direction = lexile_metrics(intended_score, source_score, resulting_score)
    try:
        bert = bert_like_score(output_text, source_text, embedder)
    except Exception:
        bert = None
    try:
        similarity = semantic_similarity(output_text, source_text, embedder)
    except Exception:
        similarity = None
    return PairEvaluation(
        pair_id=pair_id,
        status=STATUS_EVALUATED,
        source_score=source_score,
        intended_score=intended_score,
        resulting_score=resulting_score,
        abs_error=abs_error,
        match=match,
        direction_ok=direction,
        bert_like=bert,
        semantic_similarity=similarity,
        normalized_edit_distance=normalized_edit_distance(source_text, output_text),
    )


def unsupported_evaluation(
    pair_id: str, failure_status: str, source_score: float, intended_score: float
) -> PairEvaluation:
    return PairEvaluation(
        pair_id=pair_id,
        status=STATUS_UNSUPPORTED,
        source_score=source_score,
        intended_score=intended_score,
        failure_status=failure_status,
    )


@dataclass
class RunReport:
    """One benchmark-table row: a (provider, method) aggregate."""

    method: str
    provider: str
    n_shots: int
    support: int
    mae: float | None
    match_rate: float | None
    direction_rate: float | None
    precision: float | None
    recall: float | None
    f1: float | None
    semantic_similarity: float | None
    edit_distance: float | None
    degraded: bool = False

    def row(self) -> list:
        return [
            self.method,
            self.provider,
            self.n_shots,
            self.support,
            self.mae,
            self.match_rate,
            self.direction_rate,
            self.precision,
            self.recall,
            self.f1,
            self.semantic_similarity,
            self.edit_distance,
        ]

    def to_dict(self) -> dict:
        return dict(zip(REPORT_COLUMNS, self.row())) | {"Degraded": self.degraded}

    @classmethod
    def from_dict(cls, data: dict) -> "RunReport":
        return cls(
            method=data["Method"],
            provider=data["Model"],
            n_shots=data["#Shot"],
            support=data["Support"],
            mae=data["MAE"],
            match_rate=data["Match"],
            direction_rate=data["Direction"],
            precision=data["P"],
            recall=data["R"],
            f1=data["F1"],
            semantic_similarity=data["SemanticSim"],
            edit_distance=data["NormEditDist"],
            degraded=data.get("Degraded", False),
        )


def _mean(values: list[float]) -> float | None:
    if not values:
        return None
    return math.fsum(values) / len(values)


def aggregate(
    evals: list[PairEvaluation],
    method: str,
    provider: str,
    n_shots: int,
    degraded: bool = False,
) -> RunReport:
    """Means and rates over evaluated pairs only; the direction denominator
    additionally excludes not-applicable pairs.  fsum keeps the result
    independent of pair order.
    """
    if not evals:
        raise ValueError("empty run")
    done = [e for e in evals if e.status == STATUS_EVALUATED]
    if not done:
        # Every pair failed: keep the row so the table shows the gap.
        return RunReport(
            method=method,
            provider=provider,
            n_shots=n_shots,
            support=0,
            mae=None,
            match_rate=None,
            direction_rate=None,
            precision=None,
            recall=None,
            f1=None,
            semantic_similarity=None,
            edit_distance=None,
            degraded=True,
        )
    applicable = [e for e in done if e.direction_ok is not None]
    bert_rows = [e.bert_like for e in done if e.bert_like is not None]
    return RunReport(
        method=method,
        provider=provider,
        n_shots=n_shots,
        support=len(done),
        mae=math.fsum(e.abs_error for e in done) / len(done),
        match_rate=sum(1 for e in done if e.match) / len(done),
        direction_rate=(
            sum(1 for e in applicable if e.direction_ok) / len(applicable)
            if applicable
            else None
        ),
        precision=_mean([b[0] for b in bert_rows]),
        recall=_mean([b[1] for b in bert_rows]),
        f1=_mean([b[2] for b in bert_rows]),
        semantic_similarity=_mean(
            [e.semantic_similarity for e in done if e.semantic_similarity is not None]
        ),
        edit_distance=_mean(
            [e.normalized_edit_distance for e in done if e.normalized_edit_distance is not None]
        ),
        degraded=degraded,
    )


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return format(value, ".6g")
    return str(value)


def reports_to_csv(reports: list[RunReport]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(REPORT_COLUMNS)
    for report in reports:
        writer.writerow([_cell(v) for v in report.row()])
    return buffer.getvalue()


def reports_to_json(reports: list[RunReport]) -> str:
    return json.dumps([r.to_dict() for r in reports], indent=2)
