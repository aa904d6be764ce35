"""Run orchestration: seeded pair sampling, over-generation across providers,
the persistent response bank, and report/scatter exports.

A run walks provider x method x sampled-pair work items concurrently (bounded
per provider), generates k candidates per item, scores and evaluates each,
and appends successes to the bank.  Reports follow single-response semantics:
only the first draw per item feeds the aggregate; the remaining k-1 stay in
the bank for the curator UI.  Candidate ids hash the content, so re-running
an identical spec adds nothing.
"""

import hashlib
import json
import math
import threading
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Sequence

from leveltext.corpus import LeveledPair, SplitMix64
from leveltext.errors import LevelTextError, UnknownRunError
from leveltext.metrics import (
    PairEmbedder,
    PairEvaluation,
    RunReport,
    STATUS_EVALUATED,
    aggregate,
    evaluate_output,
    reports_to_csv,
    reports_to_json,
    unsupported_evaluation,
)
from leveltext.prompting import (
    PromptBundle,
    ShotSelectionPolicy,
    render_few_shot,
    render_zero_shot,
    select_shots,
)
from leveltext.providers import (
    GenerationProvider,
    GenerationResult,
    STATUS_PROVIDER_ERROR,
    build_provider,
)
from leveltext.readability import ReadabilityReport, ScorerModel, score
from leveltext.textproc import FrequencyTable

METHOD_ZERO_SHOT = "zero-shot"
METHOD_FEW_SHOT = "few-shot"

# Failure status for outputs the scorer rejects (e.g. no sentences survive
# marker stripping); distinct from transport-level provider statuses.
STATUS_UNSCORABLE = "unscorable"

DEFAULT_IN_FLIGHT = 4

SCATTER_COLUMNS = [
    "pair_id",
    "source",
    "intended",
    "resulting",
    "intended_shift",
    "resulting_shift",
    "match",
]


@dataclass(frozen=True)
class Method:
    """A generation method: zero-shot, or few-shot with a shot count."""

    kind: str
    n_shots: int = 0

    def __post_init__(self):
        if self.kind not in (METHOD_ZERO_SHOT, METHOD_FEW_SHOT):
            raise ValueError(f"unknown method kind {self.kind!r}")
        if self.kind == METHOD_ZERO_SHOT and self.n_shots != 0:
            raise ValueError("zero-shot takes no shots")
        if self.kind == METHOD_FEW_SHOT and self.n_shots < 1:
            raise ValueError("few-shot needs a positive shot count")

    @property
    def label(self) -> str:
        if self.kind == METHOD_ZERO_SHOT:
            return METHOD_ZERO_SHOT
        return f"{METHOD_FEW_SHOT}-{self.n_shots}"

    @classmethod
    def parse(cls, label: str) -> "Method":
        if label == METHOD_ZERO_SHOT:
            return cls(METHOD_ZERO_SHOT)
        prefix = METHOD_FEW_SHOT + "-"
        if label.startswith(prefix) and label[len(prefix) :].isdigit():
            return cls(METHOD_FEW_SHOT, int(label[len(prefix) :]))
        raise ValueError(f"unknown method {label!r}; use zero-shot or few-shot-N")


@dataclass
class RunSpec:
    """Everything a benchmark run needs besides the corpus itself."""

    run_id: str
    split: str = "test"
    sample_size: int = 100
    providers: list[dict] = field(default_factory=list)
    methods: list[str] = field(default_factory=lambda: [METHOD_ZERO_SHOT])
    over_generation_k: int = 1
    seed: int = 0

    def __post_init__(self):
        if self.split not in ("test", "valid"):
            raise ValueError(f"split must be test or valid, got {self.split!r}")
        if self.sample_size < 1:
            raise ValueError("sample_size must be positive")
        if self.over_generation_k < 1:
            raise ValueError("over_generation_k must be >= 1")
        for label in self.methods:
            Method.parse(label)

    def to_dict(self) -> dict:
        return {
            "run_id": self.run_id,
            "split": self.split,
            "sample_size": self.sample_size,
            "providers": self.providers,
            "methods": self.methods,
            "over_generation_k": self.over_generation_k,
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "RunSpec":
        return cls(
            run_id=data["run_id"],
            split=data.get("split", "test"),
            sample_size=data.get("sample_size", 100),
            providers=data.get("providers", []),
            methods=data.get("methods", [METHOD_ZERO_SHOT]),
            over_generation_k=data.get("over_generation_k", 1),
            seed=data.get("seed", 0),
        )

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2), encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> "RunSpec":
        return cls.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


def candidate_id_for(pair_id: str, provider: str, method: str, output: str) -> str:
    """Content address: identical generations collapse to one id."""
    digest = hashlib.sha256()
    for part in (pair_id, provider, method, output):
        digest.update(part.encode("utf-8"))
        digest.update(b"\x00")
    return digest.hexdigest()


@dataclass(frozen=True)
class Candidate:
    """One successful generation, scored and evaluated, as stored in the
    bank."""

    candidate_id: str
    pair_id: str
    provider: str
    method: str
    shot_ids: tuple[str, ...]
    output_text: str
    report: ReadabilityReport
    evaluation: PairEvaluation
    created_at: str

    def to_dict(self) -> dict:
        return {
            "candidate_id": self.candidate_id,
            "pair_id": self.pair_id,
            "provider": self.provider,
            "method": self.method,
            "shot_ids": list(self.shot_ids),
            "output_text": self.output_text,
            "report": self.report.to_dict(),
            "evaluation": self.evaluation.to_dict(),
            "created_at": self.created_at,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Candidate":
        return cls(
            candidate_id=data["candidate_id"],
            pair_id=data["pair_id"],
            provider=data["provider"],
            method=data["method"],
            shot_ids=tuple(data["shot_ids"]),
            output_text=data["output_text"],
            report=ReadabilityReport(**data["report"]),
            evaluation=PairEvaluation.from_dict(data["evaluation"]),
            created_at=data["created_at"],
        )

    def distance_to_target(self) -> float:
        if (
            self.evaluation.resulting_score is None
            or self.evaluation.intended_score is None
        ):
            return math.inf
        return abs(self.evaluation.resulting_score - self.evaluation.intended_score)


class ResponseBank:
    """Append-only JSONL log of candidates plus a rebuildable sidecar index.

    Appends are serialized through one lock; queries snapshot under the same
    lock, so readers always see a consistent prefix of the log.  Duplicate
    candidate ids are dropped, which makes identical re-runs idempotent.
    """

    LOG_NAME = "log.jsonl"
    INDEX_NAME = "index.json"

    def __init__(self, root: str | Path):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self.log_path = self.root / self.LOG_NAME
        self.index_path = self.root / self.INDEX_NAME
        self._lock = threading.Lock()
        self._by_id: dict[str, Candidate] = {}
        if self.log_path.exists():
            with self.log_path.open(encoding="utf-8") as handle:
                for line in handle:
                    line = line.strip()
                    if not line:
                        continue
                    candidate = Candidate.from_dict(json.loads(line))
                    self._by_id.setdefault(candidate.candidate_id, candidate)

    def __len__(self) -> int:
        with self._lock:
            return len(self._by_id)

    def get(self, candidate_id: str) -> Candidate | None:
        with self._lock:
            return self._by_id.get(candidate_id)

    def append(self, candidate: Candidate) -> bool:
        """Persists the candidate; returns False (and writes nothing) when
        its id is already in the log."""
        with self._lock:
            if candidate.candidate_id in self._by_id:
                return False
            with self.log_path.open("a", encoding="utf-8") as handle:
                handle.write(json.dumps(candidate.to_dict(), sort_keys=True) + "\n")
            self._by_id[candidate.candidate_id] = candidate
            return True

    @staticmethod
    def _index_key(pair_id: str, provider: str, method: str) -> str:
        return f"{pair_id}|{provider}|{method}"

    def write_index(self) -> None:
        """Rewrites the sidecar index from the in-memory view of the log."""
        with self._lock:
            index: dict[str, list[str]] = {}
            for candidate in self._by_id.values():
                key = self._index_key(candidate.pair_id, candidate.provider, candidate.method)
                index.setdefault(key, []).append(candidate.candidate_id)
        self.index_path.write_text(
            json.dumps(index, indent=2, sort_keys=True), encoding="utf-8"
        )

    def query(
        self,
        pair_id: str | None = None,
        provider: str | None = None,
        method: str | None = None,
        min_score: float | None = None,
        max_score: float | None = None,
    ) -> list[Candidate]:
        """Filtered candidates ordered by distance to the intended score,
        then candidate_id.  Score bounds are inclusive."""
        with self._lock:
            snapshot = list(self._by_id.values())
        picked = []
        for candidate in snapshot:
            if pair_id is not None and candidate.pair_id != pair_id:
                continue
            if provider is not None and candidate.provider != provider:
                continue
            if method is not None and candidate.method != method:
                continue
            resulting = candidate.evaluation.resulting_score
            if min_score is not None and (resulting is None or resulting < min_score):
                continue
            if max_score is not None and (resulting is None or resulting > max_score):
                continue
            picked.append(candidate)
        picked.sort(key=lambda c: (c.distance_to_target(), c.candidate_id))
        return picked


@dataclass
class RunContext:
    """Corpus-side inputs for a run: the sampling pool, the exemplar pool,
    and the scorer."""

    pairs: list[LeveledPair]
    train_pairs: list[LeveledPair]
    model: ScorerModel
    freq: FrequencyTable
    embedder: PairEmbedder | None = None


def sample_pairs(pairs: Sequence[LeveledPair], sample_size: int, seed: int) -> list[LeveledPair]:
    """Seeded uniform sample without replacement, stable across runs."""
    if sample_size < 1:
        raise ValueError("empty sample")
    if sample_size > len(pairs):
        raise ValueError(f"sample_size {sample_size} exceeds pool of {len(pairs)}")
    ordered = sorted(pairs, key=lambda p: p.pair_id)
    SplitMix64(seed).shuffle(ordered)
    return ordered[:sample_size]


def render_bundle(
    pair: LeveledPair, method: Method, train_pairs: Sequence[LeveledPair]
) -> PromptBundle:
    """Prompt for one work item.  Few-shot falls back to the zero-shot
    template (with a warning) when no exemplar qualifies."""
    if method.kind == METHOD_ZERO_SHOT:
        return render_zero_shot(pair)
    policy = ShotSelectionPolicy(n_shots=method.n_shots)
    shots = select_shots(pair, list(train_pairs), policy)
    if not shots:
        warnings.warn(f"no qualifying shots for pair {pair.pair_id}; using zero-shot prompt")
        return render_zero_shot(pair)
    return render_few_shot(pair, shots)


@dataclass
class RunResult:
    """Everything a finished run produced, as loaded back from disk."""

    run_id: str
    spec: RunSpec
    reports: list[RunReport]
    evaluations: dict[tuple[str, str], list[PairEvaluation]]
    sampled_pair_ids: list[str]
    run_dir: Path | None = None
    new_candidates: int = 0

    def combos(self) -> list[tuple[str, str]]:
        return sorted(self.evaluations)

    def report_for(self, provider: str, method: str) -> RunReport:
        wanted = Method.parse(method)
        for report in self.reports:
            if (
                report.provider == provider
                and report.method == wanted.kind
                and report.n_shots == wanted.n_shots
            ):
                return report
        raise KeyError(f"no report for {provider} {method}")

    def failure_count(self, provider: str, method: str) -> int:
        evals = self.evaluations[(provider, method)]
        return sum(1 for e in evals if e.status != STATUS_EVALUATED)


def _run_dir(workspace: Path, run_id: str) -> Path:
    return workspace / "runs" / run_id


def _persist_run(run_dir: Path, result: RunResult) -> None:
    run_dir.mkdir(parents=True, exist_ok=True)
    result.spec.save(run_dir / "spec.json")
    (run_dir / "sample.json").write_text(
        json.dumps(result.sampled_pair_ids, indent=2), encoding="utf-8"
    )
    with (run_dir / "evals.jsonl").open("w", encoding="utf-8") as handle:
        for (provider, method), evals in sorted(result.evaluations.items()):
            for evaluation in evals:
                handle.write(
                    json.dumps(
                        {
                            "provider": provider,
                            "method": method,
                            "evaluation": evaluation.to_dict(),
                        },
                        sort_keys=True,
                    )
                    + "\n"
                )
    (run_dir / "report.json").write_text(reports_to_json(result.reports), encoding="utf-8")
    (run_dir / "report.csv").write_text(reports_to_csv(result.reports), encoding="utf-8")


def load_run(workspace: str | Path, run_id: str) -> RunResult:
    run_dir = _run_dir(Path(workspace), run_id)
    if not run_dir.is_dir():
        raise UnknownRunError(f"unknown run {run_id!r}")
    spec = RunSpec.load(run_dir / "spec.json")
    sampled = json.loads((run_dir / "sample.json").read_text(encoding="utf-8"))
    reports = [
        RunReport.from_dict(d)
        for d in json.loads((run_dir / "report.json").read_text(encoding="utf-8"))
    ]
    evaluations: dict[tuple[str, str], list[PairEvaluation]] = {}
    with (run_dir / "evals.jsonl").open(encoding="utf-8") as handle:
        for line in handle:
            line = line.strip()
            if not line:
                continue
            row = json.loads(line)
            key = (row["provider"], row["method"])
            evaluations.setdefault(key, []).append(
                PairEvaluation.from_dict(row["evaluation"])
            )
    return RunResult(
        run_id=run_id,
        spec=spec,
        reports=reports,
        evaluations=evaluations,
        sampled_pair_ids=sampled,
        run_dir=run_dir,
    )


def _draw_outcome(
    pair: LeveledPair,
    bundle: PromptBundle,
    method_label: str,
    provider_name: str,
    result,
    ctx: RunContext,
) -> tuple[PairEvaluation, Candidate | None]:
    """Evaluation (and candidate, for successes) for a single draw."""
    if not result.ok:
        return (
            unsupported_evaluation(
                pair.pair_id, result.status, pair.source_score, pair.target_score
            ),
            None,
        )
    try:
        report = score(result.output_text, ctx.model, ctx.freq)
    except LevelTextError:
        return (
            unsupported_evaluation(
                pair.pair_id, STATUS_UNSCORABLE, pair.source_score, pair.target_score
            ),
            None,
        )
    evaluation = evaluate_output(
        pair_id=pair.pair_id,
        source_text=pair.source_text,
        source_score=pair.source_score,
        intended_score=pair.target_score,
        output_text=result.output_text,
        resulting_score=report.score,
        embedder=ctx.embedder,
    )
    candidate = Candidate(
        candidate_id=candidate_id_for(
            pair.pair_id, provider_name, method_label, result.output_text
        ),
        pair_id=pair.pair_id,
        provider=provider_name,
        method=method_label,
        shot_ids=bundle.shots_used,
        output_text=result.output_text,
        report=report,
        evaluation=evaluation,
        created_at=datetime.now(timezone.utc).isoformat(),
    )
    return evaluation, candidate


def run_benchmark(
    spec: RunSpec,
    ctx: RunContext,
    providers: Sequence[GenerationProvider] | None = None,
    workspace: str | Path = ".",
    in_flight: int = DEFAULT_IN_FLIGHT,
    transport=None,
    bank: ResponseBank | None = None,
) -> RunResult:
    """Executes a benchmark run and persists bank, evaluations, and reports.

    Providers default to building from spec.providers (mock specs resolve
    against the sampling pool).  One work item per provider x method x
    sampled pair; k draws per item; draw 0 feeds the report.  Pass ``bank``
    to share a live instance (the service does); otherwise one is opened at
    workspace/bank.
    """
    workspace = Path(workspace)
    sampled = sample_pairs(ctx.pairs, spec.sample_size, spec.seed)
    if providers is None:
        providers = [
            build_provider(entry, pairs=ctx.pairs, transport=transport)
            for entry in spec.providers
        ]
    if not providers:
        raise ValueError("no providers configured")
    methods = [Method.parse(label) for label in spec.methods]
    if not methods:
        raise ValueError("no methods configured")

    if bank is None:
        bank = ResponseBank(workspace / "bank")
    gates = {provider.name: threading.BoundedSemaphore(in_flight) for provider in providers}

    def work_item(provider: GenerationProvider, method: Method, pair: LeveledPair):
        bundle = render_bundle(pair, method, ctx.train_pairs)
        outcomes = []
        with gates[provider.name]:
            for _ in range(spec.over_generation_k):
                try:
                    result = provider.generate(bundle)
                except LevelTextError:
                    # Misconfigured or hard-failing provider: record the miss,
                    # keep the run going for the other providers.
                    result = GenerationResult(None, STATUS_PROVIDER_ERROR, 0.0, 0)
                outcomes.append(
                    _draw_outcome(pair, bundle, method.label, provider.name, result, ctx)
                )
        return outcomes

    keyed_evals: dict[tuple[str, str, str], PairEvaluation] = {}
    new_candidates = 0
    with ThreadPoolExecutor(max_workers=max(1, len(providers) * in_flight)) as pool:
        futures = {}
        for provider in providers:
            for method in methods:
                for pair in sampled:
                    future = pool.submit(work_item, provider, method, pair)
                    futures[future] = (provider.name, method.label, pair.pair_id)
        for future, (provider_name, method_label, pair_id) in futures.items():
            outcomes = future.result()
            keyed_evals[(provider_name, method_label, pair_id)] = outcomes[0][0]
            for _, candidate in outcomes:
                if candidate is not None and bank.append(candidate):
                    new_candidates += 1
    bank.write_index()

    evaluations: dict[tuple[str, str], list[PairEvaluation]] = {}
    reports: list[RunReport] = []
    for provider in providers:
        for method in methods:
            evals = [
                keyed_evals[(provider.name, method.label, pair.pair_id)] for pair in sampled
            ]
            evaluations[(provider.name, method.label)] = evals
            reports.append(
                aggregate(
                    evals,
                    method=method.kind,
                    provider=provider.name,
                    n_shots=method.n_shots,
                )
            )

    result = RunResult(
        run_id=spec.run_id,
        spec=spec,
        reports=reports,
        evaluations=evaluations,
        sampled_pair_ids=[pair.pair_id for pair in sampled],
        run_dir=_run_dir(workspace, spec.run_id),
        new_candidates=new_candidates,
    )
    _persist_run(result.run_dir, result)
    return result


@dataclass(frozen=True)
class ScatterRow:
    """One point of the intended-vs-resulting picture, with the shift view
    (differences from the source score) precomputed."""

    pair_id: str
    source: float
    intended: float
    resulting: float
    match: bool

    @property
    def intended_shift(self) -> float:
        return self.intended - self.source

    @property
    def resulting_shift(self) -> float:
        return self.resulting - self.source


def scatter_rows(
    run: RunResult, provider: str | None = None, method: str | None = None
) -> list[ScatterRow]:
    """Evaluated pairs of one (provider, method) combo; defaults to the
    first combo in sorted order when not pinned down."""
    combos = [
        key
        for key in run.combos()
        if (provider is None or key[0] == provider) and (method is None or key[1] == method)
    ]
    if not combos:
        raise UnknownRunError(f"no matching provider/method in run {run.run_id!r}")
    chosen = combos[0]
    rows = []
    for evaluation in run.evaluations[chosen]:
        if evaluation.status != STATUS_EVALUATED:
            continue
        rows.append(
            ScatterRow(
                pair_id=evaluation.pair_id,
                source=evaluation.source_score,
                intended=evaluation.intended_score,
                resulting=evaluation.resulting_score,
                match=bool(evaluation.match),
            )
        )
    return rows


def scatter_csv(rows: Sequence[ScatterRow]) -> str:
    lines = [",".join(SCATTER_COLUMNS)]
    for row in rows:
        lines.append(
            ",".join(
                [
                    row.pair_id,
                    format(row.source, ".10g"),
                    format(row.intended, ".10g"),
                    format(row.resulting, ".10g"),
                    format(row.intended_shift, ".10g"),
                    format(row.resulting_shift, ".10g"),
                    "true" if row.match else "false",
                ]
            )
        )
    return "\n".join(lines) + "\n"


def scatter_svg(rows: Sequence[ScatterRow], band: float = 50.0, size: int = 640) -> str:
    """Hand-rolled intended-vs-resulting scatter with the +/-band corridor
    around the diagonal.  Points carry class "match" or "miss"."""
    margin = 60
    values = [v for row in rows for v in (row.intended, row.resulting)] or [0.0, 1000.0]
    lo = math.floor((min(values) - band) / 100.0) * 100.0
    hi = math.ceil((max(values) + band) / 100.0) * 100.0
    if hi <= lo:
        hi = lo + 100.0
    span = hi - lo
    inner = size - 2 * margin

    def sx(v: float) -> float:
        return margin + (v - lo) / span * inner

    def sy(v: float) -> float:
        return size - margin - (v - lo) / span * inner

    def pt(x: float, y: float) -> str:
        return f"{x:.2f},{y:.2f}"

    band_points = " ".join(
        [
            pt(sx(lo), sy(lo - band)),
            pt(sx(hi), sy(hi - band)),
            pt(sx(hi), sy(hi + band)),
            pt(sx(lo), sy(lo + band)),
        ]
    )
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
        f'viewBox="0 0 {size} {size}">',
        f'<rect x="0" y="0" width="{size}" height="{size}" fill="white"/>',
        f'<polygon class="band" points="{band_points}" fill="#cfe8cf" opacity="0.6"/>',
        f'<line class="diagonal" x1="{sx(lo):.2f}" y1="{sy(lo):.2f}" '
        f'x2="{sx(hi):.2f}" y2="{sy(hi):.2f}" stroke="#888" stroke-dasharray="4 3"/>',
        f'<line x1="{margin}" y1="{size - margin}" x2="{size - margin}" y2="{size - margin}" '
        f'stroke="black"/>',
        f'<line x1="{margin}" y1="{margin}" x2="{margin}" y2="{size - margin}" stroke="black"/>',
    ]
    ticks = 5
    for i in range(ticks + 1):
        value = lo + span * i / ticks
        x = sx(value)
        y = sy(value)
        parts.append(
            f'<text x="{x:.2f}" y="{size - margin + 20}" font-size="11" '
            f'text-anchor="middle">{value:.0f}</text>'
        )
        parts.append(
            f'<text x="{margin - 8}" y="{y:.2f}" font-size="11" '
            f'text-anchor="end">{value:.0f}</text>'
        )
    parts.append(
        f'<text x="{size / 2:.0f}" y="{size - 12}" font-size="13" '
        f'text-anchor="middle">intended score</text>'
    )
    parts.append(
        f'<text x="16" y="{size / 2:.0f}" font-size="13" text-anchor="middle" '
        f'transform="rotate(-90 16 {size / 2:.0f})">resulting score</text>'
    )
    for row in rows:
        cls = "match" if row.match else "miss"
        fill = "#2e7d32" if row.match else "#c62828"
        parts.append(
            f'<circle class="{cls}" cx="{sx(row.intended):.2f}" cy="{sy(row.resulting):.2f}" '
            f'r="4" fill="{fill}" opacity="0.8"><title>{row.pair_id}</title></circle>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def export_scatter(
    run: RunResult,
    out_csv: str | Path,
    out_svg: str | Path | None = None,
    provider: str | None = None,
    method: str | None = None,
) -> list[ScatterRow]:
    rows = scatter_rows(run, provider=provider, method=method)
    Path(out_csv).write_text(scatter_csv(rows), encoding="utf-8")
    if out_svg is not None:
        Path(out_svg).write_text(scatter_svg(rows), encoding="utf-8")
    return rows
