"""Command-line entry points.

Corpus preparation, scoring, calibration, benchmark runs, exports, and the
HTTP service all hang off one `leveltext` command.  Model and frequency-table
options default to the packaged seed assets, so every command works out of
the box on the bundled corpus.
"""

import json
from pathlib import Path

import click

from leveltext import assets
from leveltext.corpus import (
    SplitManifest,
    articles_in_split,
    ingest,
    load_articles,
    load_pairs,
    permute_pairs,
    save_articles,
    save_pairs,
    split_by_set,
    split_sizes,
)
from leveltext.errors import LevelTextError
from leveltext.harness import (
    ResponseBank,
    RunContext,
    RunSpec,
    export_scatter,
    load_run,
    run_benchmark,
)
from leveltext.metrics import reports_to_csv, reports_to_json
from leveltext.providers import build_provider
from leveltext.readability import ScorerModel
from leveltext.readability import calibrate as calibrate_model
from leveltext.readability import score as score_text
from leveltext.textproc import FrequencyTable


def _scorer(model_path: str | None, freq_path: str | None):
    model = ScorerModel.load(model_path) if model_path else assets.default_model()
    freq = FrequencyTable.load(freq_path) if freq_path else assets.default_freq()
    return model, freq


@click.group()
def main():
    """Workbench for leveled-text generation."""


@main.group()
def corpus():
    """Corpus preparation: ingest, split, pair permutation."""


@corpus.command("ingest")
@click.option("--input", "input_path", required=True, type=click.Path(exists=True))
@click.option("--out", required=True, type=click.Path())
@click.option("--model", "model_path", type=click.Path(exists=True))
@click.option("--freq", "freq_path", type=click.Path(exists=True))
def corpus_ingest(input_path, out, model_path, freq_path):
    """Read a raw JSONL archive, scoring articles that lack a score."""
    model, freq = _scorer(model_path, freq_path)
    report = ingest(input_path, model, freq)
    save_articles(report.articles, out)
    click.echo(
        f"{len(report.articles)} articles across {report.set_count} sets -> {out}"
        + (f" ({report.warning_count} skipped)" if report.warning_count else "")
    )


@corpus.command("split")
@click.option("--articles", "articles_path", required=True, type=click.Path(exists=True))
@click.option("--seed", default=0, show_default=True, type=int)
@click.option("--out", required=True, type=click.Path())
def corpus_split(articles_path, seed, out):
    """Assign topic sets to train/valid/test (90/5/5, whole sets)."""
    articles = load_articles(articles_path)
    manifest = split_by_set(articles, seed)
    manifest.save(out)
    sizes = split_sizes(len(manifest.train) + len(manifest.valid) + len(manifest.test))
    click.echo(f"train/valid/test = {sizes[0]}/{sizes[1]}/{sizes[2]} sets -> {out}")


@corpus.command("pairs")
@click.option("--articles", "articles_path", required=True, type=click.Path(exists=True))
@click.option("--manifest", "manifest_path", type=click.Path(exists=True))
@click.option(
    "--split",
    type=click.Choice(["train", "valid", "test", "all"]),
    default="all",
    show_default=True,
)
@click.option("--out", required=True, type=click.Path())
def corpus_pairs(articles_path, manifest_path, split, out):
    """Permute every ordered article pair within each set of a split."""
    articles = load_articles(articles_path)
    if split != "all":
        if manifest_path is None:
            raise click.UsageError("--manifest is required when --split is not 'all'")
        manifest = SplitManifest.load(manifest_path)
        articles = articles_in_split(articles, manifest, split)
    pairs = permute_pairs(articles)
    save_pairs(pairs, out)
    click.echo(f"{len(pairs)} pairs -> {out}")


@main.command("score")
@click.argument("file", type=click.Path(exists=True))
@click.option("--model", "model_path", type=click.Path(exists=True))
@click.option("--freq", "freq_path", type=click.Path(exists=True))
@click.option("--json", "as_json", is_flag=True, help="Emit the full report as JSON.")
def score_cmd(file, model_path, freq_path, as_json):
    """Score a text file on the 0-2000 readability scale."""
    model, freq = _scorer(model_path, freq_path)
    text = Path(file).read_text(encoding="utf-8")
    try:
        report = score_text(text, model, freq)
    except LevelTextError as exc:
        raise click.ClickException(str(exc))
    if as_json:
        click.echo(json.dumps(report.to_dict(), indent=2))
    else:
        click.echo(
            f"score={report.score:.1f} msl={report.msl:.2f} mlwf={report.mlwf:.4f} "
            f"({report.sentence_count} sentences, {report.token_count} tokens)"
        )


@main.command("calibrate")
@click.option(
    "--labeled",
    "labeled_path",
    required=True,
    type=click.Path(exists=True),
    help="JSONL with {text, score} rows.",
)
@click.option("--freq", "freq_path", type=click.Path(exists=True))
@click.option("--out", required=True, type=click.Path())
def calibrate_cmd(labeled_path, freq_path, out):
    """Fit scorer coefficients to labeled documents."""
    _, freq = _scorer(None, freq_path)
    labeled = []
    with open(labeled_path, encoding="utf-8") as handle:
        for line in handle:
            if line.strip():
                row = json.loads(line)
                labeled.append((row["text"], float(row["score"])))
    try:
        model = calibrate_model(labeled, freq, freq_table_ref=freq_path or "default_freq.tsv")
    except LevelTextError as exc:
        raise click.ClickException(str(exc))
    model.save(out)
    click.echo(
        f"alpha={model.alpha:.4f} beta={model.beta:.4f} gamma={model.gamma:.4f} "
        f"rmse={model.fit_rmse:.4f} r2={model.fit_r2:.4f} -> {out}"
    )


def _load_context(pairs_path, train_pairs_path, model_path, freq_path):
    model, freq = _scorer(model_path, freq_path)
    pool = load_pairs(pairs_path)
    train = load_pairs(train_pairs_path) if train_pairs_path else pool
    return RunContext(pairs=pool, train_pairs=train, model=model, freq=freq)


@main.group()
def bench():
    """Benchmark runs and reports."""


@bench.command("run")
@click.option("--spec", "spec_path", required=True, type=click.Path(exists=True))
@click.option(
    "--pairs",
    "pairs_path",
    required=True,
    type=click.Path(exists=True),
    help="Pair pool for the run's split (from `corpus pairs`).",
)
@click.option(
    "--train-pairs",
    "train_pairs_path",
    type=click.Path(exists=True),
    help="Exemplar pool for few-shot prompts; defaults to --pairs.",
)
@click.option("--model", "model_path", type=click.Path(exists=True))
@click.option("--freq", "freq_path", type=click.Path(exists=True))
@click.option("--workspace", default=".", show_default=True, type=click.Path())
def bench_run(spec_path, pairs_path, train_pairs_path, model_path, freq_path, workspace):
    """Execute a benchmark run described by a JSON spec."""
    spec = RunSpec.load(spec_path)
    ctx = _load_context(pairs_path, train_pairs_path, model_path, freq_path)
    try:
        result = run_benchmark(spec, ctx, workspace=workspace)
    except (LevelTextError, ValueError) as exc:
        raise click.ClickException(str(exc))
    click.echo(f"run {result.run_id}: {result.new_candidates} new candidates")
    click.echo(reports_to_csv(result.reports), nl=False)


@bench.command("report")
@click.option("--run", "run_id", required=True)
@click.option("--workspace", default=".", show_default=True, type=click.Path())
@click.option(
    "--format",
    "fmt",
    type=click.Choice(["csv", "json"]),
    default="csv",
    show_default=True,
)
def bench_report(run_id, workspace, fmt):
    """Print a finished run's report table."""
    try:
        result = load_run(workspace, run_id)
    except LevelTextError as exc:
        raise click.ClickException(str(exc))
    if fmt == "json":
        click.echo(reports_to_json(result.reports))
    else:
        click.echo(reports_to_csv(result.reports), nl=False)


@main.command("scatter")
@click.option("--run", "run_id", required=True)
@click.option("--workspace", default=".", show_default=True, type=click.Path())
@click.option("--svg", is_flag=True, help="Also write an SVG next to the CSV.")
@click.option("--provider", help="Pin a provider when the run has several.")
@click.option("--method", help="Pin a method when the run has several.")
def scatter_cmd(run_id, workspace, svg, provider, method):
    """Export intended-vs-resulting scatter data for a run."""
    try:
        result = load_run(workspace, run_id)
        out_csv = result.run_dir / "scatter.csv"
        out_svg = result.run_dir / "scatter.svg" if svg else None
        rows = export_scatter(
            result, out_csv, out_svg, provider=provider, method=method
        )
    except LevelTextError as exc:
        raise click.ClickException(str(exc))
    click.echo(f"{len(rows)} points -> {out_csv}" + (f" and {out_svg}" if svg else ""))


@main.command("serve")
@click.option("--port", default=8000, show_default=True, type=int)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option(
    "--pairs",
    "pairs_path",
    type=click.Path(exists=True),
    help="Pair pool to curate; defaults to pairs permuted from the seed corpus.",
)
@click.option("--train-pairs", "train_pairs_path", type=click.Path(exists=True))
@click.option("--model", "model_path", type=click.Path(exists=True))
@click.option("--freq", "freq_path", type=click.Path(exists=True))
@click.option(
    "--providers",
    "providers_path",
    type=click.Path(exists=True),
    help="JSON list of provider configs for /generate.",
)
@click.option("--workspace", default=".", show_default=True, type=click.Path())
@click.option(
    "--ui",
    "ui_dir",
    type=click.Path(exists=True, file_okay=False),
    help="Built UI assets to serve alongside the API (frontend/dist).",
)
def serve(port, host, pairs_path, train_pairs_path, model_path, freq_path, providers_path, workspace, ui_dir):
    """Run the curator HTTP API."""
    import uvicorn

    from leveltext.service import ServiceState, create_app

    model, freq = _scorer(model_path, freq_path)
    if pairs_path:
        pool = load_pairs(pairs_path)
    else:
        pool = permute_pairs(assets.seed_corpus())
    train = load_pairs(train_pairs_path) if train_pairs_path else pool
    providers = {}
    if providers_path:
        entries = json.loads(Path(providers_path).read_text(encoding="utf-8"))
        for entry in entries:
            providers[entry["name"]] = build_provider(entry, pairs=pool)
    workspace = Path(workspace)
    workspace.mkdir(parents=True, exist_ok=True)
    state = ServiceState(
        model=model,
        freq=freq,
        pairs={p.pair_id: p for p in pool},
        train_pairs=train,
        bank=ResponseBank(workspace / "bank"),
        workspace=workspace,
        providers=providers,
    )
    uvicorn.run(create_app(state, ui_dir=ui_dir), host=host, port=port)


if __name__ == "__main__":
    main()
