"""Command-line interface.

Exit codes: 0 success, 1 usage error, 2 data error, 3 provider failure (partial
output is still written).
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from . import corpus, perturb, pipeline, providers, review

_FORMAT_BY_SUFFIX = {".json": "mawps_json", ".xml": "asdiv_xmlish", ".jsonl": "canonical_jsonl"}


class DataError(click.ClickException):
    exit_code = 2


def _infer_format(path: str, explicit: str | None) -> str:
    if explicit:
        return explicit
    fmt = _FORMAT_BY_SUFFIX.get(Path(path).suffix.lower())
    if fmt is None:
        raise click.UsageError(
            f"cannot infer format from {path!r}; pass --format explicitly"
        )
    return fmt


def _load(path: str, fmt: str | None) -> corpus.LoadResult:
    try:
        return corpus.load_corpus(path, _infer_format(path, fmt))
    except corpus.CorpusFormatError as exc:
        raise DataError(str(exc))


format_option = click.option(
    "--format",
    "fmt",
    type=click.Choice(["mawps_json", "asdiv_xmlish", "canonical_jsonl"]),
    default=None,
    help="Input format (inferred from the file suffix when omitted).",
)


@click.group()
def cli():
    """Math word problem augmentation toolkit."""


@cli.command()
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
@click.option("--in", "in_path", required=True, type=click.Path(exists=True))
@click.option("--out", "out_path", required=True, type=click.Path())
@click.option("--report", "report_path", type=click.Path(), default=None)
@click.option("--stats", "stats_path", type=click.Path(), default=None)
@format_option
def augment(config_path, in_path, out_path, report_path, stats_path, fmt):
    """Run the two-stage augmentation pipeline over a corpus file."""
    cfg = pipeline.load_config(config_path) if config_path else pipeline.PipelineConfig()
    loaded = _load(in_path, fmt)
    for rec_id, reason in loaded.rejects:
        click.echo(f"reject {rec_id}: {reason}", err=True)
    provider_set = providers.providers_from_env()
    result = pipeline.augment_dataset(loaded.problems, cfg, provider_set)
    corpus.save_jsonl(result.problems, out_path)
    if report_path:
        pipeline.write_selection_report(result.decisions, report_path)
    if stats_path:
        Path(stats_path).write_text(json.dumps(result.stats, indent=2, sort_keys=True) + "\n")
    click.echo(json.dumps(result.stats, indent=2, sort_keys=True))
    if result.provider_failed:
        sys.exit(3)


@cli.command()
@click.option("--in", "in_path", required=True, type=click.Path(exists=True))
@format_option
def stats(in_path, fmt):
    """Problem count and vocabulary size of a corpus file."""
    loaded = _load(in_path, fmt)
    s = corpus.corpus_stats(loaded.problems)
    click.echo(
        json.dumps(
            {
                "problem_count": s.problem_count,
                "vocabulary_size": s.vocabulary_size,
                "rejects": len(loaded.rejects),
            },
            indent=2,
            sort_keys=True,
        )
    )


@cli.command()
@click.option("--in", "in_path", required=True, type=click.Path(exists=True))
@click.option("--k", default=5, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--out", "out_path", type=click.Path(), default=None)
@format_option
def split(in_path, k, seed, out_path, fmt):
    """Cross-validation folds; augmented problems stay with their parents."""
    loaded = _load(in_path, fmt)
    try:
        folds = corpus.kfold_split(loaded.problems, k, seed)
    except ValueError as exc:
        raise DataError(str(exc))
    payload = json.dumps(
        {"k": k, "seed": seed, "folds": [{"train": tr, "test": te} for tr, te in folds]},
        indent=2,
        sort_keys=True,
    )
    if out_path:
        Path(out_path).write_text(payload + "\n")
    else:
        click.echo(payload)


@cli.command("perturb")
@click.option("--kind", required=True, type=click.Choice(perturb.KINDS))
@click.option("--rate", default=0.10, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--in", "in_path", required=True, type=click.Path(exists=True))
@click.option("--out", "out_path", required=True, type=click.Path())
@click.option("--manifest", "manifest_path", type=click.Path(), default=None)
@format_option
def perturb_cmd(kind, rate, seed, in_path, out_path, manifest_path, fmt):
    """Generate a perturbed test set (solver robustness probe)."""
    loaded = _load(in_path, fmt)
    try:
        spec = perturb.PerturbationSpec(kind=kind, rate=rate, seed=seed)
    except ValueError as exc:
        raise click.UsageError(str(exc))
    perturbed, manifest = perturb.perturb_corpus(loaded.problems, spec)
    corpus.save_jsonl(perturbed, out_path)
    payload = {
        "kind": manifest.kind,
        "rate": manifest.rate,
        "seed": manifest.seed,
        "input_count": manifest.input_count,
        "output_count": manifest.output_count,
        "skips": [{"id": pid, "reason": reason} for pid, reason in manifest.skips],
    }
    if manifest_path:
        Path(manifest_path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    click.echo(json.dumps(payload, indent=2, sort_keys=True))


@cli.command("eval-export")
@click.option("--in", "in_path", required=True, type=click.Path(exists=True))
@click.option("--fraction", default=0.4, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--out", "out_path", required=True, type=click.Path())
@format_option
def eval_export(in_path, fraction, seed, out_path, fmt):
    """Export a blind evaluation batch of (original, augmented) pairs."""
    loaded = _load(in_path, fmt)
    try:
        batch = pipeline.export_eval_batch(loaded.problems, fraction, seed)
    except ValueError as exc:
        raise click.UsageError(str(exc))
    pipeline.save_eval_batch(batch, out_path)
    click.echo(json.dumps({"pairs": len(batch), "out": str(out_path)}))


@cli.command("eval-summarize")
@click.option("--ratings", "ratings_path", required=True, type=click.Path(exists=True))
@click.option("--batch", "batch_path", type=click.Path(exists=True), default=None)
def eval_summarize(ratings_path, batch_path):
    """Summarize rating records (per method family when --batch is given)."""
    try:
        records = pipeline.load_ratings(ratings_path)
    except (ValueError, KeyError) as exc:
        raise DataError(f"bad ratings file: {exc}")
    family_of = None
    if batch_path:
        family_of = {
            rec["blind_id"]: rec.get("method_family", "all")
            for rec in pipeline.load_eval_batch(batch_path)
        }
    click.echo(json.dumps(pipeline.summarize_ratings(records, family_of), indent=2, sort_keys=True))


@cli.command("review")
@click.option("--batch", "batch_path", required=True, type=click.Path(exists=True))
@click.option("--ratings", "ratings_path", required=True, type=click.Path())
@click.option("--port", default=review.DEFAULT_PORT, show_default=True)
@click.option("--static", "static_dir", type=click.Path(), default=None)
def review_cmd(batch_path, ratings_path, port, static_dir):
    """Serve the human-evaluation API and UI."""
    review.serve(batch_path, ratings_path, port=port, static_dir=static_dir)


def main() -> None:
    try:
        cli.main(standalone_mode=False)
    except click.UsageError as exc:
        click.echo(f"usage error: {exc.format_message()}", err=True)
        sys.exit(1)
    except DataError as exc:
        click.echo(f"data error: {exc.format_message()}", err=True)
        sys.exit(2)
    except click.ClickException as exc:
        exc.show()
        sys.exit(exc.exit_code)
    except providers.ProviderError as exc:
        click.echo(f"provider failure: {exc}", err=True)
        sys.exit(3)
    except click.exceptions.Abort:
        sys.exit(1)


if __name__ == "__main__":
    main()
