from pathlib import Path

import agentyper as typer

from mammo_augment.commands.common import configure, execute
from mammo_augment.models import Command


def report(
    manifest: Path = typer.Argument(..., help="Path to the manifest CSV"),
    out: Path | None = typer.Option(None, "--out", "-o", help="Output directory"),
    by: str = typer.Option("split", "--by", help="'split' for class counts, 'lesions' for types"),
    verbose: bool = typer.Option(
        False, "--verbose", "-v", help="Verbosity level (-v for INFO, -vv for DEBUG)"
    ),
):
    """Per-class sample counts in each split, or lesion-type counts per split and class."""
    config = configure(Command.REPORT, manifest, out=out, report_by=by)
    execute(config, verbose)


def evaluate(
    manifest: Path = typer.Argument(..., help="Manifest holding the true labels"),
    predictions: Path = typer.Option(
        ..., "--predictions", "-p", help="CSV with sample_id,predicted_label"
    ),
    out: Path | None = typer.Option(None, "--out", "-o", help="Output directory"),
    split: str | None = typer.Option(None, "--split", help="Score only samples in this split"),
    verbose: bool = typer.Option(
        False, "--verbose", "-v", help="Verbosity level (-v for INFO, -vv for DEBUG)"
    ),
):
    """Per-class precision, recall and F1 plus the macro F1 of a predictions file."""
    config = configure(
        Command.EVALUATE, manifest, out=out, predictions=predictions, eval_split=split
    )
    execute(config, verbose)
