from pathlib import Path

import agentyper as typer

from mammo_augment.commands.common import configure, execute, fail
from mammo_augment.errors import MammoError
from mammo_augment.models import Command
from mammo_augment.pipeline import load_run_config


def validate(
    manifest: Path = typer.Argument(..., help="Path to the manifest CSV"),
    image_root: Path | None = typer.Option(
        None, "--image-root", "-i", help="Directory image paths are relative to"
    ),
    out: Path | None = typer.Option(None, "--out", "-o", help="Output directory"),
    verbose: bool = typer.Option(
        False, "--verbose", "-v", help="Verbosity level (-v for INFO, -vv for DEBUG)"
    ),
):
    """Check the manifest against the images on disk; exits 1 when violations are found."""
    config = configure(Command.VALIDATE, manifest, image_root=image_root, out=out)
    execute(config, verbose)


def replay(
    run_file: Path = typer.Argument(..., help="run.json written by an earlier command"),
    verbose: bool = typer.Option(
        False, "--verbose", "-v", help="Verbosity level (-v for INFO, -vv for DEBUG)"
    ),
):
    """Re-execute a recorded run with exactly the same configuration."""
    try:
        config = load_run_config(run_file)
    except MammoError as exc:
        fail(exc)
    execute(config, verbose)
