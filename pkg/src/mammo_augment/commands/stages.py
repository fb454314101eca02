from pathlib import Path

import agentyper as typer

from mammo_augment.commands.common import (
    configure,
    execute,
    fail,
    parse_list,
    parse_size,
)
from mammo_augment.errors import MammoError
from mammo_augment.models import Command


def preprocess(
    manifest: Path = typer.Argument(..., help="Path to the manifest CSV"),
    image_root: Path | None = typer.Option(
        None, "--image-root", "-i", help="Directory image paths are relative to"
    ),
    out: Path | None = typer.Option(None, "--out", "-o", help="Output directory"),
    size: str = typer.Option("1024x768", "--size", help="Target size as WIDTHxHEIGHT"),
    threshold: float | None = typer.Option(
        None, "--threshold", "-t", help="Foreground threshold as a fraction of max intensity"
    ),
    crop_boxes: Path | None = typer.Option(
        None, "--crop-boxes", help="CSV of per-sample crop regions to use instead of detection"
    ),
    workers: int | None = typer.Option(None, "--workers", "-w", help="Worker threads"),
    verbose: bool = typer.Option(
        False, "--verbose", "-v", help="Verbosity level (-v for INFO, -vv for DEBUG)"
    ),
):
    """Crop every image to the breast, mirror right breasts and resize to a common frame."""
    try:
        width, height = parse_size(size)
    except MammoError as exc:
        fail(exc)
    config = configure(
        Command.PREPROCESS,
        manifest,
        image_root=image_root,
        out=out,
        workers=workers,
        target_width=width,
        target_height=height,
        threshold=threshold,
        crop_boxes=crop_boxes,
    )
    execute(config, verbose)


def split(
    manifest: Path = typer.Argument(..., help="Path to the manifest CSV"),
    out: Path | None = typer.Option(None, "--out", "-o", help="Output directory"),
    ratios: str = typer.Option("0.8,0,0.2", "--ratios", "-r", help="train,val,test ratios"),
    seed: int | None = typer.Option(None, "--seed", help="Random seed (default: MAMMO_SEED or 0)"),
    force: bool = typer.Option(False, "--force", help="Reassign samples that already have a split"),
    verbose: bool = typer.Option(
        False, "--verbose", "-v", help="Verbosity level (-v for INFO, -vv for DEBUG)"
    ),
):
    """Assign train/val/test per label so every class keeps the requested proportions."""
    try:
        train, val, test = parse_list(ratios, "--ratios", 3)
    except MammoError as exc:
        fail(exc)
    config = configure(
        Command.SPLIT,
        manifest,
        out=out,
        seed=seed,
        train_ratio=train,
        val_ratio=val,
        test_ratio=test,
        force=force,
    )
    execute(config, verbose)


def augment(
    manifest: Path = typer.Argument(..., help="Path to the split manifest CSV"),
    image_root: Path | None = typer.Option(
        None, "--image-root", "-i", help="Directory image paths are relative to"
    ),
    out: Path | None = typer.Option(None, "--out", "-o", help="Output directory"),
    strategy: str = typer.Option(
        "transparency", "--strategy", "-s", help="Augmentation: 'transparency' or 'cutmix'"
    ),
    count: int = typer.Option(0, "--count", "-n", help="Augmented copies per eligible sample"),
    alpha: str = typer.Option("0.1,0.9", "--alpha", help="Transparency alpha range low,high"),
    seed: int | None = typer.Option(None, "--seed", help="Random seed (default: MAMMO_SEED or 0)"),
    high_risk: str | None = typer.Option(
        None, "--high-risk", help="Comma-separated labels eligible as sources"
    ),
    low_risk: str | None = typer.Option(
        None, "--low-risk", help="Comma-separated labels eligible as CutMix backgrounds"
    ),
    lesion_types: str | None = typer.Option(
        None, "--lesion-types", help="Only lesions of these comma-separated types form the mask"
    ),
    plan: Path | None = typer.Option(
        None, "--plan", help="Execute a previously written plan.json instead of building one"
    ),
    workers: int | None = typer.Option(None, "--workers", "-w", help="Worker threads"),
    verbose: bool = typer.Option(
        False, "--verbose", "-v", help="Verbosity level (-v for INFO, -vv for DEBUG)"
    ),
):
    """Add lesion-preserving augmented copies of high-risk training samples."""
    try:
        alpha_low, alpha_high = parse_list(alpha, "--alpha", 2)
    except MammoError as exc:
        fail(exc)
    config = configure(
        Command.AUGMENT,
        manifest,
        image_root=image_root,
        out=out,
        seed=seed,
        workers=workers,
        strategy=strategy,
        count=count,
        alpha_low=alpha_low,
        alpha_high=alpha_high,
        high_risk=high_risk,
        low_risk=low_risk,
        lesion_types=lesion_types,
        plan=plan,
    )
    execute(config, verbose)
