"""Command dispatch: one resolved ``RunConfig`` in, artifacts on disk and a result table out."""

import json
import logging
from collections.abc import Callable
from pathlib import Path
from typing import Any

from pydantic import BaseModel, Field, ValidationError

from mammo_augment import adapters
from mammo_augment.errors import (
    EXIT_OK,
    EXIT_VALIDATION,
    DataError,
    IoError,
    UnknownLabel,
    UsageError,
)
from mammo_augment.formatting import render_csv, render_text
from mammo_augment.metrics import confusion_rows, f1_report
from mammo_augment.models import (
    AugmentPlan,
    Command,
    LabelScheme,
    Manifest,
    ReportKind,
    RunConfig,
)
from mammo_augment.services import (
    AugmentService,
    EvaluationService,
    PreprocessService,
    ValidationService,
    rebase,
)
from mammo_augment.split import lesion_report, split_report, stratified_split

logger = logging.getLogger(__name__)

RUN_FILE = "run.json"
VIOLATIONS_FILE = "violations.csv"
SPLIT_MANIFEST = "manifest.split.csv"

# commands that read pixels from the image root
_IMAGE_COMMANDS = {Command.VALIDATE, Command.PREPROCESS, Command.AUGMENT}


class RunResult(BaseModel):
    exit_code: int = EXIT_OK
    title: str
    rows: list[dict[str, Any]] = Field(default_factory=list)
    footer_rows: int = 0
    artifacts: list[Path] = Field(default_factory=list)


def dump_run_config(config: RunConfig) -> str:
    return json.dumps(config.model_dump(mode="json"), sort_keys=True, indent=2) + "\n"


def load_run_config(path: Path) -> RunConfig:
    """Read a ``run.json`` written by an earlier run."""
    try:
        return RunConfig.model_validate_json(adapters.read_text(path))
    except ValidationError as exc:
        raise UsageError(f"{path}: not a valid run config: {exc.errors()[0]['msg']}") from exc


def _display_rows(
    rows: list[dict[str, Any]], column: str | None, scheme: LabelScheme
) -> list[dict[str, Any]]:
    if column is None:
        return rows
    return [
        {**row, column: scheme.display_name(row[column])} if row[column] in scheme.classes else row
        for row in rows
    ]


def _write_report(
    out_root: Path,
    stem: str,
    rows: list[dict[str, Any]],
    title: str,
    footer_rows: int = 0,
    label_column: str | None = None,
    scheme: LabelScheme | None = None,
) -> list[Path]:
    """CSV keeps raw labels; the text table shows display names in ``label_column``."""
    csv_path = out_root / f"{stem}.csv"
    txt_path = out_root / f"{stem}.txt"
    adapters.write_text(csv_path, render_csv(rows))
    shown = _display_rows(rows, label_column, scheme) if scheme else rows
    adapters.write_text(txt_path, render_text(shown, title=title, footer_rows=footer_rows))
    return [csv_path, txt_path]


def _validate(config: RunConfig, manifest: Manifest) -> RunResult:
    violations = ValidationService(config.image_root).validate_manifest(manifest)
    rows = [
        {
            "sample_id": v.sample_id,
            "kind": v.kind.value,
            "lesion_index": "" if v.lesion_index is None else v.lesion_index,
            "detail": v.detail,
        }
        for v in violations
    ]
    path = config.out_root / VIOLATIONS_FILE
    adapters.write_csv(
        path,
        ["sample_id", "kind", "lesion_index", "detail"],
        [[str(r[k]) for k in r] for r in rows],
    )
    return RunResult(
        exit_code=EXIT_VALIDATION if violations else EXIT_OK,
        title=f"Violations ({len(violations)})",
        rows=rows,
        artifacts=[path],
    )


def _preprocess(config: RunConfig, manifest: Manifest) -> RunResult:
    crop_boxes = adapters.read_crop_boxes(config.crop_boxes) if config.crop_boxes else None
    service = PreprocessService(config.image_root, config.out_root, config.workers)
    out = service.run(
        manifest, config.target_width, config.target_height, config.threshold, crop_boxes
    )
    return RunResult(
        title=f"Preprocessed {len(out.samples)} samples",
        rows=split_report(out),
        footer_rows=1,
        artifacts=[config.out_root / PreprocessService.MANIFEST_NAME],
    )


def _split(config: RunConfig, manifest: Manifest) -> RunResult:
    out = stratified_split(manifest, config.split_spec(), force=config.force)
    path = config.out_root / SPLIT_MANIFEST
    adapters.serialize_manifest(rebase(out, config.image_root, config.out_root), path)
    return RunResult(title="Split", rows=split_report(out), footer_rows=1, artifacts=[path])


def _with_risk_overrides(config: RunConfig, manifest: Manifest) -> Manifest:
    high, low = config.risk_overrides()
    if high is None and low is None:
        return manifest
    try:
        scheme = manifest.scheme.with_risk_sets(high, low)
    except (UnknownLabel, ValidationError) as exc:
        raise UsageError(f"invalid risk sets: {exc}") from exc
    return manifest.model_copy(update={"scheme": scheme})


def _load_plan(path: Path) -> AugmentPlan:
    try:
        return AugmentPlan.model_validate_json(adapters.read_text(path))
    except ValidationError as exc:
        raise DataError(f"{path}: not a valid plan: {exc.errors()[0]['msg']}") from exc


def _augment(config: RunConfig, manifest: Manifest) -> RunResult:
    manifest = _with_risk_overrides(config, manifest)
    service = AugmentService(config.image_root, config.out_root, config.workers)
    if config.plan:
        plan = _load_plan(config.plan)
        logger.info("executing %d records from %s", len(plan.records), config.plan)
    else:
        plan = service.build_plan(
            manifest,
            config.strategy,
            config.count,
            config.seed,
            config.alpha_range(),
            config.lesion_type_filter(),
        )
    out = service.execute_plan(plan, manifest)
    return RunResult(
        title=f"Augmented {len(plan.records)} samples ({plan.strategy.value})",
        rows=split_report(out),
        footer_rows=1,
        artifacts=[
            config.out_root / AugmentService.MANIFEST_NAME,
            config.out_root / AugmentService.PLAN_NAME,
        ],
    )


def _evaluate(config: RunConfig, manifest: Manifest) -> RunResult:
    if config.predictions is None:
        raise UsageError("evaluate needs --predictions")
    cm = EvaluationService(manifest).confusion(config.predictions, config.eval_split)
    rows = f1_report(cm)
    artifacts = _write_report(
        config.out_root,
        "f1_report",
        rows,
        "F1 report",
        footer_rows=1,
        label_column="class",
        scheme=manifest.scheme,
    )
    confusion_path = config.out_root / "confusion.csv"
    adapters.write_text(confusion_path, render_csv(confusion_rows(cm)))
    scope = config.eval_split.value if config.eval_split else "all"
    logger.info("scored %d predictions (%s)", cm.total, scope)
    return RunResult(
        title=f"F1 report ({scope}, n={cm.total})",
        rows=rows,
        footer_rows=1,
        artifacts=[*artifacts, confusion_path],
    )


def _report(config: RunConfig, manifest: Manifest) -> RunResult:
    if config.report_by == ReportKind.LESIONS:
        rows, footer, stem, title = lesion_report(manifest), 2, "lesion_report", "Lesions"
        column = None
    else:
        rows, footer, stem, title = split_report(manifest), 1, "split_report", "Split"
        column = "label"
    artifacts = _write_report(
        config.out_root,
        stem,
        rows,
        title,
        footer_rows=footer,
        label_column=column,
        scheme=manifest.scheme,
    )
    return RunResult(title=title, rows=rows, footer_rows=footer, artifacts=artifacts)


_HANDLERS: dict[Command, Callable[[RunConfig, Manifest], RunResult]] = {
    Command.VALIDATE: _validate,
    Command.PREPROCESS: _preprocess,
    Command.SPLIT: _split,
    Command.AUGMENT: _augment,
    Command.EVALUATE: _evaluate,
    Command.REPORT: _report,
}


def run(config: RunConfig) -> RunResult:
    """
    Execute one command. ``run.json`` is written to ``out_root`` before any
    other artifact so a failed run can be replayed as well.
    """
    if config.command in _IMAGE_COMMANDS and not config.image_root.is_dir():
        raise IoError(f"image root is not a directory: {config.image_root}")
    manifest = adapters.parse_manifest(config.manifest)
    adapters.write_json(config.out_root / RUN_FILE, dump_run_config(config))
    logger.info(
        "%s: %d samples from %s", config.command.value, len(manifest.samples), config.manifest
    )

    result = _HANDLERS[config.command](config, manifest)
    result.artifacts.insert(0, config.out_root / RUN_FILE)
    return result
