import logging
import os
from collections.abc import Callable, Sequence
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import TypeVar

from mammo_augment import adapters
from mammo_augment.augment import build_plan, cutmix, source_lesions, transparency
from mammo_augment.errors import MammoError, RecordFailed, UnknownSample, UnsupportedImage
from mammo_augment.metrics import confusion
from mammo_augment.models import (
    AlphaRange,
    AnnotatedSample,
    AugmentPlan,
    AugmentRecord,
    BoundingBox,
    ConfusionMatrix,
    Laterality,
    LabelScheme,
    Lesion,
    Manifest,
    Split,
    Strategy,
    Violation,
    ViolationKind,
)
from mammo_augment.preprocess import (
    DEFAULT_THRESHOLD,
    crop,
    detect_foreground,
    flip_horizontal,
    laterality,
    resize,
)

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


def map_ordered(fn: Callable[[int, T], R], items: Sequence[T], workers: int = 1) -> list[R]:
    """
    Apply ``fn(index, item)`` to every item, results in input order. The worker
    count only changes wall-clock time; the first failing index is re-raised.
    """
    if workers <= 1 or len(items) <= 1:
        return [fn(i, item) for i, item in enumerate(items)]
    with ThreadPoolExecutor(max_workers=min(workers, len(items))) as executor:
        futures = [executor.submit(fn, i, item) for i, item in enumerate(items)]
        return [f.result() for f in futures]


def rebase(manifest: Manifest, image_root: Path, out_dir: Path) -> Manifest:
    """Rewrite image paths so they are relative to ``out_dir`` instead of ``image_root``."""
    src = image_root.resolve()
    dst = out_dir.resolve()
    if src == dst:
        return manifest
    samples = tuple(
        s.model_copy(
            update={"image_path": Path(os.path.relpath(src / s.image_path, dst)).as_posix()}
        )
        for s in manifest.samples
    )
    return manifest.model_copy(update={"samples": samples})


class ValidationService:
    def __init__(self, image_root: Path):
        self.image_root = image_root

    def validate_manifest(self, manifest: Manifest) -> list[Violation]:
        """Every inconsistency between the manifest and the files on disk; empty means clean."""
        violations: list[Violation] = []
        for sample in manifest.samples:
            path = self.image_root / sample.image_path
            size: tuple[int, int] | None = None
            if not path.is_file():
                violations.append(
                    Violation(
                        sample_id=sample.sample_id,
                        kind=ViolationKind.MISSING_FILE,
                        detail=f"{sample.image_path} not found",
                    )
                )
            else:
                try:
                    width, height, _ = adapters.probe_image(path)
                    size = (width, height)
                except UnsupportedImage as exc:
                    violations.append(
                        Violation(
                            sample_id=sample.sample_id,
                            kind=ViolationKind.UNSUPPORTED_IMAGE,
                            detail=str(exc),
                        )
                    )

            for index, lesion in enumerate(sample.lesions):
                box = lesion.box
                if box.is_inverted:
                    violations.append(
                        Violation(
                            sample_id=sample.sample_id,
                            kind=ViolationKind.INVERTED_BOX,
                            detail=f"box {box} has min > max",
                            lesion_index=index,
                        )
                    )
                elif size is not None and not box.within(*size):
                    violations.append(
                        Violation(
                            sample_id=sample.sample_id,
                            kind=ViolationKind.OUT_OF_BOUNDS,
                            detail=f"box {box} outside {size[0]}x{size[1]} image",
                            lesion_index=index,
                        )
                    )
        logger.info("validated %d samples: %d violations", len(manifest.samples), len(violations))
        return violations


class PreprocessService:
    """Crop to the breast region, flip right breasts, resize to a common frame."""

    MANIFEST_NAME = "manifest.preprocessed.csv"
    IMAGE_DIR = "images"

    def __init__(self, image_root: Path, out_root: Path, workers: int = 1):
        self.image_root = image_root
        self.out_root = out_root
        self.workers = workers

    def preprocess_sample(
        self,
        sample: AnnotatedSample,
        target_w: int,
        target_h: int,
        threshold: float = DEFAULT_THRESHOLD,
        region: BoundingBox | None = None,
    ) -> tuple[AnnotatedSample, BoundingBox, Laterality]:
        image = adapters.load_image(self.image_root / sample.image_path)
        if region is None:
            region = detect_foreground(image, threshold)
        side = laterality(image)

        result = crop(image, region, sample.boxes)
        pixels, boxes = result.cropped, list(result.transformed_lesions)
        if side == Laterality.RIGHT:
            pixels, boxes = flip_horizontal(pixels, boxes)
        pixels, boxes = resize(pixels, boxes, target_w, target_h)

        rel_path = f"{self.IMAGE_DIR}/{sample.sample_id}.png"
        adapters.save_image(pixels, self.out_root / rel_path)
        logger.debug("%s: crop %s, %s, saved %s", sample.sample_id, region, side.value, rel_path)

        lesions = tuple(
            Lesion(box=box, lesion_type=old.lesion_type)
            for box, old in zip(boxes, sample.lesions, strict=True)
        )
        return (
            sample.model_copy(update={"image_path": rel_path, "lesions": lesions}),
            region,
            side,
        )

    def run(
        self,
        manifest: Manifest,
        target_w: int,
        target_h: int,
        threshold: float = DEFAULT_THRESHOLD,
        crop_boxes: dict[str, BoundingBox] | None = None,
    ) -> Manifest:
        crop_boxes = crop_boxes or {}
        unknown = sorted(set(crop_boxes) - {s.sample_id for s in manifest.samples})
        if unknown:
            raise UnknownSample(unknown[0])

        def work(index: int, sample: AnnotatedSample):
            try:
                return self.preprocess_sample(
                    sample, target_w, target_h, threshold, crop_boxes.get(sample.sample_id)
                )
            except MammoError as exc:
                item = f"sample {sample.sample_id!r} (index {index})"
                raise RecordFailed(index, exc, item=item) from exc

        results = map_ordered(work, manifest.samples, self.workers)
        out = manifest.model_copy(update={"samples": tuple(r[0] for r in results)})

        adapters.serialize_manifest(out, self.out_root / self.MANIFEST_NAME)
        adapters.write_crop_boxes(
            self.out_root / "crop_boxes.csv",
            [(s.sample_id, r[1]) for s, r in zip(manifest.samples, results, strict=True)],
        )
        adapters.write_csv(
            self.out_root / "laterality.csv",
            ["sample_id", "laterality"],
            [[s.sample_id, r[2].value] for s, r in zip(manifest.samples, results, strict=True)],
        )
        logger.info("preprocessed %d samples into %s", len(results), self.out_root)
        return out


class AugmentService:
    MANIFEST_NAME = "manifest.augmented.csv"
    PLAN_NAME = "plan.json"

    def __init__(self, image_root: Path, out_root: Path, workers: int = 1):
        self.image_root = image_root
        self.out_root = out_root
        self.workers = workers

    def build_plan(
        self,
        manifest: Manifest,
        strategy: Strategy,
        per_sample_count: int,
        seed: int,
        alpha_range: AlphaRange | None = None,
        lesion_types: tuple[str, ...] | None = None,
    ) -> AugmentPlan:
        return build_plan(manifest, strategy, per_sample_count, seed, alpha_range, lesion_types)

    def _render(
        self,
        record: AugmentRecord,
        plan: AugmentPlan,
        samples: dict[str, AnnotatedSample],
        scheme: LabelScheme,
    ) -> AnnotatedSample:
        source = samples[record.source_id]
        image = adapters.load_image(self.image_root / source.image_path)
        if plan.strategy == Strategy.TRANSPARENCY:
            assert record.alpha is not None  # nosec B101
            out, label = transparency(source, image, record.alpha, plan.lesion_types)
        else:
            assert record.background_id is not None  # nosec B101
            background = samples[record.background_id]
            bg_image = adapters.load_image(self.image_root / background.image_path)
            out, label = cutmix((source, image), (background, bg_image), scheme, plan.lesion_types)

        file_name = f"{record.output_id}.png"
        adapters.save_image(out, self.out_root / file_name)
        return AnnotatedSample(
            sample_id=record.output_id,
            image_path=file_name,
            label=label,
            lesions=source_lesions(source, plan.lesion_types),
            split=Split.TRAIN,
        )

    def execute_plan(self, plan: AugmentPlan, manifest: Manifest) -> Manifest:
        """
        Render every record to ``<output_id>.png`` under ``out_root`` and return the
        input samples followed by the augmented ones. Paths in the returned manifest
        are relative to ``out_root``, where it is also written.
        """
        known = manifest.by_id()
        for record in plan.records:
            for ref in (record.source_id, record.background_id):
                if ref is not None and ref not in known:
                    raise UnknownSample(ref)

        def work(index: int, record: AugmentRecord) -> AnnotatedSample:
            try:
                return self._render(record, plan, known, manifest.scheme)
            except MammoError as exc:
                raise RecordFailed(index, exc) from exc

        augmented = map_ordered(work, plan.records, self.workers)
        self.out_root.mkdir(parents=True, exist_ok=True)
        base = rebase(manifest, self.image_root, self.out_root)
        out = Manifest(scheme=manifest.scheme, samples=(*base.samples, *augmented))

        adapters.serialize_manifest(out, self.out_root / self.MANIFEST_NAME)
        adapters.write_json(self.out_root / self.PLAN_NAME, plan.model_dump_json(indent=2))
        logger.info("wrote %d augmented samples to %s", len(augmented), self.out_root)
        return out


class EvaluationService:
    def __init__(self, manifest: Manifest):
        self.manifest = manifest

    def truth(self, split: Split | None = None) -> Manifest:
        if split is None:
            return self.manifest
        return self.manifest.model_copy(update={"samples": tuple(self.manifest.in_split(split))})

    def confusion(self, predictions: Path, split: Split | None = None) -> ConfusionMatrix:
        """Score ``split`` only; predictions for samples outside it are ignored."""
        truth = self.truth(split)
        outside = set(self.manifest.by_id()) - set(truth.by_id())
        return confusion(truth, adapters.read_predictions(predictions), skip=outside)
