"""Transparency and CutMix augmentation, alpha sampling and plan construction."""

import logging

import numpy as np

from mammo_augment.errors import (
    DimensionMismatch,
    DuplicateId,
    LabelNotEligible,
    NoEligibleBackgrounds,
    NoEligibleSources,
    NoLesionBoxes,
)
from mammo_augment.masking import apply_mask, blend, build_mask
from mammo_augment.models import (
    AlphaRange,
    AnnotatedSample,
    AugmentPlan,
    AugmentRecord,
    BoundingBox,
    Image,
    LabelScheme,
    Lesion,
    Manifest,
    Split,
    Strategy,
)
from mammo_augment.seeding import derive_rng

logger = logging.getLogger(__name__)


def output_id(source_id: str, strategy: Strategy, replica_index: int) -> str:
    return f"{source_id}__{strategy.value}__{replica_index}"


def source_lesions(
    sample: AnnotatedSample, lesion_types: tuple[str, ...] | None = None
) -> tuple[Lesion, ...]:
    """Lesions that take part in the mask, optionally restricted to some lesion types."""
    return tuple(
        lesion
        for lesion in sample.lesions
        if lesion_types is None or lesion.lesion_type in lesion_types
    )


def source_boxes(
    sample: AnnotatedSample, lesion_types: tuple[str, ...] | None = None
) -> list[BoundingBox]:
    return [lesion.box for lesion in source_lesions(sample, lesion_types)]


def sample_alpha(rng: np.random.Generator, alpha_range: AlphaRange) -> float:
    return float(rng.uniform(alpha_range.low, alpha_range.high))


def transparency(
    sample: AnnotatedSample,
    image: Image,
    alpha: float,
    lesion_types: tuple[str, ...] | None = None,
) -> tuple[Image, str]:
    """
    Keep the lesion-box union untouched and scale every other pixel by ``alpha``.
    The label is carried over unchanged.
    """
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha must lie in [0, 1], got {alpha}")
    boxes = source_boxes(sample, lesion_types)
    if not boxes:
        raise NoLesionBoxes(sample.sample_id)
    mask = build_mask(image.width, image.height, boxes, alpha)
    return apply_mask(image, mask), sample.label


def cutmix(
    source: tuple[AnnotatedSample, Image],
    background: tuple[AnnotatedSample, Image],
    scheme: LabelScheme,
    lesion_types: tuple[str, ...] | None = None,
) -> tuple[Image, str]:
    """Paste the source's lesion boxes onto the background; the result keeps the source label."""
    src_sample, src_image = source
    bg_sample, bg_image = background
    if src_sample.label not in scheme.high_risk:
        raise LabelNotEligible("source", src_sample.sample_id, src_sample.label)
    if bg_sample.label not in scheme.low_risk:
        raise LabelNotEligible("background", bg_sample.sample_id, bg_sample.label)
    boxes = source_boxes(src_sample, lesion_types)
    if not boxes:
        raise NoLesionBoxes(src_sample.sample_id)
    if src_image.size != bg_image.size:
        raise DimensionMismatch(src_image.size, bg_image.size)
    mask = build_mask(src_image.width, src_image.height, boxes, 0.0)
    return blend(src_image, bg_image, mask), src_sample.label


def eligible_sources(
    manifest: Manifest, lesion_types: tuple[str, ...] | None = None
) -> list[AnnotatedSample]:
    return [
        s
        for s in manifest.in_split(Split.TRAIN)
        if s.label in manifest.scheme.high_risk and source_boxes(s, lesion_types)
    ]


def eligible_backgrounds(manifest: Manifest) -> list[AnnotatedSample]:
    # sorted so the pick depends on ids, not on manifest row order
    return sorted(
        (s for s in manifest.in_split(Split.TRAIN) if s.label in manifest.scheme.low_risk),
        key=lambda s: s.sample_id,
    )


def build_plan(
    manifest: Manifest,
    strategy: Strategy,
    per_sample_count: int,
    seed: int,
    alpha_range: AlphaRange | None = None,
    lesion_types: tuple[str, ...] | None = None,
) -> AugmentPlan:
    alpha_range = alpha_range or AlphaRange()
    plan_fields = {
        "seed": seed,
        "per_sample_count": per_sample_count,
        "strategy": strategy,
        "alpha_range": alpha_range,
        "lesion_types": lesion_types,
    }
    if per_sample_count == 0:
        return AugmentPlan(**plan_fields)

    sources = eligible_sources(manifest, lesion_types)
    if not sources:
        raise NoEligibleSources()
    backgrounds: list[AnnotatedSample] = []
    if strategy == Strategy.CUTMIX:
        backgrounds = eligible_backgrounds(manifest)
        if not backgrounds:
            raise NoEligibleBackgrounds()

    taken = {s.sample_id for s in manifest.samples}
    records = []
    for source in sources:
        for replica in range(per_sample_count):
            out_id = output_id(source.sample_id, strategy, replica)
            if out_id in taken:
                raise DuplicateId(out_id)
            taken.add(out_id)
            rng = derive_rng(seed, source.sample_id, replica)
            if strategy == Strategy.TRANSPARENCY:
                records.append(
                    AugmentRecord(
                        source_id=source.sample_id,
                        replica_index=replica,
                        alpha=sample_alpha(rng, alpha_range),
                        output_id=out_id,
                    )
                )
            else:
                pick = backgrounds[int(rng.integers(len(backgrounds)))]
                records.append(
                    AugmentRecord(
                        source_id=source.sample_id,
                        replica_index=replica,
                        background_id=pick.sample_id,
                        output_id=out_id,
                    )
                )

    logger.info(
        "planned %d %s records from %d sources", len(records), strategy.value, len(sources)
    )
    return AugmentPlan(**plan_fields, records=tuple(records))
