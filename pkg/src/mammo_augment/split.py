"""Label-stratified train/val/test assignment and dataset count tables."""

import logging
import math

from mammo_augment.errors import AlreadyAssigned, EmptyManifest
from mammo_augment.models import Manifest, Split, SplitSpec
from mammo_augment.seeding import derive_rng

logger = logging.getLogger(__name__)

ASSIGNED_SPLITS = (Split.TRAIN, Split.VAL, Split.TEST)


def apportion(n: int, ratios: tuple[float, float, float]) -> tuple[int, int, int]:
    """
    Largest-remainder apportionment of ``n`` items over (train, val, test).
    Ties on the fractional part go to the earlier split.
    """
    quotas = [n * r for r in ratios]
    # the epsilon keeps 0.7 * 10 == 6.999... from flooring to 6
    counts = [math.floor(q + 1e-9) for q in quotas]
    leftover = n - sum(counts)
    order = sorted(range(3), key=lambda i: (-(quotas[i] - counts[i]), i))
    for i in order[:leftover]:
        counts[i] += 1
    return counts[0], counts[1], counts[2]


def stratified_split(manifest: Manifest, spec: SplitSpec, force: bool = False) -> Manifest:
    if not manifest.samples:
        raise EmptyManifest()
    assigned = [s for s in manifest.samples if s.split != Split.UNASSIGNED]
    if assigned and not force:
        raise AlreadyAssigned(len(assigned))

    assignment: dict[str, Split] = {}
    for label in manifest.scheme.classes:
        ids = sorted(s.sample_id for s in manifest.samples if s.label == label)
        if not ids:
            continue
        order = derive_rng(spec.seed, f"class:{label}").permutation(len(ids))
        n_train, n_val, _ = apportion(len(ids), spec.ratios)
        for rank, idx in enumerate(order):
            if rank < n_train:
                split = Split.TRAIN
            elif rank < n_train + n_val:
                split = Split.VAL
            else:
                split = Split.TEST
            assignment[ids[idx]] = split
        logger.debug("class %s: %d samples apportioned", label, len(ids))

    samples = tuple(
        s.model_copy(update={"split": assignment[s.sample_id]}) for s in manifest.samples
    )
    return manifest.model_copy(update={"samples": samples})


def split_columns(manifest: Manifest) -> list[Split]:
    columns = list(ASSIGNED_SPLITS)
    if any(s.split == Split.UNASSIGNED for s in manifest.samples):
        columns.append(Split.UNASSIGNED)
    return columns


def split_report(manifest: Manifest) -> list[dict[str, str | int]]:
    """Per-class counts in each split plus a ``total`` row; counts sum to the manifest size."""
    columns = split_columns(manifest)
    rows: list[dict[str, str | int]] = []
    totals: dict[str, str | int] = {"label": "total", **{c.value: 0 for c in columns}}
    for label in manifest.scheme.classes:
        row: dict[str, str | int] = {"label": label, **{c.value: 0 for c in columns}}
        for sample in manifest.samples:
            if sample.label == label:
                row[sample.split.value] = int(row[sample.split.value]) + 1
                totals[sample.split.value] = int(totals[sample.split.value]) + 1
        rows.append(row)
    rows.append(totals)
    return rows


def lesion_report(manifest: Manifest) -> list[dict[str, str | int]]:
    """
    Dataset description table: one row per lesion type, then rows for images
    carrying any lesion and for all images; one column per ``split/label``.
    """
    keys = [
        f"{split.value}/{label}"
        for split in split_columns(manifest)
        for label in manifest.scheme.classes
    ]
    lesion_types = sorted({le.lesion_type for s in manifest.samples for le in s.lesions})

    def empty(name: str) -> dict[str, str | int]:
        return {"row": name, **{k: 0 for k in keys}}

    by_type = {t: empty(t) for t in lesion_types}
    lesion_images = empty("lesion_images")
    all_images = empty("total_images")
    for sample in manifest.samples:
        key = f"{sample.split.value}/{sample.label}"
        all_images[key] = int(all_images[key]) + 1
        if sample.lesions:
            lesion_images[key] = int(lesion_images[key]) + 1
        for lesion in sample.lesions:
            by_type[lesion.lesion_type][key] = int(by_type[lesion.lesion_type][key]) + 1
    return [*by_type.values(), lesion_images, all_images]
