"""Breast-region cropping, orientation normalization and fixed-size resampling.

Every geometric operation transforms the lesion boxes together with the pixels.
"""

import numpy as np
from scipy import ndimage

from mammo_augment.errors import LesionOutsideCrop, NoForeground
from mammo_augment.masking import check_box
from mammo_augment.models import BoundingBox, CropResult, Image, Laterality

DEFAULT_THRESHOLD = 0.05

_EIGHT_CONNECTED = np.ones((3, 3), dtype=bool)


def detect_foreground(x: Image, threshold_fraction: float = DEFAULT_THRESHOLD) -> BoundingBox:
    """
    Tight box around the largest 8-connected component of pixels brighter than
    ``threshold_fraction`` of full scale. Ties go to the component found first in
    raster order.
    """
    if not 0.0 < threshold_fraction < 1.0:
        raise ValueError(f"threshold_fraction must lie in (0, 1), got {threshold_fraction}")
    threshold = threshold_fraction * x.max_value
    labels, count = ndimage.label(x.pixels > threshold, structure=_EIGHT_CONNECTED)
    if count == 0:
        raise NoForeground(threshold)
    areas = np.bincount(labels.ravel())
    areas[0] = 0
    largest = int(np.argmax(areas))
    rows, cols = ndimage.find_objects(labels)[largest - 1]
    return BoundingBox(
        x_min=cols.start, y_min=rows.start, x_max=cols.stop - 1, y_max=rows.stop - 1
    )


def crop(x: Image, region: BoundingBox, lesions: list[BoundingBox]) -> CropResult:
    check_box(region, x.width, x.height)
    moved = []
    for index, box in enumerate(lesions):
        check_box(box, x.width, x.height)
        if not box.intersects(region):
            raise LesionOutsideCrop(index, region)
        clipped = BoundingBox(
            x_min=max(box.x_min, region.x_min),
            y_min=max(box.y_min, region.y_min),
            x_max=min(box.x_max, region.x_max),
            y_max=min(box.y_max, region.y_max),
        )
        moved.append(clipped.translate(-region.x_min, -region.y_min))
    pixels = x.pixels[region.y_min : region.y_max + 1, region.x_min : region.x_max + 1]
    return CropResult(
        cropped=x.with_pixels(pixels.copy()),
        crop_box=region,
        transformed_lesions=tuple(moved),
    )


def flip_horizontal(x: Image, lesions: list[BoundingBox]) -> tuple[Image, list[BoundingBox]]:
    last = x.width - 1
    boxes = [
        BoundingBox(x_min=last - b.x_max, y_min=b.y_min, x_max=last - b.x_min, y_max=b.y_max)
        for b in lesions
    ]
    return x.with_pixels(np.ascontiguousarray(x.pixels[:, ::-1])), boxes


def laterality(x: Image) -> Laterality:
    """Right when the right half is brighter on average; ties (and width 1) are Left."""
    half = x.width // 2
    if half == 0:
        return Laterality.LEFT
    left = float(x.pixels[:, :half].mean(dtype=np.float64))
    right = float(x.pixels[:, x.width - half :].mean(dtype=np.float64))
    return Laterality.RIGHT if right > left else Laterality.LEFT


def _sample_positions(source: int, target: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    # pixel-centre alignment
    pos = (np.arange(target, dtype=np.float64) + 0.5) * (source / target) - 0.5
    pos = np.clip(pos, 0.0, source - 1)
    lo = np.floor(pos).astype(np.intp)
    hi = np.minimum(lo + 1, source - 1)
    return lo, hi, pos - lo


def _scale_coord(value: int, scale: float, limit: int) -> int:
    return int(min(max(round(value * scale), 0), limit - 1))


def resize(
    x: Image, lesions: list[BoundingBox], target_w: int, target_h: int
) -> tuple[Image, list[BoundingBox]]:
    """Bilinear resample to ``target_w`` x ``target_h``; boxes are scaled, rounded and clamped."""
    if target_w < 1 or target_h < 1:
        raise ValueError(f"target size must be at least 1x1, got {target_w}x{target_h}")
    if (target_w, target_h) == x.size:
        return x.with_pixels(x.pixels.copy()), list(lesions)

    x0, x1, fx = _sample_positions(x.width, target_w)
    y0, y1, fy = _sample_positions(x.height, target_h)
    src = x.pixels.astype(np.float64)
    top = src[y0][:, x0] * (1.0 - fx) + src[y0][:, x1] * fx
    bottom = src[y1][:, x0] * (1.0 - fx) + src[y1][:, x1] * fx
    values = top * (1.0 - fy)[:, None] + bottom * fy[:, None]
    pixels = np.clip(np.rint(values), 0, x.max_value).astype(x.pixels.dtype)

    sx = target_w / x.width
    sy = target_h / x.height
    boxes = []
    for b in lesions:
        x_min = _scale_coord(b.x_min, sx, target_w)
        y_min = _scale_coord(b.y_min, sy, target_h)
        boxes.append(
            BoundingBox(
                x_min=x_min,
                y_min=y_min,
                x_max=max(_scale_coord(b.x_max, sx, target_w), x_min),
                y_max=max(_scale_coord(b.y_max, sy, target_h), y_min),
            )
        )
    return x.with_pixels(pixels), boxes
