"""Box masks and the element-wise masking / blending operators."""

import numpy as np

from mammo_augment.errors import (
    BitDepthMismatch,
    BoxOutOfBounds,
    DimensionMismatch,
    InvertedBox,
)
from mammo_augment.models import BoundingBox, Image, Mask


def check_box(box: BoundingBox, width: int, height: int) -> None:
    if box.is_inverted:
        raise InvertedBox(box)
    if not box.within(width, height):
        raise BoxOutOfBounds(box, width, height)


def build_mask(
    width: int, height: int, boxes: list[BoundingBox], background_value: float
) -> Mask:
    """
    Weight 1 inside the union of ``boxes`` (inclusive bounds), ``background_value``
    everywhere else. An empty box list yields a uniform background mask.
    """
    if not 0.0 <= background_value <= 1.0:
        raise ValueError(f"background_value must lie in [0, 1], got {background_value}")
    weights = np.full((height, width), float(background_value), dtype=np.float64)
    for box in boxes:
        check_box(box, width, height)
        weights[box.y_min : box.y_max + 1, box.x_min : box.x_max + 1] = 1.0
    return Mask(weights=weights)


def _finish(values: np.ndarray, like: Image) -> Image:
    # np.rint rounds half to even
    out = np.clip(np.rint(values), 0, like.max_value)
    return like.with_pixels(out.astype(like.pixels.dtype))


def apply_mask(x: Image, m: Mask) -> Image:
    if x.size != m.size:
        raise DimensionMismatch(x.size, m.size)
    return _finish(m.weights * x.pixels.astype(np.float64), x)


def blend(x_a: Image, x_b: Image, m: Mask) -> Image:
    """``m * x_a + (1 - m) * x_b`` per pixel, rounded half-even and clamped."""
    if x_a.size != x_b.size:
        raise DimensionMismatch(x_a.size, x_b.size)
    if x_a.size != m.size:
        raise DimensionMismatch(x_a.size, m.size)
    if x_a.bit_depth != x_b.bit_depth:
        raise BitDepthMismatch(x_a.bit_depth, x_b.bit_depth)
    w = m.weights
    values = w * x_a.pixels.astype(np.float64) + (1.0 - w) * x_b.pixels.astype(np.float64)
    return _finish(values, x_a)
