from pathlib import Path

import numpy as np
import pytest
from PIL import Image as PILImage

from mammo_augment.adapters import manifest_to_text
from mammo_augment.models import (
    AnnotatedSample,
    BoundingBox,
    Image,
    LabelScheme,
    Lesion,
    Manifest,
    SchemeId,
)

SYNTH_WIDTH = 40
SYNTH_HEIGHT = 32
BREAST_VALUE = 20000
LESION_VALUE = 45000

# (sample_id, label, side, lesion boxes given in breast-local coordinates)
SYNTHETIC_SAMPLES = [
    ("s01", "1", "left", []),
    ("s02", "1", "right", []),
    ("s03", "1", "left", []),
    ("s04", "2", "right", []),
    ("s05", "2", "left", []),
    ("s06", "2", "right", []),
    ("s07", "3", "left", [(3, 4, 8, 9, "discrete_mass")]),
    ("s08", "3", "right", [(10, 12, 14, 17, "spiculated_mass")]),
    ("s09", "4", "left", [(5, 5, 9, 9, "discrete_mass"), (12, 14, 16, 18, "stellate_mass")]),
    ("s10", "4", "right", [(2, 2, 6, 6, "stellate_mass")]),
    ("s11", "5", "left", [(8, 10, 15, 16, "spiculated_mass")]),
    ("s12", "5", "right", [(4, 15, 9, 20, "discrete_mass")]),
]

# breast rectangle: 24 columns wide, rows 3..28
BREAST_WIDTH = 24
BREAST_TOP = 3
BREAST_BOTTOM = 28


def write_png(path: Path, pixels: np.ndarray) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    PILImage.fromarray(pixels).save(path, format="PNG")
    return path


def random_image(rng: np.random.Generator, width: int, height: int, bit_depth: int = 8) -> Image:
    dtype = np.uint8 if bit_depth == 8 else np.uint16
    high = (1 << bit_depth) - 1
    pixels = rng.integers(0, high, size=(height, width), endpoint=True).astype(dtype)
    return Image(pixels=pixels, bit_depth=bit_depth)


def random_box(rng: np.random.Generator, width: int, height: int) -> BoundingBox:
    x0, x1 = sorted(int(v) for v in rng.integers(0, width, size=2))
    y0, y1 = sorted(int(v) for v in rng.integers(0, height, size=2))
    return BoundingBox(x_min=x0, y_min=y0, x_max=x1, y_max=y1)


def synthetic_mammogram(side: str, lesions: list[tuple], seed: int) -> tuple[np.ndarray, list]:
    """16-bit image with one bright breast rectangle against faint noise."""
    rng = np.random.default_rng(seed)
    pixels = rng.integers(0, 400, size=(SYNTH_HEIGHT, SYNTH_WIDTH)).astype(np.uint16)
    x_off = 0 if side == "left" else SYNTH_WIDTH - BREAST_WIDTH
    breast = rng.integers(0, 2000, size=(BREAST_BOTTOM - BREAST_TOP + 1, BREAST_WIDTH))
    pixels[BREAST_TOP : BREAST_BOTTOM + 1, x_off : x_off + BREAST_WIDTH] = BREAST_VALUE + breast
    boxes = []
    for x0, y0, x1, y1, kind in lesions:
        box = BoundingBox(
            x_min=x0 + x_off, y_min=y0 + BREAST_TOP, x_max=x1 + x_off, y_max=y1 + BREAST_TOP
        )
        pixels[box.y_min : box.y_max + 1, box.x_min : box.x_max + 1] = LESION_VALUE
        boxes.append(Lesion(box=box, lesion_type=kind))
    return pixels, boxes


@pytest.fixture
def synthetic_dataset(tmp_path) -> Path:
    """Twelve 40x32 16-bit images and their BI-RADS manifest; returns the manifest path."""
    root = tmp_path / "data"
    samples = []
    for seed, (sample_id, label, side, lesions) in enumerate(SYNTHETIC_SAMPLES):
        pixels, boxes = synthetic_mammogram(side, lesions, seed)
        write_png(root / "png" / f"{sample_id}.png", pixels)
        samples.append(
            AnnotatedSample(
                sample_id=sample_id,
                image_path=f"png/{sample_id}.png",
                label=label,
                lesions=tuple(boxes),
            )
        )
    manifest = Manifest(scheme=LabelScheme.default(SchemeId.BIRADS5), samples=tuple(samples))
    path = root / "manifest.csv"
    path.write_text(manifest_to_text(manifest), encoding="utf-8")
    return path


def mias_manifest() -> Manifest:
    """322 rows in the Normal/Benign/Malignant scheme with 209/61/52 samples per class."""
    samples = []
    for label, count in (("normal", 209), ("benign", 61), ("malignant", 52)):
        for _ in range(count):
            sample_id = f"mdb{len(samples) + 1:03d}"
            lesions = ()
            if label != "normal":
                lesions = (
                    Lesion(
                        box=BoundingBox(x_min=100, y_min=100, x_max=140, y_max=150),
                        lesion_type="discrete_mass" if label == "benign" else "spiculated_mass",
                    ),
                )
            samples.append(
                AnnotatedSample(
                    sample_id=sample_id,
                    image_path=f"{sample_id}.png",
                    label=label,
                    lesions=lesions,
                )
            )
    return Manifest(scheme=LabelScheme.default(SchemeId.TRI), samples=tuple(samples))


@pytest.fixture
def mias_manifest_file(tmp_path) -> Path:
    path = tmp_path / "mias" / "manifest.csv"
    path.parent.mkdir(parents=True)
    path.write_text(manifest_to_text(mias_manifest()), encoding="utf-8")
    return path
