"""Converters between on-disk formats (manifest CSV, sidecar CSVs, PNG) and domain models."""

import csv
import io
from pathlib import Path

import numpy as np
from PIL import Image as PILImage
from PIL import UnidentifiedImageError
from pydantic import ValidationError

from mammo_augment.errors import (
    DuplicateId,
    IoError,
    MalformedRow,
    UnsupportedImage,
)
from mammo_augment.models import (
    AnnotatedSample,
    BoundingBox,
    Image,
    LabelScheme,
    LabelScheme,
    Lesion,
    Manifest,
    SchemeId,
    Split,
)

MANIFEST_HEADER = ["sample_id", "image_path", "label", "split", "lesions"]
CROP_BOXES_HEADER = ["sample_id", "x_min", "y_min", "x_max", "y_max"]
PREDICTIONS_HEADER = ["sample_id", "predicted_label"]

# stored deflate blocks, no compression
PNG_COMPRESS_LEVEL = 0

_GRAY16_MODES = {"I;16", "I;16L", "I;16B", "I"}


def lesions_from_field(field: str, line_no: int) -> tuple[Lesion, ...]:
    if not field.strip():
        return ()
    lesions = []
    for entry in field.split(";"):
        parts = [p.strip() for p in entry.split(",")]
        if len(parts) != 5:
            raise MalformedRow(line_no, f"lesion entry {entry!r} needs 5 fields")
        try:
            x_min, y_min, x_max, y_max = (int(p) for p in parts[:4])
            lesions.append(
                Lesion(
                    box=BoundingBox(x_min=x_min, y_min=y_min, x_max=x_max, y_max=y_max),
                    lesion_type=parts[4],
                )
            )
        except (ValueError, ValidationError) as exc:
            raise MalformedRow(line_no, f"unparsable lesion entry {entry!r}") from exc
    return tuple(lesions)


def lesions_to_field(lesions: tuple[Lesion, ...]) -> str:
    return ";".join(
        f"{le.box.x_min},{le.box.y_min},{le.box.x_max},{le.box.y_max},{le.lesion_type}"
        for le in lesions
    )


def sample_from_row(row: list[str], scheme: LabelScheme, line_no: int) -> AnnotatedSample:
    if len(row) != len(MANIFEST_HEADER):
        raise MalformedRow(line_no, f"expected {len(MANIFEST_HEADER)} columns, got {len(row)}")
    sample_id, image_path, label, split, lesions = row
    label_value = scheme.parse_label(label, line_no)
    if not image_path.strip():
        raise MalformedRow(line_no, "empty image_path")
    try:
        return AnnotatedSample(
            sample_id=sample_id.strip(),
            image_path=image_path.strip(),
            label=label_value,
            split=Split(split.strip()),
            lesions=lesions_from_field(lesions, line_no),
        )
    except (ValueError, ValidationError) as exc:
        raise MalformedRow(line_no, str(exc).splitlines()[0]) from exc


def sample_to_row(sample: AnnotatedSample) -> list[str]:
    return [
        sample.sample_id,
        sample.image_path,
        sample.label,
        sample.split.value,
        lesions_to_field(sample.lesions),
    ]


def manifest_from_text(text: str) -> Manifest:
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if header != MANIFEST_HEADER:
        raise MalformedRow(1, f"header must be {','.join(MANIFEST_HEADER)}")

    scheme: LabelScheme | None = None
    samples: list[AnnotatedSample] = []
    seen: set[str] = set()
    for row in reader:
        line_no = reader.line_num
        if not row:
            continue
        if scheme is None:
            if len(row) != len(MANIFEST_HEADER):
                raise MalformedRow(line_no, f"expected {len(MANIFEST_HEADER)} columns")
            scheme = LabelScheme.default(LabelScheme.detect(row[2], line_no))
        sample = sample_from_row(row, scheme, line_no)
        if sample.sample_id in seen:
            raise DuplicateId(sample.sample_id)
        seen.add(sample.sample_id)
        samples.append(sample)

    return Manifest(
        scheme=scheme or LabelScheme.default(SchemeId.BIRADS5),
        samples=tuple(samples),
    )


def manifest_to_text(manifest: Manifest) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(MANIFEST_HEADER)
    for sample in manifest.samples:
        writer.writerow(sample_to_row(sample))
    return out.getvalue()


def _read_text(path: Path) -> str:
    try:
        with open(path, encoding="utf-8", newline="") as f:
            return f.read()
    except FileNotFoundError as exc:
        raise IoError(f"file not found: {path}") from exc
    except UnicodeDecodeError as exc:
        raise MalformedRow(1, f"{path} is not UTF-8") from exc
    except OSError as exc:
        raise IoError(f"cannot read {path}: {exc}") from exc


def _write_text(path: Path, text: str) -> None:
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="") as f:
            f.write(text)
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from exc


def parse_manifest(path: Path) -> Manifest:
    """Read a manifest CSV; one sample per data row, in file order."""
    return manifest_from_text(_read_text(path))


def serialize_manifest(manifest: Manifest, path: Path) -> None:
    _write_text(path, manifest_to_text(manifest))


def write_csv(path: Path, header: list[str], rows: list[list[str]]) -> None:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    _write_text(path, out.getvalue())


def write_json(path: Path, payload: str) -> None:
    _write_text(path, payload if payload.endswith("\n") else payload + "\n")


def read_text(path: Path) -> str:
    return _read_text(path)


def write_text(path: Path, text: str) -> None:
    _write_text(path, text)


def _read_rows(path: Path, header: list[str]) -> list[tuple[int, list[str]]]:
    reader = csv.reader(io.StringIO(_read_text(path)))
    if next(reader, None) != header:
        raise MalformedRow(1, f"{path.name}: header must be {','.join(header)}")
    rows = []
    for row in reader:
        if not row:
            continue
        if len(row) != len(header):
            raise MalformedRow(reader.line_num, f"expected {len(header)} columns, got {len(row)}")
        rows.append((reader.line_num, [cell.strip() for cell in row]))
    return rows


def read_crop_boxes(path: Path) -> dict[str, BoundingBox]:
    """Read the ``sample_id,x_min,y_min,x_max,y_max`` crop sidecar."""
    boxes: dict[str, BoundingBox] = {}
    for line_no, (sample_id, *coords) in _read_rows(path, CROP_BOXES_HEADER):
        if sample_id in boxes:
            raise DuplicateId(sample_id)
        try:
            x_min, y_min, x_max, y_max = (int(c) for c in coords)
            boxes[sample_id] = BoundingBox(x_min=x_min, y_min=y_min, x_max=x_max, y_max=y_max)
        except (ValueError, ValidationError) as exc:
            raise MalformedRow(line_no, f"unparsable crop box for {sample_id!r}") from exc
    return boxes


def write_crop_boxes(path: Path, boxes: list[tuple[str, BoundingBox]]) -> None:
    write_csv(
        path,
        CROP_BOXES_HEADER,
        [[sid, str(b.x_min), str(b.y_min), str(b.x_max), str(b.y_max)] for sid, b in boxes],
    )


def read_predictions(path: Path) -> list[tuple[int, str, str]]:
    """Return ``(line_no, sample_id, predicted_label)`` rows in file order."""
    return [(line_no, sid, label) for line_no, (sid, label) in _read_rows(path, PREDICTIONS_HEADER)]


def _bit_depth_for_mode(mode: str, path: Path) -> int:
    if mode in ("L", "1"):
        return 8
    if mode in _GRAY16_MODES:
        return 16
    raise UnsupportedImage(str(path), f"mode {mode!r} is not single-channel grayscale")


def probe_image(path: Path) -> tuple[int, int, int]:
    """Return ``(width, height, bit_depth)`` from the PNG header without decoding pixels."""
    try:
        with PILImage.open(path) as im:
            return im.width, im.height, _bit_depth_for_mode(im.mode, path)
    except FileNotFoundError as exc:
        raise IoError(f"image not found: {path}") from exc
    except UnidentifiedImageError as exc:
        raise UnsupportedImage(str(path), "not a readable image") from exc
    except OSError as exc:
        raise IoError(f"cannot read {path}: {exc}") from exc


def load_image(path: Path) -> Image:
    try:
        with PILImage.open(path) as im:
            bit_depth = _bit_depth_for_mode(im.mode, path)
            if im.mode == "1":
                im = im.convert("L")
            pixels = np.array(im)
    except FileNotFoundError as exc:
        raise IoError(f"image not found: {path}") from exc
    except UnidentifiedImageError as exc:
        raise UnsupportedImage(str(path), "not a readable image") from exc
    except OSError as exc:
        raise IoError(f"cannot read {path}: {exc}") from exc

    if bit_depth == 16:
        if pixels.size and (pixels.min() < 0 or pixels.max() > 0xFFFF):
            raise UnsupportedImage(str(path), "pixel values exceed 16 bits")
        pixels = pixels.astype(np.uint16)
    return Image(pixels=pixels, bit_depth=bit_depth)


def save_image(image: Image, path: Path) -> None:
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        PILImage.fromarray(np.ascontiguousarray(image.pixels)).save(
            path, format="PNG", compress_level=PNG_COMPRESS_LEVEL
        )
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from exc
