import re
from enum import Enum
from pathlib import Path
from typing import TYPE_CHECKING, Annotated, Any

import numpy as np
from pydantic import (
    AfterValidator,
    BaseModel,
    ConfigDict,
    Field,
    NonNegativeInt,
    model_validator,
)

from mammo_augment.errors import DuplicateId, UnknownLabel


def validate_sample_id(v: Any) -> str:
    """Validation logic for SampleId."""
    if not isinstance(v, str):
        raise TypeError("string required")
    if not re.match(r"^[A-Za-z0-9][A-Za-z0-9._\-]*$", v):
        raise ValueError(f"Invalid sample id format: {v}")
    return v


def validate_lesion_type(v: Any) -> str:
    """Validation logic for LesionType."""
    if not isinstance(v, str):
        raise TypeError("string required")
    if not re.match(r"^[a-z][a-z0-9_]*$", v):
        raise ValueError(f"Invalid lesion type format: {v}")
    return v


class SampleId(str):
    """Value Object for sample identifiers (also used in output file names)."""

    if TYPE_CHECKING:
        Input = Annotated[str | "SampleId", AfterValidator(validate_sample_id)]
    else:
        Input = Annotated[str, AfterValidator(validate_sample_id)]


class LesionType(str):
    """Value Object for lesion tags such as ``discrete_mass``."""

    if TYPE_CHECKING:
        Input = Annotated[str | "LesionType", AfterValidator(validate_lesion_type)]
    else:
        Input = Annotated[str, AfterValidator(validate_lesion_type)]


class Split(str, Enum):
    TRAIN = "train"
    VAL = "val"
    TEST = "test"
    UNASSIGNED = "unassigned"


class Strategy(str, Enum):
    TRANSPARENCY = "transparency"
    CUTMIX = "cutmix"


class Laterality(str, Enum):
    LEFT = "left"
    RIGHT = "right"


class SchemeId(str, Enum):
    BIRADS5 = "birads5"
    TRI = "tri"


BIRADS5_CLASSES = ("1", "2", "3", "4", "5")
TRI_CLASSES = ("normal", "benign", "malignant")


class BoundingBox(BaseModel):
    """
    Inclusive pixel rectangle; x is the column, y the row, both 0-based.

    Ordering (min <= max) is not enforced here so that manifests carrying
    inverted boxes can still be loaded and reported by validation.
    """

    model_config = ConfigDict(frozen=True)

    x_min: NonNegativeInt
    y_min: NonNegativeInt
    x_max: NonNegativeInt
    y_max: NonNegativeInt

    @property
    def is_inverted(self) -> bool:
        return self.x_min > self.x_max or self.y_min > self.y_max

    @property
    def width(self) -> int:
        return self.x_max - self.x_min + 1

    @property
    def height(self) -> int:
        return self.y_max - self.y_min + 1

    def within(self, width: int, height: int) -> bool:
        return self.x_max < width and self.y_max < height

    def intersects(self, other: "BoundingBox") -> bool:
        return not (
            self.x_max < other.x_min
            or other.x_max < self.x_min
            or self.y_max < other.y_min
            or other.y_max < self.y_min
        )

    def translate(self, dx: int, dy: int) -> "BoundingBox":
        return BoundingBox(
            x_min=self.x_min + dx,
            y_min=self.y_min + dy,
            x_max=self.x_max + dx,
            y_max=self.y_max + dy,
        )

    def __str__(self) -> str:
        return f"({self.x_min},{self.y_min},{self.x_max},{self.y_max})"


class Lesion(BaseModel):
    model_config = ConfigDict(frozen=True)

    box: BoundingBox
    lesion_type: LesionType.Input


class LabelScheme(BaseModel):
    """
    Label taxonomy plus the classes eligible as augmentation sources (high risk)
    and as CutMix backgrounds (low risk).
    """

    model_config = ConfigDict(frozen=True)

    scheme_id: SchemeId
    high_risk: frozenset[str]
    low_risk: frozenset[str]

    @property
    def classes(self) -> tuple[str, ...]:
        return BIRADS5_CLASSES if self.scheme_id == SchemeId.BIRADS5 else TRI_CLASSES

    @model_validator(mode="after")
    def _check_risk_sets(self) -> "LabelScheme":
        unknown = (self.high_risk | self.low_risk) - set(self.classes)
        if unknown:
            raise ValueError(f"risk sets name unknown classes: {sorted(unknown)}")
        if self.high_risk & self.low_risk:
            raise ValueError("high and low risk sets must be disjoint")
        return self

    @classmethod
    def default(cls, scheme_id: SchemeId) -> "LabelScheme":
        if scheme_id == SchemeId.BIRADS5:
            return cls(
                scheme_id=scheme_id,
                high_risk=frozenset({"3", "4", "5"}),
                low_risk=frozenset({"1", "2"}),
            )
        return cls(
            scheme_id=scheme_id,
            high_risk=frozenset({"benign", "malignant"}),
            low_risk=frozenset({"normal"}),
        )

    @staticmethod
    def detect(token: str, line_no: int | None = None) -> SchemeId:
        value = token.strip()
        if value in BIRADS5_CLASSES:
            return SchemeId.BIRADS5
        if value.lower() in TRI_CLASSES:
            return SchemeId.TRI
        raise UnknownLabel(line_no, token)

    def parse_label(self, token: str, line_no: int | None = None) -> str:
        value = token.strip()
        if self.scheme_id == SchemeId.TRI:
            value = value.lower()
        if value not in self.classes:
            raise UnknownLabel(line_no, token)
        return value

    def display_name(self, label: str) -> str:
        if self.scheme_id == SchemeId.BIRADS5:
            return f"BI-RADS {label}"
        return label.capitalize()

    def with_risk_sets(
        self, high_risk: list[str] | None = None, low_risk: list[str] | None = None
    ) -> "LabelScheme":
        return LabelScheme(
            scheme_id=self.scheme_id,
            high_risk=frozenset(self.parse_label(t) for t in high_risk)
            if high_risk is not None
            else self.high_risk,
            low_risk=frozenset(self.parse_label(t) for t in low_risk)
            if low_risk is not None
            else self.low_risk,
        )


class AnnotatedSample(BaseModel):
    model_config = ConfigDict(frozen=True)

    sample_id: SampleId.Input
    image_path: str
    label: str
    lesions: tuple[Lesion, ...] = ()
    split: Split = Split.UNASSIGNED

    @property
    def boxes(self) -> list[BoundingBox]:
        return [lesion.box for lesion in self.lesions]


class Manifest(BaseModel):
    """Ordered dataset index; sample order is preserved through every transformation."""

    model_config = ConfigDict(frozen=True)

    scheme: LabelScheme
    samples: tuple[AnnotatedSample, ...] = ()

    @model_validator(mode="after")
    def _check_samples(self) -> "Manifest":
        seen: set[str] = set()
        for sample in self.samples:
            if sample.sample_id in seen:
                raise DuplicateId(sample.sample_id)
            seen.add(sample.sample_id)
            if sample.label not in self.scheme.classes:
                raise UnknownLabel(None, sample.label)
        return self

    def by_id(self) -> dict[str, AnnotatedSample]:
        return {s.sample_id: s for s in self.samples}

    def in_split(self, split: Split) -> list[AnnotatedSample]:
        return [s for s in self.samples if s.split == split]

    def class_histogram(self) -> dict[str, int]:
        counts = {label: 0 for label in self.scheme.classes}
        for sample in self.samples:
            counts[sample.label] += 1
        return counts


class ViolationKind(str, Enum):
    MISSING_FILE = "missing_file"
    UNSUPPORTED_IMAGE = "unsupported_image"
    OUT_OF_BOUNDS = "out_of_bounds"
    INVERTED_BOX = "inverted_box"


class Violation(BaseModel):
    model_config = ConfigDict(frozen=True)

    sample_id: str
    kind: ViolationKind
    detail: str
    lesion_index: int | None = None


class Image(BaseModel):
    """
    Owned 2-D grayscale buffer. ``pixels`` has shape (H, W) and dtype uint8 or
    uint16 matching ``bit_depth``.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    pixels: np.ndarray
    bit_depth: int

    @model_validator(mode="after")
    def _check_buffer(self) -> "Image":
        if self.bit_depth not in (8, 16):
            raise ValueError(f"bit depth must be 8 or 16, got {self.bit_depth}")
        expected = np.uint8 if self.bit_depth == 8 else np.uint16
        if self.pixels.dtype != expected:
            raise ValueError(f"{self.bit_depth}-bit image needs {np.dtype(expected)} pixels")
        if self.pixels.ndim != 2 or min(self.pixels.shape) < 1:
            raise ValueError(f"pixels must be a non-empty 2-D array, got {self.pixels.shape}")
        return self

    @property
    def width(self) -> int:
        return int(self.pixels.shape[1])

    @property
    def height(self) -> int:
        return int(self.pixels.shape[0])

    @property
    def max_value(self) -> int:
        return (1 << self.bit_depth) - 1

    @property
    def size(self) -> tuple[int, int]:
        return (self.width, self.height)

    def with_pixels(self, pixels: np.ndarray) -> "Image":
        return Image(pixels=pixels, bit_depth=self.bit_depth)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Image):
            return NotImplemented
        return self.bit_depth == other.bit_depth and np.array_equal(self.pixels, other.pixels)

    __hash__ = None  # type: ignore[assignment]


class Mask(BaseModel):
    """Per-pixel weights in [0, 1], shape (H, W), float64."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    weights: np.ndarray

    @model_validator(mode="after")
    def _check_weights(self) -> "Mask":
        if self.weights.ndim != 2 or self.weights.dtype != np.float64:
            raise ValueError("weights must be a 2-D float64 array")
        if self.weights.size and (self.weights.min() < 0.0 or self.weights.max() > 1.0):
            raise ValueError("weights must lie in [0, 1]")
        return self

    @property
    def width(self) -> int:
        return int(self.weights.shape[1])

    @property
    def height(self) -> int:
        return int(self.weights.shape[0])

    @property
    def size(self) -> tuple[int, int]:
        return (self.width, self.height)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Mask):
            return NotImplemented
        return np.array_equal(self.weights, other.weights)

    __hash__ = None  # type: ignore[assignment]


class CropResult(BaseModel):
    model_config = ConfigDict(frozen=True)

    cropped: Image
    crop_box: BoundingBox
    transformed_lesions: tuple[BoundingBox, ...]


class AlphaRange(BaseModel):
    model_config = ConfigDict(frozen=True)

    low: float = 0.1
    high: float = 0.9

    @model_validator(mode="after")
    def _check_order(self) -> "AlphaRange":
        if not 0.0 <= self.low <= self.high <= 1.0:
            raise ValueError(f"alpha range must satisfy 0 <= low <= high <= 1, got {self}")
        return self


class AugmentRecord(BaseModel):
    model_config = ConfigDict(frozen=True)

    source_id: SampleId.Input
    replica_index: NonNegativeInt
    background_id: SampleId.Input | None = None
    alpha: float | None = None
    output_id: SampleId.Input


class AugmentPlan(BaseModel):
    """Fully materialized augmentation schedule; executing it needs no randomness."""

    model_config = ConfigDict(frozen=True)

    seed: int = Field(ge=0, lt=2**64)
    per_sample_count: NonNegativeInt
    strategy: Strategy
    alpha_range: AlphaRange = AlphaRange()
    lesion_types: tuple[str, ...] | None = None
    records: tuple[AugmentRecord, ...] = ()

    @model_validator(mode="after")
    def _check_records(self) -> "AugmentPlan":
        outputs = [r.output_id for r in self.records]
        if len(set(outputs)) != len(outputs):
            raise ValueError("output ids must be unique")
        for record in self.records:
            if self.strategy == Strategy.TRANSPARENCY:
                if record.background_id is not None or record.alpha is None:
                    raise ValueError(f"{record.output_id}: transparency records need alpha only")
                if not self.alpha_range.low <= record.alpha <= self.alpha_range.high:
                    raise ValueError(f"{record.output_id}: alpha outside {self.alpha_range}")
            elif record.alpha is not None or record.background_id is None:
                raise ValueError(f"{record.output_id}: cutmix records need a background only")
        return self


class SplitSpec(BaseModel):
    model_config = ConfigDict(frozen=True)

    train: float = Field(default=0.8, ge=0.0)
    val: float = Field(default=0.0, ge=0.0)
    test: float = Field(default=0.2, ge=0.0)
    seed: int = Field(default=0, ge=0, lt=2**64)

    @model_validator(mode="after")
    def _check_sum(self) -> "SplitSpec":
        if abs(self.train + self.val + self.test - 1.0) > 1e-9:
            raise ValueError(f"split ratios must sum to 1, got {self.ratios}")
        return self

    @property
    def ratios(self) -> tuple[float, float, float]:
        return (self.train, self.val, self.test)


class ConfusionMatrix(BaseModel):
    """Rows are true classes, columns predicted classes, both in ``classes`` order."""

    model_config = ConfigDict(frozen=True)

    classes: tuple[str, ...]
    counts: tuple[tuple[NonNegativeInt, ...], ...]

    @model_validator(mode="after")
    def _check_shape(self) -> "ConfusionMatrix":
        k = len(self.classes)
        if len(self.counts) != k or any(len(row) != k for row in self.counts):
            raise ValueError(f"counts must be {k}x{k}")
        return self

    @property
    def total(self) -> int:
        return sum(sum(row) for row in self.counts)

    def as_array(self) -> np.ndarray:
        return np.array(self.counts, dtype=np.int64).reshape(len(self.classes), len(self.classes))


class Command(str, Enum):
    VALIDATE = "validate"
    PREPROCESS = "preprocess"
    SPLIT = "split"
    AUGMENT = "augment"
    EVALUATE = "evaluate"
    REPORT = "report"


class ReportKind(str, Enum):
    SPLIT = "split"
    LESIONS = "lesions"


class RunConfig(BaseModel):
    """
    Resolved configuration of one command. Flat on purpose: it is written
    verbatim as ``run.json`` and can be replayed.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    command: Command
    manifest: Path
    image_root: Path
    out_root: Path
    seed: int = Field(default=0, ge=0, lt=2**64)
    workers: int = Field(default=1, ge=1)
    # preprocess
    target_width: int = Field(default=1024, ge=1)
    target_height: int = Field(default=768, ge=1)
    threshold: float = Field(default=0.05, gt=0.0, lt=1.0)
    crop_boxes: Path | None = None
    # split
    train_ratio: float = Field(default=0.8, ge=0.0)
    val_ratio: float = Field(default=0.0, ge=0.0)
    test_ratio: float = Field(default=0.2, ge=0.0)
    force: bool = False
    # augment
    strategy: Strategy = Strategy.TRANSPARENCY
    count: int = Field(default=0, ge=0)
    alpha_low: float = 0.1
    alpha_high: float = 0.9
    high_risk: str | None = None
    low_risk: str | None = None
    lesion_types: str | None = None
    plan: Path | None = None
    # evaluate / report
    predictions: Path | None = None
    eval_split: Split | None = None
    report_by: ReportKind = ReportKind.SPLIT

    @model_validator(mode="after")
    def _check_domains(self) -> "RunConfig":
        self.split_spec()
        self.alpha_range()
        return self

    def split_spec(self) -> SplitSpec:
        return SplitSpec(
            train=self.train_ratio, val=self.val_ratio, test=self.test_ratio, seed=self.seed
        )

    def alpha_range(self) -> AlphaRange:
        return AlphaRange(low=self.alpha_low, high=self.alpha_high)

    def lesion_type_filter(self) -> tuple[str, ...] | None:
        return _split_list(self.lesion_types)

    def risk_overrides(self) -> tuple[list[str] | None, list[str] | None]:
        high = _split_list(self.high_risk)
        low = _split_list(self.low_risk)
        return (list(high) if high is not None else None, list(low) if low is not None else None)


def _split_list(value: str | None) -> tuple[str, ...] | None:
    if value is None:
        return None
    return tuple(item.strip() for item in value.split(",") if item.strip())
