"""Typed failures raised by the pipeline.

Every error carries the process exit code the CLI reports for it; the error's
class name is its machine-readable code.
"""

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_USAGE = 2
EXIT_IO = 3
EXIT_DATA = 4


class MammoError(Exception):
    exit_code = EXIT_DATA

    @property
    def code(self) -> str:
        return type(self).__name__


class UsageError(MammoError):
    exit_code = EXIT_USAGE


class IoError(MammoError):
    exit_code = EXIT_IO


class DataError(MammoError):
    exit_code = EXIT_DATA


# Manifest format


class MalformedRow(DataError):
    def __init__(self, line_no: int, reason: str):
        self.line_no = line_no
        super().__init__(f"line {line_no}: {reason}")


class UnknownLabel(DataError):
    def __init__(self, line_no: int | None, label: str):
        self.line_no = line_no
        self.label = label
        where = f"line {line_no}: " if line_no is not None else ""
        super().__init__(f"{where}unknown label {label!r}")


class DuplicateId(DataError):
    def __init__(self, sample_id: str):
        self.sample_id = sample_id
        super().__init__(f"duplicate sample id {sample_id!r}")


class UnsupportedImage(DataError):
    def __init__(self, path: str, reason: str):
        self.path = path
        super().__init__(f"{path}: {reason}")


# Geometry


class BoxOutOfBounds(DataError):
    def __init__(self, box: object, width: int, height: int):
        super().__init__(f"box {box} lies outside a {width}x{height} image")


class InvertedBox(DataError):
    def __init__(self, box: object):
        super().__init__(f"box {box} has min > max")


class DimensionMismatch(DataError):
    def __init__(self, left: tuple[int, int], right: tuple[int, int]):
        super().__init__(f"dimensions differ: {left[0]}x{left[1]} vs {right[0]}x{right[1]}")


class BitDepthMismatch(DataError):
    def __init__(self, left: int, right: int):
        super().__init__(f"bit depths differ: {left} vs {right}")


class NoForeground(DataError):
    def __init__(self, threshold: float):
        super().__init__(f"no pixel above threshold {threshold:g}")


class LesionOutsideCrop(DataError):
    def __init__(self, index: int, region: object):
        self.index = index
        super().__init__(f"lesion {index} does not intersect crop region {region}")


# Augmentation


class NoLesionBoxes(DataError):
    def __init__(self, sample_id: str):
        self.sample_id = sample_id
        super().__init__(f"sample {sample_id!r} has no lesion boxes")


class LabelNotEligible(DataError):
    def __init__(self, side: str, sample_id: str, label: str):
        self.side = side
        super().__init__(f"{side} sample {sample_id!r} has ineligible label {label!r}")


class NoEligibleSources(DataError):
    def __init__(self) -> None:
        super().__init__("no train-split sample with lesions and a high-risk label")


class NoEligibleBackgrounds(DataError):
    def __init__(self) -> None:
        super().__init__("no train-split sample with a low-risk label")


class RecordFailed(DataError):
    def __init__(self, index: int, cause: MammoError, item: str | None = None):
        self.index = index
        self.cause = cause
        self.exit_code = cause.exit_code
        super().__init__(f"{item or f'record {index}'}: {cause.code}: {cause}")


# Splitting and scoring


class AlreadyAssigned(DataError):
    def __init__(self, count: int):
        super().__init__(f"{count} samples already carry a split; pass --force to reassign")


class EmptyManifest(DataError):
    def __init__(self) -> None:
        super().__init__("manifest has no samples")


class UnknownSample(DataError):
    def __init__(self, sample_id: str):
        self.sample_id = sample_id
        super().__init__(f"unknown sample id {sample_id!r}")


class MissingPrediction(DataError):
    def __init__(self, sample_id: str):
        self.sample_id = sample_id
        super().__init__(f"no prediction for sample {sample_id!r}")
