"""Confusion matrix and per-class / macro F1.

Any 0/0 ratio (precision, recall or F1) is defined as 0, and classes without
support still count in the macro mean.
"""

from collections.abc import Collection, Iterable

import numpy as np
from sklearn import metrics

from mammo_augment.errors import DuplicateId, MissingPrediction, UnknownSample
from mammo_augment.models import ConfusionMatrix, Manifest


def confusion(
    truth: Manifest,
    predictions: Iterable[tuple[int, str, str]],
    skip: Collection[str] = (),
) -> ConfusionMatrix:
    """
    ``predictions`` yields ``(line_no, sample_id, predicted_label)``. Every truth
    sample needs exactly one prediction; predictions for ids in ``skip`` are
    dropped unscored.
    """
    classes = truth.scheme.classes
    truth_by_id = truth.by_id()
    seen: set[str] = set()
    y_true: list[str] = []
    y_pred: list[str] = []
    for line_no, sample_id, token in predictions:
        if sample_id in seen:
            raise DuplicateId(sample_id)
        seen.add(sample_id)
        sample = truth_by_id.get(sample_id)
        if sample is None:
            if sample_id in skip:
                continue
            raise UnknownSample(sample_id)
        y_true.append(sample.label)
        y_pred.append(truth.scheme.parse_label(token, line_no))
    for sample in truth.samples:
        if sample.sample_id not in seen:
            raise MissingPrediction(sample.sample_id)

    if not y_true:
        counts = np.zeros((len(classes), len(classes)), dtype=np.int64)
    else:
        counts = metrics.confusion_matrix(y_true, y_pred, labels=list(classes))
    return ConfusionMatrix(classes=classes, counts=tuple(tuple(row) for row in counts.tolist()))


def _safe_divide(num: np.ndarray, den: np.ndarray) -> np.ndarray:
    num = num.astype(np.float64)
    return np.divide(num, den, out=np.zeros_like(num), where=den > 0)


def precision_per_class(cm: ConfusionMatrix) -> list[float]:
    counts = cm.as_array()
    return _safe_divide(np.diag(counts), counts.sum(axis=0)).tolist()


def recall_per_class(cm: ConfusionMatrix) -> list[float]:
    counts = cm.as_array()
    return _safe_divide(np.diag(counts), counts.sum(axis=1)).tolist()


def f1_per_class(cm: ConfusionMatrix) -> list[float]:
    precision = np.array(precision_per_class(cm))
    recall = np.array(recall_per_class(cm))
    return _safe_divide(2 * precision * recall, precision + recall).tolist()


def macro_f1(cm: ConfusionMatrix) -> float:
    scores = f1_per_class(cm)
    return float(np.mean(scores)) if scores else 0.0


def f1_report(cm: ConfusionMatrix) -> list[dict[str, str]]:
    """Rows ``class,precision,recall,f1`` followed by a ``macro_f1`` footer row."""
    rows = [
        {"class": label, "precision": f"{p:.6f}", "recall": f"{r:.6f}", "f1": f"{f:.6f}"}
        for label, p, r, f in zip(
            cm.classes, precision_per_class(cm), recall_per_class(cm), f1_per_class(cm), strict=True
        )
    ]
    rows.append({"class": "macro_f1", "precision": "", "recall": "", "f1": f"{macro_f1(cm):.6f}"})
    return rows


def confusion_rows(cm: ConfusionMatrix) -> list[dict[str, str | int]]:
    return [
        {"true": label, **{pred: count for pred, count in zip(cm.classes, row, strict=True)}}
        for label, row in zip(cm.classes, cm.as_array().tolist(), strict=True)
    ]
