import numpy as np
import pytest

from mammo_augment.errors import DuplicateId, MissingPrediction, UnknownLabel, UnknownSample
from mammo_augment.metrics import (
    confusion,
    confusion_rows,
    f1_per_class,
    f1_report,
    macro_f1,
    precision_per_class,
    recall_per_class,
)
from mammo_augment.models import AnnotatedSample, ConfusionMatrix, LabelScheme, Manifest, SchemeId

TRI = LabelScheme.default(SchemeId.TRI)


def truth(labels):
    return Manifest(
        scheme=TRI,
        samples=tuple(
            AnnotatedSample(sample_id=f"s{i}", image_path=f"{i}.png", label=label)
            for i, label in enumerate(labels)
        ),
    )


def predictions(labels):
    return [(i + 2, f"s{i}", label) for i, label in enumerate(labels)]


def recount_f1(true, pred, classes):
    """Independent per-class F1 straight from the label lists."""
    scores = []
    for c in classes:
        tp = sum(1 for t, p in zip(true, pred, strict=True) if t == c and p == c)
        fp = sum(1 for t, p in zip(true, pred, strict=True) if t != c and p == c)
        fn = sum(1 for t, p in zip(true, pred, strict=True) if t == c and p != c)
        scores.append(2 * tp / (2 * tp + fp + fn) if tp else 0.0)
    return scores


def test_metric_oracle():
    rng = np.random.default_rng(42)
    classes = list(TRI.classes)
    for _ in range(1000):
        n = int(rng.integers(1, 30))
        true = [classes[i] for i in rng.integers(0, 3, size=n)]
        pred = [classes[i] for i in rng.integers(0, 3, size=n)]
        cm = confusion(truth(true), predictions(pred))
        expected = recount_f1(true, pred, classes)
        assert f1_per_class(cm) == pytest.approx(expected, abs=1e-12)
        assert macro_f1(cm) == pytest.approx(sum(expected) / 3, abs=1e-12)


def test_perfect_predictions_score_one():
    labels = ["normal", "benign", "malignant", "benign"]
    cm = confusion(truth(labels), predictions(labels))
    assert macro_f1(cm) == 1.0
    assert np.array_equal(cm.as_array(), np.diag([1, 2, 1]))


def test_class_without_support_counts_as_zero():
    labels = ["normal", "benign"]
    cm = confusion(truth(labels), predictions(labels))
    assert f1_per_class(cm) == [1.0, 1.0, 0.0]
    assert macro_f1(cm) == pytest.approx(2 / 3)


def test_precision_and_recall():
    cm = ConfusionMatrix(classes=("a", "b"), counts=((3, 1), (2, 4)))
    assert precision_per_class(cm) == [pytest.approx(3 / 5), pytest.approx(4 / 5)]
    assert recall_per_class(cm) == [pytest.approx(3 / 4), pytest.approx(4 / 6)]


def test_prediction_labels_are_parsed_by_scheme():
    cm = confusion(truth(["normal"]), [(2, "s0", "Normal")])
    assert cm.counts[0][0] == 1


def test_confusion_errors():
    with pytest.raises(UnknownSample):
        confusion(truth(["normal"]), [(2, "s0", "normal"), (3, "zz", "normal")])
    with pytest.raises(DuplicateId):
        confusion(truth(["normal"]), [(2, "s0", "normal"), (3, "s0", "normal")])
    with pytest.raises(MissingPrediction, match="s1"):
        confusion(truth(["normal", "benign"]), [(2, "s0", "normal")])
    with pytest.raises(UnknownLabel) as excinfo:
        confusion(truth(["normal"]), [(2, "s0", "BI-RADS 3")])
    assert excinfo.value.line_no == 2


def test_f1_report_rows():
    cm = confusion(truth(["normal", "benign"]), predictions(["normal", "normal"]))
    rows = f1_report(cm)
    assert [r["class"] for r in rows] == ["normal", "benign", "malignant", "macro_f1"]
    assert rows[0] == {
        "class": "normal",
        "precision": "0.500000",
        "recall": "1.000000",
        "f1": "0.666667",
    }
    assert rows[-1]["f1"] == "0.222222"
    assert confusion_rows(cm)[0] == {"true": "normal", "normal": 1, "benign": 0, "malignant": 0}


def test_two_class_example():
    cm = ConfusionMatrix(classes=("a", "b"), counts=((5, 1), (2, 2)))
    assert f1_per_class(cm) == [pytest.approx(10 / 13), pytest.approx(4 / 7)]
    assert macro_f1(cm) == pytest.approx((10 / 13 + 4 / 7) / 2)


def test_permuting_classes_permutes_scores():
    rng = np.random.default_rng(3)
    for _ in range(50):
        counts = rng.integers(0, 10, size=(4, 4))
        classes = ("w", "x", "y", "z")
        order = rng.permutation(4)
        cm = ConfusionMatrix(classes=classes, counts=tuple(map(tuple, counts.tolist())))
        permuted = ConfusionMatrix(
            classes=tuple(classes[i] for i in order),
            counts=tuple(map(tuple, counts[np.ix_(order, order)].tolist())),
        )
        expected = [f1_per_class(cm)[i] for i in order]
        assert f1_per_class(permuted) == pytest.approx(expected, abs=1e-12)
        assert macro_f1(permuted) == pytest.approx(macro_f1(cm), abs=1e-12)


def test_skipped_ids_are_not_scored():
    cm = confusion(
        truth(["normal"]), [(2, "s0", "normal"), (3, "other", "benign")], skip={"other"}
    )
    assert cm.total == 1
    with pytest.raises(UnknownSample):
        confusion(truth(["normal"]), [(2, "s0", "normal"), (3, "zz", "benign")], skip={"other"})
