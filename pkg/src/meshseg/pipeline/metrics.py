"""Segmentation metrics: confusion matrix, per-class IoU, mIoU, mAcc."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict

import numpy as np

from ..mesh.core import UNLABELED


@dataclass
class EvalResult:
    confusion: np.ndarray          # (C, C), rows = ground truth, cols = prediction
    iou: np.ndarray                # per-class IoU, NaN where the class is absent
    class_accuracy: np.ndarray     # per-class recall, NaN where absent
    mean_iou: float
    mean_accuracy: float
    overall_accuracy: float

    def summary(self) -> str:
        lines = [
            f"mIoU {self.mean_iou:.4f}  mAcc {self.mean_accuracy:.4f}  "
            f"oAcc {self.overall_accuracy:.4f}"
        ]
        for c, (i, a) in enumerate(zip(self.iou, self.class_accuracy)):
            if np.isnan(i) and np.isnan(a):
                continue
            lines.append(f"  class {c}: IoU {i:.4f}  acc {a:.4f}")
        return "\n".join(lines)


def confusion_matrix(labels: np.ndarray, predictions: np.ndarray,
                     num_classes: int) -> np.ndarray:
    """Counts over labeled vertices only; unlabeled ground truth is skipped."""
    labels = np.asarray(labels).ravel()
    predictions = np.asarray(predictions).ravel()
    if labels.shape != predictions.shape:
        raise ValueError("labels and predictions differ in length")
    mask = labels != UNLABELED
    l, p = labels[mask], predictions[mask]
    if l.size and (l.min() < 0 or l.max() >= num_classes):
        raise ValueError("label outside [0, num_classes)")
    if p.size and (p.min() < 0 or p.max() >= num_classes):
        raise ValueError("prediction outside [0, num_classes)")
    return np.bincount(
        l * num_classes + p, minlength=num_classes * num_classes
    ).reshape(num_classes, num_classes)


def evaluate(labels: np.ndarray, predictions: np.ndarray,
             num_classes: int) -> EvalResult:
    """Means are taken over classes present in the ground truth only."""
    cm = confusion_matrix(labels, predictions, num_classes)
    tp = np.diag(cm).astype(np.float64)
    gt = cm.sum(axis=1).astype(np.float64)
    pred = cm.sum(axis=0).astype(np.float64)
    present = gt > 0

    union = gt + pred - tp
    with np.errstate(invalid="ignore", divide="ignore"):
        iou = np.where(union > 0, tp / np.maximum(union, 1), np.nan)
        acc = np.where(present, tp / np.maximum(gt, 1), np.nan)
    iou[~present] = np.nan

    if not present.any():
        raise ValueError("no labeled vertices to evaluate")
    total = gt.sum()
    return EvalResult(
        confusion=cm,
        iou=iou,
        class_accuracy=acc,
        mean_iou=float(np.nanmean(iou[present])),
        mean_accuracy=float(np.nanmean(acc[present])),
        overall_accuracy=float(tp.sum() / total),
    )
