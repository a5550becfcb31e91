"""Pooling trace maps and the feature pooling/unpooling they drive."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..mesh.core import UNLABELED


@dataclass
class PoolingTraceMap:
    """Surjective fine-to-coarse vertex assignment between adjacent levels."""

    assignment: np.ndarray  # (fine,) coarse index per fine vertex
    coarse_count: int

    def __post_init__(self):
        self.assignment = np.asarray(self.assignment, dtype=np.int64).reshape(-1)
        self.coarse_count = int(self.coarse_count)

    @property
    def fine_count(self) -> int:
        return self.assignment.shape[0]

    def validate(self):
        if self.assignment.size:
            if self.assignment.min() < 0 or self.assignment.max() >= self.coarse_count:
                raise ValueError("trace assignment index out of range")
        counts = np.bincount(self.assignment, minlength=self.coarse_count)
        if (counts == 0).any():
            missing = int(np.flatnonzero(counts == 0)[0])
            raise ValueError(f"trace map not surjective: coarse vertex {missing} has no preimage")

    def group_sizes(self) -> np.ndarray:
        return np.bincount(self.assignment, minlength=self.coarse_count)


def pool_features(features: np.ndarray, trace: PoolingTraceMap, mode: str = "mean") -> np.ndarray:
    """Aggregate fine feature rows over trace groups (mean, max or sum)."""
    features = np.asarray(features)
    if features.shape[0] != trace.fine_count:
        raise ValueError(
            f"feature rows ({features.shape[0]}) != trace fine size ({trace.fine_count})"
        )
    c = trace.coarse_count
    if mode == "sum" or mode == "mean":
        out = np.zeros((c,) + features.shape[1:], dtype=np.float64)
        np.add.at(out, trace.assignment, features)
        if mode == "mean":
            out /= trace.group_sizes().reshape((c,) + (1,) * (features.ndim - 1))
        return out
    if mode == "max":
        out = np.full((c,) + features.shape[1:], -np.inf)
        np.maximum.at(out, trace.assignment, features)
        return out
    raise ValueError(f"unknown pooling mode {mode!r}")


def unpool_features(coarse: np.ndarray, trace: PoolingTraceMap) -> np.ndarray:
    """Copy each coarse row back to all of its fine vertices."""
    coarse = np.asarray(coarse)
    if coarse.shape[0] != trace.coarse_count:
        raise ValueError(
            f"coarse rows ({coarse.shape[0]}) != trace coarse count ({trace.coarse_count})"
        )
    return coarse[trace.assignment]


def pool_labels(labels: np.ndarray, trace: PoolingTraceMap) -> np.ndarray:
    """Majority label per group; ties -> lowest class index.

    UNLABELED wins only when the whole group is unlabeled.
    """
    labels = np.asarray(labels, dtype=np.int64)
    out = np.full(trace.coarse_count, UNLABELED, dtype=np.int64)
    labeled = labels != UNLABELED
    if labeled.any():
        shifted = labels[labeled]
        groups = trace.assignment[labeled]
        num_classes = int(shifted.max()) + 1
        counts = np.zeros((trace.coarse_count, num_classes), dtype=np.int64)
        np.add.at(counts, (groups, shifted), 1)
        has_any = counts.sum(axis=1) > 0
        # argmax takes the first maximum, i.e. the lowest class index on ties.
        out[has_any] = np.argmax(counts[has_any], axis=1)
    return out


def compose_traces(first: PoolingTraceMap, second: PoolingTraceMap) -> PoolingTraceMap:
    """Trace mapping the finest level of `first` to the coarsest of `second`."""
    if first.coarse_count != second.fine_count:
        raise ValueError("trace maps do not chain")
    return PoolingTraceMap(second.assignment[first.assignment], second.coarse_count)
