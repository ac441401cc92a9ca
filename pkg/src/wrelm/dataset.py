"""Ordered one-step-ahead series and their CSV representation.

CSV layout, one header row then one record per step::

    step,set_point,feat_0,...,feat_{z-1},target,valid

Floats are written with 17 significant digits so a write/read cycle is
lossless; ``valid`` is ``1`` or ``0``.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np


class DatasetFormatError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


@dataclass(frozen=True)
class SeriesDataset:
    """Record ``k`` pairs the features of step ``k`` with the value observed at step ``k+1``."""

    step: np.ndarray  # int64, strictly increasing
    set_point: np.ndarray  # int64
    features: np.ndarray  # (n, z) float64
    target: np.ndarray  # (n,) float64
    valid: np.ndarray  # (n,) bool

    def __post_init__(self):
        n = self.step.shape[0]
        if self.features.ndim != 2:
            raise ValueError(f"features must be 2-D, got shape {self.features.shape}")
        for name in ("set_point", "target", "valid"):
            if getattr(self, name).shape != (n,):
                raise ValueError(f"{name} has shape {getattr(self, name).shape}, expected ({n},)")
        if self.features.shape[0] != n:
            raise ValueError("features row count does not match step count")
        if n > 1 and not np.all(np.diff(self.step) > 0):
            raise ValueError("step indices must be strictly increasing")

    def __len__(self) -> int:
        return self.step.shape[0]

    @property
    def z(self) -> int:
        return self.features.shape[1]

    def subset(self, index) -> "SeriesDataset":
        return SeriesDataset(
            self.step[index],
            self.set_point[index],
            self.features[index],
            self.target[index],
            self.valid[index],
        )

    @classmethod
    def from_arrays(cls, step, set_point, features, target, valid=None) -> "SeriesDataset":
        target = np.asarray(target, dtype=np.float64)
        if valid is None:
            valid = np.ones(target.shape[0], dtype=bool)
        return cls(
            np.asarray(step, dtype=np.int64),
            np.asarray(set_point, dtype=np.int64),
            np.asarray(features, dtype=np.float64),
            target,
            np.asarray(valid, dtype=bool),
        )


def header(z: int) -> list[str]:
    return ["step", "set_point", *(f"feat_{j}" for j in range(z)), "target", "valid"]


def write_csv(ds: SeriesDataset, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header(ds.z))
        for k in range(len(ds)):
            w.writerow(
                [
                    int(ds.step[k]),
                    int(ds.set_point[k]),
                    *(f"{v:.17g}" for v in ds.features[k]),
                    f"{ds.target[k]:.17g}",
                    1 if ds.valid[k] else 0,
                ]
            )


def read_csv(path) -> SeriesDataset:
    path = Path(path)
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            head = next(reader)
        except StopIteration:
            raise DatasetFormatError("empty file", 1) from None
        z = len(head) - 4
        if z < 1 or head != header(z):
            raise DatasetFormatError(f"unexpected header {head}", 1)
        steps, sps, feats, targets, valid = [], [], [], [], []
        for row in reader:
            line = reader.line_num
            if not row:
                continue
            if len(row) != z + 4:
                raise DatasetFormatError(f"expected {z + 4} fields, got {len(row)}", line)
            try:
                steps.append(int(row[0]))
                sps.append(int(row[1]))
                feats.append([float(v) for v in row[2 : 2 + z]])
                targets.append(float(row[2 + z]))
            except ValueError as exc:
                raise DatasetFormatError(str(exc), line) from None
            if row[-1] not in ("0", "1"):
                raise DatasetFormatError(f"valid flag must be 0 or 1, got {row[-1]!r}", line)
            valid.append(row[-1] == "1")
            if len(steps) > 1 and steps[-1] <= steps[-2]:
                raise DatasetFormatError("step indices must be strictly increasing", line)
    features = np.array(feats, dtype=np.float64).reshape(len(feats), z)
    return SeriesDataset.from_arrays(steps, sps, features, targets, valid)
