"""Ensemble time series containers and CSV emission."""

from __future__ import annotations

import io
from dataclasses import dataclass, field

import numpy as np


@dataclass
class SizeSeries:
    """Mean of an observable over an ensemble, with standard errors."""

    times: np.ndarray
    mean: np.ndarray
    stderr: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.mean = np.asarray(self.mean, dtype=float)
        self.stderr = np.asarray(self.stderr, dtype=float)
        if not (len(self.times) == len(self.mean) == len(self.stderr)):
            raise ValueError("times/mean/stderr length mismatch")

    def to_csv(self, columns) -> str:
        """Render as CSV with the given (name, value-or-array) columns.

        The first columns are always t and the series values; extra columns
        repeat per-row metadata so files are self-describing.
        """
        buf = io.StringIO()
        names = [c[0] for c in columns]
        buf.write(",".join(names) + "\n")
        for k in range(len(self.times)):
            row = []
            for _, v in columns:
                if isinstance(v, np.ndarray):
                    row.append(repr(float(v[k])))
                elif isinstance(v, float):
                    row.append(repr(v))
                else:
                    row.append(str(v))
            buf.write(",".join(row) + "\n")
        return buf.getvalue()


def ensemble_series(times, samples, meta=None) -> SizeSeries:
    """Reduce per-trajectory records (n_traj, n_times) to mean and stderr."""
    samples = np.asarray(samples, dtype=float)
    n = samples.shape[0]
    mean = samples.mean(axis=0)
    if n > 1:
        stderr = samples.std(axis=0, ddof=1) / np.sqrt(n)
    else:
        stderr = np.zeros_like(mean)
    return SizeSeries(np.asarray(times, dtype=float), mean, stderr,
                      dict(meta or {}, trajectories=n))
