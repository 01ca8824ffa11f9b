"""Running observation normalization.

The statistics accumulate over everything the collector sees.  At export
time the affine transform is folded into the policy's first linear layer,
so the portable policy file keeps consuming raw observations.
"""

from __future__ import annotations

import numpy as np

_VAR_EPS = 1e-8
_CLIP = 10.0


class RunningNormalizer:
    """Per-feature running mean/variance (Chan et al. parallel merge)."""

    def __init__(self, size: int):
        self.size = size
        self.count = 1e-4  # tiny prior avoids a divide-by-zero first batch
        self.mean = np.zeros(size, dtype=np.float64)
        self.var = np.ones(size, dtype=np.float64)

    def update(self, batch: np.ndarray) -> None:
        batch = batch.reshape(-1, self.size).astype(np.float64)
        b_count = batch.shape[0]
        b_mean = batch.mean(axis=0)
        b_var = batch.var(axis=0)
        total = self.count + b_count
        delta = b_mean - self.mean
        self.mean = self.mean + delta * (b_count / total)
        self.var = (
            self.var * self.count
            + b_var * b_count
            + delta**2 * (self.count * b_count / total)
        ) / total
        self.count = total

    @property
    def scale(self) -> np.ndarray:
        return np.sqrt(self.var + _VAR_EPS)

    def normalize(self, x: np.ndarray) -> np.ndarray:
        return np.clip((x - self.mean) / self.scale, -_CLIP, _CLIP)
