"""Localization and image quality scores.

Position error is the mean per-segment Euclidean distance between true
and estimated centers (the average sits outside the square root, so this
is a mean radial error, not a true RMS). Image quality is peak
signal-to-noise ratio against a [0, 1] reference after min-max
normalizing the reconstruction, which makes the score invariant to the
arbitrary scale of correlation images.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateImageError
from .reconstruct import ReconImage


@dataclass(frozen=True)
class TrajectoryRecord:
    """Paired true and estimated center sequences, one entry per segment."""

    truth: np.ndarray
    estimates: np.ndarray

    def __init__(self, truth, estimates):
        truth = np.atleast_2d(np.asarray(truth, dtype=np.float64))
        estimates = np.atleast_2d(np.asarray(estimates, dtype=np.float64))
        if truth.shape != estimates.shape or truth.ndim != 2 or truth.shape[1] != 2:
            raise ValueError(
                f"need matching (r, 2) coordinate arrays, got {truth.shape} "
                f"and {estimates.shape}"
            )
        if truth.shape[0] < 1:
            raise ValueError("need at least one segment")
        object.__setattr__(self, "truth", truth)
        object.__setattr__(self, "estimates", estimates)

    def __len__(self) -> int:
        return self.truth.shape[0]


@dataclass(frozen=True)
class QualityReport:
    mse: float
    psnr_db: float


def prmse(record: TrajectoryRecord) -> float:
    """Mean Euclidean distance between true and estimated centers, in pixels."""
    deltas = record.truth - record.estimates
    return float(np.hypot(deltas[:, 0], deltas[:, 1]).mean())


def psnr(recon: ReconImage | np.ndarray, original: np.ndarray) -> QualityReport:
    """Peak signal-to-noise ratio of a reconstruction against a reference.

    The reconstruction is min-max normalized to [0, 1]; the reference
    must already lie in [0, 1]. After normalization the peak is 1, so
    the score is -10 log10(MSE), reported as infinite when the images
    match exactly.
    """
    values = recon.values if isinstance(recon, ReconImage) else np.asarray(recon)
    original = np.asarray(original, dtype=np.float64)
    if values.shape != original.shape:
        raise ValueError(
            f"reconstruction {values.shape} and reference {original.shape} differ"
        )
    if original.min() < 0.0 or original.max() > 1.0:
        raise ValueError("reference image must lie in [0, 1]")
    lo = float(values.min())
    hi = float(values.max())
    if hi <= lo:
        raise DegenerateImageError("constant reconstruction cannot be normalized")
    normalized = (values - lo) / (hi - lo)
    mse = float(np.mean((normalized - original) ** 2))
    if mse == 0.0:
        return QualityReport(mse=0.0, psnr_db=math.inf)
    return QualityReport(mse=mse, psnr_db=-10.0 * math.log10(mse))
