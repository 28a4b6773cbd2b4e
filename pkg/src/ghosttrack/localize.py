"""Target position estimation from one rough reconstruction.

The rough image is normalized by its peak, pixels above a screening
threshold are kept, and the estimate is the centroid of their
coordinates weighted by normalized intensity. Pixels with non-positive
correlation never participate, even at threshold zero: they are
background fluctuation and would push the centroid out of the bright
region's hull.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateImageError
from .reconstruct import ReconImage


@dataclass(frozen=True)
class ThresholdedSet:
    """Pixels that passed screening, with their peak-normalized values."""

    xs: np.ndarray
    ys: np.ndarray
    values: np.ndarray
    t_used: float

    def __len__(self) -> int:
        return self.xs.shape[0]


@dataclass(frozen=True)
class PositionEstimate:
    """Estimated target center in pixel coordinates."""

    x: float
    y: float
    support_size: int


def _values_of(rough: ReconImage | np.ndarray) -> np.ndarray:
    values = rough.values if isinstance(rough, ReconImage) else np.asarray(rough)
    if values.ndim != 2:
        raise ValueError(f"expected a 2-d image, got shape {values.shape}")
    return values


def threshold_filter(rough: ReconImage | np.ndarray, t: float) -> ThresholdedSet:
    """Keep pixels whose peak-normalized value is positive and >= t.

    The peak pixel always passes (its normalized value is exactly 1), so
    the result is never empty for an image with positive signal.
    """
    if not 0.0 <= t <= 1.0:
        raise ValueError(f"threshold must be in [0, 1], got {t}")
    values = _values_of(rough)
    peak = float(values.max())
    if peak <= 0.0:
        raise DegenerateImageError(
            f"image peak is {peak}; no positive signal to localize"
        )
    norm = values / peak
    mask = (norm >= t) & (norm > 0.0)
    ys, xs = np.nonzero(mask)
    return ThresholdedSet(xs=xs, ys=ys, values=norm[ys, xs], t_used=t)


def centroid(pixels: ThresholdedSet) -> PositionEstimate:
    """Intensity-weighted centroid of a thresholded pixel set."""
    if len(pixels) == 0:
        raise DegenerateImageError("cannot take the centroid of an empty pixel set")
    total = float(pixels.values.sum())
    if total <= 0.0:
        raise DegenerateImageError("thresholded pixel weights sum to zero")
    x = float((pixels.xs * pixels.values).sum() / total)
    y = float((pixels.ys * pixels.values).sum() / total)
    return PositionEstimate(x=x, y=y, support_size=len(pixels))


def localize(rough: ReconImage | np.ndarray, t: float) -> PositionEstimate:
    """Threshold filtering followed by the weighted centroid."""
    return centroid(threshold_filter(rough, t))


def argmax_position(rough: ReconImage | np.ndarray) -> PositionEstimate:
    """Fallback estimate: the coordinates of the image maximum."""
    values = _values_of(rough)
    flat_index = int(values.argmax())
    y, x = np.unravel_index(flat_index, values.shape)
    return PositionEstimate(x=float(x), y=float(y), support_size=1)
