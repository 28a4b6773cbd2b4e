"""Correlation reconstruction and shift-compensated accumulation.

A reconstruction is the fluctuation correlation between the speckle
frames and the bucket readings: per pixel, the mean over samples of
(frame deviation) * (bucket deviation). With few samples this is a noisy
"rough" image; a moving target smears it. Compensation translates each
segment's frames so the estimated target center lands on a fixed
reference point, then averages the per-segment reconstructions, so the
target accumulates at one place while background fluctuations average
down.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from . import backend
from .errors import ConfigError
from .pgmio import to_uint8, write_pgm
from .speckle import SpeckleStack

FILL_KINDS = ("zero", "wrap")
MEAN_MODES = ("per_segment", "global")


@dataclass(frozen=True)
class ReconImage:
    """A correlation image and the number of samples behind it."""

    values: np.ndarray
    sample_count: int

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape


@dataclass(frozen=True)
class ShiftPolicy:
    """How compensation translates frames.

    ``reference_point`` is the canonical (x, y) center the target is
    mapped to. ``fill`` controls pixels vacated by a translation: zero
    fill leaves them dark, wrap rolls content around the edges. With
    ``flip_shift`` the translation direction is negated, which moves the
    target away from the reference instead; it exists only for studying
    that (wrong) convention and is never the default.
    """

    fill: str = "zero"
    reference_point: tuple[float, float] = (32.0, 32.0)
    flip_shift: bool = False

    def __post_init__(self):
        if self.fill not in FILL_KINDS:
            raise ConfigError(f"unknown fill kind {self.fill!r}")

    def shift_vector(self, estimated_center: tuple[float, float]) -> tuple[int, int]:
        """Integer (dx, dy) that maps the estimated center onto the reference."""
        ex, ey = float(estimated_center[0]), float(estimated_center[1])
        if not (math.isfinite(ex) and math.isfinite(ey)):
            raise ValueError(f"estimated center must be finite, got ({ex}, {ey})")
        rx, ry = self.reference_point
        dx = _round_half_up(rx - ex)
        dy = _round_half_up(ry - ey)
        if self.flip_shift:
            return (-dx, -dy)
        return (dx, dy)


def _round_half_up(value: float) -> int:
    return int(math.floor(value + 0.5))


def _frames_of(stack: SpeckleStack | np.ndarray) -> np.ndarray:
    frames = stack.frames if isinstance(stack, SpeckleStack) else np.asarray(stack)
    if frames.ndim != 3:
        raise ValueError(f"expected a (count, h, w) stack, got shape {frames.shape}")
    return frames


def correlate(frames: SpeckleStack | np.ndarray, buckets: np.ndarray) -> ReconImage:
    """Fluctuation correlation of a frame stack with its bucket series.

    Computed as the mean over samples of frame * (bucket - bucket mean),
    which equals the doubly centered product sum up to a term bounded by
    accumulation roundoff (the bucket deviations sum to zero). A constant
    bucket series short-circuits to the exact zero image.
    """
    frames = _frames_of(frames)
    buckets = np.asarray(buckets, dtype=np.float64).ravel()
    count = frames.shape[0]
    if count == 0 or buckets.shape[0] == 0:
        raise ValueError("correlate needs at least one sample")
    if buckets.shape[0] != count:
        raise ValueError(f"{count} frames but {buckets.shape[0]} buckets")
    centered = buckets - buckets.mean()
    if not centered.any():
        values = np.zeros(frames.shape[1:], dtype=np.float64)
    else:
        values = backend.weighted_frame_sum(frames, centered) / count
    return ReconImage(values=values, sample_count=count)


def shift2d(image: np.ndarray, dx: int, dy: int, fill: str = "zero") -> np.ndarray:
    """Translate a 2-d array by integer (dx, dy): out[y, x] = in[y - dy, x - dx]."""
    if fill not in FILL_KINDS:
        raise ConfigError(f"unknown fill kind {fill!r}")
    if fill == "wrap":
        return np.roll(image, (dy, dx), axis=(0, 1))
    height, width = image.shape
    out = np.zeros_like(image)
    src_x = slice(max(0, -dx), width - max(0, dx))
    src_y = slice(max(0, -dy), height - max(0, dy))
    dst_x = slice(max(0, dx), width + min(0, dx))
    dst_y = slice(max(0, dy), height + min(0, dy))
    if src_x.start < src_x.stop and src_y.start < src_y.stop:
        out[dst_y, dst_x] = image[src_y, src_x]
    return out


def shift_stack(frames: np.ndarray, dx: int, dy: int, fill: str = "zero") -> np.ndarray:
    """Translate every frame of a (count, h, w) stack by the same vector."""
    if fill not in FILL_KINDS:
        raise ConfigError(f"unknown fill kind {fill!r}")
    if fill == "wrap":
        return np.roll(frames, (dy, dx), axis=(1, 2))
    count, height, width = frames.shape
    out = np.zeros_like(frames)
    src_x = slice(max(0, -dx), width - max(0, dx))
    src_y = slice(max(0, -dy), height - max(0, dy))
    dst_x = slice(max(0, dx), width + min(0, dx))
    dst_y = slice(max(0, dy), height + min(0, dy))
    if src_x.start < src_x.stop and src_y.start < src_y.stop:
        out[:, dst_y, dst_x] = frames[:, src_y, src_x]
    return out


def translate_frame(
    frame: np.ndarray,
    estimated_center: tuple[float, float],
    policy: ShiftPolicy,
) -> np.ndarray:
    """Shift one frame so the estimated target center lands on the reference."""
    dx, dy = policy.shift_vector(estimated_center)
    return shift2d(np.asarray(frame), dx, dy, policy.fill)


class CompensatedAccumulator:
    """Running average of translated per-segment reconstructions.

    Segments are added one at a time so callers can inspect the partial
    image as information accumulates. ``mean_mode`` selects how the
    correlation means are taken:

    * ``per_segment`` (default): each segment is reconstructed with its
      own sample means and the results are averaged.
    * ``global``: one correlation over all translated frames using means
      over every sample seen so far.
    """

    def __init__(
        self,
        fov_shape: tuple[int, int],
        policy: ShiftPolicy,
        mean_mode: str = "per_segment",
    ):
        if mean_mode not in MEAN_MODES:
            raise ConfigError(f"unknown mean mode {mean_mode!r}")
        self.fov_shape = fov_shape
        self.policy = policy
        self.mean_mode = mean_mode
        self.segments = 0
        self.sample_count = 0
        self._rough_sum = np.zeros(fov_shape, dtype=np.float64)
        self._product_sum = np.zeros(fov_shape, dtype=np.float64)
        self._frame_sum = np.zeros(fov_shape, dtype=np.float64)
        self._bucket_sum = 0.0

    def add_segment(
        self,
        frames: np.ndarray,
        buckets: np.ndarray,
        estimated_center: tuple[float, float],
    ) -> ReconImage:
        """Translate one segment's frames by its estimate and fold it in.

        Returns the translated rough image of this segment alone.
        """
        frames = _frames_of(frames)
        buckets = np.asarray(buckets, dtype=np.float64).ravel()
        if frames.shape[1:] != self.fov_shape:
            raise ValueError(
                f"segment frames {frames.shape[1:]} do not match FOV {self.fov_shape}"
            )
        dx, dy = self.policy.shift_vector(estimated_center)
        shifted = shift_stack(frames, dx, dy, self.policy.fill)
        rough = correlate(shifted, buckets)
        self._rough_sum += rough.values
        if self.mean_mode == "global":
            self._product_sum += backend.weighted_frame_sum(shifted, buckets)
            self._frame_sum += shifted.sum(axis=0, dtype=np.float64)
            self._bucket_sum += float(buckets.sum())
        self.segments += 1
        self.sample_count += frames.shape[0]
        return rough

    def image(self) -> ReconImage:
        """Accumulated reconstruction over the segments added so far."""
        if self.segments == 0:
            raise ValueError("no segments accumulated yet")
        if self.mean_mode == "per_segment":
            values = self._rough_sum / self.segments
        else:
            n = self.sample_count
            values = self._product_sum / n - self._frame_sum / n * (self._bucket_sum / n)
        return ReconImage(values=values, sample_count=self.sample_count)


def reconstruct_compensated(
    stack: SpeckleStack | np.ndarray,
    buckets: np.ndarray,
    centers: Sequence[tuple[float, float]],
    samples_per_segment: int,
    policy: ShiftPolicy,
    mean_mode: str = "per_segment",
) -> ReconImage:
    """Accumulated reconstruction of r segments of K samples each.

    The stack must hold exactly ``len(centers) * samples_per_segment``
    frames; segment j uses frames [j*K, (j+1)*K) and the j-th estimated
    center.
    """
    frames = _frames_of(stack)
    buckets = np.asarray(buckets, dtype=np.float64).ravel()
    segments = len(centers)
    if samples_per_segment < 1:
        raise ValueError(f"samples_per_segment must be >= 1, got {samples_per_segment}")
    total = segments * samples_per_segment
    if frames.shape[0] != total:
        raise ValueError(
            f"stack has {frames.shape[0]} frames, expected "
            f"{segments} x {samples_per_segment} = {total}"
        )
    if buckets.shape[0] != total:
        raise ValueError(f"{total} frames but {buckets.shape[0]} buckets")
    acc = CompensatedAccumulator(frames.shape[1:], policy, mean_mode=mean_mode)
    for j in range(segments):
        lo = j * samples_per_segment
        hi = lo + samples_per_segment
        acc.add_segment(frames[lo:hi], buckets[lo:hi], centers[j])
    return acc.image()


def write_recon_pgm(recon: ReconImage, path: str | Path) -> None:
    """Export min-max normalized to 8-bit PGM."""
    write_pgm(path, to_uint8(recon.values))


def write_recon_csv(recon: ReconImage, path: str | Path) -> None:
    """Export raw values as a CSV grid at full precision."""
    lines = [",".join(f"{v:.17g}" for v in row) for row in recon.values]
    Path(path).write_text("\n".join(lines) + "\n", encoding="ascii")
