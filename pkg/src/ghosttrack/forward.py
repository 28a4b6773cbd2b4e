"""Bucket-detector measurement: total intensity behind the target.

The detector has no spatial resolution. For each illumination frame it
reports the inner product of the frame with the scene transmission, plus
optional additive Gaussian noise on the scalar reading. Noise draws use
one RNG substream per frame index, so a series is reproducible no matter
how the frames are scheduled.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from . import backend
from .errors import ConfigError
from .speckle import SpeckleStack

NOISE_KINDS = ("none", "additive-gaussian")

# Stream id separating noise draws from speckle generation draws.
_NOISE_STREAM = 1


@dataclass(frozen=True)
class NoiseConfig:
    kind: str = "none"
    sigma: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.kind not in NOISE_KINDS:
            raise ConfigError(f"unknown noise kind {self.kind!r}")
        if self.sigma < 0:
            raise ConfigError(f"noise sigma must be >= 0, got {self.sigma}")

    @property
    def enabled(self) -> bool:
        return self.kind == "additive-gaussian" and self.sigma > 0


def _noise_draw(noise: NoiseConfig, frame_index: int) -> float:
    rng = np.random.default_rng(
        np.random.SeedSequence((noise.seed, _NOISE_STREAM, frame_index))
    )
    return float(rng.normal(0.0, noise.sigma))


def bucket_measure(
    frame: np.ndarray,
    scene: np.ndarray,
    noise: NoiseConfig | None = None,
    frame_index: int = 0,
) -> float:
    """Total intensity of one frame seen through one scene."""
    frame = np.asarray(frame)
    scene = np.asarray(scene)
    if frame.shape != scene.shape:
        raise ValueError(
            f"frame shape {frame.shape} does not match scene shape {scene.shape}"
        )
    value = float(frame.astype(np.float64, copy=False).ravel() @ scene.astype(np.float64, copy=False).ravel())
    if noise is not None and noise.enabled:
        value += _noise_draw(noise, frame_index)
    return value


def measure_series(
    stack: SpeckleStack | np.ndarray,
    scenes: Sequence[np.ndarray],
    noise: NoiseConfig | None = None,
) -> np.ndarray:
    """Bucket readings for a whole stack, one per frame.

    ``scenes`` supplies the scene each frame sees and must match the
    stack length; a segmented run passes the same array object for every
    frame of a segment, and consecutive frames sharing a scene object are
    measured in one batched kernel call.
    """
    frames = stack.frames if isinstance(stack, SpeckleStack) else np.asarray(stack)
    count = frames.shape[0]
    if len(scenes) != count:
        raise ValueError(f"{count} frames but {len(scenes)} scenes")
    out = np.empty(count, dtype=np.float64)
    start = 0
    while start < count:
        ref = scenes[start]
        end = start + 1
        while end < count and scenes[end] is ref:
            end += 1
        out[start:end] = backend.bucket_dot(
            frames[start:end], np.asarray(ref, dtype=np.float64)
        )
        start = end
    if noise is not None and noise.enabled:
        for i in range(count):
            out[i] += _noise_draw(noise, i)
    return out


def write_bucket_csv(series: np.ndarray, path: str | Path) -> None:
    """Single-column CSV export with header ``y``."""
    lines = ["y"] + [f"{v:.6g}" for v in np.asarray(series).ravel()]
    Path(path).write_text("\n".join(lines) + "\n", encoding="ascii")
