"""Synthetic reference-arm illumination: block-structured Bernoulli speckle.

Each frame is a field-of-view sized grid whose aligned ``macro_pixel``
square blocks are independently lit (``on_value``) with probability
``bernoulli_p`` or dark (``off_value``). Generation is a pure function of
(config, seed, count): the same inputs always reproduce the same stack,
and the first m frames of a longer stack equal the m-frame stack drawn
from the same seed.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ConfigError
from .pgmio import write_pgm


@dataclass(frozen=True)
class SpeckleConfig:
    fov_width: int = 64
    fov_height: int = 64
    macro_pixel: int = 2
    bernoulli_p: float = 0.5
    on_value: float = 1.0
    off_value: float = 0.0

    def __post_init__(self):
        if self.fov_width <= 0 or self.fov_height <= 0:
            raise ConfigError(
                f"field of view must be positive, got {self.fov_width}x{self.fov_height}"
            )
        if self.macro_pixel <= 0:
            raise ConfigError(f"macro_pixel must be positive, got {self.macro_pixel}")
        if self.fov_width % self.macro_pixel or self.fov_height % self.macro_pixel:
            raise ConfigError(
                f"field of view {self.fov_width}x{self.fov_height} is not divisible "
                f"by macro_pixel {self.macro_pixel}"
            )
        if not 0.0 <= self.bernoulli_p <= 1.0:
            raise ConfigError(f"bernoulli_p must be in [0, 1], got {self.bernoulli_p}")
        if not self.on_value > self.off_value >= 0.0:
            raise ConfigError(
                f"need on_value > off_value >= 0, got on={self.on_value} off={self.off_value}"
            )

    @property
    def shape(self) -> tuple[int, int]:
        """(height, width) of one frame."""
        return (self.fov_height, self.fov_width)


@dataclass(frozen=True)
class SpeckleStack:
    """An ordered run of speckle frames plus the recipe that made it.

    ``frames`` has shape (count, height, width). With the default 0/1
    intensity levels it is stored as uint8 bits; other levels use float64.
    """

    frames: np.ndarray
    seed: int
    config: SpeckleConfig

    def __len__(self) -> int:
        return self.frames.shape[0]


def generate_stack(
    cfg: SpeckleConfig, seed: int, count: int, stream: int = 0
) -> SpeckleStack:
    """Draw ``count`` independent speckle frames.

    The RNG stream is derived from (seed, stream), so stacks for distinct
    stream ids are independent while remaining reproducible. Block values
    are drawn frame-major: extending ``count`` never changes earlier
    frames.
    """
    if count < 1:
        raise ValueError(f"count must be >= 1, got {count}")
    if seed < 0 or stream < 0:
        raise ConfigError(f"seed and stream must be nonnegative, got {seed}, {stream}")
    blocks_y = cfg.fov_height // cfg.macro_pixel
    blocks_x = cfg.fov_width // cfg.macro_pixel
    rng = np.random.default_rng(np.random.SeedSequence((seed, stream)))
    bits = (rng.random((count, blocks_y, blocks_x)) < cfg.bernoulli_p).astype(np.uint8)
    bits = bits.repeat(cfg.macro_pixel, axis=1).repeat(cfg.macro_pixel, axis=2)
    if cfg.on_value == 1.0 and cfg.off_value == 0.0:
        frames = bits
    else:
        frames = cfg.off_value + bits.astype(np.float64) * (cfg.on_value - cfg.off_value)
    return SpeckleStack(frames=frames, seed=seed, config=cfg)


def dump_frames(stack: SpeckleStack, directory: str | Path, limit: int | None = None) -> list[Path]:
    """Write frames as 8-bit PGM files (on_value maps to 255), return the paths."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    n = len(stack) if limit is None else min(limit, len(stack))
    on = stack.config.on_value
    paths = []
    for i in range(n):
        img = np.where(stack.frames[i] == on, 255, 0).astype(np.uint8)
        path = directory / f"frame_{i:04d}.pgm"
        write_pgm(path, img)
        paths.append(path)
    return paths
