"""Targets, motion, and placement into the field of view.

Coordinates follow one convention everywhere: x indexes columns, y
indexes rows, origin at the top-left pixel. Arrays are indexed
``[y, x]``. A target placement is the integer top-left corner of the
target footprint; the target center derived from it is fractional for
even target sizes.

Motion is pixel-quantized and segment-indexed: the motion model yields a
continuous center path, which is rounded to a pixel placement and then
clamped so the whole target stays inside the field of view. The clamped
placement is the ground truth used everywhere downstream.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError
from .pgmio import read_pgm_scaled

TARGET_KINDS = ("square", "cross", "ring", "bitmap")
TRAJECTORY_KINDS = ("linear", "sinusoid", "waypoints")


@dataclass(frozen=True)
class GridPosition:
    """Integer top-left corner of an embedded target."""

    x: int
    y: int

    def center(self, target_shape: tuple[int, int]) -> tuple[float, float]:
        """Center (x, y) of a target of shape (height, width) placed here."""
        t_h, t_w = target_shape
        return (self.x + (t_w - 1) / 2.0, self.y + (t_h - 1) / 2.0)


@dataclass(frozen=True)
class TrajectoryConfig:
    """Per-segment motion model for the target center.

    kind:
        ``linear``    -- center(j) = start + velocity * j
        ``sinusoid``  -- x(j) = x0 + drift * j, y(j) = y0 + amplitude * sin(angular_step * j)
        ``waypoints`` -- explicit center list, entry j-1 for segment j
    """

    kind: str = "sinusoid"
    start: tuple[float, float] = (12.0, 32.0)
    segments: int = 20
    velocity: tuple[float, float] = (1.0, 0.0)
    drift: float = 2.0
    amplitude: float = 8.0
    angular_step: float = 0.35
    waypoints: tuple[tuple[float, float], ...] = field(default_factory=tuple)

    def __post_init__(self):
        if self.kind not in TRAJECTORY_KINDS:
            raise ConfigError(f"unknown trajectory kind {self.kind!r}")
        if self.segments < 1:
            raise ConfigError(f"segments must be >= 1, got {self.segments}")
        if self.kind == "waypoints" and len(self.waypoints) < self.segments:
            raise ConfigError(
                f"waypoints trajectory needs {self.segments} entries, "
                f"got {len(self.waypoints)}"
            )


def make_target(
    kind: str,
    size: int = 15,
    path: str | None = None,
    ring_thickness: int | None = None,
) -> np.ndarray:
    """Build a transmission image with values in [0, 1].

    Generated glyphs (square, cross, ring) are binary and ``size`` x
    ``size``. ``bitmap`` loads a PGM from ``path`` and rescales it by the
    file's maxval; ``size`` is ignored for it.
    """
    if kind not in TARGET_KINDS:
        raise ConfigError(f"unknown target kind {kind!r}")
    if kind == "bitmap":
        if path is None:
            raise ConfigError("bitmap target requires a file path")
        target = read_pgm_scaled(path)
        if not (target > 0).any():
            raise ConfigError(f"bitmap target {path} has no positive pixels")
        return target
    if size < 3:
        raise ConfigError(f"target size must be >= 3, got {size}")
    if kind == "square":
        return np.ones((size, size), dtype=np.float64)
    if kind == "cross":
        target = np.zeros((size, size), dtype=np.float64)
        mid = (size - 1) // 2
        target[mid, :] = 1.0
        target[:, mid] = 1.0
        return target
    # ring: annulus of pixels whose center distance to the image center
    # falls in (outer - thickness, outer]
    outer = (size - 1) / 2.0
    thickness = ring_thickness if ring_thickness is not None else max(2, size // 5)
    inner = outer - thickness
    yy, xx = np.mgrid[0:size, 0:size]
    dist = np.hypot(xx - outer, yy - outer)
    return ((dist <= outer) & (dist > inner)).astype(np.float64)


def _round_half_up(value: float) -> int:
    return int(math.floor(value + 0.5))


def clamp_position(
    pos: GridPosition, target_shape: tuple[int, int], fov_shape: tuple[int, int]
) -> GridPosition:
    """Clamp a placement so the full target footprint stays inside the FOV."""
    t_h, t_w = target_shape
    fov_h, fov_w = fov_shape
    if t_w > fov_w or t_h > fov_h:
        raise ConfigError(
            f"target {t_h}x{t_w} does not fit in field of view {fov_h}x{fov_w}"
        )
    x = min(max(pos.x, 0), fov_w - t_w)
    y = min(max(pos.y, 0), fov_h - t_h)
    return GridPosition(x=x, y=y)


def trajectory_position(
    traj: TrajectoryConfig,
    j: int,
    target_shape: tuple[int, int],
    fov_shape: tuple[int, int],
) -> GridPosition:
    """Placement of the target for segment ``j`` (1-based).

    The continuous center path is converted to a top-left corner, rounded
    half-up, and clamped into the field of view.
    """
    if not 1 <= j <= traj.segments:
        raise ValueError(f"segment index {j} outside 1..{traj.segments}")
    x0, y0 = traj.start
    if traj.kind == "linear":
        cx = x0 + traj.velocity[0] * j
        cy = y0 + traj.velocity[1] * j
    elif traj.kind == "sinusoid":
        cx = x0 + traj.drift * j
        cy = y0 + traj.amplitude * math.sin(traj.angular_step * j)
    else:
        cx, cy = traj.waypoints[j - 1]
    t_h, t_w = target_shape
    raw = GridPosition(
        x=_round_half_up(cx - (t_w - 1) / 2.0),
        y=_round_half_up(cy - (t_h - 1) / 2.0),
    )
    return clamp_position(raw, target_shape, fov_shape)


def trajectory_positions(
    traj: TrajectoryConfig,
    target_shape: tuple[int, int],
    fov_shape: tuple[int, int],
) -> list[GridPosition]:
    """Placements for all segments 1..segments."""
    return [
        trajectory_position(traj, j, target_shape, fov_shape)
        for j in range(1, traj.segments + 1)
    ]


def embed_target(
    target: np.ndarray, pos: GridPosition, fov_shape: tuple[int, int]
) -> np.ndarray:
    """Copy the target into a zero FOV-sized frame with its top-left at pos.

    Raises if any part of the target would fall outside the field of
    view; nothing is ever silently clipped.
    """
    t_h, t_w = target.shape
    fov_h, fov_w = fov_shape
    if pos.x < 0 or pos.y < 0 or pos.x + t_w > fov_w or pos.y + t_h > fov_h:
        raise ValueError(
            f"target {t_h}x{t_w} at ({pos.x}, {pos.y}) exits the "
            f"{fov_h}x{fov_w} field of view"
        )
    frame = np.zeros((fov_h, fov_w), dtype=np.float64)
    frame[pos.y : pos.y + t_h, pos.x : pos.x + t_w] = target
    return frame
