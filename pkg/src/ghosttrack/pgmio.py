"""Minimal binary PGM (P5) reader/writer.

Only what the harness needs: 8-bit grayscale, maxval <= 255, comment
lines tolerated on read. Writing always uses maxval 255.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np


def write_pgm(path: str | Path, image: np.ndarray) -> None:
    """Write a 2-d uint8 array as binary PGM."""
    arr = np.asarray(image)
    if arr.ndim != 2:
        raise ValueError(f"expected a 2-d image, got shape {arr.shape}")
    if arr.dtype != np.uint8:
        raise ValueError(f"expected uint8 pixels, got {arr.dtype}")
    height, width = arr.shape
    header = f"P5\n{width} {height}\n255\n".encode("ascii")
    Path(path).write_bytes(header + arr.tobytes())


def read_pgm(path: str | Path) -> np.ndarray:
    """Read a binary PGM into a uint8 array of shape (height, width)."""
    return _read_raw(path)[0]


def read_pgm_scaled(path: str | Path) -> np.ndarray:
    """Read a binary PGM as float64 scaled to [0, 1] by the file's maxval."""
    pixels, maxval = _read_raw(path)
    return pixels.astype(np.float64) / maxval


def _read_raw(path: str | Path) -> tuple[np.ndarray, int]:
    data = Path(path).read_bytes()
    magic, pos = _next_token(data, 0)
    if magic != b"P5":
        raise ValueError(f"{path}: not a binary PGM (magic {magic!r})")
    width, pos = _next_token(data, pos)
    height, pos = _next_token(data, pos)
    maxval, pos = _next_token(data, pos)
    width, height, maxval = int(width), int(height), int(maxval)
    if not (0 < maxval <= 255):
        raise ValueError(f"{path}: unsupported maxval {maxval}")
    # Single whitespace byte separates the header from pixel data.
    pixels = data[pos + 1 : pos + 1 + width * height]
    if len(pixels) < width * height:
        raise ValueError(f"{path}: truncated pixel data")
    return np.frombuffer(pixels, dtype=np.uint8).reshape(height, width), maxval


def _next_token(data: bytes, pos: int) -> tuple[bytes, int]:
    # Skip whitespace and '#' comments, then take one token. Returns the
    # token and the index of the byte right after it.
    n = len(data)
    while pos < n:
        c = data[pos : pos + 1]
        if c == b"#":
            while pos < n and data[pos : pos + 1] != b"\n":
                pos += 1
        elif c.isspace():
            pos += 1
        else:
            break
    start = pos
    while pos < n and not data[pos : pos + 1].isspace():
        pos += 1
    if start == pos:
        raise ValueError("unexpected end of PGM header")
    return data[start:pos], pos


def to_uint8(image: np.ndarray) -> np.ndarray:
    """Min-max normalize a real image to [0, 255] and round to uint8.

    A constant image maps to all zeros.
    """
    arr = np.asarray(image, dtype=np.float64)
    lo = float(arr.min())
    hi = float(arr.max())
    if hi <= lo:
        return np.zeros(arr.shape, dtype=np.uint8)
    scaled = (arr - lo) / (hi - lo) * 255.0
    return np.floor(scaled + 0.5).astype(np.uint8)
