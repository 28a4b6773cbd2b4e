"""Hot numeric kernels with a numba fast path and a pure-numpy fallback.

Everything expensive in this package reduces to two array kernels over a
stack of speckle frames:

* ``bucket_dot``        -- one inner product per frame against a scene,
* ``weighted_frame_sum`` -- a weighted sum of frames into a single image.

Both exist twice: an ``@njit`` version and a chunked BLAS version. The
active implementation is chosen once at import time from the environment
variable ``GHOSTTRACK_BACKEND``:

* ``auto`` (default) -- numba when importable, else numpy;
* ``numba``          -- require the jit path, fail if numba is missing;
* ``numpy``          -- force the fallback, numba never imported.

Results of the two paths agree to floating-point accumulation order; a
given backend is bit-deterministic run to run. ``ghosttrack bench``
compares their throughput on representative workloads.
"""

from __future__ import annotations

import os
import time

import numpy as np

from .errors import ConfigError

_ENV_VAR = "GHOSTTRACK_BACKEND"

# Chunk of frames converted to float64 at a time; bounds peak memory of the
# fallback path to a few MB regardless of stack length.
_CHUNK = 1024


def _bucket_dot_numpy(frames: np.ndarray, scene: np.ndarray) -> np.ndarray:
    count = frames.shape[0]
    flat = frames.reshape(count, -1)
    flat_scene = np.ascontiguousarray(scene, dtype=np.float64).reshape(-1)
    out = np.empty(count, dtype=np.float64)
    for lo in range(0, count, _CHUNK):
        hi = min(lo + _CHUNK, count)
        out[lo:hi] = flat[lo:hi].astype(np.float64) @ flat_scene
    return out


def _weighted_frame_sum_numpy(frames: np.ndarray, weights: np.ndarray) -> np.ndarray:
    count, height, width = frames.shape
    flat = frames.reshape(count, -1)
    acc = np.zeros(height * width, dtype=np.float64)
    for lo in range(0, count, _CHUNK):
        hi = min(lo + _CHUNK, count)
        acc += weights[lo:hi] @ flat[lo:hi].astype(np.float64)
    return acc.reshape(height, width)


_bucket_dot_numba = None
_weighted_frame_sum_numba = None


def _build_numba_kernels() -> None:
    global _bucket_dot_numba, _weighted_frame_sum_numba
    from numba import njit

    @njit(cache=True)
    def bucket_dot_nb(frames, scene):  # pragma: no cover - jitted
        count, height, width = frames.shape
        out = np.empty(count, dtype=np.float64)
        for i in range(count):
            total = 0.0
            for y in range(height):
                for x in range(width):
                    total += frames[i, y, x] * scene[y, x]
            out[i] = total
        return out

    @njit(cache=True)
    def weighted_frame_sum_nb(frames, weights):  # pragma: no cover - jitted
        count, height, width = frames.shape
        acc = np.zeros((height, width), dtype=np.float64)
        for i in range(count):
            wi = weights[i]
            if wi == 0.0:
                continue
            for y in range(height):
                for x in range(width):
                    acc[y, x] += frames[i, y, x] * wi
        return acc

    _bucket_dot_numba = bucket_dot_nb
    _weighted_frame_sum_numba = weighted_frame_sum_nb


def _select_backend() -> str:
    requested = os.environ.get(_ENV_VAR, "auto").strip().lower()
    if requested not in ("auto", "numba", "numpy"):
        raise ConfigError(
            f"{_ENV_VAR} must be one of auto/numba/numpy, got {requested!r}"
        )
    if requested == "numpy":
        return "numpy"
    try:
        _build_numba_kernels()
        return "numba"
    except ImportError:
        if requested == "numba":
            raise ConfigError(f"{_ENV_VAR}=numba but numba is not importable")
        return "numpy"


_ACTIVE = _select_backend()


def active_backend() -> str:
    """Name of the kernel implementation selected at import time."""
    return _ACTIVE


def bucket_dot(frames: np.ndarray, scene: np.ndarray) -> np.ndarray:
    """Inner product of every frame in a (count, h, w) stack with one scene.

    Returns a float64 vector of length ``count``.
    """
    if frames.ndim != 3:
        raise ValueError(f"frames must be a 3-d stack, got shape {frames.shape}")
    if frames.shape[1:] != scene.shape:
        raise ValueError(
            f"frame shape {frames.shape[1:]} does not match scene shape {scene.shape}"
        )
    if _ACTIVE == "numba":
        return _bucket_dot_numba(frames, np.ascontiguousarray(scene, dtype=np.float64))
    return _bucket_dot_numpy(frames, scene)


def weighted_frame_sum(frames: np.ndarray, weights: np.ndarray) -> np.ndarray:
    """Sum of ``weights[i] * frames[i]`` as a float64 (h, w) image."""
    if frames.ndim != 3:
        raise ValueError(f"frames must be a 3-d stack, got shape {frames.shape}")
    if frames.shape[0] != weights.shape[0]:
        raise ValueError(
            f"{frames.shape[0]} frames but {weights.shape[0]} weights"
        )
    if _ACTIVE == "numba":
        return _weighted_frame_sum_numba(
            frames, np.ascontiguousarray(weights, dtype=np.float64)
        )
    return _weighted_frame_sum_numpy(frames, weights)


def benchmark(frame_count: int = 6000, fov: int = 64, repeats: int = 5) -> list[dict]:
    """Time both kernel implementations on a synthetic workload.

    Returns one record per (kernel, implementation) pair with the best
    wall time over ``repeats`` calls. The numba rows are skipped when
    numba is not importable; compilation happens in a warmup call and is
    excluded from the timing.
    """
    rng = np.random.default_rng(0)
    frames = (rng.random((frame_count, fov, fov)) < 0.5).astype(np.uint8)
    scene = np.zeros((fov, fov), dtype=np.float64)
    scene[fov // 4 : fov // 2, fov // 4 : fov // 2] = 1.0
    weights = rng.standard_normal(frame_count)

    impls: list[tuple[str, dict]] = [
        ("numpy", {"bucket_dot": _bucket_dot_numpy, "weighted_frame_sum": _weighted_frame_sum_numpy}),
    ]
    try:
        _build_numba_kernels()
        impls.append(
            ("numba", {"bucket_dot": _bucket_dot_numba, "weighted_frame_sum": _weighted_frame_sum_numba})
        )
    except ImportError:
        pass

    args = {"bucket_dot": (frames, scene), "weighted_frame_sum": (frames, weights)}
    records = []
    for impl_name, funcs in impls:
        for kernel_name, func in funcs.items():
            func(*args[kernel_name])  # warmup; triggers jit compile
            best = min(
                _timed(func, args[kernel_name]) for _ in range(repeats)
            )
            records.append(
                {
                    "kernel": kernel_name,
                    "impl": impl_name,
                    "frames": frame_count,
                    "fov": fov,
                    "seconds": best,
                }
            )
    return records


def _timed(func, call_args) -> float:
    start = time.perf_counter()
    func(*call_args)
    return time.perf_counter() - start
