"""Bucket measurement: inner products, batching, and noise streams."""

import numpy as np
import pytest

from ghosttrack.errors import ConfigError
from ghosttrack.forward import (
    NoiseConfig,
    bucket_measure,
    measure_series,
    write_bucket_csv,
)
from ghosttrack.speckle import SpeckleConfig, generate_stack


def test_bucket_is_the_inner_product():
    frame = np.array([[1.0, 0.0], [2.0, 3.0]])
    scene = np.array([[0.5, 1.0], [0.25, 2.0]])
    assert bucket_measure(frame, scene) == 0.5 + 0.0 + 0.5 + 6.0


def test_bucket_shape_mismatch():
    with pytest.raises(ValueError):
        bucket_measure(np.ones((2, 2)), np.ones((2, 3)))


def test_series_matches_per_frame_measurement():
    stack = generate_stack(SpeckleConfig(fov_width=8, fov_height=8), seed=1, count=10)
    scene = np.zeros((8, 8))
    scene[2:5, 3:6] = 1.0
    series = measure_series(stack, [scene] * 10)
    expected = [bucket_measure(stack.frames[i], scene) for i in range(10)]
    assert np.array_equal(series, np.array(expected))


def test_series_batches_by_scene_identity():
    stack = generate_stack(SpeckleConfig(fov_width=8, fov_height=8), seed=2, count=9)
    a = np.zeros((8, 8))
    a[0, 0] = 1.0
    b = np.zeros((8, 8))
    b[7, 7] = 1.0
    # alternating distinct objects defeats batching; result must not care
    scenes = [a if i % 2 == 0 else b for i in range(9)]
    series = measure_series(stack, scenes)
    expected = [bucket_measure(stack.frames[i], scenes[i]) for i in range(9)]
    assert np.array_equal(series, np.array(expected))


def test_series_length_mismatch():
    stack = generate_stack(SpeckleConfig(fov_width=8, fov_height=8), seed=1, count=4)
    with pytest.raises(ValueError):
        measure_series(stack, [np.zeros((8, 8))] * 3)


def test_noise_is_per_frame_and_reproducible():
    stack = generate_stack(SpeckleConfig(fov_width=8, fov_height=8), seed=3, count=6)
    scene = np.ones((8, 8))
    noise = NoiseConfig(kind="additive-gaussian", sigma=0.5, seed=9)
    noisy = measure_series(stack, [scene] * 6, noise)
    again = measure_series(stack, [scene] * 6, noise)
    clean = measure_series(stack, [scene] * 6)
    assert np.array_equal(noisy, again)
    assert not np.array_equal(noisy, clean)
    # the series draw for frame i equals the single-frame draw at index i
    single = [bucket_measure(stack.frames[i], scene, noise, frame_index=i) for i in range(6)]
    assert np.array_equal(noisy, np.array(single))


def test_noise_seed_selects_the_stream():
    stack = generate_stack(SpeckleConfig(fov_width=8, fov_height=8), seed=3, count=6)
    scene = np.ones((8, 8))
    a = measure_series(stack, [scene] * 6, NoiseConfig("additive-gaussian", 0.5, seed=1))
    b = measure_series(stack, [scene] * 6, NoiseConfig("additive-gaussian", 0.5, seed=2))
    assert not np.array_equal(a, b)


def test_disabled_noise_is_exact():
    stack = generate_stack(SpeckleConfig(fov_width=8, fov_height=8), seed=3, count=4)
    scene = np.ones((8, 8))
    clean = measure_series(stack, [scene] * 4)
    zero_sigma = measure_series(stack, [scene] * 4, NoiseConfig("additive-gaussian", 0.0))
    off = measure_series(stack, [scene] * 4, NoiseConfig("none"))
    assert np.array_equal(clean, zero_sigma)
    assert np.array_equal(clean, off)


def test_noise_validation():
    with pytest.raises(ConfigError):
        NoiseConfig(kind="poisson")
    with pytest.raises(ConfigError):
        NoiseConfig(kind="additive-gaussian", sigma=-1.0)


def test_bucket_csv_format(tmp_path):
    path = tmp_path / "y.csv"
    write_bucket_csv(np.array([1.0, 2.5, 0.125]), path)
    assert path.read_text() == "y\n1\n2.5\n0.125\n"
