"""Threshold screening and intensity-weighted centroid estimation."""

import numpy as np
import pytest

from ghosttrack.errors import DegenerateImageError
from ghosttrack.localize import (
    argmax_position,
    centroid,
    localize,
    threshold_filter,
)
from ghosttrack.reconstruct import ReconImage, shift2d


def _hand_case():
    # peak 10 at (x=1, y=1), 5 at (x=2, y=1), 6 at (x=1, y=2)
    return np.array([[0.0, 0.0, 0.0], [0.0, 10.0, 5.0], [0.0, 6.0, 0.0]])


def test_threshold_keeps_normalized_support():
    kept = threshold_filter(_hand_case(), 0.6)
    assert sorted(zip(kept.xs, kept.ys)) == [(1, 1), (1, 2)]
    assert sorted(kept.values) == [0.6, 1.0]
    assert kept.t_used == 0.6


def test_centroid_hand_case():
    # weights 1.0 and 0.6 at (1, 1) and (1, 2): centroid (1.0, 1.375)
    est = localize(_hand_case(), 0.6)
    assert abs(est.x - 1.0) < 1e-12
    assert abs(est.y - 1.375) < 1e-12
    assert est.support_size == 2


def test_peak_always_survives():
    est = localize(_hand_case(), 1.0)
    assert (est.x, est.y) == (1.0, 1.0)
    assert est.support_size == 1


def test_nonpositive_pixels_never_participate():
    img = np.array([[-5.0, 0.0], [-1.0, 2.0]])
    kept = threshold_filter(img, 0.0)
    assert len(kept) == 1
    assert (kept.xs[0], kept.ys[0]) == (1, 1)


def test_threshold_range_validation():
    with pytest.raises(ValueError):
        threshold_filter(_hand_case(), -0.1)
    with pytest.raises(ValueError):
        threshold_filter(_hand_case(), 1.1)


def test_degenerate_image_raises():
    with pytest.raises(DegenerateImageError):
        threshold_filter(np.full((3, 3), -1.0), 0.5)
    with pytest.raises(DegenerateImageError):
        threshold_filter(np.zeros((3, 3)), 0.0)


def test_empty_set_centroid_raises():
    from ghosttrack.localize import ThresholdedSet

    empty = ThresholdedSet(
        xs=np.array([], dtype=int), ys=np.array([], dtype=int),
        values=np.array([]), t_used=0.5,
    )
    with pytest.raises(DegenerateImageError):
        centroid(empty)


def test_support_shrinks_monotonically():
    rng = np.random.default_rng(31)
    img = rng.normal(size=(16, 16))
    previous = None
    for t in (0.0, 0.2, 0.4, 0.6, 0.8, 1.0):
        kept = threshold_filter(img, t)
        support = set(zip(kept.xs, kept.ys))
        if previous is not None:
            assert support <= previous
        previous = support


def test_estimate_is_scale_invariant():
    rng = np.random.default_rng(32)
    img = rng.normal(size=(12, 12))
    base = localize(img, 0.37)
    exact = localize(img * 2.0**10, 0.37)
    assert (exact.x, exact.y, exact.support_size) == (base.x, base.y, base.support_size)
    scaled = localize(img * 3.0, 0.37)
    assert scaled.support_size == base.support_size
    assert abs(scaled.x - base.x) < 1e-12
    assert abs(scaled.y - base.y) < 1e-12


def test_estimate_is_shift_equivariant():
    img = np.zeros((16, 16))
    img[5:8, 4:7] = np.array([[1.0, 2.0, 1.0], [2.0, 5.0, 2.0], [1.0, 2.0, 1.0]])
    base = localize(img, 0.3)
    moved = localize(shift2d(img, 3, -2), 0.3)
    assert abs(moved.x - (base.x + 3)) < 1e-12
    assert abs(moved.y - (base.y - 2)) < 1e-12


def test_recon_image_input_accepted():
    recon = ReconImage(values=_hand_case(), sample_count=9)
    est = localize(recon, 0.6)
    assert abs(est.y - 1.375) < 1e-12


def test_argmax_fallback():
    est = argmax_position(_hand_case())
    assert (est.x, est.y, est.support_size) == (1.0, 1.0, 1)
    ties = np.array([[2.0, 2.0], [0.0, 0.0]])
    est = argmax_position(ties)  # first in row-major order wins
    assert (est.x, est.y) == (0.0, 0.0)
