"""Trajectory error and image quality scores against hand-computed values."""

import math

import numpy as np
import pytest

from ghosttrack.errors import DegenerateImageError
from ghosttrack.metrics import QualityReport, TrajectoryRecord, prmse, psnr
from ghosttrack.reconstruct import ReconImage


def test_prmse_three_four_five():
    record = TrajectoryRecord([(0.0, 0.0)], [(3.0, 4.0)])
    assert prmse(record) == 5.0


def test_prmse_averages_distances_not_squares():
    record = TrajectoryRecord([(0.0, 0.0), (10.0, 10.0)], [(3.0, 4.0), (10.0, 10.0)])
    assert prmse(record) == 2.5
    # an RMS pool over segments would give sqrt(12.5) instead
    assert prmse(record) != math.sqrt(12.5)


def test_trajectory_record_validation():
    with pytest.raises(ValueError):
        TrajectoryRecord([(0.0, 0.0)], [(1.0, 1.0), (2.0, 2.0)])
    with pytest.raises(ValueError):
        TrajectoryRecord([(0.0, 0.0, 0.0)], [(1.0, 1.0, 1.0)])
    with pytest.raises(ValueError):
        TrajectoryRecord(np.empty((0, 2)), np.empty((0, 2)))
    record = TrajectoryRecord((1.0, 2.0), (4.0, 6.0))  # single pair promotes to (1, 2)
    assert len(record) == 1
    assert prmse(record) == 5.0


def test_psnr_hand_case():
    recon = np.array([[0.0, 1.0], [1.0, 0.5]])  # already spans [0, 1]
    original = np.array([[0.0, 1.0], [1.0, 1.0]])
    report = psnr(recon, original)
    assert abs(report.mse - 0.0625) < 1e-15
    assert abs(report.psnr_db - (-10.0 * math.log10(0.0625))) < 1e-12


def test_psnr_normalizes_the_reconstruction():
    recon = np.array([[0.0, 1.0], [1.0, 0.5]])
    original = np.array([[0.0, 1.0], [1.0, 1.0]])
    base = psnr(recon, original)
    scaled = psnr(recon * 40.0 - 3.0, original)
    assert abs(scaled.psnr_db - base.psnr_db) < 1e-12


def test_psnr_perfect_match_is_infinite():
    original = np.array([[0.0, 1.0], [1.0, 0.0]])
    report = psnr(original * 6.0 + 2.0, original)
    assert report.mse == 0.0
    assert report.psnr_db == math.inf


def test_psnr_accepts_recon_image():
    recon = ReconImage(values=np.array([[0.0, 2.0]]), sample_count=1)
    report = psnr(recon, np.array([[0.0, 1.0]]))
    assert isinstance(report, QualityReport)
    assert report.psnr_db == math.inf


def test_psnr_rejects_bad_input():
    with pytest.raises(ValueError):
        psnr(np.zeros((2, 2)), np.zeros((2, 3)))
    with pytest.raises(ValueError):
        psnr(np.array([[0.0, 1.0]]), np.array([[0.0, 2.0]]))  # reference above 1
    with pytest.raises(DegenerateImageError):
        psnr(np.full((2, 2), 3.3), np.zeros((2, 2)))
