"""Ghost imaging of a moving target with trajectory compensation.

The pipeline: Bernoulli speckle illumination (`speckle`), a small target
moving across the field of view (`scene`), bucket measurements
(`forward`), fluctuation-correlation reconstruction and shift
compensation (`reconstruct`), threshold-and-centroid localization
(`localize`), quality metrics (`metrics`), and an episode/sweep driver
with file output (`harness`). Heavy kernels live in `backend`, which
picks a compiled or pure numpy implementation at import time via the
``GHOSTTRACK_BACKEND`` environment variable.
"""

from .backend import active_backend, benchmark, bucket_dot, weighted_frame_sum
from .errors import ConfigError, DegenerateImageError
from .forward import NoiseConfig, bucket_measure, measure_series, write_bucket_csv
from .harness import (
    EpisodeResult,
    ExperimentConfig,
    SegmentRecord,
    SweepResult,
    config_from_mapping,
    config_to_mapping,
    load_config,
    render_outputs,
    run_episode,
    sweep_samples,
    sweep_threshold,
    trial_seed,
    write_config,
)
from .localize import (
    PositionEstimate,
    ThresholdedSet,
    argmax_position,
    centroid,
    localize,
    threshold_filter,
)
from .metrics import QualityReport, TrajectoryRecord, prmse, psnr
from .pgmio import read_pgm, to_uint8, write_pgm
from .reconstruct import (
    CompensatedAccumulator,
    ReconImage,
    ShiftPolicy,
    correlate,
    reconstruct_compensated,
    shift2d,
    shift_stack,
    translate_frame,
    write_recon_csv,
    write_recon_pgm,
)
from .scene import (
    GridPosition,
    TrajectoryConfig,
    clamp_position,
    embed_target,
    make_target,
    trajectory_position,
    trajectory_positions,
)
from .speckle import SpeckleConfig, SpeckleStack, dump_frames, generate_stack

__version__ = "0.1.0"

__all__ = [
    "ConfigError",
    "DegenerateImageError",
    "SpeckleConfig",
    "SpeckleStack",
    "generate_stack",
    "dump_frames",
    "GridPosition",
    "TrajectoryConfig",
    "make_target",
    "clamp_position",
    "trajectory_position",
    "trajectory_positions",
    "embed_target",
    "NoiseConfig",
    "bucket_measure",
    "measure_series",
    "write_bucket_csv",
    "ReconImage",
    "ShiftPolicy",
    "correlate",
    "shift2d",
    "shift_stack",
    "translate_frame",
    "CompensatedAccumulator",
    "reconstruct_compensated",
    "write_recon_pgm",
    "write_recon_csv",
    "ThresholdedSet",
    "PositionEstimate",
    "threshold_filter",
    "centroid",
    "localize",
    "argmax_position",
    "TrajectoryRecord",
    "QualityReport",
    "prmse",
    "psnr",
    "ExperimentConfig",
    "SegmentRecord",
    "EpisodeResult",
    "SweepResult",
    "run_episode",
    "sweep_threshold",
    "sweep_samples",
    "trial_seed",
    "load_config",
    "write_config",
    "config_from_mapping",
    "config_to_mapping",
    "render_outputs",
    "read_pgm",
    "write_pgm",
    "to_uint8",
    "active_backend",
    "bucket_dot",
    "weighted_frame_sum",
    "benchmark",
    "__version__",
]
