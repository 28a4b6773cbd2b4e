"""End-to-end episode runner, parameter sweeps, and artifact output.

An episode: generate one speckle stack of r*K frames, move the target
once per K samples along its trajectory, measure buckets, reconstruct a
rough image per segment, localize it, compensate the segment's frames by
the estimate, and accumulate. Sweeps rerun episodes over a parameter
grid with per-trial seeds derived by hashing, so extending a grid or the
trial count never changes existing points.

Runs are configured by a flat ``key = value`` text file; every rendered
output directory receives the fully resolved configuration, a metrics
table, the trajectory table, and a manifest of content hashes, which
together make any run reproducible bit for bit.
"""

from __future__ import annotations

import dataclasses
import hashlib
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from .errors import ConfigError, DegenerateImageError
from .forward import NoiseConfig, measure_series
from .localize import PositionEstimate, argmax_position, localize
from .metrics import TrajectoryRecord, prmse, psnr
from .pgmio import to_uint8, write_pgm
from .reconstruct import (
    MEAN_MODES,
    CompensatedAccumulator,
    ReconImage,
    ShiftPolicy,
    correlate,
)
from .scene import (
    TARGET_KINDS,
    GridPosition,
    TrajectoryConfig,
    embed_target,
    make_target,
    trajectory_positions,
)
from .speckle import SpeckleConfig, generate_stack


def _default_reference(speckle: SpeckleConfig) -> tuple[int, int]:
    """Compensation reference when none is configured: the field center."""
    return (speckle.fov_width // 2, speckle.fov_height // 2)


@dataclass(frozen=True)
class ExperimentConfig:
    """Full recipe for one episode. Defaults are the standard benchmark run:

    64x64 field, 15x15 filled square, 2x2 Bernoulli speckle, 300 samples
    per segment, screening threshold 0.7, 20 segments of sinusoidal
    motion, noiseless, zero-fill compensation to the field center.
    """

    speckle: SpeckleConfig = field(default_factory=SpeckleConfig)
    target_kind: str = "square"
    target_size: int = 15
    target_path: str | None = None
    trajectory: TrajectoryConfig = field(default_factory=TrajectoryConfig)
    samples_per_segment: int = 300
    threshold: float = 0.7
    noise: NoiseConfig = field(default_factory=NoiseConfig)
    shift: ShiftPolicy | None = None
    mean_mode: str = "per_segment"
    fallback_argmax: bool = False
    seed: int = 1
    outdir: str | None = None

    def __post_init__(self):
        if self.samples_per_segment < 2:
            raise ConfigError(
                f"samples_per_segment must be >= 2, got {self.samples_per_segment}"
            )
        if not 0.0 <= self.threshold <= 1.0:
            raise ConfigError(f"threshold must be in [0, 1], got {self.threshold}")
        if self.seed < 0:
            raise ConfigError(f"seed must be nonnegative, got {self.seed}")
        if self.target_kind not in TARGET_KINDS:
            raise ConfigError(f"unknown target kind {self.target_kind!r}")
        if self.mean_mode not in MEAN_MODES:
            raise ConfigError(f"unknown mean mode {self.mean_mode!r}")
        if self.shift is None:
            reference = _default_reference(self.speckle)
            object.__setattr__(self, "shift", ShiftPolicy(reference_point=reference))
        rx, ry = self.shift.reference_point
        if not (0 <= rx < self.speckle.fov_width and 0 <= ry < self.speckle.fov_height):
            raise ConfigError(
                f"reference point ({rx}, {ry}) lies outside the "
                f"{self.speckle.fov_height}x{self.speckle.fov_width} field of view"
            )

    @property
    def segments(self) -> int:
        return self.trajectory.segments

    @property
    def total_samples(self) -> int:
        return self.segments * self.samples_per_segment

    @property
    def fov_shape(self) -> tuple[int, int]:
        return self.speckle.shape


@dataclass(frozen=True)
class SegmentRecord:
    """Per-segment outcome: where the target was, where we thought it was."""

    index: int
    position: GridPosition
    truth_center: tuple[float, float]
    estimate: PositionEstimate
    rough: ReconImage
    rough_psnr_db: float
    used_fallback: bool


@dataclass(frozen=True)
class EpisodeResult:
    config: ExperimentConfig
    segments: tuple[SegmentRecord, ...]
    accumulated: ReconImage
    uncompensated: ReconImage
    reference_scene: np.ndarray
    accumulated_psnr_db: float
    uncompensated_psnr_db: float
    prmse: float

    @property
    def truth_centers(self) -> np.ndarray:
        return np.array([s.truth_center for s in self.segments])

    @property
    def estimates(self) -> np.ndarray:
        return np.array([(s.estimate.x, s.estimate.y) for s in self.segments])

    @property
    def rough_psnr_db(self) -> np.ndarray:
        return np.array([s.rough_psnr_db for s in self.segments])

    @property
    def mean_rough_psnr_db(self) -> float:
        return float(np.nanmean(self.rough_psnr_db))

    @property
    def fallback_segments(self) -> tuple[int, ...]:
        return tuple(s.index for s in self.segments if s.used_fallback)


def build_target(cfg: ExperimentConfig) -> np.ndarray:
    return make_target(cfg.target_kind, cfg.target_size, path=cfg.target_path)


def reference_position(
    cfg: ExperimentConfig, target_shape: tuple[int, int]
) -> GridPosition:
    """Placement whose center sits on the compensation reference point."""
    rx, ry = cfg.shift.reference_point
    t_h, t_w = target_shape
    return GridPosition(
        x=int(math.floor(rx - (t_w - 1) / 2.0 + 0.5)),
        y=int(math.floor(ry - (t_h - 1) / 2.0 + 0.5)),
    )


def run_episode(cfg: ExperimentConfig) -> EpisodeResult:
    """Run one full tracking-and-imaging episode, deterministically.

    Raises ``DegenerateImageError`` with the failing segment index when a
    rough image has no positive signal, unless ``fallback_argmax`` is
    set, in which case that segment estimates from the image maximum and
    is flagged in the result.
    """
    target = build_target(cfg)
    fov_shape = cfg.fov_shape
    positions = trajectory_positions(cfg.trajectory, target.shape, fov_shape)
    scenes = [embed_target(target, pos, fov_shape) for pos in positions]
    ref_scene = embed_target(target, reference_position(cfg, target.shape), fov_shape)

    k = cfg.samples_per_segment
    stack = generate_stack(cfg.speckle, cfg.seed, cfg.total_samples)
    per_frame_scenes = [scenes[j] for j in range(cfg.segments) for _ in range(k)]
    buckets = measure_series(stack, per_frame_scenes, cfg.noise)

    accumulator = CompensatedAccumulator(fov_shape, cfg.shift, mean_mode=cfg.mean_mode)
    records = []
    for j in range(cfg.segments):
        seg_frames = stack.frames[j * k : (j + 1) * k]
        seg_buckets = buckets[j * k : (j + 1) * k]
        rough = correlate(seg_frames, seg_buckets)
        used_fallback = False
        try:
            estimate = localize(rough, cfg.threshold)
        except DegenerateImageError as err:
            if not cfg.fallback_argmax:
                raise DegenerateImageError(
                    f"segment {j + 1}: {err}", segment=j + 1
                ) from err
            estimate = argmax_position(rough)
            used_fallback = True
        try:
            rough_db = psnr(rough, scenes[j]).psnr_db
        except DegenerateImageError:
            rough_db = float("nan")
        accumulator.add_segment(seg_frames, seg_buckets, (estimate.x, estimate.y))
        records.append(
            SegmentRecord(
                index=j + 1,
                position=positions[j],
                truth_center=positions[j].center(target.shape),
                estimate=estimate,
                rough=rough,
                rough_psnr_db=rough_db,
                used_fallback=used_fallback,
            )
        )

    accumulated = accumulator.image()
    uncompensated = correlate(stack, buckets)
    record = TrajectoryRecord(
        [r.truth_center for r in records],
        [(r.estimate.x, r.estimate.y) for r in records],
    )
    return EpisodeResult(
        config=cfg,
        segments=tuple(records),
        accumulated=accumulated,
        uncompensated=uncompensated,
        reference_scene=ref_scene,
        accumulated_psnr_db=psnr(accumulated, ref_scene).psnr_db,
        uncompensated_psnr_db=psnr(uncompensated, ref_scene).psnr_db,
        prmse=prmse(record),
    )


# ---------------------------------------------------------------------------
# Sweeps
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SweepResult:
    param_name: str
    values: tuple
    mean_prmse: np.ndarray
    std_prmse: np.ndarray
    mean_psnr: np.ndarray
    std_psnr: np.ndarray
    n_ok: np.ndarray
    n_failed: np.ndarray
    n_trials: int
    base: ExperimentConfig
    failures: tuple[tuple[object, int, str], ...]


def trial_seed(base_seed: int, param_name: str, value, trial: int) -> int:
    """Deterministic per-trial seed, independent of grid layout.

    Hash-derived so that adding grid points or trials never perturbs the
    seeds of existing (value, trial) pairs.
    """
    token = f"{base_seed}|{param_name}|{value!r}|{trial}".encode("ascii")
    return int.from_bytes(hashlib.sha256(token).digest()[:8], "big") >> 1


def _sweep(
    base: ExperimentConfig,
    param_name: str,
    values: Sequence,
    n_trials: int,
    make_cfg: Callable[[ExperimentConfig, object, int], ExperimentConfig],
) -> SweepResult:
    if n_trials < 1:
        raise ValueError(f"n_trials must be >= 1, got {n_trials}")
    if len(values) == 0:
        raise ValueError("sweep needs at least one grid value")
    mean_p, std_p, mean_q, std_q, ok, bad = [], [], [], [], [], []
    failures = []
    for value in values:
        prmses, psnrs = [], []
        fail = 0
        for trial in range(n_trials):
            seed = trial_seed(base.seed, param_name, value, trial)
            cfg = make_cfg(base, value, seed)
            try:
                result = run_episode(cfg)
            except DegenerateImageError as err:
                failures.append((value, trial, str(err)))
                fail += 1
                continue
            prmses.append(result.prmse)
            psnrs.append(result.accumulated_psnr_db)
        mean_p.append(np.mean(prmses) if prmses else np.nan)
        std_p.append(np.std(prmses, ddof=1) if len(prmses) > 1 else 0.0)
        mean_q.append(np.mean(psnrs) if psnrs else np.nan)
        std_q.append(np.std(psnrs, ddof=1) if len(psnrs) > 1 else 0.0)
        ok.append(len(prmses))
        bad.append(fail)
    return SweepResult(
        param_name=param_name,
        values=tuple(values),
        mean_prmse=np.array(mean_p),
        std_prmse=np.array(std_p),
        mean_psnr=np.array(mean_q),
        std_psnr=np.array(std_q),
        n_ok=np.array(ok),
        n_failed=np.array(bad),
        n_trials=n_trials,
        base=base,
        failures=tuple(failures),
    )


def sweep_threshold(
    base: ExperimentConfig, t_values: Sequence[float], n_trials: int = 10
) -> SweepResult:
    """Mean localization error per screening threshold over seeded trials."""
    return _sweep(
        base,
        "threshold",
        list(t_values),
        n_trials,
        lambda b, v, s: dataclasses.replace(b, threshold=float(v), seed=s),
    )


def sweep_samples(
    base: ExperimentConfig, k_values: Sequence[int], n_trials: int = 10
) -> SweepResult:
    """Mean localization error per samples-per-segment count."""
    return _sweep(
        base,
        "samples_per_segment",
        [int(v) for v in k_values],
        n_trials,
        lambda b, v, s: dataclasses.replace(b, samples_per_segment=int(v), seed=s),
    )


# ---------------------------------------------------------------------------
# Flat key=value configuration files
# ---------------------------------------------------------------------------

_BOOL_VALUES = {"true": True, "false": False, "1": True, "0": False}


def _parse_bool(text: str, key: str) -> bool:
    try:
        return _BOOL_VALUES[text.strip().lower()]
    except KeyError:
        raise ConfigError(f"{key}: expected true/false, got {text!r}") from None


def _parse_waypoints(text: str) -> tuple[tuple[float, float], ...]:
    points = []
    for chunk in text.split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        parts = chunk.split(",")
        if len(parts) != 2:
            raise ConfigError(f"waypoint {chunk!r} is not 'x,y'")
        points.append((float(parts[0]), float(parts[1])))
    return tuple(points)


def config_to_mapping(cfg: ExperimentConfig) -> dict[str, str]:
    """Flatten a config to the textual key=value schema (fully resolved)."""
    traj = cfg.trajectory
    out = {
        "fov_width": str(cfg.speckle.fov_width),
        "fov_height": str(cfg.speckle.fov_height),
        "macro_pixel": str(cfg.speckle.macro_pixel),
        "bernoulli_p": repr(cfg.speckle.bernoulli_p),
        "on_value": repr(cfg.speckle.on_value),
        "off_value": repr(cfg.speckle.off_value),
        "target_kind": cfg.target_kind,
        "target_size": str(cfg.target_size),
        "target_path": cfg.target_path or "",
        "trajectory_kind": traj.kind,
        "start_x": repr(traj.start[0]),
        "start_y": repr(traj.start[1]),
        "segments": str(traj.segments),
        "velocity_x": repr(traj.velocity[0]),
        "velocity_y": repr(traj.velocity[1]),
        "drift": repr(traj.drift),
        "amplitude": repr(traj.amplitude),
        "angular_step": repr(traj.angular_step),
        "waypoints": ";".join(f"{x!r},{y!r}" for x, y in traj.waypoints),
        "samples_per_segment": str(cfg.samples_per_segment),
        "threshold": repr(cfg.threshold),
        "noise_kind": cfg.noise.kind,
        "noise_sigma": repr(cfg.noise.sigma),
        "noise_seed": str(cfg.noise.seed),
        "shift_fill": cfg.shift.fill,
        "reference_x": repr(float(cfg.shift.reference_point[0])),
        "reference_y": repr(float(cfg.shift.reference_point[1])),
        "flip_shift": "true" if cfg.shift.flip_shift else "false",
        "mean_mode": cfg.mean_mode,
        "fallback_argmax": "true" if cfg.fallback_argmax else "false",
        "seed": str(cfg.seed),
        "outdir": cfg.outdir or "",
    }
    return out


def config_from_mapping(mapping: dict[str, str]) -> ExperimentConfig:
    """Build a config from key=value pairs; unknown keys are an error.

    An absent or empty reference point stays unset here and resolves to
    the center of whatever field of view the mapping configures.
    """
    defaults = config_to_mapping(ExperimentConfig())
    defaults["reference_x"] = ""
    defaults["reference_y"] = ""
    unknown = set(mapping) - set(defaults)
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(sorted(unknown))}")
    merged = {**defaults, **{k: v.strip() for k, v in mapping.items()}}

    def opt(key: str) -> str | None:
        return merged[key] or None

    speckle = SpeckleConfig(
        fov_width=int(merged["fov_width"]),
        fov_height=int(merged["fov_height"]),
        macro_pixel=int(merged["macro_pixel"]),
        bernoulli_p=float(merged["bernoulli_p"]),
        on_value=float(merged["on_value"]),
        off_value=float(merged["off_value"]),
    )
    trajectory = TrajectoryConfig(
        kind=merged["trajectory_kind"],
        start=(float(merged["start_x"]), float(merged["start_y"])),
        segments=int(merged["segments"]),
        velocity=(float(merged["velocity_x"]), float(merged["velocity_y"])),
        drift=float(merged["drift"]),
        amplitude=float(merged["amplitude"]),
        angular_step=float(merged["angular_step"]),
        waypoints=_parse_waypoints(merged["waypoints"]),
    )
    noise = NoiseConfig(
        kind=merged["noise_kind"],
        sigma=float(merged["noise_sigma"]),
        seed=int(merged["noise_seed"]),
    )
    rx, ry = merged["reference_x"], merged["reference_y"]
    if bool(rx) != bool(ry):
        raise ConfigError("reference_x and reference_y must be given together")
    reference = (float(rx), float(ry)) if rx else _default_reference(speckle)
    shift = ShiftPolicy(
        fill=merged["shift_fill"],
        reference_point=reference,
        flip_shift=_parse_bool(merged["flip_shift"], "flip_shift"),
    )
    return ExperimentConfig(
        speckle=speckle,
        target_kind=merged["target_kind"],
        target_size=int(merged["target_size"]),
        target_path=opt("target_path"),
        trajectory=trajectory,
        samples_per_segment=int(merged["samples_per_segment"]),
        threshold=float(merged["threshold"]),
        noise=noise,
        shift=shift,
        mean_mode=merged["mean_mode"],
        fallback_argmax=_parse_bool(merged["fallback_argmax"], "fallback_argmax"),
        seed=int(merged["seed"]),
        outdir=opt("outdir"),
    )


def load_config(path: str | Path) -> ExperimentConfig:
    """Parse a flat key=value config file ('#' lines are comments)."""
    mapping = {}
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {line!r}")
        key, _, value = line.partition("=")
        mapping[key.strip()] = value.strip()
    return config_from_mapping(mapping)


def write_config(cfg: ExperimentConfig, path: str | Path) -> None:
    """Write the fully resolved configuration in the loadable format."""
    lines = [f"{key} = {value}" for key, value in config_to_mapping(cfg).items()]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


# ---------------------------------------------------------------------------
# Artifact output
# ---------------------------------------------------------------------------


def _fmt(value: float) -> str:
    return f"{value:.6g}"


def _write_csv(path: Path, header: str, rows: list[str]) -> None:
    path.write_text("\n".join([header] + rows) + "\n", encoding="ascii")


def render_outputs(
    result: EpisodeResult | SweepResult, directory: str | Path
) -> dict[str, str]:
    """Materialize a result as PGM images and CSV tables.

    Returns the manifest: file name -> sha256 of its content, also
    written as ``manifest.txt`` in sha256sum format. Reruns of the same
    configuration produce identical hashes.
    """
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    if isinstance(result, EpisodeResult):
        _render_episode(result, directory)
    elif isinstance(result, SweepResult):
        _render_sweep(result, directory)
    else:
        raise TypeError(f"cannot render a {type(result).__name__}")
    names = sorted(
        p.name for p in directory.iterdir() if p.is_file() and p.name != "manifest.txt"
    )
    manifest = {
        name: hashlib.sha256((directory / name).read_bytes()).hexdigest()
        for name in names
    }
    lines = [f"{digest}  {name}" for name, digest in manifest.items()]
    (directory / "manifest.txt").write_text("\n".join(lines) + "\n", encoding="ascii")
    return manifest


def _render_episode(result: EpisodeResult, directory: Path) -> None:
    write_config(result.config, directory / "config.txt")
    write_pgm(directory / "original.pgm", to_uint8(result.reference_scene))
    write_pgm(directory / "uncompensated.pgm", to_uint8(result.uncompensated.values))
    write_pgm(directory / "accumulated.pgm", to_uint8(result.accumulated.values))
    width = max(2, len(str(len(result.segments))))
    for seg in result.segments:
        write_pgm(
            directory / f"rough_{seg.index:0{width}d}.pgm", to_uint8(seg.rough.values)
        )
    rows = [
        f"{seg.index},{_fmt(seg.truth_center[0])},{_fmt(seg.truth_center[1])},"
        f"{_fmt(seg.estimate.x)},{_fmt(seg.estimate.y)}"
        for seg in result.segments
    ]
    _write_csv(directory / "trajectory.csv", "segment,true_x,true_y,est_x,est_y", rows)
    metric_rows = [
        f"prmse,{_fmt(result.prmse)}",
        f"psnr_accumulated_db,{_fmt(result.accumulated_psnr_db)}",
        f"psnr_uncompensated_db,{_fmt(result.uncompensated_psnr_db)}",
        f"psnr_rough_mean_db,{_fmt(result.mean_rough_psnr_db)}",
    ]
    metric_rows += [
        f"psnr_rough_{seg.index}_db,{_fmt(seg.rough_psnr_db)}" for seg in result.segments
    ]
    if result.fallback_segments:
        joined = ";".join(str(i) for i in result.fallback_segments)
        metric_rows.append(f"fallback_segments,{joined}")
    _write_csv(directory / "metrics.csv", "metric,value", metric_rows)


def _render_sweep(result: SweepResult, directory: Path) -> None:
    write_config(result.base, directory / "config.txt")
    rows = [
        f"{value},{_fmt(result.mean_prmse[i])},{_fmt(result.std_prmse[i])},"
        f"{result.n_ok[i]},{result.n_failed[i]}"
        for i, value in enumerate(result.values)
    ]
    _write_csv(
        directory / "sweep.csv", "param,mean_prmse,std_prmse,n_ok,n_failed", rows
    )
