"""Command-line front end.

Subcommands:

* ``simulate``  run one episode, print metrics, optionally write artifacts
* ``sweep-t``   sweep the screening threshold over seeded trials
* ``sweep-k``   sweep the per-segment sample count over seeded trials
* ``render``    regenerate the full artifact set from a saved config file
* ``bench``     time the compiled kernels against the pure numpy path

Exit codes: 0 success, 1 bad configuration or usage, 2 degenerate-signal
abort, 3 I/O failure.
"""

from __future__ import annotations

import argparse
import sys

from . import backend
from .errors import ConfigError, DegenerateImageError
from .harness import (
    config_from_mapping,
    config_to_mapping,
    load_config,
    render_outputs,
    run_episode,
    sweep_samples,
    sweep_threshold,
)

_CONFIG_FLAGS = [
    ("fov_width", "field-of-view width in pixels"),
    ("fov_height", "field-of-view height in pixels"),
    ("macro_pixel", "speckle cell edge in pixels"),
    ("bernoulli_p", "probability a speckle cell is lit"),
    ("on_value", "intensity of a lit cell"),
    ("off_value", "intensity of a dark cell"),
    ("target_kind", "square, cross, ring, or bitmap"),
    ("target_size", "target edge length in pixels"),
    ("target_path", "PGM file for bitmap targets"),
    ("trajectory_kind", "linear, sinusoid, or waypoints"),
    ("start_x", "initial target center, x"),
    ("start_y", "initial target center, y"),
    ("segments", "number of dwell segments"),
    ("velocity_x", "per-segment step, x (linear)"),
    ("velocity_y", "per-segment step, y (linear)"),
    ("drift", "per-segment drift along x (sinusoid)"),
    ("amplitude", "oscillation amplitude in pixels (sinusoid)"),
    ("angular_step", "phase advance per segment (sinusoid)"),
    ("waypoints", "semicolon list of x,y centers (waypoints)"),
    ("samples_per_segment", "speckle samples per segment"),
    ("threshold", "screening threshold in [0, 1]"),
    ("noise_kind", "none or additive-gaussian"),
    ("noise_sigma", "bucket noise standard deviation"),
    ("noise_seed", "seed for the noise stream"),
    ("shift_fill", "fill for shifted-out pixels: zero or wrap"),
    ("reference_x", "compensation reference point, x"),
    ("reference_y", "compensation reference point, y"),
    ("flip_shift", "negate the compensation shift (true/false)"),
    ("mean_mode", "correlation means: per_segment or global"),
    ("fallback_argmax", "argmax estimate on degenerate segments (true/false)"),
    ("seed", "base random seed"),
    ("outdir", "directory for rendered artifacts"),
]


def _add_config_flags(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("configuration")
    group.add_argument("--config", metavar="FILE", help="key=value config file")
    for key, help_text in _CONFIG_FLAGS:
        group.add_argument(
            "--" + key.replace("_", "-"),
            dest="cfg_" + key,
            metavar="V",
            help=help_text,
        )


def _resolve_config(args: argparse.Namespace):
    mapping = {}
    if args.config:
        mapping.update(config_to_mapping(load_config(args.config)))
    for key, _ in _CONFIG_FLAGS:
        value = getattr(args, "cfg_" + key)
        if value is not None:
            mapping[key] = value
    return config_from_mapping(mapping)


def _parse_grid(text: str, cast) -> list:
    values = [cast(chunk) for chunk in text.split(",") if chunk.strip()]
    if not values:
        raise ConfigError(f"empty value grid: {text!r}")
    return values


def _print_sweep(result) -> None:
    print(f"{'param':>10} {'mean_prmse':>12} {'std_prmse':>12} {'n_ok':>6} {'n_failed':>9}")
    for i, value in enumerate(result.values):
        print(
            f"{value!s:>10} {result.mean_prmse[i]:>12.4f} "
            f"{result.std_prmse[i]:>12.4f} {result.n_ok[i]:>6d} {result.n_failed[i]:>9d}"
        )


def _cmd_simulate(args: argparse.Namespace) -> int:
    cfg = _resolve_config(args)
    result = run_episode(cfg)
    print(f"backend              {backend.active_backend()}")
    print(
        f"segments             {cfg.segments}  x  {cfg.samples_per_segment} samples"
        f"  =  {cfg.total_samples} frames"
    )
    print(f"prmse                {result.prmse:.4f} px")
    print(f"psnr accumulated     {result.accumulated_psnr_db:.2f} dB")
    print(f"psnr uncompensated   {result.uncompensated_psnr_db:.2f} dB")
    print(f"psnr rough (mean)    {result.mean_rough_psnr_db:.2f} dB")
    if result.fallback_segments:
        joined = ", ".join(str(i) for i in result.fallback_segments)
        print(f"fallback segments    {joined}")
    if cfg.outdir:
        manifest = render_outputs(result, cfg.outdir)
        print(f"wrote {len(manifest) + 1} files to {cfg.outdir}")
    return 0


def _cmd_sweep_t(args: argparse.Namespace) -> int:
    cfg = _resolve_config(args)
    values = _parse_grid(args.values, float)
    result = sweep_threshold(cfg, values, n_trials=args.trials)
    _print_sweep(result)
    if cfg.outdir:
        render_outputs(result, cfg.outdir)
        print(f"wrote sweep table to {cfg.outdir}")
    return 0


def _cmd_sweep_k(args: argparse.Namespace) -> int:
    cfg = _resolve_config(args)
    values = _parse_grid(args.values, int)
    result = sweep_samples(cfg, values, n_trials=args.trials)
    _print_sweep(result)
    if cfg.outdir:
        render_outputs(result, cfg.outdir)
        print(f"wrote sweep table to {cfg.outdir}")
    return 0


def _cmd_render(args: argparse.Namespace) -> int:
    cfg = load_config(args.config)
    outdir = args.outdir or cfg.outdir
    if not outdir:
        raise ConfigError("render needs --outdir or an outdir entry in the config")
    result = run_episode(cfg)
    manifest = render_outputs(result, outdir)
    print(f"wrote {len(manifest) + 1} files to {outdir}")
    return 0


def _cmd_bench(args: argparse.Namespace) -> int:
    rows = backend.benchmark(
        frame_count=args.frames, fov=args.fov, repeats=args.repeats
    )
    print(f"{'kernel':<22} {'impl':<6} {'frames':>7} {'fov':>5} {'seconds':>10}")
    for row in rows:
        print(
            f"{row['kernel']:<22} {row['impl']:<6} {row['frames']:>7d} "
            f"{row['fov']:>5d} {row['seconds']:>10.4f}"
        )
    return 0


class _Parser(argparse.ArgumentParser):
    """Routes usage errors through the library's exit-code scheme."""

    def error(self, message):
        raise ConfigError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ghosttrack", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run one tracking episode")
    _add_config_flags(p)
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("sweep-t", help="sweep the screening threshold")
    _add_config_flags(p)
    p.add_argument("--values", default="0.1,0.3,0.5,0.7,0.9", help="comma list")
    p.add_argument("--trials", type=int, default=10, help="trials per grid value")
    p.set_defaults(func=_cmd_sweep_t)

    p = sub.add_parser("sweep-k", help="sweep samples per segment")
    _add_config_flags(p)
    p.add_argument("--values", default="50,100,200,300,500", help="comma list")
    p.add_argument("--trials", type=int, default=10, help="trials per grid value")
    p.set_defaults(func=_cmd_sweep_k)

    p = sub.add_parser("render", help="rebuild artifacts from a saved config")
    p.add_argument("--config", required=True, metavar="FILE")
    p.add_argument("--outdir", metavar="DIR", help="overrides the config's outdir")
    p.set_defaults(func=_cmd_render)

    p = sub.add_parser("bench", help="time compiled vs pure numpy kernels")
    p.add_argument("--frames", type=int, default=6000)
    p.add_argument("--fov", type=int, default=64)
    p.add_argument("--repeats", type=int, default=5)
    p.set_defaults(func=_cmd_bench)

    return parser


def main(argv: list[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except ConfigError as err:
        print(f"ghosttrack: configuration error: {err}", file=sys.stderr)
        return 1
    except ValueError as err:
        print(f"ghosttrack: configuration error: {err}", file=sys.stderr)
        return 1
    except DegenerateImageError as err:
        print(f"ghosttrack: degenerate signal: {err}", file=sys.stderr)
        return 2
    except OSError as err:
        print(f"ghosttrack: i/o error: {err}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
