"""Command-line interface: subcommands, overrides, and exit codes."""

import dataclasses

import pytest

from ghosttrack.cli import main
from ghosttrack.errors import DegenerateImageError
from ghosttrack.harness import load_config, run_episode, write_config

from test_harness import degenerate_config, find_degenerate_seed, tiny_config

TINY_FLAGS = [
    "--fov-width", "16", "--fov-height", "16", "--macro-pixel", "2",
    "--target-size", "5", "--trajectory-kind", "linear",
    "--start-x", "5", "--start-y", "8", "--segments", "3",
    "--velocity-x", "2", "--velocity-y", "0",
    "--samples-per-segment", "60", "--threshold", "0.6", "--seed", "5",
]


def test_simulate_runs_clean():
    assert main(["simulate", *TINY_FLAGS]) == 0


def test_simulate_writes_artifacts(tmp_path):
    outdir = tmp_path / "run"
    assert main(["simulate", *TINY_FLAGS, "--outdir", str(outdir)]) == 0
    assert (outdir / "accumulated.pgm").exists()
    assert (outdir / "manifest.txt").exists()


def test_flags_override_config_file(tmp_path):
    cfg_path = tmp_path / "base.cfg"
    write_config(tiny_config(), cfg_path)
    outdir = tmp_path / "out"
    code = main([
        "simulate", "--config", str(cfg_path), "--seed", "11",
        "--outdir", str(outdir),
    ])
    assert code == 0
    assert load_config(outdir / "config.txt").seed == 11


def test_usage_errors_exit_1():
    assert main([]) == 1
    assert main(["warp"]) == 1
    assert main(["simulate", "--threshold", "1.5"]) == 1
    assert main(["simulate", "--fov-width", "abc"]) == 1
    assert main(["simulate", "--fov-width", "63"]) == 1  # breaks macro divisibility


def test_degenerate_abort_exits_2():
    seed = find_degenerate_seed()
    cfg = degenerate_config(seed)
    args = [
        "simulate", "--fov-width", "8", "--fov-height", "8", "--macro-pixel", "4",
        "--target-kind", "cross", "--target-size", "3",
        "--trajectory-kind", "linear", "--start-x", "4", "--start-y", "4",
        "--segments", "2", "--velocity-x", "0", "--velocity-y", "0",
        "--samples-per-segment", "2", "--threshold", "0.5", "--seed", str(seed),
    ]
    with pytest.raises(DegenerateImageError):
        run_episode(cfg)  # the API raises; the CLI maps it
    assert main(args) == 2


def test_io_failure_exits_3(tmp_path):
    blocker = tmp_path / "file.txt"
    blocker.write_text("in the way")
    outdir = blocker / "nested"
    assert main(["simulate", *TINY_FLAGS, "--outdir", str(outdir)]) == 3


def test_render_reproduces_simulate(tmp_path):
    first = tmp_path / "a"
    assert main(["simulate", *TINY_FLAGS, "--outdir", str(first)]) == 0
    second = tmp_path / "b"
    code = main(["render", "--config", str(first / "config.txt"), "--outdir", str(second)])
    assert code == 0
    for name in ("accumulated.pgm", "trajectory.csv", "metrics.csv", "manifest.txt"):
        assert (second / name).read_bytes() == (first / name).read_bytes()


def test_render_requires_a_destination(tmp_path):
    cfg_path = tmp_path / "no_outdir.cfg"
    cfg = dataclasses.replace(tiny_config(), outdir=None)
    write_config(cfg, cfg_path)
    assert main(["render", "--config", str(cfg_path)]) == 1


def test_sweep_t_writes_table(tmp_path):
    outdir = tmp_path / "sweep"
    code = main([
        "sweep-t", *TINY_FLAGS, "--values", "0.4,0.7", "--trials", "1",
        "--outdir", str(outdir),
    ])
    assert code == 0
    rows = (outdir / "sweep.csv").read_text().splitlines()
    assert rows[0] == "param,mean_prmse,std_prmse,n_ok,n_failed"
    assert len(rows) == 3


def test_sweep_k_runs_clean():
    assert main(["sweep-k", *TINY_FLAGS, "--values", "30,60", "--trials", "1"]) == 0


def test_sweep_rejects_empty_grid():
    assert main(["sweep-t", *TINY_FLAGS, "--values", ",", "--trials", "1"]) == 1


def test_bench_runs_clean():
    assert main(["bench", "--frames", "64", "--fov", "8", "--repeats", "1"]) == 0
