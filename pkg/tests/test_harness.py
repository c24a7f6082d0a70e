import csv
import hashlib
import json

import numpy as np
import pytest

from helmfmm.cli import main
from helmfmm.harness import (
    ExperimentConfig,
    read_particle_file,
    run_experiment,
)


def test_run_experiment_record_schema():
    cfg = ExperimentConfig(
        distribution="uniform-cube", n=400, kappa_d=8.0, order=4, ncrit=32,
        check_error=50, seed=1,
    )
    record = run_experiment(cfg)
    d = record.to_json_dict()
    assert set(d) == {"config", "timings", "counts", "errors"}
    assert d["config"]["n"] == 400
    # kappa = kappa_d / root box side, and the unit cube's box side is ~1
    assert 8.0 / d["config"]["kappa"] == pytest.approx(1.0, rel=0.2)
    assert set(d["timings"]) == {
        "tree", "blank", "precompute", "upward", "m2l_p2p", "downward", "total",
    }
    assert set(d["counts"]) == {
        "cells", "leaves", "symbols", "effective_expansions", "p2p_pairs",
        "m2l_events",
    }
    assert d["errors"] is not None
    assert d["errors"]["l2"] < 1e-2
    assert record.potentials.shape == (400,)


def test_run_experiment_ncrit_auto_picks_from_sweep():
    cfg = ExperimentConfig(n=300, order=3, ncrit="auto")
    record = run_experiment(cfg)
    assert record.config["ncrit"] in (32, 64, 128, 256)


def test_json_and_csv_outputs(tmp_path):
    cfg = ExperimentConfig(n=200, order=3, ncrit=64, check_error=20)
    record = run_experiment(cfg)

    jpath = tmp_path / "run.json"
    record.write_json(jpath)
    loaded = json.loads(jpath.read_text())
    assert loaded == record.to_json_dict()

    cpath = tmp_path / "runs.csv"
    record.write_csv(cpath)
    record.write_csv(cpath)  # appends, header only once
    with cpath.open() as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 2
    assert rows[0]["config.n"] == "200"
    assert float(rows[0]["errors.l2"]) == record.errors["l2"]


def test_read_particle_file(tmp_path):
    path = tmp_path / "particles.txt"
    path.write_text(
        "# positions and complex charges\n"
        "0.1 0.2 0.3  1.0 -0.5\n"
        "\n"
        "0.9 0.8 0.7  0.0 2.0  # trailing note\n"
    )
    pts, q = read_particle_file(path)
    assert pts.shape == (2, 3)
    assert q[0] == 1.0 - 0.5j
    assert q[1] == 2.0j


def test_read_particle_file_errors(tmp_path):
    bad = tmp_path / "bad.txt"
    bad.write_text("0.1 0.2 0.3 1.0\n")
    with pytest.raises(ValueError):
        read_particle_file(bad)
    empty = tmp_path / "empty.txt"
    empty.write_text("# nothing here\n")
    with pytest.raises(ValueError):
        read_particle_file(empty)


def test_experiment_from_particle_file(tmp_path):
    rng = np.random.default_rng(0)
    pts = rng.uniform(size=(100, 3))
    q = rng.uniform(size=(100, 2))
    lines = [
        f"{p[0]} {p[1]} {p[2]} {c[0]} {c[1]}" for p, c in zip(pts, q)
    ]
    path = tmp_path / "cloud.txt"
    path.write_text("\n".join(lines) + "\n")
    cfg = ExperimentConfig(order=3, ncrit=32, check_error=30, particle_file=str(path))
    record = run_experiment(cfg)
    assert record.config["n"] == 100
    assert record.errors["l2"] < 1e-2


def test_cli_writes_json_and_prints_digest(tmp_path, capsys):
    out = tmp_path / "run.json"
    code = main([
        "--distribution", "sphere", "--n", "300", "--kappa-d", "4.0",
        "--order", "3", "--ncrit", "32", "--check-error", "25",
        "--seed", "3", "--output", str(out),
    ])
    assert code == 0
    summary = json.loads(capsys.readouterr().out)
    assert summary["config"]["distribution"] == "sphere"
    assert len(summary["potentials_sha256"]) == 64
    assert json.loads(out.read_text())["config"] == summary["config"]


def test_cli_digest_is_reproducible(tmp_path, capsys):
    args = ["--n", "200", "--order", "3", "--ncrit", "32", "--seed", "5"]
    main(args)
    first = json.loads(capsys.readouterr().out)["potentials_sha256"]
    main(args)
    second = json.loads(capsys.readouterr().out)["potentials_sha256"]
    assert first == second


def test_cli_csv_append(tmp_path, capsys):
    cpath = tmp_path / "sweep.csv"
    for n in ("100", "150"):
        main(["--n", n, "--order", "3", "--ncrit", "32", "--csv", str(cpath)])
        capsys.readouterr()
    with cpath.open() as fh:
        rows = list(csv.DictReader(fh))
    assert [r["config.n"] for r in rows] == ["100", "150"]
