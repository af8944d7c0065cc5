import csv
import io
import os
import subprocess
import sys

import numpy as np
import pytest

from rclust.cli import main
from rclust.dataio import write_ucr_tsv
from rclust.experiments import (
    DEFAULT_GRID_KERNELS,
    DEFAULT_GRID_LENGTHS,
    diagnose,
    read_manifest,
    render_tune,
    scale,
    synthetic_suite,
    tune,
)
from rclust.pipeline import PipelineConfig
from rclust.kernelbank import BankConfig


@pytest.fixture
def sine_tsv(tmp_path, sine_dataset):
    path = tmp_path / "Sine_TRAIN.tsv"
    write_ucr_tsv(sine_dataset, path)
    return str(path)


def drop_timings(text):
    rows = list(csv.DictReader(io.StringIO(text)))
    for r in rows:
        r.pop("wall_ms")
    return rows


def test_cluster_console_line(sine_tsv, capsys):
    assert main(["cluster", sine_tsv, "--runs", "2"]) == 0
    out = capsys.readouterr().out
    assert "best_ari=" in out and "retained_dims=" in out and "runs=2" in out


def test_cluster_no_pca(sine_tsv, capsys):
    assert main(["cluster", sine_tsv, "--runs", "1", "--no-pca"]) == 0
    assert "retained_dims=500" in capsys.readouterr().out


def test_missing_file_exit_2(tmp_path, capsys):
    missing = str(tmp_path / "absent.tsv")
    assert main(["cluster", missing]) == 2
    assert "absent.tsv" in capsys.readouterr().err


def test_bad_flag_values_exit_2(sine_tsv):
    assert main(["cluster", sine_tsv, "--kernel-length", "8"]) == 2
    assert main(["cluster", sine_tsv, "--runs", "0"]) == 2
    with pytest.raises(SystemExit) as exc:
        main(["cluster", sine_tsv, "--weight-mode", "gauss"])
    assert exc.value.code == 2


def test_runtime_failure_exit_1(sine_tsv, capsys):
    assert main(["cluster", sine_tsv, "-k", "500", "--runs", "1"]) == 1


def test_cluster_outputs_are_reproducible(sine_tsv, tmp_path):
    for name in ("a", "b"):
        assert main(["cluster", sine_tsv, "--runs", "2", "--seed", "4",
                     "--out", str(tmp_path / f"{name}.csv"),
                     "--save-bank", str(tmp_path / f"{name}.json"),
                     "--dump-features", str(tmp_path / f"{name}-f.csv")]) == 0
    a, b = (tmp_path / "a.csv").read_text(), (tmp_path / "b.csv").read_text()
    assert drop_timings(a) == drop_timings(b)
    assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()
    assert (tmp_path / "a-f.csv").read_bytes() == (tmp_path / "b-f.csv").read_bytes()


def test_load_bank_reuses_saved_bank(sine_tsv, tmp_path, capsys):
    bank = str(tmp_path / "bank.json")
    assert main(["cluster", sine_tsv, "--runs", "1", "--save-bank", bank]) == 0
    assert main(["cluster", sine_tsv, "--runs", "1", "--load-bank", bank,
                 "--dump-features", str(tmp_path / "f1.csv")]) == 0
    assert main(["cluster", sine_tsv, "--runs", "1",
                 "--dump-features", str(tmp_path / "f0.csv")]) == 0
    assert (tmp_path / "f0.csv").read_bytes() == (tmp_path / "f1.csv").read_bytes()
    (tmp_path / "broken.json").write_text("{")
    assert main(["cluster", sine_tsv, "--load-bank", str(tmp_path / "broken.json")]) == 2


def test_threads_flag_and_env(sine_tsv, tmp_path):
    script = ("import sys; from rclust.cli import main; "
              "sys.exit(main(sys.argv[1:]))")
    outs = []
    for threads, env_threads in [("1", None), ("4", None), (None, "3")]:
        env = dict(os.environ, NUMBA_NUM_THREADS="4")
        if env_threads:
            env["RCLUST_THREADS"] = env_threads
        path = tmp_path / f"t{len(outs)}.csv"
        cmd = [sys.executable, "-c", script, "cluster", sine_tsv, "--runs", "2",
               "--out", str(path)]
        if threads:
            cmd += ["--threads", threads]
        subprocess.run(cmd, env=env, check=True, capture_output=True)
        outs.append(drop_timings(path.read_text()))
    assert outs[0] == outs[1] == outs[2]


def test_bad_threads_env(sine_tsv, monkeypatch):
    monkeypatch.setenv("RCLUST_THREADS", "many")
    assert main(["cluster", sine_tsv]) == 2


def test_benchmark_synthetic(tmp_path, capsys):
    out = tmp_path / "bench"
    assert main(["benchmark", "--synthetic", "3", "--runs", "2", "--kernels", "100",
                 "--out", str(out)]) == 0
    scores = (out / "scores.csv").read_text().splitlines()
    assert scores[0] == "dataset,R-Clustering" and len(scores) == 4
    summary = (out / "summary.csv").read_text().splitlines()
    assert len(summary) == 2 and summary[1].startswith("R-Clustering,1.00,")
    assert not (out / "friedman.json").exists()


def test_benchmark_manifest_and_identical_external(tmp_path, sine_dataset, capsys):
    write_ucr_tsv(sine_dataset, tmp_path / "A_TRAIN.tsv")
    write_ucr_tsv(sine_dataset, tmp_path / "B_TRAIN.tsv")
    (tmp_path / "list.txt").write_text("# two copies\nA,A_TRAIN.tsv,\nB,B_TRAIN.tsv,\n")
    assert [e.name for e in read_manifest(tmp_path / "list.txt")] == ["A", "B"]
    assert main(["benchmark", "--manifest", str(tmp_path / "list.txt"), "--runs", "1",
                 "--out", str(tmp_path / "o")]) == 0
    assert len((tmp_path / "o" / "scores.csv").read_text().splitlines()) == 3
    (tmp_path / "ext3.csv").write_text(
        "dataset,X,Y\n" + "".join(f"d{i},{v},{v}\n" for i, v in enumerate([0.1, 0.5, 0.3])))
    assert main(["benchmark", "--external", str(tmp_path / "ext3.csv"),
                 "--out", str(tmp_path / "e")]) == 0
    out = capsys.readouterr().out
    assert "p=1 " in out and "rejected=false" in out
    assert "Yes" not in (tmp_path / "e" / "pairwise.md").read_text()


def test_benchmark_external_holm_column(tmp_path):
    rng = np.random.default_rng(0)
    names = ["R-Clustering"] + [f"alg{j}" for j in range(8)]
    scores = rng.random((30, 9))
    scores[:, 0] += 0.5
    lines = ["dataset," + ",".join(names)]
    lines += [f"d{i}," + ",".join(f"{v:.4f}" for v in row) for i, row in enumerate(scores)]
    (tmp_path / "ext.csv").write_text("\n".join(lines) + "\n")
    assert main(["benchmark", "--external", str(tmp_path / "ext.csv"),
                 "--out", str(tmp_path / "o")]) == 0
    rows = list(csv.DictReader(open(tmp_path / "o" / "control.csv")))
    assert [r["holm_alpha"] for r in rows] == [
        "0.006250", "0.007143", "0.008333", "0.010000",
        "0.012500", "0.016667", "0.025000", "0.050000"]
    assert all(r["algorithm_1"] == "R-Clustering" for r in rows)


def test_benchmark_schema_errors(tmp_path):
    (tmp_path / "bad.csv").write_text("dataset,X,Y\nd0,0.1\n")
    assert main(["benchmark", "--external", str(tmp_path / "bad.csv")]) == 2
    (tmp_path / "m.txt").write_text("only-a-name\n")
    assert main(["benchmark", "--manifest", str(tmp_path / "m.txt")]) == 2
    assert main(["benchmark"]) == 2


def test_diagnose_small(capsys):
    report = diagnose(seeds=4, num_features=200, series_length=200, max_lag=10)
    assert set(report.rejection_rate) == {"legacy-sorted", "permuted-quantiles"}
    assert report.mean_rate("legacy-sorted") >= 0.9
    assert main(["diagnose", "--seeds", "2", "--kernels", "100", "--length", "100",
                 "--max-lag", "5", "--format", "csv"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "lag,legacy-sorted,permuted-quantiles" and len(lines) == 6


def test_tune_shapes(capsys):
    suite = synthetic_suite(3, n=30, length=64)
    rows, table = tune(suite, [100, 500], [7, 9], PipelineConfig(runs=1))
    assert len(rows) == 4 and table.scores.shape == (3, 4)
    assert [r.mean_rank for r in rows] == sorted(r.mean_rank for r in rows)
    one, _ = tune(suite, [100], [9], PipelineConfig(runs=1))
    assert one[0].mean_rank == 1.0
    assert render_tune(one).splitlines()[2].startswith("| 100-9 | 1.00 |")
    assert list(DEFAULT_GRID_KERNELS) == [100, 500, 1000, 5000, 10000]
    assert list(DEFAULT_GRID_LENGTHS) == [7, 9, 11, 13]
    assert main(["tune", "--synthetic", "2", "--runs", "1", "--grid-kernels", "100",
                 "--grid-lengths", "7,9"]) == 0
    assert capsys.readouterr().out.count("| 100-") == 2


def test_scale_small(capsys):
    report = scale(lengths=[200, 400], sizes=[50, 100], fixed_size=20, fixed_length=100,
                   classes=2, config=PipelineConfig(runs=1, bank=BankConfig(num_features=50)))
    assert len(report.length_times) == 2 and all(t > 0 for t in report.size_times)
    assert np.isfinite(report.length_slope) and np.isfinite(report.size_slope)
    assert main(["scale", "--lengths", "100,200", "--sizes", "20,40", "--fixed-size", "10",
                 "--fixed-length", "80", "--classes", "2", "--kernels", "50"]) == 0
    assert "length_slope=" in capsys.readouterr().out


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "rclust", "--help"], capture_output=True,
                       text=True)
    assert r.returncode == 0
    for cmd in ("cluster", "benchmark", "diagnose", "tune", "scale"):
        assert cmd in r.stdout
