"""Experiment drivers behind the CLI: benchmark, diagnose, tune, scale."""

from __future__ import annotations

import csv
import time
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .dataio import DatasetSource, ResultRecord, load_ucr_tsv, synth_dataset
from .errors import ConfigError, ParseError
from .kernelbank import BankConfig, fit_bank
from .pipeline import PipelineConfig, run_once, run_protocol
from .randkit import derive_stream
from .stats import (
    ScoreTable,
    aggregate,
    control_wilcoxon,
    friedman_test,
    ljung_box,
    pairwise_wilcoxon,
)
from .transform import transform_dataset

DEFAULT_GRID_KERNELS = (100, 500, 1000, 5000, 10000)
DEFAULT_GRID_LENGTHS = (7, 9, 11, 13)
DEFAULT_SCALE_LENGTHS = tuple(1000 * 2**i for i in range(7))  # 1k .. 64k
DEFAULT_SCALE_SIZES = (500, 1000, 2000, 4000, 8000, 16000)


@dataclass(frozen=True)
class ManifestEntry:
    name: str
    train_path: str | None
    test_path: str | None


def read_manifest(path) -> list:
    """Parse ``name,train_path,test_path`` lines; blank and ``#`` lines skipped.

    Relative paths are resolved against the manifest's directory. Either
    path may be empty but not both.
    """
    path = Path(path)
    if not path.is_file():
        raise ParseError("no such manifest", path)
    base = path.parent
    entries = []
    for lineno, line in enumerate(path.read_text().splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = [p.strip() for p in line.split(",")]
        if len(parts) not in (2, 3) or not parts[0]:
            raise ParseError("expected name,train_path,test_path", path, lineno)
        parts += [""] * (3 - len(parts))
        name, train, test = parts
        if not train and not test:
            raise ParseError(f"dataset {name!r} has no file", path, lineno)
        resolve = lambda p: str(base / p) if p and not Path(p).is_absolute() else (p or None)
        entries.append(ManifestEntry(name, resolve(train), resolve(test)))
    if not entries:
        raise ParseError("manifest lists no datasets", path)
    return entries


def load_manifest_datasets(entries, merge_policy="merge", znormalize=False) -> list:
    out = []
    for e in entries:
        src = DatasetSource(e.train_path, e.test_path, merge_policy, name=e.name)
        out.append(load_ucr_tsv(src, znormalize=znormalize, name=e.name))
    return out


def synthetic_suite(count: int, seed: int = 0, n: int = 60, length: int = 128) -> list:
    """Desk-scale labelled datasets (blobs-sine, 2..4 classes, varying noise)."""
    out = []
    for i in range(count):
        classes = 2 + i % 3
        noise = 0.5 + 0.5 * (i % 4)
        out.append(synth_dataset("blobs-sine", n, length, classes,
                                 derive_stream(seed, "synthetic-suite", i), noise=noise,
                                 name=f"synth{i:02d}"))
    return out


def read_score_csv(path) -> ScoreTable:
    """Read ``dataset,<algorithm>,...`` rows of ARI values."""
    path = Path(path)
    if not path.is_file():
        raise ParseError("no such score file", path)
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or len(rows[0]) < 2 or rows[0][0].strip().lower() != "dataset":
        raise ParseError("header must be dataset,<algorithm>,...", path, 1)
    algorithms = [h.strip() for h in rows[0][1:]]
    names, scores = [], []
    for lineno, row in enumerate(rows[1:], start=2):
        if not row or not "".join(row).strip():
            continue
        if len(row) != len(algorithms) + 1:
            raise ParseError(f"expected {len(algorithms) + 1} columns, got {len(row)}",
                             path, lineno)
        try:
            scores.append([float(v) for v in row[1:]])
        except ValueError:
            raise ParseError("non-numeric score", path, lineno) from None
        names.append(row[0].strip())
    if not names:
        raise ParseError("no data rows", path)
    return ScoreTable(names, algorithms, np.asarray(scores))


def score_table_csv(table: ScoreTable) -> str:
    lines = [",".join(["dataset"] + table.algorithm_names)]
    for name, row in zip(table.dataset_names, table.scores):
        lines.append(",".join([name] + [f"{v:.6f}" for v in row]))
    return "\n".join(lines) + "\n"


def score_table_markdown(table: ScoreTable) -> str:
    lines = ["| Dataset | " + " | ".join(table.algorithm_names) + " |",
             "|---|" + "---|" * len(table.algorithm_names)]
    for name, row in zip(table.dataset_names, table.scores):
        lines.append(f"| {name} | " + " | ".join(f"{v:.3f}" for v in row) + " |")
    return "\n".join(lines) + "\n"


@dataclass
class BenchmarkResult:
    table: ScoreTable
    records: list
    summary: list
    friedman: object = None
    control: object = None
    pairwise: object = None


def run_benchmark(datasets, config: PipelineConfig, base_seed: int = 0,
                  external: ScoreTable | None = None, name: str = "R-Clustering",
                  alpha: float = 0.05) -> BenchmarkResult:
    """Best-of-runs ARI per dataset, merged with external scores, then tested.

    With no ``datasets`` the score table is ``external`` alone (re-analysis of
    published numbers). Statistical tests run when there are at least two
    algorithm columns and two datasets.
    """
    records, names, best = [], [], []
    for ds in datasets:
        if ds.labels is None:
            raise ConfigError(f"dataset {ds.name!r} has no labels; ARI needs labels")
        cfg = replace(config, k=ds.n_classes)
        t0 = time.perf_counter()
        outcome = run_protocol(ds, cfg, base_seed)
        wall = (time.perf_counter() - t0) * 1e3
        records.append(ResultRecord(ds.name, cfg.label(), base_seed, cfg.runs,
                                    outcome.aris, outcome.best_ari, wall,
                                    outcome.retained_dims))
        names.append(ds.name)
        best.append(outcome.best_ari)

    if datasets:
        table = ScoreTable(names, [name], np.asarray(best)[:, None])
        if external is not None:
            if name in external.algorithm_names:
                raise ConfigError(f"external scores already contain a {name!r} column")
            index = {d: i for i, d in enumerate(external.dataset_names)}
            missing = [d for d in names if d not in index]
            if missing:
                raise ConfigError(f"external scores lack datasets: {', '.join(missing)}")
            ext = external.scores[[index[d] for d in names]]
            table = ScoreTable(names, [name] + external.algorithm_names,
                               np.hstack([table.scores, ext]))
    elif external is not None:
        table = external
    else:
        raise ConfigError("benchmark needs datasets or an external score table")

    result = BenchmarkResult(table, records, aggregate(table))
    if table.scores.shape[1] >= 2 and table.scores.shape[0] >= 2:
        result.friedman = friedman_test(table, alpha)
        control = name if name in table.algorithm_names else table.algorithm_names[0]
        result.control = control_wilcoxon(table, control, alpha)
        result.pairwise = pairwise_wilcoxon(table, alpha)
    return result


@dataclass
class DiagnoseReport:
    max_lag: int
    seeds: int
    rejection_rate: dict = field(default_factory=dict)  # mode -> per-lag array

    def mean_rate(self, mode: str) -> float:
        return float(np.mean(self.rejection_rate[mode]))

    def to_markdown(self) -> str:
        modes = list(self.rejection_rate)
        lines = ["| lag | " + " | ".join(modes) + " |", "|---|" + "---|" * len(modes)]
        for h in range(self.max_lag):
            lines.append(f"| {h + 1} | " + " | ".join(
                f"{self.rejection_rate[m][h]:.3f}" for m in modes) + " |")
        lines.append("| mean | " + " | ".join(f"{self.mean_rate(m):.3f}" for m in modes)
                     + " |")
        return "\n".join(lines) + "\n"

    def to_csv(self) -> str:
        modes = list(self.rejection_rate)
        lines = ["lag," + ",".join(modes)]
        for h in range(self.max_lag):
            lines.append(f"{h + 1}," + ",".join(
                f"{self.rejection_rate[m][h]:.6f}" for m in modes))
        return "\n".join(lines) + "\n"


def diagnose(seeds: int = 100, base_seed: int = 0, num_features: int = 500,
             kernel_length: int = 9, series_length: int = 500, n_series: int = 10,
             max_lag: int = 20, alpha: float = 0.05,
             weight_mode: str = "sum-zero") -> DiagnoseReport:
    """Noise-in check on the feature axis.

    For each seed a white-noise dataset is drawn and a bank is fitted on it
    twice, once per bias mode, with otherwise identical random choices. The
    PPV vector of the first series is read as a sequence over feature index
    and the Ljung-Box test is applied at lags ``1..max_lag``. The report
    gives the fraction of seeds rejecting at each lag, per mode.
    """
    modes = ("legacy-sorted", "permuted-quantiles")
    rejected = {m: np.zeros(max_lag) for m in modes}
    for s in range(seeds):
        seed = base_seed + s
        data = synth_dataset("white-noise", n_series, series_length, 1,
                             derive_stream(seed, "noise"))
        for mode in modes:
            cfg = BankConfig(num_features, kernel_length, weight_mode, mode, seed)
            bank = fit_bank(cfg, data)
            vector = transform_dataset(data.values[:1], bank).values[0]
            results = ljung_box(vector, max_lag, alpha)
            rejected[mode] += np.array([r.rejected for r in results], dtype=float)
    return DiagnoseReport(max_lag, seeds, {m: rejected[m] / seeds for m in modes})


@dataclass
class TuneRow:
    kernels: int
    kernel_length: int
    mean_rank: float
    mean_ari: float
    wins: int

    @property
    def label(self):
        return f"{self.kernels}-{self.kernel_length}"


def tune(datasets, kernels=DEFAULT_GRID_KERNELS, lengths=DEFAULT_GRID_LENGTHS,
         config: PipelineConfig | None = None, base_seed: int = 0):
    """Run the protocol for each ``(kernels, kernel_length)`` cell.

    Cells are treated as competing algorithms: returns rows of mean rank,
    mean best ARI and strict win count, sorted by mean rank, together with
    the underlying score table.
    """
    if not kernels or not lengths:
        raise ConfigError("tuning grid is empty")
    if not datasets:
        raise ConfigError("tuning needs at least one dataset")
    config = config or PipelineConfig()
    cells = [(int(f), int(k)) for f in kernels for k in lengths]
    scores = np.zeros((len(datasets), len(cells)))
    for i, ds in enumerate(datasets):
        for j, (f, k) in enumerate(cells):
            cfg = replace(config, k=ds.n_classes,
                          bank=config.bank.replace(num_features=f, kernel_length=k))
            scores[i, j] = run_protocol(ds, cfg, base_seed).best_ari
    table = ScoreTable([d.name for d in datasets], [f"{f}-{k}" for f, k in cells], scores)
    rows = [TuneRow(f, k, a.mean_rank, a.mean_ari, a.wins)
            for (f, k), a in zip(cells, aggregate(table))]
    rows.sort(key=lambda r: (r.mean_rank, -r.mean_ari, r.label))
    return rows, table


def render_tune(rows, fmt="markdown") -> str:
    if fmt == "csv":
        lines = ["config,mean_rank,mean_ari,wins"]
        lines += [f"{r.label},{r.mean_rank:.2f},{r.mean_ari:.3f},{r.wins}" for r in rows]
    else:
        lines = ["| Config | Mean rank | Mean ARI | Winning count |", "|---|---|---|---|"]
        lines += [f"| {r.label} | {r.mean_rank:.2f} | {r.mean_ari:.3f} | {r.wins} |"
                  for r in rows]
    return "\n".join(lines) + "\n"


@dataclass
class ScaleReport:
    lengths: list
    length_times: list
    sizes: list
    size_times: list
    fixed_size: int
    fixed_length: int

    @staticmethod
    def _slope(x, y):
        if len(x) < 2:
            return float("nan")
        return float(np.polyfit(np.log(x), np.log(y), 1)[0])

    @property
    def length_slope(self) -> float:
        return self._slope(self.lengths, self.length_times)

    @property
    def size_slope(self) -> float:
        return self._slope(self.sizes, self.size_times)

    def to_markdown(self) -> str:
        lines = [f"Length sweep (n = {self.fixed_size} series)", "",
                 "| length | seconds |", "|---|---|"]
        lines += [f"| {x} | {t:.3f} |" for x, t in zip(self.lengths, self.length_times)]
        lines += ["", f"log-log slope: {self.length_slope:.3f}", "",
                  f"Size sweep (length = {self.fixed_length})", "",
                  "| series | seconds |", "|---|---|"]
        lines += [f"| {x} | {t:.3f} |" for x, t in zip(self.sizes, self.size_times)]
        lines += ["", f"log-log slope: {self.size_slope:.3f}"]
        return "\n".join(lines) + "\n"

    def to_csv(self) -> str:
        lines = ["sweep,parameter,seconds"]
        lines += [f"length,{x},{t:.6f}" for x, t in zip(self.lengths, self.length_times)]
        lines += [f"size,{x},{t:.6f}" for x, t in zip(self.sizes, self.size_times)]
        lines += [f"slope,length,{self.length_slope:.6f}", f"slope,size,{self.size_slope:.6f}"]
        return "\n".join(lines) + "\n"


def _time_run(ds, config, seed, repeats):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        run_once(ds, config, seed)
        best = min(best, time.perf_counter() - t0)
    return best


def scale(lengths=DEFAULT_SCALE_LENGTHS, sizes=DEFAULT_SCALE_SIZES, fixed_size: int = 100,
          fixed_length: int = 600, classes: int = 5, config: PipelineConfig | None = None,
          seed: int = 0, repeats: int = 1) -> ScaleReport:
    """Time one pipeline run over a length sweep and a dataset-size sweep.

    Inputs are blobs-sine datasets. Each point reports the fastest of
    ``repeats`` runs; slopes are least-squares fits of log time on log size.
    """
    config = replace(config or PipelineConfig(), k=classes)
    # compile and warm caches outside the timed region
    warm = synth_dataset("blobs-sine", max(classes, 10), 64, classes, derive_stream(seed, "warm"))
    run_once(warm, config, seed)

    length_times = []
    for L in lengths:
        ds = synth_dataset("blobs-sine", fixed_size, int(L), classes,
                           derive_stream(seed, "scale-length", int(L)))
        length_times.append(_time_run(ds, config, seed, repeats))
    size_times = []
    for n in sizes:
        ds = synth_dataset("blobs-sine", int(n), fixed_length, classes,
                           derive_stream(seed, "scale-size", int(n)))
        size_times.append(_time_run(ds, config, seed, repeats))
    return ScaleReport(list(lengths), length_times, list(sizes), size_times,
                       fixed_size, fixed_length)
