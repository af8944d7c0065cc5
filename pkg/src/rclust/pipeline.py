"""End-to-end clustering: feature bank, PPV transform, PCA, K-means."""

from __future__ import annotations

import time
from dataclasses import asdict, dataclass, field

import numpy as np

from .cluster import KMeansModel, kmeans_fit
from .dataset import TimeSeriesDataset, as_dataset
from .errors import ConfigError, InfeasibleError
from .kernelbank import BankConfig, FeatureBank, fit_bank
from .metrics import ari
from .randkit import DEFAULT_SEED, derive_stream
from .reduce import DEFAULT_THRESHOLD, PcaModel, fit_pca, project
from .transform import transform_dataset

__all__ = ["PipelineConfig", "RunResult", "RunOutcome", "run_once", "run_protocol",
           "raw_kmeans_protocol"]


@dataclass(frozen=True)
class PipelineConfig:
    bank: BankConfig = field(default_factory=BankConfig)
    pca_enabled: bool = True
    pca_threshold: float = DEFAULT_THRESHOLD
    k: int = 2
    runs: int = 10
    max_iter: int = 300
    tol: float = 1e-4
    fixed_bank: bool = False

    def __post_init__(self):
        if self.runs < 1:
            raise ConfigError(f"runs must be >= 1, got {self.runs}")
        if self.k < 1:
            raise ConfigError(f"k must be >= 1, got {self.k}")
        if not 0.0 <= self.pca_threshold < 1.0:
            raise ConfigError(f"pca_threshold must be in [0, 1), got {self.pca_threshold}")

    def label(self) -> str:
        tag = f"{self.bank.num_features}-{self.bank.kernel_length}"
        if not self.pca_enabled:
            tag += "-nopca"
        if self.bank.bias_mode == "legacy-sorted":
            tag += "-legacy"
        if self.bank.weight_mode == "iid":
            tag += "-iid"
        return tag

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class RunResult:
    seed: int
    assignments: np.ndarray
    ari: float | None
    retained_dims: int
    timings_ms: dict
    bank: FeatureBank
    pca: PcaModel | None
    kmeans: KMeansModel


@dataclass
class RunOutcome:
    runs: list
    base_seed: int

    @property
    def assignments(self) -> list:
        return [r.assignments for r in self.runs]

    @property
    def aris(self) -> list | None:
        if self.runs[0].ari is None:
            return None
        return [r.ari for r in self.runs]

    @property
    def best_index(self) -> int:
        aris = self.aris
        if aris is None:
            return int(np.argmin([r.kmeans.inertia for r in self.runs]))
        return int(np.argmax(aris))

    @property
    def best(self) -> RunResult:
        return self.runs[self.best_index]

    @property
    def best_ari(self) -> float | None:
        aris = self.aris
        return None if aris is None else max(aris)

    @property
    def retained_dims(self) -> int:
        return self.best.retained_dims

    @property
    def timings_ms(self) -> dict:
        total = {}
        for r in self.runs:
            for stage, ms in r.timings_ms.items():
                total[stage] = total.get(stage, 0.0) + ms
        return total


def run_once(dataset, config: PipelineConfig, seed: int = DEFAULT_SEED,
             bank: FeatureBank | None = None, bank_seed: int | None = None) -> RunResult:
    """One pass of the pipeline.

    The bank is drawn with ``bank_seed`` (default ``seed``) unless a fitted
    ``bank`` is supplied; K-means initialisation uses stream
    ``(seed, "kmeans-init")``. With PCA disabled K-means runs on all PPV
    features.
    """
    dataset = as_dataset(dataset)
    if config.k > dataset.n_series:
        raise InfeasibleError(f"k = {config.k} exceeds {dataset.n_series} series")
    timings = {}

    t0 = time.perf_counter()
    if bank is None:
        bank_cfg = config.bank.replace(seed=seed if bank_seed is None else bank_seed)
        bank = fit_bank(bank_cfg, dataset)
    t1 = time.perf_counter()
    features = transform_dataset(dataset, bank)
    t2 = time.perf_counter()
    pca = None
    if config.pca_enabled:
        pca = fit_pca(features, config.pca_threshold)
        points = project(features, pca).values
    else:
        points = features.values
    t3 = time.perf_counter()
    km = kmeans_fit(points, config.k, derive_stream(seed, "kmeans-init"),
                    config.max_iter, config.tol)
    t4 = time.perf_counter()

    timings = {"bank": (t1 - t0) * 1e3, "transform": (t2 - t1) * 1e3,
               "pca": (t3 - t2) * 1e3, "kmeans": (t4 - t3) * 1e3}
    score = None if dataset.labels is None else ari(dataset.labels, km.assignments)
    return RunResult(seed, km.assignments, score, points.shape[1], timings, bank, pca, km)


def run_protocol(dataset, config: PipelineConfig, base_seed: int = DEFAULT_SEED,
                 bank: FeatureBank | None = None) -> RunOutcome:
    """Run the pipeline ``config.runs`` times with seeds ``base_seed + r``.

    Every run draws a fresh bank unless ``config.fixed_bank`` is set (one
    bank from ``base_seed`` shared by all runs) or a ``bank`` is given.
    """
    dataset = as_dataset(dataset)
    if bank is None and config.fixed_bank:
        bank = fit_bank(config.bank.replace(seed=base_seed), dataset)
    runs = [run_once(dataset, config, base_seed + r, bank=bank) for r in range(config.runs)]
    return RunOutcome(runs, base_seed)


def raw_kmeans_protocol(dataset: TimeSeriesDataset, k: int, runs: int = 10,
                        base_seed: int = DEFAULT_SEED, max_iter: int = 300,
                        tol: float = 1e-4) -> list:
    """Baseline: K-means on the raw series, best-of-``runs`` ARI protocol."""
    out = []
    for r in range(runs):
        km = kmeans_fit(dataset.values, k, derive_stream(base_seed + r, "kmeans-init"),
                        max_iter, tol)
        out.append(ari(dataset.labels, km.assignments))
    return out
