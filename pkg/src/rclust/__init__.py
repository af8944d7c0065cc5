"""Time-series clustering with random convolutional kernels, PCA and K-means."""

import numba

# prefer OpenMP over a possibly outdated TBB; honours NUMBA_THREADING_LAYER if set
numba.config.THREADING_LAYER_PRIORITY = ["omp", "tbb", "workqueue"]

from .cluster import KMeansModel, assign, kmeans_fit  # noqa: E402
from .dataio import DatasetSource, load_ucr_tsv, synth_dataset  # noqa: E402
from .dataset import TimeSeriesDataset  # noqa: E402
from .kernelbank import BankConfig, FeatureBank, fit_bank  # noqa: E402
from .metrics import adjusted_rand_index, ari, contingency, rand_index  # noqa: E402
from .pipeline import PipelineConfig, run_once, run_protocol  # noqa: E402
from .randkit import derive_stream  # noqa: E402
from .reduce import fit_pca, project, select_dims  # noqa: E402
from .transform import dilated_convolve, ppv, transform_dataset  # noqa: E402

__version__ = "0.1.0"

__all__ = [
    "BankConfig",
    "DatasetSource",
    "FeatureBank",
    "KMeansModel",
    "PipelineConfig",
    "TimeSeriesDataset",
    "adjusted_rand_index",
    "ari",
    "assign",
    "contingency",
    "derive_stream",
    "dilated_convolve",
    "fit_bank",
    "fit_pca",
    "kmeans_fit",
    "load_ucr_tsv",
    "ppv",
    "project",
    "rand_index",
    "run_once",
    "run_protocol",
    "select_dims",
    "synth_dataset",
    "transform_dataset",
]
