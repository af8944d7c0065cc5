"""Random {-1, 2} convolution kernels with dilations and quantile biases."""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import asdict, dataclass
from typing import Sequence

import numpy as np

from . import _kernels
from .dataset import TimeSeriesDataset, as_dataset
from .errors import ConfigError, DatasetTooShortError, InsufficientDataError
from .randkit import DEFAULT_SEED, RandomStream, derive_stream

__all__ = [
    "BankConfig",
    "KernelFeature",
    "FeatureBank",
    "max_dilation",
    "sample_weights",
    "sample_dilation",
    "quantile_levels",
    "fit_bank",
]

WEIGHT_MODES = ("sum-zero", "iid")
BIAS_MODES = ("permuted-quantiles", "legacy-sorted")


@dataclass(frozen=True)
class BankConfig:
    num_features: int = 500
    kernel_length: int = 9
    weight_mode: str = "sum-zero"
    bias_mode: str = "permuted-quantiles"
    seed: int = DEFAULT_SEED

    def __post_init__(self):
        if int(self.num_features) < 1:
            raise ConfigError(f"num_features must be >= 1, got {self.num_features}")
        if self.kernel_length < 3 or self.kernel_length % 2 == 0:
            raise ConfigError(
                f"kernel_length must be odd and >= 3, got {self.kernel_length}")
        if self.weight_mode not in WEIGHT_MODES:
            raise ConfigError(f"weight_mode must be one of {WEIGHT_MODES}")
        if self.bias_mode not in BIAS_MODES:
            raise ConfigError(f"bias_mode must be one of {BIAS_MODES}")
        if not 0 <= int(self.seed) < 2**64:
            raise ConfigError(f"seed must be an unsigned 64-bit integer, got {self.seed}")

    def replace(self, **changes) -> "BankConfig":
        return BankConfig(**{**asdict(self), **changes})


@dataclass(frozen=True)
class KernelFeature:
    """One ``(weights, dilation, bias)`` triple; yields a single PPV value."""

    weights: tuple
    dilation: int
    bias: float
    quantile_level: float

    @property
    def two_positions(self) -> np.ndarray:
        return np.flatnonzero(np.asarray(self.weights) == 2.0)


def max_dilation(input_length: int, kernel_length: int) -> int:
    """Largest dilation whose receptive field fits in ``input_length``.

    >>> max_dilation(128, 9)
    15
    """
    if input_length <= kernel_length:
        raise DatasetTooShortError(
            f"series length {input_length} must exceed kernel length {kernel_length}")
    return (input_length - 1) // (kernel_length - 1)


def sample_weights(stream: RandomStream, config: BankConfig) -> np.ndarray:
    """Draw one weight vector with entries in {-1, 2}.

    In ``sum-zero`` mode exactly ``kernel_length // 3`` positions, chosen
    uniformly, get weight 2. In ``iid`` mode each position is 2 with
    probability 1/3.
    """
    k = config.kernel_length
    weights = np.full(k, -1.0)
    if config.weight_mode == "sum-zero":
        positions = stream.shuffle(range(k))[: k // 3]
        weights[positions] = 2.0
    else:
        for j in range(k):
            if stream.uniform_real() < 1.0 / 3.0:
                weights[j] = 2.0
    return weights


def sample_dilation(stream: RandomStream, input_length: int, kernel_length: int) -> int:
    """``floor(2**x)`` with ``x ~ U[0, log2((L - 1) / (klen - 1))]``."""
    upper = max_dilation(input_length, kernel_length)
    x = stream.uniform_real() * math.log2((input_length - 1) / (kernel_length - 1))
    return min(int(2.0**x), upper)


def quantile_levels(num_features: int, bias_mode: str, stream: RandomStream) -> np.ndarray:
    """Quantile level assigned to each feature.

    The grid is ``(j + 1) / (F + 1)``. ``legacy-sorted`` hands the levels
    out in increasing feature order, which makes the transformed vector
    trend along the feature axis; ``permuted-quantiles`` shuffles them.
    """
    grid = np.arange(1, num_features + 1, dtype=np.float64) / (num_features + 1)
    if bias_mode == "legacy-sorted":
        return grid
    return grid[stream.permutation(num_features)]


def bank_convolve(series, weights, dilation: int) -> np.ndarray:
    """Convolution of one series exactly as the PPV transform computes it."""
    return _kernels.conv_padded(np.ascontiguousarray(series, dtype=np.float64),
                                np.ascontiguousarray(weights, dtype=np.float64),
                                int(dilation))


def bias_from_reference(series, weights, dilation, level) -> float:
    """Empirical quantile (linear interpolation) of one reference convolution."""
    return float(_kernels.reference_bias(np.ascontiguousarray(series, dtype=np.float64),
                                         np.ascontiguousarray(weights, dtype=np.float64),
                                         int(dilation), float(level)))


@dataclass(frozen=True, eq=False)
class FeatureBank:
    config: BankConfig
    features: tuple
    fitted_input_length: int

    def __post_init__(self):
        object.__setattr__(self, "features", tuple(self.features))
        if len(self.features) != self.config.num_features:
            raise ConfigError(
                f"bank has {len(self.features)} features, config says "
                f"{self.config.num_features}")

    def __len__(self):
        return len(self.features)

    def __eq__(self, other):
        if not isinstance(other, FeatureBank):
            return NotImplemented
        return self.to_dict() == other.to_dict()

    @property
    def weights(self) -> np.ndarray:
        return np.array([f.weights for f in self.features], dtype=np.float64)

    @property
    def dilations(self) -> np.ndarray:
        return np.array([f.dilation for f in self.features], dtype=np.int64)

    @property
    def biases(self) -> np.ndarray:
        return np.array([f.bias for f in self.features], dtype=np.float64)

    @property
    def quantile_levels(self) -> np.ndarray:
        return np.array([f.quantile_level for f in self.features], dtype=np.float64)

    def to_dict(self) -> dict:
        return {
            "config": asdict(self.config),
            "fitted_input_length": self.fitted_input_length,
            "features": [
                {
                    "weights": list(f.weights),
                    "dilation": f.dilation,
                    "bias": f.bias,
                    "quantile_level": f.quantile_level,
                }
                for f in self.features
            ],
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "FeatureBank":
        config = BankConfig(**doc["config"])
        features = [
            KernelFeature(tuple(float(w) for w in f["weights"]), int(f["dilation"]),
                          float(f["bias"]), float(f["quantile_level"]))
            for f in doc["features"]
        ]
        return cls(config, features, int(doc["fitted_input_length"]))

    def fingerprint(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]


def fit_bank(config: BankConfig, dataset: TimeSeriesDataset | Sequence) -> FeatureBank:
    """Draw a feature bank for ``dataset``.

    For feature ``i`` the weights, the dilation and the reference series are
    drawn from substreams ``(seed, label, i)``, so the bank does not depend on
    the order in which features are built. The reference series is convolved
    with the kernel and the bias is the empirical quantile of that output at
    the feature's quantile level.

    Raises
    ------
    InsufficientDataError
        If the dataset has no series.
    DatasetTooShortError
        If the series are not longer than the kernel.
    """
    dataset = as_dataset(dataset)
    if dataset.n_series == 0:
        raise InsufficientDataError("cannot fit a feature bank on an empty dataset")
    length = dataset.length
    max_dilation(length, config.kernel_length)

    seed = config.seed
    levels = quantile_levels(config.num_features, config.bias_mode,
                             derive_stream(seed, "bias-perm"))
    X = dataset.values
    features = []
    for i in range(config.num_features):
        weights = sample_weights(derive_stream(seed, "weights", i), config)
        dilation = sample_dilation(derive_stream(seed, "dilations", i), length,
                                   config.kernel_length)
        ref = derive_stream(seed, "bias-series", i).choice(dataset.n_series)
        level = float(levels[i])
        bias = bias_from_reference(X[ref], weights, dilation, level)
        features.append(KernelFeature(tuple(weights.tolist()), dilation, bias, level))
    return FeatureBank(config, features, length)
