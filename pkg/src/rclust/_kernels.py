"""Compiled inner loops for dilated convolution and PPV pooling.

Each feature's convolution is a direct multiply-add over its taps with the
taps summed in a fixed order, so the PPV matrix is bit-identical whatever
the thread count, and the bias reference convolution produces exactly the
values the transform later compares against. Work per series is
``length * num_features * kernel_length`` regardless of the dilations drawn,
which keeps run time linear in series length.
"""

import numpy as np
from numba import njit, prange

TILE = 4096


@njit(cache=True)
def conv_same(x, weights, dilation):
    # true convolution (kernel flipped); zero "same" padding of half * dilation per side
    n = x.shape[0]
    klen = weights.shape[0]
    half = (klen - 1) // 2
    out = np.zeros(n, dtype=np.float64)
    for t in range(n):
        s = 0.0
        for j in range(klen):
            idx = t + (half - j) * dilation
            if 0 <= idx < n:
                s += weights[j] * x[idx]
        out[t] = s
    return out


@njit(cache=True)
def _accumulate(xp, offset, width, weights, half, dilation, out):
    # out[t] = sum_j weights[j] * xp[offset + t + (half - j) * dilation], j ascending
    for t in range(width):
        out[t] = 0.0
    for j in range(weights.shape[0]):
        w = weights[j]
        start = offset + (half - j) * dilation
        for t in range(width):
            out[t] += w * xp[start + t]


@njit(cache=True)
def conv_padded(x, weights, dilation):
    """Same values as ``conv_same``, computed by the transform's code path."""
    n = x.shape[0]
    half = (weights.shape[0] - 1) // 2
    pad = half * dilation
    xp = np.zeros(n + 2 * pad, dtype=np.float64)
    xp[pad:pad + n] = x
    out = np.empty(n, dtype=np.float64)
    _accumulate(xp, pad, n, weights, half, dilation, out)
    return out


@njit(cache=True)
def _series_ppv(x, weights, dilations, biases, max_pad, row):
    # output positions are processed in tiles so the scratch buffer stays in cache
    n = x.shape[0]
    half = (weights.shape[1] - 1) // 2
    xp = np.zeros(n + 2 * max_pad, dtype=np.float64)
    xp[max_pad:max_pad + n] = x
    tile = min(n, TILE)
    conv = np.empty(tile, dtype=np.float64)
    counts = np.zeros(dilations.shape[0], dtype=np.int64)
    for t0 in range(0, n, tile):
        width = min(tile, n - t0)
        for f in range(dilations.shape[0]):
            _accumulate(xp, max_pad + t0, width, weights[f], half, dilations[f], conv)
            b = biases[f]
            c = 0
            for t in range(width):
                if conv[t] - b > 0.0:
                    c += 1
            counts[f] += c
    for f in range(dilations.shape[0]):
        row[f] = counts[f] / n


@njit(cache=True, parallel=True)
def transform_ppv(X, weights, dilations, biases, max_pad):
    n_series = X.shape[0]
    out = np.empty((n_series, dilations.shape[0]), dtype=np.float64)
    for i in prange(n_series):
        _series_ppv(X[i], weights, dilations, biases, max_pad, out[i])
    return out


@njit(cache=True)
def quantile_linear(values, level):
    # linear interpolation between order statistics (numpy's default method)
    v = np.sort(values)
    h = (v.shape[0] - 1) * level
    lo = int(np.floor(h))
    hi = min(lo + 1, v.shape[0] - 1)
    return v[lo] + (h - lo) * (v[hi] - v[lo])


@njit(cache=True)
def reference_bias(x, weights, dilation, level):
    return quantile_linear(conv_padded(x, weights, dilation), level)
