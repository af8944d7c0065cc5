"""
Random kernels and PPV features
===============================

A bank of random {-1, 2} kernels turns each series into a vector of
proportions: for every kernel, the share of time steps where the dilated
convolution exceeds that kernel's bias.
"""

# %%
# A small labelled dataset: two classes of noisy sinusoids.
import numpy as np

from rclust import BankConfig, derive_stream, fit_bank, synth_dataset, transform_dataset
from rclust.transform import dilated_convolve, ppv

data = synth_dataset("blobs-sine", 20, 128, 2, derive_stream(0, "demo"))
print(data.values.shape, "classes:", np.bincount(data.labels))

# %%
# One convolution by hand. The kernel is flipped, zero padding keeps the
# output as long as the input.
print(dilated_convolve([1, 2, 3, 4, 5], [1, 0, -1], 1))

# %%
# Fit the default bank: 500 kernels of length 9. Each feature keeps its
# weights, dilation, bias and the quantile level the bias came from.
bank = fit_bank(BankConfig(), data)
f = bank.features[0]
print(len(bank), "kernels; first:", f.weights, "dilation", f.dilation,
      "bias %.3f at level %.3f" % (f.bias, f.quantile_level))
print("dilations used:", np.unique(bank.dilations))

# %%
# PPV of that first kernel on the first series, computed two ways.
conv = dilated_convolve(data.values[0], f.weights, f.dilation)
features = transform_dataset(data, bank)
print(ppv(conv, f.bias), features.values[0, 0])

# %%
# Class means of the feature vectors already differ for many kernels.
gap = np.abs(features.values[data.labels == 0].mean(0) - features.values[data.labels == 1].mean(0))
print("kernels with class-mean gap > 0.2:", int((gap > 0.2).sum()), "of", len(bank))

# %%
# The bank is plain data and round-trips through JSON.
import json

from rclust import FeatureBank

again = FeatureBank.from_dict(json.loads(json.dumps(bank.to_dict())))
print("round-trip equal:", again == bank, "fingerprint", bank.fingerprint())
