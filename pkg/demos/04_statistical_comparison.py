"""
Comparing algorithms across datasets
====================================

Best-of-ten ARI per dataset is collected for each algorithm, then
summarised by mean rank, mean ARI and wins, and tested with Friedman,
Wilcoxon signed-rank and Holm's step-down correction.
"""

# %%
import numpy as np

from rclust import PipelineConfig
from rclust.experiments import run_benchmark, synthetic_suite
from rclust.stats import ScoreTable, holm_adjust, render_aggregate

suite = synthetic_suite(8, seed=1)
print([(d.name, d.n_classes) for d in suite])

# %%
# Two stand-in competitors: a noisier copy of our scores and a constant.
fast = run_benchmark(suite, PipelineConfig(runs=3))
ours = fast.table.column("R-Clustering")
rng = np.random.default_rng(0)
external = ScoreTable([d.name for d in suite], ["Jittered", "Constant"],
                      np.column_stack([ours - rng.uniform(0, 0.2, len(ours)),
                                       np.full(len(ours), 0.1)]))

result = run_benchmark(suite, PipelineConfig(runs=3), external=external)
print(render_aggregate(result.summary))
print("Friedman: stat %.2f p %.4g" % (result.friedman.statistic, result.friedman.p_value))
print(result.control.to_markdown())

# %%
# Holm thresholds for eight comparisons at alpha = 0.05.
_, thresholds, _ = holm_adjust(np.linspace(0, 1, 8))
print(" ".join("%.6f" % t for t in thresholds))
