"""
Run time grows linearly
=======================

Each convolution touches every time step a fixed number of times, so a run
costs O(series x length x kernels). A small sweep fits log-log slopes.
Fixed per-run costs (bank fitting, PCA) still weigh on the smallest points
and pull the slope below 1; the default sweep (lengths to 64k, sizes to 16k)
is ``rclust scale``.
"""

# %%
from rclust import PipelineConfig
from rclust.experiments import scale

report = scale(lengths=[1000, 2000, 4000, 8000], sizes=[250, 500, 1000, 2000],
               fixed_size=50, fixed_length=600, config=PipelineConfig(runs=1))
print(report.to_markdown())
print("length slope %.2f, size slope %.2f" % (report.length_slope, report.size_slope))
