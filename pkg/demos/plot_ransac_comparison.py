"""
HERE against plain RANSAC as outliers grow
==========================================

A small benchmark grid.  The CSV written by ``herereg bench`` has the same
rows; this script keeps everything in memory.
"""

from herereg.bench import BenchConfig, format_summary, run_bench, summarize

# %%
# Ten trials per outlier ratio, one HERE run and one 1000-iteration RANSAC
# run per trial on the same instance.
cfg = BenchConfig(grid_n=(1000,), grid_rho=(0.9, 0.95, 0.98), trials=10,
                  methods=("here", "ransac-1k"))
rows, _ = run_bench(cfg)

# %%
# Success means E_R < 5 deg and E_t < 0.1.  RANSAC needs three inliers in one
# draw; at 98% outliers that is about one draw in 10^5.
print(format_summary(summarize(rows, cfg.thresholds)))
