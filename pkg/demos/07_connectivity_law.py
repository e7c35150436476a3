"""Total throughput against connectivity
=========================================

Pooling the density and size sweeps, total throughput collapses onto a
single decreasing curve in the network connectivity (the fraction of
interference links present), well summarized by a two-segment power law
split at connectivity 0.1. Trial counts here favor speed; the suite
runs the larger, statistically checked version.
"""

import pathlib

import numpy as np

from alohagame import density_sweep, fit_power_law, size_sweep, write_records_csv

out_dir = pathlib.Path(__file__).parent / "output"
out_dir.mkdir(exist_ok=True)

records, _ = density_sweep(20, [0.008, 0.02, 0.05, 0.15, 0.5, 2.0], trials=10, seed=2024)
more, _, _ = size_sweep(0.1, [10, 20, 30, 40, 60], trials=10, seed=4025, include_fully_connected=False)
sparse, _, _ = size_sweep(0.03, [20, 40, 60], trials=10, seed=77, include_fully_connected=False)
records = records + more + sparse
write_records_csv(out_dir / "connectivity_pool.csv", records)

x = np.array([r.connectivity for r in records])
y = np.array([r.total_throughput for r in records])
keep = (x > 0) & (y > 0)
fit = fit_power_law(x[keep], y[keep], break_x=0.1)

print(f"{keep.sum()} pooled records, connectivity {x[keep].min():.4f} .. {x[keep].max():.4f}")
print("fitted total throughput vs connectivity X:")
print(f"  X < 0.1 : {fit.c_low:.2f} * X^{fit.e_low:.2f}   ({fit.n_low} records)")
print(f"  X >= 0.1: {fit.c_high:.2f} * X^{fit.e_high:.2f}   ({fit.n_high} records)")
print(f"log-residual RMS: low {fit.rms_log_low:.3f}, high {fit.rms_log_high:.3f}")
print(f"\nat full connectivity the law gives {fit.predict([1.0])[0]:.3f},"
      " the single-collision-channel ceiling")
