"""Random topologies: denser is worse, bigger is (almost) free
===============================================================

Players dropped in a square interfere when they can reach each other.
Two seeded experiments on the best common rate each topology supports:

* fixed player count, shrinking area: throughput falls toward the
  single-collision-channel floor as everyone starts hearing everyone;
* fixed density, growing area: total throughput grows almost linearly
  with the player count thanks to spatial reuse, while the fully
  connected reference stays flat around 0.37.

Trial counts are kept small here so the script runs in seconds; the
test suite runs the statistically sized version.
"""

import pathlib

from alohagame import density_sweep, size_sweep, write_records_csv

out_dir = pathlib.Path(__file__).parent / "output"
out_dir.mkdir(exist_ok=True)

print("player density up, area down (20 players, 10 trials each):")
records, summaries = density_sweep(20, [0.02, 0.05, 0.15, 0.5, 2.0], trials=10, seed=2024)
write_records_csv(out_dir / "density_sweep.csv", records)
for row in summaries:
    print(
        f"  density {row['density']:<5g} connectivity {row['mean_connectivity']:.3f}  "
        f"common rate {row['mean_max_common_rate']:.4f}  total {row['mean_total_throughput']:.3f}"
    )

print("\nplayer count up at density 0.1 (10 trials each), with fully connected baseline:")
records, baselines, summaries = size_sweep(0.1, [10, 20, 30, 40], trials=10, seed=4025)
write_records_csv(out_dir / "size_sweep.csv", records)
write_records_csv(out_dir / "size_sweep_fully_connected.csv", baselines)
base_by_n = {r.n: r for r in baselines}
for row in summaries:
    base = base_by_n[row["n"]]
    print(
        f"  n {row['n']:<3d} connectivity {row['mean_connectivity']:.3f}  "
        f"total {row['mean_total_throughput']:.3f}  vs fully connected {base.total_throughput:.3f}"
    )
