"""Fold of the fixed points
============================

Keep the outer players of the chain at rate 0.15 and raise the middle
player's demand. Two fixed points (one stable, one not) drift toward
each other, merge, and vanish: past the merge there is no equilibrium
left and the network congests. The signature is a vanishing leading
minor of the certificate matrix, i.e. a Jacobian eigenvalue crossing
zero.
"""

import pathlib

import numpy as np

from alohagame import Game, bifurcation_sweep, chain_matrix, krasovskii_matrix, leading_minors

out_dir = pathlib.Path(__file__).parent / "output"
out_dir.mkdir(exist_ok=True)

chain = chain_matrix(3)
branch = bifurcation_sweep(chain, [0.15, 0.15, 0.15], varying_index=1, value_range=(0.0, 0.30), step=0.001)
branch.to_csv(out_dir / "fold_sweep.csv")

print(f"last middle rate with two interior equilibria: {branch.critical_value:.3f}")
print(f"merge point estimate: {np.round(branch.critical_point, 4)}")

critical_game = Game(chain, [0.15, branch.critical_value, 0.15])
minors = leading_minors(krasovskii_matrix(branch.critical_point, critical_game))
print(f"leading minors there: {np.round(minors, 4)} (the last one is crossing zero)")

for probe in (0.10, 0.20, branch.critical_value, branch.critical_value + 0.002):
    idx = int(np.argmin(np.abs(branch.parameter_values - probe)))
    row = branch.branches[idx]
    interior = [bp for bp in row if (bp.point > 0).all() and (bp.point < 1).all()]
    desc = ", ".join(f"{np.round(bp.point, 3)} {bp.classification}" for bp in interior) or "none"
    print(f"  middle rate {branch.parameter_values[idx]:.3f}: {desc}")
