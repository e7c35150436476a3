"""Equilibria of the three-player chain
========================================

Three transmitter-receiver pairs sit on a line: the outer players only
collide with the middle one, so players 1 and 3 can reuse the slot.
Everyone wants throughput 0.15. This script finds all equilibria, picks
the energy-efficient one, and watches the game iteration reach it.
"""

import pathlib

import numpy as np

from alohagame import (
    Game,
    chain_matrix,
    iterate_game,
    kleene_lfp,
    krasovskii_verdict,
    least_of,
    multistart_fixed_points,
)

out_dir = pathlib.Path(__file__).parent / "output"
out_dir.mkdir(exist_ok=True)

game = Game(chain_matrix(3), [0.15, 0.15, 0.15])

# The ascending iteration from all-zeros lands on the least fixed point,
# the game's unique Nash equilibrium.
solved = kleene_lfp(game)
print(f"least fixed point: {np.round(solved.point, 4)} after {solved.iterations} iterations")

# The brute-force oracle finds every equilibrium on small instances.
fps = multistart_fixed_points(game)
print(f"\nthe oracle finds {fps.n_points} fixed points inside the box:")
for point in fps.points:
    verdict = krasovskii_verdict(point, game)
    print(f"  {np.round(point, 4)}  -> {verdict.classification}"
          f" (diag dominant: {verdict.diag_dominant})")
print(f"least of them: {np.round(least_of(fps), 4)}")

# Game iteration from the target rates converges in a handful of steps.
run = iterate_game(game.rates, game, tol=1e-3)
print(f"\niterating from the rate vector: {run.outcome} in {len(run.states) - 1} steps")
run.to_csv(out_dir / "chain_iteration_from_rates.csv")

# The second fixed point is a saddle. Started from its 4-decimal rounding
# (a perturbation along the oscillatory unstable direction), the iteration
# blows up into a two-point oscillation with the middle player and the
# outer pair alternately jamming each other.
saddle = np.array([0.5451, 0.7248, 0.5451])
run = iterate_game(saddle, game, perturb=1e-6)
print(f"from the saddle: {run.outcome}, period {run.period}")
for point in run.cycle_points:
    print(f"  cycle point {np.round(point, 4)}")
run.to_csv(out_dir / "chain_iteration_from_saddle.csv")

# A uniform upward nudge from the exact saddle instead escalates until
# everyone transmits always; which way the escape goes depends on the
# direction of the perturbation, not just its size.
exact_saddle = fps.points[1]
run = iterate_game(exact_saddle, game, perturb=1e-6)
print(f"from the exact saddle, nudged up uniformly: {run.outcome} at {np.round(run.final, 4)}")
