"""Topology-scale studies built on the solver and stability machinery.

Everything here is deterministic given its arguments: random trials
derive their generator seeds from (master seed, setting index, trial
index), results are reduced in a fixed order regardless of the worker
count, and CSV emission uses a fixed number format, so identical calls
produce byte-identical files.
"""

from __future__ import annotations

import csv
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .game import Game, achieved_rate, best_response
from .solver import multistart_fixed_points
from .stability import krasovskii_matrix, krasovskii_verdict, sylvester_pd, diag_dominant
from .topology import connectivity, fully_connected_matrix, random_topology, side_for_density

__all__ = [
    "BranchPoint",
    "BifurcationBranch",
    "bifurcation_sweep",
    "max_common_rate",
    "feasible_contour",
    "ScaleResult",
    "max_demand_scale",
    "max_probability_scale",
    "SweepRecord",
    "density_sweep",
    "size_sweep",
    "write_records_csv",
    "PowerLawFit",
    "fit_power_law",
]

RATE_STEP = 0.001
SCALE_STEP = 0.01
_SOLVE_TOL = 1e-10
_SOLVE_MAX_ITER = 100_000


def _grid(value: float, step: float) -> float:
    """Clean up k*step accumulation noise."""
    return float(round(value, 12))


def _interior_stable_lfp(game: Game, warm_start, tol=_SOLVE_TOL, max_iter=_SOLVE_MAX_ITER):
    """Least fixed point if it is interior and Sylvester-stable, else None.

    ``warm_start`` must be a point known to sit below the least fixed
    point (zeros, or the least fixed point of the same topology at
    lower rates). The ascending iteration bails out as soon as any
    component reaches 1: the chain never descends, so the least fixed
    point cannot be interior past that.

    Marginal certificates (minors inside the tolerance band) count as
    unstable: boundary points are excluded, which keeps rate searches
    conservative.
    """
    q = np.asarray(warm_start, dtype=float)
    point = None
    for _ in range(max_iter + 1):
        f = best_response(q, game)
        if (f >= 1.0).any():
            return None
        if np.abs(f - q).max() <= tol:
            point = f
            break
        q = f
    if point is None:
        return None
    pd, _ = sylvester_pd(krasovskii_matrix(point, game))
    return point if pd else None


# ---------------------------------------------------------------------------
# Fold of the fixed points under one varying target rate
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BranchPoint:
    point: np.ndarray
    stable: bool
    classification: str


@dataclass(frozen=True)
class BifurcationBranch:
    """Fixed points of the game as one target rate sweeps a range.

    ``branches[k]`` lists the oracle's roots at ``parameter_values[k]``
    in ascending partial order. ``critical_value`` is the last
    parameter with at least two strictly interior roots, after which
    the pair has merged and vanished; ``critical_point`` is the
    midpoint of the two closest roots there.
    """

    varying_index: int
    parameter_values: np.ndarray
    branches: list
    critical_value: float | None
    critical_point: np.ndarray | None

    def to_csv(self, path) -> None:
        n = len(self.branches[0][0].point) if self.branches and self.branches[0] else 0
        if n == 0:
            for row in self.branches:
                if row:
                    n = len(row[0].point)
                    break
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(
                [f"y{self.varying_index + 1}", "branch_id"]
                + [f"q{i + 1}" for i in range(n)]
                + ["stable"]
            )
            for value, row in zip(self.parameter_values, self.branches):
                for branch_id, bp in enumerate(row):
                    writer.writerow(
                        [f"{value:.12g}", branch_id]
                        + [f"{v:.12g}" for v in bp.point]
                        + [str(bp.stable).lower()]
                    )


def bifurcation_sweep(
    matrix,
    fixed_rates,
    varying_index: int,
    value_range: tuple,
    step: float = RATE_STEP,
    starts_per_axis: int = 5,
) -> BifurcationBranch:
    """Track the fixed points while rate ``varying_index`` sweeps a range.

    Runs the multistart oracle at every parameter value (so the
    instance must respect the oracle's size limit) and classifies each
    root with the Krasovskii certificate.
    """
    if step <= 0.0:
        raise ValueError("step must be positive")
    lo, hi = value_range
    values = np.arange(_grid(lo, step), hi + step / 2, step)
    values = np.array([_grid(v, step) for v in values])

    a = np.asarray(matrix)
    base = np.asarray(fixed_rates, dtype=float)
    branches = []
    critical_value = None
    critical_point = None
    for value in values:
        rates = base.copy()
        rates[varying_index] = value
        game = Game(a, rates)
        fps = multistart_fixed_points(game, starts_per_axis=starts_per_axis)
        pts = sorted(fps.points, key=lambda p: (float(p.sum()), tuple(p)))
        row = []
        for p in pts:
            try:
                verdict = krasovskii_verdict(p, game, fp_tol=1e-6)
                row.append(BranchPoint(p, verdict.stable, verdict.classification))
            except ValueError:
                row.append(BranchPoint(p, False, "singular"))
        branches.append(row)
        interior = [p for p in pts if (p > 0.0).all() and (p < 1.0).all()]
        if len(interior) >= 2:
            critical_value = float(value)
            gaps = [
                (float(np.abs(interior[i] - interior[j]).max()), i, j)
                for i in range(len(interior))
                for j in range(i + 1, len(interior))
            ]
            _, i, j = min(gaps)
            critical_point = (interior[i] + interior[j]) / 2.0
    if critical_point is not None:
        critical_point.flags.writeable = False
    return BifurcationBranch(
        varying_index=varying_index,
        parameter_values=values,
        branches=branches,
        critical_value=critical_value,
        critical_point=critical_point,
    )


# ---------------------------------------------------------------------------
# Maximum-rate searches
# ---------------------------------------------------------------------------


def max_common_rate(matrix, step: float = RATE_STEP, tol: float = _SOLVE_TOL, max_iter: int = _SOLVE_MAX_ITER):
    """Largest common target rate with a stable interior equilibrium.

    Raises the common rate in multiples of ``step`` until the least
    fixed point stops being interior and Sylvester-stable, warm-starting
    each ascent from the previous equilibrium. Returns
    ``(y_max, q_star)``; (0.0, zeros) when even the first step fails.
    """
    if step <= 0.0:
        raise ValueError("step must be positive")
    a = np.asarray(matrix)
    n = a.shape[0]
    best_y, best_q = 0.0, np.zeros(n)
    warm = np.zeros(n)
    k = 1
    while True:
        y = _grid(k * step, step)
        if y > 1.0:
            break
        point = _interior_stable_lfp(Game(a, np.full(n, y)), warm, tol, max_iter)
        if point is None:
            break
        best_y, best_q, warm = y, point, point
        k += 1
    return best_y, best_q


def feasible_contour(matrix, y1_values, y3_values, step: float = RATE_STEP):
    """Maximum stable middle rate over a grid of outer rates.

    For a three-player topology, returns ``surface[i, j]`` = largest
    rate of player 2 (in multiples of ``step``) with a stable interior
    equilibrium when players 1 and 3 demand ``y1_values[i]`` and
    ``y3_values[j]``. The upper boundary of the resulting region is the
    set of rate combinations with nothing left to give away.
    """
    a = np.asarray(matrix)
    if a.shape[0] != 3:
        raise ValueError("feasible_contour expects a 3-player topology")
    y1_values = np.asarray(y1_values, dtype=float)
    y3_values = np.asarray(y3_values, dtype=float)
    surface = np.zeros((len(y1_values), len(y3_values)))
    for i, y1 in enumerate(y1_values):
        for j, y3 in enumerate(y3_values):
            warm = np.zeros(3)
            best = 0.0
            feasible_base = _interior_stable_lfp(Game(a, [y1, 0.0, y3]), warm)
            if feasible_base is None:
                surface[i, j] = np.nan
                continue
            warm = feasible_base
            k = 1
            while True:
                y2 = _grid(k * step, step)
                if y2 > 1.0:
                    break
                point = _interior_stable_lfp(Game(a, [y1, y2, y3]), warm)
                if point is None:
                    break
                best, warm = y2, point
                k += 1
            surface[i, j] = best
    return surface


@dataclass(frozen=True)
class ScaleResult:
    """Outcome of pushing a stable operating point to its limit."""

    factor: float
    rates: np.ndarray
    point: np.ndarray
    sum_rate: float


def max_demand_scale(game: Game, step: float = SCALE_STEP) -> ScaleResult:
    """Scale every demand proportionally until stability gives out.

    Finds the largest factor k (in multiples of ``step``, starting at 1)
    such that rates k*y still admit a stable interior equilibrium.
    The base rates themselves must be stable-feasible.
    """
    if step <= 0.0:
        raise ValueError("step must be positive")
    base_point = _interior_stable_lfp(game, np.zeros(game.n))
    if base_point is None:
        raise ValueError("base rates admit no stable interior equilibrium")
    factor, point = 1.0, base_point
    k = 1
    while True:
        cand = _grid(1.0 + k * step, step)
        rates = cand * game.rates
        if (rates > 1.0).any():
            break
        nxt = _interior_stable_lfp(Game(game.matrix, rates), point)
        if nxt is None:
            break
        factor, point = cand, nxt
        k += 1
    rates = factor * game.rates
    return ScaleResult(factor=factor, rates=rates, point=point, sum_rate=float(rates.sum()))


def max_probability_scale(game: Game, q_star, step: float = SCALE_STEP) -> ScaleResult:
    """Scale the equilibrium probabilities until the certificate gives out.

    Finds the largest factor b (multiples of ``step``, starting at 1)
    with b*q_star inside the box and the certificate matrix positive
    definite there. The scaled point is an exact equilibrium for the
    rates it induces through the throughput map, which is what
    ``rates`` reports.
    """
    if step <= 0.0:
        raise ValueError("step must be positive")
    q_star = np.asarray(q_star, dtype=float)
    if not krasovskii_verdict(q_star, game, fp_tol=1e-6).stable:
        raise ValueError("q_star must be a stable equilibrium of the base game")

    def scaled(b):
        q = b * q_star
        if (q > 1.0).any():
            return None
        induced = achieved_rate(q, game.matrix)
        pd, _ = sylvester_pd(krasovskii_matrix(q, Game(game.matrix, induced)))
        return (q, induced) if pd else None

    factor, point, rates = 1.0, q_star, achieved_rate(q_star, game.matrix)
    k = 1
    while True:
        cand = _grid(1.0 + k * step, step)
        got = scaled(cand)
        if got is None:
            break
        factor, (point, rates) = cand, got
        k += 1
    return ScaleResult(factor=factor, rates=rates, point=point, sum_rate=float(rates.sum()))


# ---------------------------------------------------------------------------
# Random-topology sweeps
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SweepRecord:
    """One topology trial: geometry, best common rate, throughput."""

    seed: int
    n: int
    side: float
    connectivity: float
    max_common_rate: float
    point: np.ndarray
    total_throughput: float
    diag_dominant: bool

    @property
    def avg_q(self) -> float:
        return float(self.point.mean())


def _trial_seed(master_seed: int, setting_index: int, trial_index: int) -> int:
    seq = np.random.SeedSequence([int(master_seed), setting_index, trial_index])
    return int(seq.generate_state(1)[0])


def _run_trial(matrix, seed, n, side, step) -> SweepRecord:
    y_max, point = max_common_rate(matrix, step=step)
    conn = connectivity(matrix) if n >= 2 else 0.0
    dd = (
        diag_dominant(point, Game(matrix, np.full(n, y_max)))
        if y_max > 0.0
        else True
    )
    return SweepRecord(
        seed=seed,
        n=n,
        side=side,
        connectivity=conn,
        max_common_rate=y_max,
        point=point,
        total_throughput=n * y_max,
        diag_dominant=dd,
    )


def _random_trial(args):
    n, side, seed, step, edge_rule = args
    _, matrix = random_topology(n, side, seed, edge_rule=edge_rule)
    return _run_trial(matrix, seed, n, side, step)


def _run_jobs(jobs, threads: int):
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(_random_trial, jobs))
    return [_random_trial(job) for job in jobs]


def _summarize(records, **labels):
    return {
        **labels,
        "trials": len(records),
        "mean_connectivity": float(np.mean([r.connectivity for r in records])),
        "mean_max_common_rate": float(np.mean([r.max_common_rate for r in records])),
        "mean_total_throughput": float(np.mean([r.total_throughput for r in records])),
        "mean_avg_q": float(np.mean([r.avg_q for r in records])),
    }


def density_sweep(
    n: int,
    densities,
    trials: int,
    step: float = RATE_STEP,
    seed: int = 0,
    edge_rule: str = "min",
    threads: int = 1,
):
    """Best common rates over random topologies of increasing density.

    For each density, generates ``trials`` seeded topologies of ``n``
    players in the square of matching area and records the maximum
    stable common rate of each. Returns ``(records, summaries)`` with
    one summary row per density.
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    records = []
    summaries = []
    for d_idx, density in enumerate(densities):
        side = side_for_density(n, density)
        jobs = [
            (n, side, _trial_seed(seed, d_idx, t), step, edge_rule)
            for t in range(trials)
        ]
        batch = _run_jobs(jobs, threads)
        records.extend(batch)
        summaries.append(_summarize(batch, density=float(density), n=n, side=side))
    return records, summaries


def size_sweep(
    density: float,
    n_values,
    trials: int,
    step: float = RATE_STEP,
    seed: int = 0,
    edge_rule: str = "min",
    threads: int = 1,
    include_fully_connected: bool = True,
    fully_connected_max_n: int = 50,
):
    """Best common rates as the player count grows at fixed density.

    Returns ``(records, baselines, summaries)``. ``baselines`` holds the
    deterministic fully connected reference for each n up to
    ``fully_connected_max_n`` (larger single-channel instances converge
    so slowly toward the fold that the search is not worth running);
    baseline rows use seed 0 and side 0.
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    records = []
    baselines = []
    summaries = []
    for s_idx, n in enumerate(n_values):
        side = side_for_density(n, density)
        jobs = [
            (n, side, _trial_seed(seed, s_idx, t), step, edge_rule)
            for t in range(trials)
        ]
        batch = _run_jobs(jobs, threads)
        records.extend(batch)
        summaries.append(_summarize(batch, n=int(n), density=float(density), side=side))
        if include_fully_connected and n >= 2 and n <= fully_connected_max_n:
            baselines.append(_run_trial(fully_connected_matrix(n), 0, int(n), 0.0, step))
    return records, baselines, summaries


def write_records_csv(path, records) -> None:
    """Sweep records as CSV: seed,n,side,connectivity,y_max,total_throughput,avg_q."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["seed", "n", "side", "connectivity", "y_max", "total_throughput", "avg_q"])
        for r in records:
            writer.writerow(
                [
                    r.seed,
                    r.n,
                    f"{r.side:.12g}",
                    f"{r.connectivity:.12g}",
                    f"{r.max_common_rate:.12g}",
                    f"{r.total_throughput:.12g}",
                    f"{r.avg_q:.12g}",
                ]
            )


# ---------------------------------------------------------------------------
# Connectivity law
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PowerLawFit:
    """Piecewise power law Y = c * X^e fitted independently per segment.

    Segments are split at ``break_x``; a segment with fewer than two
    points is left unfitted (None coefficients). ``rms_log_*`` is the
    root-mean-square residual of log Y within the segment.
    """

    break_x: float
    c_low: float | None
    e_low: float | None
    c_high: float | None
    e_high: float | None
    n_low: int
    n_high: int
    rms_log_low: float | None
    rms_log_high: float | None

    def predict(self, x):
        x = np.asarray(x, dtype=float)
        out = np.full_like(x, np.nan)
        if self.c_low is not None:
            low = x < self.break_x
            out[low] = self.c_low * x[low] ** self.e_low
        if self.c_high is not None:
            high = x >= self.break_x
            out[high] = self.c_high * x[high] ** self.e_high
        return out


def _fit_segment(x, y):
    logx = np.log(x)
    design = np.column_stack([logx, np.ones_like(logx)])
    (slope, intercept), *_ = np.linalg.lstsq(design, np.log(y), rcond=None)
    rms = float(np.sqrt(np.mean((np.log(y) - design @ (slope, intercept)) ** 2)))
    return float(np.exp(intercept)), float(slope), rms


def fit_power_law(x, y, break_x: float = 0.1) -> PowerLawFit:
    """Two-segment least-squares power law in log-log coordinates.

    All inputs must be strictly positive; at least one side of
    ``break_x`` needs two or more points, and a side without them is
    reported unfitted rather than extrapolated.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError("x and y must be 1-D arrays of equal length")
    if (x <= 0.0).any() or (y <= 0.0).any():
        raise ValueError("power-law fit needs strictly positive values")
    low = x < break_x
    high = ~low
    n_low, n_high = int(low.sum()), int(high.sum())
    if n_low < 2 and n_high < 2:
        raise ValueError("need at least 2 points on one side of the break")
    c_low = e_low = rms_low = None
    c_high = e_high = rms_high = None
    if n_low >= 2:
        c_low, e_low, rms_low = _fit_segment(x[low], y[low])
    if n_high >= 2:
        c_high, e_high, rms_high = _fit_segment(x[high], y[high])
    return PowerLawFit(
        break_x=break_x,
        c_low=c_low,
        e_low=e_low,
        c_high=c_high,
        e_high=e_high,
        n_low=n_low,
        n_high=n_high,
        rms_log_low=rms_low,
        rms_log_high=rms_high,
    )
