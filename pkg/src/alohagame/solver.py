"""Equilibrium solvers.

Two independent routes to the fixed points of the best-response map:

* :func:`kleene_lfp` iterates the map from a point below the target
  rates. Because the map is order-preserving and sends [0, 1]^n into
  itself, the iterates form an ascending chain whose limit is the least
  fixed point, which is the game's unique Nash equilibrium.
* :func:`multistart_fixed_points` is a brute-force oracle: damped
  Newton on the unclipped stationarity system from a uniform grid of
  starting points. It enumerates the fixed points on small instances
  and is used to cross-check the iterative solver.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .game import Game, best_response, is_fixed_point, leq, success_product

__all__ = [
    "LfpResult",
    "FixedPointSet",
    "kleene_lfp",
    "multistart_fixed_points",
    "least_of",
    "ORACLE_MAX_PLAYERS",
]

# The oracle grids [0,1]^n with starts_per_axis**n Newton starts; past
# eight players the grid explodes and exhaustive enumeration is off the
# table anyway.
ORACLE_MAX_PLAYERS = 8

DEFAULT_TOL = 1e-10
DEFAULT_MAX_ITER = 100_000


@dataclass(frozen=True)
class LfpResult:
    """Outcome of the ascending fixed-point iteration."""

    point: np.ndarray
    iterations: int
    converged: bool
    residual_norm: float
    extraneous: bool

    @property
    def interior(self) -> bool:
        """Converged strictly below the all-transmit boundary."""
        return self.converged and bool((self.point < 1.0).all())


@dataclass(frozen=True)
class FixedPointSet:
    """Deduplicated fixed points found by the oracle.

    ``points`` holds the genuine roots inside [0, 1]^n. The all-ones
    point introduced by clipping the response map at 1 is recorded via
    ``includes_extraneous`` and kept out of ``points``: it is an
    artifact of the clipping, and on edge-free topologies it is not
    even a fixed point.
    """

    points: list = field(default_factory=list)
    includes_extraneous: bool = False

    @property
    def n_points(self) -> int:
        return len(self.points)

    def interior_points(self) -> list:
        """Roots strictly inside (0, 1)^n."""
        return [p for p in self.points if (p > 0.0).all() and (p < 1.0).all()]


def _ascend(game: Game, q0: np.ndarray, tol: float, max_iter: int):
    """Iterate the best-response map; valid whenever q0 is below the LFP."""
    q = q0
    for it in range(max_iter + 1):
        f = best_response(q, game)
        r = float(np.abs(f - q).max())
        if r <= tol:
            return q, it, True, r
        if it == max_iter:
            return q, max_iter, False, r
        q = f


def _result(game: Game, q, iterations, converged, res_norm, tol) -> LfpResult:
    point = np.asarray(q, dtype=float).copy()
    point.flags.writeable = False
    extraneous = converged and bool((point >= 1.0 - 10.0 * tol).all()) and bool(
        (game.rates > 0.0).any()
    )
    return LfpResult(point, iterations, converged, res_norm, extraneous)


def kleene_lfp(
    game: Game,
    q0=None,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
) -> LfpResult:
    """Ascend to the least fixed point from a start below the target rates.

    The start must satisfy 0 <= q0 <= rates componentwise (the box from
    which convergence to the least fixed point is guaranteed); ``None``
    means the all-zeros vector. Iteration stops at the first iterate
    whose residual infinity-norm is at most ``tol``.

    A converged result sitting at the all-ones vector is flagged
    ``extraneous``: the network cannot support the requested rates and
    the iteration escalated to everyone always transmitting.
    """
    if tol <= 0.0:
        raise ValueError("tol must be positive")
    if max_iter < 1:
        raise ValueError("max_iter must be at least 1")
    if q0 is None:
        q0 = np.zeros(game.n)
    q0 = np.asarray(q0, dtype=float)
    if q0.shape != (game.n,):
        raise ValueError(f"q0 must have shape ({game.n},), got {q0.shape}")
    if (q0 < 0.0).any() or not leq(q0, game.rates):
        raise ValueError("q0 must lie in the box [0, rates] (start region for the ascent)")
    q, iterations, converged, res_norm = _ascend(game, q0, tol, max_iter)
    return _result(game, q, iterations, converged, res_norm, tol)


def _continue_ascent(game: Game, q0, tol, max_iter) -> LfpResult:
    """Ascend without the start-region check.

    Internal: correct whenever q0 is known to lie below the least fixed
    point, e.g. the least fixed point of the same topology at lower
    rates (the map only grows with the rates, so the old equilibrium
    still sits below the new one).
    """
    q, iterations, converged, res_norm = _ascend(game, np.asarray(q0, dtype=float), tol, max_iter)
    return _result(game, q, iterations, converged, res_norm, tol)


# ---------------------------------------------------------------------------
# Multistart Newton oracle
# ---------------------------------------------------------------------------


def _stationarity(q, game: Game):
    """Unclipped stationarity residual rates/prod - q, batched over rows of q.

    Well defined wherever no success product vanishes; entries where it
    does are returned as +/-inf so callers can drop those iterates.
    """
    prod = success_product(q, game.matrix)
    nonzero = prod != 0.0
    raw = np.divide(game.rates, prod, out=np.full_like(prod, np.inf), where=nonzero)
    return raw - q, raw


def _stationarity_jacobian(q, raw, game: Game):
    """Jacobian of the unclipped stationarity map at each row of q."""
    a = np.asarray(game.matrix, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        jac = a * raw[:, :, np.newaxis] / (1.0 - q[:, np.newaxis, :])
    jac -= np.eye(game.n)
    return jac


def _newton_from_grid(game: Game, starts: np.ndarray, tol: float, max_iter: int):
    """Damped Newton from every start at once; returns converged iterates."""
    q = starts.astype(float).copy()
    h, raw = _stationarity(q, game)
    hnorm = np.abs(h).max(axis=1)
    alive = np.isfinite(hnorm)
    hnorm[~alive] = np.inf

    for _ in range(max_iter):
        active = alive & (hnorm > tol)
        if not active.any():
            break
        idx = np.flatnonzero(active)
        jac = _stationarity_jacobian(q[idx], raw[idx], game)
        ok = np.isfinite(jac).all(axis=(1, 2))
        with np.errstate(over="ignore", invalid="ignore"):
            det = np.where(ok, np.linalg.det(np.where(np.isfinite(jac), jac, 0.0)), 0.0)
        ok &= np.abs(det) > 1e-300
        alive[idx[~ok]] = False
        idx = idx[ok]
        if idx.size == 0:
            continue
        step = np.linalg.solve(jac[ok], -h[idx][..., np.newaxis])[..., 0]

        # Halve the step while it makes the residual worse; starts that
        # never improve are dropped silently.
        lam = np.ones(idx.size)
        improved = np.zeros(idx.size, dtype=bool)
        trial = np.empty_like(q[idx])
        trial_h = np.empty_like(trial)
        trial_raw = np.empty_like(trial)
        for _damp in range(30):
            pending = ~improved
            if not pending.any():
                break
            cand = q[idx[pending]] + lam[pending, np.newaxis] * step[pending]
            cand_h, cand_raw = _stationarity(cand, game)
            cand_norm = np.abs(cand_h).max(axis=1)
            better = np.isfinite(cand_norm) & (cand_norm <= hnorm[idx[pending]])
            sub = np.flatnonzero(pending)
            trial[sub[better]] = cand[better]
            trial_h[sub[better]] = cand_h[better]
            trial_raw[sub[better]] = cand_raw[better]
            improved[sub[better]] = True
            lam[sub[~better]] *= 0.5
        alive[idx[~improved]] = False
        keep = idx[improved]
        q[keep] = trial[improved]
        h[keep] = trial_h[improved]
        raw[keep] = trial_raw[improved]
        hnorm[keep] = np.abs(trial_h[improved]).max(axis=1)

    return q[alive & (hnorm <= tol)]


def _polish(game: Game, q: np.ndarray, max_iter: int = 8) -> np.ndarray:
    """Full Newton steps to push a root's residual toward machine precision.

    Near a fold the stationarity Jacobian is almost singular and a
    merely tol-accurate root can sit noticeably off the true fixed
    point; a few undamped steps remove that amplification.
    """
    best = q
    best_norm = np.inf
    for _ in range(max_iter):
        h, raw = _stationarity(best[np.newaxis, :], game)
        h = h[0]
        if not np.isfinite(h).all():
            break
        norm = np.abs(h).max()
        if norm >= best_norm or norm < 1e-15:
            break
        best_norm = norm
        jac = _stationarity_jacobian(best[np.newaxis, :], raw, game)[0]
        try:
            step = np.linalg.solve(jac, -h)
        except np.linalg.LinAlgError:
            break
        cand = best + step
        cand_h, _ = _stationarity(cand[np.newaxis, :], game)
        if np.isfinite(cand_h).all() and np.abs(cand_h).max() < norm:
            best = cand
    return best


def _dedup(points: np.ndarray, radius: float) -> list:
    """Merge points within the given infinity-norm radius, deterministically."""
    if len(points) == 0:
        return []
    order = np.lexsort(points.T[::-1])
    kept: list = []
    for p in points[order]:
        if all(np.abs(p - k).max() > radius for k in kept):
            kept.append(p)
    for p in kept:
        p.flags.writeable = False
    return kept


def multistart_fixed_points(
    game: Game,
    starts_per_axis: int = 5,
    newton_tol: float = DEFAULT_TOL,
    max_iter: int = 80,
    dedup_radius: float = 1e-6,
) -> FixedPointSet:
    """Enumerate fixed points on a small instance by gridded Newton runs.

    Solves the unclipped stationarity system rates_i = q_i * prod_i from
    ``starts_per_axis ** n`` interior grid starts, keeps the converged
    roots that land inside [0, 1]^n, and deduplicates them. Roots of the
    polynomial system outside the box (transmission "probabilities"
    above 1) are discarded as infeasible. The clipping-induced all-ones
    point is reported through ``includes_extraneous`` whenever every
    target rate is positive.
    """
    if game.n > ORACLE_MAX_PLAYERS:
        raise ValueError(
            f"oracle limited to {ORACLE_MAX_PLAYERS} players (got {game.n}); "
            "the start grid grows exponentially"
        )
    if starts_per_axis < 1:
        raise ValueError("starts_per_axis must be at least 1")
    centers = (np.arange(starts_per_axis) + 0.5) / starts_per_axis
    grid = np.stack(np.meshgrid(*([centers] * game.n), indexing="ij"), axis=-1)
    starts = grid.reshape(-1, game.n)

    roots = _newton_from_grid(game, starts, newton_tol, max_iter)
    reps = [_polish(game, r) for r in _dedup(roots, dedup_radius)]
    slack = 1e-9
    kept = [
        np.clip(r, 0.0, 1.0)
        for r in reps
        if (r >= -slack).all() and (r <= 1.0 + slack).all()
    ]
    # Enforce the advertised guarantee against the clipped map as well.
    kept = [r for r in kept if is_fixed_point(r, game, 10.0 * newton_tol)]

    points = _dedup(np.asarray(kept) if kept else np.empty((0, game.n)), dedup_radius)
    return FixedPointSet(points=points, includes_extraneous=bool((game.rates > 0.0).all()))


def least_of(fps: FixedPointSet, tol: float = 0.0) -> np.ndarray:
    """The fixed point that is componentwise below every other one.

    Raises on an empty set, and raises a diagnostic error when the
    minimal elements are incomparable, which would contradict the
    least-fixed-point structure of the game; ``tol`` loosens the
    comparisons to absorb solver round-off (0 keeps them exact).
    """
    if not fps.points:
        raise ValueError("fixed-point set is empty")
    candidate = min(fps.points, key=lambda p: (float(p.sum()), tuple(p)))
    for other in fps.points:
        if not (candidate <= other + tol).all():
            raise ValueError(
                "no least element: fixed points are incomparable "
                f"({candidate} vs {other}); this contradicts the ordered "
                "fixed-point structure and should be investigated"
            )
    return candidate
