"""Core model for slotted-Aloha random access with spatial reuse.

Players share a collision channel. Player i transmits with probability
q_i per slot and succeeds only when none of its interferers transmit,
so its long-run throughput is q_i * prod_{j in N(i)} (1 - q_j), where
N(i) is the set of players whose transmissions collide with i's
reception. The interference pattern is a binary directed matrix with a
zero diagonal; it need not be symmetric.

Each player wants to hit a target rate with the smallest transmission
probability. The induced best-response map, clipped at 1, sends the
box [0, 1]^n into itself and is order-preserving for the componentwise
partial order, which is what the solver module exploits.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "Game",
    "achieved_rate",
    "best_response",
    "residual",
    "leq",
    "is_fixed_point",
    "FIXED_POINT_TOL",
]

# Default infinity-norm tolerance for fixed-point membership.
FIXED_POINT_TOL = 1e-9


def _as_binary_matrix(matrix) -> np.ndarray:
    a = np.asarray(matrix)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"interference matrix must be square, got shape {a.shape}")
    entries = np.asarray(a, dtype=float)
    if not np.isin(entries, (0.0, 1.0)).all():
        raise ValueError("interference matrix entries must be exactly 0 or 1")
    if entries.diagonal().any():
        raise ValueError("interference matrix diagonal must be zero (no self-interference)")
    out = entries.astype(np.int8)
    out.flags.writeable = False
    return out


def _as_rate_vector(rates, n: int) -> np.ndarray:
    y = np.asarray(rates, dtype=float)
    if y.shape != (n,):
        raise ValueError(f"rates must have shape ({n},), got {y.shape}")
    if not (np.isfinite(y).all() and (y >= 0.0).all() and (y <= 1.0).all()):
        raise ValueError("target rates must lie in [0, 1]")
    y = y.copy()
    y.flags.writeable = False
    return y


@dataclass(frozen=True)
class Game:
    """Immutable problem statement: interference matrix plus target rates.

    ``matrix[i, j] == 1`` means player j interferes with player i.
    """

    matrix: np.ndarray
    rates: np.ndarray

    def __post_init__(self):
        a = _as_binary_matrix(self.matrix)
        y = _as_rate_vector(self.rates, a.shape[0])
        object.__setattr__(self, "matrix", a)
        object.__setattr__(self, "rates", y)

    @property
    def n(self) -> int:
        return self.matrix.shape[0]


def _check_vector(q, n: int) -> np.ndarray:
    q = np.asarray(q, dtype=float)
    if q.shape[-1] != n:
        raise ValueError(f"probability vector has length {q.shape[-1]}, expected {n}")
    return q


def success_product(q, matrix) -> np.ndarray:
    """Per-player probability that no interferer transmits.

    Returns prod_{j: matrix[i, j] = 1} (1 - q_j) for each i; an empty
    neighbourhood gives 1. Accepts leading batch dimensions on ``q``.
    """
    mask = np.asarray(matrix, dtype=bool)
    q = _check_vector(q, mask.shape[0])
    factors = np.where(mask, 1.0 - q[..., np.newaxis, :], 1.0)
    return factors.prod(axis=-1)


def achieved_rate(q, matrix) -> np.ndarray:
    """Throughput vector q_i * prod_{j in N(i)} (1 - q_j) at the point q."""
    return np.asarray(q, dtype=float) * success_product(q, matrix)


def best_response(q, game: Game) -> np.ndarray:
    """Clipped best-response map.

    Component i is min(rate_i / prod_{j in N(i)} (1 - q_j), 1). A zero
    product means the neighbours jam the channel: the component is 1
    when the target rate is positive and 0 when it is zero (the
    continuous limit of the clipped quotient).
    """
    prod = success_product(q, game.matrix)
    positive = prod > 0.0
    raw = np.divide(game.rates, prod, out=np.zeros_like(prod), where=positive)
    jammed = np.where(game.rates > 0.0, 1.0, 0.0)
    return np.where(positive, np.minimum(raw, 1.0), jammed)


def residual(q, game: Game) -> np.ndarray:
    """best_response(q) - q, the drift of the game dynamics."""
    return best_response(q, game) - _check_vector(q, game.n)


def leq(a, b) -> bool:
    """Componentwise partial order: a_i <= b_i for every i (exact comparisons)."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise ValueError(f"cannot compare vectors of shapes {a.shape} and {b.shape}")
    return bool((a <= b).all())


def is_fixed_point(q, game: Game, tol: float = FIXED_POINT_TOL) -> bool:
    """True when the infinity norm of the residual is at most tol."""
    if tol <= 0.0:
        raise ValueError("tol must be positive")
    return bool(np.abs(residual(q, game)).max() <= tol)
