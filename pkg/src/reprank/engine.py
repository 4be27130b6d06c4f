"""Iterative refinement of object qualities and user reputations.

Each step computes object qualities as reputation-weighted mean ratings,
where user ``i`` carries weight ``xi_i ** -alpha``, and then re-estimates
every ``xi_i`` as the user's mean-square deviation from those qualities.
Starting from ``xi = 1`` the two phases alternate until the largest change
in both vectors drops below ``delta_c``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .model import RatingTable, ReputationState

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class EngineConfig:
    alpha: float = 1.0
    delta_c: float = 1e-5
    xi_floor: float = 1e-5
    max_iterations: int = 1000
    alpha_cap: float = 8.0

    def __post_init__(self):
        if not 0 <= self.alpha <= self.alpha_cap:
            raise ValueError(f"alpha must lie in [0, {self.alpha_cap}], got {self.alpha}")
        if self.delta_c <= 0:
            raise ValueError("delta_c must be positive")
        if self.xi_floor <= 0:
            raise ValueError("xi_floor must be positive")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be at least 1")


def update_qualities(table: RatingTable, xi: np.ndarray, alpha: float) -> np.ndarray:
    """Reputation-weighted mean rating of every object.

    Objects nobody rated get NaN.  Weights are rescaled per object by the
    largest weight among its voters, which leaves the ratio unchanged but
    keeps ``xi ** -alpha`` finite for small ``xi`` and large ``alpha``.
    """
    xi = np.asarray(xi, dtype=float)
    order = table.by_object
    users = table.users[order]
    objects = table.objects[order]
    x = table.ratings[order]
    M = table.num_objects

    q = np.full(M, np.nan)
    if x.size == 0:
        return q

    log_w = -alpha * np.log(xi[users])
    starts = np.flatnonzero(np.r_[True, objects[1:] != objects[:-1]])
    seg_max = np.maximum.reduceat(log_w, starts)
    counts = np.diff(np.r_[starts, x.size])
    w = np.exp(log_w - np.repeat(seg_max, counts))

    num = np.bincount(objects, weights=w * x, minlength=M)
    den = np.bincount(objects, weights=w, minlength=M)
    rated = den > 0
    q[rated] = num[rated] / den[rated]
    # rounding can push a convex combination a hair outside the rating range
    return np.clip(q, *table.bounds)


def update_deviations(table: RatingTable, q: np.ndarray, xi_floor: float = 1e-5) -> np.ndarray:
    """Mean-square deviation of each user's ratings from ``q``, floored.

    Users with no ratings keep the neutral value 1.
    """
    q = np.asarray(q, dtype=float)
    N = table.num_users
    sq = (table.ratings - q[table.objects]) ** 2
    total = np.bincount(table.users, weights=sq, minlength=N)
    deg = np.bincount(table.users, minlength=N)
    xi = np.ones(N)
    rated = deg > 0
    xi[rated] = np.maximum(total[rated] / deg[rated], xi_floor)
    return xi


def _max_abs_diff(a: np.ndarray, b: np.ndarray) -> float:
    d = np.abs(a - b)
    d = d[~np.isnan(d)]
    return float(d.max()) if d.size else 0.0


def run_to_fixed_point(table: RatingTable, cfg: EngineConfig | None = None) -> ReputationState:
    """Alternate the quality and deviation updates until both settle.

    The previous-step quality for the first iteration is the plain mean
    rating, i.e. the weighted mean under the initial ``xi = 1``.  Running
    out of iterations is not an error; check ``converged`` on the result.
    """
    cfg = cfg or EngineConfig()
    if len(table) == 0:
        raise ValueError("cannot rank an empty rating table")

    xi = np.ones(table.num_users)
    q = update_qualities(table, xi, 0.0)

    state = ReputationState(q=q, xi=xi)
    for n in range(1, cfg.max_iterations + 1):
        q_new = update_qualities(table, xi, cfg.alpha)
        xi_new = update_deviations(table, q_new, cfg.xi_floor)
        dq = _max_abs_diff(q_new, q)
        dxi = _max_abs_diff(xi_new, xi)
        q, xi = q_new, xi_new
        state = ReputationState(q=q, xi=xi, iterations=n, delta_q=dq, delta_xi=dxi)
        if dq < cfg.delta_c and dxi < cfg.delta_c:
            state.converged = True
            break
    else:
        log.warning(
            "no convergence after %d iterations (alpha=%g, dq=%.3g, dxi=%.3g)",
            cfg.max_iterations, cfg.alpha, state.delta_q, state.delta_xi,
        )
    return state


def step(table: RatingTable, state: ReputationState, cfg: EngineConfig) -> ReputationState:
    """One more quality/deviation round applied to ``state``."""
    q = update_qualities(table, state.xi, cfg.alpha)
    xi = update_deviations(table, q, cfg.xi_floor)
    return ReputationState(
        q=q,
        xi=xi,
        iterations=state.iterations + 1,
        delta_q=_max_abs_diff(q, state.q),
        delta_xi=_max_abs_diff(xi, state.xi),
    )


def simple_average(table: RatingTable) -> np.ndarray:
    """Unweighted mean rating per object (NaN where unrated)."""
    M = table.num_objects
    total = np.bincount(table.objects, weights=table.ratings, minlength=M)
    deg = np.bincount(table.objects, minlength=M)
    with np.errstate(invalid="ignore", divide="ignore"):
        return np.where(deg > 0, total / np.maximum(deg, 1), np.nan)
