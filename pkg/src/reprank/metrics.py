"""Accuracy measures for estimated qualities and reputations.

``kendall_tau`` counts tied pairs as zero, i.e. tau-a:
``(concordant - discordant) / (L (L - 1) / 2)``.  It runs in
``O(L log L)``; ``kendall_tau_bruteforce`` is the direct pairwise sum and
serves as its reference.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .model import GroundTruth, RatingTable, ReputationState


@dataclass(frozen=True)
class BenchmarkSet:
    """Objects known to be of high quality."""

    object_ids: frozenset[int]
    skipped: int = 0

    def __init__(self, object_ids: Iterable[int], skipped: int = 0):
        ids = frozenset(int(i) for i in object_ids)
        if not ids:
            raise ValueError("benchmark set is empty")
        object.__setattr__(self, "object_ids", ids)
        object.__setattr__(self, "skipped", skipped)

    def __len__(self) -> int:
        return len(self.object_ids)

    def __contains__(self, obj) -> bool:
        return obj in self.object_ids


@dataclass(frozen=True)
class Ranking:
    """Ranked objects, best first.

    ``rank_of[k]`` is the 1-based rank of object ``k``, or 0 when the object
    was not ranked.
    """

    order: np.ndarray
    rank_of: np.ndarray

    def __len__(self) -> int:
        return int(self.order.size)


def quality_rmse(q, Q) -> float:
    """Root-mean-square difference between estimated and true qualities."""
    q = np.asarray(q, dtype=float)
    Q = np.asarray(Q, dtype=float)
    if q.shape != Q.shape:
        raise ValueError(f"length mismatch: {q.shape} vs {Q.shape}")
    if q.size == 0:
        raise ValueError("empty input")
    return float(np.sqrt(np.mean((q - Q) ** 2)))


def _check_pair(Y, Z):
    Y = np.asarray(Y, dtype=float)
    Z = np.asarray(Z, dtype=float)
    if Y.shape != Z.shape or Y.ndim != 1:
        raise ValueError(f"need two 1-d lists of equal length, got {Y.shape} and {Z.shape}")
    if Y.size < 2:
        raise ValueError("Kendall's tau needs at least two entries")
    return Y, Z


def _tau_from_score(score: int, L: int) -> float:
    return 2.0 * score / (L * (L - 1))


def kendall_tau_bruteforce(Y, Z) -> float:
    """Direct ``O(L^2)`` evaluation of the pairwise sign sum."""
    Y, Z = _check_pair(Y, Z)
    L = Y.size
    score = 0
    for i in range(L - 1):
        s = np.sign((Y[i] - Y[i + 1:]) * (Z[i] - Z[i + 1:]))
        score += int(s.sum())
    return _tau_from_score(score, L)


def _tied_pairs(*cols: np.ndarray) -> int:
    """Number of pairs equal in every column (compared by value)."""
    order = np.lexsort(cols[::-1])
    same = np.ones(order.size - 1, dtype=bool)
    for c in cols:
        s = c[order]
        same &= s[1:] == s[:-1]
    # run lengths of consecutive equal rows
    breaks = np.flatnonzero(~same)
    runs = np.diff(np.r_[-1, breaks, order.size - 1])
    return int((runs * (runs - 1) // 2).sum())


def _count_inversions(ranks: np.ndarray) -> int:
    """Pairs ``i < j`` with ``ranks[i] > ranks[j]``, via a Fenwick tree."""
    size = int(ranks.max()) + 1 if ranks.size else 0
    tree = [0] * (size + 1)
    inversions = 0
    for r in reversed(ranks.tolist()):
        # count already-seen (to the right) entries with rank < r
        i = r
        while i > 0:
            inversions += tree[i]
            i -= i & -i
        i = r + 1
        while i <= size:
            tree[i] += 1
            i += i & -i
    return inversions


def kendall_tau(Y, Z) -> float:
    """Kendall's tau with tied pairs contributing zero."""
    Y, Z = _check_pair(Y, Z)
    L = Y.size
    n0 = L * (L - 1) // 2
    ties_y = _tied_pairs(Y)
    ties_z = _tied_pairs(Z)
    ties_both = _tied_pairs(Y, Z)

    # sort by Y then Z: strict inversions in Z are exactly the discordant pairs
    order = np.lexsort((Z, Y))
    z_rank = np.unique(Z, return_inverse=True)[1].ravel()
    discordant = _count_inversions(z_rank[order])
    concordant = n0 - ties_y - ties_z + ties_both - discordant
    return _tau_from_score(concordant - discordant, L)


def reputation_tau(
    state: ReputationState,
    truth: GroundTruth,
    table: RatingTable | None = None,
    mode: str = "proxy",
) -> float:
    """Agreement between estimated deviations ``xi`` and the true noise ranking.

    ``mode="proxy"`` compares against ``zeta**2``.  ``mode="realized"``
    compares against each user's actual mean-square deviation from ``Q`` in
    ``table``.  Only users with at least one rating count, and only when a
    table is given to say who they are.
    """
    xi = np.asarray(state.xi, dtype=float)
    if xi.shape != truth.zeta.shape:
        raise ValueError("state and ground truth disagree on the number of users")
    if mode == "proxy":
        target = truth.sigma_proxy
    elif mode == "realized":
        if table is None:
            raise ValueError("realized mode needs the rating table")
        target = realized_deviation(table, truth)
    else:
        raise ValueError(f"unknown mode {mode!r}")

    mask = table.rated_users if table is not None else np.ones(xi.size, dtype=bool)
    if mask.sum() < 2:
        raise ValueError("need at least two rated users")
    return kendall_tau(xi[mask], target[mask])


def realized_deviation(table: RatingTable, truth: GroundTruth) -> np.ndarray:
    """Each user's mean-square deviation from the intrinsic qualities (NaN if unrated)."""
    sq = (table.ratings - truth.Q[table.objects]) ** 2
    total = np.bincount(table.users, weights=sq, minlength=table.num_users)
    deg = table.user_degree
    with np.errstate(invalid="ignore", divide="ignore"):
        return np.where(deg > 0, total / np.maximum(deg, 1), np.nan)


def rank_objects(q, rng: np.random.Generator | int | None = None) -> Ranking:
    """Order objects by descending ``q``, shuffling within tie groups.

    NaN entries (unrated objects) are left out of the ranking.
    """
    q = np.asarray(q, dtype=float)
    rng = np.random.default_rng(rng)
    rated = np.flatnonzero(~np.isnan(q))
    tie_key = rng.permutation(rated.size)
    order = rated[np.lexsort((tie_key, -q[rated]))]
    rank_of = np.zeros(q.size, dtype=np.int64)
    rank_of[order] = np.arange(1, order.size + 1)
    return Ranking(order=order, rank_of=rank_of)


def _bench_ranks(ranking: Ranking, bench: BenchmarkSet) -> np.ndarray:
    ids = np.fromiter(sorted(bench.object_ids), dtype=np.int64)
    if ids.max() >= ranking.rank_of.size or ids.min() < 0:
        raise ValueError("benchmark id outside the ranked object range")
    ranks = ranking.rank_of[ids]
    missing = ids[ranks == 0]
    if missing.size:
        raise ValueError(f"benchmark objects missing from ranking: {missing[:10].tolist()}")
    if ids.size >= len(ranking):
        raise ValueError("need fewer benchmark objects than ranked objects")
    return ranks


def auc(ranking: Ranking, bench: BenchmarkSet, M: int | None = None) -> float:
    """``mean((M - R_i) / (M - S))`` over benchmark ranks ``R_i``.

    ``M`` defaults to the number of ranked objects.  With more than one
    benchmark this can exceed 1; :func:`auc_pairwise` is the bounded variant.
    """
    ranks = _bench_ranks(ranking, bench)
    M = len(ranking) if M is None else M
    S = ranks.size
    return float(np.sum(M - ranks) / (S * (M - S)))


def auc_pairwise(ranking: Ranking, bench: BenchmarkSet) -> float:
    """Fraction of (benchmark, non-benchmark) pairs where the benchmark ranks higher."""
    ranks = np.sort(_bench_ranks(ranking, bench))
    M = len(ranking)
    S = ranks.size
    below = M - ranks
    bench_below = S - 1 - np.arange(S)
    return float(np.sum(below - bench_below) / (S * (M - S)))
