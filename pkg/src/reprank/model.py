"""Sparse bipartite rating data shared by every other module.

A :class:`RatingTable` stores ``(user, object, rating)`` triples as three
parallel arrays sorted by ``(user, object)``, plus a permutation that
re-sorts them by ``(object, user)``.  Both orderings are the canonical
summation orders used by the engine, so results never depend on the order
in which triples were supplied.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

DEFAULT_BOUNDS = (0.0, 5.0)


class RatingError(ValueError):
    """Raised for triples that violate the table invariants."""


@dataclass(frozen=True, eq=False)
class RatingTable:
    """Immutable store of ratings on an ``N x M`` bipartite graph.

    Use :func:`build_table` rather than the constructor; it validates the
    input and establishes the sort orders the rest of the package relies on.
    """

    num_users: int
    num_objects: int
    users: np.ndarray
    objects: np.ndarray
    ratings: np.ndarray
    bounds: tuple[float, float] = DEFAULT_BOUNDS
    duplicates: int = 0
    # External labels, when loaded from a file; index i -> label.
    user_labels: tuple | None = None
    object_labels: tuple | None = None
    _by_object: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        for name in ("users", "objects", "ratings", "_by_object"):
            arr = getattr(self, name)
            if arr is not None:
                arr.setflags(write=False)

    def __len__(self) -> int:
        return int(self.ratings.size)

    @property
    def by_object(self) -> np.ndarray:
        """Permutation of triple positions sorted by ``(object, user)``."""
        return self._by_object

    @property
    def user_degree(self) -> np.ndarray:
        """M_i, the number of objects each user rated."""
        return np.bincount(self.users, minlength=self.num_users)

    @property
    def object_degree(self) -> np.ndarray:
        """N_k, the number of users who rated each object."""
        return np.bincount(self.objects, minlength=self.num_objects)

    @property
    def rated_users(self) -> np.ndarray:
        return self.user_degree > 0

    @property
    def rated_objects(self) -> np.ndarray:
        return self.object_degree > 0

    @property
    def triples(self) -> list[tuple[int, int, float]]:
        return list(zip(self.users.tolist(), self.objects.tolist(), self.ratings.tolist()))

    def per_user(self, user: int) -> list[tuple[int, float]]:
        """``(object, rating)`` pairs voted by ``user``, ascending object id."""
        lo, hi = np.searchsorted(self.users, [user, user + 1])
        return list(zip(self.objects[lo:hi].tolist(), self.ratings[lo:hi].tolist()))

    def per_object(self, obj: int) -> list[tuple[int, float]]:
        """``(user, rating)`` pairs voting ``obj``, ascending user id."""
        sorted_objects = self.objects[self._by_object]
        lo, hi = np.searchsorted(sorted_objects, [obj, obj + 1])
        idx = self._by_object[lo:hi]
        return list(zip(self.users[idx].tolist(), self.ratings[idx].tolist()))

    def to_dense(self, fill: float = np.nan) -> np.ndarray:
        out = np.full((self.num_users, self.num_objects), fill, dtype=float)
        out[self.users, self.objects] = self.ratings
        return out

    def relabel(self, user_perm: Sequence[int], object_perm: Sequence[int]) -> RatingTable:
        """Table with user ``i`` renamed ``user_perm[i]`` and object ``k`` renamed ``object_perm[k]``."""
        user_perm = np.asarray(user_perm)
        object_perm = np.asarray(object_perm)
        return build_table(
            zip(user_perm[self.users].tolist(), object_perm[self.objects].tolist(), self.ratings.tolist()),
            self.num_users,
            self.num_objects,
            self.bounds,
        )


@dataclass
class ReputationState:
    """Output of the iterative refinement.

    ``q`` holds NaN for objects nobody rated; those objects are not ranked.
    """

    q: np.ndarray
    xi: np.ndarray
    iterations: int = 0
    delta_q: float = float("inf")
    delta_xi: float = float("inf")
    converged: bool = False

    @property
    def reputation(self) -> np.ndarray:
        return 1.0 / self.xi


@dataclass(frozen=True)
class GroundTruth:
    """Intrinsic object qualities ``Q`` and user noise magnitudes ``zeta``."""

    Q: np.ndarray
    zeta: np.ndarray

    @property
    def sigma_proxy(self) -> np.ndarray:
        # statistical stand-in for each user's mean-square deviation
        return self.zeta**2


def build_table(
    triples: Iterable[tuple[int, int, float]],
    num_users: int,
    num_objects: int,
    bounds: tuple[float, float] = DEFAULT_BOUNDS,
    *,
    user_labels: tuple | None = None,
    object_labels: tuple | None = None,
) -> RatingTable:
    """Validate ``triples`` and build a :class:`RatingTable`.

    Repeated ``(user, object)`` pairs keep the last occurrence; the number of
    dropped entries is stored in ``RatingTable.duplicates``.
    """
    if num_users < 0 or num_objects < 0:
        raise RatingError("table dimensions must be non-negative")
    lo, hi = float(bounds[0]), float(bounds[1])
    if not lo <= hi:
        raise RatingError(f"invalid rating bounds {bounds!r}")

    rows = list(triples)
    if rows:
        users = np.fromiter((r[0] for r in rows), dtype=np.int64, count=len(rows))
        objects = np.fromiter((r[1] for r in rows), dtype=np.int64, count=len(rows))
        ratings = np.fromiter((r[2] for r in rows), dtype=float, count=len(rows))
    else:
        users = np.empty(0, dtype=np.int64)
        objects = np.empty(0, dtype=np.int64)
        ratings = np.empty(0, dtype=float)
    return from_arrays(
        users, objects, ratings, num_users, num_objects, (lo, hi),
        user_labels=user_labels, object_labels=object_labels,
    )


def from_arrays(
    users: np.ndarray,
    objects: np.ndarray,
    ratings: np.ndarray,
    num_users: int,
    num_objects: int,
    bounds: tuple[float, float] = DEFAULT_BOUNDS,
    *,
    user_labels: tuple | None = None,
    object_labels: tuple | None = None,
) -> RatingTable:
    """Array form of :func:`build_table`, avoiding a round trip through tuples."""
    users = np.asarray(users, dtype=np.int64)
    objects = np.asarray(objects, dtype=np.int64)
    ratings = np.asarray(ratings, dtype=float)
    lo, hi = float(bounds[0]), float(bounds[1])

    bad = (users < 0) | (users >= num_users) | (objects < 0) | (objects >= num_objects)
    if bad.any():
        j = int(np.flatnonzero(bad)[0])
        raise RatingError(
            f"triple {j} ({users[j]}, {objects[j]}, {ratings[j]}) has an index outside "
            f"N={num_users}, M={num_objects}"
        )
    bad = ~((ratings >= lo) & (ratings <= hi))
    if bad.any():
        j = int(np.flatnonzero(bad)[0])
        raise RatingError(
            f"triple {j} ({users[j]}, {objects[j]}, {ratings[j]}) has a rating outside [{lo}, {hi}]"
        )

    # keep-last: a stable sort on the pair key, then take the final entry of each run
    key = users * max(num_objects, 1) + objects
    order = np.argsort(key, kind="stable")
    key = key[order]
    last = np.ones(key.size, dtype=bool)
    last[:-1] = key[1:] != key[:-1]
    keep = order[last]
    duplicates = int(key.size - keep.size)

    users, objects, ratings = users[keep], objects[keep], ratings[keep]
    by_object = np.lexsort((users, objects))
    return RatingTable(
        num_users=int(num_users),
        num_objects=int(num_objects),
        users=users,
        objects=objects,
        ratings=ratings,
        bounds=(lo, hi),
        duplicates=duplicates,
        user_labels=user_labels,
        object_labels=object_labels,
        _by_object=by_object,
    )


def density(table: RatingTable) -> float:
    """Fraction of the ``N * M`` user-object pairs that carry a rating."""
    if table.num_users < 1 or table.num_objects < 1:
        raise RatingError("density needs at least one user and one object")
    return len(table) / (table.num_users * table.num_objects)
