"""Artificial rating workloads with known ground truth.

Objects get an intrinsic quality ``Q_k`` and users a noise level
``zeta_i``.  Each user-object pair is rated independently with probability
``rho``; the rating is ``Q_k + psi * zeta_i`` with ``psi ~ U(-1, 1)``,
clipped to the rating range.

Randomness is drawn from :class:`numpy.random.SeedSequence` children keyed
by purpose and user index, so a given seed always yields the same table no
matter how (or in which order) users are generated.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

import numpy as np

from .model import GroundTruth, RatingTable, from_arrays

SeedLike = Union[int, np.random.SeedSequence, None]

# spawn-key prefixes separating the independent random streams
_QUALITY_STREAM = 0
_ZETA_STREAM = 1
_USER_STREAM = 2


@dataclass(frozen=True)
class Uniform:
    lo: float = 0.0
    hi: float = 5.0

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        return rng.uniform(self.lo, self.hi, size)


@dataclass(frozen=True)
class PowerLaw:
    """Density ``p(Q) ~ Q**exponent`` truncated to ``[q_min, q_max]``.

    ``q_min`` must be positive since the density is not integrable at zero
    for ``exponent <= -1``.
    """

    exponent: float = -1.5
    q_min: float = 0.1
    q_max: float = 5.0

    def __post_init__(self):
        if not 0 < self.q_min < self.q_max:
            raise ValueError("power law needs 0 < q_min < q_max")

    def cdf(self, q):
        q = np.clip(np.asarray(q, dtype=float), self.q_min, self.q_max)
        a = self.exponent + 1.0
        if a == 0:
            return np.log(q / self.q_min) / np.log(self.q_max / self.q_min)
        return (q**a - self.q_min**a) / (self.q_max**a - self.q_min**a)

    def ppf(self, u):
        u = np.asarray(u, dtype=float)
        a = self.exponent + 1.0
        if a == 0:
            return self.q_min * (self.q_max / self.q_min) ** u
        lo, hi = self.q_min**a, self.q_max**a
        return np.clip((lo + u * (hi - lo)) ** (1.0 / a), self.q_min, self.q_max)

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        return self.ppf(rng.random(size))


@dataclass(frozen=True)
class GeneratorConfig:
    N: int = 2000
    M: int = 1000
    rho: float = 0.05
    quality_dist: Uniform | PowerLaw = field(default_factory=Uniform)
    zeta_max: float = 5.0
    bounds: tuple[float, float] = (0.0, 5.0)
    seed: int = 0

    def __post_init__(self):
        if self.N < 1 or self.M < 1:
            raise ValueError("N and M must be positive")
        if not 0 < self.rho <= 1:
            raise ValueError("rho must lie in (0, 1]")


def _root(seed: SeedLike, cfg: GeneratorConfig) -> np.random.SeedSequence:
    if isinstance(seed, np.random.SeedSequence):
        return seed
    return np.random.SeedSequence(cfg.seed if seed is None else seed)


def _child(root: np.random.SeedSequence, *key: int) -> np.random.Generator:
    ss = np.random.SeedSequence(root.entropy, spawn_key=tuple(root.spawn_key) + key)
    return np.random.Generator(np.random.PCG64(ss))


def draw_ground_truth(cfg: GeneratorConfig, seed: SeedLike = None) -> GroundTruth:
    """Draw object qualities and user noise levels."""
    root = _root(seed, cfg)
    Q = cfg.quality_dist.sample(_child(root, _QUALITY_STREAM), cfg.M)
    Q = np.clip(Q, *cfg.bounds)
    zeta = _child(root, _ZETA_STREAM).uniform(0.0, cfg.zeta_max, cfg.N)
    return GroundTruth(Q=Q, zeta=zeta)


def generate_ratings(truth: GroundTruth, cfg: GeneratorConfig, seed: SeedLike = None) -> RatingTable:
    """Sample a rating table from ``truth``; each user has its own stream."""
    Q = np.asarray(truth.Q, dtype=float)
    zeta = np.asarray(truth.zeta, dtype=float)
    if Q.shape != (cfg.M,) or zeta.shape != (cfg.N,):
        raise ValueError(
            f"ground truth shape ({zeta.size} users, {Q.size} objects) does not match "
            f"N={cfg.N}, M={cfg.M}"
        )
    root = _root(seed, cfg)
    lo, hi = cfg.bounds

    users, objects, ratings = [], [], []
    for i in range(cfg.N):
        rng = _child(root, _USER_STREAM, i)
        if cfg.rho >= 1:
            picked = np.arange(cfg.M)
        else:
            picked = np.flatnonzero(rng.random(cfg.M) < cfg.rho)
        psi = rng.uniform(-1.0, 1.0, picked.size)
        users.append(np.full(picked.size, i, dtype=np.int64))
        objects.append(picked)
        ratings.append(np.clip(Q[picked] + psi * zeta[i], lo, hi))

    return from_arrays(
        np.concatenate(users), np.concatenate(objects), np.concatenate(ratings),
        cfg.N, cfg.M, cfg.bounds,
    )


def generate(cfg: GeneratorConfig, seed: SeedLike = None) -> tuple[RatingTable, GroundTruth]:
    """Ground truth and a rating table drawn from it, from one seed."""
    root = _root(seed, cfg)
    truth = draw_ground_truth(cfg, root)
    return generate_ratings(truth, cfg, root), truth
