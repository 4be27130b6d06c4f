"""Alpha sweeps over many seeded realizations.

A synthetic sweep draws a fresh workload for every realization and runs the
engine on that same table for each alpha, so alpha is the only thing that
varies inside a realization.  A dataset sweep runs the engine once per
alpha and repeats only the random tie-breaking of the ranking.

Seeds are derived from ``(base_seed, purpose, ...)`` with
:class:`numpy.random.SeedSequence`, so realization ``r`` is the same
regardless of how many realizations or workers there are.
"""

from __future__ import annotations

import csv
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from . import engine as _engine
from .ingest import DatasetManifest, load_dataset
from .metrics import auc, auc_pairwise, quality_rmse, rank_objects, reputation_tau
from .synth import GeneratorConfig, generate

REPORT_HEADER = ("alpha", "metric", "mean", "std", "n", "mean_iterations", "convergence_rate")

# spawn-key prefixes for the derived seeds
_DATA_SEEDS = 0
_TIEBREAK_SEEDS = 1


def default_alphas() -> tuple[float, ...]:
    return tuple(round(0.1 * i, 10) for i in range(21))


@dataclass(frozen=True)
class EngineSettings:
    """Engine parameters shared by every alpha of a sweep."""

    delta_c: float = 1e-5
    xi_floor: float = 1e-5
    max_iterations: int = 1000

    def config(self, alpha: float) -> _engine.EngineConfig:
        return _engine.EngineConfig(alpha=alpha, delta_c=self.delta_c,
                                    xi_floor=self.xi_floor, max_iterations=self.max_iterations)


@dataclass
class SweepSpec:
    workload: GeneratorConfig | DatasetManifest
    alphas: Sequence[float] = field(default_factory=default_alphas)
    realizations: int = 100
    base_seed: int = 0
    engine: EngineSettings = field(default_factory=EngineSettings)
    outputs: Path | None = None

    def __post_init__(self):
        self.alphas = tuple(float(a) for a in self.alphas)
        if not self.alphas:
            raise ValueError("alpha grid is empty")
        if any(a < 0 for a in self.alphas):
            raise ValueError("alphas must be non-negative")
        if self.realizations < 1:
            raise ValueError("need at least one realization")


@dataclass(frozen=True)
class SweepRow:
    alpha: float
    metric: str
    mean: float
    std: float
    n: int
    mean_iterations: float
    convergence_rate: float


def _seed(base_seed: int, *key: int) -> np.random.SeedSequence:
    return np.random.SeedSequence(base_seed, spawn_key=key)


def _map(fn, jobs, workers: int):
    if workers <= 1:
        return [fn(*job) for job in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, *zip(*jobs)))


def _aggregate(alpha: float, metric: str, values, iterations, converged) -> SweepRow:
    values = np.asarray(values, dtype=float)
    n = values.size
    return SweepRow(
        alpha=alpha,
        metric=metric,
        mean=float(values.mean()),
        std=float(values.std(ddof=1)) if n > 1 else 0.0,
        n=n,
        mean_iterations=float(np.mean(iterations)),
        convergence_rate=float(np.mean(converged)),
    )


def synthetic_realization(gen: GeneratorConfig, settings: EngineSettings,
                          alphas: Sequence[float], base_seed: int, r: int):
    """delta, tau, iterations and convergence for every alpha on realization ``r``."""
    table, truth = generate(gen, _seed(base_seed, _DATA_SEEDS, r))
    rated = table.rated_objects
    out = []
    for alpha in alphas:
        state = _engine.run_to_fixed_point(table, settings.config(alpha))
        delta = quality_rmse(state.q[rated], truth.Q[rated])
        tau = reputation_tau(state, truth, table)
        out.append((delta, tau, state.iterations, state.converged))
    return out


def run_synthetic_sweep(spec: SweepSpec, workers: int = 1) -> list[SweepRow]:
    """Mean and spread of the quality error and reputation tau per alpha."""
    if not isinstance(spec.workload, GeneratorConfig):
        raise TypeError("synthetic sweep needs a GeneratorConfig workload")
    jobs = [(spec.workload, spec.engine, spec.alphas, spec.base_seed, r)
            for r in range(spec.realizations)]
    results = _map(synthetic_realization, jobs, workers)

    rows = []
    for j, alpha in enumerate(spec.alphas):
        per_alpha = [res[j] for res in results]
        iters = [p[2] for p in per_alpha]
        conv = [p[3] for p in per_alpha]
        rows.append(_aggregate(alpha, "delta", [p[0] for p in per_alpha], iters, conv))
        rows.append(_aggregate(alpha, "tau", [p[1] for p in per_alpha], iters, conv))
    return rows


def dataset_alpha(table, bench, settings: EngineSettings, alpha: float,
                  alpha_index: int, realizations: int, base_seed: int):
    state = _engine.run_to_fixed_point(table, settings.config(alpha))
    eq9, pairwise = [], []
    for r in range(realizations):
        ranking = rank_objects(state.q, np.random.default_rng(_seed(base_seed, _TIEBREAK_SEEDS, alpha_index, r)))
        eq9.append(auc(ranking, bench))
        pairwise.append(auc_pairwise(ranking, bench))
    return eq9, pairwise, state.iterations, state.converged


def run_dataset_sweep(spec: SweepSpec, workers: int = 1) -> list[SweepRow]:
    """AUC of the benchmark objects per alpha, averaged over tie-breaks."""
    if not isinstance(spec.workload, DatasetManifest):
        raise TypeError("dataset sweep needs a DatasetManifest workload")
    if spec.workload.benchmark_path is None:
        raise ValueError(f"{spec.workload.name}: dataset sweep needs a benchmark list")
    table, bench = load_dataset(spec.workload)

    jobs = [(table, bench, spec.engine, alpha, j, spec.realizations, spec.base_seed)
            for j, alpha in enumerate(spec.alphas)]
    results = _map(dataset_alpha, jobs, workers)

    rows = []
    for alpha, (eq9, pairwise, iters, conv) in zip(spec.alphas, results):
        rows.append(_aggregate(alpha, "auc_eq9", eq9, [iters], [conv]))
        rows.append(_aggregate(alpha, "auc_pairwise", pairwise, [iters], [conv]))
    return rows


def write_report(rows: Sequence[SweepRow], path: str | Path) -> None:
    """CSV of sweep rows sorted by (metric, alpha); floats written round-trip exact."""
    path = Path(path)
    if path.parent != Path(""):
        path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(REPORT_HEADER)
        for row in sorted(rows, key=lambda r: (r.metric, r.alpha)):
            w.writerow((repr(row.alpha), row.metric, repr(row.mean), repr(row.std), row.n,
                        repr(row.mean_iterations), repr(row.convergence_rate)))


def read_report(path: str | Path) -> list[SweepRow]:
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != REPORT_HEADER:
            raise ValueError(f"{path}: not a sweep report")
        return [
            SweepRow(alpha=float(d["alpha"]), metric=d["metric"], mean=float(d["mean"]),
                     std=float(d["std"]), n=int(d["n"]),
                     mean_iterations=float(d["mean_iterations"]),
                     convergence_rate=float(d["convergence_rate"]))
            for d in reader
        ]


def select(rows: Sequence[SweepRow], metric: str) -> dict[float, SweepRow]:
    """Rows of one metric keyed by alpha."""
    return {r.alpha: r for r in rows if r.metric == metric}


def stderr(row: SweepRow) -> float:
    return row.std / math.sqrt(row.n)
