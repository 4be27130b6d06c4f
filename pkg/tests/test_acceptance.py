"""Exit criteria for the package, one test per criterion.

Each test reports a PASS/FAIL line (see ``conftest.py``) with the measured
numbers.  Set ``REPRANK_MOVIELENS_MANIFEST`` to a manifest for the full
MovieLens-1M data to run the optional real-data check in criterion 9.
"""

import os
import time
from itertools import combinations

import numpy as np
import pytest
from scipy import stats

from reprank.engine import EngineConfig, run_to_fixed_point, step
from reprank.experiments import (SweepSpec, default_alphas, run_dataset_sweep, run_synthetic_sweep,
                                 select, stderr, write_report)
from reprank.ingest import (IngestError, bundled, export_table, load_dataset, load_ratings,
                            read_manifest)
from reprank.metrics import (BenchmarkSet, Ranking, auc, auc_pairwise, kendall_tau,
                             kendall_tau_bruteforce)
from reprank.model import GroundTruth, from_arrays
from reprank.synth import GeneratorConfig, PowerLaw, Uniform, draw_ground_truth, generate_ratings

DESK = dict(N=500, M=250, rho=0.05)


def combined_se(a, b):
    return float(np.hypot(stderr(a), stderr(b)))


def test_c1_alpha_zero_is_simple_average(criterion):
    rng = np.random.default_rng(2024)
    worst_err, worst_iter = 0.0, 0
    for _ in range(50):
        N, M = int(rng.integers(2, 101)), int(rng.integers(2, 51))
        mask = rng.random((N, M)) < rng.uniform(0.05, 0.8)
        u, o = np.nonzero(mask)
        x = rng.integers(1, 6, u.size).astype(float)
        table = from_arrays(u, o, x, N, M)
        state = run_to_fixed_point(table, EngineConfig(alpha=0.0))
        for k in range(M):
            col = x[o == k]
            if col.size:
                worst_err = max(worst_err, abs(state.q[k] - sum(col.tolist()) / col.size))
        worst_iter = max(worst_iter, state.iterations if state.converged else 10**9)
    criterion(worst_err <= 1e-12 and worst_iter <= 2,
              f"max |q - mean| = {worst_err:.2e} (<= 1e-12), max iterations = {worst_iter} (<= 2)")


def test_c2_fixed_point_stability(criterion):
    t0 = time.perf_counter()
    cfg_gen = GeneratorConfig(**DESK, seed=7)
    table = generate_ratings(draw_ground_truth(cfg_gen), cfg_gen)
    changes = []
    for alpha in (0.5, 1.0):
        cfg = EngineConfig(alpha=alpha)
        s = run_to_fixed_point(table, cfg)
        extra = step(table, s, cfg)
        changes.append((alpha, s.converged, extra.delta_q, extra.delta_xi))
    elapsed = time.perf_counter() - t0
    ok = all(c and dq <= 1e-5 and dx <= 1e-5 for _, c, dq, dx in changes) and elapsed < 10
    detail = "; ".join(f"alpha={a}: converged={c}, extra dq={dq:.1e}, dxi={dx:.1e}" for a, c, dq, dx in changes)
    criterion(ok, f"{detail}; {elapsed:.2f}s (< 10s)")


@pytest.mark.slow
def test_c3_weighting_beats_simple_average(criterion):
    t0 = time.perf_counter()
    lines, ok = [], True
    for name, dist in (("uniform", Uniform()), ("powerlaw", PowerLaw())):
        spec = SweepSpec(GeneratorConfig(**DESK, quality_dist=dist), alphas=default_alphas(),
                         realizations=20, base_seed=101)
        rows = run_synthetic_sweep(spec)
        delta, tau = select(rows, "delta"), select(rows, "tau")
        best_d = min((delta[a] for a in spec.alphas if a > 0), key=lambda r: r.mean)
        best_t = max((tau[a] for a in spec.alphas if a > 0), key=lambda r: r.mean)
        gap_d = delta[0.0].mean - best_d.mean
        gap_t = best_t.mean - tau[0.0].mean
        se_d, se_t = combined_se(delta[0.0], best_d), combined_se(tau[0.0], best_t)
        ok &= gap_d > se_d and gap_t > se_t
        lines.append(f"{name}: delta(0)={delta[0.0].mean:.4f} vs min delta={best_d.mean:.4f}"
                     f"@{best_d.alpha} (gap {gap_d:.4f} > se {se_d:.4f}); tau(0)={tau[0.0].mean:.4f}"
                     f" vs max tau={best_t.mean:.4f}@{best_t.alpha} (gap {gap_t:.4f} > se {se_t:.4f})")
    elapsed = time.perf_counter() - t0
    criterion(ok and elapsed < 120, "; ".join(lines) + f"; {elapsed:.1f}s (< 120s)")


@pytest.mark.slow
def test_c4_denser_data_is_more_accurate(criterion):
    means = {}
    for rho in (0.01, 0.05, 0.10):
        spec = SweepSpec(GeneratorConfig(N=500, M=250, rho=rho, quality_dist=PowerLaw()),
                         alphas=[1.0], realizations=20, base_seed=202)
        means[rho] = select(run_synthetic_sweep(spec), "delta")[1.0]
    g1 = means[0.01].mean - means[0.05].mean
    g2 = means[0.05].mean - means[0.10].mean
    s1 = combined_se(means[0.01], means[0.05])
    s2 = combined_se(means[0.05], means[0.10])
    criterion(g1 > s1 and g2 > s2,
              f"delta(rho=0.01)={means[0.01].mean:.4f} > delta(0.05)={means[0.05].mean:.4f} "
              f"(gap {g1:.4f} > se {s1:.4f}) > delta(0.10)={means[0.10].mean:.4f} (gap {g2:.4f} > se {s2:.4f})")


def test_c5_kendall_fast_equals_definition(criterion):
    rng = np.random.default_rng(55)
    mismatches = 0
    for trial in range(100):
        L = int(rng.integers(2, 201))
        levels = int(rng.integers(2, 12)) if trial % 2 else 10**6
        Y = rng.integers(0, levels, L).astype(float)
        Z = rng.integers(0, levels, L).astype(float)
        mismatches += kendall_tau(Y, Z) != kendall_tau_bruteforce(Y, Z)
    # exact pair enumeration on a few small lists, independent of numpy
    for _ in range(10):
        Y = rng.integers(0, 4, 25).tolist()
        Z = rng.integers(0, 4, 25).tolist()
        s = sum((p > 0) - (p < 0) for p in ((Y[i] - Y[j]) * (Z[i] - Z[j]) for i, j in combinations(range(25), 2)))
        mismatches += kendall_tau(Y, Z) != 2 * s / (25 * 24)
    x = np.arange(150.0)
    ends = (kendall_tau(x, x), kendall_tau(x, x[::-1]))
    criterion(mismatches == 0 and ends == (1.0, -1.0),
              f"{mismatches} mismatches over 110 lists; sorted/reversed -> {ends}")


def _ranking(rank_of):
    rank_of = np.asarray(rank_of)
    return Ranking(order=np.argsort(rank_of), rank_of=rank_of)


def test_c6_auc(criterion):
    def placed(M, ranks):
        others = [r for r in range(1, M + 1) if r not in ranks]
        return _ranking(list(ranks) + others), BenchmarkSet(range(len(ranks)))

    r1, b1 = placed(10, [1])
    r2, b2 = placed(10, [3, 5])
    hand = (auc(r1, b1, 10), auc(r2, b2, 10))
    hand_ok = hand[0] == 1.0 and abs(hand[1] - 0.75) < 1e-15

    rng = np.random.default_rng(66)
    bench = BenchmarkSet(range(50))
    vals = [auc_pairwise(_ranking(rng.permutation(1000) + 1), bench) for _ in range(1000)]
    mean = float(np.mean(vals))

    single = BenchmarkSet([0])
    s1_ok = all(auc(r, single) == auc_pairwise(r, single)
                for r in (_ranking(rng.permutation(200) + 1) for _ in range(200)))
    criterion(hand_ok and abs(mean - 0.5) <= 0.02 and s1_ok,
              f"eq9 hand values {hand} (expect 1, 0.75); random pairwise mean {mean:.4f} "
              f"(0.5 +- 0.02); S=1 identity {'holds' if s1_ok else 'fails'}")


def test_c7_generator_statistics(criterion):
    M = 10_000
    zeta = np.array([0.25, 0.5, 1.0, 1.5, 2.0])
    Q = np.random.default_rng(77).uniform(2.0, 3.0, M)  # Q +- zeta stays inside [0, 5]
    table = generate_ratings(GroundTruth(Q=Q, zeta=zeta), GeneratorConfig(N=5, M=M, rho=1.0, seed=77))
    rel = []
    for i, z in enumerate(zeta):
        sel = table.users == i
        mse = np.mean((table.ratings[sel] - Q[table.objects[sel]]) ** 2)
        rel.append(abs(mse / (z**2 / 3) - 1))

    pl = PowerLaw(q_min=0.1, q_max=5.0)
    samples = draw_ground_truth(GeneratorConfig(N=1, M=100_000, quality_dist=pl, seed=78)).Q
    cdf = lambda q: (0.1**-0.5 - np.asarray(q) ** -0.5) / (0.1**-0.5 - 5.0**-0.5)
    ks = stats.kstest(samples, cdf).statistic
    criterion(max(rel) < 0.10 and ks < 0.01,
              f"max relative MSE error vs zeta^2/3 = {max(rel):.4f} (< 0.10); KS distance {ks:.4f} (< 0.01)")


def test_c8_determinism_across_workers(criterion, tmp_path):
    spec = SweepSpec(GeneratorConfig(N=200, M=100, rho=0.05, quality_dist=PowerLaw()),
                     alphas=[0.0, 0.5, 1.0, 1.5], realizations=6, base_seed=88)
    write_report(run_synthetic_sweep(spec, workers=1), tmp_path / "w1.csv")
    write_report(run_synthetic_sweep(spec, workers=3), tmp_path / "w3.csv")
    dspec = SweepSpec(read_manifest(bundled("mini_movielens.cfg")), alphas=[0.0, 1.0, 2.0],
                      realizations=10, base_seed=89)
    write_report(run_dataset_sweep(dspec, workers=1), tmp_path / "d1.csv")
    write_report(run_dataset_sweep(dspec, workers=2), tmp_path / "d2.csv")
    same_s = (tmp_path / "w1.csv").read_bytes() == (tmp_path / "w3.csv").read_bytes()
    same_d = (tmp_path / "d1.csv").read_bytes() == (tmp_path / "d2.csv").read_bytes()
    criterion(same_s and same_d, f"synthetic 1 vs 3 workers identical={same_s}; dataset 1 vs 2 identical={same_d}")


def test_c9_ingestion(criterion, tmp_path):
    table, bench = load_dataset(bundled("mini_movielens.cfg"))
    counts = (table.num_users, table.num_objects, len(bench))
    manifest = export_table(table, None, tmp_path / "rt")
    back = load_ratings(read_manifest(tmp_path / "rt" / "manifest.cfg"))
    roundtrip = (back.num_users, back.num_objects) == (table.num_users, table.num_objects) \
        and back.triples == table.triples and np.array_equal(back.ratings, table.ratings)
    try:
        load_dataset(bundled("movielens_table1.cfg"))
        rejected = False
    except IngestError:
        rejected = True

    real = "MovieLens-1M not supplied, real-data check skipped"
    real_ok = True
    path = os.environ.get("REPRANK_MOVIELENS_MANIFEST")
    if path:
        spec = SweepSpec(read_manifest(path), alphas=default_alphas(), realizations=100)
        auc_rows = select(run_dataset_sweep(spec), "auc_pairwise")
        best = max(r.mean for a, r in auc_rows.items() if a > 0)
        real_ok = best > auc_rows[0.0].mean
        real = f"MovieLens-1M: max AUC(alpha>0)={best:.4f} vs AUC(0)={auc_rows[0.0].mean:.4f}"
    criterion(counts == (40, 30, 5) and roundtrip and rejected and real_ok,
              f"N,M,S={counts} (expect 40,30,5); round-trip exact={roundtrip}; "
              f"declared-count mismatch rejected={rejected}; {real}")
