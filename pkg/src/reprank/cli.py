"""Command-line entry point: ``reprank {sweep-synth,sweep-data,gen,rank}``."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from .engine import EngineConfig, run_to_fixed_point
from .experiments import (EngineSettings, SweepSpec, default_alphas, run_dataset_sweep,
                          run_synthetic_sweep, write_report)
from .ingest import (DatasetManifest, IngestError, export_table, load_dataset, parse_kv,
                     read_manifest)
from .metrics import rank_objects
from .synth import GeneratorConfig, PowerLaw, Uniform, generate


def parse_alphas(text: str) -> tuple[float, ...]:
    """``0,0.5,1`` or an inclusive range ``start:stop:step``."""
    if ":" in text:
        start, stop, step = (float(p) for p in text.split(":"))
        if step <= 0:
            raise argparse.ArgumentTypeError("alpha step must be positive")
        n = int(np.floor((stop - start) / step + 1e-9)) + 1
        return tuple(round(start + i * step, 10) for i in range(n))
    return tuple(float(a) for a in text.split(",") if a.strip())


def _engine_args(p):
    p.add_argument("--delta-c", type=float, default=1e-5)
    p.add_argument("--xi-floor", type=float, default=1e-5)
    p.add_argument("--max-iterations", type=int, default=1000)


def _sweep_args(p):
    p.add_argument("--alphas", type=parse_alphas, default=default_alphas(),
                   help="comma list or start:stop:step (default 0:2:0.1)")
    p.add_argument("--realizations", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", type=Path, required=True, help="CSV report path")
    _engine_args(p)


def _generator_args(p):
    p.add_argument("--config", type=Path, help="key = value file with generator settings")
    p.add_argument("--N", type=int)
    p.add_argument("--M", type=int)
    p.add_argument("--rho", type=float)
    p.add_argument("--quality", choices=("uniform", "powerlaw"))
    p.add_argument("--exponent", type=float)
    p.add_argument("--q-min", type=float)


_GEN_KEYS = {"N": int, "M": int, "rho": float, "quality": str, "exponent": float, "q_min": float, "seed": int}


def generator_config(args) -> GeneratorConfig:
    settings = {"N": 2000, "M": 1000, "rho": 0.05, "quality": "uniform", "exponent": -1.5, "q_min": 0.1}
    if args.config is not None:
        for key, value in parse_kv(args.config).items():
            if key not in _GEN_KEYS:
                raise IngestError(f"{args.config}: unknown generator key {key!r}")
            settings[key] = _GEN_KEYS[key](value)
    for key in ("N", "M", "rho", "quality", "exponent", "q_min"):
        value = getattr(args, key, None)
        if value is not None:
            settings[key] = value
    if settings["quality"] == "powerlaw":
        dist = PowerLaw(exponent=settings["exponent"], q_min=settings["q_min"])
    elif settings["quality"] == "uniform":
        dist = Uniform()
    else:
        raise ValueError(f"unknown quality distribution {settings['quality']!r}")
    seed = args.seed if args.seed is not None else settings.get("seed", 0)
    return GeneratorConfig(N=settings["N"], M=settings["M"], rho=settings["rho"],
                           quality_dist=dist, seed=seed)


def _manifest(args) -> DatasetManifest:
    if args.config is not None:
        manifest = read_manifest(args.config)
    elif args.ratings is not None:
        manifest = DatasetManifest(name=args.ratings.stem, ratings_path=args.ratings,
                                   format=args.format)
    else:
        raise IngestError("give --config MANIFEST or --ratings FILE")
    if getattr(args, "benchmarks", None) is not None:
        manifest.benchmark_path = args.benchmarks
    return manifest


def _dataset_args(p):
    p.add_argument("--config", type=Path, help="dataset manifest")
    p.add_argument("--ratings", type=Path)
    p.add_argument("--format", default="CsvTriples", choices=("CsvTriples", "MovieLensDat"))
    p.add_argument("--benchmarks", type=Path)


def cmd_sweep_synth(args):
    spec = SweepSpec(
        workload=generator_config(args),
        alphas=args.alphas,
        realizations=args.realizations,
        base_seed=args.seed,
        engine=EngineSettings(args.delta_c, args.xi_floor, args.max_iterations),
        outputs=args.out,
    )
    write_report(run_synthetic_sweep(spec, workers=args.workers), args.out)


def cmd_sweep_data(args):
    spec = SweepSpec(
        workload=_manifest(args),
        alphas=args.alphas,
        realizations=args.realizations,
        base_seed=args.seed,
        engine=EngineSettings(args.delta_c, args.xi_floor, args.max_iterations),
        outputs=args.out,
    )
    write_report(run_dataset_sweep(spec, workers=args.workers), args.out)


def cmd_gen(args):
    cfg = generator_config(args)
    table, truth = generate(cfg)
    export_table(table, truth, args.out)
    print(f"wrote {len(table)} ratings ({cfg.N} users, {cfg.M} objects) to {args.out}")


def cmd_rank(args):
    table, bench = load_dataset(_manifest(args))
    state = run_to_fixed_point(table, EngineConfig(alpha=args.alpha, delta_c=args.delta_c,
                                                   xi_floor=args.xi_floor,
                                                   max_iterations=args.max_iterations))
    ranking = rank_objects(state.q, args.seed)
    labels = table.object_labels
    status = "converged" if state.converged else "NOT converged"
    print(f"# alpha={args.alpha} {status} after {state.iterations} iterations")
    print("rank\tobject\tquality\tbenchmark")
    for obj in ranking.order[: args.top_k]:
        label = labels[obj] if labels is not None else obj
        mark = "*" if bench is not None and int(obj) in bench else ""
        print(f"{ranking.rank_of[obj]}\t{label}\t{state.q[obj]:.6f}\t{mark}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="reprank", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sweep-synth", help="alpha sweep on synthetic workloads")
    _sweep_args(p)
    _generator_args(p)
    p.set_defaults(func=cmd_sweep_synth)

    p = sub.add_parser("sweep-data", help="alpha sweep of benchmark AUC on a dataset")
    _sweep_args(p)
    _dataset_args(p)
    p.set_defaults(func=cmd_sweep_data)

    p = sub.add_parser("gen", help="generate and export a synthetic workload")
    _generator_args(p)
    p.add_argument("--seed", type=int)
    p.add_argument("--out", type=Path, required=True, help="output directory")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("rank", help="rank a dataset's objects at one alpha")
    _dataset_args(p)
    _engine_args(p)
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--top-k", type=int, default=20)
    p.add_argument("--seed", type=int, default=0, help="tie-break seed")
    p.set_defaults(func=cmd_rank)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        args.func(args)
    except (IngestError, ValueError, TypeError, OSError) as exc:
        print(f"reprank: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
