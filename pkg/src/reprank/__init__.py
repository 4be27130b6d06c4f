"""Iterative reputation-weighted ranking for bipartite rating data."""

from .engine import EngineConfig, run_to_fixed_point, simple_average, update_deviations, update_qualities
from .experiments import SweepRow, SweepSpec, run_dataset_sweep, run_synthetic_sweep, write_report
from .ingest import DatasetManifest, export_table, load_benchmarks, load_dataset, load_ratings, read_manifest
from .metrics import (BenchmarkSet, Ranking, auc, auc_pairwise, kendall_tau, quality_rmse,
                      rank_objects, reputation_tau)
from .model import GroundTruth, RatingTable, ReputationState, build_table, density
from .synth import GeneratorConfig, PowerLaw, Uniform, draw_ground_truth, generate, generate_ratings

__version__ = "0.1.0"
