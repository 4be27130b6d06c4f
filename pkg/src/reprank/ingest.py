"""Reading and writing rating data.

Supported inputs:

* MovieLens ``.dat`` logs, ``UserID::MovieID::Rating::Timestamp`` per line;
* CSV triples with a ``user,object,rating`` header;
* benchmark lists, one external object id per line, ``#`` comments allowed;
* manifests, flat ``key = value`` files describing a dataset.

External ids are re-indexed densely (sorted ascending, numerically when all
ids are integers).  A manifest with ``index = identity`` instead uses the
ids as internal indices directly; :func:`export_table` writes such a
manifest so that exported tables load back unchanged, isolated users and
objects included.
"""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

import numpy as np

from .metrics import BenchmarkSet
from .model import DEFAULT_BOUNDS, GroundTruth, RatingError, RatingTable, from_arrays

log = logging.getLogger(__name__)

CSV_HEADER = ("user", "object", "rating")


class IngestError(ValueError):
    pass


class Format(str, Enum):
    MOVIELENS = "MovieLensDat"
    CSV = "CsvTriples"


@dataclass
class DatasetManifest:
    name: str
    ratings_path: Path
    format: Format = Format.CSV
    benchmark_path: Path | None = None
    rating_scale: tuple[float, float] = DEFAULT_BOUNDS
    declared_counts: tuple[int, int, int | None] | None = None
    index: str = "dense"
    num_users: int | None = None
    num_objects: int | None = None

    def __post_init__(self):
        self.ratings_path = Path(self.ratings_path)
        if self.benchmark_path is not None:
            self.benchmark_path = Path(self.benchmark_path)
        self.format = Format(self.format)
        if self.index not in ("dense", "identity"):
            raise IngestError(f"index must be 'dense' or 'identity', got {self.index!r}")

    def to_text(self) -> str:
        lines = [
            f"name = {self.name}",
            f"ratings_path = {self.ratings_path}",
            f"format = {self.format.value}",
            f"rating_scale = {self.rating_scale[0]!r},{self.rating_scale[1]!r}",
            f"index = {self.index}",
        ]
        if self.benchmark_path is not None:
            lines.append(f"benchmark_path = {self.benchmark_path}")
        if self.declared_counts is not None:
            lines.append("declared_counts = " + ",".join("" if c is None else str(c) for c in self.declared_counts))
        if self.num_users is not None:
            lines.append(f"num_users = {self.num_users}")
        if self.num_objects is not None:
            lines.append(f"num_objects = {self.num_objects}")
        return "\n".join(lines) + "\n"


def bundled(name: str) -> Path:
    """Path of a data file shipped with the package (e.g. ``mini_movielens.cfg``)."""
    return Path(__file__).parent / "data" / name


def parse_kv(path: str | Path) -> dict[str, str]:
    """Read a flat ``key = value`` file; blank lines and ``#`` comments are skipped."""
    out = {}
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise IngestError(f"{path}:{lineno}: expected 'key = value'")
        key, value = line.split("=", 1)
        out[key.strip()] = value.strip()
    return out


def _pair(text: str, cast):
    parts = [p.strip() for p in text.split(",")]
    return tuple(cast(p) if p else None for p in parts)


def read_manifest(path: str | Path) -> DatasetManifest:
    """Load a manifest; relative paths resolve against the manifest's directory."""
    path = Path(path)
    kv = parse_kv(path)
    known = {"name", "ratings_path", "benchmark_path", "format", "rating_scale",
             "declared_counts", "index", "num_users", "num_objects"}
    unknown = set(kv) - known
    if unknown:
        raise IngestError(f"{path}: unknown manifest keys {sorted(unknown)}")
    if "ratings_path" not in kv:
        raise IngestError(f"{path}: missing ratings_path")

    base = path.parent
    kwargs = {
        "name": kv.get("name", path.stem),
        "ratings_path": base / kv["ratings_path"],
        "format": kv.get("format", Format.CSV.value),
        "index": kv.get("index", "dense"),
    }
    if "benchmark_path" in kv:
        kwargs["benchmark_path"] = base / kv["benchmark_path"]
    if "rating_scale" in kv:
        lo, hi = _pair(kv["rating_scale"], float)
        kwargs["rating_scale"] = (lo, hi)
    if "declared_counts" in kv:
        counts = _pair(kv["declared_counts"], int)
        if len(counts) == 2:
            counts = counts + (None,)
        if len(counts) != 3:
            raise IngestError(f"{path}: declared_counts takes N,M[,S]")
        kwargs["declared_counts"] = counts
    for key in ("num_users", "num_objects"):
        if key in kv:
            kwargs[key] = int(kv[key])
    try:
        return DatasetManifest(**kwargs)
    except ValueError as exc:
        raise IngestError(f"{path}: {exc}") from exc


def _read_movielens(path: Path):
    rows = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            parts = line.split("::")
            if len(parts) != 4:
                raise IngestError(f"{path}:{lineno}: expected UserID::MovieID::Rating::Timestamp")
            try:
                rating = float(int(parts[2]))
            except ValueError:
                raise IngestError(f"{path}:{lineno}: non-integer rating {parts[2]!r}") from None
            rows.append((parts[0], parts[1], rating, lineno))
    return rows


def _read_csv(path: Path):
    rows = []
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or tuple(h.strip() for h in header) != CSV_HEADER:
            raise IngestError(f"{path}:1: expected header {','.join(CSV_HEADER)}")
        for row in reader:
            lineno = reader.line_num
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != 3:
                raise IngestError(f"{path}:{lineno}: expected 3 fields, got {len(row)}")
            try:
                rating = float(row[2])
            except ValueError:
                raise IngestError(f"{path}:{lineno}: non-numeric rating {row[2]!r}") from None
            rows.append((row[0].strip(), row[1].strip(), rating, lineno))
    return rows


def _sorted_ids(ids):
    ids = set(ids)
    try:
        return sorted(ids, key=int)
    except ValueError:
        return sorted(ids)


def load_ratings(manifest: DatasetManifest) -> RatingTable:
    """Parse the ratings file named by ``manifest`` into a table.

    The returned table carries the external ids in ``user_labels`` and
    ``object_labels``.
    """
    path = manifest.ratings_path
    if not path.exists():
        raise IngestError(f"ratings file not found: {path}")
    rows = _read_movielens(path) if manifest.format is Format.MOVIELENS else _read_csv(path)

    if manifest.index == "identity":
        try:
            users = np.array([int(r[0]) for r in rows], dtype=np.int64)
            objects = np.array([int(r[1]) for r in rows], dtype=np.int64)
        except ValueError as exc:
            raise IngestError(f"{path}: identity index needs integer ids ({exc})") from None
        N = manifest.num_users if manifest.num_users is not None else int(users.max(initial=-1)) + 1
        M = manifest.num_objects if manifest.num_objects is not None else int(objects.max(initial=-1)) + 1
        user_labels = object_labels = None
    else:
        user_labels = tuple(_sorted_ids(r[0] for r in rows))
        object_labels = tuple(_sorted_ids(r[1] for r in rows))
        umap = {u: i for i, u in enumerate(user_labels)}
        omap = {o: k for k, o in enumerate(object_labels)}
        users = np.array([umap[r[0]] for r in rows], dtype=np.int64)
        objects = np.array([omap[r[1]] for r in rows], dtype=np.int64)
        N, M = len(user_labels), len(object_labels)

    ratings = np.array([r[2] for r in rows], dtype=float)
    lo, hi = manifest.rating_scale
    bad = np.flatnonzero(~((ratings >= lo) & (ratings <= hi)))
    if bad.size:
        r = rows[bad[0]]
        raise IngestError(f"{path}:{r[3]}: rating {r[2]} outside [{lo}, {hi}]")

    try:
        table = from_arrays(users, objects, ratings, N, M, manifest.rating_scale,
                            user_labels=user_labels, object_labels=object_labels)
    except RatingError as exc:
        raise IngestError(f"{path}: {exc}") from exc
    if table.duplicates:
        log.info("%s: %d duplicate ratings replaced by later entries", path, table.duplicates)

    if manifest.declared_counts is not None:
        dN, dM = manifest.declared_counts[:2]
        if (dN, dM) != (table.num_users, table.num_objects):
            raise IngestError(
                f"{manifest.name}: expected N={dN}, M={dM} but found "
                f"N={table.num_users}, M={table.num_objects}"
            )
    return table


def load_benchmarks(manifest: DatasetManifest, id_map) -> BenchmarkSet:
    """Read benchmark object ids and translate them to internal indices.

    ``id_map`` is either a mapping from external id to index or the
    ``object_labels`` tuple of a loaded table.  Unknown ids are skipped and
    counted in ``BenchmarkSet.skipped``.
    """
    if manifest.benchmark_path is None:
        raise IngestError(f"{manifest.name}: no benchmark_path in manifest")
    path = manifest.benchmark_path
    if not path.exists():
        raise IngestError(f"benchmark file not found: {path}")
    if not isinstance(id_map, dict):
        id_map = {label: k for k, label in enumerate(id_map)}
    # labels may be stored as ints (identity index) or strings
    lookup = {str(k): v for k, v in id_map.items()}

    found, unknown = set(), []
    for line in path.read_text(encoding="utf-8").splitlines():
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if line in lookup:
            found.add(lookup[line])
        else:
            unknown.append(line)
    if unknown:
        log.warning("%s: %d benchmark ids not in the dataset: %s", path, len(unknown), unknown[:10])
    if not found:
        raise IngestError(f"{path}: no benchmark ids resolve to dataset objects")

    if manifest.declared_counts is not None and manifest.declared_counts[2] is not None:
        dS = manifest.declared_counts[2]
        if dS != len(found):
            raise IngestError(f"{manifest.name}: expected S={dS} but found S={len(found)}")
    return BenchmarkSet(found, skipped=len(unknown))


def load_dataset(manifest: DatasetManifest | str | Path) -> tuple[RatingTable, BenchmarkSet | None]:
    """Ratings plus the benchmark set when the manifest names one."""
    if not isinstance(manifest, DatasetManifest):
        manifest = read_manifest(manifest)
    table = load_ratings(manifest)
    if manifest.benchmark_path is None:
        return table, None
    labels = table.object_labels
    id_map = labels if labels is not None else {str(k): k for k in range(table.num_objects)}
    return table, load_benchmarks(manifest, id_map)


def export_table(table: RatingTable, truth: GroundTruth | None, directory: str | Path) -> DatasetManifest:
    """Write ``ratings.csv`` (and truth files) plus a ``manifest.cfg`` that reloads them.

    Ratings are written with ``repr`` so floats survive the round trip exactly.
    """
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)

    with open(directory / "ratings.csv", "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for u, o, r in zip(table.users.tolist(), table.objects.tolist(), table.ratings.tolist()):
            w.writerow((u, o, repr(r)))

    if truth is not None:
        with open(directory / "truth_objects.csv", "w", encoding="utf-8", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(("object", "Q"))
            w.writerows((k, repr(v)) for k, v in enumerate(np.asarray(truth.Q).tolist()))
        with open(directory / "truth_users.csv", "w", encoding="utf-8", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(("user", "zeta"))
            w.writerows((i, repr(v)) for i, v in enumerate(np.asarray(truth.zeta).tolist()))

    manifest = DatasetManifest(
        name=directory.name,
        ratings_path=Path("ratings.csv"),
        format=Format.CSV,
        rating_scale=table.bounds,
        index="identity",
        num_users=table.num_users,
        num_objects=table.num_objects,
    )
    (directory / "manifest.cfg").write_text(manifest.to_text(), encoding="utf-8")
    manifest.ratings_path = directory / "ratings.csv"
    return manifest


def load_truth(directory: str | Path) -> GroundTruth:
    """Read ``truth_objects.csv`` and ``truth_users.csv`` written by :func:`export_table`."""
    directory = Path(directory)

    def column(name, expected):
        with open(directory / name, encoding="utf-8", newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader)
            if tuple(header) != expected:
                raise IngestError(f"{directory / name}: expected header {','.join(expected)}")
            rows = [(int(a), float(b)) for a, b in reader]
        out = np.empty(len(rows))
        for idx, val in rows:
            out[idx] = val
        return out

    return GroundTruth(Q=column("truth_objects.csv", ("object", "Q")),
                       zeta=column("truth_users.csv", ("user", "zeta")))
