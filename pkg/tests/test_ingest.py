import numpy as np
import pytest
from hypothesis import given, settings, HealthCheck, strategies as st

from reprank.ingest import (DatasetManifest, IngestError, bundled, export_table, load_benchmarks,
                            load_dataset, load_ratings, load_truth, read_manifest)
from reprank.model import build_table
from reprank.synth import GeneratorConfig, generate


def write(path, text):
    path.write_text(text, encoding="utf-8")
    return path


def same_table(a, b):
    return (a.num_users, a.num_objects) == (b.num_users, b.num_objects) and a.triples == b.triples


def test_movielens_three_lines(tmp_path):
    f = write(tmp_path / "r.dat", "10::5::4::1\n10::7::3::2\n22::5::1::3\n")
    t = load_ratings(DatasetManifest("m", f, format="MovieLensDat"))
    assert (t.num_users, t.num_objects, len(t)) == (2, 2, 3)
    assert t.user_labels == ("10", "22") and t.object_labels == ("5", "7")
    assert sorted(t.triples) == [(0, 0, 4.0), (0, 1, 3.0), (1, 0, 1.0)]


def test_numeric_id_order(tmp_path):
    f = write(tmp_path / "r.csv", "user,object,rating\n10,2,1\n9,10,2\n")
    t = load_ratings(DatasetManifest("c", f))
    assert t.user_labels == ("9", "10") and t.object_labels == ("2", "10")


def test_csv_decimal_and_keep_last(tmp_path):
    f = write(tmp_path / "r.csv", "user,object,rating\na,x,2.5\na,x,4.25\nb,y,0\n")
    t = load_ratings(DatasetManifest("c", f))
    assert t.duplicates == 1
    assert sorted(t.triples) == [(0, 0, 4.25), (1, 1, 0.0)]


@pytest.mark.parametrize("body,msg", [
    ("1::2::3\n", ":1:"),
    ("1::2::3::4\n1::3::x::5\n", ":2: non-integer"),
    ("1::2::9::4\n", ":1: rating 9.0 outside"),
])
def test_movielens_errors(tmp_path, body, msg):
    f = write(tmp_path / "r.dat", body)
    with pytest.raises(IngestError, match=msg):
        load_ratings(DatasetManifest("m", f, format="MovieLensDat"))


@pytest.mark.parametrize("body,msg", [
    ("u,o,r\n1,2,3\n", "header"),
    ("user,object,rating\n1,2\n", ":2: expected 3"),
    ("user,object,rating\n1,2,3\n1,3,abc\n", ":3: non-numeric"),
])
def test_csv_errors(tmp_path, body, msg):
    f = write(tmp_path / "r.csv", body)
    with pytest.raises(IngestError, match=msg):
        load_ratings(DatasetManifest("c", f))


def test_missing_file(tmp_path):
    with pytest.raises(IngestError, match="not found"):
        load_ratings(DatasetManifest("c", tmp_path / "nope.csv"))


def test_bundled_fixture_counts():
    table, bench = load_dataset(bundled("mini_movielens.cfg"))
    assert (table.num_users, table.num_objects, len(bench)) == (40, 30, 5)
    assert bench.skipped == 1


def test_declared_counts_reject_truncated_file():
    with pytest.raises(IngestError, match="expected N=6040, M=3900 but found N=40, M=30"):
        load_dataset(bundled("movielens_table1.cfg"))


def test_declared_benchmark_count(tmp_path):
    write(tmp_path / "r.csv", "user,object,rating\n1,a,3\n2,b,4\n")
    write(tmp_path / "b.txt", "a\n")
    write(tmp_path / "m.cfg", "ratings_path = r.csv\nbenchmark_path = b.txt\ndeclared_counts = 2,2,3\n")
    with pytest.raises(IngestError, match="expected S=3 but found S=1"):
        load_dataset(tmp_path / "m.cfg")


def test_benchmarks_known_and_unknown(tmp_path):
    f = write(tmp_path / "r.csv", "user,object,rating\n1,a,3\n1,b,4\n2,c,1\n")
    b = write(tmp_path / "b.txt", "# winners\na\nc  # trailing comment\nzzz\n\n")
    m = DatasetManifest("c", f, benchmark_path=b)
    table = load_ratings(m)
    bench = load_benchmarks(m, table.object_labels)
    assert bench.object_ids == {0, 2} and bench.skipped == 1


def test_benchmarks_empty(tmp_path):
    f = write(tmp_path / "r.csv", "user,object,rating\n1,a,3\n")
    b = write(tmp_path / "b.txt", "# nothing here\n")
    m = DatasetManifest("c", f, benchmark_path=b)
    with pytest.raises(IngestError, match="no benchmark ids"):
        load_benchmarks(m, load_ratings(m).object_labels)


def test_manifest_parsing(tmp_path):
    p = write(tmp_path / "m.cfg", "# comment\nname = demo\nratings_path = data/r.dat\n"
                                  "format = MovieLensDat\nrating_scale = 1,5\ndeclared_counts = 6040,3900,74\n")
    m = read_manifest(p)
    assert m.name == "demo" and m.ratings_path == tmp_path / "data" / "r.dat"
    assert m.rating_scale == (1.0, 5.0) and m.declared_counts == (6040, 3900, 74)


@pytest.mark.parametrize("body", ["ratings_path = r\nbogus = 1\n", "name = x\n", "just text\n",
                                  "ratings_path = r\nformat = Parquet\n"])
def test_bad_manifest(tmp_path, body):
    with pytest.raises(IngestError):
        read_manifest(write(tmp_path / "m.cfg", body))


def test_export_roundtrip_synthetic(tmp_path):
    table, truth = generate(GeneratorConfig(N=60, M=40, rho=0.1, seed=3))
    m = export_table(table, truth, tmp_path / "out")
    back = load_ratings(read_manifest(tmp_path / "out" / "manifest.cfg"))
    assert same_table(table, back)
    assert np.array_equal(table.ratings, back.ratings)
    t2 = load_truth(tmp_path / "out")
    assert np.array_equal(t2.Q, truth.Q) and np.array_equal(t2.zeta, truth.zeta)
    lines = (tmp_path / "out" / "truth_objects.csv").read_text().splitlines()
    assert len(lines) == 1 + 40
    assert len((tmp_path / "out" / "truth_users.csv").read_text().splitlines()) == 1 + 60
    assert same_table(load_ratings(m), table)


def test_export_empty(tmp_path):
    export_table(build_table([], 2, 3), None, tmp_path)
    assert (tmp_path / "ratings.csv").read_text() == "user,object,rating\n"
    assert not (tmp_path / "truth_users.csv").exists()
    back = load_ratings(read_manifest(tmp_path / "manifest.cfg"))
    assert (back.num_users, back.num_objects, len(back)) == (2, 3, 0)


@given(st.lists(st.tuples(st.integers(0, 6), st.integers(0, 4), st.floats(0, 5, allow_nan=False)), max_size=30))
@settings(max_examples=30, suppress_health_check=[HealthCheck.function_scoped_fixture])
def test_roundtrip_property(tmp_path, rows):
    t = build_table(rows, 7, 5)
    export_table(t, None, tmp_path)
    back = load_ratings(read_manifest(tmp_path / "manifest.cfg"))
    assert same_table(t, back)


def test_reindex_bijection(tmp_path):
    f = write(tmp_path / "r.dat", "".join(f"{u}::{m}::3::0\n" for u, m in [(5, 9), (3, 9), (5, 1), (100, 2)]))
    t = load_ratings(DatasetManifest("m", f, format="MovieLensDat"))
    assert len(set(t.user_labels)) == t.num_users == 3
    assert len(set(t.object_labels)) == t.num_objects == 3
    ext = {(t.user_labels[u], t.object_labels[o]) for u, o, _ in t.triples}
    assert ext == {("5", "9"), ("3", "9"), ("5", "1"), ("100", "2")}
