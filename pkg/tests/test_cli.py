import json

import numpy as np
import pytest

from riembreg.cli import main
from riembreg.dataset import PointSet


def write_sites(path, coords):
    PointSet(points=np.asarray(coords, dtype=float)).to_csv(path)


def run(argv):
    return main([str(a) for a in argv])


def test_gen_data_defaults(tmp_path, capsys):
    out = tmp_path / "data.csv"
    assert run(["gen-data", "--out", out]) == 0
    lines = out.read_text().strip().splitlines()
    assert lines[0] == "x1,x2,label"
    assert len(lines) == 751


def test_gen_data_reproducible(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert run(["gen-data", "--seed", 7, "--out", a]) == 0
    assert run(["gen-data", "--seed", 7, "--out", b]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_gen_data_malformed_spec(tmp_path, capsys):
    spec = tmp_path / "spec.json"
    spec.write_text(json.dumps({"clusters": [{"mean": [1, 1], "count": 10}]}))
    code = run(["gen-data", "--spec", spec, "--out", tmp_path / "x.csv"])
    captured = capsys.readouterr()
    assert code == 3
    assert "sigma" in captured.err


def test_gen_data_custom_spec(tmp_path):
    spec = tmp_path / "spec.json"
    spec.write_text(json.dumps({
        "seed": 3,
        "clusters": [
            {"mean": [2, 2], "sigma": [0.2, 0.2], "count": 30},
            {"mean": [6, 6], "sigma": [0.2, 0.2], "count": 20},
        ],
    }))
    out = tmp_path / "d.csv"
    assert run(["gen-data", "--spec", spec, "--out", out]) == 0
    assert len(out.read_text().strip().splitlines()) == 51


def test_cluster_command(tmp_path):
    data = tmp_path / "data.csv"
    assert run(["gen-data", "--seed", 1, "--out", data]) == 0
    out = tmp_path / "result"
    assert run(["cluster", "--in", data, "--method", "kmeans", "--metric", "burg",
                "--k", 4, "--seed", 0, "--out", out]) == 0
    payload = json.loads((tmp_path / "result.json").read_text())
    assert payload["method"] == "kmeans"
    assert len(payload["centers"]) == 4
    assert "evaluation" in payload  # input had labels
    csv_lines = (tmp_path / "result.csv").read_text().strip().splitlines()
    assert csv_lines[0] == "x1,x2,assignment,label"
    assert len(csv_lines) == 751
    assert (tmp_path / "result.png").exists()


def test_cluster_domain_error_names_row(tmp_path, capsys):
    bad = tmp_path / "bad.csv"
    bad.write_text("x1,x2\n1.0,2.0\n-0.5,3.0\n")
    code = run(["cluster", "--in", bad, "--method", "kmeans", "--metric", "shannon",
                "--k", 1, "--out", tmp_path / "r"])
    captured = capsys.readouterr()
    assert code == 3
    assert "row 2" in captured.err


def test_cluster_linkage_flag_validation(tmp_path):
    data = tmp_path / "d.csv"
    write_sites(data, [[1.0, 1.0], [2.0, 2.0], [3.0, 3.0]])
    with pytest.raises(SystemExit) as exc:
        run(["cluster", "--in", data, "--method", "em", "--metric", "burg",
             "--k", 2, "--linkage", "single", "--out", tmp_path / "r"])
    assert exc.value.code == 2
    assert run(["cluster", "--in", data, "--method", "hac", "--metric", "burg",
                "--k", 2, "--linkage", "single", "--out", tmp_path / "r"]) == 0


def test_voronoi_pgm_euclidean_flavors_identical(tmp_path):
    sites = tmp_path / "sites.csv"
    write_sites(sites, [[1.0, 1.0], [3.0, 2.0], [2.0, 3.5]])
    a, b = tmp_path / "a.pgm", tmp_path / "b.pgm"
    common = ["voronoi", "--sites-file", sites, "--metric", "euclidean",
              "--bbox", "0,4,0,4", "--size", "64x64"]
    assert run(common + ["--flavor", "riemann", "--out", a]) == 0
    assert run(common + ["--flavor", "left", "--out", b]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_voronoi_single_site_uniform(tmp_path):
    sites = tmp_path / "sites.csv"
    write_sites(sites, [[2.0, 2.0]])
    out = tmp_path / "v.pgm"
    assert run(["voronoi", "--sites-file", sites, "--metric", "shannon",
                "--out", out, "--size", "16x16"]) == 0
    pixels = out.read_bytes().split(b"\n", 3)[3]
    assert set(pixels) == {0}


def test_voronoi_site_outside_bbox(tmp_path):
    sites = tmp_path / "sites.csv"
    write_sites(sites, [[1.0, 1.0], [50.0, 50.0]])
    out = tmp_path / "v.pgm"
    assert run(["voronoi", "--sites-file", sites, "--metric", "shannon",
                "--bbox", "0.5,2,0.5,2", "--size", "8x8", "--out", out]) == 0


def test_voronoi_svg_and_exact_and_png(tmp_path):
    sites = tmp_path / "sites.csv"
    write_sites(sites, [[1.0, 1.0], [3.0, 3.0]])
    svg = tmp_path / "v.svg"
    assert run(["voronoi", "--sites-file", sites, "--metric", "burg",
                "--bbox", "0.5,4,0.5,4", "--size", "12x12", "--out", svg]) == 0
    assert "<svg" in svg.read_text()
    exact = tmp_path / "cells.svg"
    assert run(["voronoi", "--sites-file", sites, "--metric", "burg",
                "--bbox", "0.5,4,0.5,4", "--exact", "--out", exact]) == 0
    assert "<polyline" in exact.read_text()
    png = tmp_path / "v.png"
    assert run(["voronoi", "--sites-file", sites, "--metric", "burg",
                "--bbox", "0.5,4,0.5,4", "--size", "12x12", "--out", png]) == 0
    assert png.stat().st_size > 0


def test_voronoi_exact_default_bbox_positive_domain(tmp_path):
    # default bbox is nudged strictly inside (0, inf) for the exact-cell path
    sites = tmp_path / "sites.csv"
    write_sites(sites, [[0.3, 0.3], [3.0, 3.0]])
    out = tmp_path / "cells.svg"
    assert run(["voronoi", "--sites-file", sites, "--metric", "shannon",
                "--exact", "--out", out]) == 0
    assert "<polyline" in out.read_text()


def test_quantize_command(tmp_path):
    data = tmp_path / "d.csv"
    write_sites(data, [[1.0, 1.0], [2.0, 2.0], [8.0, 8.0], [9.0, 9.0]])
    out = tmp_path / "q.json"
    assert run(["quantize", "--in", data, "--metric", "burg", "--rate", 4,
                "--seed", 0, "--out", out]) == 0
    payload = json.loads(out.read_text())
    assert payload["distortion"] == 0.0
    trace = payload["distortion_trace"]
    assert all(a >= b - 1e-12 for a, b in zip(trace, trace[1:]))


def test_quantize_rate_zero_is_usage_error(tmp_path):
    data = tmp_path / "d.csv"
    write_sites(data, [[1.0, 1.0], [2.0, 2.0]])
    with pytest.raises(SystemExit) as exc:
        run(["quantize", "--in", data, "--metric", "burg", "--rate", 0,
             "--out", tmp_path / "q.json"])
    assert exc.value.code == 2


def test_experiment_command(tmp_path):
    spec = tmp_path / "spec.json"
    spec.write_text(json.dumps({
        "seed": 0,
        "clusters": [
            {"mean": [2, 2], "sigma": [0.25, 0.25], "count": 30},
            {"mean": [7, 7], "sigma": [0.25, 0.25], "count": 30},
        ],
    }))
    out_dir = tmp_path / "exp"
    assert run(["experiment", "--spec", spec, "--methods", "kmeans,hac",
                "--metrics", "euclidean,burg", "--k", 2, "--seeds", "0,1",
                "--out-dir", out_dir]) == 0
    report = (out_dir / "report.csv").read_text().strip().splitlines()
    assert len(report) == 1 + 2 * 2 * 2
    assert report[0].startswith("method,metric,seed,k,accuracy,ari,nmi,size_1,size_2")
    assert (out_dir / "summary.txt").exists()
    assert (out_dir / "dataset.csv").exists()
    runs = sorted(p.name for p in (out_dir / "runs").glob("*.json"))
    assert len(runs) == 8
    figures = sorted(p.name for p in (out_dir / "figures").glob("*.png"))
    assert "dataset.png" in figures
    assert "kmeans_burg.png" in figures


def test_experiment_metrics_all_expansion(tmp_path):
    spec = tmp_path / "spec.json"
    spec.write_text(json.dumps({
        "seed": 0,
        "clusters": [
            {"mean": [2, 2], "sigma": [0.2, 0.2], "count": 16},
            {"mean": [6, 6], "sigma": [0.2, 0.2], "count": 16},
        ],
    }))
    out_dir = tmp_path / "exp"
    assert run(["experiment", "--spec", spec, "--methods", "kmeans",
                "--metrics", "all", "--k", 2, "--seeds", "0",
                "--no-figures", "--out-dir", out_dir]) == 0
    rows = (out_dir / "report.csv").read_text().strip().splitlines()[1:]
    metrics = {r.split(",")[1] for r in rows}
    assert metrics == {"euclidean", "exp", "negexp", "shannon", "burg"}


def test_experiment_rerun_identical(tmp_path):
    spec = tmp_path / "spec.json"
    spec.write_text(json.dumps({
        "seed": 2,
        "clusters": [
            {"mean": [2, 2], "sigma": [0.2, 0.2], "count": 20},
            {"mean": [6, 6], "sigma": [0.2, 0.2], "count": 20},
        ],
    }))
    d1, d2 = tmp_path / "e1", tmp_path / "e2"
    for d in (d1, d2):
        assert run(["experiment", "--spec", spec, "--methods", "kmeans",
                    "--metrics", "burg", "--k", 2, "--seeds", "0,1",
                    "--no-figures", "--out-dir", d]) == 0
    assert (d1 / "report.csv").read_bytes() == (d2 / "report.csv").read_bytes()
    assert (d1 / "summary.txt").read_bytes() == (d2 / "summary.txt").read_bytes()


def test_bad_flag_values():
    with pytest.raises(SystemExit) as exc:
        run(["voronoi", "--sites-file", "x.csv", "--metric", "euclidean",
             "--bbox", "0,1,2", "--out", "v.pgm"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        run(["cluster", "--in", "x.csv", "--method", "dbscan", "--metric", "burg",
             "--k", 2, "--out", "r"])
    assert exc.value.code == 2


def test_missing_input_file(tmp_path):
    code = run(["quantize", "--in", tmp_path / "nope.csv", "--metric", "burg",
                "--rate", 1, "--out", tmp_path / "q.json"])
    assert code == 3
