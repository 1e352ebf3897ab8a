import json
import os

import numpy as np
import pytest

from eulerist import rips
from eulerist.cli import RunConfig, build_parser, main
from eulerist.io import read_filtration, read_point_cloud, write_filtration, write_point_cloud


@pytest.fixture
def workdir(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    return tmp_path


def run(*argv):
    return main([str(a) for a in argv])


def test_sample_requires_seed(workdir):
    assert run("sample", "torus", "-o", "t.csv") == 2
    assert run("sample", "torus", "--n", 50, "--seed", 1, "-o", "t.csv") == 0
    assert read_point_cloud("t.csv").shape == (50, 3)
    doc = json.loads((workdir / "run.json").read_text())
    assert doc["config"]["command"] == "sample" and doc["version"]


@pytest.mark.parametrize("gen", ["orbit", "poisson", "sphere", "clutter"])
def test_sample_generators(workdir, gen):
    assert run("sample", gen, "--seed", 3, "--n", 20, "-o", "s.csv") == 0


def test_build_variants(workdir):
    write_point_cloud(np.random.default_rng(0).uniform(size=(20, 2)), "pts.csv")
    assert run("build", "pts.csv", "--type", "points", "--builder", "rips", "--max-dim", 2, "--max-scale", 1.0,
               "-o", "r.filt") == 0
    assert read_filtration("r.filt").m == 1
    assert run("build", "pts.csv", "--builder", "cech", "--codensity", "--bandwidth", 0.1, "--post", "gauss",
               "-o", "c.filt") == 0
    assert read_filtration("c.filt").m == 2
    (workdir / "g.edges").write_text("0 1\n1 2\n")
    assert run("build", "g.edges", "--type", "graph", "--vf", "hks:1.0", "--ef", "forman", "-o", "g.filt") == 0
    assert read_filtration("g.filt").m == 2


def test_build_error_codes(workdir):
    (workdir / "bad.csv").write_text("0,1\n0,oops\n")
    assert run("build", "bad.csv", "--max-scale", 1, "-o", "x.filt") == 2
    (workdir / "bad.filt").write_text("# m=1\n0 1 ; 1\n")
    assert run("build", "bad.filt", "--type", "filtration", "-o", "x.filt") == 3
    assert run("build", "missing.csv", "-o", "x.filt") == 2


def test_ecp_and_ht(workdir):
    write_filtration(rips(np.random.default_rng(1).uniform(size=(15, 2)), 1, 0.5), "f.filt")
    assert run("ecp", "f.filt", "--quantiles", "0.1,0.9", "--resolution", 30, "-o", "ecc") == 0
    assert len((workdir / "ecc.csv").read_text().split()) == 30
    assert run("ecp", "f.filt", "-o", "x") == 2
    assert run("ht", "f.filt", "--kernel", "exp_pow:4", "--quantile", 0.5, "--alpha", 10, "--resolution", 30,
               "-o", "ht") == 0
    meta = json.loads((workdir / "ht.json").read_text())
    assert meta["kind"] == "ht" and meta["p"] == 4.0 and meta["alpha"] == 10.0
    assert run("ht", "f.filt", "--kernel", "cosine", "--xi-bounds", "0,20", "--resolution", 100, "-o", "c") == 0
    assert run("ht", "f.filt", "--kernel", "nope", "--xi-bounds", "0,1", "-o", "c") == 2


def test_ecp_two_parameter_bounds(workdir):
    assert run("sample", "clutter", "--seed", 1, "--n-noise", 30, "--n-line", 5, "-o", "p.csv") == 0
    assert run("build", "p.csv", "--builder", "cech", "--codensity", "--max-scale", 0.2, "-o", "b.filt") == 0
    assert run("ecp", "b.filt", "--bounds", "0,1x-1,0", "--resolution", "30x30", "-o", "ecs") == 0
    assert len((workdir / "ecs.csv").read_text().split()) == 900


def test_ht_numeric_failure(workdir):
    (workdir / "neg.filt").write_text("# m=1\n0 ; -1\n")
    assert run("ht", "neg.filt", "--xi-bounds", "0,1", "-o", "x") == 4


def test_distance_metrics(workdir, capsys):
    rng = np.random.default_rng(2)
    write_filtration(rips(rng.uniform(size=(6, 2)), 1, 10.0), "a.filt")
    write_filtration(rips(rng.uniform(size=(6, 2)), 1, 10.0), "b.filt")
    for metric in ("signed-w1", "l1-window:2", "w1-diagram"):
        assert run("distance", "a.filt", "b.filt", "--metric", metric) == 0
        assert float(capsys.readouterr().out) >= 0
    assert run("distance", "a.filt", "b.filt", "--metric", "l1-window:x") == 2


def make_dataset(root, k=3):
    rng = np.random.default_rng(5)
    for label in ("a", "b"):
        (root / label).mkdir(parents=True)
        for i in range(k):
            write_point_cloud(rng.uniform(size=(25, 2)), root / label / f"c{i}.csv")


def test_featurize_labels_and_order(workdir):
    make_dataset(workdir / "ds")
    assert run("featurize", "ds", "--max-scale", 0.2, "--quantiles", "0,1", "--resolution", 5, "-o", "f.csv") == 0
    rows = (workdir / "f.csv").read_text().splitlines()
    assert rows[0] == "name,label,f0,f1,f2,f3,f4"
    assert [r.split(",")[0] for r in rows[1:]] == ["a/c0.csv", "a/c1.csv", "a/c2.csv", "b/c0.csv", "b/c1.csv", "b/c2.csv"]
    assert [r.split(",")[1] for r in rows[1:]] == ["a"] * 3 + ["b"] * 3
    (workdir / "ds" / "labels.csv").write_text("name,label\n" + "".join(
        f"{s}/c{i}.csv,{s.upper()}{i}\n" for s in "ab" for i in range(3)))
    assert run("featurize", "ds", "--max-scale", 0.2, "--quantiles", "0,1", "--resolution", 5, "-o", "g.csv") == 0
    assert (workdir / "g.csv").read_text().splitlines()[1].split(",")[1] == "A0"


def test_featurize_threads_and_env(workdir, monkeypatch):
    make_dataset(workdir / "ds")
    args = ["featurize", "ds", "--descriptor", "ht", "--kernel", "exp_pow:4", "--quantile", 0.5, "--alpha", 5,
            "--max-scale", 0.2, "--resolution", 6]
    assert run(*args, "-o", "one.csv") == 0
    assert run(*args, "--threads", 3, "-o", "three.csv") == 0
    monkeypatch.setenv("EULERIST_THREADS", "2")
    assert run(*args, "-o", "env.csv") == 0
    one = (workdir / "one.csv").read_bytes()
    assert one == (workdir / "three.csv").read_bytes() == (workdir / "env.csv").read_bytes()


def test_run_config_roundtrip(workdir):
    parser = build_parser()
    argv = ["featurize", "ds", "--vf", "hks:1.0", "--vf", "closeness", "--codensity", "--max-scale", "0.1",
            "--quantiles", "0.1,0.9", "--resolution", "30x30", "--threads", "8", "-o", "out.csv"]
    cfg = RunConfig.from_namespace(parser.parse_args(argv))
    again = RunConfig.from_namespace(parser.parse_args(cfg.to_argv()))
    assert again == cfg
    doc = json.loads(json.dumps(cfg.to_json()))
    assert RunConfig.from_json(doc) == cfg


def test_run_replays_config(workdir):
    assert run("sample", "sphere", "--n", 30, "--seed", 9, "-o", "s.csv") == 0
    first = (workdir / "s.csv").read_bytes()
    os.rename("run.json", "saved.json")
    os.remove("s.csv")
    assert run("run", "saved.json") == 0
    assert (workdir / "s.csv").read_bytes() == first
