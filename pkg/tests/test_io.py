import json

import numpy as np
import pytest

from eulerist import GridSpec, MultiFiltration, compute_ecp, rips
from eulerist.io import (
    ParseError,
    read_filtration,
    read_graph,
    read_point_cloud,
    read_profile,
    write_filtration,
    write_point_cloud,
    write_profile,
)


def test_filtration_roundtrip_is_lossless(tmp_path, rng):
    f = rips(rng.uniform(size=(12, 2)), 2, 0.4)
    write_filtration(f, tmp_path / "a.filt")
    g = read_filtration(tmp_path / "a.filt")
    assert g == f and np.array_equal(g.values, f.values)


def test_filtration_format_details(tmp_path):
    p = tmp_path / "x.filt"
    p.write_text("# a comment\n# m=2\n\n1 0 ; 1 2\n0 ; 0 0\n# trailing\n1 ; 0.5 1e-3\n")
    f = read_filtration(p)
    assert f.m == 2 and f.simplices == ((0,), (1,), (0, 1))


@pytest.mark.parametrize("text,line", [
    ("0 ; 0\n", 1),
    ("# m=1\n0 ; 0 1\n", 2),
    ("# m=1\n0 ; 0\n0 x ; 1\n", 3),
    ("# m=1\n0 1 1\n", 2),
])
def test_filtration_parse_errors_carry_line_numbers(tmp_path, text, line):
    p = tmp_path / "bad.filt"
    p.write_text(text)
    with pytest.raises(ParseError) as err:
        read_filtration(p)
    assert err.value.lineno == line


def test_point_cloud_csv(tmp_path):
    p = tmp_path / "p.csv"
    p.write_text("x,y\n0,1\n2.5,3\n")
    assert read_point_cloud(p, skip_header=True).tolist() == [[0, 1], [2.5, 3]]
    with pytest.raises(ParseError) as err:
        read_point_cloud(p)
    assert err.value.lineno == 1
    P = np.random.default_rng(0).normal(size=(5, 3))
    write_point_cloud(P, tmp_path / "q.csv")
    assert np.array_equal(read_point_cloud(tmp_path / "q.csv"), P)


def test_graph_edge_list(tmp_path):
    p = tmp_path / "g.edges"
    p.write_text("# n=5\n0 1\n2 1\n")
    g = read_graph(p)
    assert g.n == 5 and g.edges.tolist() == [[0, 1], [1, 2]]
    p.write_text("0 1\n3 1\n")
    assert read_graph(p).n == 4
    p.write_text("0 1\n1 0\n")
    with pytest.raises(ParseError):
        read_graph(p)
    p.write_text("0 0\n")
    with pytest.raises(ParseError):
        read_graph(p)


def test_profile_files(tmp_path):
    f = MultiFiltration.from_dict({(0,): 0, (1,): 0, (0, 1): 1})
    grid = compute_ecp(f, GridSpec((0,), (1,), (3,)))
    csv_path, json_path = write_profile(grid, tmp_path / "ecc", extra={"quantiles": [[0, 1]]})
    assert csv_path.read_text() == "2\n2\n1\n"
    meta = json.loads(json_path.read_text())
    assert meta == {"m": 1, "shape": [3], "axis_min": [0.0], "axis_max": [1.0], "kind": "ecp", "quantiles": [[0, 1]]}
    back = read_profile(tmp_path / "ecc")
    assert np.array_equal(back.data, grid.data)
