import json
import math
import os

import numpy as np
import pytest

from diffgeo import curves as cv
from diffgeo import io
from diffgeo import surfaces as sf
from diffgeo.errors import InputError


def test_load_json_errors(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(InputError):
        io.load_json(bad)
    arr = tmp_path / "arr.json"
    arr.write_text("[1, 2]")
    with pytest.raises(InputError):
        io.load_json(arr)
    with pytest.raises(InputError):
        io.load_json(tmp_path / "missing.json")


def test_read_csv_rows_with_header(tmp_path):
    f = tmp_path / "pts.csv"
    f.write_text("t,x,y\n0,1,0\n1,0,1\n2,-1,0\n3,0,-1\n")
    rows = io.read_csv_rows(f, 3)
    assert rows.shape == (4, 3)
    f.write_text("t,x,y\n0,1,0\n")
    with pytest.raises(InputError):
        io.read_csv_rows(f, 3)
    f.write_text("0,1,0\n1,a,1\n2,3,4\n5,6,7\n")
    with pytest.raises(InputError):
        io.read_csv_rows(f, 3)


@pytest.mark.parametrize(
    "d",
    [
        {"kind": "helix", "a": 2, "b": 1},
        {"kind": "circle", "r": 2, "center": [1, 1]},
        {"kind": "ellipse", "a": 3, "b": 1},
        {"kind": "graph2d", "expr": "x^2", "domain": [-1, 1]},
        {"kind": "trig_poly", "cos": [[1, 0], [0, 0]], "sin": [[0, 0], [1, 0]]},
        {"kind": "samples", "rows": [[0, 0, 0], [1, 1, 0], [2, 2, 1], [3, 3, 3]]},
        {"kind": "trefoil"},
        {"kind": "figure_eight"},
        {"kind": "trochoid", "a": 0.5},
        {"kind": "limacon", "a": 1, "b": 0.5},
        {"kind": "segment", "p": [0, 0, 0], "q": [1, 1, 1]},
    ],
)
def test_curve_kinds(d):
    c = io.curve_from_def(d)
    assert cv.curve_length(c) > 0


def test_trig_poly_definition_is_a_circle():
    c = io.curve_from_def({"kind": "trig_poly", "cos": [[1], [0]], "sin": [[0], [1]]})
    assert cv.curve_length(c) == pytest.approx(2 * math.pi)


def test_samples_from_csv_relative_to_definition(tmp_path):
    t = np.linspace(0, 1, 10)
    np.savetxt(tmp_path / "s.csv", np.column_stack([t, t, t * t]), delimiter=",", header="t,x,y", comments="")
    c = io.curve_from_def({"kind": "samples", "csv": "s.csv"}, tmp_path)
    assert c.dim == 2


def test_curve_definition_errors():
    with pytest.raises(InputError):
        io.curve_from_def({"kind": "spiral"})
    with pytest.raises(InputError):
        io.curve_from_def({"a": 1})
    with pytest.raises(InputError):
        io.curve_from_def({"kind": "helix", "a": "x"})
    with pytest.raises(InputError):
        io.curve_from_def({"kind": "helix", "a": float("nan")})


@pytest.mark.parametrize(
    "d,K",
    [
        ({"kind": "sphere", "R": 2}, 0.25),
        ({"kind": "torus", "R": 2, "r": 1}, None),
        ({"kind": "graph", "expr": "x^2 - y^2"}, None),
        ({"kind": "revolution", "x": "s", "y": "1", "domain": [-1, 1]}, 0.0),
        ({"kind": "saddle"}, None),
        ({"kind": "chart_expr", "xyz": ["u", "v", "0"], "udomain": [0, 1], "vdomain": [0, 1]}, 0.0),
        ({"kind": "plane"}, 0.0),
        ({"kind": "paraboloid"}, None),
        ({"kind": "cylinder"}, 0.0),
        ({"kind": "catenoid"}, None),
        ({"kind": "pseudosphere"}, -1.0),
        ({"kind": "smooth_cone"}, None),
    ],
)
def test_surface_kinds(d, K):
    s = io.surface_from_def(d)
    ch = s.global_chart
    u = 0.5 * sum(ch.udomain) if ch.udomain[1] - ch.udomain[0] < 100 else 0.3
    v = 0.5 * sum(ch.vdomain) if ch.vdomain[1] - ch.vdomain[0] < 100 else 0.2
    val = sf.gauss_curvature(ch, u, v)
    if K is not None:
        assert val == pytest.approx(K, abs=1e-9)


def test_surface_definition_errors():
    with pytest.raises(InputError):
        io.surface_from_def({"kind": "klein"})
    with pytest.raises(InputError):
        io.surface_from_def({"kind": "chart_expr", "xyz": ["u"], "udomain": [0, 1], "vdomain": [0, 1]})


def test_scalar_function_forms(tmp_path):
    assert io.scalar_function(2)(5.0) == 2.0
    assert io.scalar_function("s^2")(3.0) == pytest.approx(9.0)
    s = np.linspace(0, 1, 11)
    np.savetxt(tmp_path / "k.csv", np.column_stack([s, 1 + s]), delimiter=",")
    f = io.scalar_function({"csv": "k.csv"}, tmp_path)
    assert f(0.55) == pytest.approx(1.55)
    with pytest.raises(InputError):
        io.scalar_function([1, 2])


def test_dumps_and_digest_are_canonical():
    a = {"b": np.float64(1.5), "a": [np.int64(1), np.array([1.0, float("nan")])], "c": np.bool_(True)}
    b = {"c": True, "a": [1, [1.0, None]], "b": 1.5}
    assert io.digest(a) == io.digest(b)
    text = io.dumps(a)
    assert json.loads(text) == {"a": [1, [1.0, None]], "b": 1.5, "c": True}
    assert text.index('"a"') < text.index('"b"')


def test_atomic_writes_leave_no_temporaries(tmp_path):
    out = tmp_path / "sub" / "r.json"
    io.write_json(out, {"x": 1})
    io.write_json(out, {"x": 2})
    assert json.loads(out.read_text()) == {"x": 2}
    io.write_csv(tmp_path / "t.csv", ["t", "x"], [[0, 1.5], [1, 2.5]])
    assert (tmp_path / "t.csv").read_text().splitlines()[0] == "t,x"
    assert sorted(os.listdir(out.parent)) == ["r.json"]
