import functools
import json
import math
import os
import subprocess
import sys

import numpy as np
import pytest

import diffgeo
from diffgeo import cli
from diffgeo import comparison, curve_global, curves, geodesics, numeric, reconstruction, surfaces, transport

def _bent_quadrilaterals(beta):
    """Straight x'y'z' with apex p', and the same side lengths bent by beta at y."""
    x2, y2, z2, p2 = np.array([0.0, 0.0]), np.array([1.0, 0.0]), np.array([2.0, 0.0]), np.array([0.7, 1.2])
    a, b = np.linalg.norm(p2 - x2), np.linalg.norm(p2 - z2)
    x, y = np.array([0.0, 0.0]), np.array([1.0, 0.0])
    z = y + np.array([math.cos(beta), math.sin(beta)])
    d = np.linalg.norm(z - x)
    ex = (z - x) / d
    along = (a * a - b * b + d * d) / (2 * d)
    p = x + along * ex + math.sqrt(a * a - along * along) * np.array([-ex[1], ex[0]])
    names = ("p", "x", "y", "z", "p2", "x2", "y2", "z2")
    return {k: [float(c) for c in v] for k, v in zip(names, (p, x, y, z, p2, x2, y2, z2))}


DEFS = {
    "helix": {"kind": "helix", "a": 1, "b": 1},
    "ellipse": {"kind": "ellipse", "a": 2, "b": 1},
    "limacon": {"kind": "limacon", "a": 1, "b": 0.5},
    "samples": {"kind": "samples", "rows": [[t, math.cos(t), math.sin(t)] for t in np.linspace(0, 1.5, 12)]},
    "polyline": {"kind": "polyline", "points": [[0, 0], [1, 0], [1, 1], [0, 1]], "closed": True},
    "plane_recon": {"length": 3.0, "skappa": "1 + s"},
    "space_recon": {"length": 2.0, "kappa": 0.5, "tau": 0.5},
    "align": {"a": [[0, 0], [1, 0], [0, 2], [3, 1]], "b": [[1, 1], [1, 2], [-1, 1], [0, 4]]},
    "sphere": {"kind": "sphere"},
    "torus": {"kind": "torus", "R": 2, "r": 1},
    "revolution": {"kind": "revolution", "x": "s", "y": "2 + cos(s)", "domain": [-2, 2]},
    "loop": {
        "surface": {"kind": "sphere"},
        "loop": {"uv": ["0.5*cos(t)", "0.5*sin(t)"], "chart": 0},
    },
    "general": {
        "surface": {"kind": "torus", "R": 2, "r": 1},
        "boundaries": [],
    },
    "cmp_sphere": {"surface": {"kind": "sphere"}, "tilde": {"circle": 0.4}},
    "model": {"sides": [3, 4, 5]},
    "triangle": {"surface": {"kind": "sphere"}, "triangle": [[0.1, 1.2], [0.5, 1.4], [0.2, 1.7]]},
    "record": {"surface": {"kind": "saddle"}, "triangles": [[[0, 0], [0.4, 0.1], [0.1, 0.5]]]},
    "alexandrov": {"points": _bent_quadrilaterals(0.3)},
    "busemann": {"surface": {"kind": "plane"}, "ray": {"at": [0, 0], "dir": [1, 0]}, "x": [0.3, 0.4], "T": 4.0},
}


@pytest.fixture
def defs(tmp_path):
    out = {}
    for name, d in DEFS.items():
        p = tmp_path / f"{name}.json"
        p.write_text(json.dumps(d))
        out[name] = str(p)
    return out


def run(argv, tmp_path):
    """Run the CLI in-process; returns (exit status, parsed JSON report or None)."""
    out = tmp_path / "report.json"
    if out.exists():
        out.unlink()
    status = cli.main(list(argv) + ["--out", str(out)])
    return status, (json.loads(out.read_text()) if out.exists() else None)


# --- documented examples ---------------------------------------------------


def test_helix_frenet_example(defs, tmp_path):
    status, rep = run(["curve", "--def", defs["helix"], "--op", "frenet", "--t", "0.7"], tmp_path)
    assert status == 0
    assert rep["value"]["kappa"] == pytest.approx(0.5, abs=1e-10)
    assert rep["value"]["tau"] == pytest.approx(0.5, abs=1e-10)
    assert {"value", "method", "tolerance_estimate", "inputs_digest"} <= set(rep)


def test_torus_integral_gauss_example(defs, tmp_path):
    status, rep = run(["surface", "--def", defs["torus"], "--op", "integral-gauss"], tmp_path)
    assert status == 0
    assert abs(rep["value"]) < 1e-8


def test_verify_example_exits_zero(tmp_path, capsys):
    status, rep = run(["verify", "--suite", "fenchel", "--n", "20"], tmp_path)
    assert status == 0 and rep["passed"]
    assert "[PASS] fenchel" in capsys.readouterr().err


# --- exit codes ------------------------------------------------------------


def test_input_errors_exit_3(defs, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"kind": "spiral"}')
    assert run(["curve", "--def", str(bad), "--op", "length"], tmp_path)[0] == 3
    bad.write_text("{oops")
    assert run(["curve", "--def", str(bad), "--op", "length"], tmp_path)[0] == 3
    assert run(["curve", "--def", defs["helix"], "--op", "length", "--bogus"], tmp_path)[0] == 3
    assert run(["curve", "--def", defs["helix"], "--op", "nope"], tmp_path)[0] == 3
    assert run(["surface", "--def", defs["sphere"], "--op", "frame"], tmp_path)[0] == 3
    assert run(["verify", "--suite", "nope"], tmp_path)[0] == 3
    assert run(["curve", "--def", defs["helix"], "--op", "length", "--csv", str(tmp_path / "x.csv")], tmp_path)[0] == 3


def test_numerical_failure_exits_2(defs, tmp_path):
    # antipodal target beyond r_max: the log map cannot converge
    status, rep = run(
        ["geodesic", "--def", defs["sphere"], "--op", "log", "--at", "0.3,1.0", "--to", "3.4,2.1", "--r-max", "0.5"],
        tmp_path,
    )
    assert status == 2 and rep is None


# --- outputs ----------------------------------------------------------------


def test_repeated_runs_are_byte_identical(defs, tmp_path):
    argv = ["geodesic", "--def", defs["torus"], "--op", "shoot", "--at", "0.2,0.4", "--dir", "1,0.5", "--T", "2"]
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert cli.main(argv + ["--out", str(a)]) == 0
    assert cli.main(argv + ["--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_digest_ignores_output_paths(defs, tmp_path):
    argv = ["curve", "--def", defs["ellipse"], "--op", "length"]
    _, r1 = run(argv, tmp_path)
    _, r2 = run(argv + ["--seed", "0"], tmp_path)
    assert r1["inputs_digest"] == r2["inputs_digest"]
    _, r3 = run(argv + ["--tol", "1e-8"], tmp_path)
    assert r3["inputs_digest"] != r1["inputs_digest"]


def test_geodesic_csv_columns(defs, tmp_path):
    trace = tmp_path / "g.csv"
    status, rep = run(
        ["geodesic", "--def", defs["sphere"], "--op", "shoot", "--at", "0.3,1.0", "--dir", "1,0", "--T", "1.5", "--csv", str(trace)],
        tmp_path,
    )
    assert status == 0
    lines = trace.read_text().splitlines()
    assert lines[0] == "t,u,v,x,y,z"
    rows = np.array([[float(x) for x in ln.split(",")] for ln in lines[1:]])
    assert np.allclose(np.linalg.norm(rows[:, 3:], axis=1), 1.0, atol=1e-8)
    assert rows[-1, 0] == pytest.approx(1.5)


def test_samples_definition_round_trips(defs, tmp_path):
    status, rep = run(["curve", "--def", defs["samples"], "--op", "length"], tmp_path)
    assert status == 0
    assert rep["value"] == pytest.approx(1.5, rel=1e-4)


def test_curve_samples_csv(defs, tmp_path):
    trace = tmp_path / "c.csv"
    assert run(["curve", "--def", defs["helix"], "--op", "samples", "--n", "11", "--csv", str(trace)], tmp_path)[0] == 0
    lines = trace.read_text().splitlines()
    assert lines[0] == "t,x,y,z" and len(lines) == 12


def test_alexandrov_signs_report(defs, tmp_path):
    status, rep = run(["compare", "--def", defs["alexandrov"], "--op", "alexandrov"], tmp_path)
    assert status == 0 and rep["value"] == [1, 1, 1]


def test_stdout_report(defs, capsys):
    assert cli.main(["curve", "--def", defs["ellipse"], "--op", "is-convex"]) == 0
    rep = json.loads(capsys.readouterr().out)
    assert rep["value"] is True and rep["op"] == "is-convex"


def test_thread_setting_applies_before_numpy():
    code = "import diffgeo.cli, os; print(os.environ['OPENBLAS_NUM_THREADS'])"
    env = dict(os.environ, DIFFGEO_THREADS="1")
    env.pop("OPENBLAS_NUM_THREADS", None)
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "1"


# --- dispatch coverage ------------------------------------------------------

# every library operation with at least one invocation that must reach it
COVERAGE = [
    (numeric, "derivative", ["curve", "--def", "{limacon}", "--op", "signed-curvature", "--t", "0.5"]),
    (numeric, "integrate", ["curve", "--def", "{helix}", "--op", "length"]),
    (numeric, "ode_solve", ["reconstruct", "--def", "{plane_recon}"]),
    (numeric, "eig_sym2", ["surface", "--def", "{torus}", "--op", "curvatures", "--at", "0.3,0.4"]),
    (curves, "curve_length", ["curve", "--def", "{helix}", "--op", "length"]),
    (curves, "to_arclength", ["curve", "--def", "{ellipse}", "--op", "arclength", "--t", "1.0"]),
    (curves, "frenet", ["curve", "--def", "{helix}", "--op", "frenet"]),
    (curves, "signed_curvature", ["curve", "--def", "{ellipse}", "--op", "signed-curvature", "--t", "0.3"]),
    (curves, "osculating_circle", ["curve", "--def", "{ellipse}", "--op", "osculating-circle", "--t", "0.3"]),
    (curves, "evolute", ["curve", "--def", "{ellipse}", "--op", "evolute"]),
    (curves, "vertices", ["curve", "--def", "{ellipse}", "--op", "vertices"]),
    (curve_global, "total_curvature", ["curve", "--def", "{helix}", "--op", "total-curvature"]),
    (curve_global, "polyline_total_curvature", ["curve", "--def", "{polyline}", "--op", "polyline-total-curvature"]),
    (curve_global, "total_signed_curvature", ["curve", "--def", "{limacon}", "--op", "total-signed-curvature"]),
    (curve_global, "crofton_length_plane", ["crofton", "--def", "{ellipse}", "--n", "256"]),
    (curve_global, "crofton_length_space", ["crofton", "--def", "{helix}", "--op", "plane", "--n", "256"]),
    (curve_global, "max_inscribed_disc", ["curve", "--def", "{ellipse}", "--op", "max-inscribed-disc", "--grid", "32"]),
    (curve_global, "is_convex", ["curve", "--def", "{limacon}", "--op", "is-convex"]),
    (reconstruction, "reconstruct_plane", ["reconstruct", "--def", "{plane_recon}"]),
    (reconstruction, "reconstruct_space", ["reconstruct", "--def", "{space_recon}"]),
    (reconstruction, "rigid_align", ["reconstruct", "--def", "{align}", "--op", "align"]),
    (surfaces, "frame", ["surface", "--def", "{sphere}", "--op", "frame", "--at", "0.3,1.0"]),
    (surfaces, "shape_operator", ["surface", "--def", "{torus}", "--op", "shape-operator", "--at", "0.3,0.4"]),
    (surfaces, "curvatures", ["surface", "--def", "{torus}", "--op", "curvatures", "--at", "0.3,0.4"]),
    (surfaces, "normal_curvature", ["surface", "--def", "{torus}", "--op", "normal-curvature", "--at", "0.3,0.4", "--dir", "1,1"]),
    (surfaces, "surface_integral", ["surface", "--def", "{sphere}", "--op", "integral", "--expr", "z^2"]),
    (surfaces, "integral_gauss", ["surface", "--def", "{torus}", "--op", "integral-gauss"]),
    (surfaces, "revolution_curvatures", ["surface", "--def", "{revolution}", "--op", "revolution-curvatures", "--t", "0.5"]),
    (geodesics, "geodesic_shoot", ["geodesic", "--def", "{torus}", "--at", "0.2,0.4", "--dir", "1,0.5"]),
    (geodesics, "exp_map", ["geodesic", "--def", "{sphere}", "--op", "exp", "--at", "0.3,1.0", "--dir", "0.5,0.5"]),
    (geodesics, "log_map", ["geodesic", "--def", "{sphere}", "--op", "log", "--at", "0.3,1.0", "--to", "0.6,1.2"]),
    (geodesics, "clairaut_invariant", ["geodesic", "--def", "{torus}", "--op", "clairaut", "--at", "0.2,0.4", "--dir", "1,0.5"]),
    (geodesics, "mesh_shortest_path", ["geodesic", "--def", "{sphere}", "--op", "mesh", "--at", "0.3,1.0", "--to", "0.9,1.4", "--grid", "24"]),
    (transport, "parallel_transport", ["transport", "--def", "{loop}", "--op", "transport", "--dir", "1,0"]),
    (transport, "holonomy", ["transport", "--def", "{loop}"]),
    (transport, "geodesic_curvature", ["transport", "--def", "{loop}", "--op", "geodesic-curvature", "--t", "1.0"]),
    (transport, "total_geodesic_curvature", ["transport", "--def", "{loop}", "--op", "total-geodesic-curvature"]),
    (transport, "gb_residual", ["gauss-bonnet", "--def", "{loop}"]),
    (transport, "gb_general", ["gauss-bonnet", "--def", "{general}", "--op", "general"]),
    (comparison, "polar_chart", ["compare", "--def", "{cmp_sphere}", "--op", "polar-chart", "--at", "0.3,1.0", "--n", "20", "--grid", "16", "--r-max", "0.5"]),
    (comparison, "jacobi_residual", ["compare", "--def", "{cmp_sphere}", "--op", "jacobi", "--at", "0.3,1.0", "--n", "20", "--grid", "16", "--r-max", "0.5"]),
    (comparison, "rauch_compare", ["compare", "--def", "{cmp_sphere}", "--op", "rauch", "--at", "0.3,1.0", "--n", "32"]),
    (comparison, "model_triangle", ["compare", "--def", "{model}", "--op", "model-triangle"]),
    (comparison, "hinge_compare", ["compare", "--def", "{triangle}", "--op", "hinge"]),
    (comparison, "triangle_fatness", ["compare", "--def", "{triangle}", "--op", "fatness", "--n", "2", "--grid", "24"]),
    (comparison, "alexandrov_signs", ["compare", "--def", "{alexandrov}", "--op", "alexandrov"]),
    (comparison, "busemann", ["compare", "--def", "{busemann}", "--op", "busemann"]),
]


def _spy(monkeypatch, module, name):
    original = getattr(module, name)
    calls = []

    @functools.wraps(original)
    def wrapper(*a, **k):
        calls.append(1)
        return original(*a, **k)

    for mod in list(sys.modules.values()):
        if mod is not None and getattr(mod, "__name__", "").startswith("diffgeo"):
            if getattr(mod, name, None) is original:
                monkeypatch.setattr(mod, name, wrapper)
    return calls


@pytest.mark.filterwarnings("ignore::diffgeo.errors.GridTooCoarse")
@pytest.mark.parametrize("module,name,argv", COVERAGE, ids=[f"{m.__name__.split('.')[-1]}.{n}" for m, n, _ in COVERAGE])
def test_operation_reachable_from_cli(module, name, argv, defs, tmp_path, monkeypatch):
    calls = _spy(monkeypatch, module, name)
    status, _ = run([a.format(**defs) for a in argv], tmp_path)
    assert status == 0
    assert calls, f"{module.__name__}.{name} was not reached"


def test_dispatch_table_is_exercised():
    # every (command, op) pair has a handler and every command has an op
    for (cmd, op), fn in cli.DISPATCH.items():
        assert cmd in cli.SUBCOMMANDS and callable(fn)
    assert {cmd for cmd, _ in cli.DISPATCH} == set(cli.SUBCOMMANDS)
