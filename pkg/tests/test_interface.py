import json
from pathlib import Path

import numpy as np
import pytest
from fastapi.testclient import TestClient

from inkwash.cli import main as cli_main
from inkwash.fixtures import make_cube, make_icosphere, write_obj
from inkwash.pipeline import StyleParams
from inkwash.service import create_app


@pytest.fixture(scope="module")
def mesh_dir(tmp_path_factory):
    d = tmp_path_factory.mktemp("meshes")
    write_obj(make_cube(), d / "cube.obj")
    write_obj(make_icosphere(2), d / "ico.obj")
    return d


@pytest.fixture(scope="module")
def client(mesh_dir):
    return TestClient(create_app(mesh_dir))


# --- CLI ----------------------------------------------------------------------

def test_cli_render_ok(mesh_dir, tmp_path):
    out = tmp_path / "cube.png"
    code = cli_main(["render", "--mesh", str(mesh_dir / "cube.obj"),
                     "--out", str(out), "--size", "128x128"])
    assert code == 0
    assert out.exists()
    assert out.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"


def test_cli_render_missing_mesh(tmp_path, capsys):
    code = cli_main(["render", "--mesh", str(tmp_path / "nope.obj"),
                     "--out", str(tmp_path / "x.png")])
    assert code == 3
    assert "not found" in capsys.readouterr().err


def test_cli_render_malformed_params(mesh_dir, tmp_path, capsys):
    bad = tmp_path / "params.json"
    bad.write_text(json.dumps({"w_geom": 0.6, "w_nd": 0.7, "nonsense": 1}))
    code = cli_main(["render", "--mesh", str(mesh_dir / "cube.obj"),
                     "--out", str(tmp_path / "x.png"), "--params", str(bad)])
    assert code == 2
    err = capsys.readouterr().err
    assert "nonsense" in err

    bad.write_text("{not json")
    code = cli_main(["render", "--mesh", str(mesh_dir / "cube.obj"),
                     "--out", str(tmp_path / "x.png"), "--params", str(bad)])
    assert code == 2


def test_cli_render_dump_intermediates(mesh_dir, tmp_path):
    out_dir = tmp_path / "buffers"
    code = cli_main(["render", "--mesh", str(mesh_dir / "cube.obj"),
                     "--out", str(tmp_path / "cube.png"), "--size", "96x96",
                     "--dump-intermediates", str(out_dir)])
    assert code == 0
    names = {p.name for p in out_dir.iterdir()}
    assert {"depth.pgm", "line_value.pgm", "shaded.pgm", "shadow_fraction.pgm",
            "final.png", "normal_depth.png"} <= names


def test_cli_metrics_defaults_pass(mesh_dir, tmp_path):
    report_path = tmp_path / "report.json"
    code = cli_main(["metrics", "--mesh", str(mesh_dir / "cube.obj"),
                     "--report", str(report_path)])
    assert code == 0
    report = json.loads(report_path.read_text())
    assert report["line_band_mass"] >= 0.95
    assert report["passed"] is True


def test_cli_metrics_detuned_params_fail_gate(mesh_dir, tmp_path):
    params = tmp_path / "p.json"
    params.write_text(json.dumps({"line_b_min": 0.1}))
    report_path = tmp_path / "report.json"
    code = cli_main(["metrics", "--mesh", str(mesh_dir / "cube.obj"),
                     "--report", str(report_path), "--params", str(params)])
    assert code == 5
    report = json.loads(report_path.read_text())
    assert report["gates"]["line_band_mass"] is False


def test_cli_metrics_pole_fixture(mesh_dir, tmp_path):
    report_path = tmp_path / "report.json"
    code = cli_main(["metrics", "--mesh", str(mesh_dir / "cube.obj"),
                     "--report", str(report_path), "--fixture", "pole"])
    assert code == 0
    report = json.loads(report_path.read_text())
    assert report["shadow_length_ratio"] == pytest.approx(1.0, abs=0.05)
    assert report["gates"]["shadow_ratio"] is True


def test_cli_camera_spec(mesh_dir, tmp_path):
    out = tmp_path / "cam.png"
    code = cli_main(["render", "--mesh", str(mesh_dir / "cube.obj"),
                     "--out", str(out), "--size", "64x64",
                     "--camera", "pos=0,0,5;look=0,0,0;fov=30"])
    assert code == 0
    code = cli_main(["render", "--mesh", str(mesh_dir / "cube.obj"),
                     "--out", str(out), "--size", "64x64",
                     "--camera", "pos=oops"])
    assert code == 2


# --- service -------------------------------------------------------------------

def test_service_schema_complete(client):
    fields = client.get("/api/params/schema").json()["fields"]
    assert len(fields) == 22
    by_name = {f["name"]: f for f in fields}
    defaults = StyleParams().to_dict()
    for name, value in defaults.items():
        assert by_name[name]["default"] == value
        assert "min" in by_name[name] and "max" in by_name[name]
        assert by_name[name]["provenance"] in ("paper", "placeholder")


def test_service_meshes(client):
    assert client.get("/api/meshes").json()["meshes"] == ["cube", "ico"]


def test_service_render_deterministic(client):
    req = {"mesh_id": "cube", "camera": {"viewport": [96, 96]}}
    a = client.post("/api/render", json=req)
    b = client.post("/api/render", json=req)
    assert a.status_code == 200
    assert a.headers["content-type"] == "image/png"
    assert float(a.headers["x-render-millis"]) > 0
    assert a.content == b.content


def test_service_render_outputs(client):
    for kind in ("final", "lines", "shaded", "shadow", "normal_depth"):
        r = client.post("/api/render", json={
            "mesh_id": "cube", "outputs": [kind],
            "camera": {"viewport": [64, 64]}})
        assert r.status_code == 200, kind
    r = client.post("/api/render", json={"mesh_id": "cube", "outputs": ["wat"]})
    assert r.status_code == 400
    r = client.post("/api/render", json={"mesh_id": "cube",
                                         "outputs": ["final", "lines"]})
    assert r.status_code == 400


def test_service_validation_and_404(client):
    r = client.post("/api/render", json={
        "mesh_id": "cube", "params": {"w_geom": 0.6, "w_nd": 0.7}})
    assert r.status_code == 400
    violations = r.json()["detail"]["violations"]
    assert any("weights exceed 1" in v["message"] for v in violations)

    assert client.post("/api/render", json={"mesh_id": "ghost"}).status_code == 404
    assert client.post("/api/render",
                       json={"mesh_id": "../cube"}).status_code == 404


def test_service_last_timings(client):
    client.post("/api/render", json={"mesh_id": "cube",
                                     "camera": {"viewport": [64, 64]}})
    body = client.get("/api/last-timings").json()
    assert body["total_ms"] > 0
    assert "visibility" in body["stages"]


def test_service_metrics(client):
    r = client.post("/api/metrics", json={
        "mesh_id": "cube", "camera": {"viewport": [512, 512]},
        "fixture": "pole"})
    assert r.status_code == 200
    report = r.json()
    assert report["gates"]["line_band_mass"] is True
    assert report["shadow_length_ratio"] == pytest.approx(1.0, abs=0.05)


def test_cli_and_service_render_identical_bytes(mesh_dir, client, tmp_path):
    out = tmp_path / "cli.png"
    code = cli_main(["render", "--mesh", str(mesh_dir / "cube.obj"),
                     "--out", str(out), "--size", "128x128"])
    assert code == 0
    r = client.post("/api/render", json={
        "mesh_id": "cube", "camera": {"viewport": [128, 128]}})
    assert out.read_bytes() == r.content
