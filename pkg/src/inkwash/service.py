"""Local HTTP service for the interactive tuning UI.

Endpoints:
  GET  /api/meshes         - mesh ids found in the configured directory
  GET  /api/params/schema  - StyleParams field ranges, defaults, provenance
  POST /api/render         - RenderRequest JSON -> PNG bytes (+ timing header)
  GET  /api/last-timings   - per-stage milliseconds of the last render
  POST /api/metrics        - RenderRequest JSON -> StyleReport JSON

Renders are serialized behind a process-wide lock (queued, never interleaved
on shared state); meshes are cached read-only per id. Responses are pure
functions of requests, so identical requests return identical bytes.
"""

from __future__ import annotations

import threading
import time
from pathlib import Path

import numpy as np
from fastapi import FastAPI, HTTPException, Response
from pydantic import BaseModel, Field

from .geometry import Camera, MeshLoadError, light_from_angles, load_mesh
from .fixtures import make_pole_on_plane, pole_camera
from .imageio import png_bytes
from .pipeline import (InvalidParamsError, StageError, StyleParams,
                       param_schema, render_frame)
from .stylemetrics import DEFAULT_TAIL_CUTOFF, brightness_histogram, compute_style_report
from .transforms import auto_camera

MESH_SUFFIXES = (".obj", ".ply")
OUTPUT_KINDS = ("final", "lines", "shaded", "shadow", "normal_depth")


class ProjectionSpec(BaseModel):
    kind: str = "perspective"
    fov_y_deg: float = 40.0
    half_height: float = 1.0


class CameraSpec(BaseModel):
    position: list[float] | None = None
    look_at: list[float] | None = None
    up: list[float] = Field(default_factory=lambda: [0.0, 1.0, 0.0])
    projection: ProjectionSpec = Field(default_factory=ProjectionSpec)
    viewport: list[int] = Field(default_factory=lambda: [512, 512])
    near: float | None = None
    far: float | None = None


class RenderRequest(BaseModel):
    mesh_id: str
    camera: CameraSpec = Field(default_factory=CameraSpec)
    params: dict = Field(default_factory=dict)
    outputs: list[str] = Field(default_factory=lambda: ["final"])
    fixture: str = "none"  # metrics only: "pole" adds the shadow-ratio gate
    workers: int = 1


def _camera_from_spec(spec: CameraSpec, mesh) -> Camera:
    viewport = (int(spec.viewport[0]), int(spec.viewport[1]))
    if spec.position is None or spec.look_at is None:
        base = auto_camera(mesh, viewport,
                           fov_y_deg=spec.projection.fov_y_deg)
        if spec.position is None and spec.look_at is None:
            return base
        position = np.asarray(spec.position or base.position, dtype=np.float64)
        look_at = np.asarray(spec.look_at or base.look_at, dtype=np.float64)
    else:
        position = np.asarray(spec.position, dtype=np.float64)
        look_at = np.asarray(spec.look_at, dtype=np.float64)
    distance = float(np.linalg.norm(position - look_at))
    if distance <= 0:
        raise ValueError("camera position coincides with look_at")
    near = spec.near if spec.near is not None else max(distance * 0.05, 1e-6)
    far = spec.far if spec.far is not None else distance * 4.0
    kwargs = dict(position=position, look_at=look_at,
                  up=np.asarray(spec.up, dtype=np.float64),
                  viewport=viewport, near=near, far=far)
    if spec.projection.kind == "orthographic":
        return Camera(projection="orthographic",
                      half_height=spec.projection.half_height, **kwargs)
    if spec.projection.kind == "perspective":
        return Camera(projection="perspective",
                      fov_y_deg=spec.projection.fov_y_deg, **kwargs)
    raise ValueError(f"unknown projection kind {spec.projection.kind!r}")


def _frame_output(frame, kind: str) -> np.ndarray:
    if kind == "final":
        return frame.final_rgb
    if kind == "lines":
        return frame.line_value.data
    if kind == "shaded":
        return frame.shaded_shadowed.data
    if kind == "shadow":
        return frame.shadow_fraction.data
    if kind == "normal_depth":
        return frame.normal_depth.data[:, :, :3].astype(np.float64) / 255.0
    raise ValueError(f"unknown output kind {kind!r}")


def create_app(mesh_dir: Path, workers: int = 1,
               frontend_dir: Path | None = None) -> FastAPI:
    mesh_dir = Path(mesh_dir)
    if not mesh_dir.is_dir():
        raise FileNotFoundError(f"mesh directory not found: {mesh_dir}")

    app = FastAPI(title="inkwash tuning service")
    render_lock = threading.Lock()
    mesh_cache: dict[str, object] = {}
    last_timings: dict = {"stages": {}, "total_ms": None}

    def list_meshes() -> list[str]:
        ids = [p.stem for p in sorted(mesh_dir.iterdir())
               if p.suffix.lower() in MESH_SUFFIXES]
        return sorted(set(ids))

    def resolve_mesh(mesh_id: str):
        if "/" in mesh_id or "\\" in mesh_id or mesh_id.startswith("."):
            raise HTTPException(status_code=404, detail=f"unknown mesh {mesh_id!r}")
        if mesh_id in mesh_cache:
            return mesh_cache[mesh_id]
        for suffix in MESH_SUFFIXES:
            path = mesh_dir / f"{mesh_id}{suffix}"
            if path.exists():
                try:
                    mesh = load_mesh(path)
                except MeshLoadError as exc:
                    raise HTTPException(status_code=400, detail=str(exc))
                mesh_cache[mesh_id] = mesh
                return mesh
        raise HTTPException(status_code=404, detail=f"unknown mesh {mesh_id!r}")

    def build_inputs(req: RenderRequest):
        try:
            params = StyleParams.from_dict(req.params)
        except InvalidParamsError as exc:
            raise HTTPException(status_code=400, detail={
                "message": "invalid params", "violations": exc.violations,
            })
        mesh = resolve_mesh(req.mesh_id)
        try:
            camera = _camera_from_spec(req.camera, mesh)
        except ValueError as exc:
            raise HTTPException(status_code=400, detail={
                "message": "invalid camera",
                "violations": [{"field": "camera", "message": str(exc)}],
            })
        for kind in req.outputs:
            if kind not in OUTPUT_KINDS:
                raise HTTPException(status_code=400, detail={
                    "message": "invalid outputs",
                    "violations": [{"field": "outputs",
                                    "message": f"unknown output {kind!r}"}],
                })
        if len(req.outputs) != 1:
            raise HTTPException(status_code=400, detail={
                "message": "invalid outputs",
                "violations": [{"field": "outputs",
                                "message": "exactly one output per render request"}],
            })
        return mesh, camera, params

    @app.get("/api/meshes")
    def api_meshes():
        return {"meshes": list_meshes()}

    @app.get("/api/params/schema")
    def api_schema():
        return {"fields": param_schema()}

    @app.get("/api/last-timings")
    def api_last_timings():
        return last_timings

    @app.post("/api/render")
    def api_render(req: RenderRequest):
        mesh, camera, params = build_inputs(req)
        with render_lock:
            t0 = time.perf_counter()
            try:
                frame = render_frame(mesh, camera, params,
                                     workers=req.workers or workers)
            except StageError as exc:
                raise HTTPException(status_code=400, detail={
                    "message": str(exc),
                    "violations": [{"field": exc.stage, "message": str(exc)}],
                })
            total = (time.perf_counter() - t0) * 1000.0
            last_timings["stages"] = dict(frame.timings_ms)
            last_timings["total_ms"] = total
        body = png_bytes(_frame_output(frame, req.outputs[0]))
        return Response(content=body, media_type="image/png",
                        headers={"X-Render-Millis": f"{total:.1f}"})

    @app.post("/api/metrics")
    def api_metrics(req: RenderRequest):
        mesh, camera, params = build_inputs(req)
        with render_lock:
            try:
                frame = render_frame(mesh, camera, params,
                                     workers=req.workers or workers)
                report = compute_style_report(frame, params, camera)
                if req.fixture == "pole":
                    light = light_from_angles(params.light_azimuth_deg,
                                              params.light_elevation_deg)
                    pole_mesh, descriptor = make_pole_on_plane()
                    pole_cam = pole_camera(pole_mesh, tuple(camera.viewport))
                    pole_frame = render_frame(pole_mesh, pole_cam, params,
                                              workers=req.workers or workers)
                    pole_report = compute_style_report(
                        pole_frame, params, pole_cam,
                        fixture=descriptor, light=light)
                    report.shadow_length_ratio = pole_report.shadow_length_ratio
                    report.gates["shadow_ratio"] = pole_report.gates["shadow_ratio"]
                    report.passed = all(report.gates.values())
            except (StageError, ValueError) as exc:
                raise HTTPException(status_code=400, detail={
                    "message": str(exc),
                    "violations": [{"field": "render", "message": str(exc)}],
                })
            # histograms for the tuning UI's band overlays
            line_mask = frame.line_value.data < DEFAULT_TAIL_CUTOFF
            lit_mask = ((frame.depth.data < 1.0)
                        & (frame.shadow_fraction.data < 0.5) & ~line_mask)
            body = dict(report.__dict__)
            body["line_histogram"] = brightness_histogram(
                frame.line_value.data, line_mask).counts.tolist()
            body["lit_histogram"] = brightness_histogram(
                frame.shaded_shadowed.data, lit_mask).counts.tolist()
        return body

    if frontend_dir is not None and Path(frontend_dir).is_dir():
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=str(frontend_dir), html=True),
                  name="frontend")

    return app
