"""Compiled-vs-python kernel benchmark on procedural sphere meshes."""

from __future__ import annotations

import math
import time

from ._kernels import available_backends
from .fixtures import make_uv_sphere
from .pipeline import StyleParams, render_frame
from .rasterizer import rasterize_visibility
from .transforms import auto_camera


def sphere_with_triangles(n: int):
    """UV sphere whose triangle count approximates n."""
    s = max(3, int((1.0 + math.sqrt(1.0 + 2.0 * n)) / 2.0))
    return make_uv_sphere(stacks=s, slices=s)


def _median_ms(fn, repeats: int) -> float:
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        times.append((time.perf_counter() - t0) * 1000.0)
    times.sort()
    return times[len(times) // 2]


def run_benchmark(triangle_counts=(20000, 100000), size=(512, 512), workers: int = 1,
                  repeats: int = 3) -> list[dict]:
    """Median wall times for the visibility pass and the full pipeline."""
    backends = available_backends()
    rows = []
    for n in triangle_counts:
        mesh = sphere_with_triangles(n)
        camera = auto_camera(mesh, size)
        params = StyleParams()
        row_raster = {"triangles": mesh.n_faces, "stage": "visibility",
                      "compiled_ms": float("nan"), "python_ms": float("nan")}
        row_frame = {"triangles": mesh.n_faces, "stage": "full_frame",
                     "compiled_ms": float("nan"), "python_ms": float("nan")}
        for backend in backends:
            raster_ms = _median_ms(
                lambda: rasterize_visibility(mesh, camera, workers, backend), repeats)
            frame_ms = _median_ms(
                lambda: render_frame(mesh, camera, params, workers, backend), repeats)
            row_raster[f"{backend}_ms"] = raster_ms
            row_frame[f"{backend}_ms"] = frame_ms
        rows += [row_raster, row_frame]
    return rows
