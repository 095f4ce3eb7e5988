"""Deterministic software rasterization into depth / normal-depth / id /
intensity buffers.

Work is split over horizontal pixel bands: every band walks the full
primitive list in submission order and writes only its own rows, so output
is byte-identical for any worker count. The compiled backend releases the
GIL inside its kernels, letting bands run on real threads.
"""

from __future__ import annotations

import concurrent.futures
from dataclasses import dataclass

import numpy as np

from . import transforms
from ._kernels import get_backend
from .geometry import Camera, Mesh

MAX_EDGE_ID = 2**31 - 1  # id buffer is 32-bit


@dataclass
class DepthBuffer:
    """Normalized nearest-surface depth per pixel; background sentinel 1.0."""

    width: int
    height: int
    data: np.ndarray  # (H, W) float64 in [0, 1]


@dataclass
class IndexBuffer:
    """Per-pixel 32-bit ids: 0 = background/occluder, >= 1 = edge ids."""

    width: int
    height: int
    data: np.ndarray  # (H, W) int32


@dataclass
class IntensityImage:
    """Grayscale image, 0 = black and 1 = white, clamped to [0, 1]."""

    width: int
    height: int
    data: np.ndarray  # (H, W) float64

    @classmethod
    def full(cls, width: int, height: int, value: float) -> "IntensityImage":
        return cls(width, height, np.full((height, width), float(value)))


NORMAL_BACKGROUND_CODE = 128  # quantized (0,0,0)
DEPTH_BACKGROUND_CODE = 255


def pack_normal_depth(normals: np.ndarray, depth: np.ndarray) -> np.ndarray:
    """Quantize unit normals and depth to RGBA8: rgb = rint((n+1)/2 * 255)."""
    out = np.empty(normals.shape[:-1] + (4,), dtype=np.uint8)
    out[..., :3] = np.rint((normals + 1.0) * 0.5 * 255.0)
    out[..., 3] = np.rint(np.clip(depth, 0.0, 1.0) * 255.0)
    return out


def unpack_normal_depth(codes: np.ndarray):
    """Inverse of pack_normal_depth; per-component error <= 1/255."""
    normals = codes[..., :3].astype(np.float64) / 255.0 * 2.0 - 1.0
    depth = codes[..., 3].astype(np.float64) / 255.0
    return normals, depth


@dataclass
class NormalDepthMap:
    """Camera-space face normal + depth packed to 32 bits per pixel."""

    width: int
    height: int
    data: np.ndarray  # (H, W, 4) uint8

    def unpack(self):
        return unpack_normal_depth(self.data)

    @classmethod
    def background(cls, width: int, height: int) -> "NormalDepthMap":
        data = np.empty((height, width, 4), dtype=np.uint8)
        data[..., :3] = NORMAL_BACKGROUND_CODE
        data[..., 3] = DEPTH_BACKGROUND_CODE
        return cls(width, height, data)


def _bands(height: int, workers: int):
    workers = max(1, min(int(workers), height))
    edges = np.linspace(0, height, workers + 1).astype(int)
    return [(int(edges[i]), int(edges[i + 1])) for i in range(workers)]


def _run_banded(fn, height: int, workers: int, compiled: bool):
    """fn(y_start, y_end) over disjoint row bands, threaded when compiled."""
    bands = _bands(height, workers)
    if len(bands) == 1 or not compiled:
        for y0, y1 in bands:
            fn(y0, y1)
        return
    with concurrent.futures.ThreadPoolExecutor(max_workers=len(bands)) as pool:
        futures = [pool.submit(fn, y0, y1) for y0, y1 in bands]
        for f in futures:
            f.result()


def rasterize_visibility(mesh: Mesh, camera: Camera, workers: int = 1,
                         backend: str | None = None):
    """Nearest-surface pass: returns (DepthBuffer, face-id array, -1 = none)."""
    kern = get_backend(backend)
    w, h = camera.viewport
    depth = np.ones((h, w))
    faceid = np.full((h, w), -1, dtype=np.int32)
    xf, yf, z01, tri_face = transforms.prepare_triangles(mesh, camera)

    def run(y0, y1):
        kern.fill_triangles(xf, yf, z01, tri_face, depth, faceid, 0.0, y0, y1)

    _run_banded(run, h, workers, kern.NAME == "compiled")
    return DepthBuffer(w, h, depth), faceid


def rasterize_depth(mesh: Mesh, camera: Camera, workers: int = 1,
                    backend: str | None = None) -> DepthBuffer:
    """Nearest-surface normalized depth; empty pixels stay at 1.0."""
    depth_buffer, _ = rasterize_visibility(mesh, camera, workers, backend)
    return depth_buffer


def normal_depth_from_visibility(mesh: Mesh, camera: Camera,
                                 depth_buffer: DepthBuffer,
                                 faceid: np.ndarray) -> NormalDepthMap:
    """Pack an existing visibility pass into a normal-depth map."""
    w, h = camera.viewport
    rot = transforms.view_matrix(camera)[:3, :3]
    normals_cam = mesh.face_normal @ rot.T
    face_codes = pack_normal_depth(
        normals_cam, np.zeros(len(normals_cam))
    )[:, :3]

    nd = NormalDepthMap.background(w, h)
    covered = faceid >= 0
    nd.data[covered, :3] = face_codes[faceid[covered]]
    nd.data[covered, 3] = np.rint(depth_buffer.data[covered] * 255.0).astype(np.uint8)
    return nd


def rasterize_normal_depth(mesh: Mesh, camera: Camera, workers: int = 1,
                           backend: str | None = None) -> NormalDepthMap:
    """Per-pixel camera-space face normal + depth, packed to RGBA8."""
    depth_buffer, faceid = rasterize_visibility(mesh, camera, workers, backend)
    return normal_depth_from_visibility(mesh, camera, depth_buffer, faceid)


def rasterize_ids(edge_ids: np.ndarray, edge_vertices: np.ndarray, mesh: Mesh,
                  camera: Camera, depth_offset: float = 1e-3, workers: int = 1,
                  backend: str | None = None) -> IndexBuffer:
    """Edges as depth-tested 1 px id lines over faces displaced deeper.

    Faces are pushed away from the viewer by depth_offset so an edge lying on
    its own face wins the depth test; genuinely occluding geometry still
    hides it. Edge ids must be dense and >= 1.
    """
    edge_ids = np.asarray(edge_ids, dtype=np.int64)
    if len(edge_ids) and edge_ids.min() < 1:
        raise ValueError("edge ids must be >= 1")
    if len(edge_ids) and edge_ids.max() > MAX_EDGE_ID:
        raise ValueError(f"edge id overflow: ids must stay <= {MAX_EDGE_ID}")
    kern = get_backend(backend)
    w, h = camera.viewport
    depth = np.ones((h, w))
    idbuf = np.zeros((h, w), dtype=np.int32)

    xf, yf, z01, tri_face = transforms.prepare_triangles(mesh, camera)
    order = np.argsort(edge_ids, kind="stable")
    ev = np.asarray(edge_vertices, dtype=np.int64)[order]
    ids_sorted = edge_ids[order].astype(np.int32)
    x0f, y0f, x1f, y1f, z0, z1, keep = transforms.prepare_segments(
        mesh.vertices[ev[:, 0]], mesh.vertices[ev[:, 1]], camera
    )

    def run(y0, y1):
        kern.fill_triangles(xf, yf, z01, tri_face, depth, None, depth_offset, y0, y1)
        kern.draw_lines(
            x0f[keep], y0f[keep], x1f[keep], y1f[keep],
            z0[keep], z1[keep], ids_sorted[keep], depth, idbuf, y0, y1,
        )

    _run_banded(run, h, workers, kern.NAME == "compiled")
    return IndexBuffer(w, h, idbuf)


def view_directions(camera: Camera, px: np.ndarray, py: np.ndarray,
                    depth01: np.ndarray) -> np.ndarray:
    """Unit vectors from surface points toward the camera."""
    if camera.projection == "orthographic":
        d = camera.position - camera.look_at
        d = d / np.linalg.norm(d)
        return np.broadcast_to(d, (len(px), 3)).copy()
    world = transforms.unproject_pixels(px, py, depth01, camera)
    v = camera.position - world
    return v / np.linalg.norm(v, axis=1)[:, None]


def shade_visibility(mesh: Mesh, camera: Camera, depth_buffer: DepthBuffer,
                     faceid: np.ndarray, shader,
                     background: float = 1.0) -> IntensityImage:
    """Deferred shading of an existing visibility pass.

    Normals are world-space unit face normals; view_dirs point from the
    surface toward the camera. Uncovered pixels take the background value.
    """
    w, h = camera.viewport
    img = np.full((h, w), float(background))
    covered = faceid >= 0
    if covered.any():
        py, px = np.nonzero(covered)
        normals = mesh.face_normal[faceid[covered]]
        views = view_directions(camera, px, py, depth_buffer.data[covered])
        img[covered] = shader(normals, views)
    return IntensityImage(w, h, np.clip(img, 0.0, 1.0))


def rasterize_shaded(mesh: Mesh, camera: Camera, shader, background: float = 1.0,
                     workers: int = 1, backend: str | None = None) -> IntensityImage:
    """Shade nearest surfaces with `shader(normals, view_dirs) -> intensity`."""
    depth_buffer, faceid = rasterize_visibility(mesh, camera, workers, backend)
    return shade_visibility(mesh, camera, depth_buffer, faceid, shader, background)
