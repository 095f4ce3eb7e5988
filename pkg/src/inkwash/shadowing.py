"""Orthographic shadow map, depth-test failure map, PCF softening and the
lerp-to-ambient shadow application.

The shadow map renders the scene from the light through an orthographic
camera sized to the mesh bounding sphere at twice the viewport resolution.
Pixels that project outside the map are treated as lit and counted.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import transforms
from .geometry import Camera, DirectionalLight, Mesh
from .linecomposite import box_mean
from .rasterizer import DepthBuffer, IntensityImage, rasterize_depth


@dataclass
class ShadowMap:
    """Light-frame depth at 2x viewport resolution plus the light camera."""

    data: np.ndarray  # (2H, 2W) float64 normalized depth
    camera: Camera


@dataclass
class FailureMap:
    """Per-pixel shadow amount: binary after the depth test, fractional
    after PCF."""

    width: int
    height: int
    data: np.ndarray  # (H, W) float64 in [0, 1]
    outside_lit: int = field(default=0)  # pixels that missed the map


def light_camera(mesh: Mesh, light: DirectionalLight,
                 viewport: tuple[int, int]) -> Camera:
    """Orthographic camera looking along the light with the mesh in frame."""
    center, radius = mesh.bounding_sphere()
    margin = 1.05
    w, h = viewport
    aspect = (2 * w) / (2 * h)
    half_height = radius * margin / min(1.0, aspect)
    up = np.array([0.0, 1.0, 0.0])
    if abs(float(np.dot(light.direction, up))) > 0.99:
        up = np.array([1.0, 0.0, 0.0])
    return Camera(
        position=center + light.direction * (2.0 * radius),
        look_at=center,
        up=up,
        viewport=(2 * w, 2 * h),
        projection="orthographic",
        half_height=half_height,
        near=radius * 0.5,
        far=radius * 3.5,
    )


def build_shadow_map(mesh: Mesh, light: DirectionalLight, viewport: tuple[int, int],
                     workers: int = 1, backend: str | None = None) -> ShadowMap:
    """Nearest depth toward the light per texel; empty texels read 1.0."""
    if mesh.n_faces == 0:
        raise ValueError("cannot build a shadow map for an empty mesh")
    if not (0.0 < light.elevation_deg <= 90.0):
        raise ValueError("light elevation must lie in (0, 90] degrees")
    cam = light_camera(mesh, light, viewport)
    depth = rasterize_depth(mesh, cam, workers=workers, backend=backend)
    return ShadowMap(data=depth.data, camera=cam)


def world_positions(depth: DepthBuffer, camera: Camera):
    """Unproject covered pixels; returns ((H,W,3) positions, coverage mask)."""
    covered = depth.data < 1.0
    positions = np.zeros(depth.data.shape + (3,))
    if covered.any():
        py, px = np.nonzero(covered)
        positions[covered] = transforms.unproject_pixels(
            px, py, depth.data[covered], camera
        )
    return positions, covered


def compute_failure_map(positions: np.ndarray, coverage: np.ndarray,
                        sm: ShadowMap, bias: float = 2e-3) -> FailureMap:
    """Binary shadow test: fail where stored light depth + bias < pixel depth."""
    if bias < 0:
        raise ValueError("bias must be >= 0")
    h, w = coverage.shape
    data = np.zeros((h, w))
    outside = 0
    if coverage.any():
        screen, _ = transforms.project_points(positions[coverage], sm.camera)
        u = np.floor(screen[:, 0]).astype(np.int64)
        v = np.floor(screen[:, 1]).astype(np.int64)
        z = screen[:, 2]
        mh, mw = sm.data.shape
        inside = (u >= 0) & (u < mw) & (v >= 0) & (v < mh)
        outside = int((~inside).sum())
        fail = np.zeros(len(z), dtype=bool)
        fail[inside] = sm.data[v[inside], u[inside]] + bias < z[inside]
        data[coverage] = fail.astype(np.float64)
    return FailureMap(w, h, data, outside_lit=outside)


def pcf_filter(fm: FailureMap, kernel_radius: int) -> FailureMap:
    """Percentage-closer filtering: edge-clamped (2r+1)^2 neighborhood mean."""
    if kernel_radius < 0:
        raise ValueError("kernel radius must be >= 0")
    return FailureMap(fm.width, fm.height, box_mean(fm.data, kernel_radius),
                      outside_lit=fm.outside_lit)


def apply_shadows(shaded: IntensityImage, fractions: FailureMap,
                  ambient: float) -> IntensityImage:
    """Lerp each pixel from its shaded value toward the ambient color."""
    if (shaded.width, shaded.height) != (fractions.width, fractions.height):
        raise ValueError("image dimensions differ")
    s = fractions.data
    out = (1.0 - s) * shaded.data + s * ambient
    return IntensityImage(shaded.width, shaded.height, out)
