"""Intensity-only Phong: paper-bright ambient plus chromaless diffuse and a
small specular term. With the default constants the non-specular response
spans exactly the calibrated lit band [0.55, 0.80].
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass
class ShadingParams:
    ambient: float = 0.55
    kd: float = 0.25
    ks: float = 0.10
    shininess: float = 24.0

    def __post_init__(self):
        if self.ambient < 0 or self.kd < 0 or self.ks < 0:
            raise ValueError("ambient, kd and ks must be >= 0")
        if self.ambient + self.kd > 1.0 + 1e-12:
            raise ValueError("ambient + kd must not exceed 1")
        if self.shininess < 1.0:
            raise ValueError("shininess must be >= 1")


def shade_many(normals: np.ndarray, light_dir: np.ndarray, view_dirs: np.ndarray,
               p: ShadingParams) -> np.ndarray:
    """Vectorized intensity shading; all direction inputs unit length.

    intensity = clamp(ambient + kd * max(0, n.l) + ks * max(0, r.v)^shininess)
    with r the reflection of the incoming light ray about the normal.
    """
    ndotl = normals @ light_dir
    diffuse = np.maximum(0.0, ndotl)
    r = 2.0 * ndotl[:, None] * normals - light_dir
    rdotv = np.einsum("ij,ij->i", r, view_dirs)
    specular = np.maximum(0.0, rdotv) ** p.shininess
    return np.clip(p.ambient + p.kd * diffuse + p.ks * specular, 0.0, 1.0)


def shade_point(normal, light_dir, view_dir, p: ShadingParams) -> float:
    """Scalar shade_many."""
    return float(shade_many(
        np.asarray(normal, dtype=np.float64)[None, :],
        np.asarray(light_dir, dtype=np.float64),
        np.asarray(view_dir, dtype=np.float64)[None, :],
        p,
    )[0])


def intensity_phong_shader(p: ShadingParams, light_dir: np.ndarray):
    """Shader closure for rasterize_shaded."""
    light_dir = np.asarray(light_dir, dtype=np.float64)

    def shader(normals: np.ndarray, view_dirs: np.ndarray) -> np.ndarray:
        return shade_many(normals, light_dir, view_dirs, p)

    return shader
