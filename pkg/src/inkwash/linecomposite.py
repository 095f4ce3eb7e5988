"""Image-space line detection on the normal-depth map and composition of
geometry + image lines into the calibrated line-value image.

Darkness images use 0 = no line, 1 = strongest line; the final line-value
image flips to a brightness multiplier where 1 = untouched paper and stroke
pixels land inside the configured brightness band.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .rasterizer import NormalDepthMap


@dataclass
class LineImage:
    """Per-pixel line darkness in [0, 1]."""

    width: int
    height: int
    data: np.ndarray

    @classmethod
    def zeros(cls, width: int, height: int) -> "LineImage":
        return cls(width, height, np.zeros((height, width)))


@dataclass
class LineValueImage:
    """Per-pixel brightness multiplier: 1 off-stroke, banded on-stroke."""

    width: int
    height: int
    data: np.ndarray


def box_mean(data: np.ndarray, radius: int) -> np.ndarray:
    """Edge-clamped (2r+1)^2 mean filter via an integral image."""
    r = int(radius)
    if r < 0:
        raise ValueError("radius must be >= 0")
    if r == 0:
        return data.copy()
    k = 2 * r + 1
    padded = np.pad(data, r, mode="edge")
    integral = np.pad(np.cumsum(np.cumsum(padded, axis=0), axis=1), ((1, 0), (1, 0)))
    sums = (integral[k:, k:] - integral[:-k, k:]
            - integral[k:, :-k] + integral[:-k, :-k])
    return sums / float(k * k)


def detect_nd_edges(nd: NormalDepthMap, k_depth: float, k_normal: float) -> LineImage:
    """Four-corner discontinuity response on the packed normal-depth map.

    Per pixel, with diagonal neighbors A=(x-1,y-1), B=(x+1,y+1), C=(x+1,y-1),
    D=(x-1,y+1) sampled with border clamping:

        darkness = clamp(k_depth * (|dA-dB| + |dC-dD|)
                         + k_normal * (|nA-nB| + |nC-nD|), 0, 1)

    Depths and normals are the decoded 8-bit values, so flat regions carry a
    small quantization floor that the downstream threshold rejects.
    """
    if k_depth < 0 or k_normal < 0:
        raise ValueError("edge gains must be >= 0")
    normals, depth = nd.unpack()
    h, w = depth.shape
    dpad = np.pad(depth, 1, mode="edge")
    npad = np.pad(normals, ((1, 1), (1, 1), (0, 0)), mode="edge")

    d_a, d_b = dpad[0:h, 0:w], dpad[2:, 2:]
    d_c, d_d = dpad[0:h, 2:], dpad[2:, 0:w]
    n_a, n_b = npad[0:h, 0:w], npad[2:, 2:]
    n_c, n_d = npad[0:h, 2:], npad[2:, 0:w]

    response = k_depth * (np.abs(d_a - d_b) + np.abs(d_c - d_d))
    response += k_normal * (
        np.linalg.norm(n_a - n_b, axis=2) + np.linalg.norm(n_c - n_d, axis=2)
    )
    return LineImage(w, h, np.clip(response, 0.0, 1.0))


def blur(img: LineImage, radius: int) -> LineImage:
    """Box blur; radius 0 is the identity."""
    return LineImage(img.width, img.height, box_mean(img.data, radius))


def composite_lines(geom: LineImage, nd: LineImage, w_geom: float, w_nd: float,
                    blur_radius: int = 1) -> LineImage:
    """Weighted sum of blurred geometry lines and normal-depth lines."""
    if (geom.width, geom.height) != (nd.width, nd.height):
        raise ValueError("line image dimensions differ")
    if w_geom + w_nd > 1.0 + 1e-9:
        raise ValueError("line weights must sum to at most 1")
    mixed = w_geom * box_mean(geom.data, blur_radius) + w_nd * nd.data
    return LineImage(geom.width, geom.height, np.clip(mixed, 0.0, 1.0))


def remap_line_brightness(composite: LineImage, threshold: float, b_min: float,
                          b_max: float) -> LineValueImage:
    """Map darkness to the calibrated brightness band.

    Darkness <= threshold is paper (value 1); darker pixels fall linearly
    from just under b_max down to b_min at full darkness.
    """
    if not (0.0 <= threshold < 1.0):
        raise ValueError("threshold must lie in [0, 1)")
    if not (0.0 < b_min < b_max <= 1.0):
        raise ValueError("require 0 < b_min < b_max <= 1")
    d = composite.data
    banded = b_max - (b_max - b_min) * (d - threshold) / (1.0 - threshold)
    value = np.where(d <= threshold, 1.0, banded)
    return LineValueImage(composite.width, composite.height, value)
