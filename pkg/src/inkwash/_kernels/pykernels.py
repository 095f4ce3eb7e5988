"""Pure-numpy raster kernels: the fallback for the compiled core.

Both backends implement the same contract and produce bit-identical buffers:
integer fixed-point coverage (exact), float64 depth interpolation with the
same operation order, strict-less depth test, first-written-wins on ties.
Coordinates are int64 fixed point with 8 fractional bits; pixel (px, py) has
its center at fixed-point (256 px + 128, 256 py + 128).
"""

from __future__ import annotations

import numpy as np

NAME = "python"


def _edge_bias(dx: int, dy: int) -> int:
    # Top-left fill rule (y down): boundary pixels belong to horizontal
    # edges running +x and to edges running -y; everything else is exclusive.
    if dy == 0:
        return 0 if dx > 0 else -1
    return 0 if dy < 0 else -1


def fill_triangles(xf, yf, z, ids, depth, idbuf, zbias, y_start, y_end):
    """Rasterize triangles into `depth` (and `idbuf` when given).

    xf, yf: (T, 3) int64 fixed point; z: (T, 3) float64 normalized depth;
    ids: (T,) int32 written where coverage wins the depth test (ignored when
    idbuf is None); zbias is added to every interpolated depth. Only rows in
    [y_start, y_end) are written, which is the unit of parallelism.
    """
    height, width = depth.shape
    y_end = min(y_end, height)
    for t in range(len(xf)):
        x0, x1, x2 = int(xf[t, 0]), int(xf[t, 1]), int(xf[t, 2])
        y0, y1, y2 = int(yf[t, 0]), int(yf[t, 1]), int(yf[t, 2])
        z0, z1, z2 = float(z[t, 0]), float(z[t, 1]), float(z[t, 2])
        area2 = (x1 - x0) * (y2 - y0) - (y1 - y0) * (x2 - x0)
        if area2 == 0:
            continue
        if area2 < 0:
            x1, x2 = x2, x1
            y1, y2 = y2, y1
            z1, z2 = z2, z1
            area2 = -area2

        pxlo = max(0, (min(x0, x1, x2) - 128 + 255) >> 8)
        pxhi = min(width - 1, (max(x0, x1, x2) - 128) >> 8)
        pylo = max(y_start, (min(y0, y1, y2) - 128 + 255) >> 8)
        pyhi = min(y_end - 1, (max(y0, y1, y2) - 128) >> 8)
        if pxlo > pxhi or pylo > pyhi:
            continue

        cx = (np.arange(pxlo, pxhi + 1, dtype=np.int64) << 8) + 128
        cy = (np.arange(pylo, pyhi + 1, dtype=np.int64) << 8) + 128
        w0 = (x2 - x1) * (cy[:, None] - y1) - (y2 - y1) * (cx[None, :] - x1)
        w1 = (x0 - x2) * (cy[:, None] - y2) - (y0 - y2) * (cx[None, :] - x2)
        w2 = (x1 - x0) * (cy[:, None] - y0) - (y1 - y0) * (cx[None, :] - x0)
        b0 = _edge_bias(x2 - x1, y2 - y1)
        b1 = _edge_bias(x0 - x2, y0 - y2)
        b2 = _edge_bias(x1 - x0, y1 - y0)
        covered = ((w0 + b0) >= 0) & ((w1 + b1) >= 0) & ((w2 + b2) >= 0)
        if not covered.any():
            continue

        d = (w0 * z0 + w1 * z1 + w2 * z2) / float(area2) + zbias
        tile = depth[pylo : pyhi + 1, pxlo : pxhi + 1]
        write = covered & (d < tile)
        tile[write] = d[write]
        if idbuf is not None:
            idbuf[pylo : pyhi + 1, pxlo : pxhi + 1][write] = ids[t]


def line_pixels(px0: int, py0: int, px1: int, py1: int):
    """Integer midpoint stepping between pixel endpoints (inclusive).

    Returns (xs, ys) int64 arrays of max(|dx|, |dy|) + 1 distinct pixels.
    """
    dx = px1 - px0
    dy = py1 - py0
    adx, ady = abs(dx), abs(dy)
    n = max(adx, ady)
    if n == 0:
        return (np.array([px0], dtype=np.int64), np.array([py0], dtype=np.int64))
    i = np.arange(n + 1, dtype=np.int64)
    sx = 1 if dx >= 0 else -1
    sy = 1 if dy >= 0 else -1
    xs = px0 + sx * ((2 * i * adx + n) // (2 * n))
    ys = py0 + sy * ((2 * i * ady + n) // (2 * n))
    return xs, ys


def draw_lines(x0f, y0f, x1f, y1f, z0, z1, ids, depth, idbuf, y_start, y_end):
    """Depth-tested 1 px 3D lines; writes id and depth where strictly nearer.

    Endpoints are int64 fixed point; lines are processed in submission order
    so equal-depth crossings resolve to the first (lowest id when callers
    submit in id order).
    """
    height, width = depth.shape
    y_end = min(y_end, height)
    flat_d = depth.reshape(-1)
    flat_i = idbuf.reshape(-1) if idbuf is not None else None
    for k in range(len(x0f)):
        xs, ys = line_pixels(
            int(x0f[k]) >> 8, int(y0f[k]) >> 8, int(x1f[k]) >> 8, int(y1f[k]) >> 8
        )
        n = len(xs) - 1
        if n == 0:
            zs = np.array([float(z0[k])])
        else:
            zs = z0[k] + (z1[k] - z0[k]) * (np.arange(n + 1, dtype=np.int64) / float(n))
        inb = (xs >= 0) & (xs < width) & (ys >= y_start) & (ys < y_end)
        if not inb.any():
            continue
        idx = ys[inb] * width + xs[inb]
        zv = zs[inb]
        sel = zv < flat_d[idx]
        hit = idx[sel]
        flat_d[hit] = zv[sel]
        if flat_i is not None:
            flat_i[hit] = ids[k]
