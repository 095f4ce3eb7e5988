# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled raster kernels.

Mirrors pykernels operation-for-operation: identical integer fixed-point
coverage, identical float64 expressions in the same order, strict-less depth
test. Results are bit-identical to the fallback. Loops release the GIL so
row bands can run on real threads.
"""

import numpy as np

NAME = "compiled"

ctypedef long long i64


cdef inline i64 _edge_bias(i64 dx, i64 dy) nogil:
    # Top-left fill rule (y down): boundary pixels belong to horizontal
    # edges running +x and to edges running -y.
    if dy == 0:
        return 0 if dx > 0 else -1
    return 0 if dy < 0 else -1


cdef inline i64 _max3(i64 a, i64 b, i64 c) nogil:
    cdef i64 m = a
    if b > m: m = b
    if c > m: m = c
    return m


cdef inline i64 _min3(i64 a, i64 b, i64 c) nogil:
    cdef i64 m = a
    if b < m: m = b
    if c < m: m = c
    return m


def fill_triangles(const i64[:, ::1] xf, const i64[:, ::1] yf,
                   const double[:, ::1] z, const int[::1] ids,
                   double[:, ::1] depth, idbuf, double zbias,
                   Py_ssize_t y_start, Py_ssize_t y_end):
    """See pykernels.fill_triangles; identical contract and results."""
    cdef Py_ssize_t height = depth.shape[0]
    cdef Py_ssize_t width = depth.shape[1]
    cdef bint has_id = idbuf is not None
    cdef int[:, ::1] idview
    if has_id:
        idview = idbuf
    else:
        idview = np.zeros((1, 1), dtype=np.int32)
    if y_end > height:
        y_end = height

    cdef Py_ssize_t t, px, py
    cdef i64 x0, x1, x2, y0, y1, y2, tmp
    cdef double z0, z1, z2, ztmp, d, inv_area
    cdef i64 area2, b0, b1, b2
    cdef i64 pxlo, pxhi, pylo, pyhi, cx0, cy0
    cdef i64 w0row, w1row, w2row, w0, w1, w2
    cdef i64 dw0x, dw1x, dw2x, dw0y, dw1y, dw2y
    cdef int tid
    cdef Py_ssize_t ntri = xf.shape[0]

    with nogil:
        for t in range(ntri):
            x0 = xf[t, 0]; x1 = xf[t, 1]; x2 = xf[t, 2]
            y0 = yf[t, 0]; y1 = yf[t, 1]; y2 = yf[t, 2]
            z0 = z[t, 0]; z1 = z[t, 1]; z2 = z[t, 2]
            area2 = (x1 - x0) * (y2 - y0) - (y1 - y0) * (x2 - x0)
            if area2 == 0:
                continue
            if area2 < 0:
                tmp = x1; x1 = x2; x2 = tmp
                tmp = y1; y1 = y2; y2 = tmp
                ztmp = z1; z1 = z2; z2 = ztmp
                area2 = -area2

            pxlo = (_min3(x0, x1, x2) - 128 + 255) >> 8
            pxhi = (_max3(x0, x1, x2) - 128) >> 8
            pylo = (_min3(y0, y1, y2) - 128 + 255) >> 8
            pyhi = (_max3(y0, y1, y2) - 128) >> 8
            if pxlo < 0: pxlo = 0
            if pxhi > width - 1: pxhi = width - 1
            if pylo < <i64>y_start: pylo = y_start
            if pyhi > <i64>(y_end - 1): pyhi = y_end - 1
            if pxlo > pxhi or pylo > pyhi:
                continue

            b0 = _edge_bias(x2 - x1, y2 - y1)
            b1 = _edge_bias(x0 - x2, y0 - y2)
            b2 = _edge_bias(x1 - x0, y1 - y0)

            cx0 = (pxlo << 8) + 128
            cy0 = (pylo << 8) + 128
            w0row = (x2 - x1) * (cy0 - y1) - (y2 - y1) * (cx0 - x1)
            w1row = (x0 - x2) * (cy0 - y2) - (y0 - y2) * (cx0 - x2)
            w2row = (x1 - x0) * (cy0 - y0) - (y1 - y0) * (cx0 - x0)
            dw0x = -(y2 - y1) << 8; dw0y = (x2 - x1) << 8
            dw1x = -(y0 - y2) << 8; dw1y = (x0 - x2) << 8
            dw2x = -(y1 - y0) << 8; dw2y = (x1 - x0) << 8
            inv_area = <double>area2
            tid = ids[t]

            for py in range(pylo, pyhi + 1):
                w0 = w0row; w1 = w1row; w2 = w2row
                for px in range(pxlo, pxhi + 1):
                    if (w0 + b0) >= 0 and (w1 + b1) >= 0 and (w2 + b2) >= 0:
                        d = (w0 * z0 + w1 * z1 + w2 * z2) / inv_area + zbias
                        if d < depth[py, px]:
                            depth[py, px] = d
                            if has_id:
                                idview[py, px] = tid
                    w0 += dw0x; w1 += dw1x; w2 += dw2x
                w0row += dw0y; w1row += dw1y; w2row += dw2y


def line_pixels(px0, py0, px1, py1):
    """Integer midpoint stepping between pixel endpoints (inclusive)."""
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


def draw_lines(const i64[::1] x0f, const i64[::1] y0f,
               const i64[::1] x1f, const i64[::1] y1f,
               const double[::1] z0, const double[::1] z1,
               const int[::1] ids, double[:, ::1] depth, idbuf,
               Py_ssize_t y_start, Py_ssize_t y_end):
    """See pykernels.draw_lines; identical contract and results."""
    cdef Py_ssize_t height = depth.shape[0]
    cdef Py_ssize_t width = depth.shape[1]
    cdef bint has_id = idbuf is not None
    cdef int[:, ::1] idview
    if has_id:
        idview = idbuf
    else:
        idview = np.zeros((1, 1), dtype=np.int32)
    if y_end > height:
        y_end = height

    cdef Py_ssize_t k, nlines = x0f.shape[0]
    cdef i64 px0, py0, px1, py1, dx, dy, adx, ady, n, i, x, y, sx, sy
    cdef double za, zb, zi
    cdef int lid

    with nogil:
        for k in range(nlines):
            px0 = x0f[k] >> 8; py0 = y0f[k] >> 8
            px1 = x1f[k] >> 8; py1 = y1f[k] >> 8
            za = z0[k]; zb = z1[k]
            lid = ids[k]
            dx = px1 - px0; dy = py1 - py0
            adx = dx if dx >= 0 else -dx
            ady = dy if dy >= 0 else -dy
            sx = 1 if dx >= 0 else -1
            sy = 1 if dy >= 0 else -1
            n = adx if adx > ady else ady
            if n == 0:
                if px0 >= 0 and px0 < width and py0 >= <i64>y_start and py0 < <i64>y_end:
                    if za < depth[py0, px0]:
                        depth[py0, px0] = za
                        if has_id:
                            idview[py0, px0] = lid
                continue
            for i in range(n + 1):
                x = px0 + sx * ((2 * i * adx + n) // (2 * n))
                y = py0 + sy * ((2 * i * ady + n) // (2 * n))
                if x < 0 or x >= width or y < <i64>y_start or y >= <i64>y_end:
                    continue
                zi = za + (zb - za) * (<double>i / <double>n)
                if zi < depth[y, x]:
                    depth[y, x] = zi
                    if has_id:
                        idview[y, x] = lid
