"""PGM and PNG export for buffers and final images.

PGM (binary P5) is used for debug buffers because it diffs trivially; PNG
for final images. Quantization is round-to-nearest on [0, 1] floats, so
identical float buffers always serialize to identical bytes.
"""

from __future__ import annotations

import io

import numpy as np
from PIL import Image


def quantize8(data: np.ndarray) -> np.ndarray:
    return np.rint(np.clip(data, 0.0, 1.0) * 255.0).astype(np.uint8)


def write_pgm(path, data: np.ndarray) -> None:
    """Binary P5, maxval 255, from a float image in [0, 1]."""
    q = quantize8(data)
    h, w = q.shape
    with open(path, "wb") as fh:
        fh.write(f"P5\n{w} {h}\n255\n".encode("ascii"))
        fh.write(q.tobytes())


def read_pgm(path) -> np.ndarray:
    """Read binary P5 back to float [0, 1]."""
    with open(path, "rb") as fh:
        magic = fh.readline().strip()
        if magic != b"P5":
            raise ValueError(f"not a binary PGM: {magic!r}")
        fields = []
        while len(fields) < 3:
            line = fh.readline()
            if line.startswith(b"#"):
                continue
            fields += line.split()
        w, h, maxval = (int(x) for x in fields)
        raw = fh.read(w * h)
    return np.frombuffer(raw, dtype=np.uint8).reshape(h, w) / float(maxval)


def _to_image(data: np.ndarray) -> Image.Image:
    q = quantize8(data)
    if q.ndim == 2:
        return Image.fromarray(q, mode="L")
    if q.ndim == 3 and q.shape[2] == 3:
        return Image.fromarray(q, mode="RGB")
    raise ValueError(f"unsupported image shape {data.shape}")


def write_png(path, data: np.ndarray) -> None:
    """Grayscale (H,W) or RGB (H,W,3) floats in [0, 1] to PNG."""
    _to_image(data).save(path, format="PNG")


def png_bytes(data: np.ndarray) -> bytes:
    buf = io.BytesIO()
    _to_image(data).save(buf, format="PNG")
    return buf.getvalue()
