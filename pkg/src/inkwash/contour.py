"""Object-space contour extraction and index-buffer hidden-line removal.

Edge kinds:
  silhouette - interior edge whose two faces straddle the front/back split
  border     - edge with exactly one adjacent face
  crease     - interior edge whose face normals disagree beyond a threshold

Kinds are not exclusive; the candidate set submitted to the id buffer is the
union, deduplicated by edge id. Silhouettes are view-dependent and recomputed
per frame; border/crease sets are cached per mesh.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import transforms
from ._kernels import pykernels
from .geometry import Camera, EdgeAdjacency, Mesh, front_facing
from .rasterizer import IndexBuffer, IntensityImage


@dataclass(frozen=True)
class ClassifiedEdge:
    edge_id: int
    kinds: frozenset
    endpoints: tuple


@dataclass(frozen=True)
class VisibleSegment:
    """Parametric sub-interval [t0, t1] of an edge that survived HLR."""

    edge_id: int
    t0: float
    t1: float

    def __post_init__(self):
        if not (0.0 <= self.t0 < self.t1 <= 1.0):
            raise ValueError("require 0 <= t0 < t1 <= 1")


def classify_silhouette_edges(mesh: Mesh, adjacency: EdgeAdjacency,
                              camera_position: np.ndarray) -> np.ndarray:
    """Interior edges whose adjacent faces have opposite orientation."""
    front = front_facing(mesh, camera_position)
    interior = adjacency.interior_mask()
    f0 = adjacency.edge_faces[:, 0]
    f1 = adjacency.edge_faces[:, 1]
    sil = np.zeros(adjacency.n_edges, dtype=bool)
    sil[interior] = front[f0[interior]] != front[f1[interior]]
    return np.nonzero(sil)[0]


def classify_border_edges(adjacency: EdgeAdjacency) -> np.ndarray:
    """Edges with exactly one adjacent face."""
    return np.nonzero(adjacency.border_mask())[0]


def classify_crease_edges(mesh: Mesh, adjacency: EdgeAdjacency,
                          threshold_deg: float) -> np.ndarray:
    """Interior edges whose dihedral deviates from flat beyond the threshold."""
    if not (0.0 < threshold_deg < 180.0):
        raise ValueError("crease threshold must lie in (0, 180) degrees")
    interior = adjacency.interior_mask()
    f0 = adjacency.edge_faces[interior, 0]
    f1 = adjacency.edge_faces[interior, 1]
    cosang = np.einsum("ij,ij->i", mesh.face_normal[f0], mesh.face_normal[f1])
    angles = np.degrees(np.arccos(np.clip(cosang, -1.0, 1.0)))
    out = np.zeros(adjacency.n_edges, dtype=bool)
    out[np.nonzero(interior)[0]] = angles > threshold_deg
    return np.nonzero(out)[0]


def _static_edge_ids(mesh: Mesh, adjacency: EdgeAdjacency, crease_threshold_deg: float):
    key = ("static_edges", round(float(crease_threshold_deg), 9))
    if key not in mesh._cache:
        border = classify_border_edges(adjacency)
        crease = classify_crease_edges(mesh, adjacency, crease_threshold_deg)
        mesh._cache[key] = (border, crease)
    return mesh._cache[key]


def candidate_edges(mesh: Mesh, adjacency: EdgeAdjacency, camera: Camera,
                    crease_threshold_deg: float) -> list[ClassifiedEdge]:
    """Union of silhouette/border/crease edges, one record per edge id."""
    sil = classify_silhouette_edges(mesh, adjacency, camera.position)
    border, crease = _static_edge_ids(mesh, adjacency, crease_threshold_deg)
    kinds: dict[int, set] = {}
    for ids, kind in ((sil, "silhouette"), (border, "border"), (crease, "crease")):
        for e in ids:
            kinds.setdefault(int(e), set()).add(kind)
    out = []
    for e in sorted(kinds):
        v0, v1 = adjacency.edge_vertices[e]
        out.append(ClassifiedEdge(
            edge_id=e,
            kinds=frozenset(kinds[e]),
            endpoints=(tuple(mesh.vertices[v0]), tuple(mesh.vertices[v1])),
        ))
    return out


def _sample_counts(mesh: Mesh, adjacency: EdgeAdjacency, edge_ids: np.ndarray,
                   camera: Camera, samples_per_edge, min_samples: int) -> np.ndarray:
    if samples_per_edge is not None:
        return np.full(len(edge_ids), int(samples_per_edge), dtype=np.int64)
    ev = adjacency.edge_vertices[edge_ids]
    s0, w0 = transforms.project_points(mesh.vertices[ev[:, 0]], camera)
    s1, w1 = transforms.project_points(mesh.vertices[ev[:, 1]], camera)
    px_len = np.hypot(s1[:, 0] - s0[:, 0], s1[:, 1] - s0[:, 1])
    px_len = np.where((w0 > 0) & (w1 > 0), px_len, float(min_samples))
    return np.maximum(min_samples, np.ceil(px_len)).astype(np.int64)


def hidden_line_removal(edge_ids: np.ndarray, index: IndexBuffer, mesh: Mesh,
                        adjacency: EdgeAdjacency, camera: Camera,
                        samples_per_edge: int | None = None,
                        min_samples: int = 8) -> list[VisibleSegment]:
    """Keep the edge portions whose samples find their own id on screen.

    Each edge is sampled at midpoints of n equal parametric slices; a sample
    passes when its projected pixel or one of the 4 axis neighbors carries
    the edge's id (midpoint line stepping rounds the minor axis by at most
    one pixel relative to the sample's floor). Consecutive passing samples
    become one VisibleSegment.
    """
    edge_ids = np.asarray(edge_ids, dtype=np.int64)
    if len(edge_ids) == 0:
        return []
    buffer_ids = edge_ids + 1  # id 0 is background/occluder
    counts = _sample_counts(mesh, adjacency, edge_ids, camera, samples_per_edge,
                            min_samples)

    ev = adjacency.edge_vertices[edge_ids]
    a = mesh.vertices[ev[:, 0]]
    d = mesh.vertices[ev[:, 1]] - a
    total = int(counts.sum())
    owner = np.repeat(np.arange(len(edge_ids)), counts)
    local = np.arange(total) - np.repeat(np.cumsum(counts) - counts, counts)
    t = (local + 0.5) / counts[owner]
    points = a[owner] + t[:, None] * d[owner]

    screen, w = transforms.project_points(points, camera)
    px = np.floor(screen[:, 0]).astype(np.int64)
    py = np.floor(screen[:, 1]).astype(np.int64)
    h, wd = index.data.shape
    visible = (w > 0) & (px >= 0) & (px < wd) & (py >= 0) & (py < h)

    hit = np.zeros(total, dtype=bool)
    inside = np.nonzero(visible)[0]
    want = buffer_ids[owner[inside]]
    for dx, dy in ((0, 0), (1, 0), (-1, 0), (0, 1), (0, -1)):
        qx = np.clip(px[inside] + dx, 0, wd - 1)
        qy = np.clip(py[inside] + dy, 0, h - 1)
        hit[inside] |= index.data[qy, qx] == want
    visible &= hit

    segments: list[VisibleSegment] = []
    offsets = np.concatenate([[0], np.cumsum(counts)])
    for k, e in enumerate(edge_ids):
        vis = visible[offsets[k] : offsets[k + 1]]
        if not vis.any():
            continue
        padded = np.concatenate([[False], vis, [False]])
        flips = np.flatnonzero(padded[1:] != padded[:-1])
        n = counts[k]
        for s, epos in zip(flips[0::2], flips[1::2]):
            segments.append(VisibleSegment(int(e), s / n, epos / n))
    return segments


def render_geometry_lines(segments: list[VisibleSegment], mesh: Mesh,
                          adjacency: EdgeAdjacency, camera: Camera,
                          darkness: float = 0.6) -> IntensityImage:
    """Stamp visible segments as 1 px strokes into a darkness field."""
    w, h = camera.viewport
    img = np.zeros((h, w))
    if segments:
        ev = adjacency.edge_vertices[[s.edge_id for s in segments]]
        a = mesh.vertices[ev[:, 0]]
        d = mesh.vertices[ev[:, 1]] - a
        t0 = np.array([s.t0 for s in segments])
        t1 = np.array([s.t1 for s in segments])
        p0 = a + t0[:, None] * d
        p1 = a + t1[:, None] * d
        x0f, y0f, x1f, y1f, _, _, keep = transforms.prepare_segments(p0, p1, camera)
        for k in np.nonzero(keep)[0]:
            xs, ys = pykernels.line_pixels(
                int(x0f[k]) >> 8, int(y0f[k]) >> 8, int(x1f[k]) >> 8, int(y1f[k]) >> 8
            )
            inb = (xs >= 0) & (xs < w) & (ys >= 0) & (ys < h)
            img[ys[inb], xs[inb]] = darkness
    return IntensityImage(w, h, img)


def edges_to_svg(classified: list[ClassifiedEdge], mesh: Mesh,
                 adjacency: EdgeAdjacency, camera: Camera, path) -> None:
    """Debug overlay: classified edges as colored SVG lines."""
    colors = {"silhouette": "#d04030", "border": "#3060d0", "crease": "#309040"}
    w, h = camera.viewport
    lines = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" '
             f'viewBox="0 0 {w} {h}">']
    if classified:
        ev = adjacency.edge_vertices[[c.edge_id for c in classified]]
        s0, w0 = transforms.project_points(mesh.vertices[ev[:, 0]], camera)
        s1, w1 = transforms.project_points(mesh.vertices[ev[:, 1]], camera)
        for k, c in enumerate(classified):
            if w0[k] <= 0 or w1[k] <= 0:
                continue
            kind = sorted(c.kinds)[0]
            lines.append(
                f'<line x1="{s0[k, 0]:.2f}" y1="{s0[k, 1]:.2f}" '
                f'x2="{s1[k, 0]:.2f}" y2="{s1[k, 1]:.2f}" '
                f'stroke="{colors[kind]}" stroke-width="1"/>'
            )
    lines.append("</svg>")
    with open(path, "w") as fh:
        fh.write("\n".join(lines))
