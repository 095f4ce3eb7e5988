"""Mesh, camera and light primitives.

Coordinate conventions
----------------------
World space is right-handed with +y up; the ground plane is the x-z plane.
Cameras look from `position` toward `look_at`; the view basis is right-handed
with the camera looking down its local -z axis. Face normals follow the
counter-clockwise winding stored in the file, so a closed mesh with CCW
windings when seen from outside carries outward normals.

A face is classified front-facing when

    n_face . (centroid_face - camera_position) < 0

i.e. the outward normal points back toward the camera. Values of exactly
zero (grazing faces) are classified back-facing so that an edge between a
front face and a grazing face still reads as part of the outline.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

DEGENERATE_AREA_EPS = 1e-12


class MeshLoadError(ValueError):
    """Raised for unreadable or structurally invalid mesh files."""


class NonManifoldError(ValueError):
    """Raised when an edge has three or more adjacent faces."""


def vec3(x: float, y: float, z: float) -> np.ndarray:
    return np.array([x, y, z], dtype=np.float64)


def normalize(v: np.ndarray) -> np.ndarray:
    n = float(np.linalg.norm(v))
    if n == 0.0:
        raise ValueError("cannot normalize zero vector")
    return v / n


@dataclass
class Mesh:
    """Indexed triangle soup with per-face derived quantities.

    vertices: (N, 3) float64, faces: (M, 3) int32. face_normal holds unit
    normals, face_centroid the triangle barycenters; both are computed at
    construction from the stored winding.
    """

    vertices: np.ndarray
    faces: np.ndarray
    face_normal: np.ndarray = field(default=None, repr=False)
    face_centroid: np.ndarray = field(default=None, repr=False)
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        self.vertices = np.ascontiguousarray(self.vertices, dtype=np.float64)
        self.faces = np.ascontiguousarray(self.faces, dtype=np.int32)
        if self.faces.ndim != 2 or self.faces.shape[1] != 3:
            raise MeshLoadError("faces must be an (M, 3) index array")
        if self.faces.size and (
            self.faces.min() < 0 or self.faces.max() >= len(self.vertices)
        ):
            raise MeshLoadError("face index out of range")
        if self.face_normal is None:
            self.face_normal, self.face_centroid = _face_quantities(
                self.vertices, self.faces
            )

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def n_faces(self) -> int:
        return len(self.faces)

    def bounding_sphere(self) -> tuple[np.ndarray, float]:
        """Center and radius of an axis-aligned bounding-box sphere."""
        lo = self.vertices.min(axis=0)
        hi = self.vertices.max(axis=0)
        center = 0.5 * (lo + hi)
        radius = float(np.linalg.norm(self.vertices - center, axis=1).max())
        return center, max(radius, 1e-9)


def _face_quantities(vertices: np.ndarray, faces: np.ndarray):
    a = vertices[faces[:, 0]]
    b = vertices[faces[:, 1]]
    c = vertices[faces[:, 2]]
    cross = np.cross(b - a, c - a)
    norms = np.linalg.norm(cross, axis=1)
    if np.any(norms <= DEGENERATE_AREA_EPS):
        raise MeshLoadError("degenerate (zero-area) face present")
    normals = cross / norms[:, None]
    centroids = (a + b + c) / 3.0
    return normals, centroids


def _drop_degenerate_faces(vertices: np.ndarray, faces: np.ndarray) -> np.ndarray:
    """Remove zero-area and repeated-index faces (load-time cleanup)."""
    if len(faces) == 0:
        return faces
    distinct = (
        (faces[:, 0] != faces[:, 1])
        & (faces[:, 1] != faces[:, 2])
        & (faces[:, 0] != faces[:, 2])
    )
    faces = faces[distinct]
    if len(faces) == 0:
        return faces
    a = vertices[faces[:, 0]]
    b = vertices[faces[:, 1]]
    c = vertices[faces[:, 2]]
    area2 = np.linalg.norm(np.cross(b - a, c - a), axis=1)
    return faces[area2 > DEGENERATE_AREA_EPS]


@dataclass
class EdgeAdjacency:
    """Undirected edge list with adjacent faces.

    edge_vertices: (E, 2) int32 with v0 < v1; edge_faces: (E, 2) int32 where
    the second entry is -1 for border edges. Edges with three or more
    adjacent faces are rejected at construction.
    """

    edge_vertices: np.ndarray
    edge_faces: np.ndarray

    @property
    def n_edges(self) -> int:
        return len(self.edge_vertices)

    def interior_mask(self) -> np.ndarray:
        return self.edge_faces[:, 1] >= 0

    def border_mask(self) -> np.ndarray:
        return self.edge_faces[:, 1] < 0


def build_adjacency(mesh: Mesh) -> EdgeAdjacency:
    """Collect every undirected edge once with its 1 or 2 adjacent faces."""
    faces = mesh.faces.astype(np.int64)
    m = len(faces)
    pairs = np.empty((3 * m, 2), dtype=np.int64)
    pairs[0::3] = faces[:, [0, 1]]
    pairs[1::3] = faces[:, [1, 2]]
    pairs[2::3] = faces[:, [2, 0]]
    pairs.sort(axis=1)
    owner = np.repeat(np.arange(m, dtype=np.int64), 3)

    keys = pairs[:, 0] * len(mesh.vertices) + pairs[:, 1]
    order = np.argsort(keys, kind="stable")
    keys_sorted = keys[order]
    uniq_keys, start, counts = np.unique(
        keys_sorted, return_index=True, return_counts=True
    )

    bad = counts > 2
    if np.any(bad):
        k = int(uniq_keys[np.argmax(bad)])
        v0, v1 = divmod(k, len(mesh.vertices))
        raise NonManifoldError(
            f"edge ({v0}, {v1}) between {mesh.vertices[v0].tolist()} and "
            f"{mesh.vertices[v1].tolist()} has {int(counts[np.argmax(bad)])} adjacent faces"
        )

    e = len(uniq_keys)
    edge_vertices = np.empty((e, 2), dtype=np.int32)
    edge_vertices[:, 0] = uniq_keys // len(mesh.vertices)
    edge_vertices[:, 1] = uniq_keys % len(mesh.vertices)
    edge_faces = np.full((e, 2), -1, dtype=np.int32)
    owner_sorted = owner[order]
    edge_faces[:, 0] = owner_sorted[start]
    second = counts == 2
    edge_faces[second, 1] = owner_sorted[start[second] + 1]
    return EdgeAdjacency(edge_vertices=edge_vertices, edge_faces=edge_faces)


@dataclass
class Camera:
    """Pinhole or orthographic camera with an integer pixel viewport."""

    position: np.ndarray
    look_at: np.ndarray
    up: np.ndarray
    viewport: tuple[int, int]
    projection: str = "perspective"  # or "orthographic"
    fov_y_deg: float = 40.0
    half_height: float = 1.0  # world units, orthographic only
    near: float = 0.1
    far: float = 100.0

    def __post_init__(self):
        self.position = np.asarray(self.position, dtype=np.float64)
        self.look_at = np.asarray(self.look_at, dtype=np.float64)
        self.up = np.asarray(self.up, dtype=np.float64)
        w, h = self.viewport
        if w < 16 or h < 16:
            raise ValueError("viewport dimensions must be >= 16 px")
        if not (0.0 < self.near < self.far):
            raise ValueError("require 0 < near < far")
        if self.projection == "perspective":
            if not (1.0 < self.fov_y_deg < 179.0):
                raise ValueError("fov_y must lie in (1, 179) degrees")
        elif self.projection == "orthographic":
            if self.half_height <= 0:
                raise ValueError("orthographic half_height must be positive")
        else:
            raise ValueError(f"unknown projection {self.projection!r}")
        if np.allclose(self.position, self.look_at):
            raise ValueError("camera position coincides with look_at")

    @property
    def width(self) -> int:
        return self.viewport[0]

    @property
    def height(self) -> int:
        return self.viewport[1]

    @property
    def aspect(self) -> float:
        return self.viewport[0] / self.viewport[1]


@dataclass
class DirectionalLight:
    """Directional light; `direction` is a unit vector pointing at the light."""

    azimuth_deg: float
    elevation_deg: float
    direction: np.ndarray

    def __post_init__(self):
        self.direction = np.asarray(self.direction, dtype=np.float64)
        n = np.linalg.norm(self.direction)
        if abs(n - 1.0) > 1e-6:
            raise ValueError("light direction must be unit length")


def light_from_angles(azimuth_deg: float, elevation_deg: float) -> DirectionalLight:
    """Directional light from an in-image azimuth and ground-plane elevation.

    Elevation is measured up from the x-z ground plane, azimuth rotates the
    horizontal component from +x toward +z. At 45 degrees elevation a
    vertical pole of height h casts a planar shadow of length h.
    """
    if not (0.0 < elevation_deg <= 90.0):
        raise ValueError("elevation must lie in (0, 90] degrees")
    az = math.radians(azimuth_deg)
    el = math.radians(elevation_deg)
    direction = vec3(
        math.cos(el) * math.cos(az),
        math.sin(el),
        math.cos(el) * math.sin(az),
    )
    direction /= np.linalg.norm(direction)
    return DirectionalLight(azimuth_deg, elevation_deg, direction)


def face_orientation(face: int, mesh: Mesh, camera_position: np.ndarray) -> float:
    """Signed orientation value n . (centroid - camera); < 0 is front-facing."""
    n = mesh.face_normal[face]
    c = mesh.face_centroid[face]
    return float(np.dot(n, c - np.asarray(camera_position, dtype=np.float64)))


def face_orientations(mesh: Mesh, camera_position: np.ndarray) -> np.ndarray:
    """Vectorized face_orientation for every face."""
    p = np.asarray(camera_position, dtype=np.float64)
    return np.einsum("ij,ij->i", mesh.face_normal, mesh.face_centroid - p)


def front_facing(mesh: Mesh, camera_position: np.ndarray) -> np.ndarray:
    """Boolean front-face mask; grazing faces (value 0) are back-facing."""
    return face_orientations(mesh, camera_position) < 0.0


# ---------------------------------------------------------------------------
# File loading


def load_mesh(path) -> Mesh:
    """Load an OBJ or PLY triangle mesh; quads and larger polygons are
    fan-triangulated, degenerate faces dropped."""
    p = Path(path)
    if not p.exists():
        raise MeshLoadError(f"mesh file not found: {p}")
    suffix = p.suffix.lower()
    if suffix == ".obj":
        vertices, faces = _parse_obj(p)
    elif suffix == ".ply":
        vertices, faces = _parse_ply(p)
    else:
        raise MeshLoadError(f"unsupported mesh format {suffix!r}")
    vertices = np.asarray(vertices, dtype=np.float64).reshape(-1, 3)
    faces = np.asarray(faces, dtype=np.int32).reshape(-1, 3)
    if faces.size and (faces.min() < 0 or faces.max() >= len(vertices)):
        raise MeshLoadError(f"face index out of range in {p.name}")
    faces = _drop_degenerate_faces(vertices, faces)
    if len(faces) == 0:
        raise MeshLoadError(f"no usable faces in {p.name}")
    return Mesh(vertices=vertices, faces=faces)


def _fan_triangulate(indices: list[int], lineno: int, path: Path) -> list[tuple]:
    if len(indices) < 3:
        raise MeshLoadError(f"{path.name}:{lineno}: face with fewer than 3 vertices")
    return [(indices[0], indices[i], indices[i + 1]) for i in range(1, len(indices) - 1)]


def _parse_obj(path: Path):
    vertices: list[tuple] = []
    faces: list[tuple] = []
    with open(path, "r", errors="replace") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            tokens = line.split()
            if tokens[0] == "v":
                try:
                    vertices.append(tuple(float(t) for t in tokens[1:4]))
                except (ValueError, IndexError):
                    raise MeshLoadError(f"{path.name}:{lineno}: bad vertex record")
                if len(tokens) < 4:
                    raise MeshLoadError(f"{path.name}:{lineno}: bad vertex record")
            elif tokens[0] == "f":
                idx = []
                for t in tokens[1:]:
                    try:
                        i = int(t.split("/")[0])
                    except ValueError:
                        raise MeshLoadError(f"{path.name}:{lineno}: bad face record")
                    # OBJ indices are 1-based; negatives count from the end.
                    idx.append(i - 1 if i > 0 else len(vertices) + i)
                faces.extend(_fan_triangulate(idx, lineno, path))
    return vertices, faces


_PLY_SCALARS = {
    "char": ("b", 1), "int8": ("b", 1),
    "uchar": ("B", 1), "uint8": ("B", 1),
    "short": ("h", 2), "int16": ("h", 2),
    "ushort": ("H", 2), "uint16": ("H", 2),
    "int": ("i", 4), "int32": ("i", 4),
    "uint": ("I", 4), "uint32": ("I", 4),
    "float": ("f", 4), "float32": ("f", 4),
    "double": ("d", 8), "float64": ("d", 8),
}


def _parse_ply(path: Path):
    with open(path, "rb") as fh:
        if fh.readline().strip() != b"ply":
            raise MeshLoadError(f"{path.name}: missing ply magic")
        fmt = None
        elements = []  # (name, count, [(prop_name, type) or ('list', count_t, item_t, name)])
        while True:
            line = fh.readline()
            if not line:
                raise MeshLoadError(f"{path.name}: unterminated header")
            tokens = line.decode("ascii", errors="replace").split()
            if not tokens:
                continue
            if tokens[0] == "format":
                fmt = tokens[1]
            elif tokens[0] == "element":
                elements.append((tokens[1], int(tokens[2]), []))
            elif tokens[0] == "property":
                if not elements:
                    raise MeshLoadError(f"{path.name}: property before element")
                if tokens[1] == "list":
                    elements[-1][2].append(("list", tokens[2], tokens[3], tokens[4]))
                else:
                    elements[-1][2].append((tokens[2], tokens[1]))
            elif tokens[0] == "end_header":
                break
        if fmt not in ("ascii", "binary_little_endian"):
            raise MeshLoadError(f"{path.name}: unsupported ply format {fmt!r}")
        if fmt == "ascii":
            return _parse_ply_ascii(fh, elements, path)
        return _parse_ply_binary(fh, elements, path)


def _vertex_prop_indices(props, path: Path):
    names = [p[0] for p in props]
    try:
        return names.index("x"), names.index("y"), names.index("z")
    except ValueError:
        raise MeshLoadError(f"{path.name}: vertex element lacks x/y/z")


def _parse_ply_ascii(fh, elements, path: Path):
    vertices, faces = [], []
    text = fh.read().decode("ascii", errors="replace").split("\n")
    cursor = 0
    for name, count, props in elements:
        if name == "vertex":
            ix, iy, iz = _vertex_prop_indices(props, path)
            for _ in range(count):
                tokens = text[cursor].split()
                cursor += 1
                try:
                    vertices.append((float(tokens[ix]), float(tokens[iy]), float(tokens[iz])))
                except (ValueError, IndexError):
                    raise MeshLoadError(f"{path.name}: bad vertex record")
            continue
        if name == "face":
            for _ in range(count):
                tokens = text[cursor].split()
                cursor += 1
                try:
                    n = int(tokens[0])
                    idx = [int(t) for t in tokens[1 : 1 + n]]
                except (ValueError, IndexError):
                    raise MeshLoadError(f"{path.name}: bad face record")
                faces.extend(_fan_triangulate(idx, cursor, path))
            continue
        cursor += count  # skip unknown elements
    return vertices, faces


def _parse_ply_binary(fh, elements, path: Path):
    vertices, faces = [], []
    for name, count, props in elements:
        if name == "vertex":
            fmt = "<" + "".join(_PLY_SCALARS[t][0] for _, t in props)
            size = struct.calcsize(fmt)
            ix, iy, iz = _vertex_prop_indices(props, path)
            raw = fh.read(size * count)
            if len(raw) < size * count:
                raise MeshLoadError(f"{path.name}: truncated vertex data")
            for rec in struct.iter_unpack(fmt, raw):
                vertices.append((rec[ix], rec[iy], rec[iz]))
        elif name == "face":
            if len(props) != 1 or props[0][0] != "list":
                raise MeshLoadError(f"{path.name}: unsupported face properties")
            _, count_t, item_t, _ = props[0]
            cfmt, csize = _PLY_SCALARS[count_t]
            ifmt, isize = _PLY_SCALARS[item_t]
            for fi in range(count):
                raw = fh.read(csize)
                if len(raw) < csize:
                    raise MeshLoadError(f"{path.name}: truncated face data")
                n = struct.unpack("<" + cfmt, raw)[0]
                raw = fh.read(isize * n)
                if len(raw) < isize * n:
                    raise MeshLoadError(f"{path.name}: truncated face data")
                idx = list(struct.unpack(f"<{n}{ifmt}", raw))
                faces.extend(_fan_triangulate(idx, fi, path))
        else:
            # Unknown binary elements are only skippable when fixed-size.
            if any(p[0] == "list" for p in props):
                raise MeshLoadError(f"{path.name}: cannot skip list element {name!r}")
            fmt = "<" + "".join(_PLY_SCALARS[t][0] for _, t in props)
            fh.read(struct.calcsize(fmt) * count)
    return vertices, faces
