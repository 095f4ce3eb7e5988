"""Procedural fixture meshes for tests, benchmarks and the pole scene.

All closed solids are emitted with counter-clockwise windings seen from
outside, i.e. outward face normals.
"""

from __future__ import annotations

import numpy as np

from .geometry import Mesh


def _orient_outward(vertices: np.ndarray, faces: np.ndarray, center=None) -> np.ndarray:
    """Flip windings so face normals point away from the centroid (convex)."""
    vertices = np.asarray(vertices, dtype=np.float64)
    faces = np.asarray(faces, dtype=np.int32).copy()
    if center is None:
        center = vertices.mean(axis=0)
    a, b, c = (vertices[faces[:, i]] for i in range(3))
    normals = np.cross(b - a, c - a)
    outward = np.einsum("ij,ij->i", normals, (a + b + c) / 3.0 - center)
    flip = outward < 0
    faces[flip] = faces[flip][:, [0, 2, 1]]
    return faces


def make_triangle() -> Mesh:
    """Single triangle in the z=0 plane with normal +z."""
    v = np.array([[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]])
    return Mesh(vertices=v, faces=np.array([[0, 1, 2]], dtype=np.int32))


def make_quad(size: float = 1.0, z: float = 0.0) -> Mesh:
    """Two triangles sharing a diagonal; normals +z."""
    s = size / 2.0
    v = np.array([[-s, -s, z], [s, -s, z], [s, s, z], [-s, s, z]])
    f = np.array([[0, 1, 2], [0, 2, 3]], dtype=np.int32)
    return Mesh(vertices=v, faces=f)


def make_cube(size: float = 1.0) -> Mesh:
    """Axis-aligned cube as 12 triangles, 8 vertices, outward normals."""
    s = size / 2.0
    v = np.array([
        [-s, -s, -s], [s, -s, -s], [s, s, -s], [-s, s, -s],
        [-s, -s, s], [s, -s, s], [s, s, s], [-s, s, s],
    ])
    f = np.array([
        [4, 5, 6], [4, 6, 7],  # +z
        [1, 0, 3], [1, 3, 2],  # -z
        [5, 1, 2], [5, 2, 6],  # +x
        [0, 4, 7], [0, 7, 3],  # -x
        [3, 7, 6], [3, 6, 2],  # +y
        [0, 1, 5], [0, 5, 4],  # -y
    ], dtype=np.int32)
    return Mesh(vertices=v, faces=f)


def make_tetrahedron(size: float = 1.0) -> Mesh:
    """Regular tetrahedron centered at the origin."""
    v = np.array([
        [1.0, 1.0, 1.0], [1.0, -1.0, -1.0], [-1.0, 1.0, -1.0], [-1.0, -1.0, 1.0],
    ]) * (size / np.sqrt(3.0))
    f = np.array([[0, 1, 2], [0, 1, 3], [0, 2, 3], [1, 2, 3]], dtype=np.int32)
    return Mesh(vertices=v, faces=_orient_outward(v, f))


def make_icosphere(subdivisions: int = 2, radius: float = 1.0) -> Mesh:
    """Icosahedron subdivided `subdivisions` times, projected to a sphere."""
    t = (1.0 + np.sqrt(5.0)) / 2.0
    v = np.array([
        [-1, t, 0], [1, t, 0], [-1, -t, 0], [1, -t, 0],
        [0, -1, t], [0, 1, t], [0, -1, -t], [0, 1, -t],
        [t, 0, -1], [t, 0, 1], [-t, 0, -1], [-t, 0, 1],
    ], dtype=np.float64)
    v /= np.linalg.norm(v, axis=1)[:, None]
    f = [
        (0, 11, 5), (0, 5, 1), (0, 1, 7), (0, 7, 10), (0, 10, 11),
        (1, 5, 9), (5, 11, 4), (11, 10, 2), (10, 7, 6), (7, 1, 8),
        (3, 9, 4), (3, 4, 2), (3, 2, 6), (3, 6, 8), (3, 8, 9),
        (4, 9, 5), (2, 4, 11), (6, 2, 10), (8, 6, 7), (9, 8, 1),
    ]
    verts = [tuple(p) for p in v]
    index = {p: i for i, p in enumerate(verts)}

    def midpoint(i, j):
        m = np.asarray(verts[i]) + np.asarray(verts[j])
        m /= np.linalg.norm(m)
        key = tuple(m)
        if key not in index:
            index[key] = len(verts)
            verts.append(key)
        return index[key]

    for _ in range(subdivisions):
        nxt = []
        for a, b, c in f:
            ab, bc, ca = midpoint(a, b), midpoint(b, c), midpoint(c, a)
            nxt += [(a, ab, ca), (b, bc, ab), (c, ca, bc), (ab, bc, ca)]
        f = nxt

    vertices = np.asarray(verts) * radius
    faces = _orient_outward(vertices, np.asarray(f, dtype=np.int32))
    return Mesh(vertices=vertices, faces=faces)


def make_uv_sphere(stacks: int, slices: int, radius: float = 1.0) -> Mesh:
    """Latitude/longitude sphere with 2 * slices * (stacks - 1) triangles."""
    if stacks < 2 or slices < 3:
        raise ValueError("need stacks >= 2 and slices >= 3")
    phis = np.linspace(0.0, np.pi, stacks + 1)
    thetas = np.linspace(0.0, 2.0 * np.pi, slices, endpoint=False)
    rows = [np.array([[0.0, radius, 0.0]])]
    for phi in phis[1:-1]:
        y = radius * np.cos(phi)
        r = radius * np.sin(phi)
        rows.append(np.column_stack([
            r * np.cos(thetas), np.full(slices, y), r * np.sin(thetas),
        ]))
    rows.append(np.array([[0.0, -radius, 0.0]]))
    vertices = np.concatenate(rows)

    def ring_start(i):
        return 1 + (i - 1) * slices

    faces = []
    for j in range(slices):  # top cap
        faces.append((0, ring_start(1) + j, ring_start(1) + (j + 1) % slices))
    for i in range(1, stacks - 1):
        a, b = ring_start(i), ring_start(i + 1)
        for j in range(slices):
            jn = (j + 1) % slices
            faces.append((a + j, b + j, b + jn))
            faces.append((a + j, b + jn, a + jn))
    bottom = len(vertices) - 1
    a = ring_start(stacks - 1)
    for j in range(slices):
        faces.append((bottom, a + (j + 1) % slices, a + j))
    faces = _orient_outward(vertices, np.asarray(faces, dtype=np.int32))
    return Mesh(vertices=vertices, faces=faces)


def make_grid_plane(n: int = 4, size: float = 2.0, y: float = 0.0) -> Mesh:
    """Flat triangulated grid in the x-z plane, normals +y."""
    xs = np.linspace(-size / 2.0, size / 2.0, n + 1)
    vertices = np.array([[x, y, z] for z in xs for x in xs])
    faces = []
    for r in range(n):
        for c in range(n):
            i = r * (n + 1) + c
            faces.append((i, i + 1, i + n + 2))
            faces.append((i, i + n + 2, i + n + 1))
    f = np.asarray(faces, dtype=np.int32)
    a, b, c = (vertices[f[:, i]] for i in range(3))
    up = np.cross(b - a, c - a)[:, 1] < 0
    f[up] = f[up][:, [0, 2, 1]]
    return Mesh(vertices=vertices, faces=f)


def make_box(lo, hi, omit_bottom: bool = False) -> Mesh:
    """Axis-aligned box between corners lo and hi, outward normals."""
    lo = np.asarray(lo, dtype=np.float64)
    hi = np.asarray(hi, dtype=np.float64)
    cube = make_cube(1.0)
    vertices = (cube.vertices + 0.5) * (hi - lo) + lo
    faces = cube.faces
    if omit_bottom:
        keep = [i for i in range(len(faces))
                if not np.allclose(vertices[faces[i]][:, 1], lo[1])]
        faces = faces[keep]
    return Mesh(vertices=vertices, faces=faces)


def merge_meshes(*meshes: Mesh) -> Mesh:
    vertices = []
    faces = []
    offset = 0
    for m in meshes:
        vertices.append(m.vertices)
        faces.append(m.faces + offset)
        offset += len(m.vertices)
    return Mesh(vertices=np.concatenate(vertices), faces=np.concatenate(faces))


def make_prism(radius: float, height: float, sides: int = 16,
               open_bottom: bool = True) -> Mesh:
    """Vertical regular prism from y=0 to y=height, outward normals."""
    angles = np.arange(sides) * (2.0 * np.pi / sides)
    ring = np.column_stack([radius * np.cos(angles), np.zeros(sides),
                            radius * np.sin(angles)])
    bottom = ring.copy()
    top = ring.copy()
    top[:, 1] = height
    vertices = [bottom, top, np.array([[0.0, height, 0.0]])]
    if not open_bottom:
        vertices.append(np.array([[0.0, 0.0, 0.0]]))
    vertices = np.concatenate(vertices)
    top_center = 2 * sides
    faces = []
    for j in range(sides):
        jn = (j + 1) % sides
        faces.append((j, sides + j, sides + jn))
        faces.append((j, sides + jn, jn))
        faces.append((top_center, sides + j, sides + jn))
        if not open_bottom:
            faces.append((top_center + 1, jn, j))
    f = np.asarray(faces, dtype=np.int32)
    a, b, c = (vertices[f[:, i]] for i in range(3))
    normals = np.cross(b - a, c - a)
    centroids = (a + b + c) / 3.0
    outward = np.einsum("ij,ij->i", normals, centroids - np.array([0.0, height / 2.0, 0.0]))
    f[outward < 0] = f[outward < 0][:, [0, 2, 1]]
    return Mesh(vertices=vertices, faces=f)


def make_pole_on_plane(height: float = 1.0, pole_radius: float = 0.08,
                       plane_half: float = 3.0):
    """Round pole standing on a ground quad; the shadow-ratio scene.

    The circular cross-section keeps the pole's own shadow reach equal to its
    radius for every light azimuth, so the shadow-length metric can correct
    for it exactly. Returns (mesh, descriptor).
    """
    plane = make_quad(size=plane_half * 2.0)
    # make_quad lies in z=0 facing +z; rotate to y=0 facing +y.
    rot = plane.vertices[:, [0, 2, 1]].copy()
    rot[:, 2] *= -1.0
    plane = Mesh(vertices=rot, faces=plane.faces)
    pole = make_prism(pole_radius, height, sides=16, open_bottom=True)
    mesh = merge_meshes(plane, pole)
    descriptor = {
        "pole_base": (0.0, 0.0, 0.0),
        "pole_height": height,
        "pole_radius": pole_radius,
        "plane_y": 0.0,
        "plane_half": plane_half,
    }
    return mesh, descriptor


def pole_camera(mesh: Mesh, viewport: tuple[int, int]):
    """Elevated view that keeps the whole pole fixture and its shadow framed."""
    from .transforms import auto_camera

    return auto_camera(mesh, viewport, direction=np.array([-0.45, 0.9, -0.45]))


def write_obj(mesh: Mesh, path) -> None:
    """Plain v/f OBJ dump for fixture files and demos."""
    with open(path, "w") as fh:
        for v in mesh.vertices:
            fh.write(f"v {v[0]:.9g} {v[1]:.9g} {v[2]:.9g}\n")
        for f in mesh.faces:
            fh.write(f"f {f[0] + 1} {f[1] + 1} {f[2] + 1}\n")
