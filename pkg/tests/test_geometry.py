import struct

import numpy as np
import pytest

from inkwash.fixtures import make_cube, make_icosphere, make_quad, write_obj
from inkwash.geometry import (EdgeAdjacency, Mesh, MeshLoadError, NonManifoldError,
                              build_adjacency, face_orientation, face_orientations,
                              light_from_angles, load_mesh)

import oracles


# --- loading -----------------------------------------------------------------

def test_load_single_triangle_obj(tmp_path):
    p = tmp_path / "tri.obj"
    p.write_text("v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 3\n")
    mesh = load_mesh(p)
    assert mesh.n_vertices == 3
    assert mesh.n_faces == 1
    np.testing.assert_allclose(mesh.face_normal[0], [0, 0, 1], atol=1e-12)
    np.testing.assert_allclose(mesh.face_centroid[0], [1 / 3, 1 / 3, 0], atol=1e-12)


def test_load_cube_obj(tmp_path):
    p = tmp_path / "cube.obj"
    write_obj(make_cube(), p)
    mesh = load_mesh(p)
    assert mesh.n_vertices == 8
    assert mesh.n_faces == 12
    # all normals axis-aligned units
    assert np.all(np.isclose(np.abs(mesh.face_normal).max(axis=1), 1.0))
    assert np.all(np.isclose(np.linalg.norm(mesh.face_normal, axis=1), 1.0))


def test_load_icosphere_counts_cross_checked(tmp_path):
    p = tmp_path / "ico.obj"
    write_obj(make_icosphere(2), p)
    mesh = load_mesh(p)
    n_vertices, n_faces = oracles.minimal_obj_reader(p)
    assert mesh.n_vertices == n_vertices
    assert mesh.n_faces == n_faces
    assert mesh.n_faces == 20 * 4**2


def test_obj_quads_fan_triangulated(tmp_path):
    p = tmp_path / "quad.obj"
    p.write_text("v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nf 1 2 3 4\n")
    mesh = load_mesh(p)
    assert mesh.n_faces == 2


def test_obj_negative_and_slash_indices(tmp_path):
    p = tmp_path / "mix.obj"
    p.write_text(
        "v 0 0 0\nv 1 0 0\nv 0 1 0\n"
        "vt 0 0\nvn 0 0 1\n"
        "f 1/1/1 2/1/1 3/1/1\n"
        "f -3 -2 -1\n"
    )
    mesh = load_mesh(p)
    assert mesh.n_faces == 2
    np.testing.assert_array_equal(mesh.faces[0], mesh.faces[1])


def test_obj_errors(tmp_path):
    with pytest.raises(MeshLoadError, match="not found"):
        load_mesh(tmp_path / "missing.obj")

    bad = tmp_path / "bad.obj"
    bad.write_text("v 0 0\nf 1 2 3\n")
    with pytest.raises(MeshLoadError, match="bad vertex"):
        load_mesh(bad)

    short = tmp_path / "short.obj"
    short.write_text("v 0 0 0\nv 1 0 0\nf 1 2\n")
    with pytest.raises(MeshLoadError, match="fewer than 3"):
        load_mesh(short)

    empty = tmp_path / "empty.obj"
    empty.write_text("v 0 0 0\nv 1 0 0\nv 0 1 0\n")
    with pytest.raises(MeshLoadError, match="no usable faces"):
        load_mesh(empty)

    degen = tmp_path / "degen.obj"
    degen.write_text("v 0 0 0\nv 1 0 0\nv 2 0 0\nf 1 2 3\n")
    with pytest.raises(MeshLoadError, match="no usable faces"):
        load_mesh(degen)


def test_ply_ascii(tmp_path):
    p = tmp_path / "tri.ply"
    p.write_text(
        "ply\nformat ascii 1.0\n"
        "element vertex 3\n"
        "property float x\nproperty float y\nproperty float z\n"
        "element face 1\n"
        "property list uchar int vertex_indices\n"
        "end_header\n"
        "0 0 0\n1 0 0\n0 1 0\n"
        "3 0 1 2\n"
    )
    mesh = load_mesh(p)
    assert mesh.n_vertices == 3
    assert mesh.n_faces == 1


def test_ply_binary_little_endian(tmp_path):
    cube = make_cube()
    p = tmp_path / "cube.ply"
    header = (
        "ply\nformat binary_little_endian 1.0\n"
        f"element vertex {cube.n_vertices}\n"
        "property float x\nproperty float y\nproperty float z\n"
        f"element face {cube.n_faces}\n"
        "property list uchar int vertex_indices\n"
        "end_header\n"
    ).encode("ascii")
    body = b""
    for v in cube.vertices:
        body += struct.pack("<3f", *v)
    for f in cube.faces:
        body += struct.pack("<B3i", 3, *f)
    p.write_bytes(header + body)
    mesh = load_mesh(p)
    assert mesh.n_vertices == 8
    assert mesh.n_faces == 12
    np.testing.assert_allclose(mesh.vertices, cube.vertices, atol=1e-6)


def test_ply_quad_faces_triangulated(tmp_path):
    p = tmp_path / "quad.ply"
    p.write_text(
        "ply\nformat ascii 1.0\n"
        "element vertex 4\n"
        "property float x\nproperty float y\nproperty float z\n"
        "element face 1\n"
        "property list uchar int vertex_indices\n"
        "end_header\n"
        "0 0 0\n1 0 0\n1 1 0\n0 1 0\n"
        "4 0 1 2 3\n"
    )
    assert load_mesh(p).n_faces == 2


# --- adjacency ---------------------------------------------------------------

def test_adjacency_cube_brute_force(cube):
    adj = build_adjacency(cube)
    oracle = oracles.brute_force_edges(cube)
    assert adj.n_edges == 18
    assert adj.n_edges == len(oracle)
    for e in range(adj.n_edges):
        key = tuple(sorted(adj.edge_vertices[e].tolist()))
        faces = set(adj.edge_faces[e].tolist()) - {-1}
        assert faces == set(oracle[key])
    assert adj.interior_mask().all()
    # Euler bookkeeping for a closed mesh: E = 3F/2
    assert adj.n_edges * 2 == 3 * cube.n_faces


def test_adjacency_single_triangle():
    mesh = Mesh(vertices=np.array([[0., 0, 0], [1, 0, 0], [0, 1, 0]]),
                faces=np.array([[0, 1, 2]], dtype=np.int32))
    adj = build_adjacency(mesh)
    assert adj.n_edges == 3
    assert adj.border_mask().all()


def test_adjacency_quad(quad):
    adj = build_adjacency(quad)
    assert adj.n_edges == 5
    assert int(adj.border_mask().sum()) == 4
    assert int(adj.interior_mask().sum()) == 1


def test_adjacency_face_order_independent(cube):
    rng = np.random.default_rng(7)
    perm = rng.permutation(cube.n_faces)
    shuffled = Mesh(vertices=cube.vertices, faces=cube.faces[perm])
    a = build_adjacency(cube)
    b = build_adjacency(shuffled)
    assert np.array_equal(a.edge_vertices, b.edge_vertices)
    assert np.array_equal(a.border_mask(), b.border_mask())


def test_adjacency_non_manifold_error():
    vertices = np.array([[0., 0, 0], [1, 0, 0], [0, 1, 0], [0, 0, 1], [0, -1, 0]])
    faces = np.array([[0, 1, 2], [0, 1, 3], [0, 1, 4]], dtype=np.int32)
    with pytest.raises(NonManifoldError, match="3 adjacent faces"):
        build_adjacency(Mesh(vertices=vertices, faces=faces))


# --- orientation -------------------------------------------------------------

def test_face_orientation_examples():
    mesh = Mesh(vertices=np.array([[-1., -1, 0], [1, -1, 0], [0, 1, 0]]),
                faces=np.array([[0, 1, 2]], dtype=np.int32))
    # normal (0,0,1), centroid (0,-1/3,0)
    np.testing.assert_allclose(mesh.face_normal[0], [0, 0, 1], atol=1e-12)
    v = face_orientation(0, mesh, np.array([0.0, -1 / 3, 5.0]))
    assert v == pytest.approx(-5.0)
    v = face_orientation(0, mesh, np.array([0.0, -1 / 3, -5.0]))
    assert v == pytest.approx(5.0)
    # perpendicular: value exactly 0 classifies back-facing
    side = Mesh(vertices=np.array([[0., -1, -1], [0, 1, -1], [0, 0, 1]]),
                faces=np.array([[0, 1, 2]], dtype=np.int32))
    centroid = side.face_centroid[0]
    cam = centroid + np.array([0.0, 0.0, 5.0]) * 0  # stay in the plane
    cam = centroid + np.cross(side.face_normal[0], [0, 1, 0]) * 3
    value = face_orientation(0, side, cam)
    assert value == pytest.approx(0.0, abs=1e-12)
    assert not (value < 0)  # back-facing by tie-break


def test_face_orientation_translation_covariant(icosphere):
    rng = np.random.default_rng(3)
    cam = np.array([0.5, 1.5, 4.0])
    offset = rng.normal(size=3) * 10
    moved = Mesh(vertices=icosphere.vertices + offset, faces=icosphere.faces)
    a = face_orientations(icosphere, cam)
    b = face_orientations(moved, cam + offset)
    np.testing.assert_allclose(a, b, atol=1e-9)


# --- light -------------------------------------------------------------------

def test_light_from_angles_components():
    light = light_from_angles(45.0, 45.0)
    assert light.direction[1] == pytest.approx(np.sin(np.radians(45)), abs=1e-12)
    assert np.linalg.norm(light.direction) == pytest.approx(1.0, abs=1e-12)


def test_light_straight_down():
    light = light_from_angles(0.0, 90.0)
    np.testing.assert_allclose(light.direction, [0, 1, 0], atol=1e-12)
    # straight-down light: zero-length planar shadow for a vertical pole
    horiz = np.hypot(light.direction[0], light.direction[2])
    assert horiz == pytest.approx(0.0, abs=1e-12)


def test_light_shadow_length_is_cot_elevation():
    # pole of height h: planar shadow length = h * cot(elevation)
    for elev in (30.0, 45.0, 60.0):
        light = light_from_angles(120.0, elev)
        horiz = np.hypot(light.direction[0], light.direction[2])
        ratio = horiz / light.direction[1]
        assert ratio == pytest.approx(1.0 / np.tan(np.radians(elev)), abs=1e-12)
    assert light_from_angles(0.0, 45.0).direction[1] == pytest.approx(
        np.cos(np.radians(45)))  # 45 deg: length equals height


def test_light_elevation_range():
    with pytest.raises(ValueError):
        light_from_angles(0.0, 0.0)
    with pytest.raises(ValueError):
        light_from_angles(0.0, 91.0)
