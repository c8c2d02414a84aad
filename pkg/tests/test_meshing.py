from collections import Counter

import numpy as np
import pytest

import spelunk as sp
from spelunk.errors import ResolutionTooSmall
from spelunk.mc_tables import CORNERS, EDGES, EDGE_TABLE, TRI_TABLE
from spelunk.meshing import extract_mesh, extract_mesh_dense
from spelunk.network import DenseLayer, NetworkSpec, count_evals
from spelunk.spatial import AABB

BOUNDS = AABB(np.full(3, -1.0), np.full(3, 1.0))

# grid-aligned boxes put corner samples exactly on the surface; an offset
# center keeps the fixtures generic
OFFSET = np.array([0.031, 0.017, -0.023])


@pytest.fixture(scope="module")
def offset_box():
    return sp.build_box_oracle(OFFSET, 0.5)


def canonical_triangles(mesh, decimals=12):
    return sorted(
        tuple(sorted(map(tuple, np.round(mesh.vertices[t], decimals))))
        for t in mesh.triangles
    )


class TestTables:
    def test_used_edges_match_sign_changes(self):
        for case in range(256):
            inside = [(case >> i) & 1 for i in range(8)]
            crossed = {e for e, (a, b) in enumerate(EDGES) if inside[a] != inside[b]}
            used = {e for tri in TRI_TABLE[case] for e in tri}
            assert used == crossed
            assert EDGE_TABLE[case] == sum(1 << e for e in crossed)

    def test_complementary_cases_share_edges(self):
        for case in range(256):
            a = {e for tri in TRI_TABLE[case] for e in tri}
            b = {e for tri in TRI_TABLE[255 - case] for e in tri}
            assert a == b

    def test_triangle_counts(self):
        counts = Counter(len(TRI_TABLE[c]) for c in range(256))
        assert counts[0] == 2  # empty and full cubes only
        assert max(counts) <= 5


class TestExtraction:
    def test_empty_mesh_for_constant_field(self):
        net = NetworkSpec(3, (DenseLayer(np.zeros((1, 3)), np.array([1.0])),))
        mesh = extract_mesh(net, BOUNDS, 4)
        assert len(mesh.vertices) == 0 and len(mesh.triangles) == 0

    def test_resolution_too_small(self, offset_box):
        with pytest.raises(ResolutionTooSmall):
            extract_mesh(offset_box, BOUNDS, 3)

    def test_matches_dense(self, offset_box, trained_nets):
        for net in (offset_box, trained_nets[0]):
            dense = extract_mesh_dense(net, BOUNDS, 5)
            hier = extract_mesh(net, BOUNDS, 5)
            assert canonical_triangles(dense) == canonical_triangles(hier)

    def test_vertices_on_surface(self, offset_box):
        mesh = extract_mesh(offset_box, BOUNDS, 5)
        from spelunk.network import box_sdf

        vals = np.abs(box_sdf(OFFSET, 0.5, mesh.vertices))
        cell = 2.0 / 2**5
        # edges crossing a gradient-region boundary interpolate inexactly,
        # bounded by the cell size; face-interior edges are exact
        assert np.max(vals) <= cell
        assert np.median(vals) <= 1e-9

    def test_watertight_and_measures(self, offset_box):
        mesh = extract_mesh(offset_box, BOUNDS, 5)
        v, t = mesh.vertices, mesh.triangles
        directed = Counter()
        for a, b, c in t:
            for e in ((a, b), (b, c), (c, a)):
                directed[e] += 1
        assert all(directed[(b, a)] == n for (a, b), n in directed.items())
        v0, v1, v2 = v[t[:, 0]], v[t[:, 1]], v[t[:, 2]]
        volume = np.einsum("ij,ij->", v0, np.cross(v1, v2)) / 6.0
        area = 0.5 * np.linalg.norm(np.cross(v1 - v0, v2 - v0), axis=1).sum()
        assert abs(volume - 1.0) <= 0.01
        # sharp box edges staircase at cell scale: ~12 edges x cell of slack
        assert abs(area - 6.0) <= 12 * (2.0 / 2**5) * 0.5

    def test_skips_empty_space(self, offset_box):
        with count_evals() as dense_count:
            extract_mesh_dense(offset_box, BOUNDS, 5)
        with count_evals() as hier_count:
            extract_mesh(offset_box, BOUNDS, 5)
        assert hier_count.count < dense_count.count

    def test_deterministic(self, offset_box):
        a = extract_mesh(offset_box, BOUNDS, 4)
        b = extract_mesh(offset_box, BOUNDS, 4)
        assert np.array_equal(a.vertices, b.vertices)
        assert np.array_equal(a.triangles, b.triangles)


class TestExports:
    def test_obj_round_trip(self, offset_box, tmp_path):
        mesh = extract_mesh(offset_box, BOUNDS, 4)
        path = tmp_path / "box.obj"
        sp.save_obj(mesh, path)
        verts = []
        faces = []
        for line in path.read_text().splitlines():
            kind, *rest = line.split()
            if kind == "v":
                verts.append([float(x) for x in rest])
            elif kind == "f":
                faces.append([int(x) - 1 for x in rest])
        assert np.allclose(np.array(verts), mesh.vertices)
        assert np.array_equal(np.array(faces), mesh.triangles)

    def test_xyz_export(self, tmp_path):
        pts = np.array([[0.1, 0.2, 0.3], [1.0, -1.0, 0.5]])
        path = tmp_path / "pts.xyz"
        sp.save_xyz(pts, path)
        lines = path.read_text().splitlines()
        assert len(lines) == 2
        assert [float(x) for x in lines[0].split()] == [0.1, 0.2, 0.3]
