import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.join(os.path.dirname(__file__), ".."))

from meshio import (
    Mesh,
    NonWatertightMesh,
    check_watertight,
    load_obj,
    make_box_mesh,
    make_icosphere,
    normalize_to_unit_sphere,
    write_obj,
)
from sampling import is_inside, sample_training_points, signed_distance
from training import TrainingConfig, fit_and_export

QUICK = TrainingConfig(epochs=12, n_samples=4000, seed=0)


class TestMeshIO:
    def test_obj_round_trip(self, tmp_path):
        mesh = make_box_mesh(0.5)
        path = tmp_path / "cube.obj"
        write_obj(mesh, path)
        back = load_obj(path)
        assert np.array_equal(back.vertices, mesh.vertices)
        assert np.array_equal(back.faces, mesh.faces)

    def test_watertight_fixtures(self):
        check_watertight(make_box_mesh(0.5))
        check_watertight(make_icosphere(0.5, 2))

    def test_open_mesh_rejected(self):
        cube = make_box_mesh(0.5)
        broken = Mesh(cube.vertices, cube.faces[:-1])
        with pytest.raises(NonWatertightMesh):
            check_watertight(broken)

    def test_normalization(self):
        big = Mesh(make_box_mesh(0.5).vertices * 4.0 + 1.0, make_box_mesh(0.5).faces)
        normed = normalize_to_unit_sphere(big)
        assert np.linalg.norm(normed.vertices, axis=1).max() <= 1.0 + 1e-12
        small = normalize_to_unit_sphere(make_icosphere(0.5, 1))
        assert np.isclose(np.linalg.norm(small.vertices, axis=1).max(), 0.5)


class TestSampling:
    def test_cube_origin_target(self):
        assert signed_distance(np.zeros((1, 3)), make_box_mesh(0.5))[0] == -0.5

    def test_outside_label(self):
        cube = make_box_mesh(0.5)
        assert not is_inside(np.array([[2.0, 0.0, 0.0]]), cube)[0]
        assert is_inside(np.array([[0.2, 0.1, -0.3]]), cube)[0]

    def test_exact_against_analytic_box(self):
        cube = make_box_mesh(0.5)
        rng = np.random.default_rng(1)
        pts = rng.uniform(-1.0, 1.0, (2000, 3))
        got = signed_distance(pts, cube)
        q = np.abs(pts) - 0.5
        want = np.linalg.norm(np.maximum(q, 0.0), axis=1) + np.minimum(
            q.max(axis=1), 0.0
        )
        assert np.max(np.abs(got - want)) <= 1e-12

    def test_surface_samples_near_surface(self):
        _, targets = sample_training_points(make_box_mesh(0.5), 4000, seed=2)
        near = np.abs(targets[:2000])
        # perturbations are gaussian with sigma 0.01 / 0.1
        assert np.median(near) <= 0.1
        assert np.max(near) <= 0.6

    def test_deterministic(self):
        a = sample_training_points(make_box_mesh(0.5), 512, seed=3)
        b = sample_training_points(make_box_mesh(0.5), 512, seed=3)
        assert np.array_equal(a[0], b[0]) and np.array_equal(a[1], b[1])

    def test_occupancy_labels(self):
        pts, labels = sample_training_points(
            make_box_mesh(0.5), 1000, seed=4, mode="occupancy"
        )
        inside = is_inside(pts, make_box_mesh(0.5))
        assert np.array_equal(labels, (~inside).astype(float))

    def test_non_watertight_rejected(self):
        cube = make_box_mesh(0.5)
        with pytest.raises(NonWatertightMesh):
            sample_training_points(Mesh(cube.vertices, cube.faces[:-1]), 10, 0)


class TestFitAndExport:
    def test_round_trip_through_primary(self, tmp_path):
        import spelunk

        out = tmp_path / "net.json"
        fit_and_export(make_icosphere(0.5, 2), QUICK, out)
        net = spelunk.load_network(out)
        assert net.input_dim == 3
        assert net.output_semantics == "sdf"
        # the loader validated shapes; spot check an evaluation runs
        spelunk.eval_scalar(net, np.zeros(3))

    def test_occupancy_export(self, tmp_path):
        import spelunk

        out = tmp_path / "occ.json"
        cfg = TrainingConfig(mode="occupancy", activation="elu",
                             epochs=12, n_samples=4000, seed=1)
        fit_and_export(make_icosphere(0.5, 2), cfg, out)
        net = spelunk.load_network(out)
        assert net.output_semantics == "occupancy_logit"

    def test_same_seed_same_file(self, tmp_path):
        a = tmp_path / "a.json"
        b = tmp_path / "b.json"
        fit_and_export(make_box_mesh(0.45), QUICK, a)
        fit_and_export(make_box_mesh(0.45), QUICK, b)
        assert a.read_bytes() == b.read_bytes()

    def test_metadata_records_loss(self, tmp_path):
        import json

        out = tmp_path / "net.json"
        loss = fit_and_export(make_icosphere(0.5, 2), QUICK, out)
        doc = json.loads(out.read_text())
        assert doc["metadata"]["final_loss"] == loss


class TestCLI:
    def test_fit_cli(self, tmp_path):
        import fit

        mesh_path = tmp_path / "cube.obj"
        write_obj(make_box_mesh(0.5), mesh_path)
        out = tmp_path / "net.json"
        code = fit.main([
            "--mesh", str(mesh_path), "--mode", "sdf", "--activation", "relu",
            "--out", str(out), "--seed", "0", "--epochs", "6",
            "--samples", "2000",
        ])
        assert code == 0 and out.exists()
