import numpy as np
import pytest

import spelunk as sp
from spelunk.bench import bench_variants, fuzz_soundness, write_bench_csv
from spelunk.cli import main
from spelunk.errors import NoNetworks
from spelunk.render import read_ppm

from conftest import FIXTURE_DIR, TRAINED_FIXTURES


@pytest.fixture(scope="module")
def box_weights(tmp_path_factory):
    path = tmp_path_factory.mktemp("weights") / "box.json"
    sp.save_network(sp.build_box_oracle(np.zeros(3), 0.5), path)
    return str(path)


@pytest.fixture(scope="module")
def net_dir(tmp_path_factory):
    d = tmp_path_factory.mktemp("nets")
    sp.save_network(sp.build_box_oracle(np.zeros(3), 0.5), d / "box.json")
    sp.save_network(sp.build_box_oracle(np.array([0.2, 0.0, 0.0]), 0.3), d / "box2.json")
    return str(d)


class TestSubcommands:
    def test_render_ppm(self, box_weights, tmp_path, capsys):
        out = tmp_path / "img.ppm"
        code = main([
            "render", "--weights", box_weights, "--res", "32x32",
            "--out", str(out), "--mode", "frustum", "--t-max", "4",
        ])
        assert code == 0
        img = read_ppm(out)
        assert img.width == 32 and img.height == 32

    def test_render_png_fixed_step(self, box_weights, tmp_path):
        out = tmp_path / "img.png"
        code = main([
            "render", "--weights", box_weights, "--res", "16x16",
            "--out", str(out), "--mode", "fixed-step", "--step", "0.05",
            "--t-max", "4",
        ])
        assert code == 0 and out.exists()

    def test_mesh(self, box_weights, tmp_path):
        out = tmp_path / "mesh.obj"
        code = main([
            "mesh", "--weights", box_weights, "--depth-exp", "4", "--out", str(out),
        ])
        assert code == 0
        text = out.read_text()
        assert text.count("\nf ") + text.startswith("f ") > 0
        assert "v " in text

    def test_sample(self, box_weights, tmp_path):
        out = tmp_path / "pts.xyz"
        code = main([
            "sample", "--weights", box_weights, "--n", "200", "--band", "0.02",
            "--depth", "12", "--out", str(out), "--seed", "3",
        ])
        assert code == 0
        pts = np.array([[float(v) for v in line.split()]
                        for line in out.read_text().splitlines()])
        assert pts.shape == (200, 3)
        net = sp.load_network(box_weights)
        assert np.all(np.abs(sp.eval_batch(net, pts)) < 0.02)

    def test_mass_report(self, box_weights, capsys):
        code = main(["mass", "--weights", box_weights, "--depth", "15"])
        assert code == 0
        out = capsys.readouterr().out
        assert "mass " in out and "centroid" in out and "inertia" in out
        mass = float(out.splitlines()[0].split()[-1])
        assert abs(mass - 1.0) < 0.01

    def test_intersect(self, box_weights, net_dir, capsys):
        code = main([
            "intersect", "--weights", box_weights,
            "--weights-b", f"{net_dir}/box2.json", "--delta", "0.01",
        ])
        assert code == 0
        assert "intersecting" in capsys.readouterr().out

    def test_closest(self, box_weights, capsys):
        code = main(["closest", "--weights", box_weights, "--point", "2,0,0"])
        assert code == 0
        out = capsys.readouterr().out
        dist = float(out.split()[-1])
        assert 1.5 <= dist <= 1.502

    def test_wos(self, box_weights, capsys):
        code = main([
            "wos", "--weights", box_weights, "--point", "0.2,0,0",
            "--walks", "400", "--boundary", "x", "--seed", "1",
        ])
        assert code == 0
        est = float(capsys.readouterr().out.split()[1])
        assert abs(est - 0.2) < 0.05

    def test_bench_writes_csv_and_figure(self, net_dir, tmp_path, capsys):
        out = tmp_path / "report.csv"
        code = main([
            "bench", "--weights-dir", net_dir, "--regions", "200",
            "--out", str(out), "--raycast-res", "8",
        ])
        assert code == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "variant,dim,time_ratio,region_size,raycast_seconds"
        assert len(lines) == 9  # 4 variants x 2 dims
        assert (tmp_path / "report.png").exists()

    def test_fuzz_clean(self, net_dir, capsys):
        code = main(["fuzz", "--weights-dir", net_dir, "--regions", "2000"])
        assert code == 0
        assert "0 violations" in capsys.readouterr().out


class TestExitCodes:
    def test_usage_error_is_2(self):
        with pytest.raises(SystemExit) as exc:
            main(["render"])  # missing required flags
        assert exc.value.code == 2

    def test_unknown_command_is_2(self):
        with pytest.raises(SystemExit) as exc:
            main(["explode"])
        assert exc.value.code == 2

    def test_runtime_error_is_1(self, tmp_path, capsys):
        code = main([
            "render", "--weights", str(tmp_path / "missing.json"),
            "--res", "8x8", "--out", str(tmp_path / "x.ppm"),
        ])
        assert code == 1
        assert "error:" in capsys.readouterr().err

    def test_threads_env_override(self, box_weights, monkeypatch, tmp_path):
        monkeypatch.setenv("SPELUNK_THREADS", "1")
        out = tmp_path / "img.ppm"
        assert main([
            "render", "--weights", box_weights, "--res", "8x8",
            "--out", str(out), "--threads", "7", "--t-max", "4",
        ]) == 0


class TestFuzzHarness:
    def test_corrupted_rule_detected(self, monkeypatch, box_oracle):
        # negate the ReLU remainder: bounds stop containing the true range
        import spelunk.range_core as rc

        real = rc._relu_affine

        def corrupted(lo, hi):
            alpha, beta, gamma = real(lo, hi)
            return alpha, beta, -gamma
        monkeypatch.setitem(rc.AFFINE_RULES, sp.ActivationKind.RELU, corrupted)
        report = fuzz_soundness([box_oracle], n_regions=3000, rng_seed=0, threads=1)
        assert not report.ok
        assert report.violations
        first = report.violations[0]
        assert first.value < first.lo or first.value > first.hi

    def test_same_seed_same_report(self, box_oracle, trained_nets):
        nets = [box_oracle, trained_nets[0]]
        a = fuzz_soundness(nets, n_regions=4000, rng_seed=5)
        b = fuzz_soundness(nets, n_regions=4000, rng_seed=5)
        assert a.n_checks == b.n_checks
        assert a.n_violations == b.n_violations == 0

    def test_no_networks(self):
        with pytest.raises(NoNetworks):
            fuzz_soundness([], n_regions=10)
        with pytest.raises(NoNetworks):
            bench_variants([], n_regions=10)


class TestBenchReport:
    def test_row_structure(self, box_oracle, tmp_path):
        rows = bench_variants([box_oracle], n_regions=100, raycast_res=8, runs=1)
        variants = {r.variant for r in rows}
        assert variants == {"interval", "affine-fixed", "affine-full",
                            "affine-truncate:16"}
        assert {r.dim for r in rows} == {1, 3}
        path = tmp_path / "r.csv"
        write_bench_csv(rows, path)
        assert len(path.read_text().splitlines()) == 9
