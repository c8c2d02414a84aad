"""Acceptance suite: every primary criterion at its stated tolerance.

Run with `pytest -v -s tests/test_acceptance.py` to see one pass/fail line
per criterion. Scales are the contracted ones (the soundness fuzz alone
visits one million regions), so this module takes several minutes.
"""

import time
from contextlib import contextmanager

import numpy as np
import pytest

import spelunk as sp
from spelunk.bench import bench_variants, fuzz_soundness
from spelunk.camera import Camera
from spelunk.meshing import extract_mesh, extract_mesh_dense
from spelunk.network import box_sdf, count_evals
from spelunk.range_core import range_bound_batch
from spelunk.rays import RayCastParams, _march_arrays, cast_frustum_image
from spelunk.spatial import (
    AABB,
    bulk_properties,
    closest_point,
    sample_near_surface,
    test_intersection,
    walk_on_spheres_stats,
)

from conftest import random_box
from test_meshing import canonical_triangles
from test_rays import box_chords, check_against_oracle, random_rays

BOUNDS = AABB(np.full(3, -1.0), np.full(3, 1.0))
DELTA = 0.001


@contextmanager
def criterion(name):
    t0 = time.perf_counter()
    try:
        yield
    except BaseException:
        print(f"[FAIL] {name} ({time.perf_counter() - t0:.1f}s)")
        raise
    print(f"[PASS] {name} ({time.perf_counter() - t0:.1f}s)")


def test_soundness_fuzz(box_oracle, trained_nets):
    """10^6 random regions x 4 policies: every sample within bounds + 1e-5."""
    nets = [*trained_nets, box_oracle]
    with criterion("soundness-fuzz 1e6 regions, 4 policies, 5 nets"):
        t0 = time.perf_counter()
        report = fuzz_soundness(nets, n_regions=1_000_000, rng_seed=2024)
        elapsed = time.perf_counter() - t0
        print(f"  {report.n_checks} checks, {report.n_violations} violations, "
              f"{elapsed:.0f}s (laptop target < 600s; sandbox CPUs are fewer)")
        assert report.ok, report.violations[:3]
        assert report.n_checks == 4_000_000


def test_variant_ordering(trained_nets):
    """Bound-able region sizes full > fixed > interval; raycast: fixed fastest."""
    with criterion("variant-ordering (study replication)"):
        rows = bench_variants(
            trained_nets, n_regions=1500, rng_seed=0, raycast_res=32, runs=2
        )
        by = {(r.variant, r.dim): r for r in rows}
        for dim in (1, 3):
            full = by[("affine-full", dim)].region_size
            fixed = by[("affine-fixed", dim)].region_size
            interval = by[("interval", dim)].region_size
            assert full > fixed > interval, (dim, full, fixed, interval)
        assert by[("interval", 3)].region_size <= by[("affine-full", 3)].region_size / 100.0
        casts = {v: by[(v, 1)].raycast_seconds
                 for v in ("interval", "affine-fixed", "affine-full",
                           "affine-truncate:16")}
        assert min(casts, key=casts.get) == "affine-fixed", casts
        assert by[("interval", 1)].time_ratio < by[("affine-full", 1)].time_ratio


def test_raycast_oracle_equivalence(box_oracle, trained_nets):
    """256 random rays per fixture vs dense delta/10 marching."""
    params = RayCastParams(t_max=3.0, delta=DELTA)
    with criterion("ray-cast oracle equivalence (256 rays x 5 fixtures)"):
        rng = np.random.default_rng(11)
        for net in [box_oracle, *trained_nets]:
            rays = random_rays(rng, 256)
            origins = np.stack([r.origin for r in rays])
            dirs = np.stack([r.dir for r in rays])
            hit, t, _ = _march_arrays(net, origins, dirs, params, sp.AFFINE_FIXED)
            for ray, h, tv in zip(rays, hit, t):
                check_against_oracle(
                    net, ray, sp.HitResult(bool(h), float(tv)), params
                )


def test_frustum_exactness(box_oracle):
    """256x256: per-pixel-equal hit masks (sub-delta slivers excepted),
    |dt| <= delta, and strictly fewer total marching steps."""
    params = RayCastParams(t_max=4.0, delta=DELTA)
    cam = Camera(
        position=np.array([0.13, 0.11, 2.4]),
        look_at=np.array([0.02, -0.03, 0.0]),
        up=np.array([0.0, 1.0, 0.0]),
        vertical_fov=40.0,
        resolution=(256, 256),
    )
    with criterion("frustum exactness at 256x256"):
        fr = cast_frustum_image(box_oracle, cam, params)
        dirs = cam.pixel_dirs().reshape(-1, 3)
        origins = np.broadcast_to(cam.position, dirs.shape).copy()
        hit, t, steps = _march_arrays(box_oracle, origins, dirs, params,
                                      sp.AFFINE_FIXED)
        sliver = box_chords(origins, dirs) <= DELTA
        disagree = fr.hit.reshape(-1) != hit
        assert not np.any(disagree & ~sliver), int(np.sum(disagree & ~sliver))
        both = hit & fr.hit.reshape(-1)
        assert np.max(np.abs(fr.t.reshape(-1)[both] - t[both])) <= DELTA
        assert fr.total_steps() < steps.sum()
        print(f"  steps: frustum {fr.total_steps():.0f} vs per-ray "
              f"{steps.sum():.0f}; {int(disagree.sum())} sliver pixels differ")


def test_mesh_extraction_equivalence(trained_nets):
    """Hierarchical == dense marching cubes at m=5,6; fewer evaluations."""
    offset_box = sp.build_box_oracle(np.array([0.031, 0.017, -0.023]), 0.5)
    nets = [offset_box, trained_nets[0], trained_nets[1]]
    with criterion("mesh-extraction equivalence at m=5,6 on 3 fixtures"):
        for net in nets:
            for m in (5, 6):
                dense = extract_mesh_dense(net, BOUNDS, m)
                hier = extract_mesh(net, BOUNDS, m)
                assert canonical_triangles(dense, 9) == canonical_triangles(hier, 9)
        with count_evals() as hier_count:
            extract_mesh(offset_box, BOUNDS, 6)
        dense_evals = (2**6 + 1) ** 3
        print(f"  box oracle m=6 evals: {hier_count.count} vs dense {dense_evals}")
        assert hier_count.count < 0.5 * dense_evals


def test_bulk_mass(box_oracle):
    """Mass of the unit box within 5e-4 relative, error bound brackets it."""
    with criterion("bulk mass within 5e-4 relative"):
        bp = bulk_properties(box_oracle, BOUNDS, depth=21, rng_seed=0)
        assert abs(bp.mass - 1.0) <= 5e-4
        assert bp.mass - bp.mass_error_bound <= 1.0 <= bp.mass + bp.mass_error_bound
        assert np.all(np.abs(bp.centroid) <= 1e-3)
        print(f"  mass={bp.mass:.6f} +- {bp.mass_error_bound:.5f}, "
              f"centroid={np.abs(bp.centroid).max():.2e}")


def test_closest_point_sandwich(box_oracle):
    """100 queries: analytic <= reported <= analytic + 2*delta."""
    def analytic(q):
        outside = np.linalg.norm(np.maximum(np.abs(q) - 0.5, 0.0))
        return outside if outside > 0 else 0.5 - np.max(np.abs(q))

    with criterion("closest-point sandwich (100 queries)"):
        rng = np.random.default_rng(17)
        for _ in range(100):
            q = rng.uniform(-1.2, 1.2, 3)
            _, dist = closest_point(box_oracle, q, BOUNDS, delta=DELTA)
            truth = analytic(q)
            assert truth - 1e-12 <= dist <= truth + 2 * DELTA, (q, dist, truth)


def test_intersection_truth_table(box_oracle):
    """Overlapping / disjoint / touching pairs classified correctly, 20 each."""
    rng = np.random.default_rng(23)
    delta = 0.01
    with criterion("intersection truth table (3 x 20 randomized pairs)"):
        for _ in range(20):
            off = rng.uniform(-0.7, 0.7, 3)
            other = sp.build_box_oracle(off, 0.5)
            res = test_intersection(box_oracle, other,
                                    AABB(np.full(3, -2.2), np.full(3, 2.2)), delta)
            assert res.kind == "intersecting", (off, res.kind)

        for _ in range(20):
            off = rng.uniform(-0.4, 0.4, 3)
            axis = rng.integers(3)
            off[axis] = np.sign(rng.standard_normal()) * (1.2 + rng.uniform(0, 0.4))
            other = sp.build_box_oracle(off, 0.5)
            res = test_intersection(box_oracle, other,
                                    AABB(np.full(3, -2.2), np.full(3, 2.2)), delta)
            assert res.kind == "disjoint", (off, res.kind)

        for _ in range(20):
            off = rng.uniform(-0.4, 0.4, 3)
            axis = rng.integers(3)
            off[axis] = np.sign(rng.standard_normal()) * 1.0
            other = sp.build_box_oracle(off, 0.5)
            res = test_intersection(box_oracle, other,
                                    AABB(np.full(3, -2.2), np.full(3, 2.2)), delta)
            assert res.kind == "inconclusive", (off, res.kind)


def test_walk_on_spheres(box_oracle):
    """Harmonic data x1: estimate within 3 standard errors, 10 points."""
    with criterion("walk-on-spheres harmonic estimates (10 points)"):
        rng = np.random.default_rng(31)
        for k in range(10):
            p = rng.uniform(-0.35, 0.35, 3)
            est, se = walk_on_spheres_stats(
                box_oracle, p, lambda q: q[0], 10_000, rng_seed=100 + k
            )
            assert abs(est - p[0]) <= 3.0 * se, (p, est, se)


def test_surface_sampling(box_oracle):
    """10^5 band samples, all |f| < r, at >= 5x fewer evaluations."""
    n, band = 100_000, 0.01
    with criterion("surface sampling throughput and band membership"):
        with count_evals() as ours:
            pts = sample_near_surface(box_oracle, BOUNDS, n, band, 18, rng_seed=7)
        assert pts.shape == (n, 3)
        assert np.all(np.abs(sp.eval_batch(box_oracle, pts)) < band)
        rng = np.random.default_rng(8)
        accepted = 0
        with count_evals() as naive:
            while accepted < n:
                cand = rng.uniform(-1.0, 1.0, (131072, 3))
                accepted += int(
                    (np.abs(sp.eval_batch(box_oracle, cand)) < band).sum()
                )
        print(f"  evals: ours {ours.count} vs naive {naive.count} "
              f"({naive.count / ours.count:.1f}x)")
        assert 5 * ours.count <= naive.count


def test_affine_exactness():
    """Linear networks bounded exactly; condense/truncate leave bounds fixed."""
    from spelunk.network import DenseLayer, NetworkSpec

    with criterion("affine exactness and condense/truncate identity"):
        rng = np.random.default_rng(41)
        for _ in range(100):
            dims = [3, int(rng.integers(2, 10)), int(rng.integers(2, 10)), 1]
            layers = tuple(
                DenseLayer(rng.standard_normal((dims[i + 1], dims[i])),
                           rng.standard_normal(dims[i + 1]))
                for i in range(3)
            )
            net = NetworkSpec(3, layers)
            box = random_box(rng)
            got, _ = sp.range_bound(net, box, sp.AFFINE_FULL)
            w = np.eye(3)
            b = np.zeros(3)
            for layer in layers:
                b = layer.weights @ b + layer.bias
                w = layer.weights @ w
            mid = (w @ box.center + b).item()
            radius = np.sum(np.abs(box.axes @ w.T)).item()
            assert abs(got.lo - (mid - radius)) <= 1e-9
            assert abs(got.hi - (mid + radius)) <= 1e-9

        for _ in range(10_000):
            m = int(rng.integers(1, 4))
            nsym = int(rng.integers(1, 10))
            form = sp.AffineForm(
                rng.standard_normal(m) * 10 ** rng.uniform(-3, 2),
                rng.standard_normal((m, nsym)),
                rng.uniform(0, 1, m),
            )
            before = sp.interval_of(form)
            drop = [int(i) for i in np.nonzero(rng.random(nsym) < 0.5)[0]]
            after = sp.interval_of(sp.condense(form, drop))
            trunc = sp.interval_of(sp.truncate(form, int(rng.integers(1, nsym + 1))))
            for other in (after, trunc):
                assert np.all(np.abs(np.asarray(other.lo) - before.lo) <= 1e-12)
                assert np.all(np.abs(np.asarray(other.hi) - before.hi) <= 1e-12)
