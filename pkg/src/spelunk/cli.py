"""Command-line interface.

Subcommands: render, mesh, sample, mass, intersect, closest, wos, bench,
fuzz. Ray commands default to affine-fixed range analysis, volumetric
commands to affine-full; --policy overrides. The SPELUNK_THREADS
environment variable overrides --threads. Exit codes: 0 success, 1 runtime
failure (including fuzz violations), 2 usage errors.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

import numpy as np

from .bench import bench_variants, fuzz_soundness, write_bench_csv, write_bench_figure
from .camera import Camera
from .errors import SpelunkError
from .network import load_network
from .range_core import AFFINE_FIXED, AFFINE_FULL, parse_policy
from .rays import RayCastParams
from .render import render_image, write_image
from .meshing import extract_mesh
from .spatial import (
    AABB,
    bulk_properties,
    closest_point,
    sample_near_surface,
    save_obj,
    save_xyz,
    test_intersection,
    walk_on_spheres,
)


def _parse_vec(text: str) -> np.ndarray:
    try:
        v = np.array([float(x) for x in text.split(",")], dtype=np.float64)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad vector {text!r}") from exc
    if v.shape != (3,):
        raise argparse.ArgumentTypeError(f"expected 3 components in {text!r}")
    return v


def _parse_res(text: str) -> tuple[int, int]:
    try:
        w, h = text.lower().split("x")
        return int(w), int(h)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad resolution {text!r}, want WxH") from exc


def _policy_type(text: str):
    try:
        return parse_policy(text)
    except SpelunkError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _add_common(p, default_policy):
    p.add_argument("--policy", type=_policy_type, default=default_policy,
                   help="range analysis: interval, affine-fixed, affine-full, "
                        "affine-truncate:N")
    p.add_argument("--delta", type=float, default=0.001,
                   help="convergence tolerance (default 0.001)")
    p.add_argument("--threads", type=int, default=os.cpu_count() or 1,
                   help="worker threads (SPELUNK_THREADS overrides)")
    p.add_argument("--seed", type=int, default=0, help="rng seed")


def _bounds_arg(p):
    p.add_argument("--bounds", type=float, default=1.0,
                   help="domain half-extent B: queries run over [-B, B]^3")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="spelunk",
        description="Guaranteed geometric queries on neural implicit surfaces",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("render", help="ray-cast an image of the level set")
    p.add_argument("--weights", required=True)
    p.add_argument("--res", type=_parse_res, default=(256, 256), help="WxH")
    p.add_argument("--out", required=True, help="output .ppm or .png")
    p.add_argument("--mode", choices=["per-ray", "frustum", "fixed-step"],
                   default="per-ray")
    p.add_argument("--step", type=float, default=0.01,
                   help="step size for fixed-step mode")
    p.add_argument("--camera-pos", type=_parse_vec, default="1.6,1.2,2.0")
    p.add_argument("--look-at", type=_parse_vec, default="0,0,0")
    p.add_argument("--up", type=_parse_vec, default="0,1,0")
    p.add_argument("--fov", type=float, default=40.0)
    p.add_argument("--t-max", type=float, default=10.0)
    _add_common(p, AFFINE_FIXED)

    p = sub.add_parser("mesh", help="extract a triangle mesh (marching cubes)")
    p.add_argument("--weights", required=True)
    p.add_argument("--depth-exp", type=int, required=True,
                   help="resolution exponent m: a 2^m grid per axis")
    p.add_argument("--dense-levels", type=int, default=3)
    p.add_argument("--out", required=True, help="output .obj")
    _bounds_arg(p)
    _add_common(p, AFFINE_FULL)

    p = sub.add_parser("sample", help="sample points near the surface")
    p.add_argument("--weights", required=True)
    p.add_argument("--n", type=int, default=10000)
    p.add_argument("--band", type=float, default=0.01,
                   help="keep points with |f| below this")
    p.add_argument("--depth", type=int, default=18, help="tree refinement depth")
    p.add_argument("--out", required=True, help="output .xyz (x y z per line)")
    _bounds_arg(p)
    _add_common(p, AFFINE_FULL)

    p = sub.add_parser("mass", help="bulk properties of the enclosed solid")
    p.add_argument("--weights", required=True)
    p.add_argument("--depth", type=int, default=18)
    p.add_argument("--samples-per-node", type=int, default=64)
    _bounds_arg(p)
    _add_common(p, AFFINE_FULL)

    p = sub.add_parser("intersect", help="test two surfaces for intersection")
    p.add_argument("--weights", required=True)
    p.add_argument("--weights-b", required=True)
    _bounds_arg(p)
    _add_common(p, AFFINE_FULL)

    p = sub.add_parser("closest", help="closest point on the level set")
    p.add_argument("--weights", required=True)
    p.add_argument("--point", type=_parse_vec, required=True)
    _bounds_arg(p)
    _add_common(p, AFFINE_FIXED)

    p = sub.add_parser("wos", help="walk-on-spheres harmonic estimate")
    p.add_argument("--weights", required=True)
    p.add_argument("--point", type=_parse_vec, required=True)
    p.add_argument("--walks", type=int, default=10000)
    p.add_argument("--boundary", default="x",
                   help="Dirichlet data: x, y, z, or const:V")
    _add_common(p, AFFINE_FULL)

    p = sub.add_parser("bench", help="variant study: tightness and timings")
    p.add_argument("--weights-dir", required=True)
    p.add_argument("--regions", type=int, default=10000)
    p.add_argument("--out", required=True, help="CSV report (figure written "
                   "alongside as .png)")
    p.add_argument("--raycast-res", type=int, default=256)
    _add_common(p, AFFINE_FULL)

    p = sub.add_parser("fuzz", help="soundness fuzzing of all policies")
    p.add_argument("--weights-dir", required=True)
    p.add_argument("--regions", type=int, default=1_000_000)
    _add_common(p, AFFINE_FULL)
    return ap


def _load_dir(path: str):
    files = sorted(Path(path).glob("*.json"))
    return [load_network(f) for f in files]


def _boundary_fn(spec: str):
    if spec in ("x", "y", "z"):
        k = "xyz".index(spec)
        return lambda p: p[k]
    if spec.startswith("const:"):
        v = float(spec.split(":", 1)[1])
        return lambda p: v
    raise SpelunkError(f"unknown boundary data {spec!r}")


def _threads(args) -> int:
    env = os.environ.get("SPELUNK_THREADS")
    if env:
        return max(1, int(env))
    return max(1, args.threads)


def _cube(b: float) -> AABB:
    return AABB(np.full(3, -b), np.full(3, b))


def _run(args) -> int:
    if args.command == "render":
        net = load_network(args.weights)
        cam = Camera(args.camera_pos, args.look_at, args.up, args.fov, args.res)
        params = RayCastParams(t_max=args.t_max, delta=args.delta)
        img = render_image(
            net, cam, params, args.policy,
            mode=args.mode.replace("-", "_"), step=args.step,
            threads=_threads(args),
        )
        write_image(img, args.out)
        print(f"wrote {args.out}")
        return 0

    if args.command == "mesh":
        net = load_network(args.weights)
        mesh = extract_mesh(net, _cube(args.bounds), args.depth_exp,
                            dense_levels=args.dense_levels, policy=args.policy)
        save_obj(mesh, args.out)
        print(f"wrote {args.out}: {len(mesh.vertices)} vertices, "
              f"{len(mesh.triangles)} triangles")
        return 0

    if args.command == "sample":
        net = load_network(args.weights)
        pts = sample_near_surface(net, _cube(args.bounds), args.n, args.band,
                                  args.depth, args.policy, args.seed)
        save_xyz(pts, args.out)
        print(f"wrote {args.out}: {len(pts)} samples with |f| < {args.band}")
        return 0

    if args.command == "mass":
        net = load_network(args.weights)
        bp = bulk_properties(net, _cube(args.bounds), args.depth,
                             args.samples_per_node, args.seed, args.policy)
        print(f"mass             {bp.mass:.9g}")
        print(f"mass_error_bound {bp.mass_error_bound:.9g}")
        print(f"centroid         {bp.centroid[0]:.9g} {bp.centroid[1]:.9g} "
              f"{bp.centroid[2]:.9g}")
        print("inertia (about centroid, unit density)")
        for row in bp.inertia:
            print(f"  {row[0]: .9g} {row[1]: .9g} {row[2]: .9g}")
        return 0

    if args.command == "intersect":
        net_a = load_network(args.weights)
        net_b = load_network(args.weights_b)
        res = test_intersection(net_a, net_b, _cube(args.bounds),
                                args.delta, args.policy)
        if res.kind == "intersecting":
            c = res.witness.center
            print(f"intersecting: witness box centered ({c[0]:.6g}, {c[1]:.6g}, "
                  f"{c[2]:.6g})")
        elif res.kind == "disjoint":
            print("disjoint")
        else:
            print(f"inconclusive at delta={args.delta}: surfaces within delta "
                  f"of touching ({len(res.nodes)} nodes)")
        return 0

    if args.command == "closest":
        net = load_network(args.weights)
        pt, dist = closest_point(net, args.point, _cube(args.bounds),
                                 args.delta, args.policy)
        print(f"closest point ({pt[0]:.9g}, {pt[1]:.9g}, {pt[2]:.9g}) "
              f"distance {dist:.9g}")
        return 0

    if args.command == "wos":
        net = load_network(args.weights)
        est = walk_on_spheres(net, args.point, _boundary_fn(args.boundary),
                              args.walks, args.seed, args.delta, args.policy)
        print(f"estimate {est:.9g} ({args.walks} walks)")
        return 0

    if args.command == "bench":
        nets = _load_dir(args.weights_dir)
        rows = bench_variants(nets, args.regions, args.seed,
                              raycast_res=args.raycast_res)
        write_bench_csv(rows, args.out)
        fig_path = str(Path(args.out).with_suffix(".png"))
        write_bench_figure(rows, fig_path)
        print(f"wrote {args.out} and {fig_path}")
        for r in rows:
            print(f"  {r.variant:18s} {r.dim}d  time_ratio={r.time_ratio:8.2f}  "
                  f"region_size={r.region_size:.3e}  raycast={r.raycast_seconds:.3f}s")
        return 0

    if args.command == "fuzz":
        nets = _load_dir(args.weights_dir)
        report = fuzz_soundness(nets, args.regions, args.seed)
        print(f"checked {report.n_checks} (region, policy) pairs over "
              f"{report.n_regions} regions: {report.n_violations} violations")
        if not report.ok:
            for v in report.violations:
                print(f"  VIOLATION net={v.net} policy={v.policy} value={v.value} "
                      f"bounds=[{v.lo}, {v.hi}] center={v.center.tolist()}")
            return 1
        return 0

    raise SpelunkError(f"unhandled command {args.command}")


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _run(args)
    except (SpelunkError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
