"""Range-analysis variant benchmark and the soundness fuzzer.

The benchmark measures, per variant: the cost of one bound evaluation
relative to a plain scalar network evaluation, the largest region size for
which at least half of random regions can be classified non-UNKNOWN, and
the wall time to cast a camera view's worth of rays. The fuzzer samples
random regions of random size, orientation and dimension and checks that
pointwise network values never escape the computed bounds.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .camera import Camera
from .errors import NoNetworks
from .network import NetworkSpec, _eval_batch_fast, eval_batch
from .range_core import (
    AFFINE_FIXED,
    AFFINE_FULL,
    INTERVAL_ONLY,
    CondensationPolicy,
    affine_truncate,
    range_bound_batch,
)
from .rays import RayCastParams, _march_arrays

BENCH_POLICIES: tuple[CondensationPolicy, ...] = (
    INTERVAL_ONLY,
    AFFINE_FIXED,
    AFFINE_FULL,
    affine_truncate(16),
)

SIZE_GRID = np.geomspace(1e-4, 1.0, 32)


@dataclass(frozen=True)
class BenchRow:
    variant: str
    dim: int
    time_ratio: float
    region_size: float  # length for 1d, volume for 3d
    raycast_seconds: float


@dataclass
class FuzzViolation:
    net: str
    policy: str
    center: np.ndarray
    axes: np.ndarray
    value: float
    lo: float
    hi: float


@dataclass
class FuzzReport:
    n_regions: int
    n_checks: int
    n_violations: int = 0
    violations: list[FuzzViolation] = field(default_factory=list)  # capped sample

    @property
    def ok(self) -> bool:
        return self.n_violations == 0


def _fastest_of(fn, runs: int = 5):
    fn()  # warm up
    best = np.inf
    for _ in range(runs):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def _region_axes(rng, n, dim, size):
    """Axes arrays for n random regions of the given extent."""
    if dim == 1:
        dirs = rng.standard_normal((n, 3))
        dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
        return (size / 2.0) * dirs[:, None, :]
    axes = np.zeros((n, 3, 3))
    idx = np.arange(3)
    axes[:, idx, idx] = size / 2.0
    return axes


def _classified_fraction(net, policy, centers, axes_unit, size):
    lo, hi = range_bound_batch(net, centers, axes_unit * size, policy)
    return float(np.mean((lo > 0.0) | (hi < 0.0)))


def _threshold_size(net, policy, dim, n_regions, rng):
    """Largest grid size where at least 50% of regions classify, by binary
    search over the (monotone) size grid; 0 when even the smallest fails."""
    centers = rng.uniform(-1.0, 1.0, (n_regions, 3))
    axes_unit = _region_axes(rng, n_regions, dim, 1.0)
    if _classified_fraction(net, policy, centers, axes_unit, SIZE_GRID[0]) < 0.5:
        return 0.0
    lo, hi = 0, len(SIZE_GRID) - 1
    if _classified_fraction(net, policy, centers, axes_unit, SIZE_GRID[hi]) >= 0.5:
        return float(SIZE_GRID[hi])
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if _classified_fraction(net, policy, centers, axes_unit, SIZE_GRID[mid]) >= 0.5:
            lo = mid
        else:
            hi = mid
    return float(SIZE_GRID[lo])


def _default_camera(res: int) -> Camera:
    return Camera(
        position=np.array([1.6, 1.2, 2.0]),
        look_at=np.zeros(3),
        up=np.array([0.0, 1.0, 0.0]),
        vertical_fov=40.0,
        resolution=(res, res),
    )


def bench_variants(
    nets: list[NetworkSpec],
    n_regions: int = 10_000,
    rng_seed: int = 0,
    timing_size: float = 0.05,
    raycast_res: int = 256,
    runs: int = 5,
    params: RayCastParams = RayCastParams(),
) -> list[BenchRow]:
    """Replicate the variant study: bounds tightness, cost, raycast time.

    Region sizes and timings are averaged over the given networks; raycast
    time is measured on the first network at raycast_res squared pixels
    (fastest of `runs`, one warm-up). region_size is a length for 1d
    regions and a volume for 3d regions.
    """
    if not nets:
        raise NoNetworks("bench needs at least one network")
    rows = []
    cam = _default_camera(raycast_res)
    dirs = cam.pixel_dirs().reshape(-1, 3)
    origins = np.broadcast_to(cam.position, dirs.shape).copy()
    for policy in BENCH_POLICIES:
        raycast = _fastest_of(
            lambda: _march_arrays(nets[0], origins, dirs, params, policy), runs
        )
        for dim in (1, 3):
            rng = np.random.default_rng(rng_seed)
            sizes = []
            ratios = []
            for net in nets:
                sizes.append(_threshold_size(net, policy, dim, n_regions, rng))
                centers = rng.uniform(-1.0, 1.0, (n_regions, 3))
                axes = _region_axes(rng, n_regions, dim, timing_size)
                t_bound = _fastest_of(
                    lambda: range_bound_batch(net, centers, axes, policy), runs
                )
                t_eval = _fastest_of(lambda: eval_batch(net, centers), runs)
                ratios.append(t_bound / t_eval)
            size = float(np.mean(sizes))
            rows.append(
                BenchRow(
                    variant=str(policy),
                    dim=dim,
                    time_ratio=float(np.mean(ratios)),
                    region_size=size if dim == 1 else size**3,
                    raycast_seconds=raycast,
                )
            )
    return rows


def write_bench_csv(rows: list[BenchRow], path) -> None:
    import csv

    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        writer.writerow(
            ["variant", "dim", "time_ratio", "region_size", "raycast_seconds"]
        )
        for r in rows:
            writer.writerow(
                [r.variant, r.dim, f"{r.time_ratio:.6g}", f"{r.region_size:.6g}",
                 f"{r.raycast_seconds:.6g}"]
            )


def write_bench_figure(rows: list[BenchRow], path) -> None:
    """Bar charts of the benchmark next to the CSV report."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    variants = list(dict.fromkeys(r.variant for r in rows))
    fig, axes = plt.subplots(1, 3, figsize=(12, 3.6))
    x = np.arange(len(variants))
    for dim, shift in ((1, -0.2), (3, 0.2)):
        sizes = [next(r.region_size for r in rows if r.variant == v and r.dim == dim)
                 for v in variants]
        ratios = [next(r.time_ratio for r in rows if r.variant == v and r.dim == dim)
                  for v in variants]
        axes[0].bar(x + shift, np.maximum(sizes, 1e-12), width=0.4, label=f"{dim}d")
        axes[1].bar(x + shift, ratios, width=0.4, label=f"{dim}d")
    casts = [next(r.raycast_seconds for r in rows if r.variant == v) for v in variants]
    axes[2].bar(x, casts, width=0.5, color="tab:green")
    titles = ["bound-able region size", "time vs scalar eval", "raycast seconds"]
    for ax, title in zip(axes, titles):
        ax.set_xticks(x)
        ax.set_xticklabels(variants, rotation=20, ha="right", fontsize=8)
        ax.set_title(title, fontsize=10)
        ax.set_yscale("log")
    axes[0].legend(fontsize=8)
    axes[1].legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)


def fuzz_soundness(
    nets: list[NetworkSpec],
    n_regions: int = 1_000_000,
    rng_seed: int = 0,
    policies: tuple[CondensationPolicy, ...] = BENCH_POLICIES,
    samples_per_region: int = 32,
    slack: float = 1e-5,
    max_reported: int = 10,
    chunk: int = 4096,
    threads: int = 2,
) -> FuzzReport:
    """Containment fuzzing of every range-analysis policy.

    Regions have random centers in [-1.1, 1.1]^3, extents log-uniform in
    [1e-4, 1], and dimension 1 (random orientation) or 3 (axis-aligned
    cube). Every sampled value must lie within the computed bounds widened
    by `slack`. Networks are processed in parallel but each has its own
    seeded stream, so the report is deterministic for a fixed seed.
    """
    if not nets:
        raise NoNetworks("fuzz needs at least one network")
    per_net = [n_regions // len(nets)] * len(nets)
    per_net[0] += n_regions - sum(per_net)

    def fuzz_net(net, quota):
        rng = np.random.default_rng(rng_seed)
        checks = 0
        n_bad = 0
        found: list[FuzzViolation] = []
        remaining = quota
        while remaining > 0:
            n = min(chunk, remaining)
            remaining -= n
            centers = rng.uniform(-1.1, 1.1, (n, 3))
            sizes = 10.0 ** rng.uniform(-4.0, 0.0, n)
            one_d = rng.random(n) < 0.5
            dirs = rng.standard_normal((n, 3))
            dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
            axes = np.zeros((n, 3, 3))
            idx = np.arange(3)
            axes[:, idx, idx] = (sizes / 2.0)[:, None]
            axes[one_d] = 0.0
            axes[one_d, 0, :] = (sizes[one_d, None] / 2.0) * dirs[one_d]
            eps = rng.uniform(-1.0, 1.0, (n, samples_per_region, 3))
            pts = centers[:, None, :] + np.einsum("nsk,nkd->nsd", eps, axes)
            vals = _eval_batch_fast(net, pts.reshape(-1, 3)).reshape(n, -1)
            for policy in policies:
                lo, hi = range_bound_batch(net, centers, axes, policy)
                checks += n
                bad_lo = vals < (lo - slack)[:, None]
                bad_hi = vals > (hi + slack)[:, None]
                bad = np.flatnonzero(np.any(bad_lo | bad_hi, axis=1))
                n_bad += bad.size
                for i in bad[: max(0, max_reported - len(found))]:
                    j = int(np.argmax((bad_lo[i] | bad_hi[i]).astype(np.int8)))
                    found.append(
                        FuzzViolation(
                            net=net.name,
                            policy=str(policy),
                            center=centers[i].copy(),
                            axes=axes[i].copy(),
                            value=float(vals[i, j]),
                            lo=float(lo[i]),
                            hi=float(hi[i]),
                        )
                    )
        return checks, n_bad, found

    report = FuzzReport(n_regions=n_regions, n_checks=0)
    if threads > 1 and len(nets) > 1:
        from concurrent.futures import ThreadPoolExecutor

        try:
            # one BLAS thread per worker: oversubscription on small GEMMs
            # costs more than it buys
            from threadpoolctl import threadpool_limits

            limiter = threadpool_limits(limits=1)
        except ImportError:
            from contextlib import nullcontext

            limiter = nullcontext()
        with limiter:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                results = list(pool.map(fuzz_net, nets, per_net))
    else:
        results = [fuzz_net(net, quota) for net, quota in zip(nets, per_net)]
    for checks, n_bad, found in results:
        report.n_checks += checks
        report.n_violations += n_bad
        report.violations.extend(found[: max(0, max_reported - len(report.violations))])
    return report
