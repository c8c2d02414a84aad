"""Adaptive safe-step ray casting with certified step intervals.

A ray marches with a trial step sigma. If range analysis certifies the
network single-signed over the 1-d segment box ahead, the step is taken
and sigma grows by eta_plus; otherwise sigma shrinks by eta_minus and a
fallback step of delta is taken, which is always safe under the
delta-dilation correctness criterion. A hit is detected when the sample a
distance delta ahead changes sign relative to the ray origin. Exact zeros
count as positive (outside), matching the negative-inside convention.

Frustum casting marches a whole block of pixel rays with the same scheme,
using a 3-d bound over a box containing the swept slab; a frustum splits
in half when its front face grows wider than twice the current step, and
single-pixel frusta finish as ordinary rays.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .camera import Camera
from .errors import InvalidCamera, InvalidParameter, InvalidRay
from .network import NetworkSpec, eval_batch
from .range_core import CondensationPolicy, range_bound_batch


@dataclass(frozen=True)
class Ray:
    origin: np.ndarray
    dir: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.origin, dtype=np.float64)
        r = np.asarray(self.dir, dtype=np.float64)
        if p.shape != (3,) or r.shape != (3,):
            raise InvalidRay("origin and dir must be 3-vectors")
        if not (np.all(np.isfinite(p)) and np.all(np.isfinite(r))):
            raise InvalidRay("non-finite ray")
        if abs(np.linalg.norm(r) - 1.0) > 1e-9:
            raise InvalidRay("direction must be a unit vector")
        object.__setattr__(self, "origin", p)
        object.__setattr__(self, "dir", r)


@dataclass(frozen=True)
class RayCastParams:
    t_max: float = 10.0
    sigma0: float | None = None  # defaults to t_max / 10
    eta_plus: float = 1.5
    eta_minus: float = 0.5
    delta: float = 0.001
    safety: float = 0.98

    def __post_init__(self):
        if self.t_max <= 0.0:
            raise InvalidParameter("t_max must be positive")
        if self.sigma0 is None:
            object.__setattr__(self, "sigma0", self.t_max / 10.0)
        if self.sigma0 <= 0.0:
            raise InvalidParameter("sigma0 must be positive")
        if self.eta_plus <= 1.0:
            raise InvalidParameter("eta_plus must exceed 1")
        if not 0.0 < self.eta_minus < 1.0:
            raise InvalidParameter("eta_minus must lie in (0, 1)")
        if self.delta <= 0.0:
            raise InvalidParameter("delta must be positive")
        if not 0.0 < self.safety <= 1.0:
            raise InvalidParameter("safety must lie in (0, 1]")


@dataclass(frozen=True)
class HitResult:
    hit: bool
    t: float = float("inf")

    @staticmethod
    def hit_at(t: float) -> "HitResult":
        return HitResult(True, t)

    @staticmethod
    def miss() -> "HitResult":
        return HitResult(False)


def _march_arrays(net, origins, dirs, params, policy, t_init=None, sigma_init=None):
    """Lockstep adaptive march for many rays.

    Per-ray updates are independent, so results are identical to marching
    each ray alone. Returns (hit, t, steps) arrays.
    """
    n = origins.shape[0]
    t = np.zeros(n) if t_init is None else np.array(t_init, dtype=np.float64)
    sigma = (
        np.full(n, params.sigma0)
        if sigma_init is None
        else np.array(sigma_init, dtype=np.float64)
    )
    steps = np.zeros(n)
    hit = np.zeros(n, dtype=bool)
    t_out = np.full(n, np.inf)
    if n == 0:
        return hit, t_out, steps

    f0 = eval_batch(net, origins)
    on_surface = f0 == 0.0
    hit[on_surface] = True
    t_out[on_surface] = 0.0
    neg0 = f0 < 0.0

    active = np.flatnonzero(~on_surface & (t < params.t_max))
    while active.size:
        pa = origins[active]
        ra = dirs[active]
        ta = t[active]
        # convergence test a distance delta ahead of the current position
        fc = eval_batch(net, pa + (ta + params.delta)[:, None] * ra)
        steps[active] += 1.0
        flip = (fc < 0.0) != neg0[active]
        hit_idx = active[flip]
        hit[hit_idx] = True
        t_out[hit_idx] = t[hit_idx]
        active = active[~flip]
        if active.size == 0:
            break
        pa, ra, ta = pa[~flip], ra[~flip], ta[~flip]
        sa = sigma[active]
        centers = pa + (ta + sa / 2.0)[:, None] * ra
        axes = ((sa / 2.0)[:, None] * ra)[:, None, :]
        lo, hi = range_bound_batch(net, centers, axes, policy)
        known = (lo > 0.0) | (hi < 0.0)
        sigma_star = np.where(known, sa, 0.0)
        sigma[active] = np.where(known, sa * params.eta_plus, sa * params.eta_minus)
        t[active] = ta + np.maximum(params.safety * sigma_star, params.delta)
        active = active[t[active] < params.t_max]
    return hit, t_out, steps


def cast_ray(
    net: NetworkSpec,
    ray: Ray,
    params: RayCastParams = RayCastParams(),
    policy: CondensationPolicy | None = None,
) -> HitResult:
    """Cast a single ray; see the module docstring for the contract."""
    return cast_rays(net, [ray], params, policy)[0]


def cast_rays(
    net: NetworkSpec,
    rays,
    params: RayCastParams = RayCastParams(),
    policy: CondensationPolicy | None = None,
    threads: int = 1,
) -> list[HitResult]:
    """Cast many rays; elementwise identical to cast_ray on each."""
    from .range_core import AFFINE_FIXED

    policy = AFFINE_FIXED if policy is None else policy
    rays = list(rays)
    if not rays:
        return []
    origins = np.stack([r.origin for r in rays])
    dirs = np.stack([r.dir for r in rays])
    if threads > 1 and len(rays) > 1:
        chunks = np.array_split(np.arange(len(rays)), threads)
        results: list = [None] * len(rays)
        with ThreadPoolExecutor(max_workers=threads) as pool:
            futs = {
                pool.submit(
                    _march_arrays, net, origins[c], dirs[c], params, policy
                ): c
                for c in chunks
                if c.size
            }
            for fut, c in futs.items():
                hit, t, _ = fut.result()
                for k, i in enumerate(c):
                    results[i] = HitResult(bool(hit[k]), float(t[k]))
        return results
    hit, t, _ = _march_arrays(net, origins, dirs, params, policy)
    return [HitResult(bool(h), float(tv)) for h, tv in zip(hit, t)]


@dataclass
class Frustum:
    """A rectangular block of pixel rays marching together."""

    px0: int
    px1: int
    py0: int
    py1: int
    corner_dirs: np.ndarray  # (4, 3) unit dirs at the extreme pixel centers
    t: float = 0.0
    sigma: float = 1.0

    @property
    def n_pixels(self) -> int:
        return (self.px1 - self.px0) * (self.py1 - self.py0)

    def front_widths(self) -> tuple[float, float]:
        """World widths (along x, along y) of the front face at parameter t."""
        r00, r10, r01, r11 = self.corner_dirs
        wx = max(np.linalg.norm(r10 - r00), np.linalg.norm(r11 - r01))
        wy = max(np.linalg.norm(r01 - r00), np.linalg.norm(r11 - r10))
        return self.t * wx, self.t * wy


@dataclass
class FrustumCastResult:
    hit: np.ndarray  # (H, W) bool
    t: np.ndarray  # (H, W) float, inf on miss
    steps: np.ndarray  # (H, W) amortized marching steps per pixel

    def total_steps(self) -> float:
        return float(self.steps.sum())


def _corner_dirs(camera: Camera, px0, px1, py0, py1) -> np.ndarray:
    return np.stack(
        [
            camera.pixel_dir(px0, py1 - 1),
            camera.pixel_dir(px1 - 1, py1 - 1),
            camera.pixel_dir(px0, py0),
            camera.pixel_dir(px1 - 1, py0),
        ]
    )


def cast_frustum_image(
    net: NetworkSpec,
    camera: Camera,
    params: RayCastParams = RayCastParams(),
    policy: CondensationPolicy | None = None,
    initial_grid: int = 16,
) -> FrustumCastResult:
    """March frusta over the pixel grid, splitting as they near the surface.

    Certified frustum steps cover every contained pixel ray, so the final
    per-pixel results satisfy the same contract as per-pixel casting: an
    identical hit mask and t within delta. A frustum whose slab box cannot
    be certified shrinks sigma without advancing (its pixels take their
    delta-fallback steps individually after reduction), so no multi-pixel
    step ever skips an uncertified region.
    """
    from .range_core import AFFINE_FIXED

    policy = AFFINE_FIXED if policy is None else policy
    w, h = camera.resolution
    gw, gh = min(initial_grid, w), min(initial_grid, h)
    if w % gw != 0 or h % gh != 0:
        raise InvalidCamera(
            f"resolution {w}x{h} not divisible into a {gw}x{gh} frustum grid"
        )
    hit = np.zeros((h, w), dtype=bool)
    t_out = np.full((h, w), np.inf)
    steps = np.zeros((h, w))

    f0 = float(eval_batch(net, camera.position[None, :])[0])
    if f0 == 0.0:
        return FrustumCastResult(np.ones((h, w), dtype=bool), np.zeros((h, w)), steps)

    frontier: list[Frustum] = []
    for by in range(gh):
        for bx in range(gw):
            px0, px1 = bx * (w // gw), (bx + 1) * (w // gw)
            py0, py1 = by * (h // gh), (by + 1) * (h // gh)
            frontier.append(
                Frustum(
                    px0, px1, py0, py1,
                    _corner_dirs(camera, px0, px1, py0, py1),
                    t=0.0, sigma=params.sigma0,
                )
            )

    pending: list[Frustum] = []  # single-pixel frusta, finished as rays below
    while frontier:
        marching: list[Frustum] = []
        stack = frontier
        frontier = []
        while stack:
            f = stack.pop()
            if f.n_pixels == 1:
                pending.append(f)
                continue
            if f.t >= params.t_max:
                continue  # whole block certified empty to t_max: miss
            wx, wy = f.front_widths()
            nx, ny = f.px1 - f.px0, f.py1 - f.py0
            dim = 0 if (nx >= ny and nx > 1) or ny == 1 else 1
            width = wx if dim == 0 else wy
            if width > 2.0 * f.sigma:
                if dim == 0:
                    mid = f.px0 + nx // 2
                    rects = [(f.px0, mid, f.py0, f.py1), (mid, f.px1, f.py0, f.py1)]
                else:
                    mid = f.py0 + ny // 2
                    rects = [(f.px0, f.px1, f.py0, mid), (f.px0, f.px1, mid, f.py1)]
                for rect in rects:
                    stack.append(
                        Frustum(*rect, _corner_dirs(camera, *rect), f.t, f.sigma)
                    )
                continue
            marching.append(f)
        if not marching:
            break
        boxes = [
            camera.frustum_slab_box(f.px0, f.px1, f.py0, f.py1, f.t, f.t + f.sigma)
            for f in marching
        ]
        s_max = max(b[1].shape[0] for b in boxes)
        centers = np.stack([b[0] for b in boxes])
        axes = np.zeros((len(boxes), s_max, 3))
        for i, (_, ax) in enumerate(boxes):
            axes[i, : ax.shape[0]] = ax
        lo, hi = range_bound_batch(net, centers, axes, policy)
        known = (lo > 0.0) | (hi < 0.0)
        for f, k in zip(marching, known):
            steps[f.py0 : f.py1, f.px0 : f.px1] += 1.0 / f.n_pixels
            if k:
                f.t += max(params.safety * f.sigma, params.delta)
                f.sigma *= params.eta_plus
            else:
                f.sigma *= params.eta_minus
            frontier.append(f)

    if pending:
        dirs = np.stack([camera.pixel_dir(f.px0, f.py0) for f in pending])
        origins = np.broadcast_to(camera.position, dirs.shape).copy()
        t0 = np.array([f.t for f in pending])
        s0 = np.array([f.sigma for f in pending])
        p_hit, p_t, p_steps = _march_arrays(
            net, origins, dirs, params, policy, t_init=t0, sigma_init=s0
        )
        for f, hh, tt, ss in zip(pending, p_hit, p_t, p_steps):
            hit[f.py0, f.px0] = hh
            t_out[f.py0, f.px0] = tt
            steps[f.py0, f.px0] += ss
    return FrustumCastResult(hit, t_out, steps)
