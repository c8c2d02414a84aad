"""Image assembly from ray casts, shading, and bit-exact file output."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .camera import Camera
from .errors import InvalidImage, InvalidParameter
from .network import NetworkSpec, eval_batch
from .range_core import AFFINE_FIXED, CondensationPolicy
from .rays import RayCastParams, cast_frustum_image, _march_arrays

BACKGROUND = np.array([24, 28, 38], dtype=np.uint8)
LIGHT_DIR = np.array([0.35, 0.75, 0.56])
LIGHT_DIR = LIGHT_DIR / np.linalg.norm(LIGHT_DIR)


@dataclass(frozen=True)
class Image:
    width: int
    height: int
    pixels: np.ndarray  # (height, width, 3) uint8, row 0 at the top

    def __post_init__(self):
        px = np.asarray(self.pixels, dtype=np.uint8)
        if px.shape != (self.height, self.width, 3):
            raise InvalidImage(
                f"pixel buffer {px.shape} does not match {self.width}x{self.height}"
            )
        object.__setattr__(self, "pixels", px)


def _fixed_step_march(net, origins, dirs, step, params):
    """The small-fixed-steps baseline: sample at t = k*step and report the
    first observed sign change. May step over thin features entirely."""
    n = origins.shape[0]
    hit = np.zeros(n, dtype=bool)
    t_out = np.full(n, np.inf)
    f0 = eval_batch(net, origins)
    neg0 = f0 < 0.0
    on_surface = f0 == 0.0
    hit[on_surface] = True
    t_out[on_surface] = 0.0
    alive = np.flatnonzero(~on_surface)
    t = step
    while alive.size and t < params.t_max:
        fc = eval_batch(net, origins[alive] + t * dirs[alive])
        flip = (fc < 0.0) != neg0[alive]
        found = alive[flip]
        hit[found] = True
        t_out[found] = t - step  # last same-signed sample, as in cast_ray
        alive = alive[~flip]
        t += step
    return hit, t_out


def _refine_hits(net, origins, dirs, t, neg0, delta, iters=48):
    """Bisect the bracketing interval [t, t + delta] down to fp resolution.

    Both the per-ray and the frustum march report a t whose forward sample
    flipped sign, so the bracket is valid; refining makes the shading point
    effectively independent of which march produced it.
    """
    lo = t.copy()
    hi = t + delta
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        fm = eval_batch(net, origins + mid[:, None] * dirs)
        flip = (fm < 0.0) != neg0
        hi = np.where(flip, mid, hi)
        lo = np.where(flip, lo, mid)
    return lo


def _normals(net, pts, h):
    g = np.empty_like(pts)
    for k in range(3):
        offset = np.zeros(3)
        offset[k] = h
        g[:, k] = eval_batch(net, pts + offset) - eval_batch(net, pts - offset)
    norm = np.linalg.norm(g, axis=1, keepdims=True)
    norm[norm == 0.0] = 1.0
    return g / norm


def render_image(
    net: NetworkSpec,
    camera: Camera,
    params: RayCastParams = RayCastParams(),
    policy: CondensationPolicy = AFFINE_FIXED,
    mode: str = "per_ray",
    step: float | None = None,
    threads: int = 1,
) -> Image:
    """Render primary rays with Lambert shading of the implicit surface.

    mode is one of per_ray, frustum, fixed_step. Hits are shaded by
    max(0, n . l) with the normal taken from central differences
    (h = delta/10) at the bisection-refined hit point; misses get a
    constant background. fixed_step is the uniform-marching baseline and
    needs step; it can miss surfaces thinner than the step. threads > 1
    marches row bands in parallel in per_ray mode (identical output).
    """
    w, h = camera.resolution
    dirs = camera.pixel_dirs().reshape(-1, 3)
    origins = np.broadcast_to(camera.position, dirs.shape).copy()
    if mode == "per_ray":
        if threads > 1:
            from concurrent.futures import ThreadPoolExecutor

            bands = np.array_split(np.arange(len(dirs)), threads)
            hit = np.zeros(len(dirs), dtype=bool)
            t = np.full(len(dirs), np.inf)
            with ThreadPoolExecutor(max_workers=threads) as pool:
                futs = {
                    pool.submit(
                        _march_arrays, net, origins[b], dirs[b], params, policy
                    ): b
                    for b in bands
                    if b.size
                }
                for fut, b in futs.items():
                    bh, bt, _ = fut.result()
                    hit[b] = bh
                    t[b] = bt
        else:
            hit, t, _ = _march_arrays(net, origins, dirs, params, policy)
    elif mode == "frustum":
        res = cast_frustum_image(net, camera, params, policy)
        hit, t = res.hit.reshape(-1), res.t.reshape(-1)
    elif mode == "fixed_step":
        if step is None or step <= 0.0:
            raise InvalidParameter("fixed_step mode needs a positive step")
        hit, t = _fixed_step_march(net, origins, dirs, step, params)
    else:
        raise InvalidParameter(f"unknown render mode {mode!r}")

    pixels = np.empty((h * w, 3), dtype=np.uint8)
    pixels[:] = BACKGROUND
    idx = np.flatnonzero(hit)
    if idx.size:
        f0 = eval_batch(net, camera.position[None, :])[0]
        neg0 = np.full(idx.size, f0 < 0.0)
        t_ref = _refine_hits(net, origins[idx], dirs[idx], t[idx], neg0, params.delta)
        pts = origins[idx] + t_ref[:, None] * dirs[idx]
        n = _normals(net, pts, params.delta / 10.0)
        lambert = np.clip(n @ LIGHT_DIR, 0.0, 1.0)
        gray = np.rint(lambert * 255.0).astype(np.uint8)
        pixels[idx] = gray[:, None]
    return Image(w, h, pixels.reshape(h, w, 3))


def write_image(img: Image, path, fmt: str | None = None) -> None:
    """Write PPM (binary P6, maxval 255) or PNG (8-bit truecolor).

    fmt is "ppm" or "png"; inferred from the path suffix when omitted.
    """
    if img.width < 1 or img.height < 1 or img.pixels.size == 0:
        raise InvalidImage("refusing to write an empty image")
    if fmt is None:
        fmt = str(path).rsplit(".", 1)[-1].lower()
    if fmt == "ppm":
        header = f"P6\n{img.width} {img.height}\n255\n".encode("ascii")
        with open(path, "wb") as f:
            f.write(header)
            f.write(img.pixels.tobytes())
    elif fmt == "png":
        from PIL import Image as PILImage

        PILImage.fromarray(img.pixels, mode="RGB").save(path, format="PNG")
    else:
        raise InvalidImage(f"unsupported image format {fmt!r}")


def read_ppm(path) -> Image:
    """Read back a binary P6 file written by write_image."""
    with open(path, "rb") as f:
        data = f.read()
    parts = data.split(b"\n", 3)
    if len(parts) != 4 or parts[0] != b"P6" or parts[2] != b"255":
        raise InvalidImage(f"{path} is not a P6 file with maxval 255")
    w, h = (int(v) for v in parts[1].split())
    px = np.frombuffer(parts[3], dtype=np.uint8, count=3 * w * h).reshape(h, w, 3)
    return Image(w, h, px.copy())
