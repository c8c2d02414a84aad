"""Pinhole camera model shared by the ray caster and the renderer."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidCamera


@dataclass(frozen=True)
class Camera:
    """Right-handed, y-up pinhole camera; pixel centers at half-integers.

    resolution is (width, height); row 0 of the image is the top.
    """

    position: np.ndarray
    look_at: np.ndarray
    up: np.ndarray
    vertical_fov: float  # degrees
    resolution: tuple[int, int]

    def __post_init__(self):
        pos = np.asarray(self.position, dtype=np.float64)
        tgt = np.asarray(self.look_at, dtype=np.float64)
        up = np.asarray(self.up, dtype=np.float64)
        if pos.shape != (3,) or tgt.shape != (3,) or up.shape != (3,):
            raise InvalidCamera("position, look_at and up must be 3-vectors")
        if not np.all(np.isfinite(pos)) or not np.all(np.isfinite(tgt)):
            raise InvalidCamera("non-finite camera parameters")
        w, h = self.resolution
        if w < 1 or h < 1:
            raise InvalidCamera(f"resolution must be at least 1x1, got {w}x{h}")
        if not 0.0 < self.vertical_fov < 180.0:
            raise InvalidCamera("vertical_fov must be in (0, 180) degrees")
        fwd = tgt - pos
        n = np.linalg.norm(fwd)
        if n == 0.0:
            raise InvalidCamera("look_at coincides with position")
        fwd = fwd / n
        right = np.cross(fwd, up)
        rn = np.linalg.norm(right)
        if rn < 1e-9:
            raise InvalidCamera("view direction is parallel to up")
        right = right / rn
        true_up = np.cross(right, fwd)
        object.__setattr__(self, "position", pos)
        object.__setattr__(self, "look_at", tgt)
        object.__setattr__(self, "up", up)
        object.__setattr__(self, "_frame", (fwd, right, true_up))

    @property
    def width(self) -> int:
        return self.resolution[0]

    @property
    def height(self) -> int:
        return self.resolution[1]

    @property
    def frame(self):
        """(forward, right, up) orthonormal basis."""
        return self._frame

    @property
    def half_extents(self):
        """Image-plane half extents at unit forward distance."""
        half_h = math.tan(math.radians(self.vertical_fov) / 2.0)
        return half_h * self.width / self.height, half_h

    def _u_center(self, i):
        half_w, _ = self.half_extents
        return ((np.asarray(i, dtype=np.float64) + 0.5) / self.width * 2.0 - 1.0) * half_w

    def _v_center(self, j):
        _, half_h = self.half_extents
        return (1.0 - (np.asarray(j, dtype=np.float64) + 0.5) / self.height * 2.0) * half_h

    def pixel_dirs(self) -> np.ndarray:
        """Unit ray directions for every pixel, shape (height, width, 3)."""
        fwd, right, true_up = self._frame
        u = self._u_center(np.arange(self.width))
        v = self._v_center(np.arange(self.height))
        d = (
            fwd[None, None, :]
            + u[None, :, None] * right[None, None, :]
            + v[:, None, None] * true_up[None, None, :]
        )
        return d / np.linalg.norm(d, axis=2, keepdims=True)

    def pixel_dir(self, i: int, j: int) -> np.ndarray:
        fwd, right, true_up = self._frame
        d = fwd + self._u_center(i) * right + self._v_center(j) * true_up
        return d / np.linalg.norm(d)

    def frustum_slab_box(self, px0, px1, py0, py1, t0, t1):
        """Oriented box containing every pixel-center ray of the rectangle
        [px0, px1) x [py0, py1) over the parameter range [t0, t1].

        A point on such a ray is p + s * g(u, v)/|g(u, v)| with
        g = forward + u*right + v*up analysed over the pixel-center (u, v)
        rectangle. Each frame-axis projection s * w(u, v) is monotone in u
        and in |v| (or symmetric), so its extremes over the rectangle occur
        at the corners or on the zero-clamped midlines; taking the hull over
        the nine candidate directions and the two parameter endpoints gives
        exact per-axis bounds. This covers the spherical bulge of the front
        face that a corner-ray box would miss.

        Returns (center, axes) with axes of shape (s, 3), degenerate axes
        dropped.
        """
        fwd, right, true_up = self._frame
        u0, u1 = self._u_center(px0), self._u_center(px1 - 1)
        v0, v1 = self._v_center(py1 - 1), self._v_center(py0)
        us = np.array([u0, u1, min(max(0.0, u0), u1)])
        vs = np.array([v0, v1, min(max(0.0, v0), v1)])
        uu, vv = np.meshgrid(us, vs)
        ell = np.sqrt(1.0 + uu**2 + vv**2)
        w = np.stack([1.0 / ell, uu / ell, vv / ell])  # fwd, right, up weights
        wmin = w.reshape(3, -1).min(axis=1)
        wmax = w.reshape(3, -1).max(axis=1)
        lo = np.minimum(t0 * wmin, t1 * wmin)
        hi = np.maximum(t0 * wmax, t1 * wmax)
        mid = (lo + hi) / 2.0
        half = (hi - lo) / 2.0
        center = self.position + mid[0] * fwd + mid[1] * right + mid[2] * true_up
        axes = [
            half[k] * vec
            for k, vec in enumerate((fwd, right, true_up))
            if half[k] > 0.0
        ]
        return center, np.array(axes) if axes else np.zeros((0, 3))
