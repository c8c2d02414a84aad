"""Marching cubes extraction, dense and hierarchical.

Both paths share one polygonizer, one grid coordinate rule and the
deterministic network evaluator, so a grid cell produces bit-identical
triangles whichever path visits it. The hierarchical path prunes blocks
certified single-signed by range analysis; such blocks contain no corner
sign change, hence no triangles, so pruning never alters the output.
"""

from __future__ import annotations

import numpy as np

from .errors import ResolutionTooSmall
from .mc_tables import CORNERS, EDGES, TRI_TABLE
from .network import NetworkSpec, eval_batch
from .range_core import AFFINE_FULL, CondensationPolicy, range_bound_batch
from .spatial import AABB, TriangleMesh, _check_domain

_EVAL_CHUNK = 65536


def _grid_coords(bounds: AABB, m: int):
    """Per-axis corner coordinates of the 2**m cell grid."""
    n = 2**m
    return [np.linspace(bounds.lo[k], bounds.hi[k], n + 1) for k in range(3)]


class _MeshBuilder:
    """Accumulates triangles with vertices deduplicated by global grid edge."""

    def __init__(self, coords):
        self.coords = coords
        self.vertex_ids: dict = {}
        self.vertices: list[np.ndarray] = []
        self.triangles: list[tuple[int, int, int]] = []

    def _vertex(self, cell, edge, values):
        a, b = EDGES[edge]
        ia = (cell[0] + CORNERS[a][0], cell[1] + CORNERS[a][1], cell[2] + CORNERS[a][2])
        ib = (cell[0] + CORNERS[b][0], cell[1] + CORNERS[b][1], cell[2] + CORNERS[b][2])
        key = (ia, ib) if ia <= ib else (ib, ia)
        vid = self.vertex_ids.get(key)
        if vid is None:
            fa, fb = values[a], values[b]
            t = (0.0 - fa) / (fb - fa)
            pa = np.array([self.coords[k][ia[k]] for k in range(3)])
            pb = np.array([self.coords[k][ib[k]] for k in range(3)])
            vid = len(self.vertices)
            self.vertices.append(pa + t * (pb - pa))
            self.vertex_ids[key] = vid
        return vid

    def add_cell(self, cell, values):
        """values: the 8 corner samples in the canonical corner order."""
        case = 0
        for c in range(8):
            if values[c] < 0.0:
                case |= 1 << c
        for tri in TRI_TABLE[case]:
            self.triangles.append(tuple(self._vertex(cell, e, values) for e in tri))

    def build(self) -> TriangleMesh:
        if not self.vertices:
            return TriangleMesh(np.zeros((0, 3)), np.zeros((0, 3), dtype=np.int64))
        return TriangleMesh(np.stack(self.vertices), np.array(self.triangles))


def _polygonize_block(builder, values, origin):
    """Run marching cubes over a dense value block.

    values has shape (nx+1, ny+1, nz+1); origin is the global grid index of
    its lower corner. Only cells with mixed corner signs are visited.
    """
    inside = values < 0.0
    case = np.zeros(tuple(s - 1 for s in values.shape), dtype=np.uint16)
    for c, (dx, dy, dz) in enumerate(CORNERS):
        nx, ny, nz = case.shape
        case |= inside[dx : dx + nx, dy : dy + ny, dz : dz + nz].astype(np.uint16) << c
    for i, j, k in np.argwhere((case != 0) & (case != 255)):
        corner_vals = [
            values[i + dx, j + dy, k + dz] for dx, dy, dz in CORNERS
        ]
        builder.add_cell((origin[0] + i, origin[1] + j, origin[2] + k), corner_vals)


def _eval_grid(net, coords, ranges):
    """Evaluate the corner grid of an index range, chunked."""
    (i0, i1), (j0, j1), (k0, k1) = ranges
    xs = coords[0][i0 : i1 + 1]
    ys = coords[1][j0 : j1 + 1]
    zs = coords[2][k0 : k1 + 1]
    pts = np.stack(np.meshgrid(xs, ys, zs, indexing="ij"), axis=-1).reshape(-1, 3)
    vals = np.empty(len(pts))
    for s in range(0, len(pts), _EVAL_CHUNK):
        vals[s : s + _EVAL_CHUNK] = eval_batch(net, pts[s : s + _EVAL_CHUNK])
    return vals.reshape(len(xs), len(ys), len(zs))


def extract_mesh_dense(net: NetworkSpec, bounds: AABB, m: int) -> TriangleMesh:
    """Brute-force extraction over the full 2**m grid (the reference path)."""
    _check_domain(net, bounds)
    n = 2**m
    coords = _grid_coords(bounds, m)
    values = _eval_grid(net, coords, ((0, n), (0, n), (0, n)))
    builder = _MeshBuilder(coords)
    _polygonize_block(builder, values, (0, 0, 0))
    return builder.build()


def extract_mesh(
    net: NetworkSpec,
    bounds: AABB,
    m: int,
    dense_levels: int = 3,
    policy: CondensationPolicy = AFFINE_FULL,
) -> TriangleMesh:
    """Hierarchical extraction at resolution 2**m.

    A k-d subdivision over cell-index ranges refines to depth
    3*(m - dense_levels), discarding ranges certified single-signed;
    surviving blocks (2**dense_levels cells per side) are extracted
    densely. Output is identical to extract_mesh_dense up to vertex and
    triangle ordering.
    """
    _check_domain(net, bounds)
    if m <= dense_levels:
        raise ResolutionTooSmall(
            f"resolution exponent {m} must exceed dense_levels {dense_levels}"
        )
    n = 2**m
    coords = _grid_coords(bounds, m)

    def world_box(ranges):
        lo = np.array([coords[k][ranges[k][0]] for k in range(3)])
        hi = np.array([coords[k][ranges[k][1]] for k in range(3)])
        return lo, hi

    def keep_unknown(blocks):
        centers = np.empty((len(blocks), 3))
        axes = np.zeros((len(blocks), 3, 3))
        for idx, rng in enumerate(blocks):
            lo, hi = world_box(rng)
            centers[idx] = (lo + hi) / 2.0
            np.fill_diagonal(axes[idx], (hi - lo) / 2.0)
        lo_v, hi_v = range_bound_batch(net, centers, axes, policy)
        return [b for b, l, h in zip(blocks, lo_v, hi_v) if l <= 0.0 <= h]

    blocks = [((0, n), (0, n), (0, n))]
    for _ in range(3 * (m - dense_levels)):
        blocks = keep_unknown(blocks)
        nxt = []
        for rng in blocks:
            sizes = [rng[k][1] - rng[k][0] for k in range(3)]
            ax = int(np.argmax(sizes))
            mid = rng[ax][0] + sizes[ax] // 2
            a = list(rng)
            b = list(rng)
            a[ax] = (rng[ax][0], mid)
            b[ax] = (mid, rng[ax][1])
            nxt.extend((tuple(a), tuple(b)))
        blocks = nxt
    blocks = keep_unknown(blocks)

    builder = _MeshBuilder(coords)
    for rng in blocks:
        values = _eval_grid(net, coords, rng)
        _polygonize_block(builder, values, (rng[0][0], rng[1][0], rng[2][0]))
    return builder.build()
