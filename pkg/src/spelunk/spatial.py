"""Branch-and-bound spatial queries over implicit networks.

Everything here is built on one primitive: a k-d bounding tree whose nodes
are certified POSITIVE or NEGATIVE by range analysis, with UNKNOWN nodes
subdivided until they are either classified or smaller than delta/sqrt(d)
(at which point they are within delta of the level set under the
dilation/contraction correctness criterion). Queries differ mainly in the
refinement rule and in how the leaves are consumed.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DepthOverflow,
    DimensionMismatch,
    EmptyBand,
    InvalidBounds,
    InvalidParameter,
    NoSurfaceFound,
    OnSurface,
)
from .network import NetworkSpec, eval_batch, eval_scalar
from .range_core import (
    AFFINE_FIXED,
    AFFINE_FULL,
    CondensationPolicy,
    SignClass,
    classify,
    range_bound_batch,
)

_MAX_DEPTH = 60
_CLASSIFY_CHUNK = 4096


@dataclass(frozen=True)
class AABB:
    lo: np.ndarray
    hi: np.ndarray

    def __post_init__(self):
        lo = np.asarray(self.lo, dtype=np.float64)
        hi = np.asarray(self.hi, dtype=np.float64)
        if lo.shape != hi.shape or lo.ndim != 1:
            raise InvalidBounds("corners must be 1-d points of equal dimension")
        if not (np.all(np.isfinite(lo)) and np.all(np.isfinite(hi))):
            raise InvalidBounds("non-finite bounds")
        if np.any(lo > hi):
            raise InvalidBounds("lower corner exceeds upper corner")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @classmethod
    def _trusted(cls, lo: np.ndarray, hi: np.ndarray) -> "AABB":
        # fast path for internally generated (already valid) corners
        box = object.__new__(cls)
        object.__setattr__(box, "lo", lo)
        object.__setattr__(box, "hi", hi)
        return box

    @property
    def dim(self) -> int:
        return self.lo.shape[0]

    @property
    def center(self) -> np.ndarray:
        return (self.lo + self.hi) / 2.0

    @property
    def extents(self) -> np.ndarray:
        return self.hi - self.lo

    @property
    def volume(self) -> float:
        return float(np.prod(self.extents))

    def split(self) -> tuple["AABB", "AABB"]:
        """Halve along the widest dimension (ties to the lowest index)."""
        i = int(np.argmax(self.extents))
        mid = 0.5 * (self.lo[i] + self.hi[i])
        hi_a = self.hi.copy()
        hi_a[i] = mid
        lo_b = self.lo.copy()
        lo_b[i] = mid
        return AABB(self.lo, hi_a), AABB(lo_b, self.hi)

    def face_centers(self) -> np.ndarray:
        """The 2d face-center points."""
        c = self.center
        half = self.extents / 2.0
        pts = np.tile(c, (2 * self.dim, 1))
        for i in range(self.dim):
            pts[2 * i, i] = c[i] - half[i]
            pts[2 * i + 1, i] = c[i] + half[i]
        return pts


@dataclass
class TreeNode:
    aabb: AABB
    sign: SignClass
    depth: int
    children: tuple["TreeNode", "TreeNode"] | None = None
    face_sign: int | None = None  # sampled sign annotation on tiny UNKNOWN leaves

    @property
    def is_leaf(self) -> bool:
        return self.children is None


def iter_leaves(root: TreeNode):
    stack = [root]
    while stack:
        node = stack.pop()
        if node.is_leaf:
            yield node
        else:
            stack.extend(node.children)


@dataclass(frozen=True)
class TriangleMesh:
    vertices: np.ndarray  # (v, 3)
    triangles: np.ndarray  # (t, 3) int

    def __post_init__(self):
        v = np.asarray(self.vertices, dtype=np.float64).reshape(-1, 3)
        t = np.asarray(self.triangles, dtype=np.int64).reshape(-1, 3)
        if v.size and not np.all(np.isfinite(v)):
            raise InvalidParameter("mesh vertices must be finite")
        if t.size and (t.min() < 0 or t.max() >= len(v)):
            raise InvalidParameter("triangle indices out of range")
        object.__setattr__(self, "vertices", v)
        object.__setattr__(self, "triangles", t)


@dataclass(frozen=True)
class BulkProperties:
    mass: float
    centroid: np.ndarray
    inertia: np.ndarray  # 3x3, about the centroid, uniform unit density
    mass_error_bound: float


@dataclass(frozen=True)
class EmptyRegion:
    radius: float
    certified: bool


@dataclass(frozen=True)
class IntersectionResult:
    kind: str  # "intersecting" | "disjoint" | "inconclusive"
    witness: AABB | None = None
    nodes: tuple = ()


def _check_domain(net: NetworkSpec, bounds: AABB):
    if bounds.dim != net.input_dim:
        raise DimensionMismatch(
            f"bounds in R^{bounds.dim}, network expects R^{net.input_dim}"
        )
    if np.any(bounds.extents <= 0.0):
        raise InvalidBounds("bounds must have positive extent")


def _classify_corners(net, los, his, policy, chunk=_CLASSIFY_CHUNK):
    """Batched range_bound over axis-aligned nodes given corner arrays."""
    n, d = los.shape
    lo_out = np.empty(n)
    hi_out = np.empty(n)
    idx = np.arange(d)
    for start in range(0, n, chunk):
        lo_c = los[start : start + chunk]
        hi_c = his[start : start + chunk]
        axes = np.zeros((len(lo_c), d, d))
        axes[:, idx, idx] = (hi_c - lo_c) / 2.0
        lo, hi = range_bound_batch(net, (lo_c + hi_c) / 2.0, axes, policy)
        lo_out[start : start + len(lo_c)] = lo
        hi_out[start : start + len(lo_c)] = hi
    return lo_out, hi_out


def _split_corners(los, his):
    """Vectorized midpoint split along each node's widest dimension."""
    n = los.shape[0]
    rows = np.arange(n)
    widest = np.argmax(his - los, axis=1)
    mid = 0.5 * (los[rows, widest] + his[rows, widest])
    hi_a = his.copy()
    hi_a[rows, widest] = mid
    lo_b = los.copy()
    lo_b[rows, widest] = mid
    return np.concatenate([los, lo_b]), np.concatenate([hi_a, his])


def _face_center_points(los, his):
    """Face centers for each node: (n, 2d, d) array."""
    n, d = los.shape
    c = (los + his) / 2.0
    half = (his - los) / 2.0
    pts = np.broadcast_to(c[:, None, :], (n, 2 * d, d)).copy()
    for i in range(d):
        pts[:, 2 * i, i] = c[:, i] - half[:, i]
        pts[:, 2 * i + 1, i] = c[:, i] + half[:, i]
    return pts


def build_spatial_tree(
    net: NetworkSpec,
    bounds: AABB,
    delta: float = 0.001,
    policy: CondensationPolicy = AFFINE_FULL,
    max_depth: int | None = None,
) -> TreeNode:
    """Build a k-d bounding tree of the level set over bounds.

    Nodes certified single-signed become leaves immediately. With
    max_depth=None the tree refines to convergence: UNKNOWN nodes split at
    the midpoint of their widest dimension until their largest extent drops
    below delta/sqrt(d); such leaves carry a face-sampled sign annotation
    when all 2d face centers agree. With an integer max_depth, UNKNOWN
    nodes simply stop at that depth. Frontier levels are classified in
    batched rounds.
    """
    _check_domain(net, bounds)
    if delta <= 0.0:
        raise InvalidParameter("delta must be positive")
    if max_depth is not None and max_depth > _MAX_DEPTH:
        raise DepthOverflow(f"fixed depth {max_depth} exceeds {_MAX_DEPTH}")
    stop_extent = delta / np.sqrt(bounds.dim)
    root = TreeNode(bounds, SignClass.UNKNOWN, 0)
    nodes = [root]
    los = bounds.lo[None, :].copy()
    his = bounds.hi[None, :].copy()
    depth = 0
    while nodes:
        lo_v, hi_v = _classify_corners(net, los, his, policy)
        split_mask = np.zeros(len(nodes), dtype=bool)
        small_idx: list[int] = []
        for i, node in enumerate(nodes):
            node.sign = classify(lo_v[i], hi_v[i])
            if node.sign is not SignClass.UNKNOWN:
                continue
            if max_depth is not None:
                if depth < max_depth:
                    split_mask[i] = True
            elif np.max(his[i] - los[i]) < stop_extent:
                small_idx.append(i)
            else:
                split_mask[i] = True
        if small_idx:
            pts = _face_center_points(los[small_idx], his[small_idx])
            vals = eval_batch(net, pts.reshape(-1, bounds.dim))
            vals = vals.reshape(len(small_idx), -1)
            for i, fv in zip(small_idx, vals):
                neg = np.any(fv < 0.0)
                pos = np.any(fv >= 0.0)
                if not (neg and pos):
                    nodes[i].face_sign = -1 if neg else 1
        if not np.any(split_mask):
            break
        split_los, split_his = los[split_mask], his[split_mask]
        child_los, child_his = _split_corners(split_los, split_his)
        k = len(split_los)
        children: list[TreeNode] = []
        for j, i in enumerate(np.flatnonzero(split_mask)):
            a = TreeNode(
                AABB._trusted(child_los[j], child_his[j]),
                SignClass.UNKNOWN,
                depth + 1,
            )
            b = TreeNode(
                AABB._trusted(child_los[k + j], child_his[k + j]),
                SignClass.UNKNOWN,
                depth + 1,
            )
            nodes[i].children = (a, b)
            children.extend((a, b))
        # arrays are laid out (all first halves..., all second halves...)
        nodes = children[0::2] + children[1::2]
        los, his = child_los, child_his
        depth += 1
    return root


def empty_box_radius(
    net: NetworkSpec,
    p,
    r_init: float,
    policy: CondensationPolicy = AFFINE_FULL,
    delta: float = 0.001,
) -> EmptyRegion:
    """Largest certified-empty cube half-extent at p found by halving.

    The inscribed sphere of the cube has the same radius. Halving stops
    below delta; an uncertifiable point reports radius 0, not certified.
    """
    point = np.asarray(p, dtype=np.float64)
    if r_init <= 0.0:
        raise InvalidParameter("r_init must be positive")
    if eval_scalar(net, point) == 0.0:
        raise OnSurface(f"f{tuple(point)} = 0")
    r = float(r_init)
    d = point.shape[0]
    while r >= delta:
        axes = np.zeros((1, d, d))
        np.fill_diagonal(axes[0], r)
        lo, hi = range_bound_batch(net, point[None, :], axes, policy)
        if lo[0] > 0.0 or hi[0] < 0.0:
            return EmptyRegion(r, True)
        r /= 2.0
    return EmptyRegion(0.0, False)


def _certified_radii(net, points, r_start, floor, policy):
    """Vectorized empty-cube halving for many points at once.

    Returns radii (0 where no cube of half-extent >= floor certifies).
    """
    n, d = points.shape
    r = np.array(r_start, dtype=np.float64)
    out = np.zeros(n)
    undecided = np.arange(n)
    while undecided.size:
        active = undecided[r[undecided] >= floor]
        dropped = undecided[r[undecided] < floor]
        out[dropped] = 0.0
        if active.size == 0:
            break
        axes = np.zeros((active.size, d, d))
        idx = np.arange(d)
        axes[:, idx, idx] = r[active][:, None]
        lo, hi = range_bound_batch(net, points[active], axes, policy)
        ok = (lo > 0.0) | (hi < 0.0)
        out[active[ok]] = r[active[ok]]
        rest = active[~ok]
        r[rest] /= 2.0
        undecided = rest
    return out


def walk_on_spheres_stats(
    net: NetworkSpec,
    p,
    boundary_fn,
    n_walks: int,
    rng_seed: int = 0,
    delta: float = 0.001,
    policy: CondensationPolicy = AFFINE_FULL,
    r_cap: float = 1.0,
    max_rounds: int = 10_000,
) -> tuple[float, float]:
    """Monte-Carlo estimate of a harmonic function at p, with its standard
    error, from n_walks walk-on-spheres trajectories.

    Each walk jumps to a uniform point on the inscribed sphere of the
    largest certified empty cube, and stops when no clearance of at least
    2*delta can be certified, evaluating the Dirichlet data boundary_fn at
    the stop point. Deterministic for a fixed seed.
    """
    point = np.asarray(p, dtype=np.float64)
    if eval_scalar(net, point) == 0.0:
        raise OnSurface(f"f{tuple(point)} = 0")
    if n_walks < 1:
        raise InvalidParameter("n_walks must be >= 1")
    rng = np.random.default_rng(rng_seed)
    pos = np.tile(point, (n_walks, 1))
    values = np.empty(n_walks)
    alive = np.arange(n_walks)
    floor = 2.0 * delta
    guess = np.full(n_walks, r_cap)
    for _ in range(max_rounds):
        if alive.size == 0:
            break
        radii = _certified_radii(net, pos[alive], guess[alive], floor, policy)
        stopped = radii == 0.0
        for i in alive[stopped]:
            values[i] = float(boundary_fn(pos[i]))
        alive = alive[~stopped]
        if alive.size == 0:
            break
        r = radii[~stopped]
        dirs = rng.standard_normal((alive.size, point.shape[0]))
        dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
        pos[alive] += r[:, None] * dirs
        guess[alive] = np.minimum(r * 4.0, r_cap)
    else:
        raise InvalidParameter("walks failed to terminate; delta too small?")
    mean = float(values.mean())
    stderr = float(values.std(ddof=1) / np.sqrt(n_walks)) if n_walks > 1 else 0.0
    return mean, stderr


def walk_on_spheres(
    net: NetworkSpec,
    p,
    boundary_fn,
    n_walks: int,
    rng_seed: int = 0,
    delta: float = 0.001,
    policy: CondensationPolicy = AFFINE_FULL,
) -> float:
    mean, _ = walk_on_spheres_stats(
        net, p, boundary_fn, n_walks, rng_seed, delta, policy
    )
    return mean


def sample_near_surface(
    net: NetworkSpec,
    bounds: AABB,
    n_samples: int,
    band: float,
    depth: int,
    policy: CondensationPolicy = AFFINE_FULL,
    rng_seed: int = 0,
    max_evals: int | None = None,
) -> np.ndarray:
    """Sample n_samples points with |f| < band, rejection-sampling only
    inside tree nodes whose range interval intersects [-band, band].

    The tree refines to the fixed depth, discarding nodes certified
    f > band or f < -band along the way. Surviving nodes are chosen
    proportionally to volume.
    """
    _check_domain(net, bounds)
    if band <= 0.0 or depth < 1:
        raise InvalidParameter("band must be positive and depth >= 1")
    if depth > _MAX_DEPTH:
        raise DepthOverflow(f"depth {depth} exceeds {_MAX_DEPTH}")
    los, his = bounds.lo[None, :], bounds.hi[None, :]
    for _ in range(depth):
        lo, hi = _classify_corners(net, los, his, policy)
        keep = (lo <= band) & (hi >= -band)
        if not np.any(keep):
            raise EmptyBand("no node intersects the band")
        los, his = _split_corners(los[keep], his[keep])
    lo, hi = _classify_corners(net, los, his, policy)
    keep = (lo <= band) & (hi >= -band)
    if not np.any(keep):
        raise EmptyBand("no node intersects the band")
    los, his = los[keep], his[keep]

    rng = np.random.default_rng(rng_seed)
    volumes = np.prod(his - los, axis=1)
    weights = volumes / volumes.sum()
    budget = max_evals if max_evals is not None else max(200 * n_samples, 100_000)
    out = []
    got = 0
    spent = 0
    chunk = max(1024, n_samples)
    while got < n_samples:
        if spent >= budget:
            raise EmptyBand(f"sample budget {budget} exhausted at {got} samples")
        k = int(min(chunk, budget - spent))
        pick = rng.choice(len(weights), size=k, p=weights)
        pts = rng.uniform(los[pick], his[pick])
        vals = eval_batch(net, pts)
        spent += k
        ok = np.abs(vals) < band
        out.append(pts[ok])
        got += int(ok.sum())
    return np.concatenate(out)[:n_samples]


def bulk_properties(
    net: NetworkSpec,
    bounds: AABB,
    depth: int,
    samples_per_unknown_node: int = 64,
    rng_seed: int = 0,
    policy: CondensationPolicy = AFFINE_FULL,
) -> BulkProperties:
    """Mass, centroid and inertia of the interior, uniform unit density.

    NEGATIVE leaves contribute their exact box moments. UNKNOWN leaves are
    estimated by stratified uniform sampling of the inside fraction. The
    mass error bound is the total UNKNOWN volume: each such node's true
    contribution lies in [0, volume].
    """
    _check_domain(net, bounds)
    if depth < 1:
        raise InvalidParameter("depth must be >= 1")
    if depth > _MAX_DEPTH:
        raise DepthOverflow(f"depth {depth} exceeds {_MAX_DEPTH}")
    in_lo, in_hi = [], []
    un_lo, un_hi = [], []
    los, his = bounds.lo[None, :], bounds.hi[None, :]
    for level in range(depth + 1):
        lo_v, hi_v = _classify_corners(net, los, his, policy)
        negative = hi_v < 0.0
        unknown = (lo_v <= 0.0) & (hi_v >= 0.0)
        in_lo.append(los[negative])
        in_hi.append(his[negative])
        if level == depth:
            un_lo.append(los[unknown])
            un_hi.append(his[unknown])
            break
        los, his = _split_corners(los[unknown], his[unknown])
        if los.size == 0:
            break
    inside_lo = np.concatenate(in_lo) if in_lo else np.zeros((0, 3))
    inside_hi = np.concatenate(in_hi) if in_hi else np.zeros((0, 3))
    unk_lo = np.concatenate(un_lo) if un_lo else np.zeros((0, 3))
    unk_hi = np.concatenate(un_hi) if un_hi else np.zeros((0, 3))

    mass = 0.0
    first = np.zeros(3)
    second = np.zeros((3, 3))  # integral of x x^T
    if len(inside_lo):
        ext = inside_hi - inside_lo
        vol = np.prod(ext, axis=1)
        c = (inside_lo + inside_hi) / 2.0
        h = ext / 2.0
        mass += float(vol.sum())
        first += vol @ c
        second += np.einsum("n,ni,nj->ij", vol, c, c)
        second += np.diag(np.einsum("n,ni->i", vol, h * h) / 3.0)

    err = float(np.prod(unk_hi - unk_lo, axis=1).sum()) if len(unk_lo) else 0.0
    if len(unk_lo):
        k = max(1, round(samples_per_unknown_node ** (1.0 / 3.0)))
        rng = np.random.default_rng(rng_seed)
        # stratified: one uniform sample per k^3 subcell of each node
        grid = np.stack(
            np.meshgrid(*[np.arange(k)] * 3, indexing="ij"), axis=-1
        ).reshape(-1, 3)
        ext = unk_hi - unk_lo
        vol = np.prod(ext, axis=1)
        cell = ext / k
        jitter = rng.random((len(unk_lo), k**3, 3))
        pts = unk_lo[:, None, :] + (grid[None, :, :] + jitter) * cell[:, None, :]
        flat = pts.reshape(-1, 3)
        vals = np.empty(len(flat))
        for s in range(0, len(flat), 65536):
            vals[s : s + 65536] = eval_batch(net, flat[s : s + 65536])
        sel = (vals < 0.0).reshape(len(unk_lo), k**3)
        w = vol / (k**3)
        mass += float((w * sel.sum(axis=1)).sum())
        masked = pts * sel[:, :, None]
        first += np.einsum("n,nsi->i", w, masked)
        second += np.einsum("n,nsi,nsj->ij", w, masked, pts)

    centroid = first / mass if mass > 0.0 else bounds.center
    s_c = second - mass * np.outer(centroid, centroid)
    inertia = np.trace(s_c) * np.eye(3) - s_c
    inertia = (inertia + inertia.T) / 2.0
    return BulkProperties(mass, centroid, inertia, err)


def test_intersection(
    net_a: NetworkSpec,
    net_b: NetworkSpec,
    bounds: AABB,
    delta: float = 0.001,
    policy: CondensationPolicy = AFFINE_FULL,
) -> IntersectionResult:
    """Do the two solids overlap anywhere inside bounds?

    Simultaneous subdivision: a node certified POSITIVE for either network
    cannot contain an intersection and is pruned; a node certified NEGATIVE
    for both is an interior witness. If the frontier refines down to
    delta-scale nodes without either outcome, the surfaces are within delta
    of touching.
    """
    _check_domain(net_a, bounds)
    _check_domain(net_b, bounds)
    stop = delta / np.sqrt(bounds.dim)
    los, his = bounds.lo[None, :], bounds.hi[None, :]
    inconclusive: list[AABB] = []
    while len(los):
        lo_a, hi_a = _classify_corners(net_a, los, his, policy)
        lo_b, hi_b = _classify_corners(net_b, los, his, policy)
        survive = (lo_a <= 0.0) & (lo_b <= 0.0)
        witness = survive & (hi_a < 0.0) & (hi_b < 0.0)
        if np.any(witness):
            i = int(np.flatnonzero(witness)[0])
            return IntersectionResult(
                "intersecting", witness=AABB(los[i], his[i])
            )
        tiny = survive & (np.max(his - los, axis=1) < stop)
        for i in np.flatnonzero(tiny):
            inconclusive.append(AABB(los[i], his[i]))
        split = survive & ~tiny
        los, his = _split_corners(los[split], his[split])
    if inconclusive:
        return IntersectionResult("inconclusive", nodes=tuple(inconclusive))
    return IntersectionResult("disjoint")


test_intersection.__test__ = False  # the name is API, not a pytest case


def closest_point(
    net: NetworkSpec,
    q,
    bounds: AABB,
    delta: float = 0.001,
    policy: CondensationPolicy = AFFINE_FIXED,
) -> tuple[np.ndarray, float]:
    """Nearest point on the level set, by lazy best-first tree descent.

    Nodes are visited in order of minimum distance to q. A node whose face
    centers carry both signs necessarily spans the surface: it updates the
    reported bound with its farthest-corner distance and its center as the
    candidate point. Nodes bounded away from the level set, or farther
    than the current bound, are pruned. Pruning additionally uses the
    distance to an actual surface point bisected between two face centers
    of opposite sign; that distance upper-bounds the true answer much more
    tightly than any farthest-corner estimate, which keeps the frontier
    near the minimizer, without changing the reported value's contract.
    """
    _check_domain(net, bounds)
    point = np.asarray(q, dtype=np.float64)
    if not np.all(np.isfinite(point)):
        raise InvalidParameter("query point must be finite")
    stop = delta / np.sqrt(bounds.dim)

    def min_dist(box: AABB) -> float:
        gap = np.maximum(np.maximum(box.lo - point, point - box.hi), 0.0)
        return float(np.linalg.norm(gap))

    def far_dist(box: AABB) -> float:
        reach = np.maximum(np.abs(point - box.lo), np.abs(point - box.hi))
        return float(np.linalg.norm(reach))

    def bisect_surface(p_neg, p_pos):
        for _ in range(30):
            mid = 0.5 * (p_neg + p_pos)
            if eval_batch(net, mid[None, :])[0] < 0.0:
                p_neg = mid
            else:
                p_pos = mid
        return 0.5 * (p_neg + p_pos)

    best = np.inf  # reported: farthest-corner bound of the best spanning node
    prune = np.inf  # distance to a witnessed surface point
    best_point: np.ndarray | None = None
    tie = 0
    heap: list = [(min_dist(bounds), tie, bounds)]
    while heap:
        md, _, box = heapq.heappop(heap)
        if md >= min(best, prune):
            continue
        centers = box.center[None, :]
        axes = np.zeros((1, box.dim, box.dim))
        np.fill_diagonal(axes[0], box.extents / 2.0)
        lo, hi = range_bound_batch(net, centers, axes, policy)
        if lo[0] > 0.0 or hi[0] < 0.0:
            continue
        faces = box.face_centers()
        vals = eval_batch(net, faces)
        neg = vals < 0.0
        if np.any(neg) and not np.all(neg):
            fd = far_dist(box)
            if fd < best:
                best = fd
                best_point = box.center
            on_surface = bisect_surface(
                faces[np.argmin(vals)], faces[np.argmax(vals)]
            )
            # margin covers the ~diam/2^30 bisection error; anything larger
            # widens the frontier disk around the minimizer quadratically
            prune = min(prune, float(np.linalg.norm(on_surface - point)) + 1e-6)
        elif np.any(vals == 0.0):
            # a face center sits exactly on the level set: a valid witness
            witness = faces[np.argmin(np.abs(vals))]
            prune = min(prune, float(np.linalg.norm(witness - point)) + 1e-6)
        if np.max(box.extents) < stop:
            continue
        for child in box.split():
            cmd = min_dist(child)
            if cmd < min(best, prune):
                tie += 1
                heapq.heappush(heap, (cmd, tie, child))
    if best_point is None:
        raise NoSurfaceFound("no level set found inside bounds")
    return best_point, best


# ---------------------------------------------------------------------------
# Exports


def save_obj(mesh: TriangleMesh, path) -> None:
    """Wavefront OBJ: 'v x y z' vertices and 1-based 'f i j k' faces."""
    with open(path, "w", encoding="utf-8") as f:
        for v in mesh.vertices:
            f.write(f"v {v[0]:.17g} {v[1]:.17g} {v[2]:.17g}\n")
        for t in mesh.triangles:
            f.write(f"f {t[0] + 1} {t[1] + 1} {t[2] + 1}\n")


def save_xyz(points: np.ndarray, path) -> None:
    """One 'x y z' line per sample point."""
    with open(path, "w", encoding="utf-8") as f:
        for p in np.asarray(points).reshape(-1, 3):
            f.write(f"{p[0]:.17g} {p[1]:.17g} {p[2]:.17g}\n")
