"""Guaranteed geometric queries on neural implicit surfaces.

Bounds from interval and affine arithmetic certify the sign of an implicit
network over spatial regions; the query layer builds ray casting, spatial
hierarchies, meshing, sampling, integrals, intersection tests and closest
points on top of those certificates.
"""

from . import errors
from .network import (
    ActivationKind,
    DenseLayer,
    NetworkSpec,
    build_box_oracle,
    box_sdf,
    count_evals,
    eval_batch,
    eval_scalar,
    load_network,
    save_network,
)
from .range_core import (
    AFFINE_FIXED,
    AFFINE_FULL,
    INTERVAL_ONLY,
    AffineForm,
    CondensationPolicy,
    Interval,
    QueryBox,
    SignClass,
    affine_linear,
    affine_nonlinear,
    affine_truncate,
    box_to_affine,
    condense,
    interval_forward,
    interval_of,
    parse_policy,
    range_bound,
    range_bound_batch,
    truncate,
)
from .camera import Camera
from .rays import (
    Frustum,
    HitResult,
    Ray,
    RayCastParams,
    cast_frustum_image,
    cast_ray,
    cast_rays,
)
from .spatial import (
    AABB,
    BulkProperties,
    TreeNode,
    TriangleMesh,
    build_spatial_tree,
    bulk_properties,
    closest_point,
    empty_box_radius,
    iter_leaves,
    sample_near_surface,
    save_obj,
    save_xyz,
    test_intersection,
    walk_on_spheres,
    walk_on_spheres_stats,
)
from .meshing import extract_mesh, extract_mesh_dense
from .render import Image, read_ppm, render_image, write_image
from .bench import bench_variants, fuzz_soundness

__version__ = "0.1.0"
