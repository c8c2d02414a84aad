import os
import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(__file__))

from spelunk.network import (
    ActivationKind,
    DenseLayer,
    NetworkSpec,
    build_box_oracle,
)

FIXTURE_DIR = Path(__file__).parent / "fixtures"

TRAINED_FIXTURES = [
    "relu_sdf.json",
    "elu_sdf.json",
    "relu_occ.json",
    "elu_occ.json",
]


@pytest.fixture(scope="session")
def box_oracle():
    return build_box_oracle(np.zeros(3), 0.5)


@pytest.fixture(scope="session")
def trained_nets():
    from spelunk.network import load_network

    paths = [FIXTURE_DIR / name for name in TRAINED_FIXTURES]
    missing = [p.name for p in paths if not p.exists()]
    if missing:
        pytest.skip(f"trained fixtures not generated yet: {missing}")
    return [load_network(p) for p in paths]


def random_mlp(
    rng,
    input_dim=3,
    hidden=(16, 16),
    activation=ActivationKind.RELU,
    scale=1.0,
    semantics="sdf",
):
    """Random small MLP with sane weight magnitudes for property tests."""
    layers = []
    dims = [input_dim, *hidden, 1]
    for i in range(len(dims) - 1):
        fan_in = dims[i]
        w = rng.standard_normal((dims[i + 1], fan_in)) * (scale / np.sqrt(fan_in))
        b = rng.standard_normal(dims[i + 1]) * 0.1
        layers.append(DenseLayer(w, b))
        if i < len(dims) - 2:
            layers.append(activation)
    return NetworkSpec(input_dim, tuple(layers), semantics, "random_mlp")


def random_box(rng, d=3, s=None, center_range=1.0, max_half=0.5):
    """Random oriented query box: orthonormal axes scaled by random halves."""
    from spelunk.range_core import QueryBox

    if s is None:
        s = int(rng.integers(1, d + 1))
    center = rng.uniform(-center_range, center_range, d)
    q, _ = np.linalg.qr(rng.standard_normal((d, d)))
    halves = rng.uniform(1e-4, max_half, s)
    return QueryBox(center, q[:, :s].T * halves[:, None])


def sample_box_points(rng, box, n):
    """Uniform samples inside an oriented query box."""
    eps = rng.uniform(-1.0, 1.0, (n, box.s))
    return box.center + eps @ box.axes
