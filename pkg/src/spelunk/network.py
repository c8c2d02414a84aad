"""MLP-style implicit functions: loading, validation, exact evaluation.

A network is a flat sequence of dense layers and elementwise activations
mapping a point in R^d to a scalar. The sign convention is negative inside
the solid, positive outside. Evaluation is deterministic and batch-size
invariant: the same point produces bit-identical output whether evaluated
alone or inside any batch, which downstream meshing relies on for
crack-free shared cell faces.
"""

from __future__ import annotations

import enum
import json
import math
from contextlib import contextmanager
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DimensionMismatch,
    InvalidParameter,
    NonFiniteWeight,
    ParseError,
)


class ActivationKind(enum.Enum):
    RELU = "relu"
    ELU = "elu"
    SIN = "sin"
    TANH = "tanh"
    IDENTITY = "identity"


@dataclass(frozen=True)
class DenseLayer:
    """Affine layer y = W x + b with W of shape (out_dim, in_dim)."""

    weights: np.ndarray
    bias: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=np.float64)
        b = np.asarray(self.bias, dtype=np.float64)
        if w.ndim != 2 or b.ndim != 1:
            raise DimensionMismatch(
                f"dense layer needs 2-d weights and 1-d bias, got {w.shape} / {b.shape}"
            )
        if w.shape[0] != b.shape[0]:
            raise DimensionMismatch(
                f"bias length {b.shape[0]} does not match {w.shape[0]} outputs"
            )
        if not (np.isfinite(w).all() and np.isfinite(b).all()):
            raise NonFiniteWeight("dense layer contains non-finite entries")
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "bias", b)

    @property
    def in_dim(self) -> int:
        return self.weights.shape[1]

    @property
    def out_dim(self) -> int:
        return self.weights.shape[0]


Layer = DenseLayer | ActivationKind


@dataclass(frozen=True)
class NetworkSpec:
    """A validated implicit network.

    output_semantics is "sdf" or "occupancy_logit"; both share the
    negative-inside sign convention, so every query operates on the raw
    network output.
    """

    input_dim: int
    layers: tuple
    output_semantics: str = "sdf"
    name: str = "unnamed"

    def __post_init__(self):
        object.__setattr__(self, "layers", tuple(self.layers))
        if self.output_semantics not in ("sdf", "occupancy_logit"):
            raise ParseError(f"unknown output semantics {self.output_semantics!r}")
        if self.input_dim < 1:
            raise DimensionMismatch("input_dim must be >= 1")
        dim = self.input_dim
        n_dense = 0
        for layer in self.layers:
            if isinstance(layer, DenseLayer):
                if layer.in_dim != dim:
                    raise DimensionMismatch(
                        f"layer expects {layer.in_dim} inputs, previous width is {dim}"
                    )
                dim = layer.out_dim
                n_dense += 1
            elif not isinstance(layer, ActivationKind):
                raise ParseError(f"unsupported layer entry {layer!r}")
        if n_dense == 0:
            raise DimensionMismatch("network has no dense layers")
        if dim != 1:
            raise DimensionMismatch(f"final layer must output 1 value, got {dim}")

    @property
    def widths(self) -> list[int]:
        """Widths after each dense layer, starting from the input."""
        out = [self.input_dim]
        for layer in self.layers:
            if isinstance(layer, DenseLayer):
                out.append(layer.out_dim)
        return out


# Optional evaluation counters, installed by callers that want to measure
# how many function evaluations a query performs.
_COUNTERS: list["EvalCounter"] = []


class EvalCounter:
    def __init__(self):
        self.count = 0

    def add(self, n: int):
        self.count += n


@contextmanager
def count_evals():
    """Count network point evaluations performed inside the block."""
    counter = EvalCounter()
    _COUNTERS.append(counter)
    try:
        yield counter
    finally:
        _COUNTERS.remove(counter)


def _dense_forward(x: np.ndarray, layer: DenseLayer) -> np.ndarray:
    # einsum with optimize=False keeps a fixed summation order, so results
    # do not depend on batch size (BLAS matmul does not guarantee this).
    return np.einsum("nk,mk->nm", x, layer.weights, optimize=False) + layer.bias


def _activation_forward(x: np.ndarray, kind: ActivationKind) -> np.ndarray:
    if kind is ActivationKind.RELU:
        return np.maximum(x, 0.0)
    if kind is ActivationKind.ELU:
        return np.where(x >= 0.0, x, np.expm1(np.minimum(x, 0.0)))
    if kind is ActivationKind.SIN:
        return np.sin(x)
    if kind is ActivationKind.TANH:
        return np.tanh(x)
    if kind is ActivationKind.IDENTITY:
        return x
    raise InvalidParameter(f"unknown activation {kind!r}")


def eval_batch(net: NetworkSpec, xs) -> np.ndarray:
    """Evaluate the network on a batch of points, shape (n, input_dim).

    Returns a float64 array of n scalars. Elementwise bit-identical to
    eval_scalar on each point.
    """
    x = np.asarray(xs, dtype=np.float64)
    if x.size == 0:
        return np.zeros(0, dtype=np.float64)
    if x.ndim != 2 or x.shape[1] != net.input_dim:
        raise DimensionMismatch(
            f"expected points of shape (n, {net.input_dim}), got {x.shape}"
        )
    for counter in _COUNTERS:
        counter.add(x.shape[0])
    for layer in net.layers:
        if isinstance(layer, DenseLayer):
            x = _dense_forward(x, layer)
        else:
            x = _activation_forward(x, layer)
    return x[:, 0]


def eval_scalar(net: NetworkSpec, x) -> float:
    """Evaluate the network at a single point."""
    p = np.asarray(x, dtype=np.float64)
    if p.shape != (net.input_dim,):
        raise DimensionMismatch(
            f"expected a point of shape ({net.input_dim},), got {p.shape}"
        )
    return float(eval_batch(net, p[None, :])[0])


def _eval_batch_fast(net: NetworkSpec, xs) -> np.ndarray:
    """BLAS-backed forward pass for bulk statistics.

    Last-ulp sums may differ from eval_batch and across batch sizes, so
    this is only for consumers with an explicit floating-point slack (the
    soundness fuzzer); everything feeding meshes or contracts goes through
    eval_batch.
    """
    x = np.asarray(xs, dtype=np.float64)
    if x.ndim != 2 or x.shape[1] != net.input_dim:
        raise DimensionMismatch(
            f"expected points of shape (n, {net.input_dim}), got {x.shape}"
        )
    for counter in _COUNTERS:
        counter.add(x.shape[0])
    for layer in net.layers:
        if isinstance(layer, DenseLayer):
            x = x @ layer.weights.T
            x += layer.bias
        elif layer is ActivationKind.RELU:
            np.maximum(x, 0.0, out=x)
        elif layer is ActivationKind.ELU:
            neg = x < 0.0
            x[neg] = np.expm1(x[neg])
        else:
            x = _activation_forward(x, layer)
    return x[:, 0]


# ---------------------------------------------------------------------------
# Weight file schema (UTF-8 JSON)

_ACTIVATION_NAMES = {
    "relu": ActivationKind.RELU,
    "elu": ActivationKind.ELU,
    "sin": ActivationKind.SIN,
    "tanh": ActivationKind.TANH,
}


def load_network(path) -> NetworkSpec:
    """Load and validate a network from a weight file.

    The file is a JSON object: {"input_dim": int, "output_semantics":
    "sdf"|"occupancy_logit", "name": str, "layers": [...]} where each layer
    is {"type": "dense", "weights": [[...]], "bias": [...]} or
    {"type": "activation", "kind": "relu"|"elu"|"sin"|"tanh"}. Weights are
    row-major: weights[i][j] multiplies input j into output i. Unknown
    extra top-level keys (e.g. training metadata) are ignored.
    """
    try:
        with open(path, "r", encoding="utf-8") as f:
            doc = json.load(f)
    except (OSError, json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise ParseError(f"cannot parse weight file {path}: {exc}") from exc
    if not isinstance(doc, dict):
        raise ParseError("weight file must contain a JSON object")
    for key in ("input_dim", "output_semantics", "name", "layers"):
        if key not in doc:
            raise ParseError(f"weight file missing key {key!r}")
    if not isinstance(doc["input_dim"], int):
        raise ParseError("input_dim must be an integer")
    if not isinstance(doc["layers"], list):
        raise ParseError("layers must be a list")

    layers: list[Layer] = []
    for i, entry in enumerate(doc["layers"]):
        if not isinstance(entry, dict) or "type" not in entry:
            raise ParseError(f"layer {i} is not an object with a 'type'")
        if entry["type"] == "dense":
            try:
                w = np.array(entry["weights"], dtype=np.float64)
                b = np.array(entry["bias"], dtype=np.float64)
            except (KeyError, TypeError, ValueError) as exc:
                raise ParseError(f"layer {i}: bad dense payload: {exc}") from exc
            if w.ndim != 2:
                raise ParseError(f"layer {i}: weights must be a matrix")
            layers.append(DenseLayer(w, b))
        elif entry["type"] == "activation":
            kind = entry.get("kind")
            if kind not in _ACTIVATION_NAMES:
                raise ParseError(f"layer {i}: unknown activation kind {kind!r}")
            layers.append(_ACTIVATION_NAMES[kind])
        else:
            raise ParseError(f"layer {i}: unknown layer type {entry['type']!r}")

    return NetworkSpec(
        input_dim=doc["input_dim"],
        layers=tuple(layers),
        output_semantics=doc["output_semantics"],
        name=str(doc["name"]),
    )


def save_network(net: NetworkSpec, path, metadata: dict | None = None) -> None:
    """Write a network to the weight file schema understood by load_network."""
    layers = []
    for layer in net.layers:
        if isinstance(layer, DenseLayer):
            layers.append(
                {
                    "type": "dense",
                    "weights": layer.weights.tolist(),
                    "bias": layer.bias.tolist(),
                }
            )
        else:
            layers.append({"type": "activation", "kind": layer.value})
    doc = {
        "input_dim": net.input_dim,
        "output_semantics": net.output_semantics,
        "name": net.name,
        "layers": layers,
    }
    if metadata:
        doc["metadata"] = metadata
    with open(path, "w", encoding="utf-8") as f:
        json.dump(doc, f)


# ---------------------------------------------------------------------------
# Exact oracle networks for testing

def build_box_oracle(center, halfwidth: float) -> NetworkSpec:
    """Exact ReLU network for the L-infinity box SDF max_i |x_i - c_i| - h.

    Built from |a| = ReLU(a) + ReLU(-a) and max(a, b) = b + ReLU(a - b);
    applying ReLU to an already non-negative lane is the identity, so the
    whole cascade is exact up to a few ulps of summation error.
    """
    c = np.asarray(center, dtype=np.float64)
    if c.ndim != 1 or c.size < 1:
        raise InvalidParameter("center must be a 1-d point")
    if not math.isfinite(halfwidth) or halfwidth <= 0.0:
        raise InvalidParameter(f"halfwidth must be positive, got {halfwidth}")
    d = c.size

    layers: list[Layer] = []
    # (x_i - c_i, c_i - x_i) pairs, then ReLU.
    w0 = np.zeros((2 * d, d))
    b0 = np.zeros(2 * d)
    for i in range(d):
        w0[2 * i, i] = 1.0
        b0[2 * i] = -c[i]
        w0[2 * i + 1, i] = -1.0
        b0[2 * i + 1] = c[i]
    layers.append(DenseLayer(w0, b0))
    layers.append(ActivationKind.RELU)

    # Sum pairs into |x_i - c_i|, then fold the running max one lane at a
    # time: (m - a_k, a_k, rest...) -> ReLU -> next sum starts with
    # ReLU(m - a_k) + a_k = max(m, a_k).
    w1 = np.zeros((d, 2 * d))
    for i in range(d):
        w1[i, 2 * i] = 1.0
        w1[i, 2 * i + 1] = 1.0
    prev = DenseLayer(w1, np.zeros(d))

    width = d
    while width > 1:
        # rows of prev: (m, a, rest...) -> (m - a, a, rest...)
        mix = np.eye(width)
        mix[0, 1] = -1.0
        combined = DenseLayer(mix @ prev.weights, mix @ prev.bias)
        layers.append(combined)
        layers.append(ActivationKind.RELU)
        # (r, a, rest...) -> (r + a, rest...)
        fold = np.zeros((width - 1, width))
        fold[0, 0] = 1.0
        fold[0, 1] = 1.0
        for i in range(width - 2):
            fold[i + 1, i + 2] = 1.0
        prev = DenseLayer(fold, np.zeros(width - 1))
        width -= 1

    layers.append(DenseLayer(prev.weights, prev.bias - halfwidth))
    return NetworkSpec(
        input_dim=d,
        layers=tuple(layers),
        output_semantics="sdf",
        name=f"box_oracle_h{halfwidth:g}",
    )


def box_sdf(center, halfwidth: float, xs) -> np.ndarray:
    """Closed-form L-infinity box SDF, the oracle build_box_oracle must match."""
    c = np.asarray(center, dtype=np.float64)
    x = np.atleast_2d(np.asarray(xs, dtype=np.float64))
    return np.max(np.abs(x - c), axis=1) - halfwidth
