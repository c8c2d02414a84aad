"""Interval and affine arithmetic over implicit networks.

Both engines propagate guaranteed output bounds for a network over a query
box. Interval arithmetic tracks per-component [lo, hi] pairs and suffers
the dependency problem: correlated quantities are bounded independently,
so the cancellation inside dense layers is lost and bounds blow up with
depth. Affine arithmetic instead models every quantity as

    x0 + sum_i X_i eps_i + x_inf eps_inf,   eps in [-1, 1]

where the eps_i are shared noise symbols. Dense layers are exact in this
representation; each nonlinearity is replaced by a bounding linear
approximation alpha*x + beta with remainder radius gamma, which either
becomes a fresh noise symbol or is folded into the non-cancelling error
channel x_inf, depending on the condensation policy.

A vector-valued form is stored as (base, coeffs, err) with base and err of
shape (m,) and coeffs of shape (m, n_symbols); column i holds the
coefficients of eps_i. err is component-wise non-negative and never
cancels (it aggregates variation from many sources).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import (
    DimensionMismatch,
    IndexOutOfRange,
    InvalidParameter,
    NonOrthogonalAxes,
    UnsupportedActivation,
)
from .network import ActivationKind, DenseLayer, NetworkSpec

_TWO_PI = 2.0 * np.pi


class SignClass(enum.Enum):
    POSITIVE = "positive"
    NEGATIVE = "negative"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class Interval:
    """Closed interval(s) [lo, hi]; scalar or per-component arrays."""

    lo: float | np.ndarray
    hi: float | np.ndarray

    def __post_init__(self):
        if not np.all(np.asarray(self.lo) <= np.asarray(self.hi)):
            raise InvalidParameter("interval requires lo <= hi")
        if not (np.all(np.isfinite(self.lo)) and np.all(np.isfinite(self.hi))):
            raise InvalidParameter("interval bounds must be finite")

    @property
    def width(self):
        return self.hi - self.lo

    def contains(self, value, slack: float = 0.0) -> bool:
        v = np.asarray(value)
        return bool(np.all(v >= self.lo - slack) and np.all(v <= self.hi + slack))


@dataclass(frozen=True)
class AffineForm:
    """Vector affine form (base, coeffs, err); see the module docstring."""

    base: np.ndarray
    coeffs: np.ndarray
    err: np.ndarray

    def __post_init__(self):
        base = np.asarray(self.base, dtype=np.float64)
        coeffs = np.asarray(self.coeffs, dtype=np.float64)
        err = np.asarray(self.err, dtype=np.float64)
        if base.ndim != 1:
            raise DimensionMismatch("base must be 1-d")
        m = base.shape[0]
        if coeffs.ndim != 2 or coeffs.shape[0] != m:
            raise DimensionMismatch(f"coeffs must have shape ({m}, n)")
        if err.shape != (m,):
            raise DimensionMismatch(f"err must have shape ({m},)")
        if np.any(err < 0.0):
            raise InvalidParameter("err must be non-negative")
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "err", err)

    @property
    def dim(self) -> int:
        return self.base.shape[0]

    @property
    def n_symbols(self) -> int:
        return self.coeffs.shape[1]


class PolicyKind(enum.Enum):
    INTERVAL = "interval"
    AFFINE_FIXED = "affine-fixed"
    AFFINE_FULL = "affine-full"
    AFFINE_TRUNCATE = "affine-truncate"


@dataclass(frozen=True)
class CondensationPolicy:
    """When to condense freshly introduced nonlinearity symbols.

    interval:        no affine tracking at all, plain interval propagation
    affine-fixed:    keep only the input-domain symbols; every gamma is
                     folded into the err channel immediately
    affine-full:     keep everything (one fresh symbol per activation lane)
    affine-truncate: after each nonlinearity keep the n_keep largest
                     columns, condense the rest
    """

    kind: PolicyKind
    n_keep: int | None = None

    def __post_init__(self):
        if self.kind is PolicyKind.AFFINE_TRUNCATE:
            if self.n_keep is None or self.n_keep < 1:
                raise InvalidParameter("affine-truncate requires n_keep >= 1")
        elif self.n_keep is not None:
            raise InvalidParameter(f"{self.kind.value} does not take n_keep")

    def __str__(self):
        if self.kind is PolicyKind.AFFINE_TRUNCATE:
            return f"affine-truncate:{self.n_keep}"
        return self.kind.value


INTERVAL_ONLY = CondensationPolicy(PolicyKind.INTERVAL)
AFFINE_FIXED = CondensationPolicy(PolicyKind.AFFINE_FIXED)
AFFINE_FULL = CondensationPolicy(PolicyKind.AFFINE_FULL)


def affine_truncate(n_keep: int) -> CondensationPolicy:
    return CondensationPolicy(PolicyKind.AFFINE_TRUNCATE, n_keep)


def parse_policy(name: str) -> CondensationPolicy:
    """Parse a policy name: interval, affine-fixed, affine-full, affine-truncate:N."""
    name = name.strip().lower()
    if name == "interval":
        return INTERVAL_ONLY
    if name == "affine-fixed":
        return AFFINE_FIXED
    if name == "affine-full":
        return AFFINE_FULL
    if name.startswith("affine-truncate"):
        _, _, arg = name.partition(":")
        if not arg:
            raise InvalidParameter("affine-truncate needs :N, e.g. affine-truncate:16")
        try:
            return affine_truncate(int(arg))
        except ValueError as exc:
            raise InvalidParameter(f"bad n_keep in {name!r}") from exc
    raise InvalidParameter(f"unknown policy {name!r}")


@dataclass(frozen=True)
class QueryBox:
    """An s-dimensional oriented box in R^d: center plus s half-extent axes."""

    center: np.ndarray
    axes: np.ndarray  # (s, d); may be empty (s = 0) for a point query

    def __post_init__(self):
        c = np.asarray(self.center, dtype=np.float64)
        a = np.asarray(self.axes, dtype=np.float64)
        if a.size == 0:
            a = a.reshape(0, c.shape[0])
        if c.ndim != 1 or a.ndim != 2 or a.shape[1] != c.shape[0]:
            raise DimensionMismatch("axes must have shape (s, d) matching center")
        if a.shape[0] > c.shape[0]:
            raise DimensionMismatch("more axes than ambient dimensions")
        norms = np.linalg.norm(a, axis=1)
        if np.any(norms == 0.0) or not np.all(np.isfinite(a)):
            raise NonOrthogonalAxes("axes must be finite and nonzero")
        dots = a @ a.T
        off = dots - np.diag(np.diag(dots))
        limit = 1e-6 * np.outer(norms, norms)
        if np.any(np.abs(off) > limit):
            raise NonOrthogonalAxes("axes are not pairwise orthogonal")
        object.__setattr__(self, "center", c)
        object.__setattr__(self, "axes", a)

    @property
    def dim(self) -> int:
        return self.center.shape[0]

    @property
    def s(self) -> int:
        return self.axes.shape[0]


# ---------------------------------------------------------------------------
# Activation rules
#
# Each affine rule maps per-component input bounds [lo, hi] to (alpha,
# beta, gamma) such that |h(x) - (alpha x + beta)| <= gamma on [lo, hi].
# Each interval rule maps [lo, hi] to the exact range of h over it.
# The registries are module-level so tests can substitute corrupted rules.


def _relu_affine(lo, hi):
    width = hi - lo
    deg = width == 0.0
    pos = lo >= 0.0
    neg = hi <= 0.0
    alpha = np.where(pos, 1.0, 0.0)
    straddle = ~(pos | neg)
    safe = np.where(straddle, width, 1.0)
    a_str = hi / safe
    alpha = np.where(straddle, a_str, alpha)
    beta = np.where(straddle, -a_str * lo * 0.5, 0.0)
    gamma = beta.copy()
    if np.any(deg):
        # zero-width inputs: pointwise subgradient, exact value
        a_deg = np.where(lo > 0.0, 1.0, 0.0)
        alpha = np.where(deg, a_deg, alpha)
        beta = np.where(deg, np.maximum(lo, 0.0) - a_deg * lo, beta)
        gamma = np.where(deg, 0.0, gamma)
    return alpha, beta, gamma


def _elu(x):
    return np.where(x >= 0.0, x, np.expm1(np.minimum(x, 0.0)))


def _elu_affine(lo, hi):
    width = hi - lo
    deg = width == 0.0
    pos = lo >= 0.0
    flo, fhi = _elu(lo), _elu(hi)
    safe = np.where(deg, 1.0, width)
    alpha = np.where(pos, 1.0, (fhi - flo) / safe)
    # Chebyshev remainder for the convex branch: the secant overestimates at
    # the endpoints by r_u and underestimates most at the tangency point
    # x* = log(alpha), where exp(x*) matches the secant slope.
    tiny = alpha <= 0.0  # interval so far left that the secant underflowed
    a_safe = np.where(tiny | pos, 1.0, alpha)
    r_u = flo - alpha * lo
    r_l = (alpha - 1.0) - alpha * np.log(a_safe)
    beta = np.where(pos, 0.0, (r_u + r_l) * 0.5)
    gamma = np.where(pos, 0.0, (r_u - r_l) * 0.5)
    if np.any(tiny):
        mid = (flo + fhi) * 0.5
        alpha = np.where(tiny, 0.0, alpha)
        beta = np.where(tiny, mid, beta)
        gamma = np.where(tiny, (fhi - flo) * 0.5, gamma)
    if np.any(deg):
        a_deg = np.where(lo >= 0.0, 1.0, np.exp(np.minimum(lo, 0.0)))
        alpha = np.where(deg, a_deg, alpha)
        beta = np.where(deg, flo - a_deg * lo, beta)
        gamma = np.where(deg, 0.0, gamma)
    return alpha, np.asarray(beta), np.maximum(gamma, 0.0)


def _cos_range(lo, hi):
    clo, chi = np.cos(lo), np.cos(hi)
    cmin = np.minimum(clo, chi)
    cmax = np.maximum(clo, chi)
    # cos attains +1 at multiples of 2*pi and -1 at odd multiples of pi
    has_max = np.floor(hi / _TWO_PI) * _TWO_PI >= lo
    has_min = np.floor((hi - np.pi) / _TWO_PI) * _TWO_PI + np.pi >= lo
    return np.where(has_min, -1.0, cmin), np.where(has_max, 1.0, cmax)


def _sin_affine(lo, hi):
    # Secant-style slope from the cosine range; remainder extrema occur at
    # the endpoints or where cos(x) = alpha, i.e. x = +-arccos(alpha) mod 2pi.
    # A window narrower than 2pi holds at most one such point per residue
    # class, and a wider window forces alpha = 0 where sin itself is the
    # (periodic) remainder, so the candidate set below is exhaustive.
    slo, shi = _cos_range(lo, hi)
    alpha = (slo + shi) * 0.5
    e = np.arccos(np.clip(alpha, -1.0, 1.0))
    cands = [lo, hi]
    for base in (e, -e):
        first = base + _TWO_PI * np.ceil((lo - base) / _TWO_PI)
        cands.append(np.clip(first, lo, hi))
        cands.append(np.clip(first + _TWO_PI, lo, hi))
    rem = np.stack([np.sin(x) - alpha * x for x in cands])
    r_u = rem.max(axis=0)
    r_l = rem.min(axis=0)
    return alpha, (r_u + r_l) * 0.5, (r_u - r_l) * 0.5


def _tanh_affine(lo, hi):
    width = hi - lo
    deg = width == 0.0
    flo, fhi = np.tanh(lo), np.tanh(hi)
    safe = np.where(deg, 1.0, width)
    alpha = np.where(deg, 1.0 - flo * flo, (fhi - flo) / safe)
    # remainder extrema: endpoints, or tanh'(x) = alpha at
    # x = +-artanh(sqrt(1 - alpha)); clamped into the interval
    inner = np.sqrt(np.clip(1.0 - alpha, 0.0, 1.0))
    with np.errstate(divide="ignore"):
        x_star = np.arctanh(np.clip(inner, 0.0, 1.0))
    cands = [lo, hi, np.clip(x_star, lo, hi), np.clip(-x_star, lo, hi)]
    rem = np.stack([np.tanh(x) - alpha * x for x in cands])
    r_u = rem.max(axis=0)
    r_l = rem.min(axis=0)
    beta = (r_u + r_l) * 0.5
    gamma = (r_u - r_l) * 0.5
    if np.any(deg):
        beta = np.where(deg, flo - alpha * lo, beta)
        gamma = np.where(deg, 0.0, gamma)
    return alpha, beta, np.maximum(gamma, 0.0)


def _identity_affine(lo, hi):
    one = np.ones_like(lo)
    zero = np.zeros_like(lo)
    return one, zero, zero


def _relu_interval(lo, hi):
    return np.maximum(lo, 0.0), np.maximum(hi, 0.0)


def _elu_interval(lo, hi):
    return _elu(lo), _elu(hi)


def _tanh_interval(lo, hi):
    return np.tanh(lo), np.tanh(hi)


def _sin_interval(lo, hi):
    slo_c, shi_c = np.sin(lo), np.sin(hi)
    smin = np.minimum(slo_c, shi_c)
    smax = np.maximum(slo_c, shi_c)
    # sin attains +1 at pi/2 mod 2pi and -1 at -pi/2 mod 2pi
    has_max = np.floor((hi - 0.5 * np.pi) / _TWO_PI) * _TWO_PI + 0.5 * np.pi >= lo
    has_min = np.floor((hi + 0.5 * np.pi) / _TWO_PI) * _TWO_PI - 0.5 * np.pi >= lo
    return np.where(has_min, -1.0, smin), np.where(has_max, 1.0, smax)


def _identity_interval(lo, hi):
    return lo, hi


AFFINE_RULES = {
    ActivationKind.RELU: _relu_affine,
    ActivationKind.ELU: _elu_affine,
    ActivationKind.SIN: _sin_affine,
    ActivationKind.TANH: _tanh_affine,
    ActivationKind.IDENTITY: _identity_affine,
}

INTERVAL_RULES = {
    ActivationKind.RELU: _relu_interval,
    ActivationKind.ELU: _elu_interval,
    ActivationKind.SIN: _sin_interval,
    ActivationKind.TANH: _tanh_interval,
    ActivationKind.IDENTITY: _identity_interval,
}


# ---------------------------------------------------------------------------
# Single-form operations (the definitional semantics)


def interval_of(a: AffineForm) -> Interval:
    """Per-component bounds [x0 - r, x0 + r], r = sum_i |X_i| + err."""
    r = np.abs(a.coeffs).sum(axis=1) + a.err
    return Interval(a.base - r, a.base + r)


def box_to_affine(box: QueryBox) -> AffineForm:
    """Initial affine form of a query box: one noise symbol per axis."""
    return AffineForm(
        base=box.center.copy(),
        coeffs=box.axes.T.copy(),
        err=np.zeros(box.dim),
    )


def affine_linear(a: AffineForm, layer: DenseLayer) -> AffineForm:
    """Propagate through a dense layer; exact, no new uncertainty."""
    if layer.in_dim != a.dim:
        raise DimensionMismatch(
            f"layer expects {layer.in_dim} inputs, form has {a.dim}"
        )
    w = layer.weights
    return AffineForm(
        base=w @ a.base + layer.bias,
        coeffs=w @ a.coeffs,
        err=np.abs(w) @ a.err,
    )


def affine_nonlinear(
    a: AffineForm, kind: ActivationKind, policy: CondensationPolicy
) -> AffineForm:
    """Propagate through an elementwise activation under a policy.

    Per component: compute (alpha, beta, gamma) from the current bounds,
    scale base and coefficients by alpha, then either append gamma as a
    fresh diagonal block of noise symbols (affine-full / affine-truncate)
    or fold it into err (affine-fixed).
    """
    if kind not in AFFINE_RULES:
        raise UnsupportedActivation(f"no affine rule for {kind!r}")
    if policy.kind is PolicyKind.INTERVAL:
        raise InvalidParameter("affine_nonlinear needs an affine policy")
    bounds = interval_of(a)
    lo = np.asarray(bounds.lo, dtype=np.float64)
    hi = np.asarray(bounds.hi, dtype=np.float64)
    alpha, beta, gamma = AFFINE_RULES[kind](lo, hi)
    base = alpha * a.base + beta
    coeffs = alpha[:, None] * a.coeffs
    err = np.abs(alpha) * a.err
    if policy.kind is PolicyKind.AFFINE_FIXED:
        err = err + gamma
    else:
        coeffs = np.concatenate([coeffs, np.diag(gamma)], axis=1)
    out = AffineForm(base, coeffs, err)
    if policy.kind is PolicyKind.AFFINE_TRUNCATE and out.n_symbols > policy.n_keep:
        out = truncate(out, policy.n_keep)
    return out


def condense(a: AffineForm, indices) -> AffineForm:
    """Fold the named coefficient columns into err.

    The summed magnitudes land in the non-cancelling channel, so
    interval_of is unchanged by this single operation.
    """
    idx = np.asarray(sorted(set(int(i) for i in indices)), dtype=np.intp)
    if idx.size == 0:
        return a
    if idx.min() < 0 or idx.max() >= a.n_symbols:
        raise IndexOutOfRange(
            f"column index out of range 0..{a.n_symbols - 1}"
        )
    keep = np.setdiff1d(np.arange(a.n_symbols), idx, assume_unique=False)
    folded = np.abs(a.coeffs[:, idx]).sum(axis=1)
    return AffineForm(a.base.copy(), a.coeffs[:, keep], a.err + folded)


def truncate(a: AffineForm, n_keep: int) -> AffineForm:
    """Keep the n_keep columns with largest L1 norm; condense the rest.

    Ties are broken toward the lower column index. Kept columns stay in
    their original order.
    """
    if n_keep < 1:
        raise InvalidParameter("n_keep must be >= 1")
    if a.n_symbols <= n_keep:
        return a
    norms = np.abs(a.coeffs).sum(axis=0)
    order = np.argsort(-norms, kind="stable")
    drop = np.sort(order[n_keep:])
    return condense(a, drop)


# ---------------------------------------------------------------------------
# Whole-network propagation


def _check_box(net: NetworkSpec, box: QueryBox):
    if box.dim != net.input_dim:
        raise DimensionMismatch(
            f"box lives in R^{box.dim}, network expects R^{net.input_dim}"
        )


def interval_forward(net: NetworkSpec, box: QueryBox) -> Interval:
    """Pure interval propagation over the box's axis-aligned hull."""
    _check_box(net, box)
    lo, hi = interval_forward_batch(
        net, box.center[None, :], _stack_axes([box.axes], net.input_dim)
    )
    return Interval(float(lo[0]), float(hi[0]))


def range_bound(
    net: NetworkSpec, box: QueryBox, policy: CondensationPolicy
) -> tuple[Interval, SignClass]:
    """Bound the network output over a box and classify its sign.

    Returns the final scalar interval and POSITIVE if lo > 0, NEGATIVE if
    hi < 0, UNKNOWN otherwise. The interval itself is returned so callers
    can test bands like f > r or f < -r.
    """
    _check_box(net, box)
    lo, hi = range_bound_batch(
        net, box.center[None, :], _stack_axes([box.axes], net.input_dim), policy
    )
    lo_f, hi_f = float(lo[0]), float(hi[0])
    return Interval(lo_f, hi_f), classify(lo_f, hi_f)


def classify(lo, hi) -> SignClass:
    if lo > 0.0:
        return SignClass.POSITIVE
    if hi < 0.0:
        return SignClass.NEGATIVE
    return SignClass.UNKNOWN


def _stack_axes(axes_list, d):
    s = max((np.asarray(a).shape[0] for a in axes_list), default=0)
    out = np.zeros((len(axes_list), s, d))
    for i, a in enumerate(axes_list):
        a = np.asarray(a, dtype=np.float64)
        if a.size:
            out[i, : a.shape[0], :] = a
    return out


# Batched kernel. Coefficients are laid out (n_symbols, batch, width): the
# leading-axis slice holding the live symbols is contiguous, so each dense
# layer is one (n_symbols * batch, m_in) @ (m_in, m_out) GEMM into a
# preallocated ping-pong buffer, and activation scaling happens in place.
# This path is memory-bound; avoiding per-layer reallocation matters more
# than flops.


def _plan_symbol_capacity(net: NetworkSpec, s: int, policy) -> int:
    if policy.kind is PolicyKind.AFFINE_FIXED:
        return max(s, 1)
    n = s
    cap = s
    width = net.input_dim
    for layer in net.layers:
        if isinstance(layer, DenseLayer):
            width = layer.out_dim
        elif layer is not ActivationKind.IDENTITY:
            n += width
            cap = max(cap, n)
            if policy.kind is PolicyKind.AFFINE_TRUNCATE:
                n = min(n, policy.n_keep)
    return max(cap, 1)


def range_bound_batch(net: NetworkSpec, centers, axes, policy: CondensationPolicy):
    """Vectorized range_bound over many boxes.

    centers: (n, d); axes: (n, s, d) where all-zero rows are padding for
    boxes with fewer axes. Returns (lo, hi) arrays of shape (n,). Batching
    is an implementation detail: results agree with the single-box path up
    to last-ulp summation differences.
    """
    if policy.kind is PolicyKind.INTERVAL:
        return interval_forward_batch(net, centers, axes)
    base = np.array(centers, dtype=np.float64)
    if base.ndim != 2 or base.shape[1] != net.input_dim:
        raise DimensionMismatch(f"centers must be (n, {net.input_dim})")
    b, d = base.shape
    axes = np.asarray(axes, dtype=np.float64)
    s = axes.shape[1]
    m_cap = max(w for w in net.widths)
    n_cap = _plan_symbol_capacity(net, s, policy)
    ping = np.zeros((n_cap, b, m_cap))
    pong = np.empty((n_cap, b, m_cap))
    scratch = np.empty((n_cap, b, m_cap))
    ping[:s, :, :d] = np.swapaxes(axes, 0, 1)
    n_sym = s
    err = np.zeros((b, d))
    m = d

    for layer in net.layers:
        if isinstance(layer, DenseLayer):
            w_t = layer.weights.T
            src = ping[:n_sym, :, :m].reshape(n_sym * b, m)
            dst = pong[:n_sym, :, : layer.out_dim].reshape(n_sym * b, layer.out_dim)
            np.matmul(src, w_t, out=dst)
            base = base @ w_t + layer.bias
            err = err @ np.abs(w_t)
            ping, pong = pong, ping
            m = layer.out_dim
        else:
            if layer not in AFFINE_RULES:
                raise UnsupportedActivation(f"no affine rule for {layer!r}")
            if layer is ActivationKind.IDENTITY:
                continue
            cols = ping[:n_sym, :, :m]
            sc = scratch[:n_sym, :, :m]
            np.abs(cols, out=sc)
            r = sc.sum(axis=0) + err
            alpha, beta, gamma = AFFINE_RULES[layer](base - r, base + r)
            base = alpha * base + beta
            cols *= alpha[None, :, :]
            if policy.kind is PolicyKind.AFFINE_FIXED:
                err = np.abs(alpha) * err + gamma
                continue
            err = np.abs(alpha) * err
            block = ping[n_sym : n_sym + m, :, :m]
            block[:] = 0.0
            for j in range(m):
                block[j, :, j] = gamma[:, j]
            n_sym += m
            if policy.kind is PolicyKind.AFFINE_TRUNCATE and n_sym > policy.n_keep:
                cols = ping[:n_sym, :, :m]
                sc = scratch[:n_sym, :, :m]
                np.abs(cols, out=sc)
                norms = sc.sum(axis=2)  # (n_sym, b)
                order = np.argsort(-norms, axis=0, kind="stable")
                keep = np.sort(order[: policy.n_keep], axis=0)
                drop = np.sort(order[policy.n_keep :], axis=0)
                err = err + np.take_along_axis(sc, drop[:, :, None], axis=0).sum(
                    axis=0
                )
                pong[: policy.n_keep, :, :m] = np.take_along_axis(
                    cols, keep[:, :, None], axis=0
                )
                ping, pong = pong, ping
                n_sym = policy.n_keep

    r = np.abs(ping[:n_sym, :, 0]).sum(axis=0) + err[:, 0]
    return base[:, 0] - r, base[:, 0] + r


def interval_forward_batch(net: NetworkSpec, centers, axes):
    """Vectorized interval propagation; same contract as range_bound_batch."""
    c = np.asarray(centers, dtype=np.float64)
    if c.ndim != 2 or c.shape[1] != net.input_dim:
        raise DimensionMismatch(f"centers must be (n, {net.input_dim})")
    r = np.abs(np.asarray(axes, dtype=np.float64)).sum(axis=1)
    for layer in net.layers:
        if isinstance(layer, DenseLayer):
            w_t = layer.weights.T
            c = c @ w_t + layer.bias
            r = r @ np.abs(w_t)
        else:
            if layer not in INTERVAL_RULES:
                raise UnsupportedActivation(f"no interval rule for {layer!r}")
            lo, hi = INTERVAL_RULES[layer](c - r, c + r)
            c = (lo + hi) * 0.5
            r = (hi - lo) * 0.5
    return c[:, 0] - r[:, 0], c[:, 0] + r[:, 0]


def sign_classes(lo: np.ndarray, hi: np.ndarray) -> list[SignClass]:
    return [classify(l, h) for l, h in zip(lo, hi)]
