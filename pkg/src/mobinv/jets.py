"""Second-order jets (value, gradient, Hessian) and their pullback.

The chain rule is evaluated on closed-form per-step data from the transform
module, so pulled-back jets are exact up to rounding; nothing here is
differentiated numerically.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch
from .xform import MobiusMap

HESS_SYM_TOL = 1e-12


@dataclass(frozen=True)
class Jet:
    """Value, gradient and symmetric Hessian of a scalar function at a point."""

    dim: int
    value: float
    grad: np.ndarray
    hess: np.ndarray

    def __post_init__(self):
        g = np.array(self.grad, dtype=float)
        H = np.array(self.hess, dtype=float)
        if g.shape != (self.dim,) or H.shape != (self.dim, self.dim):
            raise DimensionMismatch(
                f"jet of dimension {self.dim} with grad {g.shape}, hess {H.shape}"
            )
        if not (np.isfinite(self.value) and np.all(np.isfinite(g)) and np.all(np.isfinite(H))):
            raise ValueError("jet entries must all be finite")
        if np.max(np.abs(H - H.T), initial=0.0) > HESS_SYM_TOL:
            raise ValueError("hessian must be symmetric within 1e-12")
        H = 0.5 * (H + H.T)  # exact symmetry after validation
        g.flags.writeable = False
        H.flags.writeable = False
        object.__setattr__(self, "value", float(self.value))
        object.__setattr__(self, "grad", g)
        object.__setattr__(self, "hess", H)


@dataclass(frozen=True)
class TransformJet:
    """Second-order data of a point map: image, Jacobian, per-component Hessians.

    hessians[k] is the Hessian of output coordinate k.
    """

    dim: int
    value: np.ndarray
    jacobian: np.ndarray
    hessians: np.ndarray

    def __post_init__(self):
        v = np.array(self.value, dtype=float)
        J = np.array(self.jacobian, dtype=float)
        H = np.array(self.hessians, dtype=float)
        n = self.dim
        if v.shape != (n,) or J.shape != (n, n) or H.shape != (n, n, n):
            raise DimensionMismatch("inconsistent transform-jet shapes")
        for a in (v, J, H):
            a.flags.writeable = False
        object.__setattr__(self, "value", v)
        object.__setattr__(self, "jacobian", J)
        object.__setattr__(self, "hessians", H)


class AnalyticField:
    """Scalar function with closed-form gradient and Hessian evaluators."""

    def __init__(self, dim, name, value, gradient, hessian, params=None):
        self.dim = int(dim)
        self.name = name
        self._value = value
        self._gradient = gradient
        self._hessian = hessian
        self.params = dict(params or {})

    def value(self, x):
        return float(self._value(np.asarray(x, dtype=float)))

    def gradient(self, x):
        return np.asarray(self._gradient(np.asarray(x, dtype=float)), dtype=float)

    def hessian(self, x):
        return np.asarray(self._hessian(np.asarray(x, dtype=float)), dtype=float)

    def __call__(self, x):
        return self.value(x)

    def __repr__(self):
        return f"AnalyticField({self.name!r}, dim={self.dim})"


def jet_of_field(field: AnalyticField, x) -> Jet:
    x = np.asarray(x, dtype=float)
    return Jet(field.dim, field.value(x), field.gradient(x), field.hessian(x))


# ---------------------------------------------------------------------------
# catalog


def affine(dim, coeffs, const=0.0):
    """f(x) = coeffs . x + const."""
    c = np.asarray(coeffs, dtype=float)
    return AnalyticField(
        dim,
        "affine",
        lambda x: c @ x + const,
        lambda x: c.copy(),
        lambda x: np.zeros((dim, dim)),
        {"coeffs": c.tolist(), "const": const},
    )


def quadratic(dim, Q, b=None, const=0.0):
    """f(x) = 1/2 x^T Q x + b . x + const with symmetric Q."""
    Q = np.asarray(Q, dtype=float)
    Q = 0.5 * (Q + Q.T)
    b = np.zeros(dim) if b is None else np.asarray(b, dtype=float)
    return AnalyticField(
        dim,
        "quadratic",
        lambda x: 0.5 * x @ Q @ x + b @ x + const,
        lambda x: Q @ x + b,
        lambda x: Q.copy(),
        {"Q": Q.tolist(), "b": b.tolist(), "const": const},
    )


def gaussian(dim, center, width):
    """Gaussian bump exp(-sum ((x_i - c_i) / w_i)^2); width may be per-axis."""
    c = np.asarray(center, dtype=float)
    w = np.broadcast_to(np.asarray(width, dtype=float), (dim,)).copy()
    if np.any(w <= 0):
        raise ValueError("gaussian width must be positive")
    iw2 = 1.0 / w**2

    def val(x):
        d = x - c
        return np.exp(-np.sum(d * d * iw2))

    def grad(x):
        d = x - c
        return val(x) * (-2.0 * d * iw2)

    def hess(x):
        d = x - c
        u = -2.0 * d * iw2
        return val(x) * (np.outer(u, u) - 2.0 * np.diag(iw2))

    return AnalyticField(dim, "gaussian", val, grad, hess,
                         {"center": c.tolist(), "width": w.tolist()})


def sinusoid(dim, freqs, phases=None):
    """Product of sinusoids: prod_i sin(freqs_i * x_i + phases_i)."""
    a = np.asarray(freqs, dtype=float)
    p = np.zeros(dim) if phases is None else np.asarray(phases, dtype=float)

    def terms(x):
        arg = a * x + p
        return np.sin(arg), np.cos(arg)

    def val(x):
        s, _ = terms(x)
        return np.prod(s)

    def grad(x):
        s, cs = terms(x)
        out = np.empty(dim)
        for i in range(dim):
            out[i] = a[i] * cs[i] * np.prod(np.delete(s, i))
        return out

    def hess(x):
        s, cs = terms(x)
        H = np.empty((dim, dim))
        for i in range(dim):
            for j in range(dim):
                if i == j:
                    H[i, j] = -a[i] ** 2 * np.prod(s)
                else:
                    rest = np.prod(np.delete(s, [i, j]))
                    H[i, j] = a[i] * a[j] * cs[i] * cs[j] * rest
        return H

    return AnalyticField(dim, "sinusoid", val, grad, hess,
                         {"freqs": a.tolist(), "phases": p.tolist()})


def polynomial(dim, coeffs):
    """Polynomial from a map {exponent tuple: coefficient}, total degree <= 4."""
    terms = []
    for key, c in coeffs.items():
        e = tuple(int(v) for v in (key.split(",") if isinstance(key, str) else key))
        if len(e) != dim or any(v < 0 for v in e):
            raise ValueError(f"bad exponent tuple {e} for dimension {dim}")
        if sum(e) > 4:
            raise ValueError(f"total degree of {e} exceeds 4")
        terms.append((np.array(e), float(c)))

    def _mono(x, e):
        return np.prod(x**e)

    def val(x):
        return sum(c * _mono(x, e) for e, c in terms)

    def grad(x):
        out = np.zeros(dim)
        for e, c in terms:
            for i in range(dim):
                if e[i] > 0:
                    de = e.copy()
                    de[i] -= 1
                    out[i] += c * e[i] * _mono(x, de)
        return out

    def hess(x):
        H = np.zeros((dim, dim))
        for e, c in terms:
            for i in range(dim):
                if e[i] == 0:
                    continue
                for j in range(dim):
                    de = e.copy()
                    de[i] -= 1
                    if de[j] == 0:
                        continue
                    fac = e[i] * de[j]
                    de[j] -= 1
                    H[i, j] += c * fac * _mono(x, de)
        return H

    key_params = {",".join(map(str, e)): c for e, c in
                  ((tuple(e), c) for e, c in terms)}
    return AnalyticField(dim, "poly", val, grad, hess, {"coeffs": key_params})


_FACTORIES = {
    "affine": affine,
    "quadratic": quadratic,
    "gaussian": gaussian,
    "sinusoid": sinusoid,
    "poly": polynomial,
}


def field_from_spec(name, dim, params=None):
    """Catalog lookup used by the CLI and experiment configs."""
    if name not in _FACTORIES:
        raise ValueError(
            f"unknown field {name!r}; available: {sorted(_FACTORIES)}"
        )
    return _FACTORIES[name](dim, **(params or {}))


def default_catalog(dim):
    """A fixed, varied roster of catalog fields used by the property suites."""
    if dim == 2:
        fields = [
            affine(2, [1.0, 0.0]),
            affine(2, [0.7, -1.3], 0.4),
            quadratic(2, 2.0 * np.eye(2)),
            quadratic(2, [[1.0, 0.4], [0.4, -0.8]], [0.3, -0.2], 0.1),
            gaussian(2, [0.0, 0.0], 1.0),
            gaussian(2, [0.4, -0.3], [0.7, 1.2]),
            sinusoid(2, [1.0, 1.0]),
            sinusoid(2, [2.0, 0.7], [0.3, -1.1]),
            polynomial(2, {(3, 0): 0.5, (1, 2): -1.0, (0, 1): 0.7}),
            polynomial(2, {(4, 0): 0.1, (2, 2): 0.3, (0, 4): -0.2, (1, 0): 1.0}),
        ]
    elif dim == 3:
        fields = [
            affine(3, [1.0, 0.0, 0.0]),
            affine(3, [0.7, -1.3, 0.5], 0.4),
            quadratic(3, 2.0 * np.eye(3)),
            quadratic(3, [[1.0, 0.4, -0.1], [0.4, -0.8, 0.2], [-0.1, 0.2, 0.5]],
                      [0.3, -0.2, 0.1]),
            gaussian(3, [0.0, 0.0, 0.0], 1.0),
            gaussian(3, [0.4, -0.3, 0.2], [0.7, 1.2, 0.9]),
            sinusoid(3, [1.0, 1.0, 1.0]),
            sinusoid(3, [2.0, 0.7, 1.4], [0.3, -1.1, 0.6]),
            polynomial(3, {(1, 1, 1): 1.0}),
            polynomial(3, {(3, 0, 0): 0.5, (1, 2, 0): -1.0, (0, 1, 2): 0.7,
                           (0, 0, 1): 0.2}),
        ]
    else:
        raise ValueError(f"dimension must be 2 or 3, got {dim}")
    return fields


# ---------------------------------------------------------------------------
# jets of transformations and the chain rule


def _compose_second_order(inner_jet: TransformJet, J_out, H_out, value_out):
    """Second-order data of outer(inner(.)) from both pieces' data."""
    Ji = inner_jet.jacobian
    Hi = inner_jet.hessians
    J = J_out @ Ji
    # H[m] = Ji^T H_out[m] Ji + sum_p J_out[m, p] Hi[p]
    H = np.einsum("ai,mab,bj->mij", Ji, H_out, Ji) + np.einsum(
        "mp,pij->mij", J_out, Hi
    )
    return TransformJet(inner_jet.dim, value_out, J, H)


def jet_of_transform(mmap: MobiusMap, u) -> TransformJet:
    """Image, Jacobian and component Hessians of a map at a point."""
    u = np.asarray(u, dtype=float)
    n = mmap.dim
    current = TransformJet(n, u, np.eye(n), np.zeros((n, n, n)))
    for step in mmap.steps:
        p = current.value
        current = _compose_second_order(
            current, step.jacobian(p), step.component_hessians(p), step.apply(p)
        )
    return current


def pullback(fjet: Jet, tjet: TransformJet) -> Jet:
    """Jet of f composed with a map, from f's jet at the image point.

    `fjet` must be the jet of f at tjet.value; the result is the jet of
    x -> f(map(x)) at the point where tjet was taken.
    """
    if fjet.dim != tjet.dim:
        raise DimensionMismatch(
            f"jet dimension {fjet.dim} vs transform dimension {tjet.dim}"
        )
    J = tjet.jacobian
    g = J.T @ fjet.grad
    H = J.T @ fjet.hess @ J + np.einsum("k,kij->ij", fjet.grad, tjet.hessians)
    H = 0.5 * (H + H.T)  # kill rounding asymmetry
    return Jet(fjet.dim, fjet.value, g, H)


def transported_jet(field: AnalyticField, mmap: MobiusMap, u) -> Jet:
    """Jet at u of the transported function g = f o mmap^{-1}."""
    tjet = jet_of_transform(mmap.inverse(), np.asarray(u, dtype=float))
    fjet = jet_of_field(field, tjet.value)
    return pullback(fjet, tjet)


def pullback_field(field: AnalyticField, mmap: MobiusMap, x) -> Jet:
    """Jet at u = mmap(x) of the transported function g = f o mmap^{-1}.

    This is the quantity whose invariants should match those of f's jet at x.
    """
    return transported_jet(field, mmap, mmap.apply(np.asarray(x, dtype=float)))
