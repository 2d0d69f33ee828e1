"""n-dimensional Moebius transformations assembled from elementary steps.

A map is an ordered list of elementary transformations (translation,
stretching, rotation, reflection, sphere inversion) applied left to right.
Every step carries closed forms for its action, its inverse, its Jacobian and
the per-component Hessians, so downstream derivative propagation is exact up
to rounding.

All types are immutable after construction and all operations are pure.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch, PoleAtInput, SingularPoint

# Orthogonality / unit-norm validation tolerance for constructor inputs.
ORTHO_TOL = 1e-12
# Points closer than SINGULAR_GUARD * radius to an inversion center are
# rejected rather than mapped to infinity.
SINGULAR_GUARD = 1e-12


def _as_vector(a, dim=None):
    v = np.asarray(a, dtype=float)
    if v.ndim != 1:
        raise ValueError(f"expected a 1-D vector, got shape {v.shape}")
    if dim is not None and v.shape[0] != dim:
        raise DimensionMismatch(f"expected a {dim}-vector, got {v.shape[0]}")
    return v


def _frozen(a):
    out = np.array(a, dtype=float)
    out.flags.writeable = False
    return out


class ElementaryTransform:
    """Common interface of the five generators.

    `apply` accepts a single point of shape (n,) or a batch of shape (N, n).
    `jacobian` and `component_hessians` take a single point.
    """

    dim: int

    def apply(self, x):
        raise NotImplementedError

    def inverse(self):
        raise NotImplementedError

    def jacobian(self, x):
        raise NotImplementedError

    def component_hessians(self, x):
        """Array H of shape (n, n, n); H[k] is the Hessian of output k."""
        # Zero for every affine step; the inversion overrides this.
        n = self.dim
        return np.zeros((n, n, n))

    def _check_point(self, x):
        x = np.asarray(x, dtype=float)
        if x.shape[-1] != self.dim:
            raise DimensionMismatch(
                f"point of dimension {x.shape[-1]} fed to a {self.dim}-D transform"
            )
        return x

    def to_dict(self):
        raise NotImplementedError


@dataclass(frozen=True)
class Translation(ElementaryTransform):
    offset: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "offset", _frozen(_as_vector(self.offset)))

    @property
    def dim(self):
        return self.offset.shape[0]

    def apply(self, x):
        return self._check_point(x) + self.offset

    def inverse(self):
        return Translation(-self.offset)

    def jacobian(self, x):
        return np.eye(self.dim)

    def to_dict(self):
        return {"type": "translation", "offset": self.offset.tolist()}


@dataclass(frozen=True)
class Stretching(ElementaryTransform):
    factor: float
    ndim: int = 2

    def __post_init__(self):
        if not self.factor > 0:
            raise ValueError(f"stretching factor must be positive, got {self.factor}")
        object.__setattr__(self, "factor", float(self.factor))

    @property
    def dim(self):
        return self.ndim

    def apply(self, x):
        return self.factor * self._check_point(x)

    def inverse(self):
        return Stretching(1.0 / self.factor, self.ndim)

    def jacobian(self, x):
        return self.factor * np.eye(self.dim)

    def to_dict(self):
        return {"type": "stretching", "factor": self.factor, "dim": self.ndim}


@dataclass(frozen=True)
class Rotation(ElementaryTransform):
    matrix: np.ndarray

    def __post_init__(self):
        R = np.asarray(self.matrix, dtype=float)
        if R.ndim != 2 or R.shape[0] != R.shape[1]:
            raise ValueError(f"rotation matrix must be square, got shape {R.shape}")
        # Validate, never re-orthonormalize: silent repair hides caller bugs.
        if np.max(np.abs(R.T @ R - np.eye(R.shape[0]))) > ORTHO_TOL:
            raise ValueError("rotation matrix is not orthogonal within 1e-12")
        if abs(np.linalg.det(R) - 1.0) > ORTHO_TOL:
            raise ValueError("rotation matrix must have determinant +1")
        object.__setattr__(self, "matrix", _frozen(R))

    @property
    def dim(self):
        return self.matrix.shape[0]

    def apply(self, x):
        return self._check_point(x) @ self.matrix.T

    def inverse(self):
        return Rotation(self.matrix.T)

    def jacobian(self, x):
        return self.matrix.copy()

    def to_dict(self):
        return {"type": "rotation", "matrix": self.matrix.tolist()}


def rotation_2d(angle):
    """2-D rotation by `angle` radians, counterclockwise."""
    c, s = np.cos(angle), np.sin(angle)
    return Rotation([[c, -s], [s, c]])


@dataclass(frozen=True)
class Reflection(ElementaryTransform):
    """Reflection about the plane {x : normal . x = distance}."""

    normal: np.ndarray
    distance: float = 0.0

    def __post_init__(self):
        a = _as_vector(self.normal)
        if abs(np.linalg.norm(a) - 1.0) > ORTHO_TOL:
            raise ValueError("reflection normal must have unit norm within 1e-12")
        object.__setattr__(self, "normal", _frozen(a))
        object.__setattr__(self, "distance", float(self.distance))

    @property
    def dim(self):
        return self.normal.shape[0]

    def apply(self, x):
        x = self._check_point(x)
        proj = x @ self.normal - self.distance
        return x - 2.0 * np.multiply.outer(proj, self.normal)

    def inverse(self):
        return self  # involution

    def jacobian(self, x):
        a = self.normal
        return np.eye(self.dim) - 2.0 * np.outer(a, a)

    def to_dict(self):
        return {
            "type": "reflection",
            "normal": self.normal.tolist(),
            "distance": self.distance,
        }


@dataclass(frozen=True)
class Inversion(ElementaryTransform):
    """Inversion about the sphere of given center and radius.

    x maps to center + radius^2 (x - center) / |x - center|^2; sphere points
    are fixed, the center itself is rejected via SingularPoint.
    """

    center: np.ndarray
    radius: float

    def __post_init__(self):
        if not self.radius > 0:
            raise ValueError(f"inversion radius must be positive, got {self.radius}")
        object.__setattr__(self, "center", _frozen(_as_vector(self.center)))
        object.__setattr__(self, "radius", float(self.radius))

    @property
    def dim(self):
        return self.center.shape[0]

    def _offsets(self, x):
        x = self._check_point(x)
        d = x - self.center
        rho2 = np.sum(d * d, axis=-1)
        guard = (SINGULAR_GUARD * self.radius) ** 2
        if np.any(rho2 < guard):
            if np.ndim(rho2) == 0:
                raise SingularPoint(
                    f"point {x.tolist()} coincides with inversion center "
                    f"{self.center.tolist()}"
                )
            idx = int(np.argmax(rho2 < guard))
            raise SingularPoint(
                f"point index {idx} coincides with inversion center "
                f"{self.center.tolist()}",
                index=idx,
            )
        return d, rho2

    def apply(self, x):
        d, rho2 = self._offsets(x)
        return self.center + self.radius**2 * d / rho2[..., None]

    def inverse(self):
        return self  # involution

    def jacobian(self, x):
        d, rho2 = self._offsets(x)
        n = self.dim
        return (self.radius**2 / rho2) * (np.eye(n) - 2.0 * np.outer(d, d) / rho2)

    def component_hessians(self, x):
        d, rho2 = self._offsets(x)
        n = self.dim
        eye = np.eye(n)
        # H[k,i,j] = r^2 * (-2 (d_j I_ki + d_i I_kj + d_k I_ij) / rho^4
        #                   + 8 d_k d_i d_j / rho^6)
        sym = (
            np.einsum("ki,j->kij", eye, d)
            + np.einsum("kj,i->kij", eye, d)
            + np.einsum("ij,k->kij", eye, d)
        )
        cubic = np.einsum("k,i,j->kij", d, d, d)
        return self.radius**2 * (-2.0 * sym / rho2**2 + 8.0 * cubic / rho2**3)

    def to_dict(self):
        return {
            "type": "inversion",
            "center": self.center.tolist(),
            "radius": self.radius,
        }


@dataclass(frozen=True)
class MobiusMap:
    """Ordered composition of elementary transformations in dimension 2 or 3.

    Steps are applied left to right: `apply` runs steps[0] first.
    """

    dim: int
    steps: tuple = field(default_factory=tuple)

    def __post_init__(self):
        if self.dim not in (2, 3):
            raise ValueError(f"dimension must be 2 or 3, got {self.dim}")
        steps = tuple(self.steps)
        for s in steps:
            if s.dim != self.dim:
                raise DimensionMismatch(
                    f"{s.dim}-D step inside a {self.dim}-D map"
                )
        object.__setattr__(self, "steps", steps)

    @classmethod
    def identity(cls, dim):
        return cls(dim, ())

    def apply(self, x):
        """Image of a point (n,) or point batch (N, n)."""
        p = np.asarray(x, dtype=float)
        if p.shape[-1] != self.dim:
            raise DimensionMismatch(
                f"point of dimension {p.shape[-1]} fed to a {self.dim}-D map"
            )
        for s in self.steps:
            p = s.apply(p)
        return p

    __call__ = apply

    def inverse(self):
        return MobiusMap(self.dim, tuple(s.inverse() for s in reversed(self.steps)))

    def compose(self, other):
        """Map doing self first, then other."""
        if self.dim != other.dim:
            raise DimensionMismatch(
                f"cannot compose {self.dim}-D and {other.dim}-D maps"
            )
        return MobiusMap(self.dim, self.steps + other.steps)

    def jacobian(self, x):
        """Chain-rule Jacobian at a single point."""
        p = np.asarray(x, dtype=float)
        J = np.eye(self.dim)
        for s in self.steps:
            J = s.jacobian(p) @ J
            p = s.apply(p)
        return J

    def trajectory(self, x):
        """Intermediate points [x, s1(x), s2(s1(x)), ...]; last entry is apply(x)."""
        p = np.asarray(x, dtype=float)
        pts = [p]
        for s in self.steps:
            p = s.apply(p)
            pts.append(p)
        return pts

    def to_dict(self):
        return {"dim": self.dim, "steps": [s.to_dict() for s in self.steps]}

    @classmethod
    def from_dict(cls, data):
        try:
            dim = int(data["dim"])
            steps = tuple(step_from_dict(s, dim) for s in data.get("steps", []))
        except KeyError as exc:
            raise ValueError(f"map description missing key {exc}") from exc
        return cls(dim, steps)

    def to_json(self):
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))


def step_from_dict(data, dim=None):
    kind = data.get("type")
    if kind == "translation":
        return Translation(data["offset"])
    if kind == "stretching":
        return Stretching(data["factor"], int(data.get("dim", dim or 2)))
    if kind == "rotation":
        return Rotation(data["matrix"])
    if kind == "reflection":
        return Reflection(data["normal"], data.get("distance", 0.0))
    if kind == "inversion":
        return Inversion(data["center"], data["radius"])
    raise ValueError(f"unknown elementary transform type {kind!r}")


def load_map(path):
    """Read a MobiusMap from a JSON description file."""
    with open(path, encoding="utf-8") as fh:
        return MobiusMap.from_dict(json.load(fh))


@dataclass(frozen=True)
class ComplexMobius:
    """One-variable complex map z -> (a z + b) / (c z + d)."""

    a: complex
    b: complex
    c: complex
    d: complex

    def __post_init__(self):
        a, b, c, d = (complex(v) for v in (self.a, self.b, self.c, self.d))
        det = a * d - b * c
        if abs(det) < 1e-12 * max(abs(a * d), abs(b * c), 1.0):
            raise ValueError("degenerate coefficients: a d - b c is (numerically) zero")
        for name, v in zip("abcd", (a, b, c, d)):
            object.__setattr__(self, name, v)

    def __call__(self, z):
        den = self.c * z + self.d
        if abs(den) < 1e-12:
            raise PoleAtInput(f"input {z} is at the pole of the map")
        return (self.a * z + self.b) / den


def eval_complex(cm: ComplexMobius, z):
    return cm(z)


def eval_general_form(b, gamma, A, a, eps, x):
    """Closed general form b + gamma A (x - a) / |x - a|^eps with eps in {0, 2}."""
    if eps not in (0, 2):
        raise ValueError(f"eps must be 0 or 2, got {eps}")
    A = np.asarray(A, dtype=float)
    if np.max(np.abs(A.T @ A - np.eye(A.shape[0]))) > ORTHO_TOL:
        raise ValueError("A must be orthogonal")
    b = _as_vector(b)
    a = _as_vector(a, b.shape[0])
    x = _as_vector(x, b.shape[0])
    d = x - a
    if eps == 2:
        rho2 = float(d @ d)
        if rho2 < (1e-12) ** 2:
            raise SingularPoint(f"point {x.tolist()} coincides with the center {a.tolist()}")
        return b + gamma * (A @ d) / rho2
    return b + gamma * (A @ d)
