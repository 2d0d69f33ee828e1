"""Differential invariants, their relative weights, and integral integrands.

The central quantities are the 2-D ratio (f_xx + f_yy) / (f_x^2 + f_y^2) and
its 3-D counterpart (f_A + f_B) / |grad f|^4, both unchanged when the function
is transported through a Moebius map of the domain.  Points where a guard on
the denominator fires are flagged degenerate instead of clamped; callers
exclude them from averages and descriptors.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch
from .jets import Jet
from .xform import Inversion, MobiusMap, Stretching

DEFAULT_EPS_DEN = 1e-12


class WeightKind(enum.Enum):
    """Row selector of the relative-weight table."""

    ABSOLUTE_2D = "absolute_2d"       # the full 2-D ratio: weight 1 always
    NUMDEN_2D = "numden_2d"           # numerator or denominator, 2-D
    NUMDEN_3D = "numden_3d"           # numerator or squared-denominator, 3-D


@dataclass(frozen=True)
class InvariantValue:
    """Scalar invariant with a degeneracy flag raised by denominator guards."""

    value: float
    degenerate: bool = False


def grad_norm_sq(j: Jet) -> float:
    """|grad f|^2, a rigid invariant in any dimension."""
    return float(j.grad @ j.grad)


def laplacian(j: Jet) -> float:
    """Trace of the Hessian, the Laplacian of f."""
    return float(np.trace(j.hess))


def f_B(j: Jet) -> float:
    """grad^T H grad; expands to the second rigid-invariant 3-D component."""
    if j.dim != 3:
        raise DimensionMismatch(f"f_B is defined in 3-D, got dim {j.dim}")
    return float(j.grad @ j.hess @ j.grad)


def f_A(j: Jet) -> float:
    """Laplacian times squared gradient norm."""
    if j.dim != 3:
        raise DimensionMismatch(f"f_A is defined in 3-D, got dim {j.dim}")
    return laplacian(j) * grad_norm_sq(j)


def diff_inv_2d(j: Jet, eps_den: float = DEFAULT_EPS_DEN) -> InvariantValue:
    """(f_xx + f_yy) / (f_x^2 + f_y^2), the 2-D Moebius invariant."""
    if j.dim != 2:
        raise DimensionMismatch(f"diff_inv_2d needs a 2-D jet, got dim {j.dim}")
    den = grad_norm_sq(j)
    if den < eps_den:
        return InvariantValue(0.0, degenerate=True)
    return InvariantValue(laplacian(j) / den)


def diff_inv_3d(j: Jet, eps_den: float = DEFAULT_EPS_DEN) -> InvariantValue:
    """(f_A + f_B) / |grad f|^4, the 3-D conformal invariant."""
    if j.dim != 3:
        raise DimensionMismatch(f"diff_inv_3d needs a 3-D jet, got dim {j.dim}")
    den = grad_norm_sq(j)
    if den < eps_den:
        return InvariantValue(0.0, degenerate=True)
    return InvariantValue((f_A(j) + f_B(j)) / den**2)


def table1_weight(kind: WeightKind, step, x) -> float:
    """Relative weight of a single elementary transform at a point.

    Weight w such that transported quantity = w * original quantity; only
    stretching and inversion scale the numerator/denominator rows, everything
    else (and the full ratio) has weight 1.
    """
    if kind is WeightKind.ABSOLUTE_2D:
        return 1.0
    if not isinstance(step, (Stretching, Inversion)):
        return 1.0
    det = abs(float(np.linalg.det(step.jacobian(np.asarray(x, dtype=float)))))
    if kind is WeightKind.NUMDEN_2D:
        return det ** (-1.0)
    if kind is WeightKind.NUMDEN_3D:
        return det ** (-4.0 / 3.0)
    raise ValueError(f"unknown weight kind {kind}")


def map_weight(kind: WeightKind, mmap: MobiusMap, x) -> float:
    """Composed-map weight: product of per-step weights along the trajectory.

    Equals |det J| of the whole map raised to the same exponent, by
    multiplicativity of Jacobian determinants.
    """
    pts = mmap.trajectory(x)
    w = 1.0
    for step, p in zip(mmap.steps, pts[:-1]):
        w *= table1_weight(kind, step, p)
    return w


def integrand_2d(j: Jet, n: int, family: str,
                 eps_den: float = DEFAULT_EPS_DEN) -> InvariantValue:
    """Local density of the 2-D integral-invariant families.

    Family "A" is lap^(n+1) / gns^n, family "B" is gns^(n+1) / lap^n, with
    lap = f_xx + f_yy and gns = f_x^2 + f_y^2.  n = 0 reduces to the plain
    Laplacian / gradient-energy densities.
    """
    if j.dim != 2:
        raise DimensionMismatch(f"integrand_2d needs a 2-D jet, got dim {j.dim}")
    if n < 0:
        raise ValueError("family exponent n must be nonnegative")
    lap = laplacian(j)
    gns = grad_norm_sq(j)
    if family == "A":
        if n > 0 and gns < eps_den:
            return InvariantValue(0.0, degenerate=True)
        return InvariantValue(lap ** (n + 1) / gns**n if n else lap)
    if family == "B":
        if n > 0 and abs(lap) < eps_den:
            return InvariantValue(0.0, degenerate=True)
        return InvariantValue(gns ** (n + 1) / lap**n if n else gns)
    raise ValueError(f"family must be 'A' or 'B', got {family!r}")


def integrand_3d(j: Jet, n: int, family: str,
                 eps_den: float = DEFAULT_EPS_DEN) -> InvariantValue:
    """Local density of the 3-D integral-invariant families.

    Family "A" is (f_A + f_B)^(3(n+1)/4) / gns^(3n/2), family "B" is
    gns^(3(n+1)/2) / (f_A + f_B)^(3n/4).  Fractional powers require a
    nonnegative base; a negative f_A + f_B flags the value degenerate.
    """
    if j.dim != 3:
        raise DimensionMismatch(f"integrand_3d needs a 3-D jet, got dim {j.dim}")
    if n < 0:
        raise ValueError("family exponent n must be nonnegative")
    ab = f_A(j) + f_B(j)
    gns = grad_norm_sq(j)
    if family == "A":
        if ab < 0:
            return InvariantValue(0.0, degenerate=True)
        if n > 0 and gns < eps_den:
            return InvariantValue(0.0, degenerate=True)
        num = ab ** (0.75 * (n + 1))
        return InvariantValue(num / gns ** (1.5 * n) if n else num)
    if family == "B":
        num = gns ** (1.5 * (n + 1))
        if n == 0:
            return InvariantValue(num)
        if ab < 0 or abs(ab) < eps_den:
            return InvariantValue(0.0, degenerate=True)
        return InvariantValue(num / ab ** (0.75 * n))
    raise ValueError(f"family must be 'A' or 'B', got {family!r}")
