"""Quadrature of the integral-invariant densities over planar annuli.

An annulus centered on the inversion center maps to another annulus, so the
pair (domain, image domain) stays exactly representable and the two integrals
can be compared without any boundary approximation.  Radial nodes are
Gauss-Legendre, angular nodes are the uniform trapezoid rule (spectrally
accurate for smooth periodic integrands).
"""

from __future__ import annotations

from dataclasses import dataclass, field as dataclass_field

import numpy as np

from .invariant import DEFAULT_EPS_DEN, integrand_2d
from .jets import AnalyticField, jet_of_field, transported_jet
from .xform import Inversion, MobiusMap


@dataclass(frozen=True)
class AnnulusRule:
    """Tensor polar quadrature: sum(weights * F(points)) over the annulus."""

    points: np.ndarray   # (N, 2)
    weights: np.ndarray  # (N,)


def annulus_rule(r0, r1, m, center=(0.0, 0.0)) -> AnnulusRule:
    """Rule with m Gauss-Legendre radii and 2m uniform angles."""
    if not 0 < r0 < r1:
        raise ValueError(f"need 0 < r0 < r1, got ({r0}, {r1})")
    nodes, wts = np.polynomial.legendre.leggauss(m)
    rho = 0.5 * (r1 - r0) * nodes + 0.5 * (r1 + r0)
    wr = 0.5 * (r1 - r0) * wts
    theta = np.linspace(0.0, 2.0 * np.pi, 2 * m, endpoint=False)
    wt = 2.0 * np.pi / (2 * m)
    P = np.stack(
        [
            rho[:, None] * np.cos(theta)[None, :] + center[0],
            rho[:, None] * np.sin(theta)[None, :] + center[1],
        ],
        axis=-1,
    ).reshape(-1, 2)
    W = np.broadcast_to((wr * rho * wt)[:, None], (m, 2 * m)).reshape(-1).copy()
    return AnnulusRule(P, W)


def integrate_density(rule: AnnulusRule, density) -> float:
    """Integrate a callable point -> scalar against the rule."""
    vals = np.array([density(p) for p in rule.points])
    return float(rule.weights @ vals)


def integral_invariant_2d(field: AnalyticField, rule: AnnulusRule, n, family,
                          eps_den=DEFAULT_EPS_DEN) -> float:
    """Integral of the 2-D family density of f over the rule's annulus."""

    def density(p):
        iv = integrand_2d(jet_of_field(field, p), n, family, eps_den)
        return 0.0 if iv.degenerate else iv.value

    return integrate_density(rule, density)


def transported_integral_2d(field: AnalyticField, mmap: MobiusMap,
                            rule: AnnulusRule, n, family,
                            eps_den=DEFAULT_EPS_DEN) -> float:
    """Same, but for g = f o mmap^{-1}; the rule must cover the image domain."""

    def density(p):
        iv = integrand_2d(transported_jet(field, mmap, p), n, family, eps_den)
        return 0.0 if iv.degenerate else iv.value

    return integrate_density(rule, density)


@dataclass
class ConvergenceReport:
    """Refinement history of the domain/image integral pair."""

    source: float
    image: float
    rel_gap: float
    history: list = dataclass_field(default_factory=list)  # (m, source, image, gap)
    converged: bool = False

    @property
    def gaps(self):
        return [h[3] for h in self.history]


def _rel_gap(a, b):
    return abs(a - b) / max(abs(a), abs(b), 1e-300)


def inversion_invariance_report(field: AnalyticField, n, family,
                                r0=0.5, r1=2.0, radius=1.0,
                                m_start=8, m_max=256, rtol=1e-7,
                                eps_den=DEFAULT_EPS_DEN) -> ConvergenceReport:
    """Compare the family integral over an annulus with the integral of the
    transported function over the image annulus under inversion about the
    annulus center, refining both quadratures until they individually settle.
    """
    inv = Inversion(np.zeros(2), radius)
    mmap = MobiusMap(2, (inv,))
    # Inversion about the shared center maps the annulus to another annulus.
    s0, s1 = radius**2 / r1, radius**2 / r0
    history = []
    prev = None
    converged = False
    m = m_start
    while m <= m_max:
        src = integral_invariant_2d(field, annulus_rule(r0, r1, m), n, family, eps_den)
        img = transported_integral_2d(field, mmap, annulus_rule(s0, s1, m), n,
                                      family, eps_den)
        history.append((m, src, img, _rel_gap(src, img)))
        if prev is not None:
            drift = max(abs(src - prev[0]), abs(img - prev[1]))
            if drift <= rtol * (1.0 + max(abs(src), abs(img))):
                converged = True
                break
        prev = (src, img)
        m *= 2
    src, img = history[-1][1], history[-1][2]
    return ConvergenceReport(src, img, _rel_gap(src, img), history, converged)
