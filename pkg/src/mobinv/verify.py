"""Seeded analytic property suites: invariance, relative weights, rigid parts.

Each check draws random catalog fields, random maps and random points, and
reports the worst deviation it saw.  Deviations are measured as
|a - b| / (1 + max(|a|, |b|)), the same mixed absolute/relative convention the
round-trip contracts use, so near-zero invariants do not blow up the metric.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .invariant import (
    DEFAULT_EPS_DEN,
    WeightKind,
    diff_inv_2d,
    diff_inv_3d,
    f_A,
    f_B,
    grad_norm_sq,
    laplacian,
    map_weight,
    table1_weight,
)
from .jets import default_catalog, jet_of_field, pullback_field
from .xform import (
    Inversion,
    MobiusMap,
    Reflection,
    Rotation,
    Stretching,
    Translation,
)

INVARIANCE_TOL = 1e-9
WEIGHT_TOL = 1e-9
RIGID_TOL = 1e-9
# Minimum clearance of a trajectory from any inversion center, in units of
# the inversion radius; closer approaches get the sample resampled.
TRAJECTORY_CLEARANCE = 0.2


@dataclass
class CheckResult:
    name: str
    max_deviation: float
    tolerance: float
    passed: bool
    n_evaluated: int
    detail: str = ""

    def line(self):
        status = "PASS" if self.passed else "FAIL"
        extra = f"  ({self.detail})" if self.detail else ""
        return (f"[{status}] {self.name}: max deviation {self.max_deviation:.3e} "
                f"(tolerance {self.tolerance:.1e}, {self.n_evaluated} samples){extra}")


def _dev(a, b):
    return abs(a - b) / (1.0 + max(abs(a), abs(b)))


def random_rotation(dim, rng):
    q, r = np.linalg.qr(rng.normal(size=(dim, dim)))
    q = q @ np.diag(np.sign(np.diag(r)))
    if np.linalg.det(q) < 0:
        q[:, 0] = -q[:, 0]
    return Rotation(q)


def random_step(dim, rng, kind=None):
    kind = kind if kind is not None else rng.integers(5)
    if kind == 0:
        return Translation(rng.uniform(-1.5, 1.5, size=dim))
    if kind == 1:
        return Stretching(float(np.exp(rng.uniform(-0.7, 0.7))), dim)
    if kind == 2:
        return random_rotation(dim, rng)
    if kind == 3:
        a = rng.normal(size=dim)
        a /= np.linalg.norm(a)
        return Reflection(a, float(rng.uniform(-1.0, 1.0)))
    center = rng.normal(size=dim)
    center *= rng.uniform(1.5, 3.0) / np.linalg.norm(center)
    return Inversion(center, float(rng.uniform(0.8, 1.6)))


def random_map(dim, rng, max_steps=5, rigid_only=False):
    n_steps = int(rng.integers(1, max_steps + 1))
    kinds = (0, 2, 3) if rigid_only else (0, 1, 2, 3, 4)
    steps = tuple(random_step(dim, rng, int(rng.choice(kinds))) for _ in range(n_steps))
    return MobiusMap(dim, steps)


def _trajectory_clear(mmap, x):
    """True when no inversion step gets dangerously close to its center."""
    p = np.asarray(x, dtype=float)
    for s in mmap.steps:
        if isinstance(s, Inversion):
            if np.linalg.norm(p - s.center) < TRAJECTORY_CLEARANCE * s.radius:
                return False
        p = s.apply(p)
    return True


def _draw_point(dim, rng):
    return rng.uniform(-1.0, 1.0, size=dim)


def check_invariance(dim, trials, seed, eps_den=DEFAULT_EPS_DEN,
                     catalog=None) -> CheckResult:
    """Differential invariant agrees before and after transport, all map shapes."""
    rng = np.random.default_rng(seed)
    fields = catalog if catalog is not None else default_catalog(dim)
    ratio = diff_inv_2d if dim == 2 else diff_inv_3d
    worst = 0.0
    done = 0
    attempts = 0
    while done < trials and attempts < 50 * max(trials, 1):
        attempts += 1
        fld = fields[done % len(fields)]
        # alternate single elementary steps with composed maps
        shape = done % 6
        if shape < 5:
            mmap = MobiusMap(dim, (random_step(dim, rng, shape),))
        else:
            mmap = random_map(dim, rng)
        x = _draw_point(dim, rng)
        if not (_trajectory_clear(mmap, x)
                and _trajectory_clear(mmap.inverse(), mmap.apply(x))):
            continue
        src = ratio(jet_of_field(fld, x), eps_den)
        if src.degenerate:
            continue
        out = ratio(pullback_field(fld, mmap, x), eps_den)
        if out.degenerate:
            continue
        worst = max(worst, _dev(src.value, out.value))
        done += 1
    return CheckResult(
        f"moebius invariance ({dim}-D ratio)", worst, INVARIANCE_TOL,
        worst <= INVARIANCE_TOL and done == trials, done,
    )


def _numden(dim, jet):
    if dim == 2:
        return laplacian(jet), grad_norm_sq(jet)
    return f_A(jet) + f_B(jet), grad_norm_sq(jet) ** 2


def check_table1_weights(dim, trials, seed, eps_den=DEFAULT_EPS_DEN,
                         exponent=None, catalog=None) -> CheckResult:
    """Numerator and denominator each scale by the tabulated weight.

    `exponent`, when given, overrides the stretching/inversion exponent on
    |det J| (used to prove the harness can fail); the default comes from
    table1_weight itself.
    """
    rng = np.random.default_rng(seed)
    fields = catalog if catalog is not None else default_catalog(dim)
    kind = WeightKind.NUMDEN_2D if dim == 2 else WeightKind.NUMDEN_3D
    worst = 0.0
    done = 0
    attempts = 0
    while done < trials and attempts < 50 * max(trials, 1):
        attempts += 1
        fld = fields[done % len(fields)]
        step = random_step(dim, rng, done % 5)
        mmap = MobiusMap(dim, (step,))
        x = _draw_point(dim, rng)
        if not (_trajectory_clear(mmap, x)
                and _trajectory_clear(mmap.inverse(), mmap.apply(x))):
            continue
        if exponent is None:
            w = table1_weight(kind, step, x)
        elif isinstance(step, (Stretching, Inversion)):
            w = abs(np.linalg.det(step.jacobian(x))) ** exponent
        else:
            w = 1.0
        num_f, den_f = _numden(dim, jet_of_field(fld, x))
        num_g, den_g = _numden(dim, pullback_field(fld, mmap, x))
        worst = max(worst, _dev(num_g, w * num_f), _dev(den_g, w * den_f))
        done += 1
    return CheckResult(
        f"table-1 relative weights ({dim}-D)", worst, WEIGHT_TOL,
        worst <= WEIGHT_TOL and done == trials, done,
    )


def check_composed_weight(dim, trials, seed, catalog=None) -> CheckResult:
    """Composed-map weight multiplies per step and matches |det J| directly."""
    rng = np.random.default_rng(seed)
    fields = catalog if catalog is not None else default_catalog(dim)
    kind = WeightKind.NUMDEN_2D if dim == 2 else WeightKind.NUMDEN_3D
    expo = -1.0 if dim == 2 else -4.0 / 3.0
    worst = 0.0
    done = 0
    attempts = 0
    while done < trials and attempts < 50 * max(trials, 1):
        attempts += 1
        fld = fields[done % len(fields)]
        mmap = random_map(dim, rng)
        x = _draw_point(dim, rng)
        if not (_trajectory_clear(mmap, x)
                and _trajectory_clear(mmap.inverse(), mmap.apply(x))):
            continue
        w = map_weight(kind, mmap, x)
        w_det = abs(np.linalg.det(mmap.jacobian(x))) ** expo
        num_f, den_f = _numden(dim, jet_of_field(fld, x))
        num_g, den_g = _numden(dim, pullback_field(fld, mmap, x))
        worst = max(worst, _dev(w, w_det), _dev(num_g, w * num_f),
                    _dev(den_g, w * den_f))
        done += 1
    return CheckResult(
        f"composed-map weights ({dim}-D)", worst, WEIGHT_TOL,
        worst <= WEIGHT_TOL and done == trials, done,
    )


def check_rigid_components(dim, trials, seed, catalog=None) -> CheckResult:
    """grad^2, Laplacian (and f_B in 3-D) survive rigid maps, not stretching."""
    rng = np.random.default_rng(seed)
    fields = catalog if catalog is not None else default_catalog(dim)
    components = [("grad_norm_sq", grad_norm_sq), ("laplacian", laplacian)]
    if dim == 3:
        components.append(("f_B", f_B))
    worst = 0.0
    done = 0
    attempts = 0
    while done < trials and attempts < 50 * max(trials, 1):
        attempts += 1
        fld = fields[done % len(fields)]
        mmap = random_map(dim, rng, rigid_only=True)
        x = _draw_point(dim, rng)
        src_jet = jet_of_field(fld, x)
        out_jet = pullback_field(fld, mmap, x)
        for _, comp in components:
            worst = max(worst, _dev(comp(src_jet), comp(out_jet)))
        done += 1

    # stretching must break every component by a visible factor
    stretch = MobiusMap(dim, (Stretching(2.0, dim),))
    probe = np.full(dim, 0.6)
    probe_field = fields[2] if len(fields) > 2 else fields[0]
    src = jet_of_field(probe_field, probe)
    out = pullback_field(probe_field, stretch, probe)
    witnessed = all(
        abs(comp(out) / comp(src) - 1.0) > 0.10
        for _, comp in components
        if abs(comp(src)) > 1e-9
    )
    detail = "stretching counterexample witnessed" if witnessed else \
        "stretching counterexample MISSING"
    return CheckResult(
        f"rigid-invariant components ({dim}-D)", worst, RIGID_TOL,
        worst <= RIGID_TOL and done == trials and witnessed, done, detail,
    )


def run_all(dim, trials, seed) -> list[CheckResult]:
    """The full seeded suite for one dimension; empty when trials = 0."""
    if trials <= 0:
        return []
    return [
        check_invariance(dim, trials, seed),
        check_table1_weights(dim, trials, seed + 1),
        check_composed_weight(dim, trials, seed + 2),
        check_rigid_components(dim, trials, seed + 3),
    ]
