import numpy as np
import pytest

from mobinv import (
    DimensionMismatch,
    Inversion,
    Jet,
    MobiusMap,
    SingularPoint,
    Stretching,
    Translation,
    default_catalog,
    field_from_spec,
    jet_of_field,
    jet_of_transform,
    pullback,
    pullback_field,
    rotation_2d,
    transported_jet,
)
from mobinv.jets import polynomial
from mobinv.verify import _trajectory_clear, random_map

from oracles import fd_gradient, fd_hessian, fd_jacobian


def test_jet_of_affine_field():
    f = field_from_spec("affine", 2, {"coeffs": [1.0, 0.0]})
    j = jet_of_field(f, [5.0, 7.0])
    assert j.value == 5.0
    assert np.allclose(j.grad, [1.0, 0.0])
    assert np.allclose(j.hess, 0.0)


def test_jet_of_paraboloid():
    f = field_from_spec("quadratic", 2, {"Q": [[2.0, 0.0], [0.0, 2.0]]})
    j = jet_of_field(f, [1.0, 0.0])
    assert j.value == pytest.approx(1.0)
    assert np.allclose(j.grad, [2.0, 0.0])
    assert np.allclose(j.hess, 2.0 * np.eye(2))


def test_jet_of_xyz_product():
    f = polynomial(3, {(1, 1, 1): 1.0})
    j = jet_of_field(f, [1.0, 2.0, 3.0])
    assert j.value == pytest.approx(6.0)
    assert np.allclose(j.grad, [6.0, 3.0, 2.0])
    expected = np.array([[0.0, 3.0, 2.0], [3.0, 0.0, 1.0], [2.0, 1.0, 0.0]])
    assert np.allclose(j.hess, expected)


@pytest.mark.parametrize("dim", [2, 3])
def test_catalog_evaluators_are_mutually_consistent(dim):
    rng = np.random.default_rng(21)
    for fld in default_catalog(dim):
        for _ in range(5):
            x = rng.uniform(-1.2, 1.2, size=dim)
            g = fld.gradient(x)
            assert np.max(np.abs(g - fd_gradient(fld.value, x))) < 1e-5
            H = fld.hessian(x)
            H_fd = fd_jacobian(fld.gradient, x, h=1e-6)
            assert np.max(np.abs(H - H_fd)) < 1e-4


def test_rotation_step_has_zero_component_hessians():
    m = MobiusMap(2, (rotation_2d(0.8),))
    tj = jet_of_transform(m, [0.3, 0.4])
    assert np.allclose(tj.hessians, 0.0)
    assert np.allclose(tj.jacobian, rotation_2d(0.8).matrix)


def test_inversion_component_hessian_matches_fd_oracle():
    # frozen from the oracle: x_uu = 2 at (1, 0) for inversion about the unit circle
    m = MobiusMap(2, (Inversion([0.0, 0.0], 1.0),))
    tj = jet_of_transform(m, [1.0, 0.0])
    assert tj.hessians[0, 0, 0] == pytest.approx(2.0, abs=1e-12)
    for k in range(2):
        H_fd = fd_hessian(lambda p, k=k: m.apply(p)[k], [1.0, 0.0], h=1e-4)
        assert np.max(np.abs(tj.hessians[k] - H_fd)) < 1e-4


@pytest.mark.parametrize("dim", [2, 3])
def test_transform_jet_matches_fd_on_random_maps(dim):
    rng = np.random.default_rng(5)
    checked = 0
    while checked < 20:
        m = random_map(dim, rng)
        u = rng.uniform(-1, 1, size=dim)
        if not _trajectory_clear(m, u):
            continue
        tj = jet_of_transform(m, u)
        assert np.allclose(tj.value, m.apply(u))
        J_fd = fd_jacobian(m.apply, u, h=1e-6)
        assert np.max(np.abs(tj.jacobian - J_fd)) < 1e-5
        for k in range(dim):
            H_fd = fd_hessian(lambda p, k=k: m.apply(p)[k], u, h=1e-4)
            assert np.max(np.abs(tj.hessians[k] - H_fd)) < 1e-4 * (
                1 + np.max(np.abs(tj.hessians[k]))
            )
        checked += 1


def test_composed_translations_have_zero_second_order():
    m = MobiusMap(2, (Translation([1.0, 2.0]), Translation([-0.5, 0.3])))
    tj = jet_of_transform(m, [0.1, 0.2])
    assert np.allclose(tj.hessians, 0.0)
    assert np.allclose(tj.jacobian, np.eye(2))


def test_pullback_through_identity_is_noop():
    f = field_from_spec("gaussian", 2, {"center": [0.2, 0.1], "width": 0.8})
    x = np.array([0.4, -0.3])
    fjet = jet_of_field(f, x)
    tj = jet_of_transform(MobiusMap.identity(2), x)
    out = pullback(fjet, tj)
    assert out.value == fjet.value
    assert np.allclose(out.grad, fjet.grad)
    assert np.allclose(out.hess, fjet.hess)


def test_pullback_through_stretching():
    # f = x^2 + y^2, T = stretch by 2: g(u, v) = (u^2 + v^2) / 4
    f = field_from_spec("quadratic", 2, {"Q": [[2.0, 0.0], [0.0, 2.0]]})
    m = MobiusMap(2, (Stretching(2.0, 2),))
    out = transported_jet(f, m, [2.0, 0.0])
    assert out.value == pytest.approx(1.0)
    assert np.allclose(out.grad, [1.0, 0.0])
    assert np.allclose(out.hess, 0.5 * np.eye(2))


def test_pullback_of_coordinate_through_inversion():
    # frozen from the finite-difference oracle on g(u,v) = u / (u^2 + v^2)
    f = field_from_spec("affine", 2, {"coeffs": [1.0, 0.0]})
    m = MobiusMap(2, (Inversion([0.0, 0.0], 1.0),))
    out = transported_jet(f, m, [1.0, 1.0])
    assert out.value == pytest.approx(0.5, abs=1e-12)
    assert np.allclose(out.grad, [0.0, -0.5], atol=1e-12)
    assert np.allclose(out.hess, [[-0.5, 0.5], [0.5, 0.5]], atol=1e-12)

    def explicit(p):
        return p[0] / (p[0] ** 2 + p[1] ** 2)

    assert np.max(np.abs(out.grad - fd_gradient(explicit, [1.0, 1.0]))) < 1e-4
    assert np.max(np.abs(out.hess - fd_hessian(explicit, [1.0, 1.0]))) < 1e-4


@pytest.mark.parametrize("dim", [2, 3])
def test_chain_rule_against_fd_of_composite(dim):
    rng = np.random.default_rng(31)
    fields = default_catalog(dim)
    checked = 0
    attempts = 0
    while checked < 100 and attempts < 5000:
        attempts += 1
        fld = fields[checked % len(fields)]
        m = random_map(dim, rng, max_steps=3)
        u = rng.uniform(-1, 1, size=dim)
        back = m.inverse()
        if not _trajectory_clear(back, u):
            continue

        def composite(p):
            return fld.value(back.apply(p))

        try:
            out = transported_jet(fld, m, u)
        except SingularPoint:
            continue
        g_fd = fd_gradient(composite, u, h=1e-6)
        H_fd = fd_hessian(composite, u, h=1e-4)
        g_scale = 1 + np.max(np.abs(out.grad))
        h_scale = 1 + np.max(np.abs(out.hess))
        assert np.max(np.abs(out.grad - g_fd)) < 1e-6 * g_scale
        assert np.max(np.abs(out.hess - H_fd)) < 1e-4 * h_scale
        checked += 1
    assert checked == 100


@pytest.mark.parametrize("dim", [2, 3])
def test_functoriality_of_pullback(dim):
    rng = np.random.default_rng(41)
    fields = default_catalog(dim)
    checked = 0
    while checked < 30:
        fld = fields[checked % len(fields)]
        m1 = random_map(dim, rng, max_steps=2)
        m2 = random_map(dim, rng, max_steps=2)
        x = rng.uniform(-1, 1, size=dim)
        both = m1.compose(m2)
        try:
            w = both.apply(x)
            if not (_trajectory_clear(both, x)
                    and _trajectory_clear(both.inverse(), w)):
                continue
            direct = transported_jet(fld, both, w)
            tj2 = jet_of_transform(m2.inverse(), w)
            tj1 = jet_of_transform(m1.inverse(), tj2.value)
            fjet = jet_of_field(fld, tj1.value)
            staged = pullback(pullback(fjet, tj1), tj2)
        except SingularPoint:
            continue
        scale = 1 + np.max(np.abs(direct.hess))
        assert abs(direct.value - staged.value) <= 1e-9 * (1 + abs(direct.value))
        assert np.max(np.abs(direct.grad - staged.grad)) <= 1e-9 * (
            1 + np.max(np.abs(direct.grad))
        )
        assert np.max(np.abs(direct.hess - staged.hess)) <= 1e-9 * scale
        checked += 1


def test_pullback_output_hessian_symmetric():
    rng = np.random.default_rng(51)
    fld = default_catalog(2)[5]
    for _ in range(20):
        m = random_map(2, rng)
        x = rng.uniform(-1, 1, size=2)
        try:
            out = pullback_field(fld, m, x)
        except SingularPoint:
            continue
        assert np.max(np.abs(out.hess - out.hess.T)) <= 1e-12


def test_jet_validation():
    with pytest.raises(ValueError):
        Jet(2, 0.0, [0.0, 0.0], [[0.0, 1.0], [0.0, 0.0]])  # asymmetric
    with pytest.raises(ValueError):
        Jet(2, np.nan, [0.0, 0.0], np.zeros((2, 2)))
    with pytest.raises(DimensionMismatch):
        Jet(3, 0.0, [0.0, 0.0], np.zeros((2, 2)))
    with pytest.raises(DimensionMismatch):
        pullback(
            Jet(2, 0.0, np.zeros(2), np.zeros((2, 2))),
            jet_of_transform(MobiusMap.identity(3), np.zeros(3)),
        )


def test_polynomial_rejects_degree_five():
    with pytest.raises(ValueError):
        polynomial(2, {(5, 0): 1.0})


def test_field_from_spec_unknown_name():
    with pytest.raises(ValueError):
        field_from_spec("bessel", 2, {})


def test_field_from_spec_string_exponents():
    f = field_from_spec("poly", 2, {"coeffs": {"2,1": 3.0}})
    assert f.value([2.0, 1.0]) == pytest.approx(12.0)
