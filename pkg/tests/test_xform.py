import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mobinv import (
    ComplexMobius,
    DimensionMismatch,
    Inversion,
    MobiusMap,
    PoleAtInput,
    Reflection,
    Rotation,
    SingularPoint,
    Stretching,
    Translation,
    eval_complex,
    eval_general_form,
    rotation_2d,
)
from mobinv.verify import random_map

from oracles import fd_jacobian


def test_inversion_maps_distance_two_to_half():
    inv = Inversion([0.0, 0.0], 1.0)
    assert np.allclose(inv.apply([2.0, 0.0]), [0.5, 0.0])


def test_inversion_fixes_sphere_points():
    inv = Inversion([0.0, 0.0], 1.0)
    assert np.allclose(inv.apply([1.0, 0.0]), [1.0, 0.0])


def test_reflection_mirrors_about_y_axis():
    ref = Reflection([1.0, 0.0], 0.0)
    assert np.allclose(ref.apply([3.0, 4.0]), [-3.0, 4.0])


def test_translation_inverse_negates_offset():
    t = Translation([1.0, -2.0])
    assert np.allclose(t.inverse().offset, [-1.0, 2.0])


def test_inversion_is_involution():
    inv = Inversion([0.0, 0.0], 2.0)
    m = MobiusMap(2, (inv, inv))
    assert np.allclose(m.apply([5.0, 5.0]), [5.0, 5.0])
    assert inv.inverse() is inv


def test_inverse_round_trip_fixes_point():
    m = MobiusMap(2, (Stretching(2.0, 2), Translation([1.0, 0.0])))
    x = np.array([3.0, 7.0])
    assert np.allclose(m.inverse().apply(m.apply(x)), x)


def test_compose_with_identity_is_noop():
    rng = np.random.default_rng(0)
    m = MobiusMap(2, (Inversion([3.0, 0.0], 1.0), rotation_2d(0.3)))
    ident = MobiusMap.identity(2)
    pts = rng.uniform(-1, 1, size=(100, 2))
    assert np.allclose(ident.compose(m).apply(pts), m.apply(pts))
    assert np.allclose(m.compose(ident).apply(pts), m.apply(pts))


def test_compose_two_quarter_turns():
    m = MobiusMap(2, (rotation_2d(np.pi / 2),))
    both = m.compose(m)
    assert np.allclose(both.apply([1.0, 0.0]), [-1.0, 0.0], atol=1e-15)


def test_compose_inversion_twice_is_identity():
    inv = MobiusMap(2, (Inversion([0.0, 0.0], 1.0),))
    assert np.allclose(inv.compose(inv).apply([0.3, 0.4]), [0.3, 0.4])


def test_compose_order_is_left_to_right():
    a = MobiusMap(2, (Stretching(2.0, 2),))
    b = MobiusMap(2, (Translation([1.0, 0.0]),))
    # a then b: 2x + (1,0)
    assert np.allclose(a.compose(b).apply([1.0, 1.0]), [3.0, 2.0])
    assert np.allclose(b.compose(a).apply([1.0, 1.0]), [4.0, 2.0])


def test_compose_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        MobiusMap(2, ()).compose(MobiusMap(3, ()))


def test_stretching_jacobian_determinant():
    m = MobiusMap(2, (Stretching(2.0, 2),))
    assert np.linalg.det(m.jacobian([0.3, -0.7])) == pytest.approx(4.0)


def test_inversion_jacobian_matches_finite_differences():
    # frozen from the central-difference oracle: |det| = 1/16 at (2, 0)
    inv = Inversion([0.0, 0.0], 1.0)
    m = MobiusMap(2, (inv,))
    J = m.jacobian([2.0, 0.0])
    assert abs(np.linalg.det(J)) == pytest.approx(1.0 / 16.0, abs=1e-12)
    J_fd = fd_jacobian(m.apply, [2.0, 0.0], h=1e-6)
    assert abs(np.linalg.det(J_fd)) == pytest.approx(1.0 / 16.0, abs=1e-6)
    assert np.allclose(J, J_fd, atol=1e-6)


def test_reflection_jacobian_determinant_is_minus_one():
    ref = Reflection([0.6, 0.8], 0.5)
    assert np.linalg.det(ref.jacobian([1.0, 2.0])) == pytest.approx(-1.0)


@pytest.mark.parametrize("dim", [2, 3])
def test_random_round_trips(dim):
    rng = np.random.default_rng(7)
    checked = 0
    while checked < 50:
        m = random_map(dim, rng)
        x = rng.uniform(-1, 1, size=dim)
        try:
            y = m.apply(x)
            back = m.inverse().apply(y)
        except SingularPoint:
            continue
        assert np.linalg.norm(back - x) <= 1e-9 * (1 + np.linalg.norm(x))
        checked += 1


@pytest.mark.parametrize("dim", [2, 3])
def test_jacobian_matches_finite_differences_randomly(dim):
    rng = np.random.default_rng(11)
    checked = 0
    while checked < 100:
        m = random_map(dim, rng)
        x = rng.uniform(-1, 1, size=dim)
        try:
            J = m.jacobian(x)
            J_fd = fd_jacobian(m.apply, x, h=1e-6)
        except SingularPoint:
            continue
        assert np.max(np.abs(J - J_fd)) < 1e-5
        checked += 1


@pytest.mark.parametrize("dim", [2, 3])
def test_conformality_of_jacobians(dim):
    rng = np.random.default_rng(13)
    checked = 0
    while checked < 100:
        m = random_map(dim, rng)
        x = rng.uniform(-1, 1, size=dim)
        try:
            J = m.jacobian(x)
        except SingularPoint:
            continue
        G = J.T @ J
        lam = np.trace(G) / dim
        assert lam > 0
        assert np.max(np.abs(G - lam * np.eye(dim))) <= 1e-9 * lam
        checked += 1


def test_stretching_times_reciprocal_is_identity():
    m = MobiusMap(3, (Stretching(3.0, 3), Stretching(1.0 / 3.0, 3)))
    x = np.array([0.1, -0.4, 2.0])
    assert np.allclose(m.apply(x), x)


@settings(max_examples=50, deadline=None)
@given(
    st.floats(-5, 5), st.floats(-5, 5),
    st.floats(0.5, 3.0),
)
def test_inversion_involution_property(px, py, r):
    p = np.array([px, py])
    inv = Inversion([0.1, -0.2], r)
    if np.linalg.norm(p - inv.center) < 1e-3:
        return
    assert np.allclose(inv.apply(inv.apply(p)), p, atol=1e-9)


@settings(max_examples=50, deadline=None)
@given(st.floats(-5, 5), st.floats(-5, 5), st.floats(-1, 1))
def test_reflection_involution_property(px, py, t):
    ref = Reflection([0.6, 0.8], t)
    p = np.array([px, py])
    assert np.allclose(ref.apply(ref.apply(p)), p, atol=1e-10)


def test_singular_point_raises():
    inv = Inversion([1.0, 1.0], 2.0)
    with pytest.raises(SingularPoint):
        inv.apply([1.0, 1.0])


def test_validation_rejects_bad_inputs():
    with pytest.raises(ValueError):
        Stretching(0.0, 2)
    with pytest.raises(ValueError):
        Inversion([0.0, 0.0], -1.0)
    with pytest.raises(ValueError):
        Rotation([[1.0, 0.1], [0.0, 1.0]])
    with pytest.raises(ValueError):
        Rotation([[1.0, 0.0], [0.0, -1.0]])  # determinant -1
    with pytest.raises(ValueError):
        Reflection([1.0, 1.0], 0.0)  # not unit
    with pytest.raises(DimensionMismatch):
        MobiusMap(2, (Translation([1.0, 2.0, 3.0]),))


def test_complex_mobius_examples():
    assert eval_complex(ComplexMobius(1, 0, 0, 1), 3 + 4j) == 3 + 4j
    assert eval_complex(ComplexMobius(0, 1, 1, 0), 2) == pytest.approx(0.5)
    assert eval_complex(ComplexMobius(1, 1, 0, 1), 1j) == 1 + 1j


def test_complex_mobius_pole_and_degeneracy():
    with pytest.raises(PoleAtInput):
        ComplexMobius(1, 0, 1, -2)(2.0)
    with pytest.raises(ValueError):
        ComplexMobius(1, 2, 2, 4)  # ad - bc = 0


def test_general_form_identity():
    x = np.array([1.0, 2.0, 3.0])
    out = eval_general_form(np.zeros(3), 1.0, np.eye(3), np.zeros(3), 0, x)
    assert np.allclose(out, x)


def test_general_form_reduces_to_inversion():
    rng = np.random.default_rng(3)
    a = np.array([0.5, -1.0])
    r = 1.3
    inv = Inversion(a, r)
    for _ in range(100):
        x = rng.uniform(-3, 3, size=2)
        if np.linalg.norm(x - a) < 1e-3:
            continue
        lhs = eval_general_form(a, r**2, np.eye(2), a, 2, x)
        assert np.allclose(lhs, inv.apply(x), atol=1e-12)


def test_general_form_offset_example():
    out = eval_general_form([1.0, 0.0, 0.0], 2.0, np.eye(3), np.zeros(3), 0,
                            [1.0, 1.0, 1.0])
    assert np.allclose(out, [3.0, 2.0, 2.0])


def test_general_form_rejects_bad_eps():
    with pytest.raises(ValueError):
        eval_general_form(np.zeros(2), 1.0, np.eye(2), np.zeros(2), 1, [1.0, 0.0])
    with pytest.raises(SingularPoint):
        eval_general_form(np.zeros(2), 1.0, np.eye(2), np.zeros(2), 2, [0.0, 0.0])


def test_json_round_trip():
    m = MobiusMap(2, (
        Translation([0.5, -1.0]),
        Stretching(2.0, 2),
        rotation_2d(0.7),
        Reflection([0.0, 1.0], 0.3),
        Inversion([2.0, 2.0], 1.5),
    ))
    m2 = MobiusMap.from_json(m.to_json())
    x = np.array([0.2, 0.4])
    assert np.allclose(m.apply(x), m2.apply(x), atol=1e-15)
    assert m2.dim == 2 and len(m2.steps) == 5


def test_json_3d_stretching_round_trip():
    m = MobiusMap(3, (Stretching(2.0, 3),))
    m2 = MobiusMap.from_dict(m.to_dict())
    assert m2.steps[0].dim == 3


def test_unknown_step_type_rejected():
    with pytest.raises(ValueError):
        MobiusMap.from_dict({"dim": 2, "steps": [{"type": "shear", "k": 1.0}]})


def test_batched_apply_matches_single():
    m = MobiusMap(2, (Inversion([3.0, 3.0], 1.0), Translation([0.1, 0.2])))
    pts = np.array([[0.0, 0.0], [1.0, -1.0], [0.5, 0.5]])
    batch = m.apply(pts)
    for i, p in enumerate(pts):
        assert np.allclose(batch[i], m.apply(p))
