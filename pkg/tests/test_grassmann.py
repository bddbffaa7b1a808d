import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from curvametric.grassmann import (
    AffinePlane,
    Plane,
    check_basis_class,
    const_c2,
    const_c3,
    const_c4,
    gram_schmidt_rho,
    grassmann_distance,
)


def rotation_2d(angle):
    c, s = math.cos(angle), math.sin(angle)
    return np.array([[c, -s], [s, c]])


def random_plane(rng, n, m):
    a = rng.standard_normal((m, n))
    return Plane.span(a)


# ---------------------------------------------------------------- Plane type


def test_plane_accepts_orthonormal_frame():
    p = Plane(np.eye(3)[:2])
    assert p.dim == 2
    assert p.ambient_dim == 3


def test_plane_reorthonormalizes_small_deviation():
    frame = np.eye(3)[:2].copy()
    frame[0, 1] += 1e-8
    p = Plane(frame)
    g = p.frame @ p.frame.T
    assert np.max(np.abs(g - np.eye(2))) < 1e-12


def test_plane_rejects_bad_frame():
    frame = np.eye(3)[:2].copy()
    frame[0, 1] += 1e-3
    with pytest.raises(ValueError):
        Plane(frame)


def test_plane_rejects_full_dimension():
    with pytest.raises(ValueError):
        Plane(np.eye(2))


def test_project_reject_decompose():
    p = Plane.span([[1.0, 1.0, 0.0]])
    v = np.array([3.0, 1.0, 2.0])
    assert np.allclose(p.project(v) + p.reject(v), v)
    assert abs(float(p.project(v) @ p.reject(v))) < 1e-12
    # projection onto span((1,1,0)/sqrt(2)) of (3,1,2) is (2,2,0)
    assert np.allclose(p.project(v), [2.0, 2.0, 0.0])


def test_affine_plane_distance():
    h = AffinePlane(np.array([0.0, 0.0, 1.0]), Plane.coordinate(3, 2))
    assert math.isclose(h.distance_to(np.array([5.0, -3.0, 4.0])), 3.0)
    assert np.allclose(h.project_point(np.array([5.0, -3.0, 4.0])), [5.0, -3.0, 1.0])


# ------------------------------------------------------------------ distance


def test_distance_rotated_line_is_sine():
    # lines at angle alpha have projector-difference norm sin(alpha)
    e1 = Plane(np.array([[1.0, 0.0]]))
    for alpha in [0.1, 0.3, math.pi / 4, 1.2]:
        rotated = Plane((rotation_2d(alpha) @ np.array([[1.0], [0.0]])).T)
        assert math.isclose(grassmann_distance(e1, rotated), math.sin(alpha), rel_tol=1e-12)


def test_distance_zero_iff_same_plane():
    p = Plane.span([[1.0, 2.0, 2.0], [0.0, 1.0, -1.0]])
    q = Plane.span([[2.0, 4.0, 4.0], [1.0, 3.0, 1.0]])  # same span, other basis
    assert grassmann_distance(p, q) < 1e-12


def test_distance_orthogonal_planes_is_one():
    p = Plane.span([[1.0, 0.0, 0.0, 0.0]])
    q = Plane.span([[0.0, 0.0, 1.0, 0.0]])
    assert math.isclose(grassmann_distance(p, q), 1.0, rel_tol=1e-12)


def test_distance_dimension_mismatch():
    p = Plane.coordinate(3, 1)
    q = Plane.coordinate(3, 2)
    with pytest.raises(ValueError):
        grassmann_distance(p, q)
    with pytest.raises(ValueError):
        grassmann_distance(p, Plane.coordinate(4, 1))


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2 ** 31 - 1), st.integers(1, 3), st.integers(4, 6))
def test_distance_is_a_metric_sample(seed, m, n):
    rng = np.random.default_rng(seed)
    u = random_plane(rng, n, m)
    v = random_plane(rng, n, m)
    w = random_plane(rng, n, m)
    duv = grassmann_distance(u, v)
    assert 0.0 <= duv <= 1.0 + 1e-12
    assert math.isclose(duv, grassmann_distance(v, u), abs_tol=1e-12)
    assert duv <= grassmann_distance(u, w) + grassmann_distance(w, v) + 1e-10


# ------------------------------------------------------- perturbation bounds


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 2 ** 31 - 1), st.integers(1, 3), st.integers(4, 6))
def test_orthonormal_perturbation_bound(seed, m, n):
    # orthonormal frames within theta per vector give distance <= 2 m theta
    rng = np.random.default_rng(seed)
    u = random_plane(rng, n, m)
    noise = 0.05 * rng.standard_normal((m, n))
    v = Plane.span(u.frame + noise)
    theta = float(np.max(np.linalg.norm(u.frame - v.frame, axis=1)))
    assert grassmann_distance(u, v) <= 2 * m * theta + 1e-12


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 2 ** 31 - 1), st.integers(1, 3), st.integers(4, 6))
def test_small_rejection_bound(seed, m, n):
    # if each frame vector of V nearly lies in U, the planes are C3-close
    rng = np.random.default_rng(seed)
    u = random_plane(rng, n, m)
    noise = 0.03 * rng.standard_normal((m, n))
    v = Plane.span(u.frame + noise)
    theta = float(np.max(np.linalg.norm(v.frame - u.project(v.frame), axis=1)))
    assert theta < 1.0 / math.sqrt(2.0)
    assert grassmann_distance(u, v) <= const_c3(m) * theta + 1e-12


# ------------------------------------------------------------- basis classes


def test_check_basis_class_accepts_and_rejects():
    basis = np.array([[1.02, 0.0], [0.01, 0.99]])
    assert check_basis_class(basis, rho=1.0, eps=0.05, delta=0.02)
    assert not check_basis_class(basis, rho=1.0, eps=0.01, delta=0.02)
    assert not check_basis_class(basis, rho=1.0, eps=0.05, delta=0.005)


def test_check_basis_class_empty():
    with pytest.raises(ValueError):
        check_basis_class(np.empty((0, 3)), 1.0, 0.1, 0.1)


def test_gram_schmidt_rho_two_vectors():
    deg85 = math.radians(85.0)
    basis = np.array([[1.0, 0.0], [math.cos(deg85), math.sin(deg85)]])
    out, dev = gram_schmidt_rho(basis, rho=1.0)
    assert np.allclose(out[0], [1.0, 0.0])
    assert np.allclose(out[1], [0.0, 1.0])
    expected = math.hypot(math.cos(deg85), math.sin(deg85) - 1.0)
    assert math.isclose(dev, expected, rel_tol=1e-12)
    assert math.isclose(dev, 0.0872388, abs_tol=5e-7)


def test_gram_schmidt_rho_scales_output():
    rng = np.random.default_rng(7)
    basis = rng.standard_normal((3, 5))
    out, _ = gram_schmidt_rho(basis, rho=2.5)
    assert np.allclose(np.linalg.norm(out, axis=1), 2.5)
    assert np.allclose(out @ out.T, 6.25 * np.eye(3), atol=1e-12)


def test_gram_schmidt_rho_rank_deficient():
    basis = np.array([[1.0, 0.0, 0.0], [2.0, 0.0, 0.0]])
    with pytest.raises(ValueError):
        gram_schmidt_rho(basis, rho=1.0)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2 ** 31 - 1), st.integers(1, 4), st.integers(5, 7))
def test_gram_schmidt_rho_deviation_bound(seed, m, n):
    # near-orthonormal rho-scaled bases stay within rho (eps + c2 delta)
    rng = np.random.default_rng(seed)
    rho = float(rng.uniform(0.5, 2.0))
    c2 = const_c2(m)
    eps = 0.02
    delta = 0.02 / max(c2, 1.0)
    frame = random_plane(rng, n, m).frame
    basis = rho * frame
    basis = basis + (0.3 * eps * rho) * rng.standard_normal((m, n)) / math.sqrt(n)
    if not check_basis_class(basis, rho, eps, delta):
        return
    out, dev = gram_schmidt_rho(basis, rho)
    assert dev <= (eps + c2 * delta) * rho + 1e-12


# ----------------------------------------------------------------- constants


def test_constant_values_small_m():
    assert const_c2(1) == 0.0
    assert const_c2(2) == 8.0
    # m=3: 8 * [2 + 2 * (3^0 * 1)] = 32
    assert const_c2(3) == 32.0
    # m=4: 8 * [3 + 2 * (1*2 + 3*1)] = 104
    assert const_c2(4) == 104.0
    assert const_c3(1) == 4.0
    assert const_c3(2) == 40.0
    assert const_c3(3) == 204.0


def test_const_c4_value_and_precondition():
    # m=1: c4 = 4 / (1 - 4 eps)
    assert math.isclose(const_c4(1, 0.05, 0.01), 4.0 / (1.0 - 0.2))
    with pytest.raises(ValueError, match="c3"):
        const_c4(1, 0.2, 0.0)  # slack = 0.8 >= 1/2


def test_const_c4_monotone_in_eps():
    vals = [const_c4(2, e, 1e-4) for e in (0.001, 0.005, 0.01)]
    assert vals[0] < vals[1] < vals[2]
