import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from curvametric.simplex import (
    Simplex,
    face_volume,
    h_min,
    height,
    is_voluminous,
    menger_curvature,
    unit_ball_volume,
    volume,
)


def random_simplex(rng, m, n):
    return Simplex(rng.standard_normal((m + 2, n)))


# -------------------------------------------------------------- ball volumes


def test_unit_ball_volume_table():
    assert unit_ball_volume(0) == 1.0
    assert math.isclose(unit_ball_volume(1), 2.0)
    assert math.isclose(unit_ball_volume(2), math.pi)
    assert math.isclose(unit_ball_volume(3), 4.0 * math.pi / 3.0)
    assert math.isclose(unit_ball_volume(4), math.pi ** 2 / 2.0)
    assert math.isclose(unit_ball_volume(5), 8.0 * math.pi ** 2 / 15.0)
    # recursion omega_m = omega_{m-2} * 2 pi / m
    for m in range(2, 11):
        assert math.isclose(unit_ball_volume(m), unit_ball_volume(m - 2) * 2 * math.pi / m)


# ------------------------------------------------------------------- volumes


def test_triangle_volume():
    # m = 1: three points, area of the triangle
    s = Simplex([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
    assert s.intrinsic_dim == 1
    assert math.isclose(volume(s), 0.5)


def test_regular_tetrahedron_volume_and_heights():
    a = 1.0
    s = Simplex(
        [
            [1.0, 1.0, 1.0],
            [1.0, -1.0, -1.0],
            [-1.0, 1.0, -1.0],
            [-1.0, -1.0, 1.0],
        ]
    )
    side = math.sqrt(8.0)
    assert math.isclose(s.diam(), side)
    assert math.isclose(volume(s), side ** 3 / (6.0 * math.sqrt(2.0)), rel_tol=1e-12)
    for j in range(4):
        assert math.isclose(height(s, j), side * math.sqrt(2.0 / 3.0), rel_tol=1e-12)
        assert math.isclose(face_volume(s, j), math.sqrt(3.0) / 4.0 * side ** 2, rel_tol=1e-12)
    assert math.isclose(h_min(s), side * math.sqrt(2.0 / 3.0), rel_tol=1e-12)
    del a


def test_degenerate_volume_is_zero():
    s = Simplex([[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]])
    assert volume(s) == 0.0
    assert h_min(s) == 0.0


def test_height_errors_on_degenerate_face():
    # face opposite vertex 3 is the collinear triple 0,1,2
    s = Simplex(
        [
            [0.0, 0.0, 0.0],
            [1.0, 0.0, 0.0],
            [2.0, 0.0, 0.0],
            [0.0, 1.0, 0.0],
        ]
    )
    with pytest.raises(ValueError, match="vertex 3"):
        height(s, 3)
    # h_min still well defined (heights of 0,1,2 over planar spans are 0)
    assert h_min(s) == 0.0


def test_vertex_index_range():
    s = Simplex(np.eye(3))
    with pytest.raises(IndexError):
        height(s, 3)


# -------------------------------------------------------- algebraic identity


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 2 ** 31 - 1), st.integers(1, 3), st.integers(0, 3))
def test_face_height_identity(seed, m, extra):
    # (m+1) vol = height_j * facevol_j for every vertex j
    rng = np.random.default_rng(seed)
    n = m + 1 + extra
    s = random_simplex(rng, m, n)
    v = volume(s)
    if v < 1e-12:
        return
    for j in range(m + 2):
        assert math.isclose(v, height(s, j) * face_volume(s, j) / (m + 1), rel_tol=1e-9)


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 2 ** 31 - 1), st.integers(1, 3))
def test_volume_lower_bound_via_h_min(seed, m):
    rng = np.random.default_rng(seed)
    s = random_simplex(rng, m, m + 2)
    lower = h_min(s) ** (m + 1) / math.factorial(m + 1)
    assert volume(s) >= lower * (1.0 - 1e-9)


# ----------------------------------------------------------------- curvature


def test_menger_equilateral_triangle():
    a = 2.0
    pts = [[0.0, 0.0], [a, 0.0], [a / 2.0, a * math.sqrt(3.0) / 2.0]]
    # area sqrt(3)/4 a^2, diam a -> K = sqrt(3) / (4 a)
    assert math.isclose(menger_curvature(pts), math.sqrt(3.0) / (4.0 * a), rel_tol=1e-12)


def test_menger_degenerate_conventions():
    assert menger_curvature([[1.0, 1.0], [1.0, 1.0], [1.0, 1.0]]) == 0.0
    assert menger_curvature([[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]]) == 0.0


def test_menger_circumradius_bound_curves():
    # for triples, K <= 1 / (4 circumradius)
    rng = np.random.default_rng(3)
    for _ in range(200):
        pts = rng.standard_normal((3, 2))
        sides = [
            float(np.linalg.norm(pts[i] - pts[j]))
            for i, j in [(0, 1), (0, 2), (1, 2)]
        ]
        area = volume(Simplex(pts))
        if area < 1e-9:
            continue
        circum = sides[0] * sides[1] * sides[2] / (4.0 * area)
        assert menger_curvature(pts) <= 1.0 / (4.0 * circum) + 1e-12


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2 ** 31 - 1), st.integers(1, 3))
def test_menger_invariances(seed, m):
    rng = np.random.default_rng(seed)
    n = m + 2
    pts = rng.standard_normal((m + 2, n))
    k = menger_curvature(pts)
    # permutations
    perm = rng.permutation(m + 2)
    assert math.isclose(menger_curvature(pts[perm]), k, rel_tol=1e-9, abs_tol=1e-15)
    # rigid motion
    q, _ = np.linalg.qr(rng.standard_normal((n, n)))
    shift = rng.standard_normal(n)
    assert math.isclose(menger_curvature(pts @ q.T + shift), k, rel_tol=1e-9, abs_tol=1e-15)
    # dilation by powers of two scales exactly
    assert menger_curvature(2.0 * pts) == k / 2.0


# --------------------------------------------------------------- voluminous


def test_is_voluminous_basic():
    s = Simplex([[0.0, 0.0], [1.0, 0.0], [0.5, math.sqrt(3.0) / 2.0]])
    assert is_voluminous(s, eta=0.5, d=1.0)
    assert not is_voluminous(s, eta=0.95, d=1.0)
    assert not is_voluminous(s, eta=0.5, d=0.9)  # diam too large


def test_voluminous_curvature_lower_bound():
    # K >= eta^(m+1) / ((m+1)! d) for (eta, d)-voluminous tuples
    rng = np.random.default_rng(11)
    checked = 0
    while checked < 50:
        m = int(rng.integers(1, 4))
        pts = rng.standard_normal((m + 2, m + 2))
        s = Simplex(pts)
        d = s.diam() * float(rng.uniform(1.0, 1.5))
        eta = h_min(s) / d
        if eta < 1e-3:
            continue
        assert is_voluminous(s, eta * 0.999, d)
        bound = (eta * 0.999) ** (m + 1) / (math.factorial(m + 1) * d)
        assert menger_curvature(pts) >= bound * (1.0 - 1e-9)
        checked += 1


def test_perturbed_voluminous_stays_fat():
    # moving one vertex by eta^2 d / 8 keeps diam <= 9d/8 and h_min >= eta d/2
    rng = np.random.default_rng(23)
    done = 0
    while done < 200:
        m = int(rng.integers(1, 4))
        pts = rng.standard_normal((m + 2, m + 2))
        s = Simplex(pts)
        d = s.diam()
        eta = h_min(s) / d
        if eta < 0.05:
            continue
        step = rng.standard_normal(m + 2)
        step *= (eta ** 2 * d / 8.0) / np.linalg.norm(step)
        moved = pts.copy()
        moved[0] += step
        t = Simplex(moved)
        assert t.diam() <= 9.0 * d / 8.0 + 1e-12
        assert h_min(t) >= eta * d / 2.0 - 1e-12
        done += 1
