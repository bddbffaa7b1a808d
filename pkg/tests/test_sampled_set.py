import math

import numpy as np
import pytest

from curvametric.sampled_set import (
    ShapeSpec,
    WeightedSample,
    ellipsoid_area,
    generate,
    load_points,
    neighbors_within,
    sample_diam,
)


# ---------------------------------------------------------------- validation


def test_sample_requires_enough_points():
    with pytest.raises(ValueError, match="m \\+ 2"):
        WeightedSample(np.zeros((3, 3)), np.ones(3), 2)


def test_sample_rejects_bad_weights():
    pts = np.random.default_rng(0).standard_normal((5, 3))
    with pytest.raises(ValueError):
        WeightedSample(pts, np.array([1.0, 1.0, 0.0, 1.0, 1.0]), 2)
    with pytest.raises(ValueError):
        WeightedSample(pts, np.ones(4), 2)


def test_sample_rejects_bad_tangents():
    pts = np.random.default_rng(0).standard_normal((5, 3))
    bad = np.zeros((5, 2, 3))
    bad[:] = [[1.0, 0.0, 0.0], [1.0, 0.0, 0.0]]
    with pytest.raises(ValueError, match="orthonormal"):
        WeightedSample(pts, np.ones(5), 2, bad)


def test_sample_immutable():
    s = generate(ShapeSpec("circle", 16, seed=1))
    with pytest.raises(ValueError):
        s.points[0, 0] = 5.0


def test_shape_spec_unknown_kind():
    with pytest.raises(ValueError, match="unknown shape kind"):
        ShapeSpec("klein_bottle", 10)


# ---------------------------------------------------------------- generators


def test_circle_sample():
    s = generate(ShapeSpec("circle", 200, seed=3, params={"radius": 2.0}))
    assert s.ambient_dim == 2 and s.intrinsic_dim == 1
    assert np.allclose(np.linalg.norm(s.points, axis=1), 2.0)
    total = s.total_weight()
    assert abs(total - 4.0 * math.pi) / (4.0 * math.pi) < 1e-3
    # tangent at angle phi is (-sin phi, cos phi)
    ang = np.arctan2(s.points[:, 1], s.points[:, 0])
    expected = np.column_stack([-np.sin(ang), np.cos(ang)])
    agree = np.abs(np.einsum("ij,ij->i", s.tangents[:, 0, :], expected))
    assert np.allclose(agree, 1.0, atol=1e-12)


def test_sphere_sample():
    s = generate(ShapeSpec("sphere", 1000, seed=5, params={"radius": 1.5}))
    assert np.allclose(np.linalg.norm(s.points, axis=1), 1.5)
    area = 4.0 * math.pi * 1.5 ** 2
    assert abs(s.total_weight() - area) / area < 1e-3
    # tangent frames orthogonal to the radial direction
    normals = s.points / 1.5
    rad = np.einsum("pij,pj->pi", s.tangents, normals)
    assert np.max(np.abs(rad)) < 1e-12


def test_ellipsoid_area_against_prolate_closed_form():
    a, b = 2.0, 1.0
    e = math.sqrt(1.0 - b * b / (a * a))
    expected = 2.0 * math.pi * b * b * (1.0 + a * math.asin(e) / (b * e))
    assert math.isclose(ellipsoid_area(a, b, b), expected, rel_tol=1e-10)
    assert math.isclose(ellipsoid_area(1.0, 1.0, 1.0), 4.0 * math.pi, rel_tol=1e-12)


def test_ellipsoid_area_against_quadrature():
    from scipy.integrate import dblquad

    a, b, c = 2.0, 1.5, 1.0

    def integrand(theta, phi):
        st, ct = math.sin(theta), math.cos(theta)
        cp, sp = math.cos(phi), math.sin(phi)
        return st * math.sqrt(
            (b * c * st * cp) ** 2 + (a * c * st * sp) ** 2 + (a * b * ct) ** 2
        )

    val, _ = dblquad(integrand, 0.0, 2.0 * math.pi, 0.0, math.pi, epsabs=1e-10)
    assert math.isclose(ellipsoid_area(a, b, c), val, rel_tol=1e-8)


def test_ellipsoid_sample_weights_track_area():
    s = generate(ShapeSpec("ellipsoid", 4000, seed=2, params={"semi_axes": (2.0, 1.0, 1.0)}))
    area = ellipsoid_area(2.0, 1.0, 1.0)
    assert abs(s.total_weight() - area) / area < 5e-3
    # points satisfy the implicit equation
    q = (s.points / np.array([2.0, 1.0, 1.0])) ** 2
    assert np.allclose(q.sum(axis=1), 1.0, atol=1e-12)


def test_torus_sample():
    s = generate(ShapeSpec("torus", 4000, seed=9, params={"major_radius": 2.0, "minor_radius": 0.5}))
    area = 4.0 * math.pi ** 2 * 2.0 * 0.5
    assert abs(s.total_weight() - area) / area < 5e-3
    ring = np.hypot(s.points[:, 0], s.points[:, 1])
    assert np.allclose((ring - 2.0) ** 2 + s.points[:, 2] ** 2, 0.25, atol=1e-12)


def test_flat_disk_sample():
    s = generate(ShapeSpec("flat_disk", 500, seed=4, params={"radius": 1.0, "m": 2}))
    assert s.ambient_dim == 3
    assert np.allclose(s.points[:, 2], 0.0)
    assert np.max(np.hypot(s.points[:, 0], s.points[:, 1])) <= 1.0
    assert math.isclose(s.total_weight(), math.pi, rel_tol=1e-9)


def test_graph_sample():
    s = generate(
        ShapeSpec("graph_of_function", 400, seed=6, params={"function": "paraboloid", "m": 2})
    )
    z = s.points[:, :2]
    assert np.allclose(s.points[:, 2], 0.5 * np.einsum("ij,ij->i", z, z))
    # tangent plane contains (e1, df/dz1); rejection must vanish
    v = np.zeros((s.count, 3))
    v[:, 0] = 1.0
    v[:, 2] = z[:, 0]
    coeff = np.einsum("pij,pj->pi", s.tangents, v)
    recon = np.einsum("pi,pij->pj", coeff, s.tangents)
    assert np.max(np.linalg.norm(v - recon, axis=1)) < 1e-10


def test_stacked_spheres_geometry():
    s = generate(ShapeSpec("stacked_spheres", 600, seed=8, params={"depth": 3}))
    assert s.meta["radii"] == [0.25, 0.125, 0.0625]
    centers = np.zeros((3, 3))
    centers[:, 0] = [0.75, 0.375, 0.1875]
    radii = np.array([0.25, 0.125, 0.0625])
    # tangency: consecutive spheres touch at p_{i+1} = (2^-i-1, 0, 0)
    for i in range(2):
        p = np.array([2.0 ** (-i - 1), 0.0, 0.0])
        assert math.isclose(np.linalg.norm(p - centers[i]), radii[i], rel_tol=1e-12)
        assert math.isclose(np.linalg.norm(p - centers[i + 1]), radii[i + 1], rel_tol=1e-12)
    # every point lies on one of the spheres
    d = np.linalg.norm(s.points[:, None, :] - centers[None, :, :], axis=2)
    err = np.min(np.abs(d - radii[None, :]), axis=1)
    assert np.max(err) < 1e-12
    area = 4.0 * math.pi * (radii ** 2).sum()
    assert abs(s.total_weight() - area) / area < 1e-9


def test_generation_deterministic_and_seed_sensitive():
    a = generate(ShapeSpec("sphere", 100, seed=42))
    b = generate(ShapeSpec("sphere", 100, seed=42))
    c = generate(ShapeSpec("sphere", 100, seed=43))
    assert np.array_equal(a.points, b.points)
    assert np.array_equal(a.weights, b.weights)
    assert not np.array_equal(a.points, c.points)


# ------------------------------------------------------------------- loaders


def test_load_csv_with_header_and_comments(tmp_path):
    path = tmp_path / "pts.csv"
    path.write_text(
        "# sampled square\n"
        "x1,x2,x3,w\n"
        "0.0, 0.0, 0.0, 0.5\n"
        "1.0, 0.0, 0.0, 0.5  # corner\n"
        "0.0, 1.0, 0.0, 0.5\n"
        "1.0, 1.0, 0.5, 0.5\n"
    )
    s = load_points(str(path), "csv", 2)
    assert s.count == 4
    assert np.allclose(s.weights, 0.5)
    assert s.points.shape == (4, 3)


def test_load_csv_row_length_error(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("0,0,0\n1,1\n")
    with pytest.raises(ValueError, match="row 2"):
        load_points(str(path), "csv", 1)


def test_load_csv_uniform_weights(tmp_path):
    path = tmp_path / "plain.csv"
    path.write_text("0,0,0\n1,0,0\n0,1,0\n1,1,0\n")
    s = load_points(str(path), "csv", 2, total_measure=2.0)
    assert np.allclose(s.weights, 0.5)


def test_load_obj_triangle_areas(tmp_path):
    path = tmp_path / "square.obj"
    path.write_text(
        "v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\n"
        "f 1 2 3\nf 1 3 4\n"
    )
    s = load_points(str(path), "obj", 2)
    assert s.count == 4
    assert math.isclose(s.total_weight(), 1.0, rel_tol=1e-12)
    # vertex 1 and 3 touch both triangles (1/3 each), 2 and 4 only one
    assert np.allclose(np.sort(s.weights), [1.0 / 6.0, 1.0 / 6.0, 1.0 / 3.0, 1.0 / 3.0])


def test_load_obj_rejects_quads(tmp_path):
    path = tmp_path / "quad.obj"
    path.write_text("v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nf 1 2 3 4\n")
    with pytest.raises(ValueError, match="triangular"):
        load_points(str(path), "obj", 2)


def test_load_obj_zero_area(tmp_path):
    path = tmp_path / "flat.obj"
    path.write_text("v 0 0 0\nv 1 0 0\nv 2 0 0\nf 1 2 3\n")
    with pytest.raises(ValueError, match="zero-area"):
        load_points(str(path), "obj", 2)


# ------------------------------------------------------------------- queries


def test_neighbors_open_vs_closed():
    pts = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [2.0, 0.0], [0.5, 0.5]])
    s = WeightedSample(pts, np.ones(5), 1)
    open_idx = neighbors_within(s, np.array([0.0, 0.0]), 1.0)
    assert open_idx.tolist() == [0, 4]
    closed_idx = neighbors_within(s, np.array([0.0, 0.0]), 1.0, closed=True)
    assert closed_idx.tolist() == [0, 1, 2, 4]


def test_neighbors_sorted_and_empty():
    s = generate(ShapeSpec("circle", 50, seed=0))
    idx = neighbors_within(s, np.array([10.0, 10.0]), 0.5)
    assert idx.size == 0
    idx = neighbors_within(s, s.points[7], 0.8)
    assert np.all(np.diff(idx) > 0)


def test_sample_diam_exact_small():
    pts = np.array([[0.0, 0.0], [3.0, 4.0], [1.0, 1.0], [0.5, 0.2]])
    s = WeightedSample(pts, np.ones(4), 1)
    d = sample_diam(s)
    assert d.exact
    assert math.isclose(d.value, 5.0)


def test_sample_diam_sphere_approx():
    s = generate(ShapeSpec("sphere", 5000, seed=1))
    d = sample_diam(s)
    assert not d.exact
    assert abs(d.value - 2.0) < 0.01


def test_mean_spacing_circle():
    s = generate(ShapeSpec("circle", 100, seed=0))
    gap = 2.0 * math.pi / 100.0
    assert abs(s.mean_spacing - gap) / gap < 0.05
