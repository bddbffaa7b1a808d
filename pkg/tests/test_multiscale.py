import csv
import math

import numpy as np
import pytest

from curvametric.grassmann import Plane, grassmann_distance
from curvametric.multiscale import (
    attach_pca_tangents,
    best_plane_through,
    beta,
    decay_fit,
    dyadic_radii,
    fineness,
    scale_profile,
    theta,
    write_profile_csv,
    ScaleProfile,
)
from curvametric.sampled_set import ShapeSpec, WeightedSample, generate


def circle(n=2000, seed=0, radius=1.0):
    return generate(ShapeSpec("circle", n, seed=seed, params={"radius": radius}))


def sphere(n=800, seed=0):
    return generate(ShapeSpec("sphere", n, seed=seed))


# ---------------------------------------------------------------------- beta


def test_beta_flat_disk_vanishes():
    s = generate(ShapeSpec("flat_disk", 600, seed=1, params={"radius": 1.0, "m": 2}))
    for r in (0.5, 0.25):
        assert beta(s, 0, r) <= 1e-12


def test_beta_circle_matches_half_radius_law():
    # arc in a ball of radius r deviates r^2/(2R) from the tangent line
    s = circle()
    for r in (0.5, 0.25, 0.125):
        b = beta(s, 0, r)
        assert abs(b - r / 2.0) / (r / 2.0) < 0.1


def test_beta_empty_ball_is_zero():
    s = circle(200)
    assert beta(s, 0, 1e-6) == 0.0


def test_beta_optimize_never_loses_to_tangent():
    s = sphere(600)
    rng = np.random.default_rng(5)
    for i in rng.integers(0, 600, size=12):
        for r in (0.6, 0.3):
            b_opt = beta(s, int(i), r)
            b_tan = beta(s, int(i), r, plane_strategy="analytic_tangent")
            assert b_opt <= b_tan + 1e-12


def test_beta_given_plane():
    s = circle(500)
    p = Plane(s.tangents[3])
    b_given = beta(s, 3, 0.3, plane_strategy="given", plane=p)
    b_tan = beta(s, 3, 0.3, plane_strategy="analytic_tangent")
    assert b_given == b_tan
    with pytest.raises(ValueError, match="requires a plane"):
        beta(s, 3, 0.3, plane_strategy="given")


def test_beta_rejects_bad_strategy():
    s = circle(100)
    with pytest.raises(ValueError, match="plane_strategy"):
        beta(s, 0, 0.3, plane_strategy="magic")


def test_beta_theta_dilation_exact():
    s = sphere(400)
    big = WeightedSample(2.0 * s.points, 4.0 * s.weights, 2, s.tangents)
    for i in (0, 57, 211):
        for r in (0.5, 0.25):
            assert beta(s, i, r) == beta(big, i, 2.0 * r)
            assert theta(s, i, r) == theta(big, i, 2.0 * r)


# --------------------------------------------------------------------- theta


def test_theta_dominates_beta_on_profile():
    s = sphere(500)
    prof = scale_profile(s, radii=[0.5, 0.25, 0.125], base_indices=np.arange(0, 500, 50))
    assert prof.theta is not None
    assert np.all(prof.beta <= prof.theta + 1e-12)
    assert np.all(prof.beta >= 0.0) and np.all(prof.beta <= 1.0)
    assert np.all(prof.theta >= 0.0) and np.all(prof.theta <= 2.0)


def test_theta_flat_disk_small():
    s = generate(ShapeSpec("flat_disk", 4000, seed=2, params={"radius": 1.0, "m": 2}))
    t = theta(s, 0, 0.5)
    # plane-to-set gaps are bounded by a few sample spacings
    assert t < 8.0 * s.mean_spacing / 0.5


def test_theta_empty_ball_errors():
    s = circle(100)
    with pytest.raises(ValueError, match="theta undefined"):
        theta(s, np.array([50.0, 50.0]), 0.5)


# ---------------------------------------------------------------- PCA planes


def test_best_plane_through_sphere_matches_tangent():
    s = sphere(2000)
    for i in (0, 100, 999):
        p = best_plane_through(s, i, 8.0 * s.mean_spacing)
        q = Plane(s.tangents[i])
        assert grassmann_distance(p, q) < 0.05


def test_best_plane_needs_m_points():
    s = circle(100)
    with pytest.raises(ValueError, match="at least m"):
        best_plane_through(s, 0, 1e-9)


def test_best_plane_deterministic():
    s = sphere(300)
    a = best_plane_through(s, 7, 0.5)
    b = best_plane_through(s, 7, 0.5)
    assert np.array_equal(a.frame, b.frame)


def test_attach_pca_tangents():
    s = generate(ShapeSpec("sphere", 1500, seed=3))
    bare = WeightedSample(s.points, s.weights, 2)
    dressed = attach_pca_tangents(bare)
    worst = 0.0
    for i in range(0, 1500, 100):
        d = grassmann_distance(Plane(dressed.tangents[i]), Plane(s.tangents[i]))
        worst = max(worst, d)
    assert worst < 0.08


# ---------------------------------------------------------------- scale grid


def test_dyadic_radii_floor():
    s = circle(3000)
    radii = dyadic_radii(s)
    assert radii[0] == pytest.approx(0.5, rel=1e-3)
    assert np.all(radii >= 4.0 * s.mean_spacing)
    assert np.all(radii[:-1] / radii[1:] == 2.0)


def test_dyadic_radii_too_sparse():
    pts = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0]])
    s = WeightedSample(pts, np.ones(4), 1)
    with pytest.raises(ValueError, match="spacing floor"):
        dyadic_radii(s)


# ----------------------------------------------------------------- decay fit


def synthetic_profile(radii, beta_row, m=2, n=3):
    radii = np.asarray(radii, dtype=float)
    b = np.asarray(beta_row, dtype=float)[None, :]
    frames = np.zeros((1, radii.size, m, n))
    frames[:, :] = np.eye(n)[:m]
    return ScaleProfile(
        base_indices=np.array([0]),
        radii=radii,
        beta=b,
        theta=None,
        frames=frames,
        intrinsic_dim=m,
        ambient_dim=n,
        optimizer_gap=0.0,
    )


def test_decay_fit_recovers_power_law():
    radii = 0.5 * 0.5 ** np.arange(6)
    prof = synthetic_profile(radii, 0.37 * radii ** 1.25)
    fit = decay_fit(prof, p=4.0, energy_kind="menger")
    assert math.isclose(fit.kappa_hat, 1.25, rel_tol=1e-9)
    assert math.isclose(fit.constant_hat, 0.37, rel_tol=1e-9)
    assert fit.residual < 1e-12
    # kappa1(p=4, m=2) = (4-2)/(4*3+4) = 0.125
    assert math.isclose(fit.kappa_bound, 0.125)
    assert fit.satisfies_bound


def test_decay_fit_tangent_point_bound():
    radii = 0.5 * 0.5 ** np.arange(5)
    prof = synthetic_profile(radii, 0.2 * radii)
    fit = decay_fit(prof, p=4.0, energy_kind="tangent_point")
    # kappa2(p=4, m=2) = 2/6
    assert math.isclose(fit.kappa_bound, 1.0 / 3.0)
    assert fit.satisfies_bound


def test_decay_fit_too_flat():
    radii = 0.5 * 0.5 ** np.arange(5)
    prof = synthetic_profile(radii, np.zeros(5))
    with pytest.raises(ValueError, match="too flat to fit"):
        decay_fit(prof, p=4.0, energy_kind="menger")


def test_decay_fit_needs_scales():
    prof = synthetic_profile([0.5, 0.25], [0.1, 0.05])
    with pytest.raises(ValueError, match="4 usable scales"):
        decay_fit(prof, p=4.0, energy_kind="menger")
    with pytest.raises(ValueError, match="p > m"):
        decay_fit(synthetic_profile([0.5] * 4, [0.1] * 4), p=2.0, energy_kind="menger")


# ------------------------------------------------------------------ fineness


def test_fineness_circle():
    s = circle(2000)
    rep = fineness(s, max_hole_bases=16)
    # arc weight in a ball of radius r is about 2 r, so the ratio is near 2
    assert 1.6 < rep.a_sigma < 2.5
    assert rep.m_sigma is not None
    assert rep.m_sigma >= 1.0
    assert len(rep.worst_pairs) > 0
    assert rep.table["weight_ratio"].shape[0] == 2000


def test_fineness_flat_disk_no_reliable_beta():
    s = generate(ShapeSpec("flat_disk", 900, seed=0, params={"radius": 1.0, "m": 2}))
    rep = fineness(s, max_hole_bases=8)
    assert rep.m_sigma is None
    assert any("hole constant undefined" in note for note in rep.notes)


# ------------------------------------------------------------------- profile


def test_profile_csv_roundtrip(tmp_path):
    s = circle(400)
    prof = scale_profile(s, base_indices=[0, 100, 200], include_theta=True)
    path = tmp_path / "profile.csv"
    write_profile_csv(prof, str(path))
    with open(path) as fh:
        rows = list(csv.reader(fh))
    assert rows[0][:4] == ["point_index", "r", "beta", "theta"]
    assert len(rows) == 1 + 3 * prof.radii.size
    got = float(rows[1][2])
    assert math.isclose(got, prof.beta[0, 0], rel_tol=1e-15)
