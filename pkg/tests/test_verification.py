"""Check registry plumbing and the vectorized flatness sweep.

The batched sweep must agree with the scalar optimizer path (same PCA
seed, same descent) and never exceed it; agreement observed at the 1e-13
level, asserted at 1e-9.
"""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from curvametric.multiscale import beta
from curvametric.sampled_set import ShapeSpec, generate
from curvametric.verification import (
    CHECKS,
    SUITES,
    CheckResult,
    _batched_optimize_beta,
    _chunk_sup_dist,
    _rel,
    _tuple_bound_sweep,
    run_check,
    run_suite,
)


@pytest.fixture(scope="module")
def sphere400():
    return generate(ShapeSpec("sphere", 400, seed=5))


# registry


def test_registry_numbers_the_eleven_checks_once_each():
    crits = sorted(crit for crit, _ in CHECKS.values())
    assert crits == list(range(1, 12))


def test_every_check_is_its_own_suite_plus_all():
    assert set(SUITES) == {"all"} | set(CHECKS)
    assert SUITES["all"] == list(CHECKS)
    for name in CHECKS:
        assert SUITES[name] == [name]


def test_unknown_check_name_lists_the_known_ones():
    with pytest.raises(KeyError, match="circle-equality"):
        run_check("no-such-check")
    with pytest.raises(KeyError):
        run_suite("no-such-suite")


def test_run_check_fills_the_result_record():
    res = run_check("circle-equality")
    assert isinstance(res, CheckResult)
    assert res.name == "circle-equality"
    assert res.criterion == 1
    assert res.passed
    assert res.elapsed > 0.0
    assert res.detail


def test_run_suite_singleton_matches_run_check():
    results = run_suite("circle-equality")
    assert [r.name for r in results] == ["circle-equality"]


def test_rel_gap():
    assert _rel(1.01, 1.0) == pytest.approx(0.01, rel=1e-9)
    assert _rel(1.0, 1.0) == 0.0
    assert _rel(0.5, 1.0) == pytest.approx(0.5, rel=1e-12)


# batched flatness sweep against the per-call optimizer


def test_batched_beta_matches_scalar_path(sphere400):
    rng = np.random.default_rng(42)
    centers = rng.integers(0, sphere400.count, 80)
    radii = rng.uniform(0.3, 1.2, 80)
    batched = _batched_optimize_beta(sphere400, centers, radii, 32)
    for i in range(centers.size):
        scalar = beta(sphere400, int(centers[i]), float(radii[i]), closed=True)
        # never worse than the scalar descent, and numerically the same
        assert batched[i] <= scalar + 1e-12
        assert abs(batched[i] - scalar) < 1e-9


def test_batched_beta_rejects_higher_codimension():
    disk = generate(
        ShapeSpec("flat_disk", 64, seed=0, params={"m": 1, "ambient_dim": 3})
    )
    with pytest.raises(ValueError, match="hypersurface"):
        _batched_optimize_beta(disk, np.array([0]), np.array([0.5]), 8)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2 ** 31 - 1))
def test_chunk_sup_dist_matches_naive_scan(seed):
    rng = np.random.default_rng(seed)
    b, k, n = 5, 17, 3
    normals = rng.normal(size=(b, n))
    normals /= np.linalg.norm(normals, axis=1, keepdims=True)
    u = rng.normal(size=(b, k, n))
    # zeroed rows stand in for points outside the ball
    u[rng.random((b, k)) < 0.3] = 0.0
    vals, _ = _chunk_sup_dist(normals, u)
    naive = np.abs(np.einsum("bkn,bn->bk", u, normals)).max(axis=1)
    assert np.allclose(vals, naive, rtol=0.0, atol=1e-14)


def test_tuple_sweep_zero_violations_on_a_sphere(sphere400):
    violations, worst = _tuple_bound_sweep(sphere400, 1500, 3, 128)
    assert violations == 0
    assert 0.0 < worst < 1.0
