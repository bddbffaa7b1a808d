"""Named end-to-end checks with timing, plus suite grouping.

Every check regenerates its inputs from fixed seeds so a run needs no
artifacts on disk; frozen reference numbers sit next to the code that can
recompute them.  run_check returns a CheckResult, run_suite a list of them.
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass, field as dataclass_field

import numpy as np

from .curvature import (
    CurvatureField,
    beta_curvature_constant,
    curvature_field,
    field_summary,
    menger_global_exact,
    menger_global_pruned,
)
from .energy import ahlfors_scan, energy_summary, lp_energy, uniform_radius_scaling
from .graphpatch import (
    analytic_patch,
    beta_bound_check,
    hajlasz_check,
    oscillation_energy_fit,
    sample_graph,
)
from .grassmann import (
    Plane,
    check_basis_class,
    const_c2,
    const_c3,
    const_c4,
    gram_schmidt_rho,
    grassmann_distance,
)
from .multiscale import POLISH_ITERS, decay_fit, dyadic_radii, scale_profile
from .sampled_set import ShapeSpec, WeightedSample, generate
from .simplex import (
    Simplex,
    face_volume,
    gram_volumes,
    h_min,
    height,
    is_voluminous,
    menger_curvature,
    unit_ball_volume,
    volume,
)

# Ratio of the p=4 tangent-point norm to the hypersurface bound on the
# matched-area 2:1:1 ellipsoid at the pinned configuration below
# (N=5000, seed 0).  A dense reference run (N=20000, seed 0) gives
# 1.6170115864287338; the pinned-configuration value is frozen here and
# guarded to +-1%.
FROZEN_ELLIPSOID_RATIO = 1.6170088765468895

TUPLE_SWEEP_COUNT = 100_000
TUPLE_SWEEP_SLACK = 1e-12


@dataclass(frozen=True)
class CheckResult:
    """Outcome of one named check.

    detail is a one-line human summary; metrics carries the raw numbers the
    verdict was computed from.
    """

    name: str
    criterion: int
    passed: bool
    detail: str
    elapsed: float
    metrics: dict = dataclass_field(default_factory=dict)


def _rel(value: float, target: float) -> float:
    return abs(value / target - 1.0)


# ------------------------------------------------------- batched beta sweep
#
# The tuple sweep evaluates beta at 10^5 distinct (center, radius) pairs per
# shape; the per-call path in multiscale is dominated by dispatch overhead at
# that volume, so the same optimize strategy (PCA seed, descent polish,
# analytic tangent as a competing candidate, closed ball) is run here over
# tuple chunks.  All sweep shapes are hypersurfaces, so planes are carried as
# unit normals and point-to-plane distance is a single inner product; the
# descent rotates the normal inside span{normal, worst offset}, which is the
# same rotation the per-call polish applies to the frame.  Values agree with
# the per-call path to descent-path rounding, far below the slack the
# verdict allows.


def _chunk_sup_dist(normals, u):
    # u rows outside the ball are zeroed, so they contribute distance 0 and
    # can only win the argmax when every in-ball rejection is 0 as well
    comp = np.matmul(u, normals[:, :, None])[:, :, 0]
    dd = comp * comp
    j = np.argmax(dd, axis=1)
    rows = np.arange(dd.shape[0])
    return np.sqrt(dd[rows, j]), j


def _chunk_polish(normals, u, val0, j0):
    b, n = normals.shape
    rows = np.arange(b)
    cur = normals.copy()
    cur_val = val0.copy()
    best_val = val0.copy()
    j = j0.copy()
    step = np.full(b, 0.5)
    alive = np.ones(b, dtype=bool)
    for _ in range(POLISH_ITERS):
        d = u[rows, j]
        dn = np.linalg.norm(d, axis=1)
        comp = np.einsum("bi,bi->b", cur, d)
        rn = np.abs(comp)
        cn = np.sqrt(np.maximum(dn * dn - rn * rn, 0.0))
        alive &= (dn > 0.0) & (rn > 1e-15 * dn)
        if not alive.any():
            break
        vplane = d - comp[:, None] * cur
        vn = np.linalg.norm(vplane, axis=1)
        vplane = vplane / np.where(vn > 0.0, vn, 1.0)[:, None]
        low = cn <= 1e-15 * dn
        if low.any():
            # worst offset is normal to the plane: rotate toward it from a
            # deterministic in-plane direction instead
            k = np.argmin(np.abs(cur), axis=1)
            ek = np.zeros((b, n))
            ek[rows, k] = 1.0
            fb = ek - cur * cur[rows, k][:, None]
            fb = fb / np.linalg.norm(fb, axis=1)[:, None]
            vplane = np.where(low[:, None], fb, vplane)
        sign = np.where(comp < 0.0, -1.0, 1.0)
        phi = step * np.arctan2(rn, cn)
        cand = np.cos(phi)[:, None] * cur - (sign * np.sin(phi))[:, None] * vplane
        val, jc = _chunk_sup_dist(cand, u)
        improved = alive & (val < cur_val)
        failed = alive & ~improved
        cur = np.where(improved[:, None], cand, cur)
        cur_val = np.where(improved, val, cur_val)
        j = np.where(improved, jc, j)
        best_val = np.minimum(best_val, cur_val)
        step = np.where(failed, step * 0.5, step)
        alive &= step >= 1e-4
    return best_val


def _batched_optimize_beta(sample, centers, radii, chunk):
    if sample.ambient_dim - sample.intrinsic_dim != 1:
        raise ValueError("batched beta sweep expects a hypersurface sample")
    pts = sample.points
    wts = sample.weights
    out = np.empty(centers.shape[0])
    for lo in range(0, centers.shape[0], chunk):
        c = centers[lo : lo + chunk]
        r = radii[lo : lo + chunk]
        x = pts[c]
        diffs = pts[None, :, :] - x[:, None, :]
        d2 = np.einsum("bNi,bNi->bN", diffs, diffs)
        mask = d2 <= (r * r)[:, None]
        u = diffs / r[:, None, None]
        u = np.where(mask[:, :, None], u, 0.0)
        rad2 = np.einsum("bNi,bNi->bN", u, u)
        w = np.where(mask, wts[None, :], 0.0)
        w = w * np.clip(1.0 - rad2, 0.0, None) ** 2
        tot = w.sum(axis=1)
        w = w / np.where(tot > 0.0, tot, 1.0)[:, None]
        second = np.matmul(np.swapaxes(u * w[:, :, None], 1, 2), u)
        _, vecs = np.linalg.eigh(second)
        pca_normal = vecs[:, :, 0]
        best, j = _chunk_sup_dist(pca_normal, u)
        best = np.minimum(best, _chunk_polish(pca_normal, u, best, j))
        if sample.tangents is not None:
            t = sample.tangents[c]
            if t.shape[1] == 1:
                tn = np.stack([-t[:, 0, 1], t[:, 0, 0]], axis=1)
            else:
                tn = np.cross(t[:, 0], t[:, 1])
            tn = tn / np.linalg.norm(tn, axis=1)[:, None]
            tang, _ = _chunk_sup_dist(tn, u)
            best = np.minimum(best, tang)
        out[lo : lo + chunk] = best
    return out


def _tuple_bound_sweep(sample, count, seed, chunk):
    """Random (m+2)-tuples against the flatness bound on curvature.

    Draws tuples of distinct indices, computes each tuple's curvature and
    diameter, evaluates beta at the first vertex on the closed ball of that
    diameter, and counts violations of
    curvature <= C(n, m) * beta / diameter + slack.
    """
    m, n = sample.intrinsic_dim, sample.ambient_dim
    const = beta_curvature_constant(n, m)
    rng = np.random.default_rng(seed)
    k = m + 2
    idx = rng.integers(0, sample.count, size=(count, k))
    while True:
        srt = np.sort(idx, axis=1)
        bad = (np.diff(srt, axis=1) == 0).any(axis=1)
        if not bad.any():
            break
        idx[bad] = rng.integers(0, sample.count, size=(int(bad.sum()), k))
    pts = sample.points[idx]
    vols = gram_volumes(pts[:, 1:, :] - pts[:, :1, :])
    diff = pts[:, :, None, :] - pts[:, None, :, :]
    diam = np.sqrt(np.einsum("tijk,tijk->tij", diff, diff).max(axis=(1, 2)))
    curv = np.where(diam > 0.0, vols / diam ** k, 0.0)
    beta_hat = _batched_optimize_beta(sample, idx[:, 0], diam, chunk)
    bound = const * beta_hat / diam + TUPLE_SWEEP_SLACK
    ratio = curv / bound
    return int(np.count_nonzero(curv > bound)), float(ratio.max())


# ------------------------------------------------------------------- checks


def _check_circle_equality():
    sample = generate(ShapeSpec("circle", 2000, seed=0))
    fld = curvature_field(sample, "tangent_point")
    rels = {}
    for p in (2.0, 4.0):
        rep = lp_energy(fld, sample, p)
        target = 2.0 * math.pi * (2.0 * math.pi) ** (1.0 / p - 1.0)
        rels["p=%g" % p] = _rel(rep.lp_norm, target)
    worst = max(rels.values())
    return (
        worst <= 0.01,
        "worst relative gap %.3g to the closed-form circle norm (tol 1%%)" % worst,
        {"relative_gaps": rels},
    )


def _check_sphere_equality():
    sample = generate(ShapeSpec("sphere", 5000, seed=0))
    fld = curvature_field(sample, "tangent_point")
    rels = {}
    root_measure = math.sqrt(3.0 * unit_ball_volume(3))
    for p in (3.0, 5.0):
        rep = lp_energy(fld, sample, p)
        target = (4.0 * math.pi) ** (1.0 / p - 0.5) * root_measure
        rels["p=%g" % p] = _rel(rep.lp_norm, target)
    analytic_dev = float(np.max(np.abs(fld.values - 1.0)))
    pca_fld = curvature_field(sample, "tangent_point", tangent_source="pca:0.8")
    pca_dev = float(np.max(np.abs(pca_fld.values - 1.0)))
    passed = (
        max(rels.values()) <= 0.02 and analytic_dev <= 1e-6 and pca_dev <= 1e-2
    )
    return (
        passed,
        "norm gaps %.3g, pointwise deviation %.3g analytic / %.3g pca"
        % (max(rels.values()), analytic_dev, pca_dev),
        {
            "relative_gaps": rels,
            "analytic_pointwise_dev": analytic_dev,
            "pca_pointwise_dev": pca_dev,
        },
    )


def _check_ellipsoid_minimality():
    # semi-axes (2a, a, a) with a chosen so the surface area is exactly 4 pi
    ecc = math.sqrt(3.0) / 2.0
    a = math.sqrt(2.0 / (1.0 + (2.0 / ecc) * math.asin(ecc) / 2.0))
    sample = generate(
        ShapeSpec("ellipsoid", 5000, seed=0, params={"semi_axes": (2 * a, a, a)})
    )
    fld = curvature_field(sample, "tangent_point")
    rep = lp_energy(fld, sample, 4.0)
    drift = _rel(rep.ratio, FROZEN_ELLIPSOID_RATIO)
    passed = rep.ratio > 1.0 and drift <= 0.01 and rep.bound_kind == "sphere"
    return (
        passed,
        "energy ratio %.6f vs frozen %.6f (drift %.3g, tol 1%%)"
        % (rep.ratio, FROZEN_ELLIPSOID_RATIO, drift),
        {
            "ratio": rep.ratio,
            "frozen": FROZEN_ELLIPSOID_RATIO,
            "drift": drift,
            "area_gap": _rel(rep.total_measure, 4.0 * math.pi),
        },
    )


def _check_menger_oracle():
    specs = [
        ShapeSpec("circle", 40, seed=0),
        ShapeSpec("sphere", 56, seed=1),
        ShapeSpec("torus", 48, seed=2),
        ShapeSpec("flat_disk", 36, seed=3),
        ShapeSpec("graph_of_function", 40, seed=4, params={"function": "sinusoid"}),
    ]
    runs = 0
    mismatches = 0
    uncertified = 0
    for spec in specs:
        sample = generate(spec)
        exact = [menger_global_exact(sample, i) for i in range(sample.count)]
        for seed in range(100):
            i = seed % sample.count
            res = menger_global_pruned(sample, i, seed=seed)
            runs += 1
            if not res.certified:
                uncertified += 1
            if res.value != exact[i][0] or res.witness != exact[i][1]:
                mismatches += 1
    return (
        mismatches == 0,
        "%d/%d seeded pruned searches matched the exhaustive value and witness"
        % (runs - mismatches, runs),
        {"runs": runs, "mismatches": mismatches, "uncertified": uncertified},
    )


def _check_menger_beta():
    patch = analytic_patch("sinusoid", radius=0.5, h=0.5 / 16.0)
    cases = [
        ("sphere", generate(ShapeSpec("sphere", 1000, seed=0)), 11, 512),
        ("torus", generate(ShapeSpec("torus", 1200, seed=1)), 12, 512),
        ("graph patch", sample_graph(patch), 13, 512),
    ]
    per_shape = {}
    total = 0
    for name, sample, seed, chunk in cases:
        viol, worst = _tuple_bound_sweep(sample, TUPLE_SWEEP_COUNT, seed, chunk)
        per_shape[name] = {"violations": viol, "worst_ratio": worst}
        total += viol
    worst_all = max(v["worst_ratio"] for v in per_shape.values())
    return (
        total == 0,
        "%d violations in %d tuples, worst curvature/bound ratio %.3g"
        % (total, 3 * TUPLE_SWEEP_COUNT, worst_all),
        {"per_shape": per_shape},
    )


def _check_beta_decay():
    sample = generate(ShapeSpec("sphere", 200_000, seed=0))
    radii = dyadic_radii(sample)
    stride = max(1, sample.count // 48)
    bases = np.arange(0, sample.count, stride)[:48]
    profile = scale_profile(sample, radii=radii, base_indices=bases, include_theta=False)
    fits = {
        (p, kind): decay_fit(profile, p, kind)
        for p in (4.0, 8.0)
        for kind in ("menger", "tangent_point")
    }
    any_fit = next(iter(fits.values()))
    slope = any_fit.kappa_hat
    r_min = float(np.min(any_fit.radii))
    beta_over_r = any_fit.constant_hat * r_min ** (slope - 1.0)
    intercept_gap = _rel(beta_over_r, 0.5)
    exceed = {
        "p=%g %s" % (p, kind): fit.kappa_hat > fit.kappa_bound
        for (p, kind), fit in fits.items()
    }
    passed = abs(slope - 1.0) <= 0.1 and intercept_gap <= 0.05 and all(exceed.values())
    return (
        passed,
        "slope %.4f (target 1.0+-0.1), beta/r %.4f at r=%.3g (target 0.5+-5%%)"
        % (slope, beta_over_r, r_min),
        {
            "slope": slope,
            "beta_over_r": beta_over_r,
            "intercept_gap": intercept_gap,
            "scales_used": int(any_fit.radii.size),
            "kappa_bounds_exceeded": exceed,
            "kappa_bounds": {
                "p=%g %s" % (p, kind): fit.kappa_bound
                for (p, kind), fit in fits.items()
            },
        },
    )


def _check_ahlfors_regularity():
    scans = {}
    for spec in (ShapeSpec("sphere", 8000, seed=0), ShapeSpec("torus", 3000, seed=0)):
        sample = generate(spec)
        min_ratio, table = ahlfors_scan(sample)
        scans[spec.kind] = {
            "min_ratio": min_ratio,
            "all_pass": all(row["passes"] for row in table),
            "scales": int(len({row["r"] for row in table})),
        }
    family = [
        generate(ShapeSpec("sphere", 2000, seed=s, params={"radius": r}))
        for s, r in enumerate((1.0, 2.0, 4.0))
    ]
    slope, fit = uniform_radius_scaling(family, p=4.0)
    exponent_gap = abs(slope - fit["predicted_exponent"])
    passed = all(v["all_pass"] for v in scans.values()) and exponent_gap <= 0.1
    return (
        passed,
        "scan minima %s; radius-scaling exponent %.3f (target %.1f+-0.1)"
        % (
            {k: round(v["min_ratio"], 3) for k, v in scans.items()},
            slope,
            fit["predicted_exponent"],
        ),
        {"scans": scans, "fitted_exponent": slope},
    )


def _check_simplex_identities():
    rng = np.random.default_rng(2026)
    trials = 10_000
    worst_identity = 0.0
    lower_bound_fails = 0
    identity_checked = 0
    while identity_checked < trials:
        m = int(rng.integers(1, 4))
        n = m + 1 + int(rng.integers(0, 3))
        scale = float(np.exp(rng.uniform(-2.0, 2.0)))
        s = Simplex(scale * rng.standard_normal((m + 2, n)))
        v = volume(s)
        lower = h_min(s) ** (m + 1) / math.factorial(m + 1)
        if v < lower * (1.0 - 1e-9):
            lower_bound_fails += 1
        # identity digits degrade with flatness; test it on the
        # quantitatively voluminous draws, which is nearly all of them
        if v <= 0.0 or h_min(s) < 1e-3 * s.diam():
            continue
        identity_checked += 1
        for j in range(m + 2):
            recon = height(s, j) * face_volume(s, j) / (m + 1)
            worst_identity = max(worst_identity, _rel(recon, v))
    perturb_fails = 0
    curvature_fails = 0
    done = 0
    while done < trials:
        m = int(rng.integers(1, 4))
        pts = rng.standard_normal((m + 2, m + 2))
        s = Simplex(pts)
        d = s.diam()
        eta = h_min(s) / d
        if eta < 0.05:
            continue
        done += 1
        if not is_voluminous(s, eta * 0.999, d):
            perturb_fails += 1
            continue
        kbound = (eta * 0.999) ** (m + 1) / (math.factorial(m + 1) * d)
        if menger_curvature(pts) < kbound * (1.0 - 1e-9):
            curvature_fails += 1
        step = rng.standard_normal(m + 2)
        step *= (eta ** 2 * d / 8.0) / np.linalg.norm(step)
        moved = pts.copy()
        moved[0] += step
        t = Simplex(moved)
        if t.diam() > 9.0 * d / 8.0 + 1e-12 or h_min(t) < eta * d / 2.0 - 1e-12:
            perturb_fails += 1
    passed = (
        worst_identity <= 1e-9
        and lower_bound_fails == 0
        and perturb_fails == 0
        and curvature_fails == 0
    )
    return (
        passed,
        "worst face-identity error %.2e over %d simplices; %d perturbation failures"
        % (worst_identity, identity_checked, perturb_fails),
        {
            "worst_identity": worst_identity,
            "identity_checked": identity_checked,
            "lower_bound_fails": lower_bound_fails,
            "perturb_fails": perturb_fails,
            "curvature_fails": curvature_fails,
        },
    )


def _check_grassmann_constants():
    rng = np.random.default_rng(515)
    trials = 10_000
    fails = {"orthonormal": 0, "rejection": 0, "basis": 0}
    worst = {"orthonormal": 0.0, "rejection": 0.0, "basis": 0.0}

    def random_plane(n, m):
        return Plane.span(rng.standard_normal((m, n)))

    for _ in range(trials):
        m = int(rng.integers(1, 4))
        n = int(rng.integers(m + 2, 7))
        u = random_plane(n, m)
        v = Plane.span(u.frame + 0.05 * rng.standard_normal((m, n)))
        theta = float(np.max(np.linalg.norm(u.frame - v.frame, axis=1)))
        dist = grassmann_distance(u, v)
        if theta > 0.0:
            worst["orthonormal"] = max(worst["orthonormal"], dist / (2 * m * theta))
        if dist > 2 * m * theta + 1e-9:
            fails["orthonormal"] += 1

    done = 0
    while done < trials:
        m = int(rng.integers(1, 4))
        n = int(rng.integers(m + 2, 7))
        u = random_plane(n, m)
        v = Plane.span(u.frame + 0.03 * rng.standard_normal((m, n)))
        theta = float(np.max(np.linalg.norm(v.frame - u.project(v.frame), axis=1)))
        if theta >= 1.0 / math.sqrt(2.0):
            continue
        done += 1
        dist = grassmann_distance(u, v)
        if theta > 0.0:
            worst["rejection"] = max(worst["rejection"], dist / (const_c3(m) * theta))
        if dist > const_c3(m) * theta + 1e-9:
            fails["rejection"] += 1

    done = 0
    while done < trials:
        m = int(rng.integers(1, 4))
        n = int(rng.integers(m + 2, 7))
        c2, c3 = const_c2(m), const_c3(m)
        eps = 0.2 / c3
        delta = 0.2 / (c3 * max(c2, 1.0))
        rho = float(rng.uniform(0.5, 2.0))
        u = random_plane(n, m)
        basis = rho * u.frame
        basis = basis + (0.3 * eps * rho) * rng.standard_normal((m, n)) / math.sqrt(n)
        if not check_basis_class(basis, rho, eps, delta):
            continue
        out, dev = gram_schmidt_rho(basis, rho)
        if dev > (eps + c2 * delta) * rho + 1e-9:
            fails["basis"] += 1
            done += 1
            continue
        theta = float(
            np.max(np.linalg.norm(basis - u.project(basis), axis=1)) / rho
        )
        if theta <= 0.0:
            continue
        done += 1
        v = Plane.span(out)
        dist = grassmann_distance(u, v)
        c4 = const_c4(m, eps, delta)
        worst["basis"] = max(worst["basis"], dist / (c4 * theta))
        if dist > c4 * theta + 1e-9:
            fails["basis"] += 1

    passed = sum(fails.values()) == 0
    return (
        passed,
        "0 violations expected, saw %s; worst bound ratios %s"
        % (fails, {k: round(v, 4) for k, v in worst.items()}),
        {"fails": fails, "worst_ratios": worst, "trials": trials},
    )


def _check_graph_sobolev():
    radius = 0.5
    names = ("affine", "quadratic", "paraboloid", "sinusoid")
    coarse_fields = {}
    for name in names:
        patch = analytic_patch(name, radius=radius, h=radius / 16.0)
        sg = sample_graph(patch)
        coarse_fields[name] = (sg, curvature_field(sg, "tangent_point"))
    per_name = {}
    slope_fails = []
    stability_fails = []
    for name in names:
        sg, fld = coarse_fields[name]
        row = {}
        for h in (radius / 64.0, radius / 128.0):
            patch = analytic_patch(name, radius=radius, h=h)
            c_min, _ = hajlasz_check(patch, p=4.0)
            _, c_hat = beta_bound_check(patch)
            slopes = {}
            for p in (4.0, 8.0):
                _, report = oscillation_energy_fit(patch, p, fld, sample=sg)
                slopes["p=%g" % p] = {
                    "slope": report["fitted_exponent"],
                    "passes": report["passes"],
                }
                if not report["passes"]:
                    slope_fails.append("%s h=%.4g p=%g" % (name, h, p))
            row["h=%.4g" % h] = {"c_min": c_min, "c_hat": c_hat, "fits": slopes}
        pair = list(row.values())
        for key in ("c_min", "c_hat"):
            lo, hi = pair[0][key], pair[1][key]
            if lo == 0.0 and hi == 0.0:
                continue
            if lo == 0.0 or hi == 0.0 or not math.isfinite(lo) or not math.isfinite(hi):
                stability_fails.append("%s %s" % (name, key))
            elif _rel(lo, hi) > 0.2:
                stability_fails.append("%s %s drift %.3g" % (name, key, _rel(lo, hi)))
        per_name[name] = row
    passed = not slope_fails and not stability_fails
    return (
        passed,
        "constants stable on %d/4 patches, %d slope failures"
        % (4 - len({f.split()[0] for f in stability_fails}), len(slope_fails)),
        {
            "per_patch": per_name,
            "stability_fails": stability_fails,
            "slope_fails": slope_fails,
        },
    )


def _rigid_motion(sample, q, shift):
    tangents = None if sample.tangents is None else sample.tangents @ q.T
    return WeightedSample(
        sample.points @ q.T + shift, sample.weights, sample.intrinsic_dim, tangents
    )


def _dilate(sample, lam):
    tangents = sample.tangents
    return WeightedSample(
        lam * sample.points,
        sample.weights * lam ** sample.intrinsic_dim,
        sample.intrinsic_dim,
        tangents,
    )


def _check_invariance():
    rng = np.random.default_rng(7)
    q, _ = np.linalg.qr(rng.standard_normal((3, 3)))
    if np.linalg.det(q) < 0:
        q[:, 0] = -q[:, 0]
    shift = np.array([0.3, -1.2, 0.7])

    tp_base = generate(ShapeSpec("sphere", 500, seed=0))
    tp_fld = curvature_field(tp_base, "tangent_point")
    tp_moved_fld = curvature_field(_rigid_motion(tp_base, q, shift), "tangent_point")
    tp_rigid = float(np.max(np.abs(tp_moved_fld.values / tp_fld.values - 1.0)))

    mg_base = generate(ShapeSpec("sphere", 48, seed=1))
    mg_fld = curvature_field(mg_base, "menger", method="exact")
    mg_moved_fld = curvature_field(
        _rigid_motion(mg_base, q, shift), "menger", method="exact"
    )
    mg_rigid = float(np.max(np.abs(mg_moved_fld.values / mg_fld.values - 1.0)))

    lam = 2.0
    tp_scaled = curvature_field(_dilate(tp_base, lam), "tangent_point")
    mg_scaled = curvature_field(_dilate(mg_base, lam), "menger", method="exact")
    tp_exact = bool(np.array_equal(tp_scaled.values, tp_fld.values / lam))
    mg_exact = bool(np.array_equal(mg_scaled.values, mg_fld.values / lam))

    byte_equal = {}
    mg_threads = generate(ShapeSpec("sphere", 80, seed=2))
    for label, smp, kind, method in (
        ("tangent_point", tp_base, "tangent_point", "auto"),
        ("menger_pruned", mg_threads, "menger", "pruned"),
    ):
        blobs = []
        for threads in (1, 4):
            fld = curvature_field(smp, kind, method=method, threads=threads)
            payload = {
                "field": field_summary(fld),
                "energy": energy_summary(lp_energy(fld, smp, 4.0)),
            }
            blobs.append(json.dumps(payload, sort_keys=True, indent=2).encode())
        byte_equal[label] = blobs[0] == blobs[1]

    passed = (
        tp_rigid <= 1e-9
        and mg_rigid <= 1e-9
        and tp_exact
        and mg_exact
        and all(byte_equal.values())
    )
    return (
        passed,
        "rigid drift %.2e tp / %.2e menger, exact halving %s/%s, byte-equal %s"
        % (tp_rigid, mg_rigid, tp_exact, mg_exact, all(byte_equal.values())),
        {
            "rigid_tp": tp_rigid,
            "rigid_menger": mg_rigid,
            "scaling_exact_tp": tp_exact,
            "scaling_exact_menger": mg_exact,
            "thread_byte_equal": byte_equal,
        },
    )


CHECKS = {
    "circle-equality": (1, _check_circle_equality),
    "sphere-equality": (2, _check_sphere_equality),
    "ellipsoid-minimality": (3, _check_ellipsoid_minimality),
    "menger-oracle": (4, _check_menger_oracle),
    "menger-beta": (5, _check_menger_beta),
    "beta-decay": (6, _check_beta_decay),
    "ahlfors-regularity": (7, _check_ahlfors_regularity),
    "simplex-identities": (8, _check_simplex_identities),
    "grassmann-constants": (9, _check_grassmann_constants),
    "graph-sobolev": (10, _check_graph_sobolev),
    "invariance": (11, _check_invariance),
}

SUITES = {"all": list(CHECKS)}
SUITES.update({name: [name] for name in CHECKS})


def run_check(name: str) -> CheckResult:
    """Run one named check and wrap its verdict with wall-clock timing."""
    if name not in CHECKS:
        raise KeyError(
            "unknown check %r; known: %s" % (name, ", ".join(sorted(CHECKS)))
        )
    criterion, fn = CHECKS[name]
    start = time.perf_counter()
    passed, detail, metrics = fn()
    elapsed = time.perf_counter() - start
    return CheckResult(name, criterion, bool(passed), detail, elapsed, metrics)


def run_suite(suite: str):
    """Run every check in a named suite, in criterion order."""
    if suite not in SUITES:
        raise KeyError(
            "unknown suite %r; known: %s" % (suite, ", ".join(sorted(SUITES)))
        )
    return [run_check(name) for name in SUITES[suite]]
