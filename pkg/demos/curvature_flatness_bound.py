"""Pointwise curvature controlled by flatness, and high-energy couples.

The discrete curvature of any (m+2)-tuple inside a ball is bounded by a
dimension-only constant times beta/r of that ball.  Random tuples on a
torus never get close to the constant.  Separately, on a multiscale
chain of tangent spheres, a pair of points straddling a neck forms a
high-energy couple: a fixed fraction of the nearby sample tilts away
from the partner point, which forces large tangent-point curvature.
"""

import numpy as np

from curvametric import (
    ShapeSpec,
    beta,
    beta_curvature_constant,
    generate,
    high_energy_couple_check,
    menger_curvature,
)


def tuple_bound_sweep():
    sample = generate(ShapeSpec("torus", 600, seed=4))
    n, m = sample.ambient_dim, sample.intrinsic_dim
    const = beta_curvature_constant(n, m)
    print("torus sweep, constant C(n=%d, m=%d) = %.4f" % (n, m, const))

    rng = np.random.default_rng(0)
    worst = 0.0
    for _ in range(400):
        idx = rng.choice(sample.count, size=m + 2, replace=False)
        pts = sample.points[idx]
        diam = max(
            float(np.linalg.norm(a - b)) for i, a in enumerate(pts) for b in pts[:i]
        )
        if diam == 0.0:
            continue
        curv = menger_curvature(pts)
        cap = const * beta(sample, pts[0], diam, closed=True) / diam
        if cap > 0.0:
            worst = max(worst, curv / cap)
    print("400 random tuples: worst curvature / bound ratio %.4f (must stay <= 1)"
          % worst)


def couple_demo():
    sample = generate(ShapeSpec("stacked_spheres", 900, seed=1, params={"depth": 3}))
    print("\nstacked spheres: %d points over %d spheres"
          % (sample.count, len(sample.meta["radii"])))

    # x on the big sphere near the first tangency, y across the neck
    tangency = np.array(sample.meta["tangency_points"][0])
    d = 0.25
    x_index = int(np.argmin(np.linalg.norm(sample.points - tangency, axis=1)))
    target = tangency + np.array([d, 0.05, 0.0])
    y_index = int(np.argmin(np.linalg.norm(sample.points - target, axis=1)))

    result = high_energy_couple_check(
        sample, x_index, y_index, lam=0.05, alpha=0.45, d=d
    )
    print("couple at separation scale d=%.2f: %s" % (d, result.is_couple))
    print("  tilted set carries weight %.5f (threshold %.5f)"
          % (result.s_weight, result.weight_threshold))
    print("  tangent-point curvature exceeds %.3f on it: %s"
          % (result.tp_threshold, result.tp_lower_bound_ok))
    for note in result.notes:
        print("  note: %s" % note)


if __name__ == "__main__":
    tuple_bound_sweep()
    couple_demo()
