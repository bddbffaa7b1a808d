"""Global curvature fields: exhaustive search, certified pruning, and the
tangent-point scan.

The discrete Menger value at a point is the best (m+2)-tuple through it,
so the exhaustive field is the oracle; the pruned search must reproduce
it exactly, witness included.  The tangent-point field on a round sphere
of radius R is the constant 1/R whatever tangent planes it is given.
"""

import numpy as np

from curvametric import (
    ShapeSpec,
    curvature_field,
    field_summary,
    generate,
    menger_global_exact,
    menger_global_pruned,
)


def menger_oracle():
    sample = generate(ShapeSpec("torus", 48, seed=2))
    exact = curvature_field(sample, "menger", method="exact")
    pruned = curvature_field(sample, "menger", method="pruned", seed=11)

    same_values = np.array_equal(exact.values, pruned.values)
    same_witnesses = np.array_equal(exact.witnesses, pruned.witnesses)
    print("torus, %d points" % sample.count)
    print("pruned == exact values: %s, witnesses: %s, certified: %s"
          % (same_values, same_witnesses, bool(pruned.certified.all())))

    i = int(np.argmax(exact.values))
    value, witness = menger_global_exact(sample, i)
    print("hottest point %d: curvature %.6f via tuple %s" % (i, value, witness))
    res = menger_global_pruned(sample, i, seed=3)
    print("pruned search agrees: %s (%d tuple evaluations, certified: %s)"
          % (res.value == value and list(res.witness) == list(witness),
             res.prune_stats["tuples_evaluated"], res.certified))


def tangent_point_fields():
    radius = 2.0
    sample = generate(ShapeSpec("sphere", 1500, seed=0, params={"radius": radius}))
    analytic = curvature_field(sample, "tangent_point", tangent_source="analytic")
    pca = curvature_field(sample, "tangent_point", tangent_source="pca:1.2")

    print("\nsphere of radius %g, expected tangent-point value %.4f" % (radius, 1.0 / radius))
    for field in (analytic, pca):
        s = field_summary(field)
        print("  %s tangents: mean %.6f, spread [%.6f, %.6f]"
              % (s["tangent_source"], s["mean"], s["min"], s["max"]))
    dev = np.abs(pca.values - analytic.values).max()
    print("  worst PCA deviation from the analytic field: %.2e" % dev)


if __name__ == "__main__":
    menger_oracle()
    tangent_point_fields()
