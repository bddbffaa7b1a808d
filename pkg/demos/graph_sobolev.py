"""Sobolev-style diagnostics on graph patches.

For a height function over a grid the toolkit calibrates the smallest
Hajlasz-type constant pairing gradient differences with a maximal
function, bounds flatness by the same maximal function, and fits the
gradient-oscillation scaling law against the local curvature average.
Smooth graphs clear the tau = 1 - m/p exponent with room to spare.
"""

from curvametric import (
    analytic_patch,
    beta_bound_check,
    curvature_field,
    hajlasz_check,
    oscillation_energy_fit,
    sample_graph,
)

RADIUS = 0.5


def main():
    for name in ("paraboloid", "sinusoid"):
        patch = analytic_patch(name, radius=RADIUS, h=RADIUS / 64.0)
        print("%s patch, %dx%d nodes, h=%.4g" % (name, *patch.values.shape[:2], patch.h))

        c_min, worst = hajlasz_check(patch, p=4.0)
        print("  smallest pairing constant %.4f (worst pair %s)" % (c_min, worst))

        g_field, c_hat = beta_bound_check(patch)
        print("  flatness <= C * maximal function with C = %.4f" % c_hat)

        coarse = analytic_patch(name, radius=RADIUS, h=RADIUS / 16.0)
        sample = sample_graph(coarse)
        field = curvature_field(sample, "tangent_point")
        for p in (4.0, 8.0):
            slope, report = oscillation_energy_fit(patch, p, field, sample=sample)
            print(
                "  p=%g: oscillation slope %.3f vs tau=%.3f (pass: %s)"
                % (p, slope, report["tau"], report["passes"])
            )


if __name__ == "__main__":
    main()
