"""Simplex volume primitives and plane-distance constants.

The batched Gram volume agrees with the classical height-times-face
recursion digit for digit, voluminous simplices survive vertex
perturbation, and the Grassmannian distance between nearby planes is
controlled by explicit dimension constants.
"""

import math

import numpy as np

from curvametric import (
    Plane,
    const_c2,
    Simplex,
    check_basis_class,
    const_c3,
    const_c4,
    face_volume,
    gram_schmidt_rho,
    gram_volumes,
    grassmann_distance,
    h_min,
    height,
    is_voluminous,
    menger_curvature,
    volume,
)


def simplex_identities():
    rng = np.random.default_rng(7)
    pts = rng.normal(size=(4, 3))
    s = Simplex(pts)
    v = volume(s)
    print("tetrahedron volume %.8f, h_min %.6f" % (v, h_min(s)))
    for j in range(4):
        recon = height(s, j) * face_volume(s, j) / 3.0
        print("  vertex %d: h * face / m+1 = %.8f (gap %.1e)" % (j, recon, abs(recon - v)))

    batch = rng.normal(size=(3, 3, 3))
    gram = gram_volumes(batch)
    direct = np.array([volume(Simplex(np.vstack([np.zeros(3), b]))) for b in batch])
    print("batched Gram volumes match the recursion: max gap %.1e"
          % np.abs(gram - direct).max())
    print("discrete curvature of the tuple: %.6f" % menger_curvature(pts))


def voluminous_stability():
    eta, d = 0.4, 2.0
    base = np.array([[0, 0, 0], [2, 0, 0], [1, 1.2, 0], [1, 0.4, 1.2]], dtype=float)
    s = Simplex(base)
    print("\nvoluminous at eta=%.2f, d=%.2f: %s" % (eta, d, is_voluminous(s, eta, d)))
    rng = np.random.default_rng(0)
    worst = math.inf
    for _ in range(200):
        shift = rng.normal(size=base.shape)
        shift *= (eta ** 2 * d / 8.0) / np.linalg.norm(shift, axis=1).max()
        worst = min(worst, h_min(Simplex(base + shift)))
    print("200 perturbations within eta^2 d/8: min h_min %.4f (floor eta d/2 = %.4f)"
          % (worst, eta * d / 2.0))


def plane_distances():
    u = Plane(np.eye(3)[:2])
    theta = 0.1
    tilted = Plane(np.array([[math.cos(theta), 0.0, math.sin(theta)], [0.0, 1.0, 0.0]]))
    print("\ndistance between planes tilted by %.2f rad: %.6f (2m theta = %.6f)"
          % (theta, grassmann_distance(u, tilted), 2 * 2 * theta))

    rho = 1.5
    c3 = const_c3(2)
    eps = 0.2 / c3
    delta = 0.2 / (c3 * const_c2(2))
    noise = 0.3 * eps * rho / math.sqrt(3.0)
    basis = rho * np.eye(3)[:2] + noise * np.random.default_rng(1).normal(size=(2, 3))
    print("basis in the admissible class: %s" % check_basis_class(basis, rho, eps, delta))
    ortho, drift = gram_schmidt_rho(basis, rho)
    span = Plane(ortho / rho)
    print("scale-respecting orthogonalization drift %.2e (allowance %.2e)"
          % (drift, (eps + const_c2(2) * delta) * rho))
    print("span distance to the clean plane %.2e, C4 allowance factor %.4f"
          % (grassmann_distance(u, span), const_c4(2, eps, delta)))


if __name__ == "__main__":
    simplex_identities()
    voluminous_stability()
    plane_distances()
