"""Simplices on m+2 vertices in R^n: Gram-determinant volume, vertex
heights, minimal height, and the discrete curvature of a vertex tuple

    K(x_0, ..., x_{m+1}) = H^{m+1}(conv) / diam^{m+2},

with the convention 0/0 = 0 for degenerate tuples.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

# A face whose m-volume falls below this fraction of diam^m counts as
# degenerate for the strict height accessor.
FACE_TOL = 1e-14


def unit_ball_volume(m: int) -> float:
    """Lebesgue volume of the unit m-ball: pi^(m/2) / Gamma(m/2 + 1)."""
    if m < 0:
        raise ValueError("dimension must be nonnegative")
    return math.pi ** (m / 2.0) / math.gamma(m / 2.0 + 1.0)


# A residual diagonal entry below this fraction of its original value marks
# the edge as dependent on its predecessors.  With diagonal pivoting each
# Schur subtraction is bounded by the entry itself, so rounding noise stays
# near k*eps relative and 1e-13 separates noise from genuinely thin
# simplices (height about 3e-7 of the edge length, already below what
# double precision resolves for the volume).
PIVOT_REL_TOL = 1e-13


def gram_volumes(edges: np.ndarray) -> np.ndarray:
    """k-volumes of a batch of simplices given their edge matrices.

    edges has shape (..., k, n), rows x_i - x_0 for i = 1..k; the result has
    shape (...,).  The Gram determinant is evaluated by an explicit
    diagonally pivoted Cholesky recursion instead of a library determinant,
    so that dilating the input by a power of two scales every intermediate,
    and hence the output, exactly, and so that exactly degenerate simplices
    get volume exactly 0.
    """
    e = np.asarray(edges, dtype=float)
    batch_shape = e.shape[:-2]
    k = e.shape[-2]
    g = e @ np.swapaxes(e, -1, -2)
    work = g.reshape(-1, k, k).copy()
    b = work.shape[0]
    br = np.arange(b)
    axes = np.arange(k)
    orig_diag = work[:, axes, axes].copy()
    ok = np.ones(b, dtype=bool)
    piv_prod = np.ones(b)
    for j in range(k):
        resid = work[:, axes[j:], axes[j:]]
        sel = j + np.argmax(resid, axis=1)
        # symmetric row/column swap j <-> sel per batch item
        tmp = work[br, j, :].copy()
        work[br, j, :] = work[br, sel, :]
        work[br, sel, :] = tmp
        tmp = work[br, :, j].copy()
        work[br, :, j] = work[br, :, sel]
        work[br, :, sel] = tmp
        tmp = orig_diag[br, j].copy()
        orig_diag[br, j] = orig_diag[br, sel]
        orig_diag[br, sel] = tmp
        pivot = work[br, j, j]
        ok &= pivot > PIVOT_REL_TOL * orig_diag[:, j]
        piv = np.sqrt(np.where(pivot > 0.0, pivot, 1.0))
        piv_prod *= piv
        if j + 1 < k:
            col = work[:, j + 1 :, j] / piv[:, None]
            work[:, j + 1 :, j + 1 :] -= col[:, :, None] * col[:, None, :]
    vol = np.where(ok, piv_prod / float(math.factorial(k)), 0.0)
    return vol.reshape(batch_shape)


def _simplex_volume(vertices: np.ndarray) -> float:
    """k-volume of the simplex on k+1 vertex rows, via the Gram determinant."""
    edges = vertices[1:] - vertices[0]
    if edges.shape[0] == 0:
        return 1.0
    return float(gram_volumes(edges[None])[0])


def _pairwise_diameter(vertices: np.ndarray) -> float:
    diff = vertices[:, None, :] - vertices[None, :, :]
    return float(np.sqrt(np.max(np.einsum("ijk,ijk->ij", diff, diff))))


def _dist_to_affine_span(point: np.ndarray, others: np.ndarray) -> float:
    """Distance from `point` to the affine span of the `others` rows.

    Rank-revealing, so collections spanning fewer dimensions than they have
    points are handled without error.
    """
    d = point - others[0]
    edges = others[1:] - others[0]
    if edges.shape[0] == 0:
        return float(np.linalg.norm(d))
    u, s, vt = np.linalg.svd(edges, full_matrices=False)
    if s[0] == 0.0:
        return float(np.linalg.norm(d))
    keep = s > 1e-13 * s[0]
    basis = vt[keep]
    return float(np.linalg.norm(d - basis.T @ (basis @ d)))


@dataclass(frozen=True)
class Simplex:
    """Simplex with m+2 vertices in R^n, stored one vertex per row."""

    vertices: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.vertices, dtype=float)
        if arr.ndim != 2 or arr.shape[0] < 3:
            raise ValueError("need at least 3 vertex rows, got shape %s" % (arr.shape,))
        if arr.shape[0] - 2 > arr.shape[1]:
            raise ValueError(
                "%d vertices need ambient dimension >= %d, got %d"
                % (arr.shape[0], arr.shape[0] - 2, arr.shape[1])
            )
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "vertices", arr)

    @property
    def intrinsic_dim(self) -> int:
        """m, one less than the simplex dimension m+1."""
        return self.vertices.shape[0] - 2

    @property
    def ambient_dim(self) -> int:
        return self.vertices.shape[1]

    def diam(self) -> float:
        return _pairwise_diameter(self.vertices)

    def face(self, j: int) -> np.ndarray:
        """Vertices of the face opposite vertex j, in original order."""
        self._check_index(j)
        return np.delete(self.vertices, j, axis=0)

    def _check_index(self, j: int):
        if not 0 <= j <= self.intrinsic_dim + 1:
            raise IndexError(
                "vertex index %d out of range [0, %d]" % (j, self.intrinsic_dim + 1)
            )


def volume(s: Simplex) -> float:
    """(m+1)-volume of the simplex; 0 when the vertices are affinely
    dependent."""
    return _simplex_volume(s.vertices)


def face_volume(s: Simplex, j: int) -> float:
    """m-volume of the face opposite vertex j."""
    return _simplex_volume(s.face(j))


def height(s: Simplex, j: int) -> float:
    """Distance from vertex j to the affine span of the opposite face.

    Raises when that face is degenerate (m-volume below FACE_TOL * diam^m).
    """
    others = s.face(j)
    m = s.intrinsic_dim
    d = s.diam()
    if _simplex_volume(others) < FACE_TOL * d ** m:
        raise ValueError("face opposite vertex %d is degenerate" % j)
    return _dist_to_affine_span(s.vertices[j], others)


def h_min(s: Simplex) -> float:
    """Smallest vertex height; 0 for degenerate simplices."""
    return min(
        _dist_to_affine_span(s.vertices[j], s.face(j))
        for j in range(s.vertices.shape[0])
    )


def menger_curvature(points) -> float:
    """Curvature (m+1)-volume / diam^(m+2) of an (m+2)-tuple of points,
    with 0 returned for coincident or otherwise degenerate tuples."""
    arr = np.asarray(points, dtype=float)
    s = Simplex(arr)
    d = s.diam()
    if d == 0.0:
        return 0.0
    return volume(s) / d ** (s.intrinsic_dim + 2)


def is_voluminous(s: Simplex, eta: float, d: float) -> bool:
    """Whether diam(s) <= d and every vertex height is at least eta * d."""
    if eta <= 0 or d <= 0:
        raise ValueError("eta and d must be positive")
    return s.diam() <= d and h_min(s) >= eta * d
