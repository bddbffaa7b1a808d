"""Linear and affine m-planes in R^n, the projector-norm metric on the
Grassmannian, and quantitative almost-orthonormal basis tools.

A plane is stored as an orthonormal frame, one row per frame vector.  The
angular distance between two m-planes is the operator norm of the difference
of their orthogonal projectors, equal to the largest singular value of that
difference.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# Orthonormality of a stored frame must hold to this Gram deviation.
FRAME_TOL = 1e-10
# Frames worse than FRAME_TOL but better than this are re-orthonormalized.
FRAME_FIX_TOL = 1e-6
# Pivot floor below which a Gram-Schmidt step is declared rank deficient.
RANK_TOL = 1e-12


def _as_matrix(vectors) -> np.ndarray:
    arr = np.asarray(vectors, dtype=float)
    if arr.ndim != 2:
        raise ValueError("expected a 2-d array of row vectors, got shape %s" % (arr.shape,))
    return arr


def _gram_deviation(frame: np.ndarray) -> float:
    g = frame @ frame.T
    return float(np.max(np.abs(g - np.eye(frame.shape[0]))))


def _orthonormalize_rows(frame: np.ndarray) -> np.ndarray:
    # Symmetric (Loewdin) orthonormalization: closest orthonormal frame with
    # the same span, so a nearly orthonormal input is barely moved.
    u, _, vt = np.linalg.svd(frame, full_matrices=False)
    return u @ vt


@dataclass(frozen=True)
class Plane:
    """Linear m-plane through the origin of R^n, 1 <= m < n.

    frame: (m, n) array with orthonormal rows spanning the plane.
    """

    frame: np.ndarray

    def __post_init__(self):
        frame = _as_matrix(self.frame)
        m, n = frame.shape
        if not 1 <= m < n:
            raise ValueError("need 1 <= dim (%d) < ambient_dim (%d)" % (m, n))
        dev = _gram_deviation(frame)
        if dev >= FRAME_FIX_TOL:
            raise ValueError(
                "frame is not orthonormal (Gram deviation %.3e >= %.1e)" % (dev, FRAME_FIX_TOL)
            )
        if dev >= FRAME_TOL:
            frame = _orthonormalize_rows(frame)
        frame = frame.copy()
        frame.setflags(write=False)
        object.__setattr__(self, "frame", frame)

    @property
    def dim(self) -> int:
        return self.frame.shape[0]

    @property
    def ambient_dim(self) -> int:
        return self.frame.shape[1]

    @classmethod
    def span(cls, vectors) -> "Plane":
        """Plane spanned by the given linearly independent row vectors."""
        arr = _as_matrix(vectors)
        u, s, vt = np.linalg.svd(arr, full_matrices=False)
        if s[-1] <= RANK_TOL * max(1.0, s[0]):
            raise ValueError("spanning vectors are linearly dependent")
        return cls(vt)

    @classmethod
    def coordinate(cls, ambient_dim: int, dim: int) -> "Plane":
        """Plane spanned by the first `dim` coordinate axes of R^ambient_dim."""
        return cls(np.eye(ambient_dim)[:dim])

    def projector(self) -> np.ndarray:
        """Orthogonal projector matrix onto the plane, shape (n, n)."""
        return self.frame.T @ self.frame

    def project(self, v: np.ndarray) -> np.ndarray:
        """Orthogonal projection of v (shape (..., n)) onto the plane."""
        v = np.asarray(v, dtype=float)
        return (v @ self.frame.T) @ self.frame

    def reject(self, v: np.ndarray) -> np.ndarray:
        """Component of v orthogonal to the plane."""
        v = np.asarray(v, dtype=float)
        return v - self.project(v)

    def distance_to(self, v: np.ndarray) -> float:
        """Euclidean distance from the point v to the plane."""
        return float(np.linalg.norm(self.reject(v)))


@dataclass(frozen=True)
class AffinePlane:
    """Affine m-plane x + H with base point x and direction plane H."""

    base: np.ndarray
    direction: Plane

    def __post_init__(self):
        base = np.asarray(self.base, dtype=float)
        if base.shape != (self.direction.ambient_dim,):
            raise ValueError(
                "base point shape %s does not match ambient dimension %d"
                % (base.shape, self.direction.ambient_dim)
            )
        base = base.copy()
        base.setflags(write=False)
        object.__setattr__(self, "base", base)

    def project_point(self, y: np.ndarray) -> np.ndarray:
        y = np.asarray(y, dtype=float)
        return self.base + self.direction.project(y - self.base)

    def distance_to(self, y: np.ndarray) -> float:
        y = np.asarray(y, dtype=float)
        rej = self.direction.reject(y - self.base)
        return float(np.linalg.norm(rej))


def grassmann_distance(u: Plane, v: Plane) -> float:
    """Angular distance ||pi_U - pi_V||: largest singular value of the
    projector difference.  Requires equal dimension and ambient dimension;
    always in [0, 1], and 0 iff the planes coincide."""
    if u.ambient_dim != v.ambient_dim:
        raise ValueError(
            "ambient dimensions differ: %d vs %d" % (u.ambient_dim, v.ambient_dim)
        )
    if u.dim != v.dim:
        raise ValueError("plane dimensions differ: %d vs %d" % (u.dim, v.dim))
    diff = u.projector() - v.projector()
    return float(np.linalg.norm(diff, 2))


def check_basis_class(basis, rho: float, eps: float, delta: float) -> bool:
    """Whether every |v_i| lies in [(1-eps)rho, (1+eps)rho] and every
    off-diagonal |<v_i, v_j>| is at most delta rho^2."""
    arr = _as_matrix(basis)
    if arr.shape[0] == 0:
        raise ValueError("empty basis")
    if rho <= 0:
        raise ValueError("rho must be positive")
    norms = np.linalg.norm(arr, axis=1)
    if np.any(norms < (1.0 - eps) * rho) or np.any(norms > (1.0 + eps) * rho):
        return False
    gram = arr @ arr.T
    off = gram - np.diag(np.diag(gram))
    return bool(np.max(np.abs(off), initial=0.0) <= delta * rho * rho)


def gram_schmidt_rho(basis, rho: float) -> tuple[np.ndarray, float]:
    """Orthonormalize the normalized input vectors and rescale to length rho.

    Each input vector is first normalized, then the usual Gram-Schmidt
    recursion runs on the normalized vectors.  Returns the (m, n) array of
    rho-scaled orthogonal vectors and the largest deviation max_i |v_i - w_i|
    between input and output vectors.
    """
    arr = _as_matrix(basis)
    if rho <= 0:
        raise ValueError("rho must be positive")
    m = arr.shape[0]
    norms = np.linalg.norm(arr, axis=1)
    if np.any(norms < RANK_TOL):
        raise ValueError("rank-deficient input: vector %d has norm below %.1e"
                         % (int(np.argmax(norms < RANK_TOL)), RANK_TOL))
    w = arr / norms[:, None]
    out = np.empty_like(w)
    for k in range(m):
        f = w[k] - out[:k].T @ (out[:k] @ w[k])
        nf = np.linalg.norm(f)
        if nf < RANK_TOL:
            raise ValueError(
                "rank-deficient input: vector %d lies in the span of its predecessors" % k
            )
        out[k] = f / nf
    deviation = float(np.max(np.linalg.norm(arr - rho * out, axis=1)))
    return rho * out, deviation


def const_c2(m: int) -> float:
    """Deviation constant of the rho-scaled Gram-Schmidt scheme: 0 for m=1,
    8 for m=2, and 8[(m-1) + 2 sum_{i=0}^{m-3} 3^i (m-i-2)] in general."""
    if m < 1:
        raise ValueError("m must be at least 1")
    tail = sum(3 ** i * (m - i - 2) for i in range(0, m - 2))
    return 8.0 * ((m - 1) + 2 * tail)


def const_c3(m: int) -> float:
    """Plane-comparison constant 2m(2 + c2(m)); equals 4 for m=1."""
    if m < 1:
        raise ValueError("m must be at least 1")
    return 2.0 * m * (2.0 + const_c2(m))


def const_c4(m: int, eps: float, delta: float) -> float:
    """Constant c3/(1 - c3 (eps + c2 delta)); requires the smallness
    condition c3(m) (eps + c2(m) delta) < 1/2."""
    c2 = const_c2(m)
    c3 = const_c3(m)
    slack = c3 * (eps + c2 * delta)
    if not slack < 0.5:
        raise ValueError(
            "smallness condition violated: need c3(m)*(eps + c2(m)*delta) < 1/2, "
            "got %.6g with m=%d eps=%.6g delta=%.6g" % (slack, m, eps, delta)
        )
    return c3 / (1.0 - slack)
